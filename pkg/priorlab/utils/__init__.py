"""Record writers and dataset files."""
