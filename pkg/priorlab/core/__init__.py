"""Numerical core: grids, models, priors, inference and the command runner."""
