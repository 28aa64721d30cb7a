"""priorlab - noninformative Bayesian priors, grid posteriors and information processing."""

__version__ = "1.0.0"
__license__ = "MIT"
