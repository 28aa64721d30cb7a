"""Exception hierarchy for priorlab.

Every error raised on purpose by the package derives from ``PriorLabError``;
all of them are also ``ValueError`` subclasses so callers that only know about
bad-input errors still catch them.
"""

from typing import Optional


class PriorLabError(ValueError):
    """Base class for all priorlab errors."""


class DomainError(PriorLabError):
    """Invalid parameter domain, or a point outside/at a singular boundary."""


class GridError(PriorLabError):
    """Grid construction failed (bad size, scheme, or singularity mismatch)."""


class NonFiniteValueError(PriorLabError):
    """An integrand produced a non-finite value at a grid node."""

    def __init__(self, node: float, value: float, context: str = "integrand"):
        self.node = node
        self.value = value
        super().__init__(f"{context} is not finite at node {node!r} (value {value!r})")


class IntegrationError(PriorLabError):
    """Adaptive quadrature did not converge."""

    def __init__(
        self,
        message: str,
        last_estimate: float,
        achieved_tol: float,
        nodes: Optional[int] = None,
    ):
        self.last_estimate = last_estimate
        self.achieved_tol = achieved_tol
        self.nodes = nodes
        super().__init__(
            f"{message} (last estimate {last_estimate!r}, "
            f"achieved relative tolerance {achieved_tol:.3g}, nodes {nodes})"
        )


class SupportError(PriorLabError):
    """A density is positive where its reference density vanishes."""

    def __init__(self, node: float, message: str = "support violation"):
        self.node = node
        super().__init__(f"{message} at node {node!r}")


class ImproperMeasureError(PriorLabError):
    """A measure with infinite total mass was asked to normalize."""

    def __init__(self, detail: str = ""):
        super().__init__("improper measure" + (f": {detail}" if detail else ""))


class ImproperPosteriorError(PriorLabError):
    """The posterior normalizer diverges."""

    def __init__(self, detail: str = ""):
        super().__init__("improper posterior" + (f": {detail}" if detail else ""))


class ZeroMarginalError(PriorLabError):
    """The observed data have probability zero under the whole prior."""


class AtomsNotSupportedError(PriorLabError):
    """An operation defined only for purely continuous priors received atoms."""


class ModelError(PriorLabError):
    """Invalid model construction or evaluation."""


class DatasetFormatError(PriorLabError):
    """Malformed dataset file; carries the offending line number."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")
