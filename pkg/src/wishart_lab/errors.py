"""Exception hierarchy shared by every module.

The CLI maps any :class:`WishartLabError` to exit status 3 and reports the
class name, so each failure mode gets its own subclass.
"""


class WishartLabError(Exception):
    """Base class for numeric and domain failures raised by the library."""


class InvalidDistribution(WishartLabError, ValueError):
    """Unknown distribution kind or parameters outside the log-concave range."""


class DimensionError(WishartLabError, ValueError):
    """Matrix dimensions that are non-positive or too large to allocate."""


class SingularGram(WishartLabError):
    """Gram matrix whose smallest eigenvalue is below the working floor."""


class ConstantMissing(WishartLabError, KeyError):
    """A universal constant required by a bound evaluator was not supplied."""


class DomainError(WishartLabError, ValueError):
    """Bound evaluated outside the range where it is stated."""


class WindowTooSmall(WishartLabError):
    """Too much probability mass falls outside a quadrature window."""


class NonPositiveDensity(WishartLabError):
    """A grid density has a zero or negative value where a logarithm is needed."""


class FisherSelfCheckFailed(WishartLabError):
    """The two finite-difference forms of the Fisher information disagree."""


class TailNotConverged(WishartLabError):
    """The Fisher information has not relaxed to its Gaussian value by t_max."""


class ConstraintViolated(WishartLabError):
    """A vector field built to satisfy A p(x) = e fails to do so."""


class DuplicateSamples(WishartLabError, ValueError):
    """Too many exact ties for a nearest-neighbour estimator."""
