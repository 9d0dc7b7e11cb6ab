"""Error types shared across the package."""


class G2Error(Exception):
    """Base class for all package errors."""


class DegenerateError(G2Error):
    """An interpolation instance degenerated (unexpected degree drop);
    the caller should drop the instance and resample."""


class NoConvergentError(G2Error):
    """No continued-fraction convergent met the error bound; the working
    precision is too low."""


class PrecisionLossError(G2Error):
    """A floating computation lost too many bits to be trusted; the caller
    should double the precision and retry."""


class IllConditionedError(G2Error):
    """Interpolation nodes are too close together."""


class NumericError(G2Error):
    """A numerical consistency check failed beyond tolerance."""


class BudgetExceededError(G2Error):
    """An enumeration exceeded its configured bound (usually a sign of a
    wrong membership predicate)."""


class NotInGamma0Error(G2Error):
    """Matrix is not in Gamma_0(p): lower-left block not divisible by p."""


class NonTerminationError(G2Error):
    """Fundamental-domain reduction did not settle within the step bound."""


class SlowConvergenceError(G2Error):
    """Theta series would need an excessive truncation radius; the point
    must be reduced first."""


class VanishingDenominatorError(G2Error):
    """A theta quotient denominator is (numerically) zero."""


class StallError(G2Error):
    """Borchardt iteration failed to contract within the iteration bound."""


class BranchAmbiguousError(G2Error):
    """The sign of Im(tau3) is too small to pick the square-root branch."""


class SingularError(G2Error):
    """A conversion denominator vanishes (singular locus of the map)."""


class ProductOfEllipticError(SingularError):
    """h10 vanishes: the point corresponds to a product of elliptic curves."""


class PathFailureError(G2Error):
    """Newton continuation lost the path; retry with a new seed."""


class SingularTargetError(G2Error):
    """Inversion target lies on the singular locus of the invariant map."""


class NearDenominatorError(G2Error):
    """An evaluation point is too close to the denominator locus; the grid
    node must be rejected and resampled."""


class UnstableError(G2Error):
    """Degree probes failed to stabilize within the probe budget."""


class NormalizationZeroError(G2Error):
    """The denominator constant term after substitution is zero; retry the
    interpolation with a random shift."""
