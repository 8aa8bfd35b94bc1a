"""Exception hierarchy shared by all modules."""


class RiccatiFamError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(RiccatiFamError, ValueError):
    """A constructor or operation received parameters outside its contract."""


# evaluation -----------------------------------------------------------------

class PoleProximity(RiccatiFamError):
    """Evaluation point lies inside the exclusion radius of a declared pole."""

    def __init__(self, tau, pole):
        super().__init__(f"tau={tau!r} is within the exclusion radius of pole {pole!r}")
        self.tau = tau
        self.pole = pole


class OutOfDomain(RiccatiFamError):
    """Evaluation point lies outside a curve's interval of validity."""


class EmptyEffectiveGrid(RiccatiFamError):
    """Every point of a residual grid was skipped."""


# factorization --------------------------------------------------------------

class ComplexDiscriminant(InvalidParameter):
    """B^2 - 4AC < 0, so the splitting of F(u)/u is not real."""


class ZeroCubicCoefficient(InvalidParameter):
    """The cubic engine was called with C = 0."""


class ZeroQuadraticCoefficient(InvalidParameter):
    """The quadratic engine was called with B = 0."""


class ZeroBranch(InvalidParameter):
    """Branch parameter a1 = 0."""


class ZeroConstantCofactor(InvalidParameter):
    """Constant second factor k = 0."""


class NoRealBranch(InvalidParameter):
    """The quadratic for a1 (or k) has no real root."""


# riccati / families -----------------------------------------------------------

class PoleAtReference(RiccatiFamError):
    """The particular solution is singular at the integration reference point."""


class QuadratureFailure(RiccatiFamError):
    """Adaptive quadrature exhausted its bisection budget."""


class ComplexBranch(InvalidParameter):
    """alpha^2 - 8 beta < 0 for the modified Emden preset."""


class DegenerateExponent(InvalidParameter):
    """a1 (B + Delta)/2 = 0 for the cubic Lienard preset."""


# verification -----------------------------------------------------------------

class BlowUp(RiccatiFamError):
    """Numerical trajectory escaped the blow-up guard."""

    def __init__(self, tau, value):
        super().__init__(f"|u| exceeded the blow-up guard at tau={tau!r} (u={value!r})")
        self.tau = tau
        self.value = value


class StepLimitExceeded(RiccatiFamError):
    """Integrator hit its step budget before reaching the end of the span."""


class PoleInLadder(RiccatiFamError):
    """A (lambda, tau) pair of a limit suite hits or straddles a singular lambda."""


class UnmatchableAnchor(RiccatiFamError):
    """No Bernoulli constant reproduces the member value at the anchor."""
