"""Factorize polynomial Lienard equations, build their Riccati-parameter
solution families in closed form, and verify them numerically."""

from .errors import (  # noqa: F401
    RiccatiFamError,
    InvalidParameter,
    PoleProximity,
    OutOfDomain,
    EmptyEffectiveGrid,
    ComplexDiscriminant,
    ZeroCubicCoefficient,
    ZeroQuadraticCoefficient,
    ZeroBranch,
    ZeroConstantCofactor,
    NoRealBranch,
    PoleAtReference,
    QuadratureFailure,
    ComplexBranch,
    DegenerateExponent,
    BlowUp,
    StepLimitExceeded,
    PoleInLadder,
    UnmatchableAnchor,
)
from .factorize import (
    Branch,
    Factorization,
    FactorizationCheck,
    LinearFactor,
    check_factorization,
    factor_cubic_forward,
    factor_cubic_inverse,
    factor_equation,
    factor_quadratic,
    factor_quadratic_inverse,
)
from .families import (
    CubicLienardParams,
    EmdenFamily,
    EmdenParams,
    FisherFamily,
    FisherParams,
    LienardFamily,
    Sign,
    emden_family,
    emden_u1,
    fisher_family,
    fisher_u1,
    lienard_family,
    lienard_u1,
    preset,
)
from .integrator import IntegratorConfig, integrate
from .jet import Jet
from .lienard import LienardEquation, Polynomial, SolutionCurve, max_residual, residual
from .riccati import (
    Form,
    RiccatiFamily,
    RiccatiFamilyMember,
    RiccatiODE,
    SingularLocus,
    bernoulli_family,
    general_solution,
    max_riccati_residual,
    particular_solution,
    reduce,
    singular_locus,
)
from .verify import (
    VerificationReport,
    cross_check,
    equivalence_check,
    fd_residual,
    limit_checks,
    limit_suite,
    run_suite,
)

__version__ = "0.1.0"
