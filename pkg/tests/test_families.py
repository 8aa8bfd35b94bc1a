import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from riccati_fam.errors import ComplexBranch, DegenerateExponent, InvalidParameter
from riccati_fam.factorize import Branch, check_factorization
from riccati_fam.families import (
    EMDEN_LADDER,
    FISHER_LADDER,
    LIENARD_LADDER,
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
)
from riccati_fam.lienard import max_residual
from riccati_fam.riccati import max_riccati_residual

# frozen from independent high-precision evaluation of the closed forms at xi = 1
LIENARD_AT_ONE = {0.7: -0.8638095285778118, 0.9: -0.9607296994499494, 1.1: -1.0346007590053113, 1.3: -1.0927710802283169}
FISHER_AT_ONE = {-0.2: 0.05777110646802176, -0.4: 0.09511140322926528, -1.0: 0.1553624034969636, -6.0: 0.2397317612630853}
EMDEN_AT_ONE = {-6.0: 6 / 7, -1.0: 0.5, -0.4: 2 / 7, -0.2: 1 / 6}

FIG1 = EmdenParams(3.0, 1.0, Branch.MINUS_ROOT)
FIG2 = FisherParams(1.0, Sign.PLUS)
FIG3 = CubicLienardParams(1.0, 2.0, 1.0, 1.0)


def pole_free(curve, grid, margin=1e-3):
    return [t for t in grid if curve.is_regular(t) and all(abs(t - p) > margin for p in curve.poles)]


class TestEmden:
    def test_branch_values(self):
        assert EmdenParams(3.0, 1.0, Branch.MINUS_ROOT).a1sqrtbeta == pytest.approx(-1.0)
        assert EmdenParams(3.0, 1.0, Branch.PLUS_ROOT).a1sqrtbeta == pytest.approx(-0.5)
        assert EmdenParams(6.0, 4.0, Branch.MINUS_ROOT).a1sqrtbeta == pytest.approx(-2.0)

    def test_from_shortcut(self):
        p = EmdenParams.from_a1sqrtbeta(-1.0)
        assert (p.alpha, p.beta, p.branch) == (3.0, 1.0, Branch.MINUS_ROOT)
        q = EmdenParams.from_a1sqrtbeta(-0.5)
        assert q.alpha == pytest.approx(3.0) and q.branch is Branch.PLUS_ROOT

    def test_complex_branch(self):
        with pytest.raises(ComplexBranch):
            EmdenParams(1.0, 1.0, Branch.PLUS_ROOT)

    def test_values(self):
        for lam, want in EMDEN_AT_ONE.items():
            assert emden_family(EmdenParams(3.0, 1.0, Branch.MINUS_ROOT, lam=lam)).value(1.0) == pytest.approx(want, rel=1e-14)
        assert emden_u1(FIG1).value(2.0) == 0.5

    def test_null_member(self):
        curve = EmdenFamily(FIG1).member(0.0)
        assert all(curve.value(t) == 0.0 for t in np.linspace(0.1, 10, 50))

    def test_poles(self):
        curve = EmdenFamily(FIG1).member(1.0)
        assert curve.poles == (0.0, 1.0)

    def test_factorization_rescaling(self):
        fam = EmdenFamily(EmdenParams(6.0, 4.0, Branch.MINUS_ROOT))
        f = fam.factorization
        assert f.meta["a1_paper"] == pytest.approx(f.a1 * 2.0)
        assert check_factorization(fam.equation, f).passed


class TestFisher:
    def test_u1_at_origin(self):
        assert fisher_u1(FIG2).value(0.0) == 0.5

    def test_one_third(self):
        assert fisher_family(FisherParams(1.0, Sign.PLUS, lam=-1.0)).value(0.0) == pytest.approx(1 / 3, rel=1e-15)

    def test_values(self):
        for lam, want in FISHER_AT_ONE.items():
            assert FisherFamily(FIG2).member(lam).value(1.0) == pytest.approx(want, rel=1e-13)

    def test_null_member(self):
        curve = FisherFamily(FIG2).member(0.0)
        assert max(abs(curve.value(t)) for t in np.linspace(-5, 5, 101)) < 1e-12

    def test_minus_branch_splits_domain(self):
        fam = FisherFamily(FisherParams(1.0, Sign.MINUS))
        assert fam.u1.poles == (0.0,)
        assert fam.u1.value(-1.0) > 0 and fam.u1.value(1.0) < 0

    def test_nu_constraint(self):
        assert FisherParams(2.0, Sign.PLUS).nu == 1.5
        with pytest.raises(InvalidParameter):
            FisherParams(0.0, Sign.PLUS)


class TestLienard:
    def test_u1_at_ln2(self):
        assert lienard_u1(FIG3).value(math.log(2.0)) == pytest.approx(-2.0, rel=1e-14)

    def test_values(self):
        for lam, want in LIENARD_AT_ONE.items():
            assert LienardFamily(FIG3).member(lam).value(1.0) == pytest.approx(want, rel=1e-13)

    def test_equilibrium_member(self):
        curve = lienard_family(CubicLienardParams(1, 2, 1, 1, lam=1.0))
        grid = pole_free(curve, np.linspace(0.1, 30, 300))
        assert max(abs(curve.value(t) + 1.0) for t in grid) < 1e-12

    def test_null_member(self):
        curve = LienardFamily(FIG3).member(0.0)
        assert max(abs(v) for v in curve.values(np.linspace(0.1, 5, 50))) < 1e-12

    def test_degenerate_exponent(self):
        with pytest.raises(DegenerateExponent):
            CubicLienardParams(0.0, -1.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "family,ladder,span",
    [
        (EmdenFamily(FIG1), EMDEN_LADDER, (0.1, 10)),
        (FisherFamily(FIG2), FISHER_LADDER, (-5, 5)),
        (LienardFamily(FIG3), LIENARD_LADDER, (0.1, 5)),
        (FisherFamily(FisherParams(1.0, Sign.MINUS)), FISHER_LADDER, (-5, 5)),
        (EmdenFamily(EmdenParams(3.0, 1.0, Branch.PLUS_ROOT)), EMDEN_LADDER, (0.1, 10)),
    ],
)
def test_first_and_second_order_residuals(family, ladder, span):
    for lam in ladder:
        curve = family.member(lam)
        grid = pole_free(curve, np.linspace(*span, 200), margin=0.05)
        assert max_residual(family.equation, curve, grid).max_abs < 1e-8
        assert max_riccati_residual(family.ode, curve, grid)[0] < 1e-8


@pytest.mark.parametrize("family", [EmdenFamily(FIG1), FisherFamily(FIG2), LienardFamily(FIG3)])
def test_inverse_lambda_approach(family):
    tau = 1.0
    u1 = family.u1.value(tau)
    d3, d4 = (abs(family.member(lam).value(tau) - u1) for lam in (1e3, 1e4))
    assert d3 / d4 == pytest.approx(10.0, rel=0.05)


@pytest.mark.parametrize("family", [EmdenFamily(FIG1), FisherFamily(FIG2), LienardFamily(FIG3)])
def test_lambda_s_is_the_member_singularity(family):
    tau = 1.3
    ls = family.lambda_s(tau)
    near = family.member(ls * (1 + 1e-9)).values(np.array([tau]))[0]
    assert abs(near) > 1e5


# -- properties ------------------------------------------------------------------------

lam_st = st.floats(-10, 10, allow_nan=False)


def emden_st():
    return st.builds(
        EmdenParams.from_a1sqrtbeta,
        st.floats(-3, -0.1) | st.floats(0.1, 3),
        beta=st.floats(0.2, 5),
        tau0=st.floats(-2, 2),
    )


fisher_st = st.builds(FisherParams, st.floats(-3, -0.2) | st.floats(0.2, 3), st.sampled_from(Sign), tau0=st.floats(-2, 2))


@st.composite
def lienard_st(draw):
    B, C = draw(st.floats(0.5, 3)), draw(st.floats(0.2, 2))
    # A <= B^2/(4C) keeps the discriminant real
    A = B * B / (4 * C) - draw(st.floats(1e-6, 3))
    return CubicLienardParams(A, B, C, draw(st.floats(-2, -0.2) | st.floats(0.2, 2)), tau0=draw(st.floats(-2, 2)))


def any_family():
    return st.one_of(emden_st().map(EmdenFamily), fisher_st.map(FisherFamily), lienard_st().map(LienardFamily))


@given(any_family(),
       lam_st, st.floats(-4, 4))
def test_members_solve_both_equations(family, lam, tau):
    curve = family.member(lam)
    assume(curve.is_regular(tau) and all(abs(tau - p) > 1e-2 for p in curve.poles))
    u, du, _ = curve.eval(tau)
    assume(abs(u) < 30 and abs(du) < 300)
    scale = max(1.0, abs(u)) ** 3
    assert abs(max_residual(family.equation, curve, [tau]).max_abs) < 1e-8 * scale
    assert abs(family.ode.residual(curve, tau)) < 1e-8 * scale


@given(any_family(),
       st.floats(-4, 4))
def test_null_member_vanishes(family, tau):
    curve = family.member(0.0)
    assume(curve.is_regular(tau))
    assert abs(curve.value(tau)) < 1e-12 * max(1.0, abs(family.u1.values(np.array([tau]))[0]))


@given(any_family(),
       lam_st, st.floats(0.01, 3), st.floats(-4, 4))
def test_strictly_decreasing_in_lambda(family, lam, step, tau):
    lo, hi = family.member(lam), family.member(lam + step)
    assume(lo.is_regular(tau) and hi.is_regular(tau) and family.u1.is_regular(tau))
    ls = family.lambda_s(tau)
    assume(not (lam - 1e-6 <= ls <= lam + step + 1e-6))
    a, b = lo.value(tau), hi.value(tau)
    assume(max(abs(a), abs(b)) < 1e8 and abs(a - b) > 1e-12 * max(1, abs(a)))
    assert b < a


@given(any_family(),
       lam_st, st.floats(-4, 4))
def test_derivative_matches_finite_difference(family, lam, tau):
    curve = family.member(lam)
    h = 1e-4
    assume(all(abs(tau - p) > 0.05 for p in curve.poles) and curve.is_regular(tau))
    u, du, _ = curve.eval(tau)
    assume(abs(u) < 20 and abs(du) < 100)
    fd = (curve.value(tau + h) - curve.value(tau - h)) / (2 * h)
    assert abs(du - fd) <= 1e-4 * max(1.0, abs(du))
