import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from riccati_fam.errors import InvalidParameter, PoleAtReference
from riccati_fam.factorize import factor_cubic_forward, factor_quadratic
from riccati_fam.lienard import SolutionCurve
from riccati_fam.riccati import (
    Form,
    RiccatiFamily,
    RiccatiODE,
    bernoulli_family,
    find_roots,
    general_solution,
    max_riccati_residual,
    particular_solution,
    reduce,
    singular_locus,
)

EMDEN_ODE = RiccatiODE(-1.0, 0.0)
FISHER_ODE = RiccatiODE(1.0, -1.0)
LIENARD_ODE = RiccatiODE(1.0, 1.0)


def emden_paper(lam, xi):
    return 1.0 / xi + 1.0 / (lam * xi * xi - xi)


def fisher_paper(lam, xi):
    E = math.exp(-xi)
    return 1.0 / (1.0 + math.exp(xi)) + E / ((E + 1.0) * (lam * (E + 1.0) - 1.0))


def literal_lambda(u_p, u1, tau_ref):
    """Literal parameter whose member passes through u_p(tau_ref): I1 = I2 = 0 there."""
    return 1.0 / (u_p - u1.value(tau_ref))


class TestReduce:
    def test_lienard(self):
        assert reduce(factor_cubic_forward(1, 2, 1, 1)) == LIENARD_ODE

    def test_fisher(self):
        assert reduce(factor_quadratic(2, -2, -2)) == FISHER_ODE

    def test_emden(self):
        assert reduce(factor_cubic_forward(0, 0, 1, -1)) == EMDEN_ODE

    def test_zero_slope_rejected(self):
        with pytest.raises(InvalidParameter):
            RiccatiODE(0.0, 1.0)


class TestParticular:
    def test_emden_inverse_tau(self):
        u = particular_solution(EMDEN_ODE, 0.0)
        assert u.value(2.0) == 0.5 and u.poles == (0.0,)

    def test_lienard_exponential(self):
        u = particular_solution(LIENARD_ODE, 0.0, 1.0)
        t = 0.7
        assert u.value(t) == pytest.approx(1.0 / (math.exp(-t) - 1.0), rel=1e-15)
        assert u.poles == (0.0,)

    def test_fisher_sign(self):
        assert particular_solution(FISHER_ODE, 0.0, 1.0).value(0.5) == pytest.approx(-1 / (math.exp(0.5) - 1))
        plus = bernoulli_family(FISHER_ODE, -1.0, 0.0)
        for t in (-2.0, 0.0, 3.0):
            assert plus.value(t) == pytest.approx(1 / (1 + math.exp(t)), rel=1e-15)

    def test_equilibrium_branch(self):
        u = particular_solution(LIENARD_ODE, 0.0, 0.0)
        assert u.value(12.0) == -1.0 and u.poles == ()


class TestBernoulli:
    def test_same_as_particular(self):
        a, b = bernoulli_family(LIENARD_ODE, 1.0, 0.0), particular_solution(LIENARD_ODE, 0.0, 1.0)
        assert a.value(0.4) == b.value(0.4)

    def test_rational(self):
        assert bernoulli_family(EMDEN_ODE, 0.0, 0.0).value(4.0) == 0.25

    def test_constant(self):
        u = bernoulli_family(LIENARD_ODE, 0.0)
        assert [u.value(t) for t in (-3, 0, 9)] == [-1.0, -1.0, -1.0]

    @given(st.floats(-3, 3), st.floats(-2, 2), st.floats(-3, 3), st.floats(-3, 3))
    def test_solves_riccati(self, c1, c2, K, tau):
        assume(abs(c1) > 0.05 and (c2 == 0.0 or abs(c2) > 1e-300))
        ode = RiccatiODE(c1, c2)
        u = bernoulli_family(ode, K, 0.0)
        assume(u.is_regular(tau) and abs(u.value(tau)) < 50)
        assert abs(ode.residual(u, tau)) <= 1e-10 * max(1.0, u.value(tau) ** 2)


class TestGeneralSolution:
    def test_emden_matches_paper_form(self):
        u1 = particular_solution(EMDEN_ODE, 0.0)
        lam = literal_lambda(emden_paper(-1.0, 2.0), u1, 2.0)
        assert lam == pytest.approx(-6.0)
        for form in ("closed", "quadrature"):
            m = general_solution(EMDEN_ODE, u1, lam, 2.0, form=form)
            assert m.value(1.0) == pytest.approx(0.5, abs=1e-10)
            for xi in (0.3, 0.9, 4.0):
                assert m.value(xi) == pytest.approx(emden_paper(-1.0, xi), abs=1e-9)

    def test_fisher_one_third(self):
        u1 = bernoulli_family(FISHER_ODE, -1.0, 0.0)
        lam = literal_lambda(fisher_paper(-1.0, 1.0), u1, 1.0)
        for form in ("closed", "quadrature"):
            m = general_solution(FISHER_ODE, u1, lam, 1.0, form=form)
            assert m.value(0.0) == pytest.approx(1.0 / 3.0, abs=1e-10)

    def test_large_lambda_approaches_u1(self):
        u1 = particular_solution(LIENARD_ODE, 0.0, 1.0)
        gaps = [abs(general_solution(LIENARD_ODE, u1, lam, 0.5).value(1.5) - u1.value(1.5)) for lam in (1e3, 1e4)]
        assert gaps[0] / gaps[1] == pytest.approx(10.0, rel=0.05)

    def test_auto_form_selection(self):
        u1 = particular_solution(EMDEN_ODE, 0.0)
        assert general_solution(EMDEN_ODE, u1, 1.0, 2.0).form is Form.CLOSED
        bare = SolutionCurve.from_expression(lambda t: 1.0 / t, poles=(0.0,))
        assert general_solution(EMDEN_ODE, bare, 1.0, 2.0).form is Form.QUADRATURE
        with pytest.raises(InvalidParameter):
            general_solution(EMDEN_ODE, bare, 1.0, 2.0, form="closed")

    def test_pole_at_reference(self):
        u1 = particular_solution(EMDEN_ODE, 0.0)
        with pytest.raises(PoleAtReference):
            general_solution(EMDEN_ODE, u1, 1.0, 0.0)

    def test_quadrature_agrees_with_closed(self):
        u1 = bernoulli_family(LIENARD_ODE, 0.5, 0.0)
        ts = np.linspace(-3, 3, 31)
        a = general_solution(LIENARD_ODE, u1, 0.8, 0.0, form="closed")
        b = general_solution(LIENARD_ODE, u1, 0.8, 0.0, form="quadrature")
        keep = [t for t in ts if a.curve.is_regular(t) and b.curve.is_regular(t)]
        assert np.max(np.abs(a.curve.values(keep) - b.curve.values(keep))) < 1e-9
        assert a.i1(2.0) == pytest.approx(b.i1(2.0), rel=1e-10)
        assert a.lambda_s(2.0) == pytest.approx(b.lambda_s(2.0), rel=1e-10)

    def test_first_order_residual(self):
        u1 = bernoulli_family(FISHER_ODE, -1.0, 0.0)
        for form in ("closed", "quadrature"):
            m = general_solution(FISHER_ODE, u1, -2.0, 0.0, form=form)
            res, skipped = max_riccati_residual(FISHER_ODE, m.curve, np.linspace(-5, 5, 41))
            assert res < 1e-8 and skipped == 0

    def test_member_poles_are_declared(self):
        u1 = bernoulli_family(LIENARD_ODE, 0.5, 0.0)
        m = general_solution(LIENARD_ODE, u1, 3.0, 0.0)
        for p in m.curve.poles:
            assert not m.curve.is_regular(p)
        interior = [p for p in m.curve.poles if p not in u1.poles]
        assert interior
        assert abs(m.value(interior[0] + 1e-4)) > 1e2


class TestSingularLocus:
    @staticmethod
    def emden_lambda_s(t):
        return 1.0 / t

    def test_emden_pole_at_one(self):
        u1 = particular_solution(EMDEN_ODE, 0.0)
        loc = singular_locus(EMDEN_ODE, u1, 1.0, (0.0, 10.0), lambda_s=self.emden_lambda_s)
        assert len(loc.pole_positions) == 1
        assert loc.pole_positions[0] == pytest.approx(1.0, abs=1e-10)

    def test_emden_pole_outside(self):
        u1 = particular_solution(EMDEN_ODE, 0.0)
        assert singular_locus(EMDEN_ODE, u1, -0.2, (0.0, 10.0), lambda_s=self.emden_lambda_s).pole_positions == ()

    def test_literal_convention_matches_declared_poles(self):
        u1 = bernoulli_family(LIENARD_ODE, 0.5, 0.0)
        m = general_solution(LIENARD_ODE, u1, 3.0, 0.0)
        loc = singular_locus(LIENARD_ODE, u1, 3.0, (-5.0, 5.0), tau_ref=0.0)
        declared = sorted(p for p in m.curve.poles if p not in u1.poles and -5 <= p <= 5)
        assert np.allclose(loc.pole_positions, declared, atol=1e-10)
        for p in loc.pole_positions:
            assert abs(3.0 - loc.lambda_s(p)) < 1e-10

    def test_null_lambda_member_has_no_pole(self):
        u1 = particular_solution(EMDEN_ODE, 0.0)
        fam = RiccatiFamily(EMDEN_ODE, u1, 2.0)
        assert fam.null_lambda == pytest.approx(-2.0)
        assert max(abs(fam.member(fam.null_lambda).value(t)) for t in np.linspace(0.5, 9, 20)) < 1e-12


def test_find_roots_skips_singularities():
    roots = find_roots(lambda x: 1.0 / (x - 0.55), 0.0, 1.0)
    assert roots == []
    roots = find_roots(lambda x: math.sin(x), 1.0, 10.0)
    assert np.allclose(roots, [math.pi, 2 * math.pi, 3 * math.pi], atol=1e-11)


@given(
    st.floats(0.2, 2.0) | st.floats(-2.0, -0.2),
    st.floats(-1.5, 1.5),
    st.floats(-2.0, 2.0),
    st.floats(-2.0, 2.0),
    st.floats(-3.0, 3.0),
    st.floats(0.01, 2.0),
)
def test_monotone_decrease_in_lambda(c1, c2, K, lam, tau, step):
    ode = RiccatiODE(c1, c2)
    u1 = bernoulli_family(ode, K, 0.0)
    ref = 0.25
    assume(u1.is_regular(ref) and u1.is_regular(tau) and abs(u1.value(ref)) < 1e6)
    fam = RiccatiFamily(ode, u1, ref)
    ls = fam.lambda_s(tau)
    assume(not (lam - 1e-6 <= ls <= lam + step + 1e-6))
    lo, hi = fam.member(lam), fam.member(lam + step)
    assume(lo.is_regular(tau) and hi.is_regular(tau))
    a, b = lo.value(tau), hi.value(tau)
    assume(max(abs(a), abs(b)) < 1e8)
    assert b < a
