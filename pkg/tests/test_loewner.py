from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from univcheck import functions as fc
from univcheck import loewner as lw
from univcheck.criteria import CriterionParams
from univcheck.errors import ParameterError, PoleError

IDENTITY = fc.preset("identity")
ONE = fc.preset("constant_one")


def ctx_for(f=IDENTITY, g=ONE, **params) -> lw.ChainContext:
    return lw.ChainContext.build(f, g, CriterionParams(**params))


def becker_ctx(f) -> lw.ChainContext:
    return lw.ChainContext.build(f, fc.derivative(f), CriterionParams(alpha=1, beta=0, A=1, B=1))


def test_phi2_examples():
    assert lw.phi2(ctx_for(), 0, math.log(2)) == pytest.approx(4.0, abs=1e-14)
    ctx = becker_ctx(fc.preset("z_exp_cz", 0.5))
    assert lw.phi2(ctx, 0.3 - 0.6j, 0.0) == 1
    assert lw.phi2(ctx_for(), 0.5, 1.0) == pytest.approx(math.e**2, rel=1e-14)


def test_phi2_at_origin_closed_form():
    for beta in (0, 0.3, -0.5 + 0.2j):
        ctx = ctx_for(fc.preset("koebe"), fc.divided_by_z(fc.preset("z_exp_cz", 0.2)), beta=beta)
        for t in (0.1, 1.0, 3.0):
            assert lw.phi2(ctx, 0, t) == pytest.approx((1 - beta) * math.exp(2 * t) + beta, rel=1e-13)


def test_phi3_examples():
    ctx = becker_ctx(fc.preset("polynomial", 0, 1, 0.2))
    z = 0.4 + 0.5j
    assert lw.phi3(ctx, z, 0.7) == lw.phi2(ctx, z, 0.7)
    assert lw.phi3(ctx_for(alpha=2), 0, math.log(2)) == pytest.approx(16.0, rel=1e-14)
    assert lw.phi3(ctx_for(alpha=0.75), 0, 1.0) == pytest.approx(math.exp(1.5), rel=1e-14)


def test_phi3_integer_alpha_is_repeated_product():
    f, g = fc.preset("z_exp_cz", 0.4), fc.from_coefficients([1, 0.3j], fc.UNIT_CONSTANT)
    z = 0.9 * np.exp(1j * np.linspace(0, 2 * np.pi, 24, endpoint=False))
    for n in (2, 3):
        ctx = ctx_for(f, g, alpha=n, beta=0.1)
        for t in (0.2, 1.5):
            p2 = lw.phi2(ctx, z, t)
            assert np.max(np.abs(lw.phi3(ctx, z, t) - p2**n) / np.abs(p2) ** n) <= 1e-12


def test_chain_value_examples():
    ctx = becker_ctx(fc.preset("koebe"))
    z = np.array([0.2, -0.5j, 0.8 * cmath.exp(1j)])
    assert np.allclose(lw.chain_value(ctx, z, 0.0), fc.evaluate(ctx.f, z), rtol=1e-15, atol=0)
    assert lw.chain_value(ctx, 0, 2.0) == 0


def test_identity_chain_is_exponential():
    ctx = ctx_for()
    z = lw.DIAGNOSTIC_GRID.points()
    for t in lw.T_SAMPLES:
        assert np.max(np.abs(lw.chain_value(ctx, z, t) - math.exp(t) * z) / math.exp(t)) <= 1e-12


def test_coefficient_a1_examples():
    p = CriterionParams()
    assert lw.coefficient_a1(CriterionParams(alpha=0.8 + 0.3j, beta=0.4j), 0.0) == 1
    assert lw.coefficient_a1(p, 1.0) == pytest.approx(math.e, rel=1e-15)
    assert lw.coefficient_a1(CriterionParams(beta=0.5), 1.0) == pytest.approx(1.543081, abs=1e-6)


def test_a1_matches_leading_coefficient_of_chain():
    ctx = ctx_for(fc.preset("z_exp_cz", 0.3), fc.from_coefficients([1, 0.2], fc.UNIT_CONSTANT), alpha=0.8, beta=0.2)
    r = 1e-3
    theta = 2 * np.pi * np.arange(64) / 64
    z = r * np.exp(1j * theta)
    for t in (0.25, 1.0, 2.0):
        # Cauchy integral for the z^1 coefficient on |z| = 1e-3.
        lead = np.mean(lw.chain_value(ctx, z, t) / z)
        a1 = lw.coefficient_a1(ctx.params, t)
        assert abs(lead - a1) / abs(a1) <= 1e-6


def test_transition_phi_examples():
    f = fc.preset("polynomial", 0, 1, 0.3)
    g = fc.from_coefficients([1, 0.5], fc.UNIT_CONSTANT)
    ctx = ctx_for(f, g, alpha=0.9, beta=0.2)
    z = 0.5 - 0.3j
    j = fc.eval_jet(f, z)
    assert lw.transition_phi(ctx, z, 0.0) == pytest.approx(j.d1 / (0.9 * (fc.evaluate(g, z) - 0.2)) - 1, abs=1e-15)
    assert np.all(lw.transition_phi(ctx_for(), lw.DIAGNOSTIC_GRID.points(), 0.8) == 0)
    assert lw.transition_phi(becker_ctx(fc.preset("koebe")), 0, 1.0) == pytest.approx(0, abs=1e-15)


def test_w_and_p_examples():
    assert lw.w_from_phi(0, 1, 1) == 0
    assert lw.p_from_w(0, 1, 1) == 1
    w = lw.w_from_phi(0.3, 1, 1)
    assert w == pytest.approx(-0.3)
    assert lw.p_from_w(w, 1, 1) == pytest.approx(0.7 / 1.3)
    w = lw.w_from_phi(0.2, 1, 0)
    assert w == pytest.approx(-1 / 3)
    assert lw.p_from_w(w, 1, 0) == pytest.approx(2 / 3)


def test_pole_error():
    with pytest.raises(PoleError):
        lw.w_from_phi(-1.0, 1, 0)  # (A - B) phi + A + B = 0


@settings(max_examples=100, deadline=None)
@given(
    st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
)
def test_p_w_roundtrip(w, A, B):
    if abs(A + B) < 1e-3 or abs(1 - B * w) < 1e-3:
        return
    p = lw.p_from_w(w, A, B)
    if abs(A + B * p) < 1e-3:
        return
    assert abs((p - 1) / (A + B * p) - w) <= 1e-14 * max(1, abs(p))


def _mp_chain(f_mp, g_mp, alpha, beta):
    def L(z, t):
        u = mpmath.exp(-t) * z
        fu = f_mp(u)
        return fu ** (1 - alpha) * (fu + (mpmath.exp(t) - mpmath.exp(-t)) * z * (g_mp(u) - beta)) ** alpha

    return L


@pytest.mark.parametrize("alpha,beta,A,B", [(1, 0, 1, 1), (0.8, 0.2, 0.9, 0.3), (1.3 + 0.2j, -0.1j, 0.5, -0.2 + 0.4j)])
def test_transfer_p_matches_chain_derivatives(alpha, beta, A, B):
    """p = L_t / (z L_z) by numerical differentiation of the defining product."""
    mpmath.mp.dps = 30
    f = fc.preset("z_exp_cz", 0.3)
    g = fc.from_coefficients([1, 0.2, 0.1j], fc.UNIT_CONSTANT)
    ctx = ctx_for(f, g, alpha=alpha, beta=beta, A=A, B=B)
    L = _mp_chain(lambda u: u * mpmath.exp(0.3 * u), lambda u: 1 + 0.2 * u + 0.1j * u**2, alpha, beta)
    for z, t in [(0.3 + 0.1j, 0.2), (0.6, 1.0), (-0.2 + 0.5j, 2.5)]:
        z_mp, t_mp = mpmath.mpc(z), mpmath.mpf(t)
        lt = mpmath.diff(lambda s: L(z_mp, s), t_mp)
        lz = mpmath.diff(lambda s: L(s, t_mp), z_mp)
        p_ref = complex(lt / (z_mp * lz))
        w, p = lw.transfer_w(ctx, z, t)
        assert abs(p - p_ref) <= 1e-10 * max(1, abs(p_ref))
        assert abs(w - (p_ref - 1) / (A + B * p_ref)) <= 1e-10


def test_w_at_t0_matches_condition_one_quantity():
    # With A = B, |A| = 1 and alpha = 1, |w(z, 0)| is |f'/(g - beta) - 1|.
    f = fc.preset("koebe")
    g = fc.divided_by_z(fc.preset("z_exp_cz", 0.4))
    for A in (1, 1j, cmath.exp(0.7j)):
        ctx = ctx_for(f, g, alpha=1, beta=0.3, A=A, B=A)
        z = lw.DIAGNOSTIC_GRID.points()[1:]
        w, _ = lw.transfer_w(ctx, z, 0.0)
        q = np.abs(fc.eval_jet(f, z).d1 / (fc.evaluate(g, z) - 0.3) - 1)
        assert np.max(np.abs(np.abs(w) - q) / np.maximum(1, q)) <= 1e-12


def test_origin_transfer_exact_value():
    f = fc.preset("z_exp_cz", 0.4)
    g = fc.from_coefficients([1, 0.5j], fc.UNIT_CONSTANT)
    for alpha, beta in [(1, 0), (0.75, 0.2), (1.2 - 0.3j, 0.1 + 0.1j)]:
        ctx = ctx_for(f, g, alpha=alpha, beta=beta)
        for t in lw.T_SAMPLES:
            assert lw.transition_phi(ctx, 0, t) == pytest.approx(lw.origin_phi_exact(ctx.params, t), abs=1e-14)


def test_chain_diagnostics_identity_all_pass():
    d = lw.chain_diagnostics(ctx_for())
    assert d.passed, d.items
    assert d.max_abs_w == 0


def test_chain_diagnostics_small_quadratic_all_pass():
    d = lw.chain_diagnostics(becker_ctx(fc.preset("polynomial", 0, 1, 0.1)))
    assert d.passed, d.items


def test_chain_diagnostics_koebe_transfer_bound_fails():
    d = lw.chain_diagnostics(becker_ctx(fc.preset("koebe")))
    assert not d.item("transfer_bounds").passed
    assert d.max_abs_w >= 1
    assert d.item("initial_value").passed


def test_a1_growth_threshold_depends_on_alpha():
    # |a1(20)| = e^{(2 Re alpha - 1) 20}, above 1e6 only when Re alpha > ~0.845.
    g = fc.preset("constant_one")
    assert lw.chain_diagnostics(ctx_for(IDENTITY, g, alpha=0.9)).item("a1_growth").passed
    assert not lw.chain_diagnostics(ctx_for(IDENTITY, g, alpha=0.75)).item("a1_growth").passed


def test_context_rejects_bad_inputs():
    with pytest.raises(ParameterError):
        ctx_for(beta=1)
    with pytest.raises(fc.SingularityError) as err:
        becker_ctx(fc.preset("polynomial", 0, 1, 1.5))  # f(z)/z = 1 + 1.5z vanishes at -2/3
    assert err.value.witness == pytest.approx(-2 / 3, abs=1e-12)


def test_winding_numbers():
    circle = np.exp(2j * np.pi * np.arange(256) / 256)
    assert list(lw.winding_numbers(circle, np.array([0, 0.5j, 2]))) == [1, 1, 0]
