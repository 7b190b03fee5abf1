"""Fidelity routes, the g factor, and the log-space identities."""
import math

import numpy as np
import pytest

from xxzfidelity import (DomainError, FidelityResult, GFactor, ModelPoint,
                         NonConvergent, Path, Tolerance, fidelity,
                         fidelity_modular, fidelity_raw, fidelity_simplified,
                         g_decomposition_residual, g_product, ln_g_series,
                         short_theta_identity_residual)
from xxzfidelity.fidelity import CROSS_CHECK_WINDOW, PATH_SWITCH_X

# 50-digit reference values (independent high-precision evaluation)
LN_F_02 = -0.1163764256178567616394
F_02 = 0.8901400886919394631241
LN_F_03 = -0.25395164743899431509
LN_F_05 = -0.68072159083328070407
F_05 = 0.5062515540522396552909
LN_F_08 = -2.587911397967448257313
F_08 = 0.07517689083591090420274
LN_F_SELF_DUAL = -0.0055936488743534521262  # x = e^{-pi}
LN_G_05 = 0.3816818138155189610407

QUARTER_LN2 = 0.25 * math.log(2.0)


def _bare_ln_g(q, n_rows=80):
    """Euler transform of the defining series sum (-1)^{N+1}/(N (1+q^N)^2).

    Partial-sum averaging converges geometrically for smooth alternating
    terms, so 80 rows is machine-limited; this shares no code with the
    accelerated implementation under test.
    """
    n = np.arange(1, n_rows + 1, dtype=np.float64)
    terms = 1.0 / (n * (1.0 + q ** n) ** 2)
    s = np.cumsum(terms * np.where(np.arange(1, n_rows + 1) % 2 == 1, 1.0, -1.0))
    while s.size > 1:
        s = 0.5 * (s[:-1] + s[1:])
    return float(s[0])


class TestReferenceValues:
    def test_selector_anchors(self):
        for x, ref in ((0.2, LN_F_02), (0.3, LN_F_03), (0.5, LN_F_05),
                       (0.8, LN_F_08)):
            got = fidelity(ModelPoint.from_x(x))
            assert abs(got.ln_f - ref) < 1e-11, x
            # the error estimate must be honest, not merely small
            assert abs(got.ln_f - ref) <= got.est_rel_error, x

    def test_f_fields(self):
        for x, ref in ((0.2, F_02), (0.5, F_05), (0.8, F_08)):
            got = fidelity(ModelPoint.from_x(x))
            assert got.f == pytest.approx(ref, rel=1e-11)
            assert got.f == math.exp(got.ln_f)

    def test_every_route_at_self_dual_point(self):
        p = ModelPoint.from_eps(math.pi)
        for route in (fidelity_raw, fidelity_simplified, fidelity_modular):
            got = route(p)
            assert abs(got.ln_f - LN_F_SELF_DUAL) < 1e-12, route.__name__

    def test_raw_route_anchor(self):
        got = fidelity_raw(ModelPoint.from_x(0.3))
        assert abs(got.ln_f - LN_F_03) < 1e-11
        assert got.path is Path.RAW


class TestRouteAgreement:
    def test_three_routes_agree(self):
        for x in (0.35, 0.55, 0.75):
            p = ModelPoint.from_x(x)
            logs = [fidelity_raw(p).ln_f, fidelity_simplified(p).ln_f,
                    fidelity_modular(p).ln_f]
            spread = abs(math.expm1(max(logs) - min(logs)))
            assert spread < 1e-10, x

    def test_raw_respects_term_cap(self):
        with pytest.raises(NonConvergent):
            fidelity_raw(ModelPoint.from_x(0.5), Tolerance(1e-12, max_terms=5))


class TestPathSelector:
    def test_path_choice(self):
        assert fidelity(ModelPoint.from_x(0.2)).path is Path.SIMPLIFIED
        assert fidelity(ModelPoint.from_x(PATH_SWITCH_X)).path is Path.SIMPLIFIED
        assert fidelity(ModelPoint.from_x(0.95)).path is Path.MODULAR

    def test_cross_check_folds_discrepancy_into_estimate(self):
        lo, hi = CROSS_CHECK_WINDOW
        p = ModelPoint.from_x(0.5 * (lo + hi))
        checked = fidelity(p, cross_check=True)
        bare = fidelity(p, cross_check=False)
        assert checked.ln_f == bare.ln_f
        assert checked.est_rel_error >= bare.est_rel_error
        assert checked.est_rel_error < 1e-9

    def test_continuous_across_switch(self):
        below = fidelity(ModelPoint.from_x(PATH_SWITCH_X - 1e-9))
        above = fidelity(ModelPoint.from_x(PATH_SWITCH_X + 1e-9))
        assert below.path is not above.path
        assert abs(below.ln_f - above.ln_f) < 1e-7


class TestShape:
    def test_f_strictly_decreasing_in_x(self):
        grid = [0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.97]
        logs = [fidelity(ModelPoint.from_x(x)).ln_f for x in grid]
        assert all(a > b for a, b in zip(logs, logs[1:]))

    def test_f_in_unit_interval(self):
        for x in (0.01, 0.3, 0.6, 0.9, 0.99):
            got = fidelity(ModelPoint.from_x(x))
            assert 0.0 < got.f < 1.0
            assert got.ln_f < 0.0

    def test_small_x_expansion(self):
        # f = 1 - 3 x^2 + O(x^4)
        x = 1e-6
        got = fidelity(ModelPoint.from_x(x))
        assert got.ln_f / (-3.0 * x * x) == pytest.approx(1.0, rel=1e-6)

    def test_underflow_regime_keeps_ln_f(self):
        got = fidelity(ModelPoint.from_eps(1e-4))
        assert got.f == 0.0
        ref = -math.pi ** 2 / (16.0 * 1e-4) + QUARTER_LN2
        assert abs(got.ln_f - ref) < 1e-6


class TestGFactor:
    def test_series_matches_defining_sum(self):
        for x in (0.3, 0.5, 0.8):
            got = ln_g_series(ModelPoint.from_x(x)).ln_g
            assert got == pytest.approx(_bare_ln_g(x * x), abs=1e-12), x

    def test_reference_value(self):
        got = ln_g_series(ModelPoint.from_x(0.5))
        assert abs(got.ln_g - LN_G_05) < 1e-13
        assert got.g == math.exp(got.ln_g)

    def test_product_routes_agree_with_series(self):
        for x in (0.3, 0.5, 0.7, 0.8):
            p = ModelPoint.from_x(x)
            s = ln_g_series(p).ln_g
            peeled = g_product(p).ln_g
            direct = g_product(p, minus_one_direct=True).ln_g
            assert abs(math.expm1(peeled - s)) < 1e-11, x
            assert abs(math.expm1(direct - s)) < 1e-11, x

    def test_limits(self):
        # x -> 0: ln g -> ln 2; x -> 1: ln g -> (ln 2)/4 with O(eps) approach
        assert abs(ln_g_series(ModelPoint.from_x(1e-8)).ln_g
                   - math.log(2.0)) < 1e-10
        eps = 1e-4
        dev = ln_g_series(ModelPoint.from_eps(eps)).ln_g - QUARTER_LN2
        assert dev / eps == pytest.approx(0.25, abs=1e-3)

    def test_bounds_on_grid(self):
        for x in (0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99):
            ln_g = ln_g_series(ModelPoint.from_x(x)).ln_g
            assert QUARTER_LN2 < ln_g < math.log(2.0), x

    def test_respects_term_cap(self):
        with pytest.raises(NonConvergent):
            ln_g_series(ModelPoint.from_eps(1e-3), Tolerance(1e-12, max_terms=100))


class TestIdentities:
    def test_theta_identity(self):
        p = ModelPoint.from_x(0.5)
        for b in (1.0, 1.5, 2.0, 8.0):
            assert short_theta_identity_residual(b, p) < 1e-10, b

    def test_theta_rejects_bad_b(self):
        p = ModelPoint.from_x(0.5)
        for bad in (0.0, -1.0):
            with pytest.raises(DomainError):
                short_theta_identity_residual(bad, p)
        # b so small that x^b rounds to 1.0
        with pytest.raises(DomainError):
            short_theta_identity_residual(1e-17, p)

    def test_g_decomposition(self):
        for ix in range(2, 10):
            x = ix * 0.1
            assert g_decomposition_residual(ModelPoint.from_x(x)) < 1e-10, x


class TestResultTypes:
    def test_frozen(self):
        got = fidelity(ModelPoint.from_x(0.5))
        with pytest.raises(AttributeError):
            got.f = 0.0
        g = ln_g_series(ModelPoint.from_x(0.5))
        with pytest.raises(AttributeError):
            g.ln_g = 0.0

    def test_result_fields(self):
        got = fidelity(ModelPoint.from_x(0.5))
        assert isinstance(got, FidelityResult)
        assert isinstance(got.path, Path)
        assert got.est_rel_error > 0.0
        assert isinstance(ln_g_series(ModelPoint.from_x(0.5)), GFactor)


class TestExtendedPrecisionBackend:
    def test_matches_float_backend(self):
        pytest.importorskip("mpmath")
        from xxzfidelity import MPMathBackend

        backend = MPMathBackend(dps=30)
        p = ModelPoint.from_x(0.5)
        assert fidelity_simplified(p, backend=backend).ln_f == pytest.approx(
            LN_F_05, rel=1e-13)
        # exercises the scalar (non-vectorized) ln g loop
        assert ln_g_series(p, backend=backend).ln_g == pytest.approx(
            LN_G_05, rel=1e-13)
        assert fidelity_modular(p, backend=backend).ln_f == pytest.approx(
            LN_F_05, rel=1e-13)
