"""Bipartite fidelity of the infinite antiferromagnetic XXZ chain.

Three independent routes compute the same f(x), and their agreement is the
package's central numerical certificate:

* raw route — the unsimplified product
      f = (x^2;x^4) (x^6;x^8,x^8)^2 (x^10;x^8,x^8)^2 (x^2;x^4,x^8)^2
          / [(x^4;x^8,x^8)^2 (x^12;x^8,x^8)^2 (x^4;x^4,x^8)^2];
* simplified route — after the base-splitting identities collapse it to
      f = (x^2;x^4) (-x^4;x^4,x^4)^2 / (-x^2;x^4,x^4)^2;
* modular route — after pulling the divergence into dual-nome factors,
      f = x^{1/4} x~^{1/16} (-x~;x~)_inf / (x~^{1/2};x~)_inf * g,
  with x~ = e^{-pi^2/eps} and the residual factor g obeying

      ln g = sum_{N>=1} (-1)^{N+1} / (N (1 + x^{2N})^2),

  which stays convergent as x -> 1 where ln g -> (ln 2)/4.

Everything is assembled in log space and exponentiated once at the end:
x~^{1/16} alone underflows for eps < 0.03, and f itself leaves the double
range for eps < ~8e-4 (ln_f stays exact there and is the field downstream
asymptotics consume).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .backends import DEFAULT_BACKEND, FloatBackend
from .elliptic import ModelPoint
from .errors import DomainError, NonConvergent
from .qseries import (DEFAULT_TOL, SERIES_MAX_TERMS, QProductSpec, Tolerance,
                      log_multibase_product, qproduct_direct)

#: nome above which the path selector switches from Simplified to Modular
PATH_SWITCH_X = 0.7
#: window where fidelity() cross-checks the two applicable routes
CROSS_CHECK_WINDOW = (0.6, 0.9)

_LN_G_CHUNK = 1 << 16


class Path(enum.Enum):
    """Which product representation produced a FidelityResult."""

    RAW = "raw"
    SIMPLIFIED = "simplified"
    MODULAR = "modular"


@dataclass(frozen=True)
class FidelityResult:
    """Value and log-value of f, the route used, and an error estimate.

    est_rel_error accumulates the loosest relative tolerance over every
    constituent product (scaled by the magnitude of its log contribution),
    so it is a bound-flavored estimate of the relative error of f.  f
    underflows to 0.0 for ln_f < -745; ln_f is always the authoritative
    field.
    """

    f: float
    ln_f: float
    path: Path
    est_rel_error: float


@dataclass(frozen=True)
class GFactor:
    """The x -> 1 convergent residual factor g = e^{ln_g} of the modular route."""

    g: float
    ln_g: float


def _combine(parts, rel_tol, backend):
    """Sum coef*log-term contributions; returns (ln_f, est_rel_error)."""
    ln_f = backend.real(0.0)
    magnitude = 0.0
    for coef, term in parts:
        ln_f = ln_f + coef * term
        magnitude += abs(coef) * abs(backend.to_float(term))
    est = magnitude * (rel_tol + backend.eps) + backend.eps
    return ln_f, est


def _result(ln_f, est, path, backend):
    ln_f_f = backend.to_float(ln_f)
    return FidelityResult(f=math.exp(ln_f_f), ln_f=ln_f_f, path=path,
                          est_rel_error=est)


def fidelity_raw(p: ModelPoint, tol: Tolerance = DEFAULT_TOL,
                 backend: FloatBackend = DEFAULT_BACKEND) -> FidelityResult:
    """f by the unsimplified seven-product form (direct-evaluation regime).

    Intended for x <= 0.9; closer to 1 the constituent series need ever
    more terms and eventually raise NonConvergent against the term cap.
    """
    x = backend.real(p.x)
    x2 = x * x
    x4 = x2 * x2
    x6 = x4 * x2
    x8 = x4 * x4
    x10 = x8 * x2
    x12 = x8 * x4

    def L(z, bases):
        return log_multibase_product(z, bases, tol, backend)

    parts = [
        (1.0, L(x2, (x4,))),
        (2.0, L(x6, (x8, x8))),
        (2.0, L(x10, (x8, x8))),
        (-2.0, L(x4, (x8, x8))),
        (-2.0, L(x12, (x8, x8))),
        (2.0, L(x2, (x4, x8))),
        (-2.0, L(x4, (x4, x8))),
    ]
    ln_f, est = _combine(parts, tol.rel_tol, backend)
    return _result(ln_f, est, Path.RAW, backend)


def fidelity_simplified(p: ModelPoint, tol: Tolerance = DEFAULT_TOL,
                        backend: FloatBackend = DEFAULT_BACKEND) -> FidelityResult:
    """f = (x^2;x^4) (-x^4;x^4,x^4)^2 / (-x^2;x^4,x^4)^2."""
    x = backend.real(p.x)
    x2 = x * x
    x4 = x2 * x2

    def L(z, bases):
        return log_multibase_product(z, bases, tol, backend)

    parts = [
        (1.0, L(x2, (x4,))),
        (2.0, L(-x4, (x4, x4))),
        (-2.0, L(-x2, (x4, x4))),
    ]
    ln_f, est = _combine(parts, tol.rel_tol, backend)
    return _result(ln_f, est, Path.SIMPLIFIED, backend)


def _ln_g_vectorized(eps: float, rel_tol: float, max_terms: int) -> float:
    """Accelerated ln g on doubles: ln g = ln 2 - sum (-1)^{N+1} u_N / N with
    u_N = 1 - (1+q^N)^{-2} = q^N (2 + q^N) / (1 + q^N)^2 and q = x^2.

    u_N/N decreases strictly, so the alternating tail is bounded by the next
    term.  Terms decay like e^{-2 N eps}: the subtraction of the x -> 0
    limit ln 2 is what keeps the term count ~ |ln rel_tol| / (2 eps) instead
    of the 1/rel_tol of the bare series.
    """
    ln_q = -2.0 * eps
    ln2 = math.log(2.0)
    parts = []
    stop_n = None
    start = 1
    while start <= max_terms:
        end = min(start + _LN_G_CHUNK - 1, max_terms)
        n = np.arange(start, end + 1, dtype=np.float64)
        y = np.exp(n * ln_q)
        t = y * (2.0 + y) / ((1.0 + y) ** 2) / n
        signs = np.where(np.arange(start, end + 1) % 2 == 1, 1.0, -1.0)
        parts.append(float(signs.dot(t)))
        ln_g = ln2 - math.fsum(parts)
        if float(t[-1]) <= rel_tol * abs(ln_g):
            stop_n = end
            break
        start = end + 1
    if stop_n is None:
        raise NonConvergent(
            f"ln g series needed more than {max_terms} terms at eps={eps}")

    # stability guard: double the term count and require agreement
    if 2 * stop_n > max_terms:
        raise NonConvergent(
            f"ln g stability guard needs {2 * stop_n} terms, cap is {max_terms}")
    for start in range(stop_n + 1, 2 * stop_n + 1, _LN_G_CHUNK):
        end = min(start + _LN_G_CHUNK - 1, 2 * stop_n)
        n = np.arange(start, end + 1, dtype=np.float64)
        y = np.exp(n * ln_q)
        t = y * (2.0 + y) / ((1.0 + y) ** 2) / n
        signs = np.where(np.arange(start, end + 1) % 2 == 1, 1.0, -1.0)
        parts.append(float(signs.dot(t)))
    ln_g_doubled = ln2 - math.fsum(parts)
    if abs(ln_g_doubled - ln_g) > 8.0 * rel_tol * abs(ln_g_doubled):
        raise NonConvergent(
            f"ln g unstable under term doubling at eps={eps}: "
            f"{ln_g} vs {ln_g_doubled}")
    return ln_g_doubled


def _ln_g_scalar(eps: float, rel_tol: float, max_terms: int, backend: FloatBackend):
    """Backend-generic scalar loop for the accelerated ln g series."""
    one = backend.real(1.0)
    two = backend.real(2.0)
    ln2 = backend.log(two)
    q = backend.exp(backend.real(-2.0) * backend.real(eps))
    qa = one
    acc = backend.real(0.0)
    sign = 1.0
    stop_n = None
    for n in range(1, max_terms + 1):
        qa = qa * q
        t = qa * (two + qa) / ((one + qa) * (one + qa) * n)
        acc = acc + sign * t
        sign = -sign
        ln_g = ln2 - acc
        if stop_n is None:
            if backend.to_float(t) <= rel_tol * abs(backend.to_float(ln_g)):
                stop_n = n
                ln_g_first = ln_g
        elif n >= 2 * stop_n:
            if abs(backend.to_float(ln_g - ln_g_first)) > \
                    8.0 * rel_tol * abs(backend.to_float(ln_g)):
                raise NonConvergent(
                    f"ln g unstable under term doubling at eps={eps}")
            return ln_g
    raise NonConvergent(
        f"ln g series needed more than {max_terms} terms at eps={eps}")


def ln_g_series(p: ModelPoint, tol: Tolerance = DEFAULT_TOL,
                backend: FloatBackend = DEFAULT_BACKEND) -> GFactor:
    """The g factor from its log series, the route that is stable as x -> 1.

    ln g runs from ln 2 (x -> 0) down to (ln 2)/4 (x -> 1), the approach to
    the limit being O(eps).
    """
    rel_tol = tol.rel_tol
    max_terms = tol.cap(SERIES_MAX_TERMS)
    if backend.vectorized:
        ln_g = _ln_g_vectorized(p.eps, rel_tol, max_terms)
        return GFactor(g=math.exp(ln_g), ln_g=ln_g)
    ln_g = _ln_g_scalar(p.eps, rel_tol, max_terms, backend)
    return GFactor(g=math.exp(backend.to_float(ln_g)),
                   ln_g=backend.to_float(ln_g))


def g_product(p: ModelPoint, tol: Tolerance = DEFAULT_TOL,
              backend: FloatBackend = DEFAULT_BACKEND,
              minus_one_direct: bool = False) -> GFactor:
    """g by its product form (-1;x^4,x^4)(-x^4;x^4,x^4)/(-x^2;x^4,x^4)^2.

    The |z| = 1 factor is normally rewritten through the peel identity
    (-1; a, a) = 2 (-a; a) (-a; a, a) so everything runs on the log series;
    minus_one_direct=True evaluates it by the direct product instead, which
    makes the result an independent second route for testing.
    """
    x = backend.real(p.x)
    x2 = x * x
    x4 = x2 * x2

    def L(z, bases):
        return log_multibase_product(z, bases, tol, backend)

    if minus_one_direct:
        minus_one = qproduct_direct(
            QProductSpec(-1.0, (backend.to_float(x4), backend.to_float(x4))),
            tol, backend)
        ln_minus_one = backend.log(minus_one)
        ln_g = (ln_minus_one + L(-x4, (x4, x4)) - 2.0 * L(-x2, (x4, x4)))
    else:
        ln_g = (backend.log(backend.real(2.0)) + L(-x4, (x4,))
                + 2.0 * L(-x4, (x4, x4)) - 2.0 * L(-x2, (x4, x4)))
    ln_g_f = backend.to_float(ln_g)
    return GFactor(g=math.exp(ln_g_f), ln_g=ln_g_f)


def fidelity_modular(p: ModelPoint, tol: Tolerance = DEFAULT_TOL,
                     backend: FloatBackend = DEFAULT_BACKEND) -> FidelityResult:
    """f = x^{1/4} x~^{1/16} (-x~;x~)/(x~^{1/2};x~) * g, in log space.

    The dual nome x~ = e^{-pi^2/eps} makes this the fast route near x -> 1
    (for eps < 0.013, x~ underflows as a double and the product logs are
    simply 0 to working precision — the assembly keeps using ln x~ =
    -pi^2/eps exactly).  It remains valid down to small x, where x~ -> 1
    merely makes it slow; prefer the simplified route below x ~ 0.3.
    """
    ln_xt = backend.real(p.ln_x_dual)
    xt = backend.exp(ln_xt)
    xt_half = backend.exp(0.5 * ln_xt)
    g = ln_g_series(p, tol, backend)

    def L(z, bases):
        return log_multibase_product(z, bases, tol, backend)

    parts = [
        (0.25, backend.real(-p.eps)),
        (0.0625, ln_xt),
        (1.0, L(-xt, (xt,))),
        (-1.0, L(xt_half, (xt,))),
        (1.0, backend.real(g.ln_g)),
    ]
    ln_f, est = _combine(parts, tol.rel_tol, backend)
    return _result(ln_f, est, Path.MODULAR, backend)


def short_theta_identity_residual(b: float, p: ModelPoint,
                                  tol: Tolerance = DEFAULT_TOL,
                                  backend: FloatBackend = DEFAULT_BACKEND) -> float:
    """Relative residual of the single-product modular identity

        x^{-b/48} (x^{b/2}; x^b)_inf = sqrt(2) x~^{1/(6b)} (-x~^{4/b}; x~^{4/b})_inf

    for real b > 0, computed fully in log space on both sides.
    """
    if not (b > 0.0):
        raise DomainError(f"b must be positive, got {b!r}")
    eps = p.eps
    xb = backend.exp(backend.real(-b * eps))
    xb_half = backend.exp(backend.real(-0.5 * b * eps))
    if not backend.to_float(xb) < 1.0:
        raise DomainError(f"x^b rounds to 1 for b={b!r}, eps={eps!r}")
    ln_xt4b = 4.0 / b * p.ln_x_dual
    xt4b = backend.exp(backend.real(ln_xt4b))

    lhs = (backend.real(b / 48.0 * eps)
           + log_multibase_product(xb_half, (xb,), tol, backend))
    rhs = (0.5 * backend.log(backend.real(2.0))
           + backend.real(p.ln_x_dual / (6.0 * b))
           + log_multibase_product(-xt4b, (xt4b,), tol, backend))
    return abs(backend.to_float(backend.expm1(lhs - rhs)))


def g_decomposition_residual(p: ModelPoint, tol: Tolerance = DEFAULT_TOL,
                             backend: FloatBackend = DEFAULT_BACKEND) -> float:
    """Relative residual of the split f = (x^2;x^4) / (2 (-x^4;x^4)) * g.

    The right-hand side takes g from ln_g_series, so the check ties the
    product representation of f to the independently summed log series.
    """
    x = backend.real(p.x)
    x2 = x * x
    x4 = x2 * x2
    g = ln_g_series(p, tol, backend)
    ln_rhs = (log_multibase_product(x2, (x4,), tol, backend)
              - backend.log(backend.real(2.0))
              - log_multibase_product(-x4, (x4,), tol, backend)
              + backend.real(g.ln_g))
    ln_lhs = backend.real(fidelity_simplified(p, tol, backend).ln_f)
    return abs(backend.to_float(backend.expm1(ln_lhs - ln_rhs)))


def fidelity(p: ModelPoint, tol: Tolerance = DEFAULT_TOL,
             backend: FloatBackend = DEFAULT_BACKEND,
             cross_check: bool = True) -> FidelityResult:
    """Route selector: Simplified for x <= 0.7, Modular above.

    Inside the overlap window [0.6, 0.9] (and with cross_check on) the other
    route is evaluated too and the observed discrepancy is folded into
    est_rel_error, so a silent divergence of the two representations cannot
    pass unnoticed.
    """
    use_modular = p.x > PATH_SWITCH_X
    primary = (fidelity_modular if use_modular else fidelity_simplified)(p, tol, backend)
    lo, hi = CROSS_CHECK_WINDOW
    if cross_check and lo <= p.x <= hi:
        other = (fidelity_simplified if use_modular else fidelity_modular)(p, tol, backend)
        discrepancy = abs(math.expm1(primary.ln_f - other.ln_f))
        return replace(primary,
                       est_rel_error=max(primary.est_rel_error, discrepancy))
    return primary
