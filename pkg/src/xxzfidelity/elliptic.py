"""Elliptic modulus, dual modulus, nome duality, and the XXZ correlation length.

The massive antiferromagnetic regime is parametrised by a nome x in (0,1)
with eps = -ln x and anisotropy Delta = -(x + 1/x)/2 < -1.  The elliptic
modulus pair is expressed through infinite products in the nome,

    k(z)  = 4 z^{1/2} (-z^2; z^2)_inf^4 / (-z; z^2)_inf^4,
    k'(z) = (z; z^2)_inf^4 / (-z; z^2)_inf^4,

and satisfies k^2 + k'^2 = 1.  The dual nome x~ = e^{-pi^2/eps} exchanges
the pair, k'(x) = k(x~), which converts the slowly convergent products near
x -> 1 into rapidly convergent ones.  The correlation length follows from

    1/xi = -1/2 ln k(x^2) = -1/2 ln((1 - k'(x)) / (1 + k'(x))) = atanh(k'(x)),

where the second form, fed by the dual products, is the branch that
survives numerically as x -> 1 (ln xi is then available even where xi
itself overflows the float range).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .backends import DEFAULT_BACKEND, FloatBackend
from .errors import DomainError, InvalidSpec, Overflow, Underflow
from .qseries import DEFAULT_TOL, _MIN_REL_TOL, Tolerance, log_multibase_product

#: nome above which correlation_length switches to the dual-modulus branch
BRANCH_SWITCH_X = 0.7

_LN_TINY = math.log(5e-324)   # below this a positive double rounds to zero
_LN_HUGE = math.log(1.7976931348623157e308)


@dataclass(frozen=True)
class ModelPoint:
    """One anisotropy point: the coordinate every formula consumes.

    Fields are mutually redundant on purpose (x = e^{-eps},
    Delta = -(x + 1/x)/2, x_dual = e^{-pi^2/eps}); construction through
    ``from_x`` / ``from_eps`` keeps them consistent, and ``__post_init__``
    rejects inconsistent hand-built instances.  ``x_dual`` is stored as a
    double and rounds to 0.0 for eps < pi^2/745; log-space consumers should
    use ``ln_x_dual``, which never underflows.
    """

    x: float
    eps: float
    delta: float
    x_dual: float

    def __post_init__(self):
        if not (0.0 < self.x < 1.0):
            raise InvalidSpec(f"x must lie in (0,1), got {self.x!r}")
        if not (self.eps > 0.0):
            raise InvalidSpec(f"eps must be positive, got {self.eps!r}")
        if abs(self.eps + math.log(self.x)) > 1e-12 * (1.0 + self.eps):
            raise InvalidSpec(
                f"inconsistent point: eps={self.eps!r} but -ln x={-math.log(self.x)!r}")
        if abs(self.delta + 0.5 * (self.x + 1.0 / self.x)) > 1e-12 * abs(self.delta):
            raise InvalidSpec(
                f"inconsistent point: delta={self.delta!r} for x={self.x!r}")
        expected_dual = math.exp(-math.pi ** 2 / self.eps)
        if abs(self.x_dual - expected_dual) > 1e-12 * max(expected_dual, 5e-324):
            raise InvalidSpec(
                f"inconsistent point: x_dual={self.x_dual!r} for eps={self.eps!r}")

    @classmethod
    def from_x(cls, x: float) -> "ModelPoint":
        x = float(x)
        if not (0.0 < x < 1.0):
            raise InvalidSpec(f"x must lie in (0,1), got {x!r}")
        eps = -math.log(x)
        return cls(x, eps, -0.5 * (x + 1.0 / x), math.exp(-math.pi ** 2 / eps))

    @classmethod
    def from_eps(cls, eps: float) -> "ModelPoint":
        eps = float(eps)
        if not (eps > 0.0):
            raise InvalidSpec(f"eps must be positive, got {eps!r}")
        x = math.exp(-eps)
        if not (0.0 < x < 1.0):
            raise InvalidSpec(f"eps={eps!r} leaves the representable x range (0,1)")
        return cls(x, eps, -0.5 * (x + 1.0 / x), math.exp(-math.pi ** 2 / eps))

    @property
    def ln_x_dual(self) -> float:
        """ln x~ = -pi^2/eps, exact in log space even when x_dual underflows."""
        return -math.pi ** 2 / self.eps


def dual_point(p: ModelPoint) -> "ModelPoint":
    """The point at the dual nome x~ = e^{-pi^2/eps}; an involution.

    The fixed point is eps = pi.  Raises Underflow when x~ is too small to
    represent as a double (eps < pi^2/745), since no valid ModelPoint exists
    there; log-space consumers should use ``p.ln_x_dual`` instead.
    """
    if p.x_dual == 0.0:
        raise Underflow(
            f"dual nome exp(-pi^2/{p.eps}) underflows; use ln_x_dual instead")
    return ModelPoint.from_x(p.x_dual)


@dataclass(frozen=True)
class EllipticModuli:
    """The modulus pair (k, k') at one nome, satisfying k^2 + k'^2 = 1."""

    k: float
    kprime: float

    def complementary_residual(self) -> float:
        return abs(self.k ** 2 + self.kprime ** 2 - 1.0)


def _log_modulus_k(ln_z: float, tol: Tolerance, backend: FloatBackend):
    """ln k at nome z given ln z; tolerates z underflowed to 0.0."""
    z = backend.exp(backend.real(ln_z))
    z2 = z * z
    return (backend.log(backend.real(4.0)) + 0.5 * backend.real(ln_z)
            + 4.0 * log_multibase_product(-z2, (z2,), tol, backend)
            - 4.0 * log_multibase_product(-z, (z2,), tol, backend))


def _log_modulus_kprime(ln_z: float, tol: Tolerance, backend: FloatBackend):
    """ln k' at nome z given ln z."""
    z = backend.exp(backend.real(ln_z))
    z2 = z * z
    return (4.0 * log_multibase_product(z, (z2,), tol, backend)
            - 4.0 * log_multibase_product(-z, (z2,), tol, backend))


def modulus_k(z: float, tol: Tolerance = DEFAULT_TOL,
              backend: FloatBackend = DEFAULT_BACKEND) -> float:
    """k(z) = 4 z^{1/2} (-z^2;z^2)_inf^4 / (-z;z^2)_inf^4 for z in (0,1).

    Assembled in log space and exponentiated once, so the fourth powers
    cannot overflow or underflow on the way.
    """
    if not (0.0 < z < 1.0):
        raise DomainError(f"nome must lie in (0,1), got {z!r}")
    return backend.to_float(backend.exp(_log_modulus_k(math.log(z), tol, backend)))


def modulus_kprime(z: float, tol: Tolerance = DEFAULT_TOL,
                   backend: FloatBackend = DEFAULT_BACKEND) -> float:
    """k'(z) = (z;z^2)_inf^4 / (-z;z^2)_inf^4 for z in (0,1)."""
    if not (0.0 < z < 1.0):
        raise DomainError(f"nome must lie in (0,1), got {z!r}")
    return backend.to_float(backend.exp(_log_modulus_kprime(math.log(z), tol, backend)))


def moduli(z: float, tol: Tolerance = DEFAULT_TOL,
           backend: FloatBackend = DEFAULT_BACKEND) -> EllipticModuli:
    """Both moduli at one nome, for complementary-relation checks."""
    return EllipticModuli(modulus_k(z, tol, backend), modulus_kprime(z, tol, backend))


def log_correlation_length(p: ModelPoint, tol: Tolerance = DEFAULT_TOL,
                           backend: FloatBackend = DEFAULT_BACKEND,
                           branch: str | None = None) -> float:
    """ln xi, assembled fully in log space so it exists for every valid point.

    branch selects the evaluation route (mathematically identical):
      - "direct": 1/xi = -1/2 ln k(x^2), products in the nome x^2.  Because
        k(x^2) = 1 - O(1/xi), the subtraction leaves |ln k| ~ 2/xi and the
        route loses roughly the factor xi in relative accuracy; it is the
        natural choice only while xi is modest (small x);
      - "dual":   1/xi = atanh(k'(x)) with k'(x) = k(x~), products in the
        tiny dual nome, the only convergent route as x -> 1.  When k'
        drops below sqrt(3*eps_machine), atanh(k') = k' to working
        precision and ln xi = -ln k' is used outright (k' itself may
        underflow; its log never does).
    None picks "direct" for x <= 0.7 and "dual" above.
    """
    if branch is None:
        branch = "dual" if p.x > BRANCH_SWITCH_X else "direct"
    if branch == "direct":
        # ln k(x^2) = -2/xi is tiny while the assembled log-products are O(1),
        # so the product tolerance must absorb that amplification: tighten it
        # two decades (floored at the representable minimum).
        tight = Tolerance(max(0.01 * tol.rel_tol, _MIN_REL_TOL), tol.max_terms)
        ln_k = _log_modulus_k(-2.0 * p.eps, tight, backend)
        ln_k_f = backend.to_float(ln_k)
        if ln_k_f <= _LN_TINY:
            raise Underflow(f"k(x^2) rounds to zero at x={p.x!r}; xi below resolution")
        inv_xi = -0.5 * ln_k
        return backend.to_float(-backend.log(inv_xi))
    if branch == "dual":
        ln_kp = _log_modulus_kprime_dual(p, tol, backend)
        ln_kp_f = backend.to_float(ln_kp)
        if ln_kp_f <= 0.5 * math.log(3.0 * backend.eps):
            return -ln_kp_f
        kp = backend.exp(ln_kp)
        inv_xi = backend.atanh(kp)
        return backend.to_float(-backend.log(inv_xi))
    raise InvalidSpec(f"branch must be 'direct', 'dual' or None, got {branch!r}")


def _log_modulus_kprime_dual(p: ModelPoint, tol: Tolerance, backend: FloatBackend):
    """ln k'(x) through the duality k'(x) = k(x~), using ln x~ = -pi^2/eps."""
    return _log_modulus_k(p.ln_x_dual, tol, backend)


def correlation_length(p: ModelPoint, tol: Tolerance = DEFAULT_TOL,
                       backend: FloatBackend = DEFAULT_BACKEND,
                       branch: str | None = None) -> float:
    """xi > 0; raises Overflow once xi leaves the double range (eps < ~0.0067).

    Use log_correlation_length for asymptotic work near x -> 1.
    """
    ln_xi = log_correlation_length(p, tol, backend, branch)
    if ln_xi > _LN_HUGE:
        raise Overflow(
            f"xi = exp({ln_xi:.6g}) exceeds the float range; "
            "use log_correlation_length")
    return math.exp(ln_xi)
