"""Finite-chain exact-diagonalization cross-check of the product formulas.

A length-L chain carries the Hamiltonian

    H = -1/2 sum_bonds (sx sx + sy sy + Delta sz sz),    Delta = -(x + 1/x)/2,

over all L-1 nearest-neighbor bonds, or with the central bond L/2 - L/2+1
removed for the split chain.  The alternating "+-+-" boundary conditions of
the infinite problem are emulated by Néel pinning fields: virtual sites 0
and L+1 frozen to the alternating pattern couple to the outer spins through
the same -1/2 Delta sz sz exchange, selecting a unique finite-volume ground
state in the massive regime.

Everything is built in a fixed-magnetization sector basis (bitmasks of up
spins); the full and split ground states live in the zero sector for even
L, and the split ground state is assembled exactly as the tensor product of
the two half-chain ground states.  The finite-size fidelity

    f_L = |<gs(H)|gs_left x gs_right>|^2

converges toward the infinite-chain f(x) as L grows; this module is a
verification harness with loose tolerances, not a second route to the
exact result.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .elliptic import ModelPoint
from .errors import InvalidSpec, NoConvergence, SectorMismatch, SizeLimit
from .fidelity import fidelity as _exact_fidelity

#: refuse to build sector bases beyond this dimension
SECTOR_DIM_CAP = 200_000
#: below this dimension the dense eigensolver is used
DENSE_DIM_LIMIT = 2000
#: warn when the finite-volume gap shrinks below this
GAP_FLAG = 1e-8


class Pinning(enum.Enum):
    """Boundary treatment: free ends, or Néel fields on virtual outer sites."""

    NONE = "none"
    NEEL = "neel"


@dataclass(frozen=True)
class SpinChainSpec:
    """Finite-chain description: length, nome, split flag, boundary pinning."""

    L: int
    x: float
    split: bool = False
    pinning: Pinning = Pinning.NEEL

    def __post_init__(self):
        if self.L < 4 or self.L % 2 != 0:
            raise InvalidSpec(f"L must be an even integer >= 4, got {self.L!r}")
        if not (0.0 < self.x < 1.0):
            raise InvalidSpec(f"x must lie in (0,1), got {self.x!r}")
        if not isinstance(self.pinning, Pinning):
            raise InvalidSpec(f"pinning must be a Pinning member, got {self.pinning!r}")

    @property
    def delta(self) -> float:
        return -0.5 * (self.x + 1.0 / self.x)


@dataclass(frozen=True, eq=False)
class GroundState:
    """Lowest eigenpair within one magnetization sector.

    sector is the total-sigma^z eigenvalue (2 * n_up - n_sites); gap is the
    distance to the next eigenvalue when the solver produced one (None for
    one-dimensional sectors).
    """

    energy: float
    amplitudes: np.ndarray
    sector: int
    gap: float | None = None


def _neel_sign(site: int) -> int:
    """The frozen alternating pattern, +1 on odd (1-based) sites."""
    return 1 if site % 2 == 1 else -1


def sector_basis(n_sites: int, n_up: int) -> list[int]:
    """All n_sites-bit masks with n_up bits set (site j <-> bit j-1), sorted."""
    masks = [sum(1 << p for p in positions)
             for positions in combinations(range(n_sites), n_up)]
    return sorted(masks)


def _sector_matrix(n_sites, n_up, bonds, fields, delta):
    """Sparse symmetric H in the (n_sites, n_up) sector.

    bonds: (a, b) 1-based site pairs carrying the exchange;
    fields: (site, h) pairs adding h * sigma^z_site.
    """
    basis = sector_basis(n_sites, n_up)
    index = {m: i for i, m in enumerate(basis)}
    dim = len(basis)
    diag = np.zeros(dim)
    rows, cols, vals = [], [], []
    for i, m in enumerate(basis):
        d = 0.0
        for a, b in bonds:
            sa = 1.0 if (m >> (a - 1)) & 1 else -1.0
            sb = 1.0 if (m >> (b - 1)) & 1 else -1.0
            d += -0.5 * delta * sa * sb
            if sa != sb:
                m2 = m ^ ((1 << (a - 1)) | (1 << (b - 1)))
                rows.append(i)
                cols.append(index[m2])
                vals.append(-1.0)
        for site, h in fields:
            s = 1.0 if (m >> (site - 1)) & 1 else -1.0
            d += h * s
        diag[i] = d
    H = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    H = H + sp.diags(diag).tocsr()
    return H


def build_hamiltonian(spec: SpinChainSpec, dim_cap: int = SECTOR_DIM_CAP):
    """Sparse symmetric H of the (possibly split) chain in the zero sector."""
    L = spec.L
    n_up = L // 2
    dim = math.comb(L, n_up)
    if dim > dim_cap:
        raise SizeLimit(f"zero sector of L={L} has dimension {dim} > cap {dim_cap}")
    bonds = [(j, j + 1) for j in range(1, L)]
    if spec.split:
        bonds.remove((L // 2, L // 2 + 1))
    fields = []
    if spec.pinning is Pinning.NEEL:
        h = -0.5 * spec.delta
        fields = [(1, h * _neel_sign(0)), (L, h * _neel_sign(L + 1))]
    return _sector_matrix(L, n_up, bonds, fields, spec.delta)


def ground_state(H, dim_hint: int | None = None, sector: int = 0,
                 method: str = "auto", tol: float = 0.0,
                 maxiter: int | None = None) -> GroundState:
    """Lowest eigenpair of a symmetric operator; deterministic.

    Dense diagonalization below DENSE_DIM_LIMIT (or method="dense"),
    otherwise a Lanczos solve seeded with the normalized all-ones vector
    (method="iterative" forces it).  The gap to the next level is recorded
    and a warning is emitted when it falls below GAP_FLAG, signalling a
    near-degenerate finite-volume ground state.
    """
    dim = dim_hint if dim_hint is not None else H.shape[0]
    if method not in ("auto", "dense", "iterative"):
        raise InvalidSpec(f"unknown method {method!r}")
    use_dense = method == "dense" or (method == "auto" and dim < DENSE_DIM_LIMIT)

    if use_dense or dim <= 2:
        dense = H.toarray() if sp.issparse(H) else np.asarray(H, dtype=float)
        w, v = np.linalg.eigh(dense)
        energy = float(w[0])
        vec = v[:, 0]
        gap = float(w[1] - w[0]) if dim > 1 else None
    else:
        v0 = np.full(dim, 1.0 / math.sqrt(dim))
        try:
            w, v = spla.eigsh(H, k=2, which="SA", v0=v0, tol=tol, maxiter=maxiter)
        except spla.ArpackNoConvergence as exc:
            raise NoConvergence(f"Lanczos failed to converge: {exc}") from exc
        order = np.argsort(w)
        energy = float(w[order[0]])
        vec = v[:, order[0]]
        gap = float(w[order[1]] - w[order[0]])

    vec = np.asarray(vec, dtype=float)
    vec = vec / np.linalg.norm(vec)
    pivot = int(np.argmax(np.abs(vec)))
    if vec[pivot] < 0.0:
        vec = -vec
    if gap is not None and gap < GAP_FLAG:
        warnings.warn(f"near-degenerate ground state: gap = {gap:.3e}",
                      RuntimeWarning)
    return GroundState(energy=energy, amplitudes=vec, sector=sector, gap=gap)


def _half_ground(n_sites: int, delta: float, pinning: Pinning, side: str,
                 tol: float = 0.0) -> GroundState:
    """Global ground state of one half-chain, minimized over all sectors.

    The left half keeps the virtual-site-0 field on its first site; the
    right half keeps the virtual-site-(L+1) field on its last site (its
    sign is +1 for even L, continuing the alternating pattern).
    """
    bonds = [(j, j + 1) for j in range(1, n_sites)]
    fields = []
    if pinning is Pinning.NEEL:
        h = -0.5 * delta
        if side == "left":
            fields = [(1, h * _neel_sign(0))]
        else:
            fields = [(n_sites, h * _neel_sign(2 * n_sites + 1))]
    best = None
    for n_up in range(n_sites + 1):
        H = _sector_matrix(n_sites, n_up, bonds, fields, delta)
        gs = ground_state(H, sector=2 * n_up - n_sites, tol=tol)
        if best is None or gs.energy < best.energy:
            best = gs
    return best


def split_product_state(L: int, left: GroundState, right: GroundState) -> np.ndarray:
    """Tensor product of half-chain ground states on the full zero-sector basis.

    Raises SectorMismatch unless the half sectors add up to zero, i.e.
    unless the product state has any weight in the zero sector at all.
    """
    if left.sector + right.sector != 0:
        raise SectorMismatch(
            f"half-chain sectors {left.sector} + {right.sector} != 0")
    half = L // 2
    n_up_left = (left.sector + half) // 2
    n_up_right = (right.sector + half) // 2
    index_left = {m: i for i, m in enumerate(sector_basis(half, n_up_left))}
    index_right = {m: i for i, m in enumerate(sector_basis(half, n_up_right))}
    basis_full = sector_basis(L, L // 2)
    lo_mask = (1 << half) - 1
    product = np.zeros(len(basis_full))
    for i, m in enumerate(basis_full):
        ml = m & lo_mask
        il = index_left.get(ml)
        if il is None:
            continue
        ir = index_right.get(m >> half)
        if ir is None:
            continue
        product[i] = left.amplitudes[il] * right.amplitudes[ir]
    return product


def bipartite_fidelity_finite(L: int, x: float, pinning: Pinning = Pinning.NEEL,
                              tol: float = 0.0) -> float:
    """f_L = |<gs(full chain)|gs(left half) x gs(right half)>|^2.

    The split ground state is assembled from the half-chain ground states,
    which is both cheaper and exact (the removed bond decouples the
    halves).  tol is handed to the iterative eigensolver (0 = machine
    precision).
    """
    spec = SpinChainSpec(L, x, split=False, pinning=pinning)
    full = ground_state(build_hamiltonian(spec), sector=0, tol=tol)
    delta = spec.delta
    left = _half_ground(L // 2, delta, pinning, "left", tol)
    right = _half_ground(L // 2, delta, pinning, "right", tol)
    product = split_product_state(L, left, right)
    overlap = float(np.dot(full.amplitudes, product))
    return overlap * overlap


@dataclass(frozen=True)
class ConvergenceRow:
    """One line of a convergence study: chain length, f_L, |f_L - f_exact|."""

    L: int
    f_finite: float
    abs_error: float


def convergence_study(Ls, x: float, pinning: Pinning = Pinning.NEEL) -> list[ConvergenceRow]:
    """f_L against the exact infinite-chain f(x) for each requested length."""
    Ls = list(Ls)
    if not Ls:
        return []
    f_exact = _exact_fidelity(ModelPoint.from_x(x)).f
    rows = []
    for L in Ls:
        f_L = bipartite_fidelity_finite(L, x, pinning)
        rows.append(ConvergenceRow(L=L, f_finite=f_L, abs_error=abs(f_L - f_exact)))
    return rows
