"""Continuous and exact discrete Gaussian sampling.

The weight function is rho_r(x) = exp(-pi ||x||^2 / r^2); D_r is the
continuous distribution with density proportional to rho_r (so the width-1
Gaussian D_1 has variance 1/(2 pi) per coordinate), and D_{L+c,r} is the
discrete distribution on a lattice coset with mass proportional to rho_r.

The one-dimensional sampler on Z+c is the rejection procedure with two atoms
(c and c-1) and two truncated-normal tail proposals; conditioned on
termination each iteration outputs exactly D_{Z+c,r}, and the termination
probability per iteration is at least 1/2.  The n-dimensional sampler runs
the nearest-plane recursion coordinate by coordinate and then applies a
rejection correction, giving exact coset samples whenever
r >= ||B~|| sqrt(ln(2n+4)/pi).

Precision: the continuous proposals and all acceptance probabilities are
computed in ~106-bit double-double arithmetic and the final continuous values
are discretized to F fractional bits, so "exact" means exact up to a
quantified discretization of at most 2^-(F+1) per output coordinate plus a
2^-90-level bias in the rejection probabilities (the n-dimensional recursion
carries its centers in float64, adding a ~1e-16-level perturbation of the
coset representatives).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .backend import core, dd_from_fraction
from .errors import IterationCapError, NotPsdError, ParameterError

THETA_BITS_MAX = 96
DEFAULT_REJECTION_CAP = 10_000


@dataclass(frozen=True)
class GaussParam:
    """Gaussian width r > 0 for rho_r(x) = exp(-pi ||x||^2 / r^2)."""

    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ParameterError("Gaussian width must be positive")


def _as_width(r) -> float:
    if isinstance(r, GaussParam):
        return r.r
    r = float(r)
    if not r > 0:
        raise ParameterError("Gaussian width must be positive")
    return r


def rho(x, r) -> float:
    """exp(-pi ||x||^2 / r^2) for a scalar or vector x."""
    w = _as_width(r)
    sq = float(np.dot(x, x)) if np.ndim(x) else float(x) ** 2
    return math.exp(-math.pi * sq / (w * w))


def _coset_dd(c) -> tuple[float, float]:
    """c reduced mod 1 as a dd pair in [0, 1)."""
    if isinstance(c, Fraction):
        c = c - math.floor(c)
        return dd_from_fraction(c.numerator, c.denominator)
    cf = float(c)
    cf -= math.floor(cf)
    if cf >= 1.0:
        cf = 0.0
    return (cf, 0.0)


def theta_coset(c, r, bits: int = 64) -> float:
    """rho_r(Z + c) to within 2^-bits relative error.

    Direct summation below r = 1; Poisson summation (r * sum over the dual)
    at and above.  bits must lie in [1, 96]: the working precision is
    ~106-bit double-double.
    """
    if not 1 <= bits <= THETA_BITS_MAX:
        raise ParameterError(f"bits must be in [1, {THETA_BITS_MAX}]")
    w = _as_width(r)
    ch, cl = _coset_dd(c)
    hi, lo = core.theta(ch, cl, w, 0.0, bits)
    return hi + lo


def theta_coset_branches(c, r, bits: int = 64) -> tuple[float, float]:
    """(direct, poisson) evaluations of rho_r(Z+c); they agree mathematically."""
    if not 1 <= bits <= THETA_BITS_MAX:
        raise ParameterError(f"bits must be in [1, {THETA_BITS_MAX}]")
    w = _as_width(r)
    ch, cl = _coset_dd(c)
    d = core.theta_direct(ch, cl, w, 0.0, bits)
    p = core.theta_poisson(ch, cl, w, 0.0, bits)
    return d[0] + d[1], p[0] + p[1]


# ---------------------------------------------------------------------------
# one-dimensional exact sampler
# ---------------------------------------------------------------------------

_table_cache: dict = {}
_TABLE_CACHE_MAX = 4096


def _dgs_table(ch: float, cl: float, w: float):
    key = (ch, cl, w)
    tab = _table_cache.get(key)
    if tab is None:
        tab = core.Dgs1dTable(ch, cl, w, 0.0)
        if not tab.usable():
            raise ParameterError(
                f"discrete Gaussian mass underflowed for c={ch + cl}, r={w}; "
                "width too small for this coset at double range"
            )
        if len(_table_cache) >= _TABLE_CACHE_MAX:
            _table_cache.clear()
        _table_cache[key] = tab
    return tab


def sample_dgauss_1d_offset(c, r, rng) -> tuple[int, int]:
    """One draw from D_{Z+c,r}: returns (j, iterations) with value y = c + j."""
    w = _as_width(r)
    ch, cl = _coset_dd(c)
    return _dgs_table(ch, cl, w).draw(rng)


def sample_dgauss_1d(c, r, rng) -> tuple[float, int]:
    """One draw y from D_{Z+c,r} as a float, plus the iteration count."""
    j, iters = sample_dgauss_1d_offset(c, r, rng)
    ch, cl = _coset_dd(c)
    return ch + cl + j, iters


def sample_dgauss_1d_batch(c, r, rng, n: int) -> tuple[np.ndarray, int]:
    """n draws from D_{Z+c,r} as integer offsets; returns (offsets, total iterations)."""
    w = _as_width(r)
    ch, cl = _coset_dd(c)
    tab = _dgs_table(ch, cl, w)
    out = np.empty(n, dtype=np.int64)
    total = tab.fill(rng, out, n)
    return out, total


def sample_grid_coset(q: int, t: Fraction, r, rng) -> tuple[int, int, int]:
    """Draw x from D_{(1/q)Z - t, r} for an exact rational torus point t.

    Returns (j, num, iters) where j is the integer offset of the scaled
    one-dimensional draw, and num = q*(t + x) mod q is the numerator of the
    resulting grid point t + x in T_q.  The exact value of the draw is
    x = (ceil(q t) + j)/q - t.
    """
    w = _as_width(r)
    qt = t * q
    ceil_qt = -((-qt.numerator) // qt.denominator)
    c = Fraction(ceil_qt) - qt   # (-q t) mod 1, in [0, 1)
    ch, cl = dd_from_fraction(c.numerator, c.denominator)
    j, iters = _dgs_table(ch, cl, w * q).draw(rng)
    num = (ceil_qt + j) % q
    return j, num, iters


# ---------------------------------------------------------------------------
# continuous Gaussians
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CovarianceFactor:
    """Matrix B such that the sampled law is D_B (the law of B x, x ~ D_1^k)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def spherical(cls, r, n: int) -> "CovarianceFactor":
        return cls(np.eye(n) * _as_width(r))


def gauss_d1_dd(rng) -> tuple[float, float]:
    """One D_1 sample (density prop. to exp(-pi x^2)) as a dd pair."""
    return core.gauss_d1(rng)


def sample_cont_gauss(B: CovarianceFactor, rng) -> np.ndarray:
    """A sample of D_B: B x with x drawn from D_1 per coordinate."""
    k = B.matrix.shape[1]
    x = np.empty(k)
    for i in range(k):
        h, lo = core.gauss_d1(rng)
        x[i] = h + lo
    return B.matrix @ x


def sample_cont_gauss_batch(B: CovarianceFactor, rng, n: int) -> np.ndarray:
    k = B.matrix.shape[1]
    hi = np.empty(n * k)
    lo = np.empty(n * k)
    core.gauss_d1_fill(rng, hi, lo, n * k)
    x = (hi + lo).reshape(n, k)
    return x @ B.matrix.T


def psd_sqrt(M) -> CovarianceFactor:
    """Factor B with B B^T = M for symmetric positive semidefinite M.

    Eigenvalues in [-1e-9 ||M||, 0) are clamped to zero; anything more
    negative raises NotPsdError.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ParameterError("M must be square")
    if not np.allclose(M, M.T, rtol=1e-10, atol=1e-12):
        raise ParameterError("M must be symmetric")
    scale = np.linalg.norm(M, 2) if M.size else 0.0
    vals, vecs = np.linalg.eigh(M)
    if scale and vals.min() < -1e-9 * scale:
        raise NotPsdError(f"eigenvalue {vals.min():.3e} below -1e-9 * ||M||")
    vals = np.clip(vals, 0.0, None)
    B = vecs * np.sqrt(vals)
    err = np.linalg.norm(B @ B.T - M, 2)
    if scale and err > 1e-8 * scale:
        raise NotPsdError("factorization residual exceeded 1e-8 * ||M||")
    return CovarianceFactor(B)


# ---------------------------------------------------------------------------
# lattice sampler
# ---------------------------------------------------------------------------

class GramSchmidtData:
    """Basis columns b_i with their Gram-Schmidt data, computed once.

    Attributes: basis (n x n, columns are basis vectors), gso (columns are
    the orthogonalized b~_i), norms (||b~_i||), unit (columns b~_i/||b~_i||).
    """

    def __init__(self, basis):
        B = np.asarray(basis, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ParameterError("basis must be a square matrix of column vectors")
        n = B.shape[0]
        gso = B.copy()
        for i in range(n):
            for _ in range(2):  # twice-run modified GS for orthogonality
                for j in range(i):
                    gso[:, i] -= (gso[:, j] @ gso[:, i]) / (gso[:, j] @ gso[:, j]) * gso[:, j]
        norms = np.linalg.norm(gso, axis=0)
        if norms.min() <= 0:
            raise ParameterError("basis is singular")
        self.basis = B
        self.gso = gso
        self.norms = norms
        self.unit = gso / norms
        self.max_gs_norm = float(norms.max())
        self._theta_denom: dict = {}

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def _theta_denominators(self, r: float, bits: int) -> np.ndarray:
        key = (r, bits)
        out = self._theta_denom.get(key)
        if out is None:
            out = np.array([
                core.theta(0.0, 0.0, r / s, 0.0, bits)[0] for s in self.norms
            ])
            self._theta_denom[key] = out
        return out


def smoothing_bound(gs: GramSchmidtData, eps: float) -> float:
    """||B~|| sqrt(ln(2n(1+1/eps))/pi): a sufficient smoothing value."""
    if not 0 < eps < 1:
        raise ParameterError("eps must lie in (0,1)")
    n = gs.dim
    return gs.max_gs_norm * math.sqrt(math.log(2 * n * (1 + 1 / eps)) / math.pi)


@dataclass(frozen=True)
class LatticePoint:
    """Result of the lattice sampler: v = basis @ coords + c."""

    vector: np.ndarray
    coords: np.ndarray
    accepted_after: int
    iterations_1d: int


def _sampled_required_width(gs: GramSchmidtData) -> float:
    n = gs.dim
    return gs.max_gs_norm * math.sqrt(math.log(2 * n + 4) / math.pi)


def sample_dgauss_lattice(gs: GramSchmidtData, c, r, rng,
                          cap: int = DEFAULT_REJECTION_CAP) -> LatticePoint:
    """Exact sample from D_{L+c,r} by nearest-plane recursion plus rejection.

    Requires r >= ||B~|| sqrt(ln(2n+4)/pi) (the exactness hypothesis); each
    rejection round accepts with probability in ((1 - 2/(n+2))^n, 1], which
    is contained in (e^-2, 1].
    """
    w = _as_width(r)
    need = _sampled_required_width(gs)
    if w < need * (1 - 1e-12):
        raise ParameterError(f"width {w} below the exactness bound {need:.6g}")
    n = gs.dim
    c = np.asarray(c, dtype=float)
    if c.shape != (n,):
        raise ParameterError("center has wrong dimension")
    denom = gs._theta_denominators(w, 80)

    total_1d = 0
    for attempt in range(1, cap + 1):
        ci = c.copy()
        v = np.zeros(n)
        ratio_h, ratio_l = 1.0, 0.0
        for i in range(n - 1, -1, -1):
            s = gs.norms[i]
            center = float(gs.unit[:, i] @ ci)
            c1 = (center / s) % 1.0
            if c1 >= 1.0:
                c1 = 0.0
            tab = _dgs_table(c1, 0.0, w / s)
            j, iters = tab.draw(rng)
            total_1d += iters
            vi = s * (c1 + j)
            zi = vi - center   # element of s Z
            ci = ci + (zi / s) * gs.basis[:, i] - vi * gs.unit[:, i]
            v = v + vi * gs.unit[:, i]
            # accumulate rho_r(s Z + center)/rho_r(s Z) for the correction
            num = core.theta(c1, 0.0, w / s, 0.0, 80)
            ratio_h, ratio_l = core.mul_dd(ratio_h, ratio_l, num[0], num[1])
            ratio_h, ratio_l = core.div_dd(ratio_h, ratio_l, denom[i], 0.0)
        u = core.uniform_dd(rng)
        if u[0] + u[1] < ratio_h + ratio_l:
            coords = np.linalg.solve(gs.basis, v - c)
            z = np.rint(coords)
            if np.max(np.abs(coords - z)) > 1e-6:
                raise ArithmeticError("sampled point failed the coset membership check")
            return LatticePoint(v, z.astype(np.int64), attempt, total_1d)
    raise IterationCapError(f"lattice sampler rejected {cap} consecutive proposals")
