"""Named hybrid distributions for the binary-secret argument.

Six batch-shaped laws interpolate between binary-secret LWE and uniform:

  H0 = (A, A^T z + e)            e ~ D_{alpha'} with alpha'^2 = beta^2 ||z||^2 + gamma^2
  H1 = (A, A^T z - N^T z + e^)   N ~ D_{q^-1 Z, beta} entrywise, e^ ~ D_gamma
  H2 = (A^, q B^T C z + e^)      A^ = q C^T B + N
  H3 = (A^, B^T s + e^)          s uniform in Z_q^k
  H4 = (A^, u)                   u uniform on T^m
  H5 = (A, u)

All six share their common components under one seed (the same z, C, B, N,
e^, u, A, s), so two adjacent hybrids differ only in the field the step
changes.  The steps H0-H1 (smoothing, budget 4 m eps) and H2-H3 (leftover
hash, budget delta) are statistical; the other three steps correspond to
oracle assumptions and are exercised by feeding honestly generated real or
decoy inputs through the actual transformation, which reproduces the
adjacent hybrid exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .backend import core
from .errors import ParameterError
from .gaussian import sample_dgauss_1d_offset
from .lwedist import LweParams, NoiseSpec, SampleBatch, Secret, SecretSpec, TransparentData, grid_fp
from .rng import SeedStream
from .torus import DEFAULT_F, fp_from_dd

HYBRID_NAMES = ("H0", "H1", "H2", "H3", "H4", "H5")


@dataclass(frozen=True)
class HybridParams:
    """k: hidden LWE dimension; n: binary-secret dimension; m: sample count."""

    k: int
    n: int
    m: int
    q: int
    beta: float
    gamma: float
    delta: float
    eps: float = 2.0**-20
    F: int = DEFAULT_F

    def __post_init__(self):
        if min(self.k, self.n, self.m, self.q) < 1:
            raise ParameterError("dimensions must be positive")
        if self.beta <= 0 or self.gamma <= 0:
            raise ParameterError("noise widths must be positive")
        if not 0 < self.delta < 1:
            raise ParameterError("delta must lie in (0,1)")

    def check_chain(self) -> None:
        """Dimension condition for the full chain's guarantee."""
        need = (self.k + 1) * math.log2(self.q) + 2 * math.log2(1 / self.delta)
        if self.n < need - 1e-9:
            raise ParameterError(f"n={self.n} below the chain requirement {need:.3g}")

    def beta_floor(self) -> float:
        return math.sqrt(2 * math.log(2 * self.n * (1 + 1 / self.eps)) / math.pi) / self.q

    def alpha_out(self) -> float:
        return math.sqrt(2 * self.n) * self.beta


@dataclass
class HybridComponents:
    z: list[int]
    A: list[list[int]]        # n x m numerators
    C: list[list[int]]        # k x n numerators
    B: list[list[int]]        # k x m numerators
    N: list[list[int]]        # n x m unreduced grid-noise numerators
    Ahat: list[list[int]]     # n x m numerators, q C^T B + N
    ehat_fp: list[int]        # m, F-bit
    e0_fp: list[int]          # m, F-bit, width alpha'
    u_fp: list[int]           # m, F-bit
    s: list[int]              # k


def draw_components(hp: HybridParams, stream: SeedStream) -> HybridComponents:
    q, F = hp.q, hp.F
    z = [core.uniform_below(stream.child("z").rng(), 2) for _ in range(hp.n)]
    rng = stream.child("A").rng()
    A = [[core.uniform_below(rng, q) for _ in range(hp.m)] for _ in range(hp.n)]
    rng = stream.child("C").rng()
    C = [[core.uniform_below(rng, q) for _ in range(hp.n)] for _ in range(hp.k)]
    rng = stream.child("B").rng()
    B = [[core.uniform_below(rng, q) for _ in range(hp.m)] for _ in range(hp.k)]
    rng = stream.child("N").rng()
    N = [[sample_dgauss_1d_offset(0.0, hp.beta * q, rng)[0] for _ in range(hp.m)]
         for _ in range(hp.n)]
    Ahat = [[(sum(C[kk][i] * B[kk][j] for kk in range(hp.k)) + N[i][j]) % q
             for j in range(hp.m)] for i in range(hp.n)]
    rng = stream.child("ehat").rng()
    ehat = [_noise_fp(hp.gamma, F, rng) for _ in range(hp.m)]
    alpha_prime = math.sqrt(hp.beta ** 2 * sum(z) + hp.gamma ** 2)
    rng = stream.child("e0").rng()
    e0 = [_noise_fp(alpha_prime, F, rng) for _ in range(hp.m)]
    rng = stream.child("u").rng()
    u = [core.uniform_below(rng, 1 << F) for _ in range(hp.m)]
    rng = stream.child("s").rng()
    s = [core.uniform_below(rng, q) for _ in range(hp.k)]
    return HybridComponents(z, A, C, B, N, Ahat, ehat, e0, u, s)


def _noise_fp(width: float, F: int, rng) -> int:
    xh, xl = core.gauss_d1(rng)
    eh, el = core.mul_dd(float(width), 0.0, xh, xl)
    return fp_from_dd(eh, el, F)


def _batch(hp: HybridParams, mat: list[list[int]], b_fp: list[int],
           b_grid: list, name: str, z=None) -> SampleBatch:
    params = LweParams(hp.n, hp.m, hp.q, NoiseSpec.unknown_bounded(hp.alpha_out()), hp.F)
    a_num = [[mat[i][j] for i in range(hp.n)] for j in range(hp.m)]
    tr = TransparentData(secret=Secret(tuple(z), SecretSpec("binary"))) if z is not None else None
    return SampleBatch(params, a_num, b_fp, b_grid, provenance=name, transparent=tr)


def gen_hybrid(hp: HybridParams, name: str, stream: SeedStream) -> SampleBatch:
    """One draw of the named hybrid; shared components come from the seed."""
    if name not in HYBRID_NAMES:
        raise ParameterError(f"unknown hybrid {name!r}")
    c = draw_components(hp, stream)
    q, F, m, n = hp.q, hp.F, hp.m, hp.n
    one = 1 << F

    def grid_plus_fp(num_mod_q: int, fp_val: int) -> int:
        return (grid_fp(num_mod_q, q, F) + fp_val) % one

    if name == "H0":
        b = [grid_plus_fp(sum(c.A[i][j] * c.z[i] for i in range(n)) % q, c.e0_fp[j])
             for j in range(m)]
        return _batch(hp, c.A, b, [None] * m, "H0", c.z)
    if name == "H1":
        b = []
        for j in range(m):
            az = sum(c.A[i][j] * c.z[i] for i in range(n))
            nz = sum(c.N[i][j] * c.z[i] for i in range(n))
            b.append(grid_plus_fp((az - nz) % q, c.ehat_fp[j]))
        return _batch(hp, c.A, b, [None] * m, "H1", c.z)
    if name == "H2":
        w = [sum(c.C[kk][i] * c.z[i] for i in range(n)) % q for kk in range(hp.k)]
        b = [grid_plus_fp(sum(c.B[kk][j] * w[kk] for kk in range(hp.k)) % q, c.ehat_fp[j])
             for j in range(m)]
        return _batch(hp, c.Ahat, b, [None] * m, "H2", c.z)
    if name == "H3":
        b = [grid_plus_fp(sum(c.B[kk][j] * c.s[kk] for kk in range(hp.k)) % q, c.ehat_fp[j])
             for j in range(m)]
        return _batch(hp, c.Ahat, b, [None] * m, "H3")
    if name == "H4":
        return _batch(hp, c.Ahat, list(c.u_fp), [None] * m, "H4")
    return _batch(hp, c.A, list(c.u_fp), [None] * m, "H5")


def generate_hybrids(hp: HybridParams, stream: SeedStream,
                     check_chain: bool = True) -> dict[str, SampleBatch]:
    """All six labeled hybrid batches from one shared-component draw."""
    if check_chain:
        hp.check_chain()
    return {name: gen_hybrid(hp, name, stream) for name in HYBRID_NAMES}


def hybrid_identity_check(hp: HybridParams, stream: SeedStream) -> bool:
    """Exact algebra: A^T z - N^T z == q B^T C z when A is replaced by A^."""
    c = draw_components(hp, stream)
    q = hp.q
    w = [sum(c.C[kk][i] * c.z[i] for i in range(hp.n)) % q for kk in range(hp.k)]
    for j in range(hp.m):
        lhs = (sum(c.Ahat[i][j] * c.z[i] for i in range(hp.n))
               - sum(c.N[i][j] * c.z[i] for i in range(hp.n))) % q
        rhs = sum(c.B[kk][j] * w[kk] for kk in range(hp.k)) % q
        if lhs != rhs:
            return False
    return True


def hybrid_cell(batch: SampleBatch, torus_bins: int = 4,
                a_entries: int = 2, b_entries: int = 2) -> int:
    """Deterministic low-dimensional cell for hybrid-batch TV estimates.

    Bins the first a_entries residues of sample 0 and the first b_entries
    b values (torus_bins cells each); claims are relative to this binning.
    """
    p = batch.params
    cell = 0
    for i in range(min(a_entries, p.n)):
        cell = cell * p.q + batch.a_num[0][i]
    for j in range(min(b_entries, p.m)):
        frac = batch.b_fraction(j)
        cell = cell * torus_bins + (frac.numerator * torus_bins) // frac.denominator
    return cell


def hybrid_cell_count(hp: HybridParams, torus_bins: int = 4,
                      a_entries: int = 2, b_entries: int = 2) -> int:
    return hp.q ** min(a_entries, hp.n) * torus_bins ** min(b_entries, hp.m)
