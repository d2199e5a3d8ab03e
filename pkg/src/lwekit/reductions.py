"""Sample-transforming reductions between the LWE variants.

Each transformation maps input batches (or challenges) to output batches the
way the corresponding hardness step does, with exact integer/rational
arithmetic on every T_q component.  Probabilistic aborts (gcd failures) are
legitimate outcomes: the functions return None and the caller counts them;
retrying would change the advantage accounting.

Continuous values never contaminate the exact parts: the extended-LWE hint,
for instance, is computed as <z, g> - <U[:,0], z> b_1 + <z, K> where g is
the grid point selected by the discrete re-randomization and K the mod-1
wrap of U b + f, so the continuous Gaussian f cancels algebraically and the
hint is delivered as the exact element of (1/q)Z it really is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .backend import core
from .errors import HintSetError, ParameterError
from .gaussian import (
    GramSchmidtData,
    psd_sqrt,
    sample_cont_gauss,
    sample_dgauss_1d_offset,
    sample_dgauss_lattice,
    sample_grid_coset,
)
from .intmat import IntMatrix, hermite_normal_form, invert_mod_q, unimodular_completion
from .lwedist import (
    ExtLweChallenge,
    LweParams,
    NoiseSpec,
    SampleBatch,
    Secret,
    SecretSpec,
    TransparentData,
    check_hint_vector,
    gen_extlwe_challenge,
    grid_fp,
)
from .rng import SeedStream
from .torus import DEFAULT_F, extended_gcd, fp_from_dd, fp_round


def prime_factors(q: int) -> list[int]:
    out = []
    d = 2
    while d * d <= q:
        if q % d == 0:
            out.append(d)
            while q % d == 0:
                q //= d
        d += 1
    if q > 1:
        out.append(q)
    return out


def ln_ln_budget(n: int, q: int, t1: int, t2: int) -> int:
    """ceil(t1 n + t2 ln ln q), with ln ln q floored at 0 for q < e^e."""
    lnln = math.log(math.log(q)) if q > 15 else 0.0
    return math.ceil(t1 * n + t2 * max(lnln, 0.0))


@dataclass
class ReductionReport:
    """Per-step advantage accounting: guaranteed adv_in >= (adv_out - additive)/mult."""

    stage: str
    in_desc: str
    out_desc: str
    additive_loss: float
    mult_factor: float
    noise_out: str
    notes: str = ""

    def budget_line(self) -> str:
        return (f"{self.stage}: adv_in >= (adv_out - {self.additive_loss:.6g})"
                f" / {self.mult_factor:.6g}; output noise {self.noise_out}")


# ---------------------------------------------------------------------------
# invertible subsequences and the normal form
# ---------------------------------------------------------------------------

def find_invertible_subsequence(vectors: list[list[int]], q: int,
                                t1: int = 16, t2: int = 4):
    """Greedy gcd-maintained search for n vectors invertible mod q.

    Scans at most ceil(t1 n + t2 ln ln q) of the given vectors keeping a
    unimodular U (mod q) that triangularizes the chosen columns; a vector is
    taken when the gcd of the last n-k entries of U a is coprime with q.
    Returns (indices, A0, A0inv) or None on the probabilistic abort, whose
    chance is at most e^{-t1 n/16} + e^{-t2/4}.
    """
    if not vectors:
        raise ParameterError("no vectors")
    n = len(vectors[0])
    budget = ln_ln_budget(n, q, t1, t2)
    if len(vectors) < budget:
        raise ParameterError(f"need {budget} vectors, got {len(vectors)}")
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    k = 0
    chosen: list[int] = []
    for idx in range(budget):
        a = vectors[idx]
        ua = [sum(u[i][j] * a[j] for j in range(n)) % q for i in range(n)]
        tail = ua[k:]
        g = 0
        for x in tail:
            g = math.gcd(g, x)
        if math.gcd(g, q) != 1:
            continue
        # unimodular V acting on coordinates k..n-1: drive tail to (g', 0, ..., 0)
        for j in range(k + 1, n):
            if ua[j] == 0:
                continue
            p, x, y = extended_gcd(ua[k], ua[j])
            ai, aj = ua[k] // p, ua[j] // p
            rk, rj = u[k], u[j]
            for col in range(n):
                rk[col], rj[col] = (x * rk[col] + y * rj[col]) % q, (-aj * rk[col] + ai * rj[col]) % q
            ua[k], ua[j] = p, 0
        chosen.append(idx)
        k += 1
        if k == n:
            a0 = IntMatrix([[vectors[i][row] for i in chosen] for row in range(n)])
            inv = invert_mod_q(a0, q)
            if inv is None:
                raise ArithmeticError("triangularized subsequence not invertible")
            return chosen, a0, inv
    return None


def normal_form_reduce(batch: SampleBatch, s_param: float, eps: float,
                       stream: SeedStream, transparent: bool = True):
    """Rerandomize the secret into (scaled) noise form.

    Consumes 16n + 4 ln ln q samples to build an invertible A0 and the
    smoothed vector b0' on the (1/q)-grid, then maps each remaining sample
    (a, b) to (A0^-1 a, b - <A0^-1 q a, b0'>).  Uniform in, uniform out; LWE
    in, LWE out with secret -q e0 ~ (near) the scaled noise law.  Returns
    None on abort.
    """
    p = batch.params
    n, q = p.n, p.q
    if q < 25:
        raise ParameterError("normal form needs q >= 25")
    smin = math.sqrt(math.log(2 * n * (1 + 1 / eps)) / math.pi) / q
    if s_param < smin * (1 - 1e-12):
        raise ParameterError(f"s_param {s_param} below the smoothing bound {smin:.6g}")
    budget = ln_ln_budget(n, q, 16, 4)
    if p.m <= budget:
        raise ParameterError(f"batch too small: need more than {budget} samples")
    found = find_invertible_subsequence(batch.a_num[:budget], q)
    if found is None:
        return None
    idxs, a0, a0inv = found
    rng = stream.child("smooth").rng()
    b0p_num: list[int] = []   # numerators of b0' = b0 + x on the (1/q)-grid
    for i in idxs:
        # x ~ D_{(1/q)Z - b0}: then b0' = b0 + x lies on the grid, numerator num
        _, num, _ = sample_grid_coset(q, batch.b_fraction(i), s_param, rng)
        b0p_num.append(num)

    m_out = p.m - budget
    a_num, b_fp, b_grid = [], [], []
    for i in range(budget, p.m):
        a = batch.a_num[i]
        # a' = A0^-1 a; the same residues serve as A0^-1 (q a) in the b update
        ap = [sum(a0inv.data[r][c] * a[c] for c in range(n)) % q for r in range(n)]
        dot = sum(ap[r] * b0p_num[r] for r in range(n)) % q
        bprime = (batch.b_fraction(i) - Fraction(dot, q)) % 1
        a_num.append(ap)
        if bprime.denominator <= q and q % bprime.denominator == 0:
            g = bprime.numerator * (q // bprime.denominator)
            b_grid.append(g)
            b_fp.append(grid_fp(g, q, p.F))
        else:
            b_grid.append(None)
            b_fp.append(fp_round(bprime.numerator, bprime.denominator, p.F))

    out_params = LweParams(n, m_out, q, p.noise, p.F)
    tr = None
    if transparent and batch.transparent is not None and batch.transparent.secret is not None:
        s = batch.transparent.secret.s
        a0t_s = [sum(a0.data[r][c] * s[r] for r in range(n)) % q for c in range(n)]
        e0_num = [(b0p_num[c] - a0t_s[c]) % q for c in range(n)]
        s_out = tuple(-(x if x <= q // 2 else x - q) for x in e0_num)  # -q e0, centered
        noise_fp = batch.transparent.noise_fp[budget:] if batch.transparent.noise_fp else None
        tr = TransparentData(secret=Secret(s_out, SecretSpec("discrete_gaussian",
                                                             q * math.hypot(_alpha_of(p.noise), s_param))),
                             noise_fp=list(noise_fp) if noise_fp else None,
                             realized_alpha=batch.transparent.realized_alpha)
    out = SampleBatch(out_params, a_num, b_fp, b_grid, provenance="normal-form", transparent=tr)
    report = ReductionReport(
        stage="normal-form",
        in_desc=f"LWE(n={n}, m={p.m}, q={q}, {p.noise.describe()})",
        out_desc=f"LWE(n={n}, m={m_out}, q={q}, secret~D(Z^n, {q}*hypot(alpha,{s_param:.4g}))",
        additive_loss=8 * eps,
        mult_factor=4.0,
        noise_out=p.noise.describe(),
        notes="consumes 16n + 4 ln ln q samples; abort is a counted outcome",
    )
    return out, report


def _alpha_of(noise: NoiseSpec) -> float:
    return noise.alpha if noise.alpha is not None else 0.0


# ---------------------------------------------------------------------------
# first-is-errorless
# ---------------------------------------------------------------------------

def first_errorless_reduce(batch: SampleBatch, stream: SeedStream,
                           m_out: Optional[int] = None, transparent: bool = True):
    """Lift dimension n-1 -> n making the first output sample errorless.

    Draws a' uniform, aborts when gcd(a') shares a factor with q (probability
    at most sum over primes p | q of p^-n), completes a' to U invertible mod
    q, emits (a'/q, s0/q) and maps each input (a, b) to (U(d|a), b + s0 d).
    Returns None on abort.
    """
    p = batch.params
    n = p.n + 1
    q = p.q
    if m_out is None:
        m_out = p.m + 1
    if m_out - 1 > p.m:
        raise ParameterError("not enough input samples")
    rng = stream.child("lift").rng()
    aprime = [core.uniform_below(rng, q) for _ in range(n)]
    g = 0
    for x in aprime:
        g = math.gcd(g, x)
    if math.gcd(g, q) != 1:
        return None
    u = unimodular_completion(aprime, q)
    uq = u.mod(q)
    s0 = core.uniform_below(rng, q)

    a_num = [aprime]
    b_fp = [grid_fp(s0, q, p.F)]
    b_grid: list[Optional[int]] = [s0]
    for i in range(m_out - 1):
        d = core.uniform_below(rng, q)
        da = [d] + batch.a_num[i]
        out_a = [sum(uq.data[r][c] * da[c] for c in range(n)) % q for r in range(n)]
        a_num.append(out_a)
        bb = (batch.b_fraction(i) + Fraction(s0 * d, q)) % 1
        if bb.denominator <= q and q % bb.denominator == 0:
            gnum = bb.numerator * (q // bb.denominator)
            b_grid.append(gnum)
            b_fp.append(grid_fp(gnum, q, p.F))
        else:
            b_grid.append(None)
            b_fp.append(fp_round(bb.numerator, bb.denominator, p.F))

    out_params = LweParams(n, m_out, q, p.noise, p.F)
    tr = None
    if transparent and batch.transparent is not None and batch.transparent.secret is not None:
        uinv = invert_mod_q(uq, q)
        s0s = (s0,) + tuple(x % q for x in batch.transparent.secret.s)
        sp = tuple(sum(uinv.data[r][c] * s0s[r] for r in range(n)) % q for c in range(n))
        noise_fp = None
        if batch.transparent.noise_fp is not None:
            noise_fp = [0] + list(batch.transparent.noise_fp[:m_out - 1])
        tr = TransparentData(secret=Secret(sp, SecretSpec("uniform_mod_q")), noise_fp=noise_fp,
                             realized_alpha=batch.transparent.realized_alpha)
    out = SampleBatch(out_params, a_num, b_fp, b_grid,
                      provenance="first-errorless", transparent=tr)
    loss = sum(pf ** (-n) for pf in prime_factors(q))
    report = ReductionReport(
        stage="first-errorless",
        in_desc=f"LWE(n={p.n}, m={p.m}, q={q}, {p.noise.describe()})",
        out_desc=f"first-errorless LWE(n={n}, m={m_out}, q={q}, {p.noise.describe()})",
        additive_loss=loss,
        mult_factor=1.0,
        noise_out=p.noise.describe(),
        notes="abort probability <= sum_{p|q} p^-n, a counted outcome",
    )
    return out, report


# ---------------------------------------------------------------------------
# hint-set quality certificates
# ---------------------------------------------------------------------------

@dataclass
class QualityCert:
    """Unimodular witness that the hint set has quality xi.

    U is m x m with |det| = 1; Uprime is U without its leftmost column; every
    column of Uprime is exactly orthogonal to z and sigma_max(Uprime) <= xi.
    """

    z: tuple[int, ...]
    U: IntMatrix
    Uprime: IntMatrix
    xi: float

    def verify(self) -> dict:
        det = self.U.det()
        orth = all(
            sum(self.Uprime.data[i][j] * self.z[i] for i in range(len(self.z))) == 0
            for j in range(self.Uprime.cols)
        )
        smax = float(np.linalg.svd(np.array(self.Uprime.data, dtype=float), compute_uv=False)[0])
        return {"det": det, "orthogonal": orth, "sigma_max": smax}


def build_quality_U(z) -> QualityCert:
    """Quality-2 certificate for a binary hint vector.

    The sorted-ones construction is the upper bidiagonal matrix with unit
    diagonal and -1 superdiagonal over the ones block; arbitrary z is handled
    by conjugating with the sorting permutation, which leaves singular values
    unchanged.
    """
    z = tuple(int(x) for x in z)
    if any(x not in (0, 1) for x in z):
        raise HintSetError("quality construction requires a binary vector")
    m = len(z)
    order = sorted(range(m), key=lambda i: -z[i])   # ones first, stable
    k = sum(z)
    # U0 for the sorted vector: diag 1, superdiagonal -1 on the ones block
    u0 = [[0] * m for _ in range(m)]
    for i in range(m):
        u0[i][i] = 1
        if i + 1 < k:
            u0[i][i + 1] = -1
    # row-permute back: row order[i] of U takes row i of U0
    u = [[0] * m for _ in range(m)]
    for i in range(m):
        u[order[i]] = u0[i]
    U = IntMatrix(u)
    Uprime = IntMatrix([[U.data[i][j] for j in range(1, m)] for i in range(m)]) if m > 1 else None
    if m == 1:
        Uprime = IntMatrix([[0]])
    cert = QualityCert(z, U, Uprime, 2.0)
    return cert


# ---------------------------------------------------------------------------
# extended LWE
# ---------------------------------------------------------------------------

@dataclass
class ExtLweReduction:
    """extlwe_reduce output plus the transparent intermediates."""

    challenge: ExtLweChallenge
    cert: "QualityCert"
    f: np.ndarray                 # the skewed continuous Gaussian draw
    g_unred: list[Fraction]       # unreduced grid points b' + c


def extlwe_reduce(fe_batch: SampleBatch, z, r_param: float, eps: float,
                  stream: SeedStream, transparent: bool = True):
    """first-is-errorless LWE -> extended LWE with one hint (t = 1).

    Output tuple (A U^T, b' + c, <z, f + c>) where b' = U b + f with f a
    skewed continuous Gaussian, and c re-randomizes onto the (1/q)-grid.
    The hint is exact over Q: columns 2..m of U are orthogonal to z and the
    first input sample is errorless, so <z, f + c> = <z, g> - <U[:,0], z> b_1
    with g = b' + c on the grid and b_1 on the grid.
    """
    p = fe_batch.params
    n, m, q = p.n, p.m, p.q
    if fe_batch.b_grid[0] is None:
        raise ParameterError("input is not a first-is-errorless batch")
    alpha = _alpha_of(p.noise)
    bound = math.sqrt(math.log(2 * m * (1 + 1 / eps)) / math.pi) / q
    if alpha < bound * (1 - 1e-12) or r_param < bound * (1 - 1e-12):
        raise ParameterError(f"alpha and r must be at least {bound:.6g}")
    z = check_hint_vector(z, m, "binary")
    cert = build_quality_U(z)
    xi = cert.xi

    # f ~ D_{alpha (xi^2 I - U' U'^T)^{1/2}}
    up = np.array(cert.Uprime.data, dtype=float)
    cov = alpha * alpha * (xi * xi * np.eye(m) - up @ up.T)
    factor = psd_sqrt(cov)
    f = sample_cont_gauss(factor, stream.child("skew").rng())

    u = cert.U
    b = [fe_batch.b_fraction(i) for i in range(m)]
    # raw = U b + f over Q with the [0,1) lifts of b; the wrap K = floor(raw)
    # must be tracked so the delivered hint is the true real <z, f + c>
    raw = [sum(Fraction(u.data[i][j]) * b[j] for j in range(m)) + Fraction(float(f[i]))
           for i in range(m)]
    wraps = [r.__floor__() for r in raw]
    bprime = [r - k for r, k in zip(raw, wraps)]
    rng = stream.child("grid").rng()
    resp_num: list[int] = []
    g_unred: list[Fraction] = []
    for j in range(m):
        # c_j ~ D_{(1/q)Z - b'_j}: the grid point g_j = b'_j + c_j
        qt = bprime[j] * q
        ceil_qt = -((-qt.numerator) // qt.denominator)
        off, num, _ = sample_grid_coset(q, bprime[j], r_param, rng)
        resp_num.append(num)
        g_unred.append(Fraction(ceil_qt + off, q))

    # <z, f + c> = <z, g> - <z, U b> + <z, K> with <z, U b> = <U[:,0], z> b_1
    # (columns 2..m of U are orthogonal to z and the first sample is errorless)
    uz = sum(u.data[i][0] * z[i] for i in range(m))
    hint = (sum(zz * g for zz, g in zip(z, g_unred)) - uz * b[0]
            + sum(zz * k for zz, k in zip(z, wraps)))
    if q % hint.denominator != 0:
        raise ArithmeticError("hint left the (1/q)Z grid; algebra violated")
    hint_num = hint.numerator * (q // hint.denominator)

    # A' = A U^T over T_q: aprime[row][col] = sum_j A[row][j] U[col][j]
    A = fe_batch.a_num  # row i = sample i's vector; challenge A has columns = samples
    aprime = [[sum(A[jj][row] * u.data[col][jj] for jj in range(m)) % q
               for col in range(m)] for row in range(n)]

    out = ExtLweChallenge(
        n=n, m=m, q=q, alpha=math.sqrt(alpha * alpha * xi * xi + r_param * r_param),
        t=1, z=z, A_num=aprime, responses_num=[resp_num], hints_num=[hint_num],
        real_case=True,
        secrets=[tuple(fe_batch.transparent.secret.s)] if transparent and fe_batch.transparent
                and fe_batch.transparent.secret else None,
        noise_num=None,
    )
    report = ReductionReport(
        stage="extlwe",
        in_desc=f"first-errorless LWE(n={n}, m={m}, q={q}, alpha={alpha!r})",
        out_desc=f"extLWE(n={n}, m={m}, q={q}, noise={out.alpha!r}, hint set {{0,1}}^m)",
        additive_loss=33 * eps / 2,
        mult_factor=1.0,
        noise_out=f"D(q^-1 Z^m, {out.alpha!r})",
        notes=f"quality xi = {xi}",
    )
    return ExtLweReduction(out, cert, f, g_unred), report


def gen_hybrid_extlwe(i_star: int, n: int, m: int, q: int, chi: NoiseSpec, z,
                      t: int, stream: SeedStream,
                      transparent: bool = True) -> ExtLweChallenge:
    """The multi-secret hybrid law: responses 1..i_star real, the rest
    uniform, hints always real.  i_star = t is the real challenge, i_star =
    0 the decoy; adjacent hybrids share a seed-wise identical view of every
    field except response i_star + 1."""
    if not 0 <= i_star <= t:
        raise ParameterError("need 0 <= i_star <= t")
    return gen_extlwe_challenge(n, m, q, chi, z, t, real_case=i_star == t,
                                stream=stream, transparent=transparent,
                                real_upto=i_star)


def multi_secret_extend(ch: ExtLweChallenge, t: int, i_star: int,
                        stream: SeedStream):
    """Embed a t=1 challenge at index i_star of a t-secret challenge.

    Indices below i_star are honestly generated real responses (fresh
    secrets, same A); indices above are uniform; hints are always real.
    This realizes the hybrid pair: a real input lands at H_{i_star}, a decoy
    input at H_{i_star - 1}.
    """
    if ch.t != 1:
        raise ParameterError("input challenge must have t = 1")
    if not 1 <= i_star <= t:
        raise ParameterError("need 1 <= i_star <= t")
    n, m, q = ch.n, ch.m, ch.q
    responses: list[list[int]] = []
    hints: list[int] = []
    for i in range(1, t + 1):
        irng = stream.child("ms", i).rng()
        if i == i_star:
            responses.append(list(ch.responses_num[0]))
            hints.append(ch.hints_num[0])
            continue
        e = [sample_dgauss_1d_offset(0.0, ch.alpha * q, irng)[0] for _ in range(m)]
        s_i = [core.uniform_below(irng, q) for _ in range(n)]
        if i < i_star:
            resp = [(sum(ch.A_num[k][j] * s_i[k] for k in range(n)) + e[j]) % q for j in range(m)]
        else:
            resp = [core.uniform_below(irng, q) for _ in range(m)]
        responses.append(resp)
        hints.append(sum(zz * ee for zz, ee in zip(ch.z, e)))
    out = ExtLweChallenge(n=n, m=m, q=q, alpha=ch.alpha, t=t, z=ch.z,
                          A_num=ch.A_num, responses_num=responses,
                          hints_num=hints, real_case=ch.real_case)
    report = ReductionReport(
        stage="multi-secret",
        in_desc=f"extLWE(n={n}, m={m}, q={q})",
        out_desc=f"extLWE^{t}(n={n}, m={m}, q={q})",
        additive_loss=0.0,
        mult_factor=float(t),
        noise_out=f"D(q^-1 Z^m, {ch.alpha!r})",
        notes=f"hybrid embedding at index {i_star}",
    )
    return out, report


# ---------------------------------------------------------------------------
# gadget lattices and modulus-dimension switching
# ---------------------------------------------------------------------------

@dataclass
class GadgetPair:
    """Gadget matrix G (n' x n) and a basis of L = (1/q') G^T Z^{n'} + Z^n.

    basis_num / q_prime is the rational basis matrix (columns are basis
    vectors); gs_norm is ||B~|| of that basis, exact by construction.
    """

    G: IntMatrix
    basis_num: IntMatrix
    q_prime: int
    gs_norm: Fraction
    kind: str = "general"

    @property
    def n(self) -> int:
        return self.G.cols

    @property
    def n_prime(self) -> int:
        return self.G.rows

    def basis_float(self) -> np.ndarray:
        return np.array(self.basis_num.data, dtype=float) / self.q_prime


def identity_gadget(n: int, q_prime: int) -> GadgetPair:
    """Pure modulus switching: G = I, L = (1/q') Z^n, B = I/q'."""
    return GadgetPair(IntMatrix.identity(n), IntMatrix.identity(n), q_prime,
                      Fraction(1, q_prime), kind="identity")


def gadget_basis(n: int, k: int, q: int) -> GadgetPair:
    """Dimension-modulus tradeoff gadget: G = I_{n/k} (x) (1, q, ..., q^{k-1}).

    q' = q^k; the lattice basis is block upper-bidiagonal with ||B~|| = 1/q
    exactly (orthogonalizing left to right leaves q^{-1} I).
    """
    if k < 1 or n % k != 0:
        raise ParameterError("k must be a positive divisor of n")
    np_ = n // k
    qp = q ** k
    g = [[0] * n for _ in range(np_)]
    for blk in range(np_):
        for i in range(k):
            g[blk][blk * k + i] = q ** i
    # block T with T[i][j] = q^{k+i-j-1} for j >= i: basis = (I (x) T)/q^k
    basis = [[0] * n for _ in range(n)]
    for blk in range(np_):
        for i in range(k):
            for j in range(i, k):
                basis[blk * k + i][blk * k + j] = q ** (k + i - j - 1)
    return GadgetPair(IntMatrix(g), IntMatrix(basis), qp, Fraction(1, q), kind="tradeoff")


def _solve_mod(M: IntMatrix, w: list[int], mod: int):
    """All solutions of M x = w (mod mod): (particular x0, hnf rows of the
    solution lattice including mod Z^cols) or None when inconsistent."""
    rows, cols = M.rows, M.cols
    # integer system [M | mod I] u = w
    ext = IntMatrix([[M.data[i][j] for j in range(cols)] +
                     [mod if i == jj else 0 for jj in range(rows)] for i in range(rows)])
    # column-style: row-HNF of ext^T gives H = U ext^T -> ext V = H^T with V = U^T
    h, u = hermite_normal_form(ext.transpose())
    ht = h.transpose()   # rows x (cols+rows), lower triangular by columns
    vt = u               # (cols+rows) x (cols+rows): ext @ u^T = ht
    # solve ht y = w by forward elimination over the pivot columns
    y = [0] * ht.cols
    resid = list(w)
    for col in range(ht.cols):
        piv_row = next((r for r in range(ht.rows) if ht.data[r][col] != 0), None)
        if piv_row is None:
            continue
        val = ht.data[piv_row][col]
        if resid[piv_row] % val != 0:
            continue
        cval = resid[piv_row] // val
        y[col] = cval
        for r in range(ht.rows):
            resid[r] -= cval * ht.data[r][col]
    if any(x != 0 for x in resid):
        return None
    # u0 = V y with V = vt^T: u0_j = sum_col vt[col][j] y[col]
    x0 = [sum(vt.data[col][j] * y[col] for col in range(ht.cols)) % mod for j in range(cols)]
    # kernel of ext: columns of V at zero columns of ht
    zero_cols = [c for c in range(ht.cols)
                 if all(ht.data[r][c] == 0 for r in range(ht.rows))]
    gens = [[vt.data[c][j] for j in range(cols)] for c in zero_cols]
    gens += [[mod if i == j else 0 for j in range(cols)] for i in range(cols)]
    hk, _ = hermite_normal_form(IntMatrix(gens))
    lattice_rows = [row for row in hk.data if any(x != 0 for x in row)]
    return x0, lattice_rows


def uniform_preimage(gp: GadgetPair, v_num: list[int], stream: SeedStream) -> list[int]:
    """Uniform solution a' in T_{q'}^{n'} of G^T a' = v mod Z^n.

    v is given by its numerators over q' (the coset lives in (1/q') Z^n).
    Closed-form for the identity and tradeoff gadgets; the general path
    solves the homogeneous system by HNF and adds a uniform element of the
    finite solution group to a particular solution.
    """
    qp = gp.q_prime
    n, np_ = gp.n, gp.n_prime
    if len(v_num) != n:
        raise ParameterError("coset vector has wrong dimension")
    v_num = [x % qp for x in v_num]
    if gp.kind == "identity":
        return list(v_num)
    if gp.kind == "tradeoff":
        k = n // np_
        q = gp.G.data[0][1] if k > 1 else qp   # the gadget's base
        out = []
        for blk in range(np_):
            x = v_num[blk * k]
            for i in range(1, k):
                if (x * q ** i - v_num[blk * k + i]) % qp != 0:
                    raise ParameterError("coset vector not in the gadget lattice")
            out.append(x)
        return out
    solved = _solve_mod(gp.G.transpose(), v_num, qp)
    if solved is None:
        raise ParameterError("no solution: coset vector not in the lattice")
    x0, latt = solved
    rng = stream.child("preimage").rng()
    x = list(x0)
    for row in latt:
        piv = next(j for j in range(len(row)) if row[j] != 0)
        step = row[piv]
        if qp % step != 0:
            raise ArithmeticError("solution lattice pivot does not divide q'")
        coeff = core.uniform_below(rng, qp // step)
        for j in range(np_):
            x[j] = (x[j] + coeff * row[j]) % qp
    return x


def mod_dim_switch(batch: SampleBatch, gp: GadgetPair, r_param: float,
                   b_bound: float, eps: float, stream: SeedStream,
                   delta: float = 0.0, transparent: bool = True):
    """Switch (n, q) samples to (n', q') through the gadget lattice.

    Per sample: f ~ D_{L-a,r} via the exact lattice sampler, v = a + f,
    a' a uniform preimage of v under G^T, b' = b + e' with e' ~ D_{r B}.
    Uniform in, (4 eps)-close-to-uniform out; LWE in, LWE out with secret
    G s and noise (alpha^2 + r^2 (||s||^2 + B^2))^{1/2}.
    """
    p = batch.params
    n, q = p.n, p.q
    if n != gp.n:
        raise ParameterError("gadget dimension disagrees with the batch")
    qp = gp.q_prime
    need = max(1.0 / q, float(gp.gs_norm)) * math.sqrt(2 * math.log(2 * n * (1 + 1 / eps)) / math.pi)
    if r_param < need * (1 - 1e-12):
        raise ParameterError(f"r must be at least {need:.6g}")
    alpha = _alpha_of(p.noise)
    gs = GramSchmidtData(gp.basis_float())
    rng_lat = stream.child("lattice").rng()
    rng_e = stream.child("extra-noise").rng()
    eprime_width = r_param * b_bound

    a_num, b_fp, b_grid = [], [], []
    for i in range(p.m):
        a_float = np.array([x / q for x in batch.a_num[i]])
        pt = sample_dgauss_lattice(gs, -a_float, r_param, rng_lat)
        # v = a + f = B z exactly: numerators over q' from the integer coords
        v_num = [sum(gp.basis_num.data[row][j] * int(pt.coords[j]) for j in range(n)) % qp
                 for row in range(n)]
        ap = uniform_preimage(gp, v_num, stream.child("pre", i))
        a_num.append(ap)
        if eprime_width > 0:
            xh, xl = core.gauss_d1(rng_e)
            eh, el = core.mul_dd(float(eprime_width), 0.0, xh, xl)
            e_fp = fp_from_dd(eh, el, p.F)
        else:
            e_fp = 0
        bb = (batch.b_fraction(i) + Fraction(e_fp, 1 << p.F)) % 1
        if e_fp == 0 and batch.b_grid[i] is not None and q == qp:
            b_grid.append(batch.b_grid[i])
            b_fp.append(batch.b_fp[i])
        else:
            b_grid.append(None)
            b_fp.append(fp_round(bb.numerator, bb.denominator, p.F))

    beta_bound = math.sqrt(alpha * alpha + 2 * (r_param * b_bound) ** 2)
    out_noise = NoiseSpec.unknown_bounded(beta_bound) if beta_bound > 0 else NoiseSpec.zero()
    out_params = LweParams(gp.n_prime, p.m, qp, out_noise, p.F)
    tr = None
    if transparent and batch.transparent is not None and batch.transparent.secret is not None:
        s = batch.transparent.secret.s
        gs_out = tuple(x % qp for x in gp.G.matvec(list(s)))
        norm_s = math.sqrt(sum(x * x for x in _centered(s, q)))
        realized = math.sqrt(alpha * alpha + r_param ** 2 * (norm_s ** 2 + b_bound ** 2))
        tr = TransparentData(secret=Secret(gs_out, SecretSpec("uniform_mod_q")),
                             realized_alpha=realized)
    out = SampleBatch(out_params, a_num, b_fp, b_grid, provenance="mod-dim-switch",
                      transparent=tr)
    report = ReductionReport(
        stage="mod-dim-switch",
        in_desc=f"LWE(n={n}, m={p.m}, q={q}, {p.noise.describe()})",
        out_desc=f"LWE(n={gp.n_prime}, m={p.m}, q={qp}, <= {beta_bound:.6g})",
        additive_loss=delta + 14 * eps * p.m,
        mult_factor=1.0,
        noise_out=f"<= sqrt(alpha^2 + 2 (r B)^2) = {beta_bound:.6g}",
        notes=f"uniform case within 4 eps of uniform; LWE case within 10 eps per sample",
    )
    return out, report


def _centered(s, q):
    return [x % q if x % q <= q // 2 else x % q - q for x in s]


# ---------------------------------------------------------------------------
# binary-secret hybrids
# ---------------------------------------------------------------------------

def binlwe_from_extlwe(ch: ExtLweChallenge, z, gamma: Optional[float],
                       stream: SeedStream, transparent: bool = True):
    """extLWE^t challenge -> binary-secret LWE-shaped batch.

    Emits samples (M_j, <M_j, z> - h_j + e^_j) where M_j is response j and
    e^ ~ D_gamma; on a decoy challenge this is the noisy binary-LWE hybrid,
    on a real challenge the structured counterpart (exact algebra either
    way).  The batch dimension is the challenge's sample count and the batch
    length its secret count.
    """
    n_dim, m_out, q = ch.m, ch.t, ch.q
    z = check_hint_vector(z, n_dim, "binary")
    if tuple(z) != tuple(ch.z):
        raise ParameterError("challenge was built for a different hint vector")
    if gamma is None:
        gamma = math.sqrt(n_dim) * ch.alpha
    rng = stream.child("ehat").rng()
    a_num, b_fp, b_grid = [], [], []
    F = DEFAULT_F
    for j in range(m_out):
        resp = ch.responses_num[j]
        a_num.append(list(resp))
        ipnum = sum(r * zz for r, zz in zip(resp, z)) % q
        val = (Fraction(ipnum, q) - Fraction(ch.hints_num[j], q)) % 1
        xh, xl = core.gauss_d1(rng)
        eh, el = core.mul_dd(float(gamma), 0.0, xh, xl)
        e_fp = fp_from_dd(eh, el, F)
        bb = (val + Fraction(e_fp, 1 << F)) % 1
        b_grid.append(None)
        b_fp.append(fp_round(bb.numerator, bb.denominator, F))
    alpha_bound = math.sqrt(2 * n_dim) * ch.alpha
    out_params = LweParams(n_dim, m_out, q, NoiseSpec.unknown_bounded(alpha_bound), F)
    tr = TransparentData(secret=Secret(tuple(z), SecretSpec("binary"))) if transparent else None
    out = SampleBatch(out_params, a_num, b_fp, b_grid, provenance="binlwe", transparent=tr)
    report = ReductionReport(
        stage="binary-secret",
        in_desc=f"extLWE^{ch.t}(n={ch.n}, m={ch.m}, q={q}, noise {ch.alpha!r})",
        out_desc=f"binLWE(n={n_dim}, m={m_out}, q={q}, <= {alpha_bound:.6g})",
        additive_loss=0.0,
        mult_factor=1.0,
        noise_out=f"<= sqrt(2 n) beta = {alpha_bound:.6g}",
        notes="hybrid-argument step; adjacency budgets 4 m eps and delta live in the harness",
    )
    return out, report
