"""Statistical and exact oracles for verifying the transformations.

Total variation between sample sets is always *binned*: a BinningSpec maps
each sample to one of finitely many cells and the TV estimate is the plug-in
half-L1 distance between the two binned empirical laws.  The plug-in
estimator is positively biased (roughly sqrt(2B/(pi N)) under equality), so
claims are made by comparing against a permutation-calibrated null: the
acceptance checks use  tv_hat - null_mean <= budget + 3 * null_sd.

The exhaustive distinguisher realizes the abstract binary-output algorithm of
the advantage definition at tiny parameters: a likelihood-ratio test over the
whole secret space against the uniform model, with the b component
discretized to the T_q grid convolved with a 64-cell sub-binning (part of the
oracle's definition).  Advantage estimates carry two-sided Hoeffding
intervals at the configured confidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.stats import chi2 as _chi2_dist

from .errors import ParameterError, RefusalError
from .gaussian import rho, theta_coset
from .lwedist import LweParams, NoiseSpec, SampleBatch, gen_uniform_batch
from .rng import SeedStream

SUB_BINS = 64


# ---------------------------------------------------------------------------
# probability tables
# ---------------------------------------------------------------------------

@dataclass
class PmfTable:
    """Finite support with normalized masses and a recorded truncation bound."""

    support: list
    probs: np.ndarray
    truncation_mass_bound: float

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise ParameterError("pmf does not sum to 1")
        self.index = {key: i for i, key in enumerate(self.support)}

    def prob(self, key) -> float:
        i = self.index.get(key)
        return 0.0 if i is None else float(self.probs[i])


def dgs_pmf_1d(c, r, radius_mult: float = 12.0) -> PmfTable:
    """Theta-normalized pmf of D_{Z+c,r} on offsets j with |c+j| <= radius_mult*r."""
    z = theta_coset(c, r, 90)
    cf = float(c)
    radius = radius_mult * float(r)
    lo = math.floor(-cf - radius)
    hi = math.ceil(radius - cf)
    support = list(range(lo, hi + 1))
    masses = np.array([rho(cf + j, r) for j in support]) / z
    tail = max(0.0, 1.0 - masses.sum())
    return PmfTable(support, masses / masses.sum(), tail + 1e-15)


def brute_force_pmf(basis, c, r, radius_mult: float = 12.0) -> PmfTable:
    """Enumerated pmf of D_{L+c,r}, keyed by integer basis coordinates.

    Enumerates all points of L+c within radius_mult*r of the origin and
    normalizes their rho_r masses; refuses dimensions above 3.
    """
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    n = B.shape[0]
    if n > 3:
        raise RefusalError("brute-force enumeration is limited to dimension <= 3")
    c = np.asarray(c, dtype=float).reshape(n)
    radius = radius_mult * float(r)
    Binv = np.linalg.inv(B)
    center = -Binv @ c
    half = np.abs(Binv).sum(axis=1) * radius
    los = np.floor(center - half).astype(int)
    his = np.ceil(center + half).astype(int)
    support, masses = [], []
    for z in np.ndindex(*(his - los + 1)):
        zz = np.array(z) + los
        v = B @ zz + c
        if v @ v <= radius * radius:
            support.append(tuple(int(t) for t in zz))
            masses.append(rho(v, r))
    masses = np.array(masses)
    total = masses.sum()
    # Gaussian tail mass beyond the enumeration radius (Banaszczyk-style)
    kappa = radius_mult
    tail = (kappa * math.sqrt(2 * math.pi * math.e) * math.exp(-math.pi * kappa * kappa)) ** n
    return PmfTable(support, masses / total, tail)


def tv_exact(p: dict, q: dict) -> float:
    """Exact total variation of two finite pmfs given as dicts."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


# ---------------------------------------------------------------------------
# binning and empirical TV
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BinningSpec:
    """Deterministic cell assignment for LWE samples.

    Each sample maps to (a-residues of the first a_coords coordinates) x
    (torus_bins equal cells for b).  Exact T_q values bin exactly; continuous
    b values bin by their F-bit fraction.
    """

    torus_bins: int = 8
    a_coords: Optional[int] = None

    def __post_init__(self):
        if self.torus_bins < 2:
            raise ParameterError("need at least 2 torus bins")

    def n_cells(self, params: LweParams) -> int:
        k = params.n if self.a_coords is None else min(self.a_coords, params.n)
        return params.q ** k * self.torus_bins

    def bin_batch(self, batch: SampleBatch) -> np.ndarray:
        p = batch.params
        k = p.n if self.a_coords is None else min(self.a_coords, p.n)
        out = np.empty(p.m, dtype=np.int64)
        tb = self.torus_bins
        for i in range(p.m):
            cell = 0
            for j in range(k):
                cell = cell * p.q + batch.a_num[i][j]
            frac = batch.b_fraction(i)
            out[i] = cell * tb + (frac.numerator * tb) // frac.denominator
        return out


@dataclass
class TvEstimate:
    estimate: float
    ci_halfwidth: float
    n_bins: int
    n_a: int
    n_b: int
    note: str = "plug-in binned TV; positively biased when laws are close"


def _tv_from_counts(ca: np.ndarray, cb: np.ndarray, na: int, nb: int) -> float:
    return 0.5 * float(np.abs(ca / na - cb / nb).sum())


def empirical_tv(binned_a: np.ndarray, binned_b: np.ndarray, n_bins: int,
                 stream: Optional[SeedStream] = None, bootstrap: int = 200) -> TvEstimate:
    """Plug-in binned TV with a bootstrap CI (symmetric in its arguments)."""
    na, nb = len(binned_a), len(binned_b)
    ca = np.bincount(binned_a, minlength=n_bins).astype(float)
    cb = np.bincount(binned_b, minlength=n_bins).astype(float)
    est = _tv_from_counts(ca, cb, na, nb)
    ci = 0.0
    if bootstrap > 0:
        rng = (stream or SeedStream(0)).child("tv-bootstrap").numpy_rng()
        vals = np.empty(bootstrap)
        pa, pb = ca / na, cb / nb
        for i in range(bootstrap):
            ra = rng.multinomial(na, pa).astype(float)
            rb = rng.multinomial(nb, pb).astype(float)
            vals[i] = _tv_from_counts(ra, rb, na, nb)
        ci = float(3 * vals.std())
    return TvEstimate(est, ci, n_bins, na, nb)


def tv_perm_null(binned_a: np.ndarray, binned_b: np.ndarray, n_bins: int,
                 stream: SeedStream, reps: int = 60) -> tuple[float, float]:
    """(mean, sd) of the plug-in TV under label permutation (same-law null)."""
    pool = np.concatenate([binned_a, binned_b])
    na = len(binned_a)
    rng = stream.child("tv-perm").numpy_rng()
    vals = np.empty(reps)
    for i in range(reps):
        rng.shuffle(pool)
        ca = np.bincount(pool[:na], minlength=n_bins).astype(float)
        cb = np.bincount(pool[na:], minlength=n_bins).astype(float)
        vals[i] = _tv_from_counts(ca, cb, na, len(pool) - na)
    return float(vals.mean()), float(vals.std())


def tv_within_budget(binned_a, binned_b, n_bins, budget: float,
                     stream: SeedStream, reps: int = 60) -> tuple[bool, dict]:
    """Debiased budget check: tv_hat - null_mean <= budget + 3 null_sd."""
    est = empirical_tv(binned_a, binned_b, n_bins, stream, bootstrap=0)
    mu0, sd0 = tv_perm_null(binned_a, binned_b, n_bins, stream, reps)
    ok = est.estimate - mu0 <= budget + 3 * sd0
    return ok, {"tv": est.estimate, "null_mean": mu0, "null_sd": sd0, "budget": budget}


# ---------------------------------------------------------------------------
# chi-square goodness of fit
# ---------------------------------------------------------------------------

def chi_square_gof(samples, pmf: PmfTable, min_expected: float = 5.0) -> float:
    """Chi-square p-value of samples against a pmf table.

    Support cells with expected count below min_expected are merged into a
    single tail cell together with any observed mass outside the support.
    """
    n = len(samples)
    if n == 0:
        raise ParameterError("no samples")
    tally: dict = {}
    for s in samples:
        key = s.item() if isinstance(s, np.generic) else s
        tally[key] = tally.get(key, 0) + 1
    return chi_square_gof_counts(tally, pmf, min_expected)


def chi_square_gof_counts(tally: dict, pmf: PmfTable, min_expected: float = 5.0) -> float:
    """chi_square_gof on pre-tallied {value: count} data."""
    n = sum(tally.values())
    if n == 0:
        raise ParameterError("no samples")
    counts = np.zeros(len(pmf.support) + 1)
    for key, cnt in tally.items():
        idx = pmf.index.get(key)
        counts[len(pmf.support) if idx is None else idx] += cnt
    expected = np.append(pmf.probs * n, pmf.truncation_mass_bound * n)
    keep = expected[:-1] >= min_expected
    if keep.sum() < 1:
        raise ParameterError("pmf too degenerate for a chi-square test")
    obs = counts[:-1][keep]
    exp = expected[:-1][keep]
    tail_obs = counts[:-1][~keep].sum() + counts[-1]
    tail_exp = expected[:-1][~keep].sum() + expected[-1]
    if tail_exp >= min_expected:
        obs = np.append(obs, tail_obs)
        exp = np.append(exp, tail_exp)
    else:
        # fold the sub-threshold tail into the largest cell
        j = int(np.argmax(exp))
        obs[j] += tail_obs
        exp[j] += tail_exp
    exp *= obs.sum() / exp.sum()
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = len(obs) - 1
    if dof < 1:
        raise ParameterError("chi-square needs at least two cells")
    return float(_chi2_dist.sf(stat, dof))


# ---------------------------------------------------------------------------
# distinguishers and advantage
# ---------------------------------------------------------------------------

def batch_arrays(batch: SampleBatch) -> tuple[np.ndarray, np.ndarray]:
    """(a residues as int64 (m, n), b values as float64 in [0,1))."""
    a = np.array(batch.a_num, dtype=np.int64)
    b = np.array([float(batch.b_fraction(i)) for i in range(batch.m)])
    return a, b


class ExhaustiveDistinguisher:
    """Likelihood-ratio test over the full secret space vs the uniform model.

    The b component is discretized into q * SUB_BINS equal torus cells; the
    per-cell noise mass comes from the wrapped noise model.  Deterministic
    given its noise model.  Secret spaces larger than space_cap are refused.
    """

    def __init__(self, n: int, q: int, noise: NoiseSpec, secret_space: str = "uniform_mod_q",
                 beta: Optional[float] = None, space_cap: int = 1 << 16):
        size = q ** n if secret_space == "uniform_mod_q" else 2 ** n
        if size > space_cap:
            raise RefusalError(f"secret space of size {size} exceeds the cap {space_cap}")
        self.n, self.q = n, q
        self.cells = q * SUB_BINS
        if secret_space == "uniform_mod_q":
            ranges = [range(q)] * n
        elif secret_space == "binary":
            ranges = [range(2)] * n
        else:
            raise ParameterError(f"unknown secret space {secret_space!r}")
        secrets = np.array(np.meshgrid(*ranges, indexing="ij")).reshape(n, -1).T
        self.secrets = secrets.astype(np.int64)
        width = beta if beta is not None else (noise.alpha if noise.kind != "zero" else None)
        self.cell_logmass = self._noise_cell_logmass(width)

    def _noise_cell_logmass(self, width: Optional[float]) -> np.ndarray:
        """log of SUB_BINS*q times the wrapped-noise mass of each torus cell."""
        cells = self.cells
        if width is None:
            mass = np.zeros(cells)
            mass[0] = 1.0  # zero noise: u = <a,s> exactly, first cell of the offset
        else:
            sigma = width / math.sqrt(2 * math.pi)  # std of D_width on the torus
            edges = np.arange(cells + 1) / cells
            ks = np.arange(-8, 9)
            from math import erf
            z = np.add.outer(ks, edges)  # wrap copies
            cdf = np.vectorize(lambda t: 0.5 * (1 + erf(t / (sigma * math.sqrt(2)))))(z)
            mass = (cdf[:, 1:] - cdf[:, :-1]).sum(axis=0)
            mass = np.maximum(mass, 1e-300)
            mass /= mass.sum()
        return np.log(np.maximum(mass * cells, 1e-290))

    def _cells_of(self, b: np.ndarray) -> np.ndarray:
        return np.floor((b % 1.0) * self.cells).astype(np.int64) % self.cells

    def decide_arrays(self, a: np.ndarray, b: np.ndarray) -> bool:
        return bool(self.decide_many(a[None, :, :], b[None, :])[0])

    def decide_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Vectorized over the leading axis: a (k, m, n), b (k, m) -> bool (k,)."""
        k, m, n = a.shape
        cells = self._cells_of(b)  # (k, m)
        w = np.tensordot(a, self.secrets.T, axes=([2], [0])) % self.q  # (k, m, S)
        rel = (cells[:, :, None] - w * SUB_BINS) % self.cells
        loglik = self.cell_logmass[rel].sum(axis=1)  # (k, S)
        peak = loglik.max(axis=1, keepdims=True)
        lr = np.exp(np.clip(loglik - peak, -700, 0)).mean(axis=1) * np.exp(np.clip(peak[:, 0], -700, 700))
        return lr > 1.0

    def decide(self, batch: SampleBatch, stream: Optional[SeedStream] = None) -> bool:
        a, b = batch_arrays(batch)
        return self.decide_arrays(a, b)


@dataclass
class AdvantageEstimate:
    advantage: float
    ci_halfwidth: float
    trials: int
    p0: float
    p1: float
    confidence: float = 0.99


def hoeffding_halfwidth(trials: int, confidence: float = 0.99) -> float:
    """Per-arm two-sided Hoeffding halfwidth at confidence (1+confidence)/2 each."""
    return math.sqrt(math.log(4.0 / (1.0 - confidence)) / (2.0 * trials))


def advantage_estimate(distinguisher, gen0: Callable, gen1: Callable,
                       trials: int, stream: SeedStream,
                       confidence: float = 0.99) -> AdvantageEstimate:
    """|P[A(gen0)] - P[A(gen1)]| with a two-arm Hoeffding interval.

    gen0/gen1 are callables mapping a SeedStream to one input object for the
    distinguisher.  Every trial draws from its own derived stream, so trials
    are order-independent and may run concurrently; the aggregate is a plain
    sum, keeping results reproducible regardless of scheduling.
    """
    if trials < 100:
        raise ParameterError("need at least 100 trials")
    acc = [0, 0]
    for arm, gen in enumerate((gen0, gen1)):
        for i in range(trials):
            st = stream.child("adv", arm, i)
            if distinguisher.decide(gen(st), st.child("dis")):
                acc[arm] += 1
    p0, p1 = acc[0] / trials, acc[1] / trials
    eps = hoeffding_halfwidth(trials, confidence)
    return AdvantageEstimate(abs(p0 - p1), 2 * eps, trials, p0, p1, confidence)


# ---------------------------------------------------------------------------
# unknown-noise combinator
# ---------------------------------------------------------------------------

def unknown_noise_combinator(inner: "ExhaustiveDistinguisher", alpha: float,
                             n: int, q: int, m_inner: int, stream: SeedStream,
                             **kw) -> "UnknownNoiseDistinguisher":
    """Wrap a fixed-width-noise distinguisher into one for unknown width <= alpha."""
    return UnknownNoiseDistinguisher(inner, alpha, n, q, m_inner, stream, **kw)


class UnknownNoiseDistinguisher:
    """Wraps a fixed-noise distinguisher into one for noise of unknown width.

    Estimates the inner algorithm's acceptance rate on uniform inputs once,
    then scans a geometric grid of noise additions beta' with
    alpha^2 = beta_hyp^2 + beta'^2; the input is declared non-uniform when
    the inner acceptance at any level deviates from the uniform baseline
    beyond the combined confidence radius.  The grid ratio keeps adjacent
    levels' laws close (per-batch TV within the documented spacing bound).
    """

    def __init__(self, inner: ExhaustiveDistinguisher, alpha: float,
                 n: int, q: int, m_inner: int, stream: SeedStream,
                 levels: int = 8, calls_per_level: int = 200,
                 baseline_calls: int = 800, min_beta_frac: float = 0.125):
        self.inner = inner
        self.alpha = float(alpha)
        self.n, self.q, self.m_inner = n, q, m_inner
        self.levels = levels
        self.calls = calls_per_level
        ratio = min_beta_frac ** (1.0 / max(levels - 1, 1))
        self.beta_hyp = [alpha * ratio**i for i in range(levels)]
        self.added = [math.sqrt(max(alpha * alpha - b * b, 0.0)) for b in self.beta_hyp]
        # uniform baseline, estimated once
        params = LweParams(n, baseline_calls * m_inner, q, NoiseSpec.zero())
        u = gen_uniform_batch(params, stream.child("baseline"))
        a, b = batch_arrays(u)
        dec = inner.decide_many(a.reshape(baseline_calls, m_inner, n),
                                b.reshape(baseline_calls, m_inner))
        self.baseline = float(dec.mean())
        self.radius = 3 * math.sqrt(0.25 / baseline_calls) + 3 * math.sqrt(0.25 / calls_per_level)

    @property
    def samples_needed(self) -> int:
        return self.levels * self.calls * self.m_inner

    def decide(self, batch: SampleBatch, stream: SeedStream) -> bool:
        """True when the input looks like LWE with some noise width <= alpha."""
        a, b = batch_arrays(batch)
        if len(b) < self.samples_needed:
            raise ParameterError(f"combinator needs {self.samples_needed} samples")
        rng = stream.child("added-noise").numpy_rng()
        k = self.calls
        m = self.m_inner
        for lvl in range(self.levels):
            lo = lvl * k * m
            aa = a[lo:lo + k * m].reshape(k, m, self.n)
            bb = b[lo:lo + k * m].reshape(k, m).copy()
            if self.added[lvl] > 0:
                sigma = self.added[lvl] / math.sqrt(2 * math.pi)
                bb = (bb + rng.normal(0.0, sigma, size=bb.shape)) % 1.0
            rate = float(self.inner.decide_many(aa, bb).mean())
            if abs(rate - self.baseline) > self.radius:
                return True
        return False
