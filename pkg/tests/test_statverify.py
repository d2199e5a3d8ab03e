"""Tests for the statistical oracles and distinguishers."""

import math

import numpy as np
import pytest

from lwekit.errors import ParameterError, RefusalError
from lwekit.gaussian import sample_dgauss_1d_batch, theta_coset
from lwekit.lwedist import LweParams, NoiseSpec, Secret, SecretSpec, gen_lwe_batch, gen_uniform_batch
from lwekit.rng import SeedStream
from lwekit.statverify import (
    BinningSpec,
    ExhaustiveDistinguisher,
    UnknownNoiseDistinguisher,
    advantage_estimate,
    batch_arrays,
    brute_force_pmf,
    chi_square_gof,
    dgs_pmf_1d,
    empirical_tv,
    tv_exact,
    tv_within_budget,
)

S = SeedStream


def test_brute_force_pmf_1d_values():
    t = brute_force_pmf(np.eye(1), [0.0], 1.0)
    # P(0) = 1/theta(0,1), P(+-1) = e^-pi / theta(0,1)
    assert math.isclose(t.prob((0,)), 0.9204417878355910, rel_tol=1e-9)
    assert math.isclose(t.prob((1,)), 0.0432139182637722 / 1.0864348112133080, rel_tol=1e-9)
    assert math.isclose(t.prob((-1,)), t.prob((1,)), rel_tol=1e-12)


def test_brute_force_pmf_symmetry_and_normalizer():
    t = brute_force_pmf([[1.0, 0.0], [0.5, 1.0]], [0.0, 0.0], 2.0)
    for key in t.support:
        mirror = tuple(-x for x in key)
        assert math.isclose(t.prob(key), t.prob(mirror), rel_tol=1e-9)
    # 1d slice consistency with the theta normalizer
    t1 = brute_force_pmf(np.eye(1), [0.25], 1.3)
    z = theta_coset(0.25, 1.3, 90)
    assert math.isclose(t1.prob((0,)), math.exp(-math.pi * 0.25**2 / 1.3**2) / z, rel_tol=1e-10)


def test_brute_force_pmf_refuses_high_dim():
    with pytest.raises(RefusalError):
        brute_force_pmf(np.eye(4), np.zeros(4), 1.0)


def test_tv_exact_separation_claim():
    # whenever P >= (1-eps) Q pointwise, TV(P, Q) <= eps
    rng = np.random.default_rng(1)
    for _ in range(200):
        k = rng.integers(2, 12)
        q = rng.dirichlet(np.ones(k))
        r = rng.dirichlet(np.ones(k))
        eps = float(rng.uniform(0, 0.5))
        p = (1 - eps) * q + eps * r
        P = {i: p[i] for i in range(k)}
        Q = {i: q[i] for i in range(k)}
        assert all(P[i] >= (1 - eps) * Q[i] - 1e-15 for i in range(k))
        assert tv_exact(P, Q) <= eps + 1e-12


def test_empirical_tv_identical_and_disjoint():
    rng = np.random.default_rng(2)
    a = rng.integers(0, 8, 40_000)
    b = rng.integers(0, 8, 40_000)
    est = empirical_tv(a, b, 8, S(1))
    assert est.estimate <= max(est.ci_halfwidth, 0.02)
    d = empirical_tv(np.zeros(1000, dtype=int), np.ones(1000, dtype=int), 2, S(1))
    assert d.estimate == 1.0
    # uniform vs point mass on 2 bins: exact TV 1/2
    u = rng.integers(0, 2, 50_000)
    pt = np.zeros(50_000, dtype=int)
    est = empirical_tv(u, pt, 2, S(1))
    assert abs(est.estimate - 0.5) < 0.02


def test_empirical_tv_symmetry_and_range():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 5, 5000)
    b = rng.integers(0, 5, 7000)
    e1 = empirical_tv(a, b, 5, S(7), bootstrap=0)
    e2 = empirical_tv(b, a, 5, S(7), bootstrap=0)
    assert e1.estimate == e2.estimate
    assert 0.0 <= e1.estimate <= 1.0


def test_tv_null_calibration_accepts_equal_laws():
    rng = np.random.default_rng(4)
    a = rng.integers(0, 16, 30_000)
    b = rng.integers(0, 16, 30_000)
    ok, info = tv_within_budget(a, b, 16, 0.0, S(4))
    assert ok, info


def test_tv_null_calibration_rejects_distinct_laws():
    rng = np.random.default_rng(5)
    a = rng.integers(0, 4, 30_000)
    b = np.where(rng.random(30_000) < 0.2, 0, rng.integers(0, 4, 30_000))
    ok, info = tv_within_budget(a, b, 4, 0.0, S(5))
    assert not ok, info


def test_chi_square_sampler_vs_own_pmf():
    offs, _ = sample_dgauss_1d_batch(0.3, 1.2, S(11).child("x").rng(), 200_000)
    p = chi_square_gof(offs.tolist(), dgs_pmf_1d(0.3, 1.2))
    assert p > 1e-3


def test_chi_square_detects_wrong_width():
    offs, _ = sample_dgauss_1d_batch(0.0, 1.2, S(12).child("x").rng(), 300_000)
    p = chi_square_gof(offs.tolist(), dgs_pmf_1d(0.0, 1.0))  # 20% off
    assert p < 1e-6


def test_chi_square_determinism():
    offs, _ = sample_dgauss_1d_batch(0.0, 1.0, S(13).child("x").rng(), 50_000)
    assert chi_square_gof(offs.tolist(), dgs_pmf_1d(0.0, 1.0)) == \
        chi_square_gof(offs.tolist(), dgs_pmf_1d(0.0, 1.0))


def test_chi_square_rejects_degenerate():
    table = dgs_pmf_1d(0.0, 0.2)  # essentially a point mass at 0
    with pytest.raises(ParameterError):
        chi_square_gof([0] * 100, table)


def test_binning_spec_cells():
    p = LweParams(2, 4, 4, NoiseSpec.zero())
    spec = BinningSpec(torus_bins=8)
    assert spec.n_cells(p) == 4 * 4 * 8
    s = Secret((1, 2), SecretSpec("uniform_mod_q"))
    batch = gen_lwe_batch(p, s, S(1).child("bin"))
    cells = spec.bin_batch(batch)
    assert cells.shape == (4,)
    assert np.all((0 <= cells) & (cells < spec.n_cells(p)))


def test_exhaustive_distinguisher_zero_noise():
    n, q, m = 1, 8, 4
    dist = ExhaustiveDistinguisher(n, q, NoiseSpec.zero())
    p = LweParams(n, m, q, NoiseSpec.zero())

    def gen_lwe(st):
        s = Secret((int(st.child("s").rng().next_u64()) % q,), SecretSpec("uniform_mod_q"))
        return gen_lwe_batch(p, s, st)

    def gen_uni(st):
        return gen_uniform_batch(p, st)

    est = advantage_estimate(dist, gen_lwe, gen_uni, 300, S(21))
    assert est.advantage >= 0.9


def test_exhaustive_distinguisher_huge_noise_blind():
    n, q, m = 1, 8, 4
    dist = ExhaustiveDistinguisher(n, q, NoiseSpec.gaussian(10.0))
    p = LweParams(n, m, q, NoiseSpec.gaussian(10.0))

    def gen_lwe(st):
        s = Secret((3,), SecretSpec("uniform_mod_q"))
        return gen_lwe_batch(p, s, st)

    def gen_uni(st):
        return gen_uniform_batch(p, st)

    est = advantage_estimate(dist, gen_lwe, gen_uni, 200, S(22))
    assert est.advantage <= est.ci_halfwidth + 0.05


def test_exhaustive_distinguisher_refuses_large_space():
    with pytest.raises(RefusalError):
        ExhaustiveDistinguisher(40, 8, NoiseSpec.zero())


def test_advantage_estimate_same_generator():
    dist = ExhaustiveDistinguisher(1, 4, NoiseSpec.gaussian(0.2))
    p = LweParams(1, 3, 4, NoiseSpec.gaussian(0.2))

    def gen(st):
        return gen_uniform_batch(p, st)

    est = advantage_estimate(dist, gen, gen, 150, S(23).child("same"))
    assert est.advantage <= est.ci_halfwidth


def test_advantage_estimate_seeded_reproducibility():
    dist = ExhaustiveDistinguisher(1, 4, NoiseSpec.gaussian(0.2))
    p = LweParams(1, 3, 4, NoiseSpec.gaussian(0.2))

    def gen(st):
        return gen_uniform_batch(p, st)

    e1 = advantage_estimate(dist, gen, gen, 120, S(9).child("rep"))
    e2 = advantage_estimate(dist, gen, gen, 120, S(9).child("rep"))
    assert (e1.p0, e1.p1) == (e2.p0, e2.p1)


def test_hoeffding_coverage_calibration():
    # known-advantage Bernoulli pair: the CI must cover the truth >= 99%
    class BitDist:
        def decide(self, bit, stream=None):
            return bool(bit)

    truth = 0.3
    covered = 0
    runs, trials = 1000, 200
    for i in range(runs):
        st = S(31).child("cov", i)

        def gen0(s):
            return s.child("x").rng().next_u64() % 10 < 5  # p = 0.5

        def gen1(s):
            return s.child("x").rng().next_u64() % 10 < 2  # p = 0.2

        est = advantage_estimate(BitDist(), gen0, gen1, trials, st)
        if abs(est.advantage - truth) <= est.ci_halfwidth:
            covered += 1
    assert covered / runs >= 0.99


def test_unknown_noise_combinator_smoke():
    n, q, m = 1, 8, 4
    alpha, beta = 0.1, 0.05
    inner = ExhaustiveDistinguisher(n, q, NoiseSpec.gaussian(alpha))
    comb = UnknownNoiseDistinguisher(inner, alpha, n, q, m, S(41).child("cal"),
                                     levels=6, calls_per_level=120, baseline_calls=400)
    mneed = comb.samples_needed
    p = LweParams(n, mneed, q, NoiseSpec.unknown_bounded(alpha))

    def gen_lwe(st):
        s = Secret((5,), SecretSpec("uniform_mod_q"))
        return gen_lwe_batch(p, s, st, beta=beta)

    def gen_uni(st):
        return gen_uniform_batch(p, st)

    est = advantage_estimate(comb, gen_lwe, gen_uni, 100, S(41).child("adv"))
    assert est.p1 <= 1 / 3          # declares "uniform" with rate >= 2/3 on uniform
    assert est.advantage >= 1 / 3


def test_batch_arrays_shapes():
    p = LweParams(3, 7, 8, NoiseSpec.gaussian(0.1))
    s = Secret((1, 2, 3), SecretSpec("uniform_mod_q"))
    a, b = batch_arrays(gen_lwe_batch(p, s, S(2).child("arr")))
    assert a.shape == (7, 3) and b.shape == (7,)
    assert np.all((0 <= b) & (b < 1))


def test_chi_square_calibration_rate():
    # sampler vs its own pmf must pass at the 1e-3 threshold in >= 99% of runs
    from lwekit.statverify import chi_square_gof_counts
    pmf = dgs_pmf_1d(0.3, 1.1)
    passes = 0
    runs = 100
    for i in range(runs):
        offs, _ = sample_dgauss_1d_batch(0.3, 1.1, S(500 + i).child("cal").rng(), 50_000)
        shift = int(-offs.min())
        counts = np.bincount(offs + shift)
        tally = {j - shift: int(counts[j]) for j in range(len(counts)) if counts[j]}
        if chi_square_gof_counts(tally, pmf) >= 1e-3:
            passes += 1
    assert passes >= 99


def test_unknown_noise_combinator_factory():
    from lwekit.statverify import unknown_noise_combinator
    inner = ExhaustiveDistinguisher(1, 8, NoiseSpec.gaussian(0.1))
    comb = unknown_noise_combinator(inner, 0.1, 1, 8, 4, S(9).child("f"),
                                    levels=4, calls_per_level=50, baseline_calls=100)
    assert comb.samples_needed == 4 * 50 * 4
