"""Tests for the distribution generators and batch serialization."""

import math
from fractions import Fraction

import numpy as np
import pytest

from lwekit.errors import HintSetError, ParameterError
from lwekit.gaussian import rho, theta_coset
from lwekit.lwedist import (
    LweParams,
    NoiseSpec,
    Secret,
    SecretSpec,
    gen_extlwe_challenge,
    gen_first_errorless_batch,
    gen_first_errorless_uniform,
    gen_lwe_batch,
    gen_secret,
    gen_uniform_batch,
    read_batch,
    write_batch,
)
from lwekit.rng import SeedStream


def stream(root=0xA11CE):
    return SeedStream(root)


def centered(batch, i):
    v = batch.b_fraction(i)
    return float(v - 1) if v > Fraction(1, 2) else float(v)


def test_gen_secret_binary_uniform():
    n, draws = 4, 20_000
    counts = np.zeros(n)
    for i in range(draws):
        s = gen_secret(SecretSpec("binary"), n, 8, stream().child("b", i))
        assert all(x in (0, 1) for x in s.s)
        counts += s.s
    means = counts / draws
    assert np.all(np.abs(means - 0.5) < 3 * math.sqrt(0.25 / draws))


def test_gen_secret_uniform_mod_q():
    q, draws = 8, 30_000
    vals = [gen_secret(SecretSpec("uniform_mod_q"), 1, q, stream().child("u", i)).s[0]
            for i in range(draws)]
    hist = np.bincount(vals, minlength=q)
    expected = draws / q
    chi2 = float(((hist - expected) ** 2 / expected).sum())
    from scipy.stats import chi2 as chi2_dist
    assert chi2_dist.sf(chi2, q - 1) > 1e-4


def test_gen_secret_discrete_gaussian_marginal():
    r, draws = 4.0, 30_000
    vals = np.array([gen_secret(SecretSpec("discrete_gaussian", r), 1, 8, stream().child("g", i)).s[0]
                     for i in range(draws)])
    z = theta_coset(0.0, r, 80)
    for k in (0, 1, 2, -3):
        p = rho(k, r) / z
        se = math.sqrt(p * (1 - p) / draws)
        assert abs((vals == k).mean() - p) < 5 * se


def test_zero_noise_gives_exact_grid():
    p = LweParams(3, 50, 16, NoiseSpec.zero())
    s = gen_secret(SecretSpec("uniform_mod_q"), 3, 16, stream())
    batch = gen_lwe_batch(p, s, stream().child("z"))
    for i in range(p.m):
        ip = sum(a * x for a, x in zip(batch.a_num[i], s.s)) % 16
        assert batch.b_grid[i] == ip
        assert batch.b_fraction(i) == Fraction(ip, 16)


def test_gaussian_noise_std():
    alpha = 0.05
    p = LweParams(2, 60_000, 8, NoiseSpec.gaussian(alpha))
    s = Secret((3, 5), SecretSpec("uniform_mod_q"))
    batch = gen_lwe_batch(p, s, stream().child("std"))
    resid = []
    for i in range(p.m):
        ip = Fraction(sum(a * x for a, x in zip(batch.a_num[i], s.s)) % 8, 8)
        d = (batch.b_fraction(i) - ip) % 1
        resid.append(float(d - 1) if d > Fraction(1, 2) else float(d))
    resid = np.array(resid)
    want = alpha / math.sqrt(2 * math.pi)
    assert abs(resid.std() - want) / want < 0.03
    assert abs(resid.mean()) < 3 * want / math.sqrt(p.m)


def test_secret_mod_q_invariance():
    p = LweParams(2, 20, 8, NoiseSpec.gaussian(0.05))
    s1 = Secret((3, 5), SecretSpec("uniform_mod_q"))
    s2 = Secret((3 + 8, 5 + 16), SecretSpec("uniform_mod_q"))
    b1 = gen_lwe_batch(p, s1, stream().child("m"))
    b2 = gen_lwe_batch(p, s2, stream().child("m"))
    assert b1.a_num == b2.a_num and b1.b_fp == b2.b_fp


def test_batch_determinism():
    p = LweParams(2, 30, 8, NoiseSpec.gaussian(0.1))
    s = Secret((1, 2), SecretSpec("uniform_mod_q"))
    b1 = gen_lwe_batch(p, s, stream(7).child("d"))
    b2 = gen_lwe_batch(p, s, stream(7).child("d"))
    assert b1.a_num == b2.a_num and b1.b_fp == b2.b_fp and b1.b_grid == b2.b_grid


def test_uniform_batch_marginals():
    p = LweParams(1, 50_000, 4, NoiseSpec.zero())
    batch = gen_uniform_batch(p, stream().child("u"))
    a = np.array([row[0] for row in batch.a_num])
    hist = np.bincount(a, minlength=4)
    assert np.all(np.abs(hist - p.m / 4) < 5 * math.sqrt(p.m * 0.25))
    # b-marginal uniform on the torus: 8 equal bins
    b = np.array([float(batch.b_fraction(i)) for i in range(p.m)])
    hist = np.histogram(b, bins=8, range=(0, 1))[0]
    assert np.all(np.abs(hist - p.m / 8) < 5 * math.sqrt(p.m / 8))


def test_first_errorless_batch():
    p = LweParams(2, 20, 8, NoiseSpec.gaussian(0.05))
    s = Secret((3, 1), SecretSpec("uniform_mod_q"))
    batch = gen_first_errorless_batch(p, s, stream().child("fe"))
    ip = sum(a * x for a, x in zip(batch.a_num[0], s.s)) % 8
    assert batch.b_grid[0] == ip        # exact errorless first sample
    assert all(g is None for g in batch.b_grid[1:])


def test_first_errorless_equals_lwe_under_zero_noise():
    p = LweParams(2, 25, 8, NoiseSpec.zero())
    s = Secret((3, 1), SecretSpec("uniform_mod_q"))
    b1 = gen_first_errorless_batch(p, s, stream(3).child("x"))
    b2 = gen_lwe_batch(p, s, stream(3).child("x"))
    assert b1.a_num == b2.a_num and b1.b_fp == b2.b_fp and b1.b_grid == b2.b_grid


def test_first_errorless_uniform_first_on_grid():
    p = LweParams(2, 30, 8, NoiseSpec.gaussian(0.05))
    batch = gen_first_errorless_uniform(p, stream().child("feu"))
    assert batch.b_grid[0] is not None
    assert all(g is None for g in batch.b_grid[1:])


def test_extlwe_hints_exact():
    ch = gen_extlwe_challenge(2, 4, 8, NoiseSpec.gaussian(0.3), (1, 1, 0, 1),
                              t=3, real_case=True, stream=stream().child("e"))
    for i in range(3):
        recomputed = sum(z * e for z, e in zip(ch.z, ch.noise_num[i]))
        assert ch.hints_num[i] == recomputed
    # real case: responses minus A^T s_i land in (1/q)Z always
    for i in range(3):
        for j in range(4):
            ip = sum(ch.A_num[k][j] * ch.secrets[i][k] for k in range(2)) % 8
            assert (ch.responses_num[i][j] - ip - ch.noise_num[i][j]) % 8 == 0


def test_extlwe_zero_hint_vector():
    ch = gen_extlwe_challenge(2, 4, 8, NoiseSpec.gaussian(0.3), (0, 0, 0, 0),
                              t=2, real_case=True, stream=stream().child("e0"))
    assert ch.hints_num == [0, 0]


def test_extlwe_all_ones_hint_is_noise_sum():
    ch = gen_extlwe_challenge(1, 3, 8, NoiseSpec.gaussian(0.4), (1, 1, 1),
                              t=1, real_case=False, stream=stream().child("e1"))
    assert ch.hints_num[0] == sum(ch.noise_num[0])
    assert ch.hint_value(0) == Fraction(sum(ch.noise_num[0]), 8)


def test_extlwe_rejects_bad_hint_vector():
    with pytest.raises(HintSetError):
        gen_extlwe_challenge(1, 3, 8, NoiseSpec.gaussian(0.4), (2, 0, 0),
                             t=1, real_case=True, stream=stream())


def test_extlwe_decoy_reuses_hint_protocol():
    # changing one response index's case must not perturb other indices
    real = gen_extlwe_challenge(2, 3, 8, NoiseSpec.gaussian(0.4), (1, 0, 1),
                                t=3, real_case=True, stream=stream(5).child("h"))
    dec = gen_extlwe_challenge(2, 3, 8, NoiseSpec.gaussian(0.4), (1, 0, 1),
                               t=3, real_case=False, stream=stream(5).child("h"))
    assert real.A_num == dec.A_num
    assert real.hints_num == dec.hints_num
    assert real.noise_num == dec.noise_num


def test_batch_roundtrip(tmp_path):
    p = LweParams(2, 12, 8, NoiseSpec.gaussian(0.05))
    s = Secret((3, 1), SecretSpec("binary"))
    batch = gen_first_errorless_batch(p, s, stream().child("rt"))
    path = tmp_path / "batch.txt"
    write_batch(batch, path)
    back = read_batch(path)
    assert back.params == batch.params
    assert back.a_num == batch.a_num
    assert back.b_fp == batch.b_fp
    assert back.b_grid == batch.b_grid
    assert back.transparent.secret == batch.transparent.secret
    assert back.transparent.noise_fp == batch.transparent.noise_fp
    # writing again reproduces the identical file
    path2 = tmp_path / "batch2.txt"
    write_batch(back, path2)
    assert path.read_text() == path2.read_text()


def test_batch_roundtrip_opaque(tmp_path):
    p = LweParams(1, 5, 4, NoiseSpec.zero())
    s = Secret((3,), SecretSpec("uniform_mod_q"))
    batch = gen_lwe_batch(p, s, stream().child("op"))
    path = tmp_path / "opaque.txt"
    write_batch(batch, path, opaque=True)
    back = read_batch(path)
    assert back.transparent is None
    assert back.b_grid == batch.b_grid


def test_unknown_bounded_requires_beta():
    p = LweParams(1, 5, 4, NoiseSpec.unknown_bounded(0.1))
    s = Secret((1,), SecretSpec("uniform_mod_q"))
    with pytest.raises(ParameterError):
        gen_lwe_batch(p, s, stream())
    with pytest.raises(ParameterError):
        gen_lwe_batch(p, s, stream(), beta=0.2)
    batch = gen_lwe_batch(p, s, stream(), beta=0.05)
    assert batch.transparent.realized_alpha == 0.05
