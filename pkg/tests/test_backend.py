"""Backend parity and deterministic-seeding tests.

The numeric core is one source compiled to an extension and also runnable
interpreted; every operation must produce bit-identical results in both.
"""

import numpy as np
import pytest

import mpmath as mp

from lwekit.backend import backend_name, core, dd_from_fraction, dd_to_fraction, load_pure_core
from lwekit.rng import SeedStream

pure = load_pure_core()

mp.mp.prec = 180


def test_compiled_backend_active():
    # the build compiles the core; the package must pick the extension up
    assert backend_name() == "compiled"
    assert not pure.compiled()


def test_rng_stream_parity():
    a = core.Xoshiro256StarStar(1, 2, 3, 4)
    b = pure.Xoshiro256StarStar(1, 2, 3, 4)
    assert [a.next_u64() for _ in range(500)] == [b.next_u64() for _ in range(500)]


def test_rng_rejects_zero_state_gracefully():
    r = core.Xoshiro256StarStar(0, 0, 0, 0)
    assert r.next_u64() != r.next_u64()


def test_uniform_dd_range_and_parity():
    a = core.Xoshiro256StarStar(9, 9, 9, 9)
    b = pure.Xoshiro256StarStar(9, 9, 9, 9)
    for _ in range(200):
        ua = core.uniform_dd(a)
        ub = pure.uniform_dd(b)
        assert ua == ub
        assert 0.0 <= ua[0] < 1.0


def test_uniform_below_exact_and_parity():
    a = core.Xoshiro256StarStar(3, 1, 4, 1)
    b = pure.Xoshiro256StarStar(3, 1, 4, 1)
    for bound in (2, 7, 256, 2**64 + 3, 2**128 - 59):
        va = [core.uniform_below(a, bound) for _ in range(50)]
        vb = [pure.uniform_below(b, bound) for _ in range(50)]
        assert va == vb
        assert all(0 <= v < bound for v in va)


@pytest.mark.parametrize("fn,ref,hi_x", [
    ("exp_dd", mp.exp, 300.0),
    ("log_dd", mp.log, 1e6),
    ("erfc_dd", mp.erfc, 26.0),   # past ~26 the result underflows doubles
    ("sqrt_dd", mp.sqrt, 1e9),
])
def test_dd_transcendental_accuracy(fn, ref, hi_x):
    rng = np.random.default_rng(abs(hash(fn)) % 2**32)
    worst = mp.mpf(0)
    for _ in range(120):
        x = float(rng.uniform(0.01, hi_x))
        hi, lo = getattr(core, fn)(x, 0.0)
        truth = ref(mp.mpf(x))
        worst = max(worst, abs((mp.mpf(hi) + mp.mpf(lo) - truth) / truth))
    assert worst < mp.mpf(2) ** -85


def test_dd_transcendental_parity():
    rng = np.random.default_rng(17)
    for fn in ("exp_dd", "log_dd", "erfc_dd", "sqrt_dd"):
        for _ in range(100):
            x = float(rng.uniform(0.001, 20.0))
            assert getattr(core, fn)(x, 1e-18) == getattr(pure, fn)(x, 1e-18)


def test_sincos_parity_and_pythagoras():
    rng = np.random.default_rng(23)
    for _ in range(100):
        x = float(rng.uniform(-40, 40))
        sc = core.sincos_dd(x, 0.0)
        assert sc == pure.sincos_dd(x, 0.0)
        s = mp.mpf(sc[0]) + mp.mpf(sc[1])
        c = mp.mpf(sc[2]) + mp.mpf(sc[3])
        assert abs(s * s + c * c - 1) < mp.mpf(2) ** -90


def test_theta_parity():
    for c in (0.0, 0.25, 0.77):
        for r in (0.3, 0.9, 1.0, 3.0):
            assert core.theta_direct(c, 0.0, r, 0.0, 90) == pure.theta_direct(c, 0.0, r, 0.0, 90)
            assert core.theta_poisson(c, 0.0, r, 0.0, 90) == pure.theta_poisson(c, 0.0, r, 0.0, 90)


def test_sampler_draw_parity():
    for c, r in [(0.0, 0.8), (0.5, 1.0), (0.3, 2.5), (0.77, 0.5)]:
        ta = core.Dgs1dTable(c, 0.0, r, 0.0)
        tb = pure.Dgs1dTable(c, 0.0, r, 0.0)
        ra = core.Xoshiro256StarStar(7, 7, 7, 7)
        rb = pure.Xoshiro256StarStar(7, 7, 7, 7)
        assert [ta.draw(ra) for _ in range(800)] == [tb.draw(rb) for _ in range(800)]


def test_gauss_d1_parity():
    ra = core.Xoshiro256StarStar(2, 4, 6, 8)
    rb = pure.Xoshiro256StarStar(2, 4, 6, 8)
    for _ in range(300):
        assert core.gauss_d1(ra) == pure.gauss_d1(rb)


def test_sampler_underflow_signalled():
    # mass underflows: c = 0.5, r tiny; both backends agree it is unusable
    ta = core.Dgs1dTable(0.5, 0.0, 0.01, 0.0)
    assert not ta.usable()
    assert not pure.Dgs1dTable(0.5, 0.0, 0.01, 0.0).usable()
    with pytest.raises(ValueError):
        ta.draw(core.Xoshiro256StarStar(1, 1, 1, 1))


def test_seed_stream_independence_and_stability():
    s = SeedStream(42)
    a = s.child("x").rng()
    b = s.child("x").rng()
    c = s.child("y").rng()
    va = [a.next_u64() for _ in range(10)]
    assert va == [b.next_u64() for _ in range(10)]
    assert va != [c.next_u64() for _ in range(10)]
    assert s.child("x", 1).rng().getstate() != s.child("x", 2).rng().getstate()
    assert s.child(1, "x").rng().getstate() != s.child("1x").rng().getstate()


def test_seed_stream_rejects_bad_root():
    with pytest.raises(ValueError):
        SeedStream(-1)
    with pytest.raises(ValueError):
        SeedStream(2**64)


def test_dd_fraction_roundtrip():
    hi, lo = dd_from_fraction(1, 3)
    back = dd_to_fraction(hi, lo)
    from fractions import Fraction
    assert abs(back - Fraction(1, 3)) < Fraction(1, 2**100)
    hi, lo = dd_from_fraction(2**100 + 7, 2**101)
    assert abs(dd_to_fraction(hi, lo) - Fraction(2**100 + 7, 2**101)) < Fraction(1, 2**100)
