# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Numeric core: double-double arithmetic, deterministic RNG, exact samplers.

This module is written in Cython "pure Python" mode.  It is compiled to a C
extension by the build (the hot path), but the very same file also runs under
the plain interpreter as a fallback; both modes produce bit-identical output
because every operation reduces to IEEE-754 double arithmetic (add, sub, mul,
div, sqrt, floor, ldexp, frexp -- all correctly rounded) plus masked 64-bit
integer arithmetic.  No libm transcendentals are used anywhere: exp, log,
sin/cos and erfc are implemented here on top of double-double ("dd")
arithmetic, giving ~106-bit working precision.

Conventions:
  * a dd value is a pair of doubles (hi, lo) with |lo| <= ulp(hi)/2.
  * the Gaussian weight function is rho_r(x) = exp(-pi x^2 / r^2); the
    one-dimensional discrete Gaussian on Z+c has mass proportional to rho_r.
  * all samplers consume randomness through Xoshiro256StarStar below, and the
    exact number and order of 64-bit draws per operation is part of the
    contract (the compiled and interpreted backends stay in lockstep).
"""

import cython

if cython.compiled:
    from cython.cimports.libc.math import sqrt, floor, ldexp, frexp, fabs
else:
    from math import sqrt, floor, ldexp, frexp, fabs

MASK64 = 0xFFFFFFFFFFFFFFFF

PI_HI: cython.double = float.fromhex("0x1.921fb54442d18p+1")
PI_LO: cython.double = float.fromhex("0x1.1a62633145c07p-53")
TWO_PI_HI: cython.double = float.fromhex("0x1.921fb54442d18p+2")
TWO_PI_LO: cython.double = float.fromhex("0x1.1a62633145c07p-52")
PI_2_HI: cython.double = float.fromhex("0x1.921fb54442d18p+0")
PI_2_LO: cython.double = float.fromhex("0x1.1a62633145c07p-54")
LN2_HI: cython.double = float.fromhex("0x1.62e42fefa39efp-1")
LN2_LO: cython.double = float.fromhex("0x1.abc9e3b39803fp-56")
SQRT_PI_HI: cython.double = float.fromhex("0x1.c5bf891b4ef6bp+0")
SQRT_PI_LO: cython.double = float.fromhex("-0x1.618f13eb7ca89p-54")
INV_SQRT_2PI_HI: cython.double = float.fromhex("0x1.9884533d43651p-2")
INV_SQRT_2PI_LO: cython.double = float.fromhex("-0x1.cbc0d30ebfd15p-56")

# 2^-53 and 2^-106, used to turn raw 64-bit draws into dd uniforms.
_P53: cython.double = float.fromhex("0x1p-53")
_P106: cython.double = float.fromhex("0x1p-106")

_DD_EPS: cython.double = float.fromhex("0x1p-110")


def compiled() -> bool:
    """True when running as the compiled extension."""
    return cython.compiled


# ---------------------------------------------------------------------------
# double-double primitives (Dekker / Knuth error-free transforms)
# ---------------------------------------------------------------------------

@cython.cfunc
@cython.inline
def _two_sum(a: cython.double, b: cython.double) -> tuple[cython.double, cython.double]:
    s: cython.double = a + b
    bb: cython.double = s - a
    return s, (a - (s - bb)) + (b - bb)


@cython.cfunc
@cython.inline
def _quick_two_sum(a: cython.double, b: cython.double) -> tuple[cython.double, cython.double]:
    # requires |a| >= |b|
    s: cython.double = a + b
    return s, b - (s - a)


@cython.cfunc
@cython.inline
def _two_prod(a: cython.double, b: cython.double) -> tuple[cython.double, cython.double]:
    # Dekker split; safe for the magnitudes used here (|a|,|b| < 2^996).
    p: cython.double = a * b
    ta: cython.double = 134217729.0 * a
    ahi: cython.double = ta - (ta - a)
    alo: cython.double = a - ahi
    tb: cython.double = 134217729.0 * b
    bhi: cython.double = tb - (tb - b)
    blo: cython.double = b - bhi
    err: cython.double = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


@cython.cfunc
@cython.inline
def dd_add(ah: cython.double, al: cython.double, bh: cython.double, bl: cython.double) -> tuple[cython.double, cython.double]:
    s1: cython.double
    s2: cython.double
    t1: cython.double
    t2: cython.double
    s1, s2 = _two_sum(ah, bh)
    t1, t2 = _two_sum(al, bl)
    s2 += t1
    s1, s2 = _quick_two_sum(s1, s2)
    s2 += t2
    s1, s2 = _quick_two_sum(s1, s2)
    return s1, s2


@cython.cfunc
@cython.inline
def dd_sub(ah: cython.double, al: cython.double, bh: cython.double, bl: cython.double) -> tuple[cython.double, cython.double]:
    return dd_add(ah, al, -bh, -bl)


@cython.cfunc
@cython.inline
def dd_mul(ah: cython.double, al: cython.double, bh: cython.double, bl: cython.double) -> tuple[cython.double, cython.double]:
    p1: cython.double
    p2: cython.double
    p1, p2 = _two_prod(ah, bh)
    p2 += ah * bl + al * bh
    return _quick_two_sum(p1, p2)


@cython.cfunc
@cython.inline
def dd_mul_d(ah: cython.double, al: cython.double, b: cython.double) -> tuple[cython.double, cython.double]:
    p1: cython.double
    p2: cython.double
    p1, p2 = _two_prod(ah, b)
    p2 += al * b
    return _quick_two_sum(p1, p2)


@cython.cfunc
@cython.inline
def dd_div(ah: cython.double, al: cython.double, bh: cython.double, bl: cython.double) -> tuple[cython.double, cython.double]:
    q1: cython.double = ah / bh
    th: cython.double
    tl: cython.double
    rh: cython.double
    rl: cython.double
    th, tl = dd_mul_d(bh, bl, q1)
    rh, rl = dd_sub(ah, al, th, tl)
    q2: cython.double = rh / bh
    th, tl = dd_mul_d(bh, bl, q2)
    rh, rl = dd_sub(rh, rl, th, tl)
    q3: cython.double = rh / bh
    q1, q2 = _quick_two_sum(q1, q2)
    return dd_add(q1, q2, q3, 0.0)


@cython.cfunc
@cython.inline
def dd_div_d(ah: cython.double, al: cython.double, b: cython.double) -> tuple[cython.double, cython.double]:
    q1: cython.double = ah / b
    p1: cython.double
    p2: cython.double
    p1, p2 = _two_prod(q1, b)
    s: cython.double
    e: cython.double
    s, e = _two_sum(ah, -p1)
    e += al
    e -= p2
    q2: cython.double = (s + e) / b
    return _quick_two_sum(q1, q2)


@cython.cfunc
@cython.inline
def dd_sqr(ah: cython.double, al: cython.double) -> tuple[cython.double, cython.double]:
    p1: cython.double
    p2: cython.double
    p1, p2 = _two_prod(ah, ah)
    p2 += 2.0 * ah * al
    return _quick_two_sum(p1, p2)


@cython.cfunc
@cython.inline
def dd_sqrt(ah: cython.double, al: cython.double) -> tuple[cython.double, cython.double]:
    # one Newton correction on top of the correctly rounded double sqrt
    if ah == 0.0 and al == 0.0:
        return 0.0, 0.0
    y0: cython.double = sqrt(ah)
    sh: cython.double
    sl: cython.double
    sh, sl = dd_sqr(y0, 0.0)
    sh, sl = dd_sub(ah, al, sh, sl)
    corr: cython.double = sh / (2.0 * y0)
    return _quick_two_sum(y0, corr)


@cython.cfunc
@cython.inline
def dd_floor(ah: cython.double, al: cython.double) -> cython.double:
    f: cython.double = floor(ah)
    if f == ah and al < 0.0:
        f -= 1.0
    return f


@cython.cfunc
@cython.inline
def dd_lt(ah: cython.double, al: cython.double, bh: cython.double, bl: cython.double) -> cython.bint:
    return ah < bh or (ah == bh and al < bl)


# ---------------------------------------------------------------------------
# dd transcendentals
# ---------------------------------------------------------------------------

@cython.cfunc
def dd_exp(ah: cython.double, al: cython.double) -> tuple[cython.double, cython.double]:
    """exp of a dd value; relative error ~2^-104 over [-745, 700]."""
    if ah > 700.0:
        return float("inf"), 0.0
    if ah < -745.0:
        return 0.0, 0.0
    m: cython.double = floor(ah / LN2_HI + 0.5)
    rh: cython.double
    rl: cython.double
    th: cython.double
    tl: cython.double
    th, tl = dd_mul_d(LN2_HI, LN2_LO, m)
    rh, rl = dd_sub(ah, al, th, tl)
    # scale by 2^-9, Taylor of expm1, then square out nine times
    rh = ldexp(rh, -9)
    rl = ldexp(rl, -9)
    sh: cython.double
    sl: cython.double
    ph: cython.double
    pl: cython.double
    sh, sl = rh, rl
    ph, pl = rh, rl
    k: cython.int
    for k in range(2, 12):
        ph, pl = dd_mul(ph, pl, rh, rl)
        ph, pl = dd_div_d(ph, pl, k)
        sh, sl = dd_add(sh, sl, ph, pl)
        if fabs(ph) < _DD_EPS:
            break
    for k in range(9):
        th, tl = dd_sqr(sh, sl)
        sh, sl = dd_add(2.0 * sh, 2.0 * sl, th, tl)
    sh, sl = dd_add(sh, sl, 1.0, 0.0)
    im: cython.int = cython.cast(cython.int, m)
    return ldexp(sh, im), ldexp(sl, im)


@cython.cfunc
def dd_log(ah: cython.double, al: cython.double) -> tuple[cython.double, cython.double]:
    """log of a positive dd value via atanh series; error ~2^-104."""
    e: cython.int = 0
    mant: cython.double
    if cython.compiled:
        mant = frexp(ah, cython.address(e))
    else:
        mant, e = frexp(ah)
    if mant < 0.70710678118654752:
        mant *= 2.0
        e -= 1
    xh: cython.double = ldexp(ah, -e)
    xl: cython.double = ldexp(al, -e)
    nh: cython.double
    nl: cython.double
    dh: cython.double
    dl: cython.double
    nh, nl = dd_add(xh, xl, -1.0, 0.0)
    dh, dl = dd_add(xh, xl, 1.0, 0.0)
    th: cython.double
    tl: cython.double
    th, tl = dd_div(nh, nl, dh, dl)
    wh: cython.double
    wl: cython.double
    wh, wl = dd_sqr(th, tl)
    sh: cython.double = th
    sl: cython.double = tl
    ph: cython.double = th
    pl: cython.double = tl
    k: cython.int
    for k in range(1, 30):
        ph, pl = dd_mul(ph, pl, wh, wl)
        qh: cython.double
        ql: cython.double
        qh, ql = dd_div_d(ph, pl, 2 * k + 1)
        sh, sl = dd_add(sh, sl, qh, ql)
        if fabs(qh) < _DD_EPS * fabs(sh):
            break
    sh, sl = dd_add(sh + sh, sl + sl, 0.0, 0.0)
    eh: cython.double
    el: cython.double
    eh, el = dd_mul_d(LN2_HI, LN2_LO, cython.cast(cython.double, e))
    return dd_add(sh, sl, eh, el)


@cython.cfunc
def dd_sincos(ah: cython.double, al: cython.double) -> tuple[cython.double, cython.double, cython.double, cython.double]:
    """(sin, cos) of a dd value, |a| <= ~1e4.  Returns (sh, sl, ch, cl)."""
    n: cython.double = floor(ah / PI_2_HI + 0.5)
    th: cython.double
    tl: cython.double
    th, tl = dd_mul_d(PI_2_HI, PI_2_LO, n)
    xh: cython.double
    xl: cython.double
    xh, xl = dd_sub(ah, al, th, tl)
    q: cython.int = cython.cast(cython.int, n - 4.0 * floor(n / 4.0))
    # Taylor on |x| <= pi/4
    wh: cython.double
    wl: cython.double
    wh, wl = dd_sqr(xh, xl)
    sh: cython.double = xh
    sl: cython.double = xl
    ph: cython.double = xh
    pl: cython.double = xl
    k: cython.int
    for k in range(1, 20):
        ph, pl = dd_mul(ph, pl, wh, wl)
        ph, pl = dd_div_d(ph, pl, (2 * k) * (2 * k + 1))
        if k & 1:
            sh, sl = dd_sub(sh, sl, ph, pl)
        else:
            sh, sl = dd_add(sh, sl, ph, pl)
        if fabs(ph) < _DD_EPS:
            break
    ch: cython.double = 1.0
    cl: cython.double = 0.0
    ph, pl = 1.0, 0.0
    for k in range(1, 20):
        ph, pl = dd_mul(ph, pl, wh, wl)
        ph, pl = dd_div_d(ph, pl, (2 * k - 1) * (2 * k))
        if k & 1:
            ch, cl = dd_sub(ch, cl, ph, pl)
        else:
            ch, cl = dd_add(ch, cl, ph, pl)
        if fabs(ph) < _DD_EPS:
            break
    if q == 0:
        return sh, sl, ch, cl
    if q == 1:
        return ch, cl, -sh, -sl
    if q == 2:
        return -sh, -sl, -ch, -cl
    return -ch, -cl, sh, sl


@cython.cfunc
def dd_erfc(ah: cython.double, al: cython.double) -> tuple[cython.double, cython.double]:
    """erfc of a nonnegative dd value; relative error below 2^-85.

    Series for x <= 2 (mild cancellation), Lentz continued fraction beyond.
    Valid while the result stays in the normal double range (x <~ 26); past
    that exp(-x^2) underflows and the result degrades to 0, which the
    sampler-table constructor reports through its usable() flag.
    """
    if ah == 0.0 and al == 0.0:
        return 1.0, 0.0
    x2h: cython.double
    x2l: cython.double
    x2h, x2l = dd_sqr(ah, al)
    sh: cython.double
    sl: cython.double
    ph: cython.double
    pl: cython.double
    th: cython.double
    tl: cython.double
    n: cython.int
    if ah <= 2.0:
        # erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        sh, sl = ah, al
        ph, pl = ah, al
        for n in range(1, 80):
            ph, pl = dd_mul(ph, pl, x2h, x2l)
            ph, pl = dd_div_d(ph, pl, n)
            th, tl = dd_div_d(ph, pl, 2 * n + 1)
            if n & 1:
                sh, sl = dd_sub(sh, sl, th, tl)
            else:
                sh, sl = dd_add(sh, sl, th, tl)
            if fabs(th) < _DD_EPS:
                break
        sh, sl = dd_mul(sh, sl, 2.0, 0.0)
        sh, sl = dd_div(sh, sl, SQRT_PI_HI, SQRT_PI_LO)
        return dd_sub(1.0, 0.0, sh, sl)
    # modified Lentz on  sqrt(pi) e^{x^2} erfc(x) = 1/(x + (1/2)/(x + 1/(x + ...)))
    fh: cython.double = ah
    fl: cython.double = al
    ch: cython.double = ah
    cl: cython.double = al
    dh: cython.double = 0.0
    dl: cython.double = 0.0
    for n in range(1, 500):
        an: cython.double = 0.5 * n
        # D = 1 / (b + a*D)
        th, tl = dd_mul_d(dh, dl, an)
        th, tl = dd_add(th, tl, ah, al)
        dh, dl = dd_div(1.0, 0.0, th, tl)
        # C = b + a / C
        th, tl = dd_div(an, 0.0, ch, cl)
        ch, cl = dd_add(ah, al, th, tl)
        th, tl = dd_mul(ch, cl, dh, dl)
        fh, fl = dd_mul(fh, fl, th, tl)
        if fabs(th - 1.0) < _DD_EPS and fabs(tl) < _DD_EPS:
            break
    eh: cython.double
    el: cython.double
    eh, el = dd_exp(-x2h, -x2l)
    th, tl = dd_mul(SQRT_PI_HI, SQRT_PI_LO, fh, fl)
    return dd_div(eh, el, th, tl)


# ---------------------------------------------------------------------------
# deterministic RNG
# ---------------------------------------------------------------------------

@cython.cclass
class Xoshiro256StarStar:
    """xoshiro256** with explicit 256-bit state; identical in both backends."""

    s0: cython.ulonglong
    s1: cython.ulonglong
    s2: cython.ulonglong
    s3: cython.ulonglong

    def __init__(self, s0: int, s1: int, s2: int, s3: int):
        if (s0 | s1 | s2 | s3) == 0:
            s0 = 0x9E3779B97F4A7C15  # all-zero state is invalid
        self.s0 = s0 & MASK64
        self.s1 = s1 & MASK64
        self.s2 = s2 & MASK64
        self.s3 = s3 & MASK64

    @cython.cfunc
    @cython.inline
    def _next(self) -> cython.ulonglong:
        s0: cython.ulonglong = self.s0
        s1: cython.ulonglong = self.s1
        s2: cython.ulonglong = self.s2
        s3: cython.ulonglong = self.s3
        x: cython.ulonglong = (s1 * 5) & MASK64
        result: cython.ulonglong = ((((x << 7) & MASK64) | (x >> 57)) * 9) & MASK64
        t: cython.ulonglong = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) & MASK64) | (s3 >> 19)
        self.s0 = s0
        self.s1 = s1
        self.s2 = s2
        self.s3 = s3
        return result

    def next_u64(self) -> int:
        return self._next()

    def getstate(self) -> tuple:
        return (self.s0, self.s1, self.s2, self.s3)


@cython.cfunc
@cython.inline
def _uniform_dd(rng: Xoshiro256StarStar) -> tuple[cython.double, cython.double]:
    """Uniform dd in [0,1) from exactly two 64-bit draws (106 random bits)."""
    a: cython.ulonglong = rng._next() >> 11
    b: cython.ulonglong = rng._next() >> 11
    hi: cython.double = cython.cast(cython.double, a) * _P53
    lo: cython.double = cython.cast(cython.double, b) * _P106
    return _quick_two_sum(hi, lo)


def uniform_dd(rng: Xoshiro256StarStar) -> tuple:
    return _uniform_dd(rng)


def uniform_below(rng: Xoshiro256StarStar, bound: int) -> int:
    """Exact uniform integer in [0, bound) by rejection on bit blocks."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    bits = bound.bit_length()
    words = (bits + 63) // 64
    shift = words * 64 - bits
    while True:
        v = 0
        for _ in range(words):
            v = (v << 64) | rng.next_u64()
        v >>= shift
        if v < bound:
            return v


# ---------------------------------------------------------------------------
# Gaussian samplers
# ---------------------------------------------------------------------------

@cython.cfunc
def _polar_normal(rng: Xoshiro256StarStar) -> tuple[cython.double, cython.double]:
    """One standard normal (dd) by the polar transform; partner value unused."""
    uh: cython.double
    ul: cython.double
    vh: cython.double
    vl: cython.double
    s_h: cython.double
    s_l: cython.double
    th: cython.double
    tl: cython.double
    while True:
        uh, ul = _uniform_dd(rng)
        uh, ul = dd_add(uh + uh, ul + ul, -1.0, 0.0)
        vh, vl = _uniform_dd(rng)
        vh, vl = dd_add(vh + vh, vl + vl, -1.0, 0.0)
        s_h, s_l = dd_sqr(uh, ul)
        th, tl = dd_sqr(vh, vl)
        s_h, s_l = dd_add(s_h, s_l, th, tl)
        if s_h >= 1.0 or s_h <= 0.0:
            continue
        th, tl = dd_log(s_h, s_l)
        th, tl = dd_div(-th - th, -tl - tl, s_h, s_l)
        th, tl = dd_sqrt(th, tl)
        return dd_mul(uh, ul, th, tl)


@cython.cfunc
def _truncated_std_normal(rng: Xoshiro256StarStar, a_h: cython.double, a_l: cython.double) -> tuple[cython.double, cython.double]:
    """Standard normal conditioned on z >= a (a >= 0): rejection for small a,
    Marsaglia tail sampling otherwise."""
    zh: cython.double
    zl: cython.double
    u1h: cython.double
    u1l: cython.double
    u2h: cython.double
    u2l: cython.double
    th: cython.double
    tl: cython.double
    if a_h < 0.66:
        while True:
            zh, zl = _polar_normal(rng)
            if not dd_lt(zh, zl, a_h, a_l):
                return zh, zl
    a2h: cython.double
    a2l: cython.double
    a2h, a2l = dd_sqr(a_h, a_l)
    while True:
        u1h, u1l = _uniform_dd(rng)
        if u1h <= 0.0:
            continue
        th, tl = dd_log(u1h, u1l)
        zh, zl = dd_sub(a2h, a2l, th + th, tl + tl)
        zh, zl = dd_sqrt(zh, zl)
        u2h, u2l = _uniform_dd(rng)
        th, tl = dd_mul(u2h, u2l, zh, zl)
        if not dd_lt(a_h, a_l, th, tl):
            return zh, zl


@cython.cfunc
def _gauss_d1(rng: Xoshiro256StarStar) -> tuple[cython.double, cython.double]:
    """Sample from the width-1 Gaussian (density prop. to exp(-pi x^2))."""
    zh: cython.double
    zl: cython.double
    zh, zl = _polar_normal(rng)
    return dd_mul(zh, zl, INV_SQRT_2PI_HI, INV_SQRT_2PI_LO)


def gauss_d1(rng: Xoshiro256StarStar) -> tuple:
    return _gauss_d1(rng)


def gauss_d1_fill(rng: Xoshiro256StarStar, out_hi: cython.double[:], out_lo: cython.double[:], n: cython.longlong) -> None:
    i: cython.longlong
    h: cython.double
    lo: cython.double
    for i in range(n):
        h, lo = _gauss_d1(rng)
        out_hi[i] = h
        out_lo[i] = lo


@cython.cclass
class Dgs1dTable:
    """Precomputed per-(c, r) data for the exact sampler on Z + c.

    c must lie in [0, 1).  All fields are dd pairs in natural units; the
    branch thresholds t1 < t2 < t3 partition [0,1) into the four cases of the
    rejection loop (atom c, atom c-1, right tail, left tail).
    """

    c_h: cython.double
    c_l: cython.double
    sigma_h: cython.double
    sigma_l: cython.double
    w_h: cython.double      # pi / r^2
    w_l: cython.double
    t1_h: cython.double
    t1_l: cython.double
    t2_h: cython.double
    t2_l: cython.double
    t3_h: cython.double
    t3_l: cython.double
    ar_h: cython.double     # c / sigma
    ar_l: cython.double
    al_h: cython.double     # (1-c) / sigma
    al_l: cython.double
    cm1_h: cython.double    # c - 1 as a proper dd value
    cm1_l: cython.double
    ok: cython.bint

    def __init__(self, c_h: float, c_l: float, r_h: float, r_l: float):
        if not 0.0 <= c_h < 1.0 or r_h <= 0.0:
            raise ValueError("need 0 <= c < 1 and r > 0")
        r2h: cython.double
        r2l: cython.double
        r2h, r2l = dd_sqr(r_h, r_l)
        self.c_h, self.c_l = c_h, c_l
        self.w_h, self.w_l = dd_div(PI_HI, PI_LO, r2h, r2l)
        self.sigma_h, self.sigma_l = dd_mul(r_h, r_l, INV_SQRT_2PI_HI, INV_SQRT_2PI_LO)
        # atoms rho(c), rho(c-1)
        th: cython.double
        tl: cython.double
        th, tl = dd_sqr(c_h, c_l)
        th, tl = dd_mul(th, tl, self.w_h, self.w_l)
        pc_h: cython.double
        pc_l: cython.double
        pc_h, pc_l = dd_exp(-th, -tl)
        cm_h: cython.double
        cm_l: cython.double
        cm_h, cm_l = dd_sub(1.0, 0.0, c_h, c_l)   # 1 - c = |c - 1|
        self.cm1_h, self.cm1_l = dd_add(c_h, c_l, -1.0, 0.0)
        th, tl = dd_sqr(cm_h, cm_l)
        th, tl = dd_mul(th, tl, self.w_h, self.w_l)
        pm_h: cython.double
        pm_l: cython.double
        pm_h, pm_l = dd_exp(-th, -tl)
        # tail integrals Z0 = (r/2) erfc(sqrt(pi) c / r), Z1 mirrored
        sp_r_h: cython.double
        sp_r_l: cython.double
        sp_r_h, sp_r_l = dd_div(SQRT_PI_HI, SQRT_PI_LO, r_h, r_l)
        th, tl = dd_mul(sp_r_h, sp_r_l, c_h, c_l)
        z0_h: cython.double
        z0_l: cython.double
        z0_h, z0_l = dd_erfc(th, tl)
        z0_h, z0_l = dd_mul(z0_h, z0_l, 0.5 * r_h, 0.5 * r_l)
        th, tl = dd_mul(sp_r_h, sp_r_l, cm_h, cm_l)
        z1_h: cython.double
        z1_l: cython.double
        z1_h, z1_l = dd_erfc(th, tl)
        z1_h, z1_l = dd_mul(z1_h, z1_l, 0.5 * r_h, 0.5 * r_l)
        zh: cython.double
        zl: cython.double
        zh, zl = dd_add(z0_h, z0_l, z1_h, z1_l)
        zh, zl = dd_add(zh, zl, pc_h, pc_l)
        zh, zl = dd_add(zh, zl, pm_h, pm_l)
        self.ok = zh > 0.0
        if not self.ok:
            return
        self.t1_h, self.t1_l = dd_div(pc_h, pc_l, zh, zl)
        th, tl = dd_add(pc_h, pc_l, pm_h, pm_l)
        self.t2_h, self.t2_l = dd_div(th, tl, zh, zl)
        th, tl = dd_add(th, tl, z0_h, z0_l)
        self.t3_h, self.t3_l = dd_div(th, tl, zh, zl)
        self.ar_h, self.ar_l = dd_div(c_h, c_l, self.sigma_h, self.sigma_l)
        self.al_h, self.al_l = dd_div(cm_h, cm_l, self.sigma_h, self.sigma_l)

    def usable(self) -> bool:
        return self.ok

    @cython.cfunc
    def _draw(self, rng: Xoshiro256StarStar) -> tuple[cython.longlong, cython.longlong]:
        """One draw from D_{Z+c,r}; returns (offset j with y = c + j, iterations)."""
        iters: cython.longlong = 0
        uh: cython.double
        ul: cython.double
        zh: cython.double
        zl: cython.double
        xh: cython.double
        xl: cython.double
        yh: cython.double
        yl: cython.double
        sh: cython.double
        sl: cython.double
        th: cython.double
        tl: cython.double
        k: cython.double
        off: cython.longlong
        while True:
            iters += 1
            uh, ul = _uniform_dd(rng)
            if dd_lt(uh, ul, self.t1_h, self.t1_l):
                return 0, iters
            if dd_lt(uh, ul, self.t2_h, self.t2_l):
                return -1, iters
            if dd_lt(uh, ul, self.t3_h, self.t3_l):
                # right tail: x = sigma z >= c, y = c + k
                zh, zl = _truncated_std_normal(rng, self.ar_h, self.ar_l)
                xh, xl = dd_mul(self.sigma_h, self.sigma_l, zh, zl)
                th, tl = dd_sub(xh, xl, self.c_h, self.c_l)
                k = dd_floor(th, tl) + 1.0
                yh, yl = dd_add(self.c_h, self.c_l, k, 0.0)
                off = cython.cast(cython.longlong, k)
            else:
                # left tail: x = -sigma z <= c - 1, y = c - 1 - j
                zh, zl = _truncated_std_normal(rng, self.al_h, self.al_l)
                xh, xl = dd_mul(-self.sigma_h, -self.sigma_l, zh, zl)
                th, tl = dd_sub(self.cm1_h, self.cm1_l, xh, xl)
                k = dd_floor(th, tl) + 1.0
                yh, yl = dd_add(self.cm1_h, self.cm1_l, -k, 0.0)
                off = -1 - cython.cast(cython.longlong, k)
            # accept with rho_r(y)/rho_r(x) = exp(-w (y-x)(y+x))
            sh, sl = dd_sub(yh, yl, xh, xl)
            th, tl = dd_add(yh, yl, xh, xl)
            sh, sl = dd_mul(sh, sl, th, tl)
            sh, sl = dd_mul(sh, sl, self.w_h, self.w_l)
            sh, sl = dd_exp(-sh, -sl)
            uh, ul = _uniform_dd(rng)
            if dd_lt(uh, ul, sh, sl):
                return off, iters

    def draw(self, rng: Xoshiro256StarStar) -> tuple:
        if not self.ok:
            raise ValueError("sampler table unusable: total mass underflowed")
        return self._draw(rng)

    def fill(self, rng: Xoshiro256StarStar, out: cython.longlong[:], n: cython.longlong) -> int:
        """Fill out[:n] with offsets; returns the total iteration count."""
        if not self.ok:
            raise ValueError("sampler table unusable: total mass underflowed")
        total: cython.longlong = 0
        i: cython.longlong
        off: cython.longlong
        iters: cython.longlong
        for i in range(n):
            off, iters = self._draw(rng)
            out[i] = off
            total += iters
        return total


# ---------------------------------------------------------------------------
# theta series  rho_r(Z + c)
# ---------------------------------------------------------------------------

@cython.cfunc
def _theta_direct(c_h: cython.double, c_l: cython.double, r_h: cython.double, r_l: cython.double, bits: cython.int) -> tuple[cython.double, cython.double]:
    wh: cython.double
    wl: cython.double
    wh, wl = dd_sqr(r_h, r_l)
    wh, wl = dd_div(PI_HI, PI_LO, wh, wl)
    radius: cython.double = r_h * sqrt((bits + 4) * 0.6931471805599453 / 3.141592653589793) + 1.0
    lo_j: cython.longlong = cython.cast(cython.longlong, floor(-c_h - radius))
    hi_j: cython.longlong = cython.cast(cython.longlong, floor(radius - c_h)) + 1
    sh: cython.double = 0.0
    sl: cython.double = 0.0
    j: cython.longlong
    th: cython.double
    tl: cython.double
    for j in range(lo_j, hi_j + 1):
        th, tl = dd_add(c_h, c_l, cython.cast(cython.double, j), 0.0)
        th, tl = dd_sqr(th, tl)
        th, tl = dd_mul(th, tl, wh, wl)
        th, tl = dd_exp(-th, -tl)
        sh, sl = dd_add(sh, sl, th, tl)
    return sh, sl


@cython.cfunc
def _theta_poisson(c_h: cython.double, c_l: cython.double, r_h: cython.double, r_l: cython.double, bits: cython.int) -> tuple[cython.double, cython.double]:
    r2h: cython.double
    r2l: cython.double
    r2h, r2l = dd_sqr(r_h, r_l)
    kmax: cython.longlong = cython.cast(cython.longlong, floor(sqrt((bits + 4) * 0.6931471805599453 / 3.141592653589793) / r_h)) + 1
    sh: cython.double = 1.0
    sl: cython.double = 0.0
    k: cython.longlong
    th: cython.double
    tl: cython.double
    eh: cython.double
    el: cython.double
    snh: cython.double
    snl: cython.double
    cnh: cython.double
    cnl: cython.double
    for k in range(1, kmax + 1):
        kk: cython.double = cython.cast(cython.double, k)
        th, tl = dd_mul_d(r2h, r2l, kk * kk)
        th, tl = dd_mul(th, tl, PI_HI, PI_LO)
        eh, el = dd_exp(-th, -tl)
        th, tl = dd_mul_d(c_h, c_l, kk)
        th, tl = dd_mul(th, tl, TWO_PI_HI, TWO_PI_LO)
        snh, snl, cnh, cnl = dd_sincos(th, tl)
        th, tl = dd_mul(eh, el, cnh, cnl)
        sh, sl = dd_add(sh, sl, th + th, tl + tl)
    return dd_mul(r_h, r_l, sh, sl)


def theta_direct(c_h: float, c_l: float, r_h: float, r_l: float, bits: int) -> tuple:
    """rho_r(Z+c) by direct summation; 2^-bits relative accuracy (bits <= 96)."""
    return _theta_direct(c_h, c_l, r_h, r_l, bits)


def theta_poisson(c_h: float, c_l: float, r_h: float, r_l: float, bits: int) -> tuple:
    """rho_r(Z+c) via Poisson summation: r * sum exp(-pi k^2 r^2) cos(2 pi c k)."""
    return _theta_poisson(c_h, c_l, r_h, r_l, bits)


def theta(c_h: float, c_l: float, r_h: float, r_l: float, bits: int) -> tuple:
    """Branch per width: direct sum below r=1, Poisson at and above."""
    if r_h < 1.0:
        return _theta_direct(c_h, c_l, r_h, r_l, bits)
    return _theta_poisson(c_h, c_l, r_h, r_l, bits)


# dd helpers exposed for the Python layers ----------------------------------

def add_dd(ah, al, bh, bl):
    return dd_add(ah, al, bh, bl)


def sub_dd(ah, al, bh, bl):
    return dd_sub(ah, al, bh, bl)


def mul_dd(ah, al, bh, bl):
    return dd_mul(ah, al, bh, bl)


def div_dd(ah, al, bh, bl):
    return dd_div(ah, al, bh, bl)


def sqrt_dd(ah, al):
    return dd_sqrt(ah, al)


def exp_dd(ah, al):
    return dd_exp(ah, al)


def log_dd(ah, al):
    return dd_log(ah, al)


def erfc_dd(ah, al):
    return dd_erfc(ah, al)


def sincos_dd(ah, al):
    return dd_sincos(ah, al)
