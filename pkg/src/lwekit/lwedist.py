"""Generators for the sample distributions the transformations act on.

A_{q,s,phi} produces pairs (a, b = <a,s> + e) with a uniform in T_q^n and e
drawn from the noise law phi; batches of m samples are stored columnar with
exact integer numerators for the T_q parts and F-bit fixed-point fractions
for continuous torus values.  Samples whose b value lies on the T_q grid
(zero-noise samples, errorless first samples, extended-LWE responses) carry
the exact grid numerator alongside the F-bit rendering.

Every generator takes a SeedStream and is fully deterministic given its
parameters and seed.  "Transparent" batches additionally retain the secret
and per-sample noise so that the verification harness can recheck the
reductions' algebra exactly; transparent data is stripped when a batch is
serialized in opaque mode.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .backend import core
from .errors import HintSetError, ParameterError
from .gaussian import sample_dgauss_1d_offset
from .rng import SeedStream
from .torus import DEFAULT_F, TorusElem, TorusQElem, fp_from_dd, fp_round


@dataclass(frozen=True)
class NoiseSpec:
    """Noise law: gaussian(alpha) is the continuous D_alpha; zero is the
    deterministic 0; unknown_bounded(alpha) records only the bound, the
    realized width is chosen per batch."""

    kind: str
    alpha: Optional[float] = None

    _KINDS = ("gaussian", "zero", "unknown_bounded")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ParameterError(f"unknown noise kind {self.kind!r}")
        if self.kind == "zero":
            if self.alpha is not None:
                raise ParameterError("zero noise takes no width")
        elif self.alpha is None or not self.alpha > 0:
            raise ParameterError("noise width must be positive")

    @classmethod
    def gaussian(cls, alpha: float) -> "NoiseSpec":
        return cls("gaussian", float(alpha))

    @classmethod
    def zero(cls) -> "NoiseSpec":
        return cls("zero")

    @classmethod
    def unknown_bounded(cls, alpha: float) -> "NoiseSpec":
        return cls("unknown_bounded", float(alpha))

    def describe(self) -> str:
        return self.kind if self.kind == "zero" else f"{self.kind}:{self.alpha!r}"

    @classmethod
    def parse(cls, text: str) -> "NoiseSpec":
        if text == "zero":
            return cls.zero()
        kind, _, val = text.partition(":")
        try:
            return cls(kind, float(val))
        except ValueError as exc:
            raise ParameterError(f"bad noise descriptor {text!r}") from exc


@dataclass(frozen=True)
class SecretSpec:
    """Secret law: uniform_mod_q, binary, or discrete_gaussian(r) over Z^n."""

    kind: str
    r: Optional[float] = None

    _KINDS = ("uniform_mod_q", "binary", "discrete_gaussian")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ParameterError(f"unknown secret kind {self.kind!r}")
        if self.kind == "discrete_gaussian" and (self.r is None or not self.r > 0):
            raise ParameterError("discrete_gaussian secrets need a positive width")

    def describe(self) -> str:
        return self.kind if self.r is None else f"{self.kind}:{self.r!r}"

    @classmethod
    def parse(cls, text: str) -> "SecretSpec":
        kind, _, val = text.partition(":")
        return cls(kind, float(val)) if val else cls(kind)


@dataclass(frozen=True)
class Secret:
    s: tuple[int, ...]
    spec: SecretSpec

    def __len__(self):
        return len(self.s)


@dataclass(frozen=True)
class LweParams:
    n: int
    m: int
    q: int
    noise: NoiseSpec
    F: int = DEFAULT_F

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.q < 1:
            raise ParameterError("n, m, q must all be >= 1")
        if self.F < 1:
            raise ParameterError("F must be >= 1")


@dataclass(frozen=True)
class LweSample:
    """One sample viewed through the exact value types."""

    a: tuple[TorusQElem, ...]
    b: TorusElem | TorusQElem


@dataclass
class TransparentData:
    secret: Optional[Secret] = None
    noise_fp: Optional[list[int]] = None     # continuous noise mod 1, F-bit
    noise_grid: Optional[list[int]] = None   # unreduced numerators of grid noise
    realized_alpha: Optional[float] = None   # the beta actually used, if unknown_bounded


@dataclass
class SampleBatch:
    params: LweParams
    a_num: list[list[int]]
    b_fp: list[int]
    b_grid: list[Optional[int]]
    provenance: str = ""
    transparent: Optional[TransparentData] = None

    def __post_init__(self):
        if len(self.a_num) != self.params.m or len(self.b_fp) != self.params.m:
            raise ParameterError("batch length disagrees with m")

    @property
    def m(self) -> int:
        return self.params.m

    def sample(self, i: int) -> LweSample:
        p = self.params
        a = tuple(TorusQElem(x, p.q) for x in self.a_num[i])
        if self.b_grid[i] is not None:
            return LweSample(a, TorusQElem(self.b_grid[i], p.q))
        return LweSample(a, TorusElem(self.b_fp[i], p.F))

    def b_fraction(self, i: int) -> Fraction:
        if self.b_grid[i] is not None:
            return Fraction(self.b_grid[i], self.params.q)
        return Fraction(self.b_fp[i], 1 << self.params.F)

    def opaque(self) -> "SampleBatch":
        return replace(self, transparent=None)


def grid_fp(num: int, q: int, F: int) -> int:
    """F-bit rendering of num/q; exact when q divides 2^F."""
    num %= q
    if (1 << F) % q == 0:
        return num * ((1 << F) // q)
    return fp_round(num, q, F)


def _alpha_dd(alpha: float) -> tuple[float, float]:
    return (float(alpha), 0.0)


def _draw_noise_fp(alpha: float, F: int, rng) -> int:
    """F-bit fraction of one continuous D_alpha draw, reduced mod 1."""
    xh, xl = core.gauss_d1(rng)
    ah, al = _alpha_dd(alpha)
    eh, el = core.mul_dd(ah, al, xh, xl)
    return fp_from_dd(eh, el, F)


def gen_secret(spec: SecretSpec, n: int, q: int, stream: SeedStream) -> Secret:
    """Draw a secret of length n from the named law."""
    rng = stream.child("secret").rng()
    if spec.kind == "binary":
        s = tuple(core.uniform_below(rng, 2) for _ in range(n))
    elif spec.kind == "uniform_mod_q":
        s = tuple(core.uniform_below(rng, q) for _ in range(n))
    else:
        s = tuple(sample_dgauss_1d_offset(0.0, spec.r, rng)[0] for _ in range(n))
    return Secret(s, spec)


def _inner_num(a_row: list[int], s: tuple[int, ...], q: int) -> int:
    return sum(x * y for x, y in zip(a_row, s)) % q


def _realized_width(noise: NoiseSpec, beta: Optional[float]) -> Optional[float]:
    if noise.kind == "unknown_bounded":
        if beta is None:
            raise ParameterError("unknown_bounded noise needs a realized beta")
        if beta > noise.alpha:
            raise ParameterError("realized beta exceeds the bound alpha")
        return beta
    if noise.kind == "gaussian":
        return noise.alpha
    return None


def _gen_batch(params: LweParams, secret: Secret, stream: SeedStream,
               width: Optional[float], errorless_first: bool,
               transparent: bool) -> SampleBatch:
    p = params
    if len(secret) != p.n:
        raise ParameterError("secret length disagrees with n")
    s = tuple(x % p.q for x in secret.s)
    rng = stream.child("lwe").rng()
    a_num: list[list[int]] = []
    b_fp: list[int] = []
    b_grid: list[Optional[int]] = []
    noise_fp: list[int] = []
    for i in range(p.m):
        row = [core.uniform_below(rng, p.q) for _ in range(p.n)]
        ip = _inner_num(row, s, p.q)
        a_num.append(row)
        if width is None or (errorless_first and i == 0):
            b_grid.append(ip)
            b_fp.append(grid_fp(ip, p.q, p.F))
            noise_fp.append(0)
        else:
            e_fp = _draw_noise_fp(width, p.F, rng)
            noise_fp.append(e_fp)
            b_grid.append(None)
            b_fp.append((grid_fp(ip, p.q, p.F) + e_fp) % (1 << p.F))
    tr = TransparentData(secret=secret, noise_fp=noise_fp, realized_alpha=width) if transparent else None
    return SampleBatch(p, a_num, b_fp, b_grid, provenance="lwe", transparent=tr)


def gen_lwe_batch(params: LweParams, secret: Secret, stream: SeedStream,
                  beta: Optional[float] = None, transparent: bool = True) -> SampleBatch:
    """m samples from A_{q,s,phi}; depends on the secret only mod q."""
    width = _realized_width(params.noise, beta)
    return _gen_batch(params, secret, stream, width, False, transparent)


def gen_uniform_batch(params: LweParams, stream: SeedStream,
                      first_on_grid: bool = False) -> SampleBatch:
    """m independent uniform pairs on T_q^n x T (optionally T_q for sample 1)."""
    p = params
    rng = stream.child("uniform").rng()
    a_num: list[list[int]] = []
    b_fp: list[int] = []
    b_grid: list[Optional[int]] = []
    for i in range(p.m):
        a_num.append([core.uniform_below(rng, p.q) for _ in range(p.n)])
        if i == 0 and first_on_grid:
            g = core.uniform_below(rng, p.q)
            b_grid.append(g)
            b_fp.append(grid_fp(g, p.q, p.F))
        else:
            b_grid.append(None)
            b_fp.append(core.uniform_below(rng, 1 << p.F))
    return SampleBatch(p, a_num, b_fp, b_grid, provenance="uniform")


def gen_first_errorless_batch(params: LweParams, secret: Secret,
                              stream: SeedStream, beta: Optional[float] = None,
                              transparent: bool = True) -> SampleBatch:
    """Sample 1 from A_{q,s,{0}} with b on the T_q grid; the rest standard.

    Shares the draw protocol of gen_lwe_batch, so with zero noise the two
    generators produce byte-identical batches from the same seed.
    """
    width = _realized_width(params.noise, beta)
    out = _gen_batch(params, secret, stream, width, True, transparent)
    return replace(out, provenance="first-errorless")


def gen_first_errorless_uniform(params: LweParams, stream: SeedStream) -> SampleBatch:
    """Uniform counterpart: sample 1 uniform on T_q^n x T_q, rest on T_q^n x T."""
    out = gen_uniform_batch(params, stream, first_on_grid=True)
    return replace(out, provenance="first-errorless-uniform")


# ---------------------------------------------------------------------------
# extended LWE
# ---------------------------------------------------------------------------

@dataclass
class ExtLweChallenge:
    """Challenge tuple (A, (b_i), (<e_i, z>)) with exact rational bookkeeping.

    A has n rows and m columns over T_q (columns are the per-sample vectors);
    responses are t vectors in T_q^m; hints are exact numerators over q,
    unreduced (the hint value is hints_num[i]/q as a real number).
    """

    n: int
    m: int
    q: int
    alpha: float
    t: int
    z: tuple[int, ...]
    A_num: list[list[int]]               # n x m
    responses_num: list[list[int]]       # t x m
    hints_num: list[int]                 # t
    real_case: bool
    secrets: Optional[list[tuple[int, ...]]] = None   # transparent
    noise_num: Optional[list[list[int]]] = None       # transparent, unreduced

    def hint_value(self, i: int) -> Fraction:
        return Fraction(self.hints_num[i], self.q)


def check_hint_vector(z, m: int, hint_set: str = "binary") -> tuple[int, ...]:
    z = tuple(int(x) for x in z)
    if len(z) != m:
        raise HintSetError(f"hint vector has length {len(z)}, expected {m}")
    if hint_set == "binary":
        if any(x not in (0, 1) for x in z):
            raise HintSetError("hint vector outside the configured set {0,1}^m")
    elif hint_set == "zero":
        if any(x != 0 for x in z):
            raise HintSetError("hint vector outside the configured set {0^m}")
    else:
        raise HintSetError(f"unknown hint set {hint_set!r}")
    return z


def gen_extlwe_challenge(n: int, m: int, q: int, chi: NoiseSpec, z,
                         t: int, real_case: bool, stream: SeedStream,
                         hint_set: str = "binary",
                         transparent: bool = True,
                         real_upto: Optional[int] = None) -> ExtLweChallenge:
    """Extended-LWE challenge with noise D_{q^-1 Z^m, alpha} per response.

    In the real case the responses are A^T s_i + e_i with fresh uniform
    secrets; in the decoy case they are uniform on T_q^m.  Hints are the
    exact inner products <e_i, z> either way.  When real_upto is given,
    responses 1..real_upto are real and the rest uniform (the hybrid laws);
    each index draws from its own sub-stream, so flipping one index's case
    never perturbs the others.
    """
    if chi.kind != "gaussian":
        raise ParameterError("extended-LWE noise must be a (discrete) gaussian spec")
    z = check_hint_vector(z, m, hint_set)
    alpha = chi.alpha
    arng = stream.child("A").rng()
    A = [[core.uniform_below(arng, q) for _ in range(m)] for _ in range(n)]
    responses: list[list[int]] = []
    hints: list[int] = []
    secrets: list[tuple[int, ...]] = []
    noise: list[list[int]] = []
    for i in range(t):
        irng = stream.child("response", i).rng()
        e = [sample_dgauss_1d_offset(0.0, alpha * q, irng)[0] for _ in range(m)]
        s_i = tuple(core.uniform_below(irng, q) for _ in range(n))
        real_i = real_case if real_upto is None else i < real_upto
        if real_i:
            resp = [(sum(A[k][j] * s_i[k] for k in range(n)) + e[j]) % q for j in range(m)]
        else:
            resp = [core.uniform_below(irng, q) for _ in range(m)]
        responses.append(resp)
        hints.append(sum(zj * ej for zj, ej in zip(z, e)))
        secrets.append(s_i)
        noise.append(e)
    return ExtLweChallenge(
        n=n, m=m, q=q, alpha=alpha, t=t, z=z, A_num=A,
        responses_num=responses, hints_num=hints, real_case=real_case,
        secrets=secrets if transparent else None,
        noise_num=noise if transparent else None,
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _b_token(fp: int, grid: Optional[int], F: int) -> str:
    width = (F + 3) // 4
    tok = format(fp, f"0{width}x")
    if grid is not None:
        tok += f" g={grid}"
    return tok


def batch_to_text(batch: SampleBatch, opaque: bool = False) -> str:
    """Line format: header, optional transparent lines, one sample per line
    (n space-separated residue numerators, then the b value as an F-bit hex
    fraction, plus a g=<num> token when b lies exactly on the T_q grid)."""
    p = batch.params
    lines = [
        f"lwebatch v1 n={p.n} m={p.m} q={p.q} F={p.F} "
        f"noise={p.noise.describe()} provenance={batch.provenance or 'unknown'}"
    ]
    tr = None if opaque else batch.transparent
    if tr is not None:
        if tr.secret is not None:
            svals = " ".join(str(x) for x in tr.secret.s)
            lines.append(f"secret {tr.secret.spec.describe()} {svals}")
        if tr.realized_alpha is not None:
            lines.append(f"realized_alpha {tr.realized_alpha!r}")
        if tr.noise_fp is not None:
            width = (p.F + 3) // 4
            lines.append("noisefp " + " ".join(format(x, f"0{width}x") for x in tr.noise_fp))
        if tr.noise_grid is not None:
            lines.append("noisegrid " + " ".join(str(x) for x in tr.noise_grid))
    for i in range(p.m):
        row = " ".join(str(x) for x in batch.a_num[i])
        lines.append(f"{row} {_b_token(batch.b_fp[i], batch.b_grid[i], p.F)}")
    return "\n".join(lines) + "\n"


def write_batch(batch: SampleBatch, path, opaque: bool = False) -> None:
    with open(path, "w") as fh:
        fh.write(batch_to_text(batch, opaque))


def read_batch(path) -> SampleBatch:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or not lines[0].startswith("lwebatch v1 "):
        raise ParameterError("not a v1 batch file")
    fields = dict(tok.split("=", 1) for tok in lines[0].split()[2:])
    n, m, q, F = (int(fields[k]) for k in ("n", "m", "q", "F"))
    params = LweParams(n, m, q, NoiseSpec.parse(fields["noise"]), F)
    provenance = fields.get("provenance", "unknown")
    tr = TransparentData()
    has_tr = False
    idx = 1
    while idx < len(lines):
        head = lines[idx].split(" ", 1)[0]
        if head == "secret":
            _, spec_s, vals = lines[idx].split(" ", 2)
            tr.secret = Secret(tuple(int(x) for x in vals.split()), SecretSpec.parse(spec_s))
            has_tr = True
        elif head == "realized_alpha":
            tr.realized_alpha = float(lines[idx].split(" ", 1)[1])
            has_tr = True
        elif head == "noisefp":
            tr.noise_fp = [int(x, 16) for x in lines[idx].split()[1:]]
            has_tr = True
        elif head == "noisegrid":
            tr.noise_grid = [int(x) for x in lines[idx].split()[1:]]
            has_tr = True
        else:
            break
        idx += 1
    a_num, b_fp, b_grid = [], [], []
    for ln in lines[idx:]:
        if not ln.strip():
            continue
        toks = ln.split()
        if len(toks) < n + 1:
            raise ParameterError(f"sample line has {len(toks)} tokens, expected >= {n + 1}")
        a_num.append([int(x) for x in toks[:n]])
        b_fp.append(int(toks[n], 16))
        grid = None
        for extra in toks[n + 1:]:
            if extra.startswith("g="):
                grid = int(extra[2:])
        b_grid.append(grid)
    if len(a_num) != m:
        raise ParameterError(f"expected {m} samples, found {len(a_num)}")
    return SampleBatch(params, a_num, b_fp, b_grid, provenance=provenance,
                       transparent=tr if has_tr else None)
