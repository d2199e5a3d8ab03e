"""Composable reduction pipelines.

A pipeline is an ordered list of stages, each a named transformation with
parameters; composition validates that adjacent interfaces chain (dimension,
modulus, sample budget) before anything runs, and accumulates the advantage
budget: with per-stage guarantees adv_in >= (adv_out - a_i)/m_i the composite
satisfies adv_in >= (adv_out - A)/M for M = prod m_i and A folded backwards.

Stage kinds:
  normal_form       s=<width> eps=<slack>
  first_errorless   [m_out=<count>]
  modswitch         gadget=identity q_prime=<q'> | gadget=tradeoff k=<k>
                    r=<width> B=<secret bound> eps=<slack> [delta=<bound fail>]
  binary_chain      n_out=<dim> m_out=<count> eps=<slack> delta=<lhl slack>

The binary_chain stage is the composed route to a binary secret: lift to
first-is-errorless, re-randomize into an extended-LWE challenge with a
binary hint vector, extend to m_out secrets by hybrid embedding (real
inputs land at the all-real end, decoys one step below), then map into the
binary-secret form.  Probabilistic aborts propagate as outcomes, never as
exceptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .backend import core
from .errors import ChainingError, ConfigError
from .lwedist import LweParams, NoiseSpec, SampleBatch
from .reductions import (
    ReductionReport,
    binlwe_from_extlwe,
    extlwe_reduce,
    first_errorless_reduce,
    gadget_basis,
    identity_gadget,
    ln_ln_budget,
    mod_dim_switch,
    multi_secret_extend,
    normal_form_reduce,
    prime_factors,
)
from .rng import SeedStream

STAGE_KINDS = ("normal_form", "first_errorless", "modswitch", "binary_chain")


@dataclass(frozen=True)
class StageSpec:
    kind: str
    params: dict
    line: Optional[int] = None

    def get(self, key, default=None):
        return self.params.get(key, default)


@dataclass
class PipelineBudget:
    additive: float
    mult_factor: float
    per_stage: list[ReductionReport]
    formula: str

    def lines(self) -> list[str]:
        out = [r.budget_line() for r in self.per_stage]
        out.append(f"composite: adv_in >= (adv_out - {self.additive:.6g}) / {self.mult_factor:.6g}")
        out.append(f"composite formula: {self.formula}")
        return out


@dataclass
class PipelineResult:
    ok: bool
    batch: Optional[SampleBatch]
    aborted_at: Optional[int]
    reports: list[ReductionReport]


def _noise_alpha(params: LweParams) -> float:
    return params.noise.alpha if params.noise.alpha is not None else 0.0


def _shape_after(stage: StageSpec, idx: int, p: LweParams) -> tuple[LweParams, ReductionReport]:
    """Static interface propagation; raises ChainingError on mismatch."""
    kind = stage.kind
    if kind == "normal_form":
        s = float(stage.get("s", 0.0))
        eps = float(stage.get("eps", 2.0**-20))
        if p.q < 25:
            raise ChainingError(f"stage {idx} (normal_form): q={p.q} < 25")
        budget = ln_ln_budget(p.n, p.q, 16, 4)
        if p.m <= budget:
            raise ChainingError(f"stage {idx} (normal_form): m={p.m} <= sample budget {budget}")
        smin = math.sqrt(math.log(2 * p.n * (1 + 1 / eps)) / math.pi) / p.q
        if s < smin * (1 - 1e-12):
            raise ChainingError(f"stage {idx} (normal_form): s={s} below bound {smin:.6g}")
        out = LweParams(p.n, p.m - budget, p.q, p.noise, p.F)
        rep = ReductionReport("normal-form", _desc(p), _desc(out), 8 * eps, 4.0,
                              p.noise.describe())
        return out, rep
    if kind == "first_errorless":
        m_out = int(stage.get("m_out", p.m + 1))
        if m_out - 1 > p.m:
            raise ChainingError(f"stage {idx} (first_errorless): m_out={m_out} needs {m_out - 1} inputs > {p.m}")
        out = LweParams(p.n + 1, m_out, p.q, p.noise, p.F)
        loss = sum(pf ** (-(p.n + 1)) for pf in prime_factors(p.q))
        rep = ReductionReport("first-errorless", _desc(p), _desc(out), loss, 1.0,
                              p.noise.describe())
        return out, rep
    if kind == "modswitch":
        eps = float(stage.get("eps", 2.0**-20))
        delta = float(stage.get("delta", 0.0))
        r = float(stage.get("r", 0.0))
        bb = float(stage.get("B", 0.0))
        gadget = stage.get("gadget", "identity")
        if gadget == "identity":
            qp = int(stage.get("q_prime", p.q))
            gp_n, gs_norm = p.n, 1.0 / qp
        elif gadget == "tradeoff":
            k = int(stage.get("k", 1))
            if k < 1 or p.n % k != 0:
                raise ChainingError(f"stage {idx} (modswitch): k={k} does not divide n={p.n}")
            qp = p.q ** k
            gp_n, gs_norm = p.n // k, 1.0 / p.q
        else:
            raise ChainingError(f"stage {idx} (modswitch): unknown gadget {gadget!r}")
        need = max(1.0 / p.q, gs_norm) * math.sqrt(2 * math.log(2 * p.n * (1 + 1 / eps)) / math.pi)
        if r < need * (1 - 1e-12):
            raise ChainingError(f"stage {idx} (modswitch): r={r} below bound {need:.6g}")
        alpha = _noise_alpha(p)
        beta = math.sqrt(alpha * alpha + 2 * (r * bb) ** 2)
        out = LweParams(gp_n, p.m, qp,
                        NoiseSpec.unknown_bounded(beta) if beta > 0 else NoiseSpec.zero(), p.F)
        rep = ReductionReport("mod-dim-switch", _desc(p), _desc(out),
                              delta + 14 * eps * p.m, 1.0, f"<= {beta:.6g}")
        return out, rep
    if kind == "binary_chain":
        eps = float(stage.get("eps", 2.0**-20))
        delta = float(stage.get("delta", 0.25))
        n_out = int(stage.get("n_out", 0))
        m_out = int(stage.get("m_out", 0))
        if n_out < 1 or m_out < 1:
            raise ChainingError(f"stage {idx} (binary_chain): n_out and m_out are required")
        if p.m < n_out - 1:
            raise ChainingError(f"stage {idx} (binary_chain): needs {n_out - 1} input samples, have {p.m}")
        need = (p.n + 1) * math.log2(p.q) + 2 * math.log2(1 / delta)
        if n_out < need - 1e-9:
            raise ChainingError(f"stage {idx} (binary_chain): n_out={n_out} below {need:.4g}")
        alpha = _noise_alpha(p)
        bound = math.sqrt(math.log(2 * n_out * (1 + 1 / eps)) / math.pi) / p.q
        if alpha < bound * (1 - 1e-12):
            raise ChainingError(f"stage {idx} (binary_chain): alpha={alpha} below bound {bound:.6g}")
        beta = math.sqrt(5.0) * alpha
        out_alpha = math.sqrt(2 * n_out) * beta
        out = LweParams(n_out, m_out, p.q, NoiseSpec.unknown_bounded(out_alpha), p.F)
        prime_sum = sum(pf ** (-(p.n + 1)) for pf in prime_factors(p.q))
        # composite accounting for the whole chain in one stage
        additive = delta + 4 * m_out * eps + m_out * (33 * eps / 2 + prime_sum)
        rep = ReductionReport(
            "binary-chain", _desc(p), _desc(out), additive, 3.0 * m_out,
            f"<= sqrt(2 n) beta = {out_alpha:.6g}",
            notes=(f"adv_in >= (adv_out - {delta:.4g})/(3*{m_out}) - 41*{eps:.3g}/2 "
                   f"- sum_p p^-(k+1) = {prime_sum:.4g}"),
        )
        return out, rep
    raise ChainingError(f"stage {idx}: unknown kind {kind!r}")


def _desc(p: LweParams) -> str:
    return f"LWE(n={p.n}, m={p.m}, q={p.q}, {p.noise.describe()})"


def compose_pipeline(stages: list[StageSpec], in_params: LweParams):
    """Validate chaining and return (runner, PipelineBudget).

    The runner maps (batch, SeedStream) -> PipelineResult.  An empty stage
    list is the identity with zero budget.
    """
    p = in_params
    reports: list[ReductionReport] = []
    for idx, st in enumerate(stages):
        if st.kind not in STAGE_KINDS:
            raise ChainingError(f"stage {idx}: unknown kind {st.kind!r}")
        p, rep = _shape_after(st, idx, p)
        reports.append(rep)
    # fold backwards: A_total = sum_i a_i * prod_{j>i} m_j, M_total = prod m_i
    mult = 1.0
    additive = 0.0
    for rep in reversed(reports):
        additive = rep.additive_loss * mult + additive
        mult *= rep.mult_factor
    formula = f"adv_in >= (adv_out - {additive:.6g}) / {mult:.6g}"
    budget = PipelineBudget(additive, mult, reports, formula)

    def runner(batch: SampleBatch, stream: SeedStream) -> PipelineResult:
        return run_pipeline(stages, batch, stream)

    return runner, budget


def run_pipeline(stages: list[StageSpec], batch: SampleBatch,
                 stream: SeedStream) -> PipelineResult:
    reports: list[ReductionReport] = []
    cur = batch
    for idx, st in enumerate(stages):
        sub = stream.child("stage", idx)
        out = _run_stage(st, idx, cur, sub)
        if out is None:
            return PipelineResult(False, None, idx, reports)
        cur, rep = out
        reports.append(rep)
    return PipelineResult(True, cur, None, reports)


def _run_stage(st: StageSpec, idx: int, batch: SampleBatch, stream: SeedStream):
    if st.kind == "normal_form":
        return normal_form_reduce(batch, float(st.get("s")), float(st.get("eps", 2.0**-20)), stream)
    if st.kind == "first_errorless":
        m_out = st.get("m_out")
        return first_errorless_reduce(batch, stream, int(m_out) if m_out is not None else None)
    if st.kind == "modswitch":
        gadget = st.get("gadget", "identity")
        if gadget == "identity":
            gp = identity_gadget(batch.params.n, int(st.get("q_prime", batch.params.q)))
        else:
            gp = gadget_basis(batch.params.n, int(st.get("k", 1)), batch.params.q)
        return mod_dim_switch(batch, gp, float(st.get("r")), float(st.get("B", 0.0)),
                              float(st.get("eps", 2.0**-20)), stream,
                              delta=float(st.get("delta", 0.0)))
    if st.kind == "binary_chain":
        return run_binary_chain(batch, int(st.get("n_out")), int(st.get("m_out")),
                                float(st.get("eps", 2.0**-20)),
                                float(st.get("delta", 0.25)), stream)
    raise ChainingError(f"stage {idx}: unknown kind {st.kind!r}")


def run_binary_chain(batch: SampleBatch, n_out: int, m_out: int, eps: float,
                     delta: float, stream: SeedStream):
    """first-errorless -> extLWE -> multi-secret -> binary secret.

    Consumes n_out - 1 input samples; real inputs produce the all-real
    extended challenge (embedding index t), decoys its adjacent hybrid.
    Returns None when the first-errorless lift aborts.
    """
    p = batch.params
    alpha = _noise_alpha(p)
    lifted = first_errorless_reduce(batch, stream.child("fe"), m_out=n_out)
    if lifted is None:
        return None
    fe_batch, rep_fe = lifted
    zrng = stream.child("zvec").rng()
    z = [core.uniform_below(zrng, 2) for _ in range(n_out)]
    # r = alpha gives the extended noise width sqrt(xi^2 + 1) alpha = sqrt(5) alpha
    bound = math.sqrt(math.log(2 * n_out * (1 + 1 / eps)) / math.pi) / p.q
    r_param = max(alpha, bound)
    red, rep_ext = extlwe_reduce(fe_batch, z, r_param, eps, stream.child("ext"))
    ch = red.challenge
    ms, rep_ms = multi_secret_extend(ch, m_out, m_out, stream.child("ms"))
    out, rep_bin = binlwe_from_extlwe(ms, z, None, stream.child("bin"))
    prime_sum = rep_fe.additive_loss
    additive = delta + 4 * m_out * eps + m_out * (rep_ext.additive_loss + prime_sum)
    rep = ReductionReport(
        "binary-chain", _desc(p), _desc(out.params), additive, 3.0 * m_out,
        rep_bin.noise_out,
        notes=(f"composite: adv_in >= (adv_out - {delta:.4g})/(3*{m_out}) - 41*{eps:.3g}/2 "
               f"- {prime_sum:.4g}"),
    )
    return out, rep


# ---------------------------------------------------------------------------
# pipeline configuration documents
# ---------------------------------------------------------------------------

_INT_KEYS = {"m_out", "q_prime", "k", "n_out"}
_FLOAT_KEYS = {"s", "eps", "delta", "r", "B"}
_STR_KEYS = {"gadget"}


def _parse_value(key: str, raw: str, line_no: int):
    if key in _STR_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            if "^" in raw:
                base, _, expo = raw.partition("^")
                return float(base) ** float(expo)
            return float(raw)
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r}", line=line_no, field=key)
    raise ConfigError(f"unknown parameter {key!r}", line=line_no, field=key)


def parse_pipeline_config(text: str) -> list[StageSpec]:
    """Line-oriented stage list: `stage <kind> key=value ...`, # comments."""
    stages: list[StageSpec] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if toks[0] != "stage":
            raise ConfigError(f"expected 'stage', found {toks[0]!r}", line=line_no)
        if len(toks) < 2:
            raise ConfigError("missing stage kind", line=line_no)
        kind = toks[1]
        if kind not in STAGE_KINDS:
            raise ConfigError(f"unknown stage kind {kind!r}", line=line_no, field="kind")
        params = {}
        for tok in toks[2:]:
            if "=" not in tok:
                raise ConfigError(f"expected key=value, found {tok!r}", line=line_no)
            key, _, raw_val = tok.partition("=")
            params[key] = _parse_value(key, raw_val, line_no)
        stages.append(StageSpec(kind, params, line=line_no))
    return stages
