"""Command-line front end.

Subcommands:
  sample    generate a batch (LWE / uniform / first-errorless) to a file
  reduce    apply one named reduction stage to a batch file
  pipeline  run a staged pipeline from a config document
  verify    run a named verification suite and print its report

Every command requires --seed and is fully deterministic: identical
invocations produce byte-identical outputs.  Exit codes: 0 success/pass,
1 verification failure, 2 configuration error, 3 probabilistic abort.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from .errors import ChainingError, ConfigError, ParameterError
from .lwedist import (
    LweParams,
    NoiseSpec,
    SecretSpec,
    batch_to_text,
    gen_first_errorless_batch,
    gen_lwe_batch,
    gen_secret,
    gen_uniform_batch,
    read_batch,
)
from .pipeline import compose_pipeline, parse_pipeline_config, run_pipeline
from .rng import SeedStream
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3


def _write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".lwekit-tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lwekit",
                                 description="LWE sample transformations and verification")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, required=True, help="64-bit root seed")
        p.add_argument("--out", default=None, help="output path")
        p.add_argument("--format", choices=("csv", "text"), default="text")
        p.add_argument("--transparent", action="store_true",
                       help="retain secrets/noise in outputs for oracle checks")

    ps = sub.add_parser("sample", help="generate a sample batch")
    common(ps)
    ps.add_argument("--kind", choices=("lwe", "uniform", "first-errorless"), default="lwe")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--m", type=int, required=True)
    ps.add_argument("--q", type=int, required=True)
    ps.add_argument("--alpha", type=float, default=None, help="gaussian noise width")
    ps.add_argument("--noise", default=None, help="noise descriptor, e.g. gaussian:0.05 | zero")
    ps.add_argument("--secret", default="uniform_mod_q",
                    help="secret spec: uniform_mod_q | binary | discrete_gaussian:<r>")
    ps.add_argument("--fbits", type=int, default=64)

    pr = sub.add_parser("reduce", help="apply one reduction stage to a batch")
    common(pr)
    pr.add_argument("--in", dest="infile", required=True)
    pr.add_argument("--stage", required=True,
                    help="stage spec, e.g. 'modswitch gadget=identity q_prime=4 r=0.8 B=1 eps=2^-20'")

    pp = sub.add_parser("pipeline", help="run a staged pipeline from a config file")
    common(pp)
    pp.add_argument("--config", required=True)
    pp.add_argument("--in", dest="infile", required=True)
    pp.add_argument("--report", default=None, help="budget report path")

    pv = sub.add_parser("verify", help="run a verification suite")
    common(pv)
    pv.add_argument("suite", choices=SUITES)
    pv.add_argument("--fast", action="store_true", help="reduced trial counts (smoke run)")
    return ap


def _params_from_args(args) -> LweParams:
    if args.noise is not None:
        noise = NoiseSpec.parse(args.noise)
    elif args.alpha is not None:
        noise = NoiseSpec.gaussian(args.alpha)
    else:
        noise = NoiseSpec.zero()
    return LweParams(args.n, args.m, args.q, noise, args.fbits)


def cmd_sample(args) -> int:
    try:
        params = _params_from_args(args)
        spec = SecretSpec.parse(args.secret)
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    stream = SeedStream(args.seed).child("sample")
    if args.kind == "uniform":
        batch = gen_uniform_batch(params, stream)
    else:
        secret = gen_secret(spec, params.n, params.q, stream)
        gen = gen_first_errorless_batch if args.kind == "first-errorless" else gen_lwe_batch
        batch = gen(params, secret, stream)
    out = args.out or "batch.txt"
    _write_atomic(out, batch_to_text(batch, opaque=not args.transparent))
    print(f"wrote {params.m} samples to {out}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    try:
        stages = parse_pipeline_config("stage " + args.stage)
        batch = read_batch(args.infile)
        compose_pipeline(stages, batch.params)
    except (ConfigError, ChainingError, ParameterError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    res = run_pipeline(stages, batch, SeedStream(args.seed).child("reduce"))
    if not res.ok:
        print(f"abort at stage {res.aborted_at} (a counted probabilistic outcome)")
        return EXIT_ABORT
    out = args.out or "reduced.txt"
    _write_atomic(out, batch_to_text(res.batch, opaque=not args.transparent))
    for rep in res.reports:
        print(rep.budget_line())
    print(f"wrote {res.batch.params.m} samples to {out}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    try:
        with open(args.config) as fh:
            stages = parse_pipeline_config(fh.read())
        batch = read_batch(args.infile)
        _, budget = compose_pipeline(stages, batch.params)
    except (ConfigError, ChainingError, ParameterError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    res = run_pipeline(stages, batch, SeedStream(args.seed).child("pipeline"))
    report_lines = budget.lines()
    if args.report:
        _write_atomic(args.report, "\n".join(report_lines) + "\n")
    for line in report_lines:
        print(line)
    if not res.ok:
        print(f"abort at stage {res.aborted_at} (a counted probabilistic outcome)")
        return EXIT_ABORT
    out = args.out or "pipeline-out.txt"
    _write_atomic(out, batch_to_text(res.batch, opaque=not args.transparent))
    print(f"wrote {res.batch.params.m} samples to {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.seed, fast=args.fast)
    text = report.render_csv() if args.format == "csv" else report.render_text()
    if args.out:
        _write_atomic(args.out, text)
    print(text, end="")
    if not report.passed:
        fail = report.first_failure()
        print(f"first failing row: {fail.name}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        if args.command == "sample":
            return cmd_sample(args)
        if args.command == "reduce":
            return cmd_reduce(args)
        if args.command == "pipeline":
            return cmd_pipeline(args)
        if args.command == "verify":
            return cmd_verify(args)
    except (ConfigError, ParameterError, ChainingError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
