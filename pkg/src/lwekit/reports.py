"""Tabular verification reports.

One metric per row: name, claim checked, value, confidence radius, trial
count, seed, pass/fail.  Floating values are rendered to 12 significant
digits so a re-run from the embedded config reproduces the file exactly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional


def fmt12(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")


@dataclass
class Row:
    name: str
    claim: str
    value: object
    ci: Optional[float] = None
    trials: Optional[int] = None
    passed: bool = True
    detail: str = ""
    seconds: Optional[float] = None   # wall time; never rendered (reports stay reproducible)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    config: dict = field(default_factory=dict)
    rows: list[Row] = field(default_factory=list)

    def add(self, row: Row) -> Row:
        self.rows.append(row)
        return row

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def first_failure(self) -> Optional[Row]:
        return next((r for r in self.rows if not r.passed), None)

    def render_text(self) -> str:
        out = io.StringIO()
        out.write(f"suite {self.suite} seed={self.seed}\n")
        for k, v in sorted(self.config.items()):
            out.write(f"config {k}={fmt12(v)}\n")
        header = ("name", "claim", "value", "ci", "trials", "seed", "status")
        table = [header]
        for r in self.rows:
            table.append((r.name, r.claim, fmt12(r.value), fmt12(r.ci),
                          fmt12(r.trials), str(self.seed),
                          "pass" if r.passed else "FAIL"))
        widths = [max(len(row[i]) for row in table) for i in range(len(header))]
        for row in table:
            out.write("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() + "\n")
        for r in self.rows:
            if r.detail:
                out.write(f"# {r.name}: {r.detail}\n")
        out.write(f"result {'PASS' if self.passed else 'FAIL'}\n")
        return out.getvalue()

    def render_csv(self) -> str:
        out = io.StringIO()
        out.write("suite,seed,name,claim,value,ci,trials,status\n")
        for r in self.rows:
            out.write(",".join([
                self.suite, str(self.seed), r.name, r.claim, fmt12(r.value),
                fmt12(r.ci), fmt12(r.trials), "pass" if r.passed else "FAIL",
            ]) + "\n")
        return out.getvalue()
