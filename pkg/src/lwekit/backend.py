"""Backend selection and dd-value helpers.

`lwekit._core` is a single source that exists in two forms: a compiled
extension (built by setup.py) and the very same file running under the plain
interpreter.  Importing ``lwekit._core`` picks the extension when present;
`load_pure_core()` force-loads the interpreted form under a separate module
name so both can be compared side by side (see `lwekit.bench`).

Set ``LWEKIT_BACKEND=pure`` to make the whole package run on the interpreted
core (the results are bit-identical, only slower).
"""

from __future__ import annotations

import importlib.util
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import _core as _compiled_or_pure_core


def load_pure_core():
    """Load the interpreted form of the core under the name lwekit._core_pure."""
    name = "lwekit._core_pure"
    if name in sys.modules:
        return sys.modules[name]
    path = Path(__file__).with_name("_core.py")
    spec = importlib.util.spec_from_file_location(name, path)
    mod = importlib.util.module_from_spec(spec)
    sys.modules[name] = mod
    spec.loader.exec_module(mod)
    return mod


if os.environ.get("LWEKIT_BACKEND", "").lower() == "pure":
    core = load_pure_core()
else:
    core = _compiled_or_pure_core


def backend_name() -> str:
    """'compiled' when the Cython extension is active, else 'pure'."""
    return "compiled" if core.compiled() else "pure"


# -- dd conversion helpers ---------------------------------------------------
#
# A dd value is a pair of doubles (hi, lo) representing hi + lo exactly.

def dd_from_fraction(num: int, den: int) -> tuple[float, float]:
    """Correctly rounded dd value of num/den (arbitrary precision inputs)."""
    if den <= 0:
        raise ValueError("denominator must be positive")
    hi = num / den if abs(num) < (1 << 53) and den < (1 << 53) else float(Fraction(num, den))
    rem = Fraction(num, den) - Fraction(hi)
    lo = float(rem)
    return hi, lo


def dd_to_fraction(hi: float, lo: float) -> Fraction:
    return Fraction(hi) + Fraction(lo)


def dd_float(dd: tuple[float, float]) -> float:
    return dd[0] + dd[1]
