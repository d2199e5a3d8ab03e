"""Deterministic seed derivation.

Every randomized operation in the package draws from a Xoshiro256StarStar
stream (see `lwekit._core`) whose 256-bit state is derived from a 64-bit root
seed and a derivation path via keyed BLAKE2b.  Distinct paths give
independent streams; the same (root, path) always gives the same stream, so
changing what one pipeline stage or trial does never perturbs the randomness
seen by its siblings.
"""

from __future__ import annotations

import hashlib
import struct

from .backend import core


class SeedStream:
    """A node in the seed-derivation tree."""

    __slots__ = ("root", "path")

    def __init__(self, root: int, path: tuple = ()):
        if not 0 <= root < 2**64:
            raise ValueError("root seed must be a 64-bit unsigned integer")
        self.root = root
        self.path = path

    def child(self, *parts) -> "SeedStream":
        """Derive a sub-stream; parts may be ints or short strings."""
        return SeedStream(self.root, self.path + tuple(parts))

    def _digest(self) -> bytes:
        h = hashlib.blake2b(key=struct.pack("<Q", self.root), digest_size=32)
        for p in self.path:
            if isinstance(p, int):
                h.update(b"i" + p.to_bytes(16, "little", signed=True))
            else:
                enc = str(p).encode()
                h.update(b"s" + len(enc).to_bytes(4, "little") + enc)
        return h.digest()

    def rng(self):
        """Fresh Xoshiro256StarStar seeded from this node."""
        d = self._digest()
        words = struct.unpack("<4Q", d)
        return core.Xoshiro256StarStar(*words)

    def numpy_rng(self):
        """Deterministic numpy Generator for measurement-path statistics."""
        import numpy as np

        return np.random.default_rng(int.from_bytes(self._digest()[:16], "little"))

    def __repr__(self):
        return f"SeedStream(root={self.root}, path={self.path!r})"
