"""Stable seed derivation.

``hash()`` is salted per process, so sub-seeds are derived with SHA-256 over
a canonical encoding. Identical inputs give identical seeds on every
platform and in every worker, which is what makes parallel and serial
dataset builds agree.
"""

from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1


def derive_seed(master: int, *parts: object) -> int:
    """Derive a 64-bit sub-seed from a master seed and a label path."""
    text = repr((int(master) & MASK64, *(str(p) for p in parts)))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
