"""Seed derivation: every random stream in a run comes from one master seed.

A component asks for a seed by label; the label is hashed together with the
master seed so that streams are independent, reproducible, and insensitive
to the order in which components start up.
"""

import hashlib


def derive_seed(master_seed: int, label: str) -> int:
    """Derive a 63-bit child seed for a named component stream."""
    digest = hashlib.sha256(f"{master_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1
