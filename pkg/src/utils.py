"""
utils.py
Shared utility functions used across multiple modules.
No project-local imports.
"""

import numpy as np


# ── Random streams ────────────────────────────────────────────────────────────

# Named sub-streams of the master seed. Ids are part of the output contract:
# changing one changes every generated circuit / GA run for that stream.
STREAMS = {
    "circuit-gen": 1,
    "ga": 2,
    "matrix": 3,
    "phasepoly": 4,
}


def rng_stream(seed: int, name: str, *indices: int) -> np.random.Generator:
    """Independent deterministic generator for (seed, stream name, indices)."""
    if name not in STREAMS:
        raise ValueError(f"unknown random stream: {name!r} (known: {sorted(STREAMS)})")
    if seed < 0 or any(i < 0 for i in indices):
        raise ValueError(f"seed and indices must be non-negative: {seed}, {indices}")
    return np.random.default_rng(np.random.SeedSequence([seed, STREAMS[name], *indices]))


def derive_seed(seed: int, name: str, *indices: int) -> int:
    """Plain integer seed drawn from a named stream (for APIs that take an int)."""
    return int(rng_stream(seed, name, *indices).integers(2**31 - 1))


# ── Parsing helpers ───────────────────────────────────────────────────────────

def parse_counts(text: str) -> list[int]:
    """Parse "3,5,10" into [3, 5, 10]. Whitespace tolerated, order kept."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("gate count list is empty")
    counts = []
    for p in parts:
        try:
            v = int(p)
        except ValueError:
            raise ValueError(f"not an integer gate count: {p!r}") from None
        if v < 0:
            raise ValueError(f"gate count must be >= 0: {v}")
        counts.append(v)
    return counts


# ── Numeric helper ────────────────────────────────────────────────────────────

def overhead_percent(mean_output: float, input_count: int) -> float:
    """100·(output − input)/input; an empty input reports 0."""
    if input_count == 0:
        return 0.0
    return 100.0 * (mean_output - input_count) / input_count
