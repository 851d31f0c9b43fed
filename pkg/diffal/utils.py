import hashlib
from pathlib import Path
from typing import Iterable

import numpy as np

def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based random stream for ``(seed, *key)``.

    The stream is a Philox generator keyed by a ``SeedSequence`` whose spawn
    key is ``key``, so ``rng_stream(s, STREAM, i)`` is the same no matter how
    many other streams were drawn before it or in which order.

    Args:
        seed: Master seed
        *key: Stream identifiers, e.g. (stream id, entry index)

    Returns:
        np.random.Generator: A fresh generator at the start of the stream
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))

def derive_seed(seed: int, *key: int) -> int:
    """A 63-bit integer seed derived from ``(seed, *key)``, e.g. for torch."""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))

def top_b(indices: Iterable[int], scores: Iterable[float], b: int) -> list[int]:
    """Select the ``b`` highest-scoring indices, ties going to the lower index.

    Args:
        indices: Pool indices
        scores: One score per index
        b: How many to select

    Returns:
        list[int]: Selected indices, best first
    """
    indices = np.asarray(list(indices), dtype=np.int64)
    scores = np.asarray(list(scores), dtype=np.float64)
    order = np.lexsort((indices, -scores))
    return [int(i) for i in indices[order[:b]]]

def deep_merge(base: dict, overrides: dict) -> dict:
    """Recursively merge ``overrides`` into a copy of ``base``."""
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged

def fingerprint(paths: Iterable[str | Path]) -> str:
    """SHA-256 over the concatenated contents of ``paths``."""
    digest = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as f:
            for chunk in iter(lambda: f.read(1 << 20), b""):
                digest.update(chunk)
    return digest.hexdigest()
