"""Small shared helpers: UTC timestamps, hashing, seeded substreams."""

from __future__ import annotations

import hashlib
from datetime import datetime, timezone

import numpy as np

DAY_SECONDS = 86_400


def parse_timestamp(value) -> int:
    """Convert an ISO-8601 string or a numeric epoch value to epoch seconds."""
    if isinstance(value, (int, float)):
        return int(value)
    s = value.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def format_timestamp(epoch: int) -> str:
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def utf8_len(text: str) -> int:
    return len(text.encode("utf-8"))


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def substream(seed, *names) -> np.random.Generator:
    """Derive a named, reproducible RNG substream from one top-level seed.

    Parallel and serial execution see identical draws because every task
    derives its generator from (seed, names) rather than sharing one stream.
    """
    key = tuple(
        int.from_bytes(hashlib.sha256(repr(n).encode("utf-8")).digest()[:4], "big")
        for n in names
    )
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))
