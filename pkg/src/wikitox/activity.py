"""Binary active-day representations of per-user contribution timestamps.

Day buckets are 86,400-second periods anchored at the event of interest
(the user's first edit for full-history vectors, the comment instant for
centered windows), not calendar midnights. Buckets are half-open, so every
timestamp lands in exactly one bucket.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EstimationError
from .util import DAY_SECONDS

WINDOW_RADIUS = 100     # days on each side of the event
WINDOW_LEN = 2 * WINDOW_RADIUS + 1


@dataclass
class ContributionLog:
    """All edit timestamps of one user, strictly increasing, duplicates
    collapsed ("at least one contribution" semantics)."""

    user: str
    timestamps: np.ndarray  # int64 epoch seconds

    @classmethod
    def from_timestamps(cls, user: str, timestamps) -> "ContributionLog":
        ts = np.unique(np.asarray(list(timestamps), dtype=np.int64))
        return cls(user=user, timestamps=ts)

    def __len__(self):
        return len(self.timestamps)


@dataclass
class ActivityVector:
    user: str
    origin: int              # epoch seconds of the first contribution
    days: np.ndarray         # uint8, index 0 = the day starting at origin


@dataclass
class CenteredWindow:
    user: str
    center: int
    days: np.ndarray         # uint8, length 201, index 100 = day 0

    def bit(self, d: int) -> int:
        return int(self.days[d + WINDOW_RADIUS])

    def before_count(self) -> int:
        """Active days in d in [-100, -1]."""
        return int(self.days[:WINDOW_RADIUS].sum())

    def after_count(self, exclude_day_zero: bool = False) -> int:
        """Active days in d in [0, 99] (or [1, 100] when day 0 is left out)."""
        if exclude_day_zero:
            return int(self.days[WINDOW_RADIUS + 1:].sum())
        return int(self.days[WINDOW_RADIUS:2 * WINDOW_RADIUS].sum())


def to_active_days(log: ContributionLog) -> ActivityVector:
    """Collapse timestamps to a binary day sequence starting at the first
    contribution; day d covers [origin + (d-1)*86400, origin + d*86400)."""
    if len(log) == 0:
        raise EstimationError(f"user {log.user!r} has no contributions")
    origin = int(log.timestamps[0])
    indices = (log.timestamps - origin) // DAY_SECONDS
    days = np.zeros(int(indices[-1]) + 1, dtype=np.uint8)
    days[indices] = 1
    return ActivityVector(user=log.user, origin=origin, days=days)


def center_window(log: ContributionLog, center: int) -> CenteredWindow:
    """Binary activity in the 201 day-buckets around ``center``; bucket d
    covers [center + d*86400, center + (d+1)*86400). A log with no activity
    in range yields an all-zero window."""
    edges = center + np.arange(-WINDOW_RADIUS, WINDOW_RADIUS + 2, dtype=np.int64) * DAY_SECONDS
    positions = np.searchsorted(log.timestamps, edges, side="left")
    bits = (np.diff(positions) > 0).astype(np.uint8)
    return CenteredWindow(user=log.user, center=int(center), days=bits)


def mean_activity_profile(windows) -> np.ndarray:
    """Fraction of windows active on each day d in [-100, 100]."""
    stack = [w.days for w in windows]
    if not stack:
        raise EstimationError("cannot average an empty set of windows")
    return np.mean(np.stack(stack), axis=0)


def shuffled_profile(logs, rng) -> np.ndarray:
    """Null profile: each user's window is re-centered on an instant drawn
    uniformly at random within their own observation range. The real
    around-the-comment peak disappears under this shuffle."""
    windows = []
    for log in logs:
        if len(log) == 0:
            continue
        first, last = int(log.timestamps[0]), int(log.timestamps[-1])
        center = int(rng.integers(first, last + 1))
        windows.append(center_window(log, center))
    if not windows:
        raise EstimationError("no candidate centers: all logs empty")
    return mean_activity_profile(windows)


# --- compact bitset file for `activity --out vectors.bin` -------------------
#
# Layout: 8-byte magic "WTAVEC1\n", then per user:
#   u32 name length | name bytes (UTF-8) | i64 origin | u32 day count |
#   ceil(days/8) bytes of bits packed MSB-first.
# All integers little-endian.

_MAGIC = b"WTAVEC1\n"


def write_vectors(path, vectors) -> int:
    count = 0
    with open(path, "wb") as out:
        out.write(_MAGIC)
        for vec in vectors:
            name = vec.user.encode("utf-8")
            out.write(len(name).to_bytes(4, "little"))
            out.write(name)
            out.write(int(vec.origin).to_bytes(8, "little", signed=True))
            out.write(len(vec.days).to_bytes(4, "little"))
            out.write(np.packbits(vec.days).tobytes())
            count += 1
    return count


def read_vectors(path):
    with open(path, "rb") as handle:
        if handle.read(len(_MAGIC)) != _MAGIC:
            raise EstimationError(f"{path}: not an activity vector file")
        while True:
            header = handle.read(4)
            if not header:
                return
            name_len = int.from_bytes(header, "little")
            user = handle.read(name_len).decode("utf-8")
            origin = int.from_bytes(handle.read(8), "little", signed=True)
            n_days = int.from_bytes(handle.read(4), "little")
            packed = np.frombuffer(handle.read((n_days + 7) // 8), dtype=np.uint8)
            days = np.unpackbits(packed)[:n_days]
            yield ActivityVector(user=user, origin=origin, days=days)
