"""Probability of leaving after the N-th contribution, split by whether
that contribution was followed by a toxic comment, with a power-law fit
P_N ~ N^(-alpha) on the log-log scale.

"Leaving" needs an observation guard: a user counts as gone only when
their last contribution is at least ``censor_days`` before the dataset
end; a user whose history ends closer to the cutoff is right-censored at
their final contribution (kept in denominators for every earlier N,
resolved neither way at their last)."""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError, PowerLawFitError
from .util import DAY_SECONDS

MAX_N = 100
COHORTS = ("toxic_followed", "other", "all")


@dataclass(frozen=True)
class LabeledContribution:
    user: str
    index: int                # 1-based rank in the user's history
    timestamp: int
    followed_by_toxic: bool
    is_last: bool


@dataclass
class LeaveCurve:
    cohort: str
    exactly: np.ndarray       # leavers resolved at N; index = N, [0] unused
    at_least: np.ndarray      # users resolved at N (at risk)
    probabilities: list       # P_N or None where undefined
    alpha: float | None = None
    c: float | None = None
    ci_low: np.ndarray | None = None
    ci_high: np.ndarray | None = None


def label_contributions(log, toxic_times) -> list:
    """Mark, for each toxic comment, the closest contribution strictly
    preceding it. A toxic comment at exactly a contribution's instant
    labels nothing (a comment cannot respond to a simultaneous edit);
    several toxic comments may label the same contribution once."""
    ts = list(log.timestamps)
    followed = [False] * len(ts)
    for tox in toxic_times:
        pos = bisect.bisect_left(ts, int(tox)) - 1
        if pos >= 0:
            followed[pos] = True
    n = len(ts)
    return [
        LabeledContribution(user=log.user, index=i + 1, timestamp=int(t),
                            followed_by_toxic=followed[i], is_last=(i == n - 1))
        for i, t in enumerate(ts)
    ]


def _user_cells(contribs, censor_cutoff):
    """Yield (N, followed_by_toxic, left) for each resolvable contribution.

    The N-th contribution resolves as "stayed" when more followed, as
    "left" when it is the last and early enough to trust, and not at all
    when it is the last but right-censored.
    """
    n = contribs[-1].index
    censored = contribs[-1].timestamp > censor_cutoff
    for lc in contribs:
        if lc.index > MAX_N:
            break
        if lc.index < n:
            yield lc.index, lc.followed_by_toxic, False
        elif not censored:
            yield lc.index, lc.followed_by_toxic, True


def leave_curve(labeled_by_user, cohort: str, censor_days: int,
                dataset_end: int) -> LeaveCurve:
    """Estimate P_N = (users leaving at N) / (users at risk at N) for
    N in [1, 100] within one cohort ("toxic_followed", "other", or "all")."""
    if cohort not in COHORTS:
        raise ValueError(f"unknown cohort {cohort!r}")
    if censor_days < 0:
        raise ValueError("censor_days must be >= 0")
    cutoff = dataset_end - censor_days * DAY_SECONDS
    exactly = np.zeros(MAX_N + 1, dtype=np.int64)
    at_least = np.zeros(MAX_N + 1, dtype=np.int64)
    for contribs in labeled_by_user.values():
        if not contribs:
            continue
        for n_index, followed, left in _user_cells(contribs, cutoff):
            if cohort == "toxic_followed" and not followed:
                continue
            if cohort == "other" and followed:
                continue
            at_least[n_index] += 1
            if left:
                exactly[n_index] += 1
    probabilities = [None] * (MAX_N + 1)
    for n_index in range(1, MAX_N + 1):
        if at_least[n_index] > 0:
            probabilities[n_index] = exactly[n_index] / at_least[n_index]
    return LeaveCurve(cohort=cohort, exactly=exactly, at_least=at_least,
                      probabilities=probabilities)


def fit_power_law(curve: LeaveCurve):
    """Ordinary least squares of log P_N on log N over the defined,
    positive bins; returns (alpha, c) with P_N ~ c * N^(-alpha)."""
    points = [(n, p) for n, p in enumerate(curve.probabilities)
              if n >= 1 and p is not None and p > 0]
    if len(points) < 3:
        raise PowerLawFitError(
            f"power-law fit needs >= 3 positive points, got {len(points)}")
    ns = np.log([n for n, _ in points])
    ps = np.log([p for _, p in points])
    slope, intercept = np.polyfit(ns, ps, 1)
    return float(-slope), float(np.exp(intercept))


@dataclass
class SignificanceReport:
    ci_toxic_low: np.ndarray
    ci_toxic_high: np.ndarray
    ci_other_low: np.ndarray
    ci_other_high: np.ndarray
    disjoint_n: list


def _per_user_counts(labeled_by_user, cutoff):
    """Per-user (num, den) count rows for both cohorts, for resampling."""
    users = sorted(u for u, contribs in labeled_by_user.items() if contribs)
    num_t = np.zeros((len(users), MAX_N), dtype=np.int8)
    den_t = np.zeros_like(num_t)
    num_o = np.zeros_like(num_t)
    den_o = np.zeros_like(num_t)
    for row, user in enumerate(users):
        for n_index, followed, left in _user_cells(labeled_by_user[user], cutoff):
            den, num = (den_t, num_t) if followed else (den_o, num_o)
            den[row, n_index - 1] += 1
            if left:
                num[row, n_index - 1] += 1
    return num_t, den_t, num_o, den_o


def curve_significance(labeled_by_user, dataset_end: int, censor_days: int,
                       rng, n_boot: int = 1000) -> SignificanceReport:
    """Per-N 95% bootstrap confidence intervals for both cohorts' P_N
    (resampling users with replacement) and the list of N where the two
    intervals are disjoint."""
    if not labeled_by_user:
        raise EstimationError("no users to resample")
    cutoff = dataset_end - censor_days * DAY_SECONDS
    num_t, den_t, num_o, den_o = _per_user_counts(labeled_by_user, cutoff)
    n_users = num_t.shape[0]
    boots_t = np.full((n_boot, MAX_N), np.nan)
    boots_o = np.full((n_boot, MAX_N), np.nan)
    chunk = 256
    uniform = np.full(n_users, 1.0 / n_users)
    for start in range(0, n_boot, chunk):
        size = min(chunk, n_boot - start)
        weights = rng.multinomial(n_users, uniform, size=size).astype(np.float64)
        for nums, dens, out in ((num_t, den_t, boots_t), (num_o, den_o, boots_o)):
            den_sum = weights @ dens
            num_sum = weights @ nums
            with np.errstate(invalid="ignore", divide="ignore"):
                out[start:start + size] = np.where(den_sum > 0, num_sum / den_sum, np.nan)

    def interval(boots):
        low = np.full(MAX_N, np.nan)
        high = np.full(MAX_N, np.nan)
        defined = np.sum(~np.isnan(boots), axis=0)
        for i in range(MAX_N):
            if defined[i] >= max(20, n_boot // 2):
                low[i], high[i] = np.nanpercentile(boots[:, i], [2.5, 97.5])
        return low, high

    t_low, t_high = interval(boots_t)
    o_low, o_high = interval(boots_o)
    disjoint = [
        i + 1 for i in range(MAX_N)
        if not np.isnan(t_low[i]) and not np.isnan(o_low[i])
        and (t_low[i] > o_high[i] or o_low[i] > t_high[i])
    ]
    return SignificanceReport(ci_toxic_low=t_low, ci_toxic_high=t_high,
                              ci_other_low=o_low, ci_other_high=o_high,
                              disjoint_n=disjoint)
