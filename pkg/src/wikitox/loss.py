"""Active-days lost to a toxic comment: matched-control difference in
differences with p-calibrated virtual-comment controls, Welch tests,
bootstrap confidence intervals, and robustness sweeps.

The estimate is Δ = (after − before) averaged over users who received a
toxic comment, minus the same quantity for a control cohort of users who
received only non-toxic comments, where the control cohort is subsampled
through virtual toxic events so its pre-event activity matches the toxic
cohort's.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sstats

from .activity import CenteredWindow, ContributionLog, center_window, mean_activity_profile, shuffled_profile
from .errors import CalibrationError, EmptyCohortError
from .toxicity import is_toxic
from .util import substream

DAYS_PER_YEAR = 365.25


@dataclass
class EventSample:
    user: str
    event_time: int
    kind: str                 # "toxic" | "control"
    window: CenteredWindow


@dataclass
class DeltaEstimate:
    delta: float
    p_value: float
    n_toxic: int
    n_control: int
    ci_low: float
    ci_high: float


@dataclass
class CalibrationResult:
    p: float
    target: float
    achieved: float
    evaluations: int
    samples: list            # control EventSample values selected at p


@dataclass
class LossAnalysis:
    """Everything one analysis run produces, ready for delta.json."""

    estimate: DeltaEstimate
    threshold: float
    min_active_days: int
    repetitions: int
    calibration: CalibrationResult
    n_recipients_toxic: int     # users with >=1 toxic comment, log or not
    n_excluded_no_toxic: int
    toxic_profile: np.ndarray
    control_profile: np.ndarray
    shuffled: np.ndarray | None = None
    per_rep_deltas: np.ndarray = field(default_factory=lambda: np.zeros(0))


def split_comment_times(scored, threshold: float):
    """Sorted toxic and non-toxic comment instants per recipient."""
    toxic: dict[str, list] = {}
    nontoxic: dict[str, list] = {}
    for sc in scored:
        bucket = toxic if is_toxic(sc.scores, threshold) else nontoxic
        bucket.setdefault(sc.comment.recipient, []).append(sc.comment.timestamp)
    return (
        {u: np.asarray(sorted(ts), dtype=np.int64) for u, ts in toxic.items()},
        {u: np.asarray(sorted(ts), dtype=np.int64) for u, ts in nontoxic.items()},
    )


def _score(window: CenteredWindow, exclude_day_zero: bool) -> int:
    return window.after_count(exclude_day_zero) - window.before_count()


def _eligible_toxic_users(logs, toxic_times):
    eligible = sorted(u for u in toxic_times if u in logs and len(toxic_times[u]))
    if not eligible:
        raise EmptyCohortError("empty toxic cohort: no user has a toxic comment")
    return eligible


def _pick_repetition(logs, toxic_times, eligible, rng):
    samples = []
    for user in eligible:
        choices = toxic_times[user]
        event = int(choices[rng.integers(len(choices))])
        samples.append(EventSample(
            user=user, event_time=event, kind="toxic",
            window=center_window(logs[user], event)))
    return samples


def pick_toxic_events(logs, scored, threshold: float, rng, repetitions: int = 100):
    """Per repetition, one uniformly random toxic comment per eligible user.

    Users without a toxic comment at this threshold are excluded and
    counted. Returns (samples_per_repetition, n_excluded).
    """
    toxic_times, _ = split_comment_times(scored, threshold)
    eligible = _eligible_toxic_users(logs, toxic_times)
    n_excluded = len(logs) - len(eligible)
    reps = [_pick_repetition(logs, toxic_times, eligible, rng)
            for _ in range(repetitions)]
    return reps, n_excluded


def virtual_toxic_events(log: ContributionLog, p: float, rng):
    """Spawn a virtual toxic comment after each contribution independently
    with probability p; return one spawned event time chosen uniformly at
    random, or None when nothing spawned (user then stays out of the
    control pool)."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p {p} outside (0, 1]")
    n = len(log)
    if n == 0:
        return None
    hits = np.flatnonzero(rng.random(n) < p)
    if hits.size == 0:
        return None
    return int(log.timestamps[hits[rng.integers(hits.size)]])


def calibrate_p(target: float, pool, tolerance: float, rng, *,
                min_pre_days: int = 0, p_lo: float = 1e-6, p_hi: float = 1.0,
                max_steps: int = 40, center_map=None) -> CalibrationResult:
    """Find p so that the control cohort's mean pre-window activity matches
    ``target`` within ``tolerance``, by bisection on p over [p_lo, p_hi].

    One fixed uniform draw per contribution is made up front and reused by
    every evaluation, which makes the objective a deterministic step
    function of p and keeps inclusion sets nested as p grows: a user enters
    the cohort at p = min(u) over their draws, and the event chosen among
    spawned ones is the argmin draw (uniform over contributions, exactly
    the virtual-event distribution).

    ``center_map(user, virtual_event_time)`` can translate the window
    center, e.g. onto the nearest non-toxic comment.
    """
    entry_p = []
    windows = []
    users = []
    for log in sorted(pool, key=lambda l: l.user):
        n = len(log)
        if n == 0:
            continue
        draws = rng.random(n)
        j = int(np.argmin(draws))
        center = int(log.timestamps[j])
        if center_map is not None:
            center = int(center_map(log.user, center))
        window = center_window(log, center)
        if window.before_count() < min_pre_days:
            continue
        entry_p.append(draws[j])
        windows.append(window)
        users.append(log.user)
    if not entry_p:
        raise EmptyCohortError("empty control pool after activity filtering")

    order = np.argsort(np.asarray(entry_p), kind="stable")
    entry_sorted = np.asarray(entry_p)[order]
    pre_sorted = np.asarray([w.before_count() for w in windows], dtype=np.float64)[order]
    prefix = np.cumsum(pre_sorted)

    def objective(p):
        k = int(np.searchsorted(entry_sorted, p, side="left"))
        if k == 0:
            return None
        return prefix[k - 1] / k

    f_hi = objective(p_hi)
    f_lo = objective(p_lo)
    # limit value as p approaches the first user's entry point from above
    lo_value = f_lo if f_lo is not None else float(pre_sorted[0])
    low, high = min(lo_value, f_hi), max(lo_value, f_hi)
    if not (low - tolerance <= target <= high + tolerance):
        raise CalibrationError(
            f"target {target:.3f} unreachable: objective spans "
            f"[{low:.3f}, {high:.3f}] for p in [{p_lo:g}, {p_hi:g}]")
    decreasing = lo_value > f_hi

    lo, hi = p_lo, p_hi
    evaluations = 0
    for _ in range(max_steps):
        mid = (lo + hi) / 2.0
        value = objective(mid)
        evaluations += 1
        effective = lo_value if value is None else value
        if value is not None and abs(value - target) <= tolerance:
            keep = np.searchsorted(entry_sorted, mid, side="left")
            chosen = order[:keep]
            samples = [
                EventSample(user=users[i], event_time=windows[i].center,
                            kind="control", window=windows[i])
                for i in sorted(chosen)
            ]
            return CalibrationResult(p=mid, target=target, achieved=value,
                                     evaluations=evaluations, samples=samples)
        if (effective > target) == decreasing:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"no p within tolerance {tolerance} of target {target:.3f} "
        f"after {evaluations} bisection steps")


def _welch_p(a: np.ndarray, b: np.ndarray) -> float:
    var_a = a.var(ddof=1) if a.size > 1 else 0.0
    var_b = b.var(ddof=1) if b.size > 1 else 0.0
    if var_a == 0.0 and var_b == 0.0:
        # zero-variance convention: identical means are maximally
        # unsurprising, different means maximally surprising
        return 1.0 if a.mean() == b.mean() else 0.0
    p = sstats.ttest_ind(a, b, equal_var=False).pvalue
    if np.isnan(p):
        return 1.0 if a.mean() == b.mean() else 0.0
    return float(p)


def delta(toxic, control, rng=None, *, n_boot: int = 1000,
          exclude_day_zero: bool = False) -> DeltaEstimate:
    """Difference in differences between the toxic and control cohorts.

    Per user: score = active days in the 100 days from the event minus
    active days in the 100 days before it. delta = mean toxic score minus
    mean control score; p-value from Welch's two-sample t-test; 95% CI from
    a percentile bootstrap resampling users within each group.
    """
    if not toxic or not control:
        raise EmptyCohortError("delta needs non-empty toxic and control cohorts")
    t = np.asarray([_score(s.window, exclude_day_zero) for s in toxic], dtype=np.float64)
    c = np.asarray([_score(s.window, exclude_day_zero) for s in control], dtype=np.float64)
    point = float(t.mean() - c.mean())
    p_value = _welch_p(t, c)
    if n_boot:
        if rng is None:
            raise ValueError("bootstrap requires an rng")
        boot = _bootstrap_deltas(t, c, rng, n_boot)
        ci_low, ci_high = np.percentile(boot, [2.5, 97.5])
    else:
        ci_low = ci_high = point
    return DeltaEstimate(delta=point, p_value=p_value, n_toxic=t.size,
                         n_control=c.size, ci_low=float(ci_low), ci_high=float(ci_high))


def _bootstrap_deltas(t: np.ndarray, c: np.ndarray, rng, n_boot: int) -> np.ndarray:
    idx_t = rng.integers(0, t.size, size=(n_boot, t.size))
    idx_c = rng.integers(0, c.size, size=(n_boot, c.size))
    return t[idx_t].mean(axis=1) - c[idx_c].mean(axis=1)


def estimate_activity_loss(scored, logs, *, threshold: float = 0.8, seed: int = 0,
                           repetitions: int = 100, n_boot: int = 1000,
                           tolerance: float = 0.1, min_active_days: int = 0,
                           center_on: str = "virtual_event",
                           exclude_toxic_recipients: bool = True,
                           exclude_day_zero: bool = False,
                           with_shuffled: bool = True,
                           max_calibration_steps: int = 40) -> LossAnalysis:
    """Full matched-control estimate for one (threshold, activity filter) cell.

    The toxic-comment pick is repeated ``repetitions`` times (each repetition
    on its own RNG substream); the control cohort is drawn once at the
    calibrated p. The reported delta is the mean of per-repetition deltas,
    the p-value is Welch's test on per-user scores averaged across
    repetitions, and the CI pools bootstrap resamples across repetitions.
    """
    if center_on not in ("virtual_event", "nearest_nontoxic_comment"):
        raise ValueError(f"unknown center_on mode {center_on!r}")
    toxic_times, nontoxic_times = split_comment_times(scored, threshold)
    n_recipients_toxic = len(toxic_times)
    key = ("loss", float(threshold), int(min_active_days))

    eligible = _eligible_toxic_users(logs, toxic_times)
    n_excluded = len(logs) - len(eligible)
    reps = []
    for r in range(repetitions):
        rng = substream(seed, *key, "pick", r)
        picked = _pick_repetition(logs, toxic_times, eligible, rng)
        reps.append([s for s in picked if s.window.before_count() >= min_active_days])
    all_toxic_windows = [s.window for rep in reps for s in rep]
    if not all_toxic_windows:
        raise EmptyCohortError(
            f"no toxic-cohort user has >= {min_active_days} pre-event active days")
    target = float(np.mean([w.before_count() for w in all_toxic_windows]))

    pool_users = sorted(
        u for u in nontoxic_times
        if u in logs and (not exclude_toxic_recipients or u not in toxic_times))
    if not pool_users:
        raise EmptyCohortError("empty control pool: no eligible non-toxic recipient")
    center_map = None
    if center_on == "nearest_nontoxic_comment":
        def center_map(user, virtual_time):
            times = nontoxic_times[user]
            pos = int(np.searchsorted(times, virtual_time))
            candidates = [i for i in (pos - 1, pos) if 0 <= i < len(times)]
            return int(min((abs(int(times[i]) - virtual_time), int(times[i]))
                           for i in candidates)[1])
    calibration = calibrate_p(
        target, [logs[u] for u in pool_users], tolerance,
        substream(seed, *key, "calibrate"),
        min_pre_days=min_active_days, max_steps=max_calibration_steps,
        center_map=center_map)
    control = calibration.samples
    assert abs(calibration.achieved - target) <= tolerance

    c_scores = np.asarray([_score(s.window, exclude_day_zero) for s in control],
                          dtype=np.float64)
    rep_scores = [np.asarray([_score(s.window, exclude_day_zero) for s in rep],
                             dtype=np.float64) for rep in reps if rep]
    deltas = np.asarray([t.mean() - c_scores.mean() for t in rep_scores])

    # Welch on per-user scores averaged across repetitions
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for rep in reps:
        for s in rep:
            sums[s.user] = sums.get(s.user, 0.0) + _score(s.window, exclude_day_zero)
            counts[s.user] = counts.get(s.user, 0) + 1
    averaged = np.asarray([sums[u] / counts[u] for u in sorted(sums)], dtype=np.float64)
    p_value = _welch_p(averaged, c_scores)

    boot_rng = substream(seed, *key, "boot")
    pooled = []
    for b in range(n_boot):
        t = rep_scores[b % len(rep_scores)]
        idx_t = boot_rng.integers(0, t.size, size=t.size)
        idx_c = boot_rng.integers(0, c_scores.size, size=c_scores.size)
        pooled.append(t[idx_t].mean() - c_scores[idx_c].mean())
    ci_low, ci_high = (np.percentile(pooled, [2.5, 97.5]) if pooled
                       else (deltas.mean(), deltas.mean()))

    estimate = DeltaEstimate(
        delta=float(deltas.mean()), p_value=p_value, n_toxic=len(averaged),
        n_control=len(control), ci_low=float(ci_low), ci_high=float(ci_high))

    shuffled = None
    if with_shuffled:
        toxic_logs = [logs[u] for u in sorted(sums)]
        shuffled = shuffled_profile(toxic_logs, substream(seed, *key, "shuffle"))

    return LossAnalysis(
        estimate=estimate, threshold=threshold, min_active_days=min_active_days,
        repetitions=repetitions, calibration=calibration,
        n_recipients_toxic=n_recipients_toxic, n_excluded_no_toxic=n_excluded,
        toxic_profile=mean_activity_profile(all_toxic_windows),
        control_profile=mean_activity_profile([s.window for s in control]),
        shuffled=shuffled, per_rep_deltas=deltas)


@dataclass
class SweepCell:
    threshold: float
    min_active_days: int
    result: LossAnalysis | None
    reason: str | None = None


def robustness_sweep(scored, logs, *, thresholds=None, activity_filters=None,
                     seed: int = 0, **estimate_kwargs) -> list:
    """One estimate per (toxicity threshold, minimum pre-event activity)
    cell; cells whose cohorts empty out or fail to calibrate are marked
    absent with the reason. The X = 0 column reproduces the unfiltered
    estimate exactly (same seed, same substreams)."""
    if thresholds is None:
        thresholds = [round(0.2 + 0.1 * i, 1) for i in range(8)]
    if activity_filters is None:
        activity_filters = range(0, 51)
    scored = list(scored)
    cells = []
    for threshold in thresholds:
        for x in activity_filters:
            try:
                result = estimate_activity_loss(
                    scored, logs, threshold=threshold, seed=seed,
                    min_active_days=int(x), **estimate_kwargs)
                cells.append(SweepCell(threshold, int(x), result))
            except (EmptyCohortError, CalibrationError) as exc:
                cells.append(SweepCell(threshold, int(x), None, reason=str(exc)))
    return cells


def total_loss_human_years(delta_days: float, n_users: int) -> float:
    """Aggregate short-term loss: |per-user active days| times cohort size,
    in human-years."""
    return abs(delta_days) * n_users / DAYS_PER_YEAR
