"""Agent-based editor-population simulation.

Each agent contributes immediately on arrival and then at exponentially
distributed gaps (a Poisson contribution process with rate lambda per day).
After its N-th contribution the agent leaves with the probability given by
the environment curve at N. Agents are independent, so a replicate is
simulated as a batch of per-agent careers; event times are continuous and
the population is sampled at integer days.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EstimationError
from .util import DAY_SECONDS, substream

MAX_TABLE_N = 100


@dataclass
class EnvironmentCurve:
    """Per-contribution departure probabilities: an empirical table for
    N in [1, 100] and a clamped power-law extrapolation beyond it."""

    label: str
    table: np.ndarray          # (100,), index k is N = k + 1; NaN = hole
    alpha: float
    c: float

    @classmethod
    def from_power_law(cls, alpha: float, c: float, label: str) -> "EnvironmentCurve":
        n = np.arange(1, MAX_TABLE_N + 1, dtype=np.float64)
        return cls(label=label, table=np.clip(c * n ** -alpha, 0.0, 1.0),
                   alpha=alpha, c=c)

    @classmethod
    def constant(cls, q: float, label: str) -> "EnvironmentCurve":
        return cls(label=label, table=np.full(MAX_TABLE_N, float(q)),
                   alpha=0.0, c=float(q))

    @classmethod
    def from_leave_curve(cls, curve, label: str | None = None) -> "EnvironmentCurve":
        """Build from an estimated LeaveCurve; undefined bins are filled
        with the fitted power law. The curve must carry (alpha, c)."""
        if curve.alpha is None or curve.c is None:
            raise ValueError("leave curve has no fitted (alpha, c) extrapolation")
        table = np.full(MAX_TABLE_N, np.nan)
        for n_index in range(1, MAX_TABLE_N + 1):
            p = curve.probabilities[n_index]
            if p is not None:
                table[n_index - 1] = p
        out = cls(label=label or curve.cohort, table=table,
                  alpha=float(curve.alpha), c=float(curve.c))
        out.table = out.probs_up_to(MAX_TABLE_N)
        return out

    def scaled(self, factor: float, label: str) -> "EnvironmentCurve":
        return EnvironmentCurve(label=label,
                                table=np.clip(self.table * factor, 0.0, 1.0),
                                alpha=self.alpha, c=self.c * factor)

    def probs_up_to(self, n_max: int) -> np.ndarray:
        """Departure probabilities for N = 1..n_max, extrapolating and
        clamping to [0, 1] past the table."""
        n = np.arange(1, n_max + 1, dtype=np.float64)
        with np.errstate(divide="ignore"):
            out = np.clip(self.c * n ** -self.alpha, 0.0, 1.0)
        head = min(n_max, MAX_TABLE_N)
        known = ~np.isnan(self.table[:head])
        out[:head][known] = np.clip(self.table[:head][known], 0.0, 1.0)
        return out

    def prob_at(self, n: int) -> float:
        if n <= MAX_TABLE_N and not np.isnan(self.table[n - 1]):
            return float(np.clip(self.table[n - 1], 0.0, 1.0))
        return float(np.clip(self.c * n ** -self.alpha, 0.0, 1.0))


@dataclass
class Scenario:
    name: str
    arrivals: object           # callable day -> new agent count
    horizon: int
    lam: float                 # contributions per day

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


def standard_scenarios(lam: float, horizon: int = 2000) -> dict:
    """The three arrival schedules: a day-1 cohort of 1000, one newcomer
    per day forever, and one per day for the first 500 days only."""
    return {
        1: Scenario("initial-1000", lambda day: 1000 if day == 1 else 0, horizon, lam),
        2: Scenario("steady-arrivals", lambda day: 1 if day >= 1 else 0, horizon, lam),
        3: Scenario("arrivals-500-days", lambda day: 1 if 1 <= day <= 500 else 0,
                    horizon, lam),
    }


@dataclass
class SimResult:
    population: np.ndarray         # active agents at each integer day 0..horizon
    departures: int
    replicate_id: int
    seed: object
    departures_by_n: np.ndarray    # departures histogram over contribution count


def estimate_lambda(logs) -> float:
    """Maximum-likelihood exponential rate: 1 / mean inter-contribution gap
    (in days), pooled over all users with at least two contributions."""
    total = 0.0
    count = 0
    for log in logs:
        if len(log) >= 2:
            gaps = np.diff(log.timestamps) / DAY_SECONDS
            total += float(gaps.sum())
            count += gaps.size
    if count == 0:
        raise EstimationError("no inter-contribution gaps: need a user with >= 2 edits")
    return count / total


def _arrival_times(scenario: Scenario) -> np.ndarray:
    days = []
    for day in range(scenario.horizon + 1):
        n = int(scenario.arrivals(day))
        if n:
            days.extend([day] * n)
    return np.asarray(days, dtype=np.float64)


_CAREER_CHUNK = 2048


def simulate(scenario: Scenario, env: EnvironmentCurve, rng,
             replicate_id: int = 0, seed=None) -> SimResult:
    """One replicate. Careers are drawn in column chunks of gap and coin
    matrices covering all agents, so memory stays bounded however long
    careers get, and the draw for (agent, contribution N) does not depend
    on the environment (common random numbers hold across curve pairs).
    Contribution events past the horizon are discarded, so no departure
    can happen after it; the first contribution happens at arrival."""
    arrival = _arrival_times(scenario)
    horizon = scenario.horizon
    n_agents = arrival.size
    if n_agents == 0:
        return SimResult(population=np.zeros(horizon + 1, dtype=np.int64),
                         departures=0, replicate_id=replicate_id, seed=seed,
                         departures_by_n=np.zeros(1, dtype=np.int64))

    dep_times: list = []
    dep_ns: list = []
    departed = np.zeros(n_agents, dtype=bool)
    last_time = arrival.copy()
    n_offset = 0
    while True:
        width = _CAREER_CHUNK
        gaps = rng.exponential(1.0 / scenario.lam, size=(n_agents, width))
        coins = rng.random((n_agents, width))
        if n_offset == 0:
            gaps[:, 0] = 0.0           # first contribution is at arrival itself
            times = arrival[:, None] + np.cumsum(gaps, axis=1)
        else:
            times = last_time[:, None] + np.cumsum(gaps, axis=1)
        probs = env.probs_up_to(n_offset + width)[n_offset:]
        leave = (coins < probs[None, :]) & (times <= horizon) & ~departed[:, None]
        hit_rows = leave.any(axis=1)
        first_col = leave.argmax(axis=1)
        for row in np.flatnonzero(hit_rows):
            col = first_col[row]
            dep_times.append(float(times[row, col]))
            dep_ns.append(n_offset + int(col) + 1)
        departed |= hit_rows
        last_time = times[:, -1]
        n_offset += width
        if bool(np.all(departed | (last_time > horizon))):
            break

    dep_times_arr = np.sort(np.asarray(dep_times, dtype=np.float64))
    sample_days = np.arange(horizon + 1, dtype=np.float64)
    arrived = np.searchsorted(np.sort(arrival), sample_days, side="right")
    gone = np.searchsorted(dep_times_arr, sample_days, side="right")
    population = (arrived - gone).astype(np.int64)
    dep_hist = (np.bincount(np.asarray(dep_ns, dtype=np.int64))
                if dep_ns else np.zeros(1, dtype=np.int64))
    return SimResult(population=population, departures=len(dep_times),
                     replicate_id=replicate_id, seed=seed, departures_by_n=dep_hist)


def run_scenarios(env_toxic: EnvironmentCurve, env_nontoxic: EnvironmentCurve,
                  lam: float, replicates: int, seed: int, horizon: int = 2000,
                  scenario_ids=(1, 2, 3)) -> dict:
    """All requested scenarios under both environments, averaged over
    replicates. Each (scenario, replicate) pair owns an RNG substream that
    is re-derived identically for both environments (common random numbers),
    so results are deterministic given the seed and comparisons are
    low-variance."""
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    scenarios = standard_scenarios(lam, horizon)
    out = {}
    for sid in scenario_ids:
        scenario = scenarios[sid]
        for env in (env_nontoxic, env_toxic):
            traces = np.zeros((replicates, horizon + 1), dtype=np.float64)
            for rep in range(replicates):
                rng = substream(seed, "abm", sid, rep)
                traces[rep] = simulate(scenario, env, rng,
                                       replicate_id=rep, seed=seed).population
            out[(sid, env.label)] = {
                "mean": traces.mean(axis=0),
                "std": traces.std(axis=0),
                "scenario": scenario.name,
            }
    return out
