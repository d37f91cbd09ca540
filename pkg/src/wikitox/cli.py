"""Command-line front door chaining the pipeline stages.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import csv
import json
import sys

import click
import numpy as np

from . import __version__
from .abm import EnvironmentCurve, estimate_lambda, run_scenarios
from .activity import to_active_days, write_vectors
from .config import API_KEY_ENV
from .dump import is_user_talk, open_dump, page_record
from .errors import PowerLawFitError, WikitoxError
from .extract import ExclusionConfig, extract_comments
from .leaving import (MAX_N, curve_significance, fit_power_law, label_contributions,
                      leave_curve)
from .loss import (estimate_activity_loss, robustness_sweep, split_comment_times,
                   total_loss_human_years)
from .records import (comment_to_record, manifest_path, read_contribution_logs,
                      read_ndjson, record_to_comment, record_to_scored,
                      scored_to_record, verify_manifest, write_manifest,
                      write_ndjson)
from .svgplot import Band, Chart, Series, write_svg
from .toxicity import (CachedScorer, CorpusScoreStats, MockScorer, RemoteScorer,
                       ScoreCache, score_corpus)
from .util import format_timestamp, substream


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and np.isnan(obj):
        return None
    return obj


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as out:
        json.dump(_jsonable(payload), out, indent=2, sort_keys=True)
        out.write("\n")


@click.group(name="wikitox")
@click.version_option(__version__)
def cli():
    """Toxic-comment impact pipeline: scan, extract, score, activity,
    analyze-loss, analyze-leaving, simulate, report."""


@cli.command("scan")
@click.option("--dump", "dump_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--compression", type=click.Choice(["auto", "none", "bzip2"]),
              default="auto", show_default=True)
def scan_cmd(dump_path, out_path, compression):
    """Stream a dump and write one JSON page summary per line."""
    reader = open_dump(dump_path, compression=compression)
    manifest = write_ndjson(out_path, (page_record(p) for p in reader),
                            "page.v1", stage="scan", inputs=[dump_path])
    click.echo(f"{manifest['output']['records']} pages -> {out_path}")


@cli.command("extract")
@click.option("--dump", "dump_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--bots", "bots_path", type=click.Path(exists=True),
              help="File with one bot username per line.")
@click.option("--keep-anonymous", is_flag=True)
@click.option("--keep-self", is_flag=True)
@click.option("--no-bot-suffix-heuristic", "no_heuristic", is_flag=True)
@click.option("--include-subpages/--no-include-subpages", default=True,
              show_default=True, help="Keep talk-page archive subpages.")
def extract_cmd(dump_path, out_path, bots_path, keep_anonymous, keep_self,
                no_heuristic, include_subpages):
    """Extract comments from user-talk pages of a dump."""
    bots = frozenset()
    if bots_path:
        with open(bots_path, "r", encoding="utf-8") as handle:
            bots = frozenset(line.strip() for line in handle if line.strip())
    cfg = ExclusionConfig(bot_usernames=bots,
                          bot_suffix_heuristic=not no_heuristic,
                          exclude_anonymous=not keep_anonymous,
                          exclude_self=not keep_self)
    reader = open_dump(dump_path)

    def comments():
        for page in reader:
            if is_user_talk(page, reader.user_talk_namespace, include_subpages):
                for comment in extract_comments(page, cfg):
                    yield comment_to_record(comment)

    inputs = [dump_path] + ([bots_path] if bots_path else [])
    manifest = write_ndjson(out_path, comments(), "comment.v1",
                            stage="extract", inputs=inputs)
    click.echo(f"{manifest['output']['records']} comments -> {out_path}")


def _build_scorer(backend, endpoint, api_key, cache_path, lexicon_path):
    if backend == "mock":
        lexicon = None
        if lexicon_path:
            with open(lexicon_path, "r", encoding="utf-8") as handle:
                lexicon = frozenset(w.strip().lower() for w in handle if w.strip())
        scorer = MockScorer(lexicon) if lexicon else MockScorer()
    elif backend == "remote":
        if not endpoint:
            raise click.UsageError("--backend remote requires --endpoint")
        scorer = RemoteScorer(endpoint, api_key or None)
    else:  # cache-only
        if not cache_path:
            raise click.UsageError("--backend cache requires --cache")
        cache = ScoreCache(cache_path)
        scorer_ids = sorted(cache.scorer_ids)
        if len(scorer_ids) != 1:
            raise WikitoxError(
                f"cache {cache_path} holds {len(scorer_ids)} scorer ids; "
                "cannot pick one")
        return CachedScorer(cache, inner=None, scorer_id=scorer_ids[0])
    if cache_path and backend != "cache":
        return CachedScorer(ScoreCache(cache_path), inner=scorer)
    return scorer


@cli.command("score")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--lang", default="en", show_default=True)
@click.option("--backend", type=click.Choice(["remote", "mock", "cache"]),
              default="mock", show_default=True)
@click.option("--rate", type=float, default=None,
              help="Maximum backend requests per second.")
@click.option("--endpoint", default="", help="Remote scoring endpoint URL.")
@click.option("--api-key", default="",
              help=f"Remote API key; ${API_KEY_ENV} overrides.")
@click.option("--cache", "cache_path", type=click.Path(), default=None,
              help="Score cache file (read/write; sole source for --backend cache).")
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True),
              default=None, help="Word list for the mock backend.")
def score_cmd(in_path, out_path, lang, backend, rate, endpoint, api_key,
              cache_path, lexicon_path):
    """Assign six-attribute toxicity scores to extracted comments."""
    import os
    api_key = os.environ.get(API_KEY_ENV) or api_key
    scorer = _build_scorer(backend, endpoint, api_key, cache_path, lexicon_path)
    comments = (record_to_comment(r) for r in read_ndjson(in_path, "comment.v1"))
    stats = CorpusScoreStats()
    scored = (scored_to_record(sc) for sc in
              score_corpus(comments, scorer, lang, rate_limit=rate, stats=stats))
    manifest = write_ndjson(out_path, scored, "scored.v1", stage="score",
                            inputs=[in_path],
                            config={"backend": backend, "lang": lang, "rate": rate})
    click.echo(f"{stats.report()} -> {out_path}")
    del manifest


@cli.command("activity")
@click.option("--contribs", "contribs_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def activity_cmd(contribs_path, out_path):
    """Convert contribution timestamps to packed active-day bitsets."""
    logs = read_contribution_logs(contribs_path)
    vectors = (to_active_days(logs[user]) for user in sorted(logs))
    count = write_vectors(out_path, vectors)
    write_manifest(out_path, stage="activity", inputs=[contribs_path],
                   records=count)
    click.echo(f"{count} activity vectors -> {out_path}")


def _parse_float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _parse_int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _loss_payload(analysis):
    est = analysis.estimate
    return {
        "threshold": analysis.threshold,
        "min_active_days": analysis.min_active_days,
        "repetitions": analysis.repetitions,
        "delta": est.delta,
        "p_value": est.p_value,
        "ci": [est.ci_low, est.ci_high],
        "n_toxic": est.n_toxic,
        "n_control": est.n_control,
        "n_recipients_toxic": analysis.n_recipients_toxic,
        "n_excluded_no_toxic": analysis.n_excluded_no_toxic,
        "human_years_total": total_loss_human_years(
            est.delta, analysis.n_recipients_toxic),
        "calibration": {
            "p": analysis.calibration.p,
            "target_pre_mean": analysis.calibration.target,
            "control_pre_mean": analysis.calibration.achieved,
            "evaluations": analysis.calibration.evaluations,
        },
        "profiles": {
            "toxic": analysis.toxic_profile,
            "control": analysis.control_profile,
            "shuffled": analysis.shuffled,
        },
    }


def _plot_profiles(analysis, path):
    days = list(range(-100, 101))
    centered = Chart(
        series=[
            Series("toxic", days, list(analysis.toxic_profile), color="#d62728"),
            Series("control", days, list(analysis.control_profile), color="#1f77b4"),
        ] + ([Series("shuffled", days, list(analysis.shuffled),
                     color="#2c2c2c", dashed=True)]
             if analysis.shuffled is not None else []),
        title="Activity around the comment",
        xlabel="days from comment", ylabel="fraction of users active")
    dist = list(range(1, 101))
    mirror = Chart(
        series=[
            Series("toxic before", dist,
                   [analysis.toxic_profile[100 - d] for d in dist], color="#d62728"),
            Series("toxic after", dist,
                   [analysis.toxic_profile[100 + d] for d in dist],
                   color="#d62728", dashed=True),
            Series("control before", dist,
                   [analysis.control_profile[100 - d] for d in dist], color="#1f77b4"),
            Series("control after", dist,
                   [analysis.control_profile[100 + d] for d in dist],
                   color="#1f77b4", dashed=True),
        ],
        title="Before vs after the comment",
        xlabel="days from comment", ylabel="fraction of users active")
    write_svg(path, [centered, mirror])


def _plot_sweep(cells, path):
    by_threshold: dict = {}
    for cell in cells:
        by_threshold.setdefault(cell.threshold, []).append(cell)
    series = []
    bands = []
    extremes = (min(by_threshold), max(by_threshold))
    for i, (threshold, row) in enumerate(sorted(by_threshold.items())):
        xs = [c.min_active_days for c in row]
        ys = [c.result.estimate.delta if c.result else None for c in row]
        series.append(Series(f"threshold {threshold}", xs, ys))
        if threshold in extremes:
            bands.append(Band(
                x=[c.min_active_days for c in row if c.result],
                low=[c.result.estimate.ci_low for c in row if c.result],
                high=[c.result.estimate.ci_high for c in row if c.result]))
    write_svg(path, Chart(series=series, bands=bands,
                          title="Lost active days by threshold and activity filter",
                          xlabel="minimum active days in pre-window",
                          ylabel="delta (active days)"))


@cli.command("analyze-loss")
@click.option("--scored", "scored_path", required=True, type=click.Path(exists=True))
@click.option("--contribs", "contribs_path", required=True,
              type=click.Path(exists=True))
@click.option("--threshold", type=float, default=0.8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--sweep", is_flag=True, help="Add the robustness grid.")
@click.option("--sweep-thresholds", default="0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
              show_default=True)
@click.option("--sweep-filters", default=",".join(str(x) for x in range(0, 51, 10)),
              show_default=True)
@click.option("--repetitions", type=int, default=100, show_default=True)
@click.option("--bootstrap", type=int, default=1000, show_default=True)
@click.option("--match-tolerance", type=float, default=0.1, show_default=True)
@click.option("--min-active-days", type=int, default=0, show_default=True)
@click.option("--center-on", type=click.Choice(["virtual_event",
                                                "nearest_nontoxic_comment"]),
              default="virtual_event", show_default=True)
@click.option("--keep-toxic-recipients", is_flag=True,
              help="Allow toxic-comment recipients into the control pool.")
@click.option("--exclude-day-zero", is_flag=True,
              help="Leave the comment day out of the after-window.")
@click.option("--plot", "plot_path", type=click.Path(), default=None)
@click.option("--plot-sweep", "plot_sweep_path", type=click.Path(), default=None)
def analyze_loss_cmd(scored_path, contribs_path, threshold, seed, out_path,
                     sweep, sweep_thresholds, sweep_filters, repetitions,
                     bootstrap, match_tolerance, min_active_days, center_on,
                     keep_toxic_recipients, exclude_day_zero, plot_path,
                     plot_sweep_path):
    """Estimate active days lost to a toxic comment (matched control)."""
    scored = [record_to_scored(r) for r in read_ndjson(scored_path, "scored.v1")]
    logs = read_contribution_logs(contribs_path)
    kwargs = dict(seed=seed, repetitions=repetitions, n_boot=bootstrap,
                  tolerance=match_tolerance, center_on=center_on,
                  exclude_toxic_recipients=not keep_toxic_recipients,
                  exclude_day_zero=exclude_day_zero)
    analysis = estimate_activity_loss(scored, logs, threshold=threshold,
                                      min_active_days=min_active_days, **kwargs)
    payload = _loss_payload(analysis)
    cells = None
    if sweep:
        cells = robustness_sweep(
            scored, logs, thresholds=_parse_float_list(sweep_thresholds),
            activity_filters=_parse_int_list(sweep_filters), **kwargs)
        payload["sweep"] = [
            {"threshold": c.threshold, "min_active_days": c.min_active_days,
             "absent": c.result is None, "reason": c.reason,
             **({} if c.result is None else {
                 "delta": c.result.estimate.delta,
                 "p_value": c.result.estimate.p_value,
                 "ci": [c.result.estimate.ci_low, c.result.estimate.ci_high],
                 "n_toxic": c.result.estimate.n_toxic,
                 "n_control": c.result.estimate.n_control})}
            for c in cells
        ]
    _write_json(out_path, payload)
    write_manifest(out_path, stage="analyze-loss",
                   inputs=[scored_path, contribs_path], seed=seed,
                   config={"threshold": threshold, "repetitions": repetitions,
                           "bootstrap": bootstrap, "tolerance": match_tolerance,
                           "center_on": center_on})
    if plot_path:
        _plot_profiles(analysis, plot_path)
    if plot_sweep_path:
        if cells is None:
            raise click.UsageError("--plot-sweep needs --sweep")
        _plot_sweep(cells, plot_sweep_path)
    click.echo(f"delta {analysis.estimate.delta:+.3f} active days "
               f"(p={analysis.estimate.p_value:.2e}, "
               f"n={analysis.estimate.n_toxic}) -> {out_path}")


def _curve_payload(curve):
    return {
        "cohort": curve.cohort,
        "exactly": curve.exactly[1:],
        "at_least": curve.at_least[1:],
        "probabilities": curve.probabilities[1:],
        "alpha": curve.alpha,
        "c": curve.c,
        "ci_low": curve.ci_low,
        "ci_high": curve.ci_high,
    }


@cli.command("analyze-leaving")
@click.option("--scored", "scored_path", required=True, type=click.Path(exists=True))
@click.option("--contribs", "contribs_path", required=True,
              type=click.Path(exists=True))
@click.option("--threshold", type=float, default=0.8, show_default=True)
@click.option("--censor-days", type=int, default=100, show_default=True)
@click.option("--dataset-end", default=None,
              help="ISO instant; defaults to the newest observed timestamp.")
@click.option("--bootstrap", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot", "plot_path", type=click.Path(), default=None)
def analyze_leaving_cmd(scored_path, contribs_path, threshold, censor_days,
                        dataset_end, bootstrap, seed, out_path, plot_path):
    """Estimate leaving probabilities after the N-th contribution."""
    from .util import parse_timestamp
    scored = [record_to_scored(r) for r in read_ndjson(scored_path, "scored.v1")]
    logs = read_contribution_logs(contribs_path)
    toxic_times, _ = split_comment_times(scored, threshold)
    labeled = {user: label_contributions(log, toxic_times.get(user, []))
               for user, log in logs.items() if len(log)}
    if dataset_end is not None:
        end = parse_timestamp(dataset_end)
    else:
        end = max(int(log.timestamps[-1]) for log in logs.values() if len(log))
        for times in toxic_times.values():
            end = max(end, int(times[-1]))
    curves = {}
    for cohort in ("toxic_followed", "other"):
        curve = leave_curve(labeled, cohort, censor_days, end)
        try:
            curve.alpha, curve.c = fit_power_law(curve)
        except PowerLawFitError:
            pass
        curves[cohort] = curve
    report = curve_significance(labeled, end, censor_days,
                                substream(seed, "leaving", "boot"),
                                n_boot=bootstrap)
    curves["toxic_followed"].ci_low = report.ci_toxic_low
    curves["toxic_followed"].ci_high = report.ci_toxic_high
    curves["other"].ci_low = report.ci_other_low
    curves["other"].ci_high = report.ci_other_high
    payload = {
        "threshold": threshold,
        "censor_days": censor_days,
        "dataset_end": format_timestamp(end),
        "cohorts": {name: _curve_payload(c) for name, c in curves.items()},
        "disjoint_n": report.disjoint_n,
    }
    _write_json(out_path, payload)
    write_manifest(out_path, stage="analyze-leaving",
                   inputs=[scored_path, contribs_path], seed=seed,
                   config={"threshold": threshold, "censor_days": censor_days,
                           "bootstrap": bootstrap})
    if plot_path:
        ns = list(range(1, MAX_N + 1))
        series = []
        for name, color in (("toxic_followed", "#d62728"), ("other", "#1f77b4")):
            curve = curves[name]
            series.append(Series(name, ns, curve.probabilities[1:],
                                 color=color, markers=True))
            if curve.alpha is not None:
                series.append(Series(f"{name} fit", ns,
                                     [curve.c * n ** -curve.alpha for n in ns],
                                     color=color, dashed=True))
        write_svg(plot_path, Chart(series=series, log_x=True, log_y=True,
                                   title="Probability of leaving after N contributions",
                                   xlabel="N", ylabel="P(leaving)"))
    shown = [f"{name}: alpha={c.alpha:.3f}" for name, c in curves.items()
             if c.alpha is not None]
    click.echo(f"curves -> {out_path}" + (f" ({'; '.join(shown)})" if shown else ""))


def _environment_from_payload(data, cohort):
    entry = data["cohorts"][cohort]
    if entry["alpha"] is None:
        return None
    table = np.array([np.nan if p is None else p
                      for p in entry["probabilities"]], dtype=np.float64)
    curve = EnvironmentCurve(label=cohort, table=table,
                             alpha=entry["alpha"], c=entry["c"])
    curve.table = curve.probs_up_to(MAX_N)
    return curve


@cli.command("simulate")
@click.option("--curves", "curves_path", required=True, type=click.Path(exists=True))
@click.option("--lambda-from", "lambda_path", type=click.Path(exists=True),
              default=None, help="contribs.ndjson to estimate lambda from.")
@click.option("--lam", type=float, default=None,
              help="Contribution rate per day (overrides --lambda-from).")
@click.option("--scenario", type=click.Choice(["1", "2", "3", "all"]),
              default="all", show_default=True)
@click.option("--replicates", type=int, default=100, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--horizon", type=int, default=2000, show_default=True)
@click.option("--toxic-scale", type=float, default=2.0, show_default=True,
              help="Fallback scale on the non-toxic curve when the toxic "
                   "cohort has no usable fit.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot", "plot_path", type=click.Path(), default=None)
def simulate_cmd(curves_path, lambda_path, lam, scenario, replicates, seed,
                 horizon, toxic_scale, out_path, plot_path):
    """Simulate editor populations under toxic vs non-toxic environments."""
    with open(curves_path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    env_nontoxic = _environment_from_payload(data, "other")
    if env_nontoxic is None:
        raise WikitoxError("non-toxic cohort has no power-law fit to simulate with")
    env_nontoxic.label = "non_toxic"
    env_toxic = _environment_from_payload(data, "toxic_followed")
    if env_toxic is None:
        env_toxic = env_nontoxic.scaled(toxic_scale, "toxic")
    else:
        env_toxic.label = "toxic"
    if lam is None:
        if lambda_path is None:
            raise click.UsageError("need --lam or --lambda-from")
        lam = estimate_lambda(read_contribution_logs(lambda_path).values())
    ids = (1, 2, 3) if scenario == "all" else (int(scenario),)
    results = run_scenarios(env_toxic, env_nontoxic, lam, replicates, seed,
                            horizon=horizon, scenario_ids=ids)
    with open(out_path, "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["scenario", "environment", "day",
                         "mean_population", "std_population"])
        for (sid, env_label), trace in sorted(results.items()):
            for day, (mean, std) in enumerate(zip(trace["mean"], trace["std"])):
                writer.writerow([sid, env_label, day, f"{mean:.4f}", f"{std:.4f}"])
    inputs = [curves_path] + ([lambda_path] if lambda_path else [])
    write_manifest(out_path, stage="simulate", inputs=inputs, seed=seed,
                   config={"lambda": lam, "replicates": replicates,
                           "horizon": horizon, "scenario": scenario})
    if plot_path:
        charts = []
        for sid in ids:
            days = list(range(horizon + 1))
            charts.append(Chart(
                series=[
                    Series("non-toxic", days,
                           list(results[(sid, "non_toxic")]["mean"]),
                           color="#1f77b4"),
                    Series("toxic", days, list(results[(sid, "toxic")]["mean"]),
                           color="#d62728"),
                ],
                title=f"Scenario {sid}: population over time",
                xlabel="day", ylabel="active agents"))
        write_svg(plot_path, charts)
    click.echo(f"simulated scenarios {ids} x 2 environments "
               f"({replicates} replicates, lambda={lam:.4f}) -> {out_path}")


@cli.command("report")
@click.option("--dir", "base_dir", default=".", show_default=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path())
def report_cmd(base_dir, out_path):
    """Bundle available stage outputs into one summary document."""
    import pathlib
    base = pathlib.Path(base_dir)
    lines = ["# Pipeline report", ""]

    manifests = sorted(base.glob("*.manifest.json"))
    if manifests:
        lines += ["## Stage outputs", ""]
        for path in manifests:
            try:
                manifest = verify_manifest(path)
                status = "ok"
            except WikitoxError as exc:
                manifest = json.loads(path.read_text())
                status = f"HASH MISMATCH ({exc})"
            out = manifest["output"]
            records = out.get("records")
            lines.append(
                f"- `{manifest['stage']}` -> `{out['path']}`"
                + (f" ({records} records)" if records is not None else "")
                + f" [{status}]")
        lines.append("")

    delta_path = base / "delta.json"
    if delta_path.exists():
        data = json.loads(delta_path.read_text())
        lines += [
            "## Activity loss", "",
            f"- threshold: {data['threshold']}",
            f"- delta: {data['delta']:+.3f} active days per user "
            f"(95% CI [{data['ci'][0]:+.3f}, {data['ci'][1]:+.3f}])",
            f"- p-value: {data['p_value']:.3e}",
            f"- cohorts: {data['n_toxic']} toxic users, "
            f"{data['n_control']} matched controls",
            f"- total short-term loss: {data['human_years_total']:.2f} "
            f"human-years across {data['n_recipients_toxic']} recipients",
            "",
        ]

    curves_path = base / "curves.json"
    if curves_path.exists():
        data = json.loads(curves_path.read_text())
        lines += ["## Leaving Wikipedia", ""]
        for name, cohort in sorted(data["cohorts"].items()):
            p1 = cohort["probabilities"][0]
            alpha = cohort["alpha"]
            lines.append(
                f"- {name}: P_1 = "
                + (f"{p1:.3f}" if p1 is not None else "undefined")
                + (f", alpha = {alpha:.3f}" if alpha is not None else ""))
        if data.get("disjoint_n"):
            lines.append(f"- disjoint 95% CIs at N = {data['disjoint_n']}")
        lines.append("")

    sim_path = base / "sim.csv"
    if sim_path.exists():
        finals: dict = {}
        with open(sim_path, "r", encoding="utf-8") as handle:
            for row in csv.DictReader(handle):
                key = (row["scenario"], row["environment"])
                finals[key] = float(row["mean_population"])
        lines += ["## Simulation", ""]
        for (sid, env), value in sorted(finals.items()):
            lines.append(f"- scenario {sid}, {env}: final mean population {value:.1f}")
        lines.append("")

    with open(out_path, "w", encoding="utf-8") as out:
        out.write("\n".join(lines).rstrip() + "\n")
    click.echo(f"report -> {out_path}")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except (WikitoxError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
