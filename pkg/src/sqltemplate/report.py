"""Write the analysis artifacts (CSV tables plus JSON summaries) for a corpus.

Layout of an output directory (``LAYOUT_VERSION`` 1)::

    spectrum.csv           rank,count,group,template
    coverage.csv           target,templates_needed,template_percentage
    loglog.csv             rank,count,log_rank,log_count
    fit.json               log-log line fit plus bootstrap goodness-of-fit
    spearman.csv           proxy,rho,p_value,n_pairs
    moving_avg_<proxy>.csv table_count,y_raw,y_smooth
    proxy_by_group.csv     group,templates,queries,<six proxies>
    summary.json           counts, groups, per-proxy statistics, headers
    failures.jsonl         one JSON object per skipped record

Everything is written to a scratch directory first and moved into place only
once every file is complete, so a failed run leaves no partial report.
"""

from __future__ import annotations

import csv
import json
import math
import os
import shutil
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import powerlaw, stats
from .complexity import PROXIES
from .corpus import IngestResult, TemplateInventory
from .errors import DegenerateSpectrum, EmptyInventory, TooFewPairs
from .templatizer import Level

LAYOUT_VERSION = 1

CSV_HEADERS = {
    "spectrum.csv": ["rank", "count", "group", "template"],
    "coverage.csv": ["target", "templates_needed", "template_percentage"],
    "loglog.csv": ["rank", "count", "log_rank", "log_count"],
    "spearman.csv": ["proxy", "rho", "p_value", "n_pairs"],
    "moving_avg_<proxy>.csv": ["table_count", "y_raw", "y_smooth"],
    "proxy_by_group.csv": ["group", "templates", "queries", *PROXIES],
}


@dataclass(frozen=True)
class AnalysisConfig:
    level: Level = Level.SOFT
    window: int = stats.DEFAULT_WINDOW
    targets: tuple[float, ...] = stats.DEFAULT_TARGETS
    seed: int = powerlaw.DEFAULT_SEED
    resamples: int = powerlaw.DEFAULT_RESAMPLES
    spearman_unit: str = "table_count"


def _num(x: float | int | None) -> str:
    """Stable text for CSV cells; empty for missing or NaN values."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(x) if isinstance(x, float) else str(x)


def _json_num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _fit_json(spec: stats.FrequencySpectrum, cfg: AnalysisConfig, notes: list[str]) -> dict:
    out: dict = {"mode": "rank", "seed": cfg.seed, "bootstrap_n": 0}
    try:
        line = stats.fit_loglog(spec)
    except DegenerateSpectrum as exc:
        notes.append(f"log-log fit skipped: {exc}")
        return {**out, "alpha": None, "intercept": None, "r_squared": None, "gof_p_value": None}
    out.update(alpha=line.alpha, intercept=line.intercept, r_squared=line.r_squared, gof_p_value=None)
    if cfg.resamples > 0:
        try:
            gof = powerlaw.bootstrap_gof(np.asarray(spec.sorted_counts), cfg.resamples, cfg.seed)
        except DegenerateSpectrum as exc:
            notes.append(f"goodness-of-fit skipped: {exc}")
        else:
            out.update(
                gof_p_value=gof.p_value,
                bootstrap_n=cfg.resamples,
                xmin=gof.fit.xmin,
                mle_alpha=gof.fit.alpha,
                ks=gof.fit.ks,
                n_tail=gof.fit.n_tail,
            )
    return {k: _json_num(v) for k, v in out.items()}


def _write_report(dest: Path, result: IngestResult, cfg: AnalysisConfig) -> None:
    inventory: TemplateInventory = result.soft if cfg.level is Level.SOFT else result.hard
    if not inventory.entries:
        raise EmptyInventory("no record could be templatized")
    notes: list[str] = []
    spec = stats.spectrum(inventory)
    ranked = inventory.ranked()

    _write_csv(
        dest / "spectrum.csv",
        CSV_HEADERS["spectrum.csv"],
        ([r, e.count, stats.group_of(e.count), t] for r, (t, e) in enumerate(ranked, 1)),
    )
    _write_csv(
        dest / "coverage.csv",
        CSV_HEADERS["coverage.csv"],
        ([_num(row.target), row.templates_needed, _num(row.template_percentage)]
         for row in stats.coverage_table(spec, cfg.targets)),
    )
    _write_csv(
        dest / "loglog.csv",
        CSV_HEADERS["loglog.csv"],
        ([r, c, _num(math.log(r)), _num(math.log(c))] for r, c in enumerate(spec.sorted_counts, 1)),
    )
    _write_json(dest / "fit.json", _fit_json(spec, cfg, notes))

    profiles, table_counts = result.profiles, result.table_counts()
    rows = []
    for proxy in PROXIES:
        try:
            rho, p, n = stats.proxy_spearman(profiles, table_counts, proxy, cfg.spearman_unit)
        except TooFewPairs as exc:
            notes.append(f"spearman for {proxy} skipped: {exc}")
            rows.append([proxy, "", "", len(set(table_counts))])
            continue
        rows.append([proxy, _num(rho), _num(p), n])
    _write_csv(dest / "spearman.csv", CSV_HEADERS["spearman.csv"], rows)

    peaks = {}
    for proxy in PROXIES:
        curve = stats.moving_average(profiles, table_counts, proxy, cfg.window)
        peaks[proxy] = {"peak_value": curve.peak_value, "breaking_point": curve.breaking_point}
        _write_csv(
            dest / f"moving_avg_{proxy}.csv",
            CSV_HEADERS["moving_avg_<proxy>.csv"],
            ([x, _num(raw), _num(sm)] for x, raw, sm in zip(curve.x, curve.y_raw, curve.y_smooth)),
        )

    by_group = stats.proxy_by_group(inventory)
    templates_in = {name: 0 for name, _, _ in stats.FREQUENCY_GROUPS}
    queries_in = dict(templates_in)
    for e in inventory.entries.values():
        g = stats.group_of(e.count)
        templates_in[g] += 1
        queries_in[g] += e.count
    _write_csv(
        dest / "proxy_by_group.csv",
        CSV_HEADERS["proxy_by_group.csv"],
        ([g, templates_in[g], queries_in[g], *(_num(by_group[g][p]) for p in PROXIES)]
         for g, _, _ in stats.FREQUENCY_GROUPS),
    )

    summary_rows = stats.summary_stats(profiles)
    summary = {
        "layout_version": LAYOUT_VERSION,
        "csv_headers": CSV_HEADERS,
        "config": {
            "level": cfg.level.value,
            "window": cfg.window,
            "targets": list(cfg.targets),
            "seed": cfg.seed,
            "resamples": cfg.resamples,
            "spearman_unit": cfg.spearman_unit,
        },
        "records": {"processed": len(result.processed), "failed": len(result.failures)},
        "templates": {"hard": len(result.hard), "soft": len(result.soft)},
        "groups": {g: asdict(share) for g, share in spec.groups.items()},
        "proxies": {p: {**asdict(summary_rows[p]), **peaks[p]} for p in PROXIES},
        "notes": notes,
    }
    _write_json(dest / "summary.json", summary)

    with open(dest / "failures.jsonl", "w", encoding="utf-8") as fh:
        for f in result.failures:
            fh.write(json.dumps(f.to_json(), sort_keys=True) + "\n")


def write_report(out_dir: str | Path, result: IngestResult, cfg: AnalysisConfig = AnalysisConfig()) -> Path:
    """Write every artifact into ``out_dir`` atomically per run."""
    out = Path(out_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=".report-", dir=out.parent))
    try:
        _write_report(scratch, result, cfg)
        out.mkdir(exist_ok=True)
        for item in sorted(scratch.iterdir()):
            os.replace(item, out / item.name)
    finally:
        shutil.rmtree(scratch, ignore_errors=True)
    return out
