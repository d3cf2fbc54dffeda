"""Corpus statistics over template inventories and complexity profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy import stats as sps

from . import powerlaw
from .complexity import PROXIES, ComplexityProfile
from .corpus import TemplateInventory
from .errors import DegenerateSpectrum, EmptyInput, EmptyInventory, TooFewPairs, UnknownProxy

# (name, lowest count, highest count); None = unbounded
FREQUENCY_GROUPS = (
    ("high", 100, None),
    ("middle", 10, 99),
    ("long_tail", 2, 9),
    ("once", 1, 1),
)
DEFAULT_TARGETS = (10, 30, 50, 70, 90, 100)
DEFAULT_WINDOW = 15


def group_of(count: float) -> str:
    # groups are ordered by descending lower bound, so the first hit wins
    for name, lo, _ in FREQUENCY_GROUPS:
        if count >= lo:
            return name
    raise ValueError(f"count must be >= 1, got {count}")


@dataclass(frozen=True)
class GroupShare:
    templates: int
    percent: float


@dataclass(frozen=True)
class FrequencySpectrum:
    sorted_counts: tuple[float, ...]
    groups: Mapping[str, GroupShare]

    @property
    def total_templates(self) -> int:
        return len(self.sorted_counts)

    @property
    def total_queries(self) -> float:
        return sum(self.sorted_counts)


def _counts_of(source: TemplateInventory | Sequence[float]) -> list[float]:
    if isinstance(source, TemplateInventory):
        return source.counts()
    return sorted(source, reverse=True)


def spectrum(source: TemplateInventory | Sequence[float]) -> FrequencySpectrum:
    """Descending counts plus the High/Middle/Long-tail/Once partition.

    Accepts an inventory or a plain sequence of template counts.
    """
    counts = _counts_of(source)
    if not counts:
        raise EmptyInventory("spectrum of an empty inventory")
    if counts[-1] <= 0:
        raise ValueError("template counts must be positive")
    tally = {name: 0 for name, _, _ in FREQUENCY_GROUPS}
    for c in counts:
        tally[group_of(c)] += 1
    total = len(counts)
    groups = {name: GroupShare(k, 100.0 * k / total) for name, k in tally.items()}
    return FrequencySpectrum(tuple(counts), groups)


@dataclass(frozen=True)
class CoverageRow:
    target: float
    templates_needed: int
    template_percentage: float


def coverage_table(
    source: TemplateInventory | FrequencySpectrum | Sequence[int],
    targets: Sequence[float] = DEFAULT_TARGETS,
) -> list[CoverageRow]:
    """Fewest top templates whose counts reach each target share of queries."""
    counts = list(source.sorted_counts) if isinstance(source, FrequencySpectrum) else _counts_of(source)
    if not counts:
        raise EmptyInventory("coverage of an empty inventory")
    cum = np.cumsum(np.asarray(counts, dtype=np.int64))
    total = int(cum[-1])
    rows = []
    for target in targets:
        frac = Fraction(str(target))
        if not 0 < frac <= 100:
            raise ValueError(f"coverage target must be in (0, 100], got {target}")
        # exact: need cum * 100 >= target * total
        needed = frac * total / 100
        k = int(np.searchsorted(cum, math.ceil(needed), side="left")) + 1
        rows.append(CoverageRow(float(target), k, 100.0 * k / len(counts)))
    return rows


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    intercept: float
    r_squared: float
    gof_p_value: float | None = None
    bootstrap_n: int = 0
    xmin: int | None = None
    mle_alpha: float | None = None
    mode: str = "rank"


def loglog_points(spec: FrequencySpectrum, mode: str = "rank") -> tuple[np.ndarray, np.ndarray]:
    """(log x, log y) points, natural logs.

    ``rank``: x = rank, y = count. ``frequency``: x = count value, y = number
    of templates with that count.
    """
    counts = np.asarray(spec.sorted_counts, dtype=float)
    if mode == "rank":
        x = np.arange(1, counts.size + 1, dtype=float)
        y = counts
    elif mode == "frequency":
        x, y = np.unique(counts, return_counts=True)
        y = y.astype(float)
    else:
        raise ValueError(f"unknown log-log mode {mode!r}")
    return np.log(x), np.log(y)


def fit_loglog(spec: FrequencySpectrum, mode: str = "rank") -> PowerLawFit:
    """Least-squares line ``log y = -alpha log x + C``."""
    lx, ly = loglog_points(spec, mode)
    if lx.size < 3:
        raise DegenerateSpectrum(f"need at least 3 points for a log-log fit, got {lx.size}")
    dx = lx - lx.mean()
    dy = ly - ly.mean()
    sxx = float(dx @ dx)
    slope = float(dx @ dy) / sxx
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    syy = float(dy @ dy)
    r2 = 1.0 - float(resid @ resid) / syy if syy > 0 else 1.0
    return PowerLawFit(alpha=-slope + 0.0, intercept=intercept, r_squared=r2, mode=mode)


def gof_bootstrap(
    spec: FrequencySpectrum | Sequence[int],
    resamples: int = powerlaw.DEFAULT_RESAMPLES,
    seed: int = powerlaw.DEFAULT_SEED,
) -> float:
    """Bootstrap goodness-of-fit p-value of a discrete power law for the counts."""
    if resamples < 100:
        raise ValueError(f"resamples must be >= 100, got {resamples}")
    data = spec.sorted_counts if isinstance(spec, FrequencySpectrum) else spec
    return powerlaw.bootstrap_gof(np.asarray(data), resamples, seed).p_value


def fit_with_gof(
    spec: FrequencySpectrum,
    resamples: int = powerlaw.DEFAULT_RESAMPLES,
    seed: int = powerlaw.DEFAULT_SEED,
    mode: str = "rank",
) -> PowerLawFit:
    """Log-log line fit plus the discrete MLE fit and its bootstrap p-value."""
    line = fit_loglog(spec, mode)
    if resamples <= 0:
        return line
    gof = powerlaw.bootstrap_gof(np.asarray(spec.sorted_counts), resamples, seed)
    return PowerLawFit(
        alpha=line.alpha,
        intercept=line.intercept,
        r_squared=line.r_squared,
        gof_p_value=gof.p_value,
        bootstrap_n=resamples,
        xmin=gof.fit.xmin,
        mle_alpha=gof.fit.alpha,
        mode=mode,
    )


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Spearman's rho with average ranks for ties and a two-sided t p-value.

    Returns ``(nan, nan)`` when either series is constant.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("spearman needs two 1-d series of equal length")
    n = xa.size
    if n < 4:
        raise TooFewPairs(f"spearman needs at least 4 pairs, got {n}")
    rx = sps.rankdata(xa)
    ry = sps.rankdata(ya)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0:
        return math.nan, math.nan
    rho = max(-1.0, min(1.0, float(dx @ dy) / denom))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(sps.t.sf(abs(t), n - 2))
    return rho, p


def _check_proxy(proxy: str) -> None:
    if proxy not in PROXIES:
        raise UnknownProxy(f"unknown proxy {proxy!r}; expected one of {', '.join(PROXIES)}")


def means_by_table_count(
    profiles: Sequence[ComplexityProfile], table_counts: Sequence[int], proxy: str
) -> tuple[list[int], list[float]]:
    """Average ``proxy`` over records grouped by their database's table count."""
    _check_proxy(proxy)
    if len(profiles) != len(table_counts):
        raise ValueError("profiles and table_counts must align")
    if not profiles:
        raise EmptyInput("no profiles")
    sums: dict[int, int] = {}
    ns: dict[int, int] = {}
    for prof, tc in zip(profiles, table_counts):
        sums[tc] = sums.get(tc, 0) + getattr(prof, proxy)
        ns[tc] = ns.get(tc, 0) + 1
    xs = sorted(sums)
    return xs, [sums[x] / ns[x] for x in xs]


@dataclass(frozen=True)
class MovingAverageCurve:
    proxy: str
    window: int
    x: tuple[int, ...]
    y_raw: tuple[float, ...]
    y_smooth: tuple[float, ...]

    @property
    def peak_value(self) -> float:
        return max(self.y_smooth)

    @property
    def breaking_point(self) -> int:
        """Table count where the smoothed curve first reaches its peak."""
        return self.x[self.y_smooth.index(self.peak_value)]


def trailing_mean(values: Sequence[float], window: int) -> list[float]:
    """Trailing moving average; the first ``window - 1`` points average what exists."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    out = []
    run = 0.0
    for i, v in enumerate(values):
        run += v
        if i >= window:
            run -= values[i - window]
        out.append(run / min(i + 1, window))
    return out


def moving_average(
    profiles: Sequence[ComplexityProfile],
    table_counts: Sequence[int],
    proxy: str,
    window: int = DEFAULT_WINDOW,
) -> MovingAverageCurve:
    xs, raw = means_by_table_count(profiles, table_counts, proxy)
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    # recompute from window sums of the raw list, not a running float total
    smooth = [float(np.mean(raw[max(0, i - window + 1) : i + 1])) for i in range(len(raw))]
    return MovingAverageCurve(proxy, window, tuple(xs), tuple(raw), tuple(smooth))


def proxy_spearman(
    profiles: Sequence[ComplexityProfile],
    table_counts: Sequence[int],
    proxy: str,
    unit: str = "table_count",
) -> tuple[float, float, int]:
    """Spearman test of ``proxy`` against database table count.

    ``unit="table_count"`` correlates per-table-count means; ``unit="query"``
    correlates raw per-query values. Returns (rho, p, number of pairs).
    """
    if unit == "table_count":
        xs, ys = means_by_table_count(profiles, table_counts, proxy)
    elif unit == "query":
        _check_proxy(proxy)
        xs, ys = list(table_counts), [getattr(p, proxy) for p in profiles]
    else:
        raise ValueError(f"unknown spearman unit {unit!r}")
    rho, p = spearman(xs, ys)
    return rho, p, len(xs)


def proxy_by_group(inventory: TemplateInventory) -> dict[str, dict[str, float | None]]:
    """Mean of each proxy over the queries whose template falls in each group.

    Groups with no templates map every proxy to ``None``.
    """
    if not inventory.entries:
        raise EmptyInventory("proxy_by_group of an empty inventory")
    sums = {name: [0] * len(PROXIES) for name, _, _ in FREQUENCY_GROUPS}
    queries = {name: 0 for name, _, _ in FREQUENCY_GROUPS}
    for entry in inventory.entries.values():
        g = group_of(entry.count)
        queries[g] += entry.count
        sums[g] = [a + b for a, b in zip(sums[g], entry.proxy_sums)]
    table: dict[str, dict[str, float | None]] = {}
    for name, _, _ in FREQUENCY_GROUPS:
        n = queries[name]
        table[name] = {p: (s / n if n else None) for p, s in zip(PROXIES, sums[name])}
    return table


@dataclass(frozen=True)
class SummaryRow:
    median: int
    mean: float
    min: int
    max: int


def summary_stats(profiles: Sequence[ComplexityProfile]) -> dict[str, SummaryRow]:
    """Per-proxy median (lower middle for even n), mean, min and max."""
    if not profiles:
        raise EmptyInput("summary of no profiles")
    out = {}
    for proxy in PROXIES:
        vals = sorted(getattr(p, proxy) for p in profiles)
        n = len(vals)
        out[proxy] = SummaryRow(
            median=vals[(n - 1) // 2],
            mean=sum(vals) / n,
            min=vals[0],
            max=vals[-1],
        )
    return out
