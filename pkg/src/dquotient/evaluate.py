"""Pooling of metric maps and correlation against observer scores."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .metrics import MetricMap


class ScoreError(ValueError):
    pass


def _values(m) -> np.ndarray:
    v = np.asarray(m.values if isinstance(m, MetricMap) else m, dtype=np.float64)
    if v.size == 0:
        raise ValueError("cannot pool an empty map")
    return v.ravel()


def pool_minkowski(m, p: float = 1.0, absolute: bool = False) -> float:
    """(mean |v|^p)^(1/p).

    Negative values are only accepted with an even integer ``p`` or with
    ``absolute=True``; otherwise the sign would silently be discarded.
    """
    if not p > 0:
        raise ValueError(f"Minkowski exponent must be positive, got {p}")
    v = _values(m)
    if not absolute and (v < 0).any() and not (float(p).is_integer() and int(p) % 2 == 0):
        raise ValueError("map has negative values; use absolute=True or an even integer exponent")
    a = np.abs(v)
    if p == 1:
        return float(np.mean(a))
    return float(np.mean(a**p) ** (1.0 / p))


def pool_mean_ssim(m) -> float:
    return float(np.mean(_values(m)))


def pearson(xs, ys) -> float:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two 1-D sequences of equal length")
    if x.size < 3:
        raise ValueError("pearson needs at least 3 points")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValueError("pearson undefined for a sequence with zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def spearman(xs, ys) -> float:
    """Pearson correlation of average ranks."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.size and (np.all(x == x[0]) or np.all(y == y[0])):
        raise ValueError("spearman undefined when all values of a sequence are equal")
    return pearson(rankdata(x), rankdata(y))


@dataclass(frozen=True)
class ScoreRow:
    id: str
    metric: float
    score: float


@dataclass(frozen=True)
class ScoreTable:
    rows: tuple[ScoreRow, ...]

    @property
    def metrics(self) -> np.ndarray:
        return np.array([r.metric for r in self.rows])

    @property
    def scores(self) -> np.ndarray:
        return np.array([r.score for r in self.rows])

    def __len__(self):
        return len(self.rows)


def load_scores_csv(path) -> ScoreTable:
    """Parse an ``id,metric,score`` CSV; blank lines are skipped."""
    rows = []
    seen = set()
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["id", "metric", "score"]:
            raise ScoreError(f"{path}: expected header 'id,metric,score', got {header!r}")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ScoreError(f"{path}:{line}: expected 3 columns, got {len(row)}")
            ident = row[0].strip()
            try:
                metric, score = float(row[1]), float(row[2])
            except ValueError:
                raise ScoreError(f"{path}:{line}: non-numeric metric or score in {row!r}") from None
            if not (math.isfinite(metric) and math.isfinite(score)):
                raise ScoreError(f"{path}:{line}: metric and score must be finite")
            if ident in seen:
                raise ScoreError(f"{path}:{line}: duplicate id {ident!r}")
            seen.add(ident)
            rows.append(ScoreRow(ident, metric, score))
    return ScoreTable(tuple(rows))


def correlation_report(table: ScoreTable, metric: str = "dq", p: float = 1.0) -> dict:
    """Pearson on raw and square-rooted metric values plus Spearman.

    The square root can only change Pearson; ranks, and so Spearman, are
    untouched for nonnegative metrics.
    """
    if len(table) < 3:
        raise ScoreError("correlation needs at least 3 rows")
    m, s = table.metrics, table.scores
    report = {
        "schema": 1,
        "metric": metric,
        "p": p,
        "pooled": {r.id: r.metric for r in table.rows},
        "pearson_raw": pearson(m, s),
        "pearson_sqrt": pearson(np.sqrt(m), s) if (m >= 0).all() else None,
        "spearman": spearman(m, s),
    }
    return report
