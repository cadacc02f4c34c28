"""Corpus evaluation, metric correlation and side-by-side comparison."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .corpus import CorpusError, Sample, read_corpus
from .entities import EntitySet
from .metric import MetricConfig, check_metrics, score_metrics

logger = logging.getLogger(__name__)

TIE_ATOL = 1e-12


@dataclass
class MetricReport:
    metrics: tuple[str, ...]
    per_sample: list[tuple[str, dict[str, float]]]
    aggregate: dict[str, float]
    evaluated: int
    skipped: int
    config: dict
    warnings: list[str] = field(default_factory=list)

    def values(self, metric: str) -> np.ndarray:
        return np.array([scores[metric] for _, scores in self.per_sample])

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "metrics": list(self.metrics),
            "counts": {"evaluated": self.evaluated, "skipped": self.skipped},
            "aggregate": self.aggregate,
            "aggregate_percent": {k: 100.0 * v for k, v in self.aggregate.items()},
            "per_sample": [{"id": sid, "scores": scores} for sid, scores in self.per_sample],
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "MetricReport":
        try:
            return cls(
                metrics=tuple(obj["metrics"]),
                per_sample=[(row["id"], dict(row["scores"])) for row in obj["per_sample"]],
                aggregate=dict(obj["aggregate"]),
                evaluated=obj["counts"]["evaluated"],
                skipped=obj["counts"]["skipped"],
                config=obj.get("config", {}),
                warnings=list(obj.get("warnings", [])),
            )
        except (KeyError, TypeError) as exc:
            raise CorpusError(f"not a metric report: {exc}") from exc


def _load(corpus: str | Path | Sequence[Sample]) -> list[Sample]:
    if isinstance(corpus, (str, Path)):
        return read_corpus(corpus)
    return list(corpus)


def _join(gold: list[Sample], *preds: list[Sample]):
    """Align predictions to gold by id; unmatched gold ids get an empty set."""
    warnings = []
    skipped_ids: set[str] = set()
    gold_ids = {s.id for s in gold}
    lookups = []
    for pred in preds:
        by_id = {s.id: s for s in pred}
        extra = sorted(set(by_id) - gold_ids)
        for sid in extra:
            warnings.append(f"prediction {sid!r} has no gold sample; skipped")
        skipped_ids.update(extra)
        lookups.append(by_id)
    rows = []
    for g in gold:
        rows.append((g, [lk[g.id].entities if g.id in lk else EntitySet() for lk in lookups]))
        for lk in lookups:
            if g.id not in lk:
                warnings.append(f"gold sample {g.id!r} has no prediction; scored against an empty set")
    if not rows or all(not lk or not (gold_ids & set(lk)) for lk in lookups):
        raise CorpusError("no sample ids shared between gold and prediction corpora")
    return rows, len(skipped_ids), warnings


def evaluate_corpus(
    gold: str | Path | Sequence[Sample],
    pred: str | Path | Sequence[Sample],
    config: MetricConfig | None = None,
    metrics: Iterable[str] | None = None,
) -> MetricReport:
    """Score every gold sample against the prediction with the same id.

    The configured variant is always part of the report; ``metrics``
    defaults to every known metric. Aggregates are plain means in [0, 1].
    """
    config = config or MetricConfig()
    metrics = check_metrics(metrics)
    if config.variant not in metrics:
        metrics = (config.variant,) + metrics
    rows, skipped, warnings = _join(_load(gold), _load(pred))
    for w in warnings:
        logger.warning(w)
    per_sample = [(g.id, score_metrics(p, g.entities, config, metrics)) for g, (p,) in rows]
    aggregate = {name: math.fsum(s[name] for _, s in per_sample) / len(per_sample) for name in metrics}
    return MetricReport(
        metrics=metrics,
        per_sample=per_sample,
        aggregate=aggregate,
        evaluated=len(per_sample),
        skipped=skipped,
        config={**config.to_dict(), "primary_metric": config.variant},
        warnings=warnings,
    )


def write_report_json(obj, path: str | Path) -> None:
    data = obj.to_dict() if hasattr(obj, "to_dict") else obj
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def read_report_json(path: str | Path) -> MetricReport:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusError(f"cannot read report {path}: {exc}") from exc
    return MetricReport.from_dict(obj)


def write_report_csv(report: MetricReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")
        writer.writerow(["id", *report.metrics])
        for sid, scores in report.per_sample:
            writer.writerow([sid, *(repr(scores[m]) for m in report.metrics)])
        writer.writerow(["mean", *(repr(report.aggregate[m]) for m in report.metrics)])


# --- correlation ------------------------------------------------------------


def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    xc, yc = x - x.mean(), y - y.mean()
    r = float(np.dot(xc, yc) / math.sqrt(float(np.dot(xc, xc)) * float(np.dot(yc, yc))))
    return min(1.0, max(-1.0, r))


def _spearman(x: np.ndarray, y: np.ndarray) -> float | None:
    return _pearson(rankdata(x), rankdata(y))


@dataclass
class CorrelationReport:
    metrics: tuple[str, ...]
    # (a, b) -> {"pearson": r, "spearman": rho}; None marks zero variance.
    matrix: dict[tuple[str, str], dict[str, float | None]]
    sample_ids: list[str]
    scatter: dict[str, list[float]]

    def pearson(self, a: str, b: str) -> float | None:
        return self.matrix[a, b]["pearson"]

    def spearman(self, a: str, b: str) -> float | None:
        return self.matrix[a, b]["spearman"]

    def to_dict(self) -> dict:
        return {
            "metrics": list(self.metrics),
            "n_samples": len(self.sample_ids),
            "pairs": [
                {"a": a, "b": b, "pearson": v["pearson"], "spearman": v["spearman"]}
                for (a, b), v in self.matrix.items()
            ],
        }

    def write_scatter_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")
            writer.writerow(["id", *self.metrics])
            for k, sid in enumerate(self.sample_ids):
                writer.writerow([sid, *(repr(self.scatter[m][k]) for m in self.metrics)])


def correlate_variants(report: MetricReport, variants: Sequence[str] | None = None) -> CorrelationReport:
    """Pearson and Spearman coefficients between per-sample metric vectors.

    A metric paired with itself gets exactly 1.0 when it varies. Any pair
    involving a constant vector gets ``None`` instead of a number.
    """
    variants = tuple(variants) if variants is not None else tuple(report.metrics)
    missing = [v for v in variants if v not in report.metrics]
    if missing:
        raise ValueError(f"metrics not in report: {missing}")
    if len(report.per_sample) < 2:
        raise ValueError("correlation needs at least 2 samples")
    vectors = {v: report.values(v) for v in variants}
    for v, vec in vectors.items():
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"non-finite values for {v}")
    matrix: dict[tuple[str, str], dict[str, float | None]] = {}
    for i, a in enumerate(variants):
        for b in variants[i:]:
            x, y = vectors[a], vectors[b]
            if a == b:
                val = None if np.ptp(x) == 0 else 1.0
                cell = {"pearson": val, "spearman": val}
            else:
                cell = {"pearson": _pearson(x, y), "spearman": _spearman(x, y)}
            matrix[a, b] = cell
            matrix[b, a] = cell
    return CorrelationReport(
        metrics=variants,
        matrix=matrix,
        sample_ids=[sid for sid, _ in report.per_sample],
        scatter={v: [float(x) for x in vec] for v, vec in vectors.items()},
    )


# --- side by side -------------------------------------------------------------


@dataclass
class ComparisonReport:
    metrics: tuple[str, ...]
    per_sample: list[tuple[str, dict[str, str]]]  # winner per metric: "a", "b" or "tie"
    summary: dict[str, dict[str, float]]

    def to_dict(self) -> dict:
        return {
            "metrics": list(self.metrics),
            "summary": self.summary,
            "per_sample": [{"id": sid, "winner": w} for sid, w in self.per_sample],
        }


def compare_side_by_side(
    gold: str | Path | Sequence[Sample],
    pred_a: str | Path | Sequence[Sample],
    pred_b: str | Path | Sequence[Sample],
    config: MetricConfig | None = None,
    metrics: Iterable[str] | None = None,
) -> ComparisonReport:
    """Count, per metric, the samples on which A scores above B.

    ``a_preferred_pct`` is the share of A wins among samples that are not
    tied; it is 0 when every sample ties.
    """
    config = config or MetricConfig()
    metrics = check_metrics(metrics)
    rows, _, warnings = _join(_load(gold), _load(pred_a), _load(pred_b))
    for w in warnings:
        logger.warning(w)
    per_sample = []
    for g, (pa, pb) in rows:
        sa = score_metrics(pa, g.entities, config, metrics)
        sb = score_metrics(pb, g.entities, config, metrics)
        winner = {}
        for name in metrics:
            diff = sa[name] - sb[name]
            winner[name] = "tie" if abs(diff) <= TIE_ATOL else ("a" if diff > 0 else "b")
        per_sample.append((g.id, winner))
    summary = {}
    total = len(per_sample)
    for name in metrics:
        a = sum(1 for _, w in per_sample if w[name] == "a")
        b = sum(1 for _, w in per_sample if w[name] == "b")
        ties = total - a - b
        summary[name] = {
            "a": a,
            "b": b,
            "ties": ties,
            "a_preferred_pct": 100.0 * a / (a + b) if a + b else 0.0,
            "tie_pct": 100.0 * ties / total,
        }
    return ComparisonReport(metrics, per_sample, summary)
