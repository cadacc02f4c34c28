"""scikit-learn compatible wrappers.

``AesopScorer`` exposes the metric through ``get_params``/``set_params`` so
it can be cloned, grid-searched over weights, or dropped into a pipeline
as a feature transformer (one column per metric). ``CorpusPerturber``
learns the value catalog in ``fit`` and rewrites corpora in
``transform``.
"""

from __future__ import annotations

from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import Sample
from .entities import EntityRecord, EntitySet, parse_entity_set
from .metric import (
    ALL_METRICS,
    AssignmentMode,
    AssignmentWeights,
    MetricConfig,
    Normalization,
    check_metrics,
    score_metrics,
)
from .perturbation import PerturbationConfig, build_catalog, perturb_corpus
from .text import TokenizerConfig


def check_entity_set(x: Any) -> EntitySet:
    """Coerce an entity set, a canonical mapping/JSON string, or a list of
    records into an :class:`EntitySet`."""
    if isinstance(x, EntitySet):
        return x
    if isinstance(x, (str, bytes, Mapping)):
        return parse_entity_set(x)
    if isinstance(x, Iterable):
        items = list(x)
        if all(isinstance(r, EntityRecord) for r in items):
            return EntitySet(tuple(items))
    raise TypeError(f"cannot interpret {type(x).__name__} as an entity set")


def check_paired_sets(pred: Sequence, gold: Sequence) -> tuple[list[EntitySet], list[EntitySet]]:
    if len(pred) != len(gold):
        raise ValueError(f"pred and gold differ in length: {len(pred)} != {len(gold)}")
    return [check_entity_set(p) for p in pred], [check_entity_set(g) for g in gold]


def check_corpus(corpus: Iterable) -> list[Sample]:
    out = []
    for k, item in enumerate(corpus):
        if isinstance(item, Sample):
            out.append(item)
        else:
            text, entities = item
            out.append(Sample(str(k), check_entity_set(entities), text))
    return out


class AesopScorer(BaseEstimator, TransformerMixin):
    """AESOP scorer with estimator-style parameters.

    Parameters
    ----------
    assignment : {"multiprop", "approxname", "exactname"}
    normalization : {"max", "precision", "recall"}
    name_weight : float
        Weight of the name in the multiprop assignment matrix; the rest is
        spread over the other keys.
    lowercase, strip_punctuation : bool
        Tokenizer switches.
    type_in_assignment : bool
        Count ``type`` as a non-name key in the multiprop matrix.
    metrics : sequence of str, optional
        Columns produced by ``transform``; defaults to every metric.
    """

    def __init__(
        self,
        assignment="multiprop",
        normalization="max",
        name_weight=0.9,
        lowercase=True,
        strip_punctuation=True,
        type_in_assignment=True,
        metrics=None,
    ):
        self.assignment = assignment
        self.normalization = normalization
        self.name_weight = name_weight
        self.lowercase = lowercase
        self.strip_punctuation = strip_punctuation
        self.type_in_assignment = type_in_assignment
        self.metrics = metrics

    def _config(self) -> MetricConfig:
        return MetricConfig(
            assignment_mode=AssignmentMode(self.assignment),
            normalization=Normalization(self.normalization),
            weights=AssignmentWeights.from_name_weight(self.name_weight),
            tokenizer=TokenizerConfig(self.lowercase, self.strip_punctuation),
            type_in_assignment=self.type_in_assignment,
        )

    def fit(self, X=None, y=None):
        """Validate parameters. Nothing is learned from data."""
        self.config_ = self._config()
        self.metric_names_ = check_metrics(self.metrics) if self.metrics is not None else ALL_METRICS
        return self

    def _fitted_config(self) -> MetricConfig:
        if not hasattr(self, "config_"):
            self.fit()
        return self.config_

    def score_samples(self, pred: Sequence, gold: Sequence) -> np.ndarray:
        """Per-sample value of the configured variant."""
        config = self._fitted_config()
        pred, gold = check_paired_sets(pred, gold)
        name = config.variant
        return np.array([score_metrics(p, g, config, [name])[name] for p, g in zip(pred, gold)])

    def score(self, pred: Sequence, gold: Sequence) -> float:
        """Mean of :meth:`score_samples`."""
        values = self.score_samples(pred, gold)
        return float(values.mean()) if values.size else 1.0

    def transform(self, X: Sequence[tuple[Any, Any]]) -> np.ndarray:
        """Map ``(pred, gold)`` pairs to a ``(n_pairs, n_metrics)`` array."""
        config = self._fitted_config()
        names = self.metric_names_
        rows = []
        for pred, gold in X:
            scores = score_metrics(check_entity_set(pred), check_entity_set(gold), config, names)
            rows.append([scores[n] for n in names])
        return np.array(rows, dtype=float).reshape(len(rows), len(names))

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "metric_names_")
        return np.array(self.metric_names_, dtype=object)


class CorpusPerturber(BaseEstimator, TransformerMixin):
    """Learn per-(type, key) value pools and swap values in new corpora.

    ``transform`` must receive the corpus ``fit`` saw (or one with the same
    sample order) for the same-entity exclusion to hold. The change log of
    the last call is kept in ``change_log_``.
    """

    def __init__(self, seed=0, rate=1.0, require_text_match=True):
        self.seed = seed
        self.rate = rate
        self.require_text_match = require_text_match

    def fit(self, X, y=None):
        self.config_ = PerturbationConfig(self.seed, self.rate, self.require_text_match)
        self.catalog_ = build_catalog(check_corpus(X))
        return self

    def transform(self, X) -> list[Sample]:
        check_is_fitted(self, "catalog_")
        out, self.change_log_ = perturb_corpus(check_corpus(X), self.catalog_, self.config_)
        return out
