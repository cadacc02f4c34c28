"""AESOP entity-set scores and classical triplet precision/recall.

A score is computed in two phases. Phase 1 builds an ``m x n`` similarity
matrix between predicted and gold entities (how depends on the assignment
mode) and solves the one-to-one assignment. Phase 2 scores every matched
pair with :func:`pairwise_entity_similarity`, an equal-weight mean over the
union of both records' keys, and divides the sum by the normalizer.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .assignment import solve_assignment
from .entities import NAME_KEY, TYPE_KEY, EntityRecord, EntitySet
from .text import DEFAULT_TOKENIZER, TokenizerConfig, jaccard, token_set, tokenize


class AssignmentMode(str, enum.Enum):
    EXACT_NAME = "exactname"
    APPROX_NAME = "approxname"
    MULTI_PROP = "multiprop"


class Normalization(str, enum.Enum):
    PRECISION = "precision"
    RECALL = "recall"
    MAX = "max"


@dataclass(frozen=True)
class AssignmentWeights:
    name_weight: float = 0.9
    other_weight: float = 0.1

    def __post_init__(self):
        if self.name_weight < 0 or self.other_weight < 0:
            raise ValueError("assignment weights must be non-negative")
        if not math.isclose(self.name_weight + self.other_weight, 1.0, abs_tol=1e-9):
            raise ValueError(
                f"assignment weights must sum to 1, got {self.name_weight} + {self.other_weight}"
            )

    @classmethod
    def from_name_weight(cls, name_weight: float) -> "AssignmentWeights":
        return cls(name_weight, 1.0 - name_weight)


@dataclass(frozen=True)
class MetricConfig:
    assignment_mode: AssignmentMode = AssignmentMode.MULTI_PROP
    normalization: Normalization = Normalization.MAX
    weights: AssignmentWeights = field(default_factory=AssignmentWeights)
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER
    # Whether "type" joins the non-name property pool of the MultiProp matrix.
    type_in_assignment: bool = True

    def __post_init__(self):
        object.__setattr__(self, "assignment_mode", AssignmentMode(self.assignment_mode))
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    @property
    def variant(self) -> str:
        return variant_name(self.assignment_mode, self.normalization)

    def to_dict(self) -> dict:
        return {
            "assignment_mode": self.assignment_mode.value,
            "normalization": self.normalization.value,
            "name_weight": self.weights.name_weight,
            "other_weight": self.weights.other_weight,
            "lowercase": self.tokenizer.lowercase,
            "strip_punctuation": self.tokenizer.strip_punctuation,
            "type_in_assignment": self.type_in_assignment,
        }


@dataclass(frozen=True)
class SampleScore:
    value: float
    matched_pairs: tuple[tuple[int, int, float], ...]
    m: int
    n: int


def variant_name(mode: AssignmentMode | str, norm: Normalization | str) -> str:
    return f"aesop-{AssignmentMode(mode).value}-{Normalization(norm).value}"


VARIANTS: tuple[str, ...] = tuple(variant_name(a, n) for a in AssignmentMode for n in Normalization)
TRIPLET_METRICS = ("triplet-precision", "triplet-recall", "triplet-f1")


def _tokenized(rec: EntityRecord, tok: TokenizerConfig) -> dict[str, frozenset[str]]:
    return {key: token_set(value, tok) for key, value in rec.fields().items()}


def _psi_ent(a: dict[str, frozenset[str]], b: dict[str, frozenset[str]]) -> float:
    keys = a.keys() | b.keys()
    total = math.fsum(jaccard(a[k], b[k]) for k in keys if k in a and k in b)
    return total / len(keys)


def pairwise_entity_similarity(e1: EntityRecord, e2: EntityRecord, tok: TokenizerConfig = DEFAULT_TOKENIZER) -> float:
    """Equal-weight mean of per-key Jaccard scores over the union of keys.

    The name counts under ``"entity name"`` and the type under ``"type"``;
    a key present on one side only contributes 0.
    """
    return _psi_ent(_tokenized(e1, tok), _tokenized(e2, tok))


def _multiprop_cell(a, b, weights: AssignmentWeights, with_type: bool) -> float:
    name = jaccard(a[NAME_KEY], b[NAME_KEY])
    keys = (a.keys() | b.keys()) - {NAME_KEY}
    if not with_type:
        keys.discard(TYPE_KEY)
    if keys:
        other = math.fsum(jaccard(a[k], b[k]) for k in keys if k in a and k in b) / len(keys)
    else:
        other = 0.0
    return weights.name_weight * name + weights.other_weight * other


def _similarity_from_tokens(pred_names, gold_names, pred_tok, gold_tok, mode, weights, with_type) -> np.ndarray:
    m, n = len(pred_tok), len(gold_tok)
    S = np.zeros((m, n))
    if mode is AssignmentMode.EXACT_NAME:
        gold_folded = [g.casefold() for g in gold_names]
        for i, p in enumerate(pred_names):
            pf = p.casefold()
            for j, g in enumerate(gold_folded):
                S[i, j] = 1.0 if pf == g else 0.0
    elif mode is AssignmentMode.APPROX_NAME:
        for i, a in enumerate(pred_tok):
            for j, b in enumerate(gold_tok):
                S[i, j] = jaccard(a[NAME_KEY], b[NAME_KEY])
    else:
        for i, a in enumerate(pred_tok):
            for j, b in enumerate(gold_tok):
                S[i, j] = _multiprop_cell(a, b, weights, with_type)
    return S


def build_similarity_matrix(
    pred: EntitySet,
    gold: EntitySet,
    mode: AssignmentMode | str = AssignmentMode.MULTI_PROP,
    weights: AssignmentWeights | None = None,
    tok: TokenizerConfig = DEFAULT_TOKENIZER,
    type_in_assignment: bool = True,
) -> np.ndarray:
    """Phase-1 similarity matrix of shape ``(len(pred), len(gold))``.

    * ``exactname``: 1 when names are equal ignoring case, else 0.
    * ``approxname``: token Jaccard of the names.
    * ``multiprop``: ``name_weight * name_jaccard + other_weight * mean``
      of the Jaccard scores over the union of non-name keys. The second
      term is 0 when neither entity has a non-name key, so a bare matching
      name scores ``name_weight`` rather than 1.
    """
    weights = weights or AssignmentWeights()
    mode = AssignmentMode(mode)
    pred_tok = [_tokenized(e, tok) for e in pred]
    gold_tok = [_tokenized(e, tok) for e in gold]
    return _similarity_from_tokens(
        [e.name for e in pred], [e.name for e in gold], pred_tok, gold_tok, mode, weights, type_in_assignment
    )


def _normalized(total: float, m: int, n: int, norm: Normalization) -> float:
    if m == 0 and n == 0:
        return 1.0
    mu = {Normalization.PRECISION: m, Normalization.RECALL: n, Normalization.MAX: max(m, n)}[norm]
    if mu == 0:
        return 0.0
    return total / mu


class _PairScorer:
    """Caches tokenized records and the phase-2 matrix for one (pred, gold) pair."""

    def __init__(self, pred: EntitySet, gold: EntitySet, tok: TokenizerConfig):
        self.pred, self.gold = pred, gold
        self.pred_tok = [_tokenized(e, tok) for e in pred]
        self.gold_tok = [_tokenized(e, tok) for e in gold]
        self._psi: np.ndarray | None = None

    @property
    def psi(self) -> np.ndarray:
        if self._psi is None:
            psi = np.zeros((len(self.pred_tok), len(self.gold_tok)))
            for i, a in enumerate(self.pred_tok):
                for j, b in enumerate(self.gold_tok):
                    psi[i, j] = _psi_ent(a, b)
            self._psi = psi
        return self._psi

    def matched(self, mode: AssignmentMode, weights: AssignmentWeights, with_type: bool):
        S = _similarity_from_tokens(
            [e.name for e in self.pred], [e.name for e in self.gold],
            self.pred_tok, self.gold_tok, mode, weights, with_type,
        )
        # Ties in phase 1 go to the assignment with the best phase-2 total, so
        # the score cannot depend on entity order.
        result = solve_assignment(S, secondary=self.psi)
        psi = self.psi
        return tuple((i, j, float(psi[i, j])) for i, j in result.pairs)


def _sample_score(matched, m: int, n: int, norm: Normalization) -> SampleScore:
    total = math.fsum(p for _, _, p in matched)
    return SampleScore(_normalized(total, m, n, norm), matched, m, n)


def aesop_score(pred: EntitySet, gold: EntitySet, config: MetricConfig | None = None) -> SampleScore:
    """Score ``pred`` against ``gold`` under one metric variant.

    Two empty sets score 1.0. A zero normalizer with a non-empty opposite
    set (precision with nothing predicted, recall with nothing to find)
    scores 0.0.
    """
    config = config or MetricConfig()
    if len(pred) == 0 or len(gold) == 0:
        return _sample_score((), len(pred), len(gold), config.normalization)
    scorer = _PairScorer(pred, gold, config.tokenizer)
    matched = scorer.matched(config.assignment_mode, config.weights, config.type_in_assignment)
    return _sample_score(matched, len(pred), len(gold), config.normalization)


def all_variants(
    pred: EntitySet,
    gold: EntitySet,
    weights: AssignmentWeights | None = None,
    tok: TokenizerConfig = DEFAULT_TOKENIZER,
    type_in_assignment: bool = True,
) -> dict[str, SampleScore]:
    """All nine assignment x normalization variants, keyed by variant name."""
    weights = weights or AssignmentWeights()
    m, n = len(pred), len(gold)
    scorer = _PairScorer(pred, gold, tok) if m and n else None
    out = {}
    for mode in AssignmentMode:
        matched = scorer.matched(mode, weights, type_in_assignment) if scorer else ()
        for norm in Normalization:
            out[variant_name(mode, norm)] = _sample_score(matched, m, n, norm)
    return out


def harmonic_mean(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


# --- triplets -------------------------------------------------------------


@dataclass(frozen=True)
class TripletRecord:
    subject: str
    relation: str
    object: str
    subject_type: str | None = None

    def __post_init__(self):
        for name in ("subject", "relation", "object"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise ValueError(f"triplet {name} must be a non-empty string, got {value!r}")


def _normalize_triplet(t: TripletRecord, tok: TokenizerConfig):
    return (tuple(tokenize(t.subject, tok)), tuple(tokenize(t.relation, tok)), tuple(tokenize(t.object, tok)))


def _ratios(correct: int, n_pred: int, n_gold: int) -> tuple[float, float]:
    if n_pred == 0 and n_gold == 0:
        return 1.0, 1.0
    precision = correct / n_pred if n_pred else 0.0
    recall = correct / n_gold if n_gold else 0.0
    return precision, recall


def triplet_metrics(
    pred_triplets: Sequence[TripletRecord],
    gold_triplets: Sequence[TripletRecord],
    tok: TokenizerConfig = DEFAULT_TOKENIZER,
) -> tuple[float, float, float]:
    """Exact-match triplet precision, recall and F1.

    Triplets are compared after tokenization; duplicates match one-to-one.
    """
    pred_c = Counter(_normalize_triplet(t, tok) for t in pred_triplets)
    gold_c = Counter(_normalize_triplet(t, tok) for t in gold_triplets)
    correct = sum((pred_c & gold_c).values())
    p, r = _ratios(correct, len(pred_triplets), len(gold_triplets))
    return p, r, harmonic_mean(p, r)


def triplet_metrics_via_aesop(
    pred_triplets: Sequence[TripletRecord],
    gold_triplets: Sequence[TripletRecord],
    tok: TokenizerConfig = DEFAULT_TOKENIZER,
) -> tuple[float, float]:
    """Triplet precision and recall computed as AESOP instances.

    Every triplet becomes an entity named by its subject with the single
    property ``relation -> object``. Both the assignment similarity and the
    pairwise score are all-or-nothing: 1 when name, key and value agree.
    The matched total divided by ``m`` (``n``) is precision (recall).
    """
    pred_n = [_normalize_triplet(t, tok) for t in pred_triplets]
    gold_n = [_normalize_triplet(t, tok) for t in gold_triplets]
    m, n = len(pred_n), len(gold_n)
    if m and n:
        psi = np.array([[1.0 if a == b else 0.0 for b in gold_n] for a in pred_n])
        result = solve_assignment(psi)
        matched = tuple((i, j, float(psi[i, j])) for i, j in result.pairs)
    else:
        matched = ()
    precision = _sample_score(matched, m, n, Normalization.PRECISION).value
    recall = _sample_score(matched, m, n, Normalization.RECALL).value
    return precision, recall


def entity_set_to_triplets(entity_set: Iterable[EntityRecord]) -> list[TripletRecord]:
    """Flatten entities into ``(name, key, value)`` triplets.

    The entity type is carried on ``subject_type``, not as a triplet.
    Empty values are dropped.
    """
    out = []
    for rec in entity_set:
        for key, value in rec.properties.items():
            if value.strip() and key.strip():
                out.append(TripletRecord(rec.name, key, value, rec.entity_type))
    return out


def aesop_f1_name(mode: AssignmentMode | str) -> str:
    return f"aesop-{AssignmentMode(mode).value}-f1"


# Harmonic mean of the precision and recall variants; a convenience only,
# not one of the nine defined variants.
AESOP_F1 = tuple(aesop_f1_name(a) for a in AssignmentMode)
ALL_METRICS: tuple[str, ...] = VARIANTS + AESOP_F1 + TRIPLET_METRICS


def _parse_metric(name: str) -> tuple[str, AssignmentMode | None, str]:
    if name in TRIPLET_METRICS:
        return "triplet", None, name.split("-", 1)[1]
    parts = name.split("-")
    if len(parts) == 3 and parts[0] == "aesop":
        try:
            mode = AssignmentMode(parts[1])
        except ValueError:
            pass
        else:
            if parts[2] == "f1" or parts[2] in Normalization._value2member_map_:
                return "aesop", mode, parts[2]
    raise ValueError(f"unknown metric {name!r}; expected one of {', '.join(ALL_METRICS)}")


def check_metrics(metrics: Iterable[str] | None) -> tuple[str, ...]:
    if metrics is None:
        return ALL_METRICS
    metrics = tuple(dict.fromkeys(metrics))
    for name in metrics:
        _parse_metric(name)
    return metrics


def score_metrics(
    pred: EntitySet,
    gold: EntitySet,
    config: MetricConfig | None = None,
    metrics: Iterable[str] | None = None,
) -> dict[str, float]:
    """Values of the named metrics for one sample, in request order.

    Weights, tokenizer and the type toggle come from ``config``; each
    assignment mode is solved once however many normalizations use it.
    """
    config = config or MetricConfig()
    metrics = check_metrics(metrics)
    parsed = {name: _parse_metric(name) for name in metrics}
    m, n = len(pred), len(gold)
    scorer = _PairScorer(pred, gold, config.tokenizer) if m and n else None
    matched_by_mode: dict[AssignmentMode, tuple] = {}
    triplet_prf = None
    out = {}
    for name, (family, mode, tail) in parsed.items():
        if family == "triplet":
            if triplet_prf is None:
                triplet_prf = triplet_metrics(
                    entity_set_to_triplets(pred), entity_set_to_triplets(gold), config.tokenizer
                )
            out[name] = triplet_prf[("precision", "recall", "f1").index(tail)]
            continue
        if mode not in matched_by_mode:
            matched_by_mode[mode] = (
                scorer.matched(mode, config.weights, config.type_in_assignment) if scorer else ()
            )
        matched = matched_by_mode[mode]
        if tail == "f1":
            p = _sample_score(matched, m, n, Normalization.PRECISION).value
            r = _sample_score(matched, m, n, Normalization.RECALL).value
            out[name] = harmonic_mean(p, r)
        else:
            out[name] = _sample_score(matched, m, n, Normalization(tail)).value
    return out
