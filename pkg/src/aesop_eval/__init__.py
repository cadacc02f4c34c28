"""Evaluation toolkit for entity-centric information extraction."""

from .adapters import builtin_wikidata_schema, convert_triplets, read_triplet_file
from .assignment import AssignmentResult, brute_force_assignment, solve_assignment
from .corpus import Sample, read_corpus, write_corpus
from .entities import (
    EntityRecord,
    EntitySet,
    EntitySetParseError,
    Schema,
    parse_entity_set,
    serialize_entity_set,
    validate,
)
from .estimators import AesopScorer, CorpusPerturber
from .metric import (
    ALL_METRICS,
    VARIANTS,
    AssignmentMode,
    AssignmentWeights,
    MetricConfig,
    Normalization,
    SampleScore,
    TripletRecord,
    aesop_score,
    all_variants,
    build_similarity_matrix,
    pairwise_entity_similarity,
    score_metrics,
    triplet_metrics,
    triplet_metrics_via_aesop,
)
from .perturbation import PerturbationCatalog, PerturbationConfig, build_catalog, perturb_corpus
from .reporting import MetricReport, compare_side_by_side, correlate_variants, evaluate_corpus
from .text import TokenizerConfig, jaccard, prop_similarity, tokenize

__version__ = "0.1.0"
