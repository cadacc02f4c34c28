"""Tokenization and the set-Jaccard kernel shared by both metric phases."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from typing import Collection


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    strip_punctuation: bool = True


DEFAULT_TOKENIZER = TokenizerConfig()


@lru_cache(maxsize=1 << 16)
def _tokenize(value: str, lowercase: bool, strip_punctuation: bool) -> tuple[str, ...]:
    if lowercase:
        value = value.casefold()
    if strip_punctuation:
        value = "".join(" " if unicodedata.category(ch).startswith("P") else ch for ch in value)
    return tuple(value.split())


def tokenize(value: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    """Split ``value`` into tokens.

    Case folding and punctuation-to-space replacement happen before the
    whitespace split, so ``"Saint-Petersburg "`` becomes
    ``["saint", "petersburg"]``.
    """
    return list(_tokenize(value, config.lowercase, config.strip_punctuation))


def token_set(value: str | None, config: TokenizerConfig = DEFAULT_TOKENIZER) -> frozenset[str]:
    if value is None:
        return frozenset()
    return frozenset(_tokenize(value, config.lowercase, config.strip_punctuation))


def jaccard(a: Collection[str], b: Collection[str]) -> float:
    """Set Jaccard index; 0.0 when either side is empty."""
    sa = a if isinstance(a, (set, frozenset)) else set(a)
    sb = b if isinstance(b, (set, frozenset)) else set(b)
    if not sa or not sb:
        return 0.0
    inter = len(sa & sb)
    if inter == 0:
        return 0.0
    return inter / (len(sa) + len(sb) - inter)


def prop_similarity(v1: str | None, v2: str | None, config: TokenizerConfig = DEFAULT_TOKENIZER) -> float:
    """Jaccard similarity of two property values; a missing value scores 0."""
    if v1 is None or v2 is None:
        return 0.0
    return jaccard(token_set(v1, config), token_set(v2, config))
