"""Beam search with power-form length normalization over abstract scorers.

A scoring model maps (prefix ids, source ids) to a log-probability vector
over its vocabulary. Zero-probability tokens may be encoded as -inf and are
simply never expanded; NaN or +inf scores are a hard error. Finished
hypotheses end in EOS and are ranked by logprob / len(tokens)**lenpen with
ties broken by token-sequence lexicographic order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import DataError, NumericError


class ScoringModel(Protocol):
    vocab_size: int
    eos_id: int

    def score(self, prefix: Sequence[int], source: Sequence[int]) -> np.ndarray:
        """Log-probability vector over the vocabulary for the next token."""


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[int, ...]
    logprob: float
    normalized_score: float


def beam_search(
    model: ScoringModel,
    source: Sequence[int],
    beam: int = 4,
    lenpen: float = 1.0,
    max_len: int = 64,
) -> list[Hypothesis]:
    """Standard beam search; returns up to ``beam`` finished hypotheses.

    Live hypotheses are expanded over the whole vocabulary each step; EOS
    extensions move to the finished pool, the rest compete for the top-beam
    slots by accumulated logprob. The search stops once ``beam`` finished
    hypotheses exist or ``max_len`` tokens (including EOS) were produced.
    """
    if beam < 1:
        raise DataError("beam must be >= 1")
    if max_len < 1:
        raise DataError("max_len must be >= 1")
    source = list(source)
    live: list[tuple[list[int], float]] = [([], 0.0)]
    finished: list[Hypothesis] = []
    for _ in range(max_len):
        candidates: list[tuple[list[int], float]] = []
        for tokens, lp in live:
            scores = np.asarray(model.score(tokens, source), dtype=float)
            if scores.shape != (model.vocab_size,):
                raise DataError(
                    f"model returned {scores.shape} scores for vocab {model.vocab_size}"
                )
            if np.any(np.isnan(scores)) or np.any(scores == math.inf):
                raise NumericError("scoring model produced non-finite scores")
            for tok in range(model.vocab_size):
                nlp = lp + float(scores[tok])
                if nlp == -math.inf:
                    continue
                seq = tokens + [tok]
                if tok == model.eos_id:
                    norm = nlp / (len(seq) ** lenpen)
                    finished.append(Hypothesis(tuple(seq), nlp, norm))
                else:
                    candidates.append((seq, nlp))
        if len(finished) >= beam or not candidates:
            break
        candidates.sort(key=lambda c: (-c[1], c[0]))
        live = candidates[:beam]
    finished.sort(key=lambda h: (-h.normalized_score, h.tokens))
    return finished[:beam]


# -- Serializable scoring models ----------------------------------------------


class TableModel:
    """Explicit next-token log-probability tables keyed by prefix."""

    def __init__(self, vocab_size: int, eos_id: int, tables: dict[tuple[int, ...], np.ndarray]):
        self.vocab_size = vocab_size
        self.eos_id = eos_id
        self.tables = tables

    def score(self, prefix, source):
        key = tuple(prefix)
        try:
            return self.tables[key]
        except KeyError:
            raise DataError(f"table model has no entry for prefix {key}") from None

    def to_dict(self) -> dict:
        return {
            "type": "table",
            "vocab_size": self.vocab_size,
            "eos_id": self.eos_id,
            "tables": {
                ",".join(map(str, k)): np.asarray(v).tolist() for k, v in self.tables.items()
            },
        }


class LexiconModel:
    """Near-deterministic token-to-token mapping conditioned on the source.

    While source tokens remain, mass 1 - eps goes to mapping[source[t]] and
    eps spreads over the other non-EOS tokens; EOS stays at -inf so the
    frontier cannot finish early. Once the source is exhausted EOS takes
    1 - eps. Stands in for a trained decoder in the desk demo.
    """

    def __init__(self, vocab_size: int, eos_id: int, mapping: dict[int, int], eps: float = 1e-4):
        if not 0.0 <= eps < 1.0:
            raise DataError("eps must lie in [0, 1)")
        self.vocab_size = vocab_size
        self.eos_id = eos_id
        self.mapping = {int(k): int(v) for k, v in mapping.items()}
        self.eps = eps

    def score(self, prefix, source):
        step = len(prefix)
        in_source = step < len(source)
        top = self.mapping.get(int(source[step]), self.eos_id) if in_source else self.eos_id
        scores = np.full(self.vocab_size, -math.inf)
        n_rest = self.vocab_size - (2 if in_source else 1)
        eps = self.eps if n_rest > 0 else 0.0
        if eps > 0.0:
            rest = math.log(eps / n_rest)
            scores[:] = rest
            if in_source:
                scores[self.eos_id] = -math.inf
        scores[top] = math.log1p(-eps) if eps > 0.0 else 0.0
        return scores

    def to_dict(self) -> dict:
        return {
            "type": "lexicon",
            "vocab_size": self.vocab_size,
            "eos_id": self.eos_id,
            "mapping": {str(k): v for k, v in self.mapping.items()},
            "eps": self.eps,
        }


class WordLexiconModel:
    """Lexicon model with its own word vocabulary for text-level decoding."""

    def __init__(self, source_vocab: dict[str, int], target_words: list[str],
                 mapping: dict[int, int], eps: float = 1e-4):
        self.source_vocab = source_vocab
        self.target_words = target_words
        # id space: 0 = EOS, then target words
        self.vocab_size = len(target_words) + 1
        self.eos_id = 0
        self._inner = LexiconModel(self.vocab_size, 0, mapping, eps)

    def score(self, prefix, source):
        return self._inner.score(prefix, source)

    def encode_source(self, text: str) -> list[int]:
        ids = []
        for word in text.split():
            if word not in self.source_vocab:
                raise DataError(f"word {word!r} not in the decode model's source vocabulary")
            ids.append(self.source_vocab[word])
        return ids

    def decode_target(self, ids: Sequence[int]) -> str:
        words = []
        for i in ids:
            if i == self.eos_id:
                break
            words.append(self.target_words[int(i) - 1])
        return " ".join(words)

    def to_dict(self) -> dict:
        return {
            "type": "word_lexicon",
            "source_vocab": self.source_vocab,
            "target_words": self.target_words,
            "mapping": {str(k): v for k, v in self._inner.mapping.items()},
            "eps": self._inner.eps,
        }


def save_model(model, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model.to_dict(), f, ensure_ascii=False)
        f.write("\n")


def load_model(path: str | Path):
    with open(path, "r", encoding="utf-8") as f:
        blob = json.load(f)
    kind = blob.get("type")
    if kind == "table":
        tables = {}
        for key, row in blob["tables"].items():
            prefix = tuple(int(x) for x in key.split(",")) if key else ()
            tables[prefix] = np.array(row, dtype=float)
        return TableModel(blob["vocab_size"], blob["eos_id"], tables)
    if kind == "lexicon":
        return LexiconModel(
            blob["vocab_size"], blob["eos_id"],
            {int(k): v for k, v in blob["mapping"].items()}, blob.get("eps", 1e-4),
        )
    if kind == "word_lexicon":
        return WordLexiconModel(
            blob["source_vocab"], blob["target_words"],
            {int(k): v for k, v in blob["mapping"].items()}, blob.get("eps", 1e-4),
        )
    raise DataError(f"unknown scoring model type {kind!r}")
