"""Pluggable language detection.

The corpus filters only need a ``detect(text) -> code | None`` callable. The
reference implementation is a character-frequency naive Bayes classifier
trained on per-language fixture text; it is deliberately simple but fully
deterministic and serializable, which is all the desk-scale pipeline needs.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Protocol

from .errors import DataError


class LanguageDetector(Protocol):
    def detect(self, text: str) -> str | None:
        """Best-guess language code for text, or None when undecidable."""


class EchoDetector:
    """Always agrees with a fixed code; handy for tests and dry runs."""

    def __init__(self, code: str):
        self.code = code

    def detect(self, text: str) -> str | None:
        return self.code


class CharFreqDetector:
    """Per-language character log-frequency profiles with Laplace smoothing."""

    def __init__(self, profiles: dict[str, dict[str, float]], fallback: float):
        self.profiles = profiles
        self.fallback = fallback

    @classmethod
    def train(cls, corpora: dict[str, Iterable[str]], smoothing: float = 1.0) -> "CharFreqDetector":
        if not corpora:
            raise DataError("cannot train a detector on an empty corpus map")
        counts: dict[str, dict[str, int]] = {}
        alphabet: set[str] = set()
        for lang in sorted(corpora):
            table: dict[str, int] = {}
            for line in corpora[lang]:
                for ch in line:
                    if ch.isspace():
                        continue
                    table[ch] = table.get(ch, 0) + 1
            counts[lang] = table
            alphabet.update(table)
        if not alphabet:
            raise DataError("detector training text contains no non-space characters")
        vocab = len(alphabet) + 1  # +1 for unseen characters
        profiles: dict[str, dict[str, float]] = {}
        for lang, table in counts.items():
            total = sum(table.values()) + smoothing * vocab
            profiles[lang] = {
                ch: math.log((n + smoothing) / total) for ch, n in sorted(table.items())
            }
            profiles[lang]["__unk__"] = math.log(smoothing / total)
        return cls(profiles, fallback=math.log(smoothing))

    def detect(self, text: str) -> str | None:
        chars = [c for c in text if not c.isspace()]
        if not chars:
            return None
        best_lang = None
        best_score = -math.inf
        for lang in sorted(self.profiles):
            prof = self.profiles[lang]
            unk = prof["__unk__"]
            score = 0.0
            for c in chars:
                score += prof.get(c, unk)
            if score > best_score:
                best_score = score
                best_lang = lang
        return best_lang

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"profiles": self.profiles, "fallback": self.fallback}, f)

    @classmethod
    def load(cls, path: str) -> "CharFreqDetector":
        with open(path, "r", encoding="utf-8") as f:
            blob = json.load(f)
        return cls(profiles=blob["profiles"], fallback=blob["fallback"])
