"""Corpus-level sentencepiece BLEU and ChrF++ with category reporting.

spbleu tokenizes both sides with a shared subword model and computes corpus
BLEU (orders 1..4, brevity penalty exp(min(0, 1 - ref/hyp)), epsilon-floor
smoothing). chrfpp averages per-order F-scores (beta=2) over character
n-grams 1..6 (whitespace removed) and word n-grams 1..2. Orders where
neither side produced any n-gram are skipped so identical corpora score
exactly 100. Scores are deterministic and internally reproducible; no
bit-parity with external scorers is claimed.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import DataError
from .langs import check_lang, is_african

BLEU_ORDER = 4
CHRF_CHAR_ORDER = 6
CHRF_WORD_ORDER = 2
CHRF_BETA = 2.0
EPS_FLOOR = 1e-9

CATEGORIES = ("X-Eng", "Eng-X", "X-Fra", "Fra-X", "X-X", "All")

_WS_RE = re.compile(r"\s+")


def _ngram_counts(tokens: list, order: int) -> Counter:
    return Counter(tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1))


def spbleu(hypotheses: list[str], references: list[str], eval_tokenizer) -> float:
    """Corpus BLEU over subword-tokenized text, scaled to [0, 100]."""
    if not references or len(hypotheses) != len(references):
        raise DataError("hypotheses and references must be equal-length, non-empty lists")
    correct = [0] * BLEU_ORDER
    total = [0] * BLEU_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_ids = eval_tokenizer.encode(hyp)
        ref_ids = eval_tokenizer.encode(ref)
        hyp_len += len(hyp_ids)
        ref_len += len(ref_ids)
        for n in range(1, BLEU_ORDER + 1):
            hyp_ngrams = _ngram_counts(hyp_ids, n)
            ref_ngrams = _ngram_counts(ref_ids, n)
            overlap = hyp_ngrams & ref_ngrams
            correct[n - 1] += sum(overlap.values())
            total[n - 1] += sum(hyp_ngrams.values())
    if hyp_len == 0:
        return 0.0
    log_precision = 0.0
    effective_orders = 0
    for n in range(BLEU_ORDER):
        if total[n] == 0:
            continue
        effective_orders += 1
        numer = max(float(correct[n]), EPS_FLOOR * total[n])
        log_precision += math.log(numer / total[n])
    if effective_orders == 0:
        return 0.0
    bp = math.exp(min(0.0, 1.0 - ref_len / hyp_len))
    return 100.0 * bp * math.exp(log_precision / effective_orders)


def _order_f(hyp_grams: Counter, ref_grams: Counter, beta: float) -> float | None:
    hyp_total = sum(hyp_grams.values())
    ref_total = sum(ref_grams.values())
    if hyp_total == 0 and ref_total == 0:
        return None  # order not realized on either side: skip
    match = sum((hyp_grams & ref_grams).values())
    precision = match / hyp_total if hyp_total else 0.0
    recall = match / ref_total if ref_total else 0.0
    denom = beta * beta * precision + recall
    if denom == 0.0:
        return 0.0
    return (1.0 + beta * beta) * precision * recall / denom


def chrfpp(hypotheses: list[str], references: list[str]) -> float:
    """ChrF++ (char orders 1..6 + word orders 1..2, beta=2), in [0, 100]."""
    if not references or len(hypotheses) != len(references):
        raise DataError("hypotheses and references must be equal-length, non-empty lists")
    n_char = CHRF_CHAR_ORDER
    n_word = CHRF_WORD_ORDER
    hyp_counts: list[Counter] = [Counter() for _ in range(n_char + n_word)]
    ref_counts: list[Counter] = [Counter() for _ in range(n_char + n_word)]
    for hyp, ref in zip(hypotheses, references):
        hyp_chars = list(_WS_RE.sub("", hyp))
        ref_chars = list(_WS_RE.sub("", ref))
        hyp_words = hyp.split()
        ref_words = ref.split()
        for n in range(1, n_char + 1):
            hyp_counts[n - 1] += _ngram_counts(hyp_chars, n)
            ref_counts[n - 1] += _ngram_counts(ref_chars, n)
        for n in range(1, n_word + 1):
            hyp_counts[n_char + n - 1] += _ngram_counts(hyp_words, n)
            ref_counts[n_char + n - 1] += _ngram_counts(ref_words, n)
    scores = []
    for hg, rg in zip(hyp_counts, ref_counts):
        f = _order_f(hg, rg, CHRF_BETA)
        if f is not None:
            scores.append(f)
    if not scores:
        return 0.0
    return 100.0 * sum(scores) / len(scores)


# -- Direction-level reporting --------------------------------------------------


def direction_category(direction: str) -> str | None:
    """One of the five language categories, or None for eng<->fra."""
    src, tgt = direction.split("-")
    check_lang(src)
    check_lang(tgt)
    if is_african(src) and tgt == "eng":
        return "X-Eng"
    if src == "eng" and is_african(tgt):
        return "Eng-X"
    if is_african(src) and tgt == "fra":
        return "X-Fra"
    if src == "fra" and is_african(tgt):
        return "Fra-X"
    if is_african(src) and is_african(tgt):
        return "X-X"
    return None


@dataclass
class MetricReport:
    bleu: float
    chrfpp: float
    per_direction: dict[str, tuple[float, float]] = field(default_factory=dict)
    category_means: dict[str, tuple[float, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "bleu": self.bleu,
            "chrfpp": self.chrfpp,
            "per_direction": {d: list(v) for d, v in sorted(self.per_direction.items())},
            "category_means": {c: list(v) for c, v in self.category_means.items()},
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")


def evaluate_directions(
    units: list[tuple[str, list[str], list[str]]], eval_tokenizer, threads: int = 1
) -> MetricReport:
    """Score (direction, hypotheses, references) units and aggregate.

    Per-direction scores are corpus-level; category means are unweighted
    means over member directions, with "All" covering every evaluated
    direction (eng<->fra belongs only to All). Directions score
    independently, so threads > 1 fans them out with identical results.
    """
    if not units:
        raise DataError("nothing to evaluate")
    seen = set()
    for direction, _, _ in units:
        if direction in seen:
            raise DataError(f"direction {direction} evaluated twice")
        seen.add(direction)

    def _score(unit):
        direction, hyps, refs = unit
        return direction, (spbleu(hyps, refs, eval_tokenizer), chrfpp(hyps, refs))

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            scored = list(pool.map(_score, units))
    else:
        scored = [_score(u) for u in units]
    per_direction: dict[str, tuple[float, float]] = dict(scored)
    members: dict[str, list[str]] = {c: [] for c in CATEGORIES}
    for direction in per_direction:
        cat = direction_category(direction)
        if cat is not None:
            members[cat].append(direction)
        members["All"].append(direction)
    category_means: dict[str, tuple[float, float]] = {}
    for cat in CATEGORIES:
        dirs = members[cat]
        if not dirs:
            continue
        category_means[cat] = (
            sum(per_direction[d][0] for d in dirs) / len(dirs),
            sum(per_direction[d][1] for d in dirs) / len(dirs),
        )
    all_bleu, all_chrf = category_means["All"]
    return MetricReport(
        bleu=all_bleu,
        chrfpp=all_chrf,
        per_direction=per_direction,
        category_means=category_means,
    )
