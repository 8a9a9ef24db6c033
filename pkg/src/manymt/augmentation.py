"""Tagged synthetic data: back-translation, self-training, example formatting.

Synthetic pairs carry the augmentation tag appended after a single space on
the synthetic side only; the clean side is kept byte-identical to its
monolingual origin. Per-pair caps are enforced by seeded uniform sampling
without replacement, emitted in input order.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .corpus import SentencePair
from .errors import DataError
from .langs import check_lang, direction_tag
from .tokenizer import DEFAULT_RESERVED

DA_TAG = DEFAULT_RESERVED[0]  # the <DA> marker rides on reserved slot 0

# (text, source_lang, target_lang) -> translated text; must be deterministic
TranslatorOracle = Callable[[str, str, str], str]


def identity_translator(text: str, src: str, tgt: str) -> str:
    return text


@dataclass
class AugmentationSpec:
    english_centric_cap: int = 1_000_000
    non_english_cap: int = 500_000
    tag_token: str = DA_TAG
    seed: int = 0

    def __post_init__(self):
        if self.english_centric_cap <= 0 or self.non_english_cap <= 0:
            raise DataError("caps must be positive")
        if self.tag_token not in DEFAULT_RESERVED:
            raise DataError(f"tag token {self.tag_token!r} is not in the reserved block")

    def cap_for(self, src: str, tgt: str) -> int:
        if "eng" in (src, tgt):
            return self.english_centric_cap
        return self.non_english_cap


def _cap_sample(items: list, cap: int, seed: int) -> list:
    if len(items) <= cap:
        return items
    rng = random.Random(seed)
    keep = sorted(rng.sample(range(len(items)), cap))
    return [items[i] for i in keep]


def back_translate(
    mono_target: Iterable[tuple[str, str]],
    source_lang: str,
    translator: TranslatorOracle,
    spec: AugmentationSpec,
    cap: int | None = None,
    tally: Counter | None = None,
) -> Iterator[SentencePair]:
    """{[x'; <DA>], y}: synthesize sources for target-side monolingual text."""
    check_lang(source_lang)
    tally = tally if tally is not None else Counter()
    lines = list(mono_target)
    for _, lang in lines:
        if lang == source_lang:
            raise DataError("back-translation needs distinct source and target languages")
    if lines:
        effective_cap = cap if cap is not None else spec.cap_for(source_lang, lines[0][1])
        lines = _cap_sample(lines, effective_cap, spec.seed)
    for text, target_lang in lines:
        synthetic = translator(text, target_lang, source_lang)
        if not synthetic.strip():
            tally["empty_translation_dropped"] += 1
            continue
        yield SentencePair(
            source_text=f"{synthetic} {spec.tag_token}",
            target_text=text,
            source_lang=source_lang,
            target_lang=target_lang,
            provenance="bt",
            tagged=True,
        )


def self_train(
    mono_source: Iterable[tuple[str, str]],
    target_lang: str,
    translator: TranslatorOracle,
    spec: AugmentationSpec,
    cap: int | None = None,
    tally: Counter | None = None,
) -> Iterator[SentencePair]:
    """{x, [y'; <DA>]}: synthesize targets for source-side monolingual text."""
    check_lang(target_lang)
    tally = tally if tally is not None else Counter()
    lines = list(mono_source)
    for _, lang in lines:
        if lang == target_lang:
            raise DataError("self-training needs distinct source and target languages")
    if lines:
        effective_cap = cap if cap is not None else spec.cap_for(lines[0][1], target_lang)
        lines = _cap_sample(lines, effective_cap, spec.seed)
    for text, source_lang in lines:
        synthetic = translator(text, source_lang, target_lang)
        if not synthetic.strip():
            tally["empty_translation_dropped"] += 1
            continue
        yield SentencePair(
            source_text=text,
            target_text=f"{synthetic} {spec.tag_token}",
            source_lang=source_lang,
            target_lang=target_lang,
            provenance="st",
            tagged=True,
        )


FORMAT_SCHEMES = ("target_tag_source", "target_tag_decoder")


def format_example(pair: SentencePair, scheme: str) -> tuple[str, str]:
    """Attach the target-language tag per scheme.

    target_tag_source (T-Enc) prepends "<2xxx>" to the encoder text;
    target_tag_decoder leaves the encoder text alone and emits the tag as
    the decoder prefix. Augmentation tags inside the texts are untouched.
    """
    if scheme not in FORMAT_SCHEMES:
        raise DataError(f"unknown formatting scheme {scheme!r}")
    tag = direction_tag(pair.target_lang)
    if scheme == "target_tag_source":
        return f"{tag} {pair.source_text}", ""
    return pair.source_text, tag
