"""Shared subword vocabulary: upsampled byte-pair-merge training, encode, decode.

Training weights each language's pair counts by p_l ~ |D_l|^alpha (the same
closed form the sampler uses), so low-resource languages get vocabulary
bandwidth without physically duplicating text. Segmentation is byte-level
with a visible word-boundary marker, which makes decode(encode(t)) == t for
every string. A reserved block of tag tokens occupies the lowest ids and is
never produced by merges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from . import kernels
from .errors import DataError
from .sampling import temperature_distribution

MARKER = "▁"  # visible word-boundary glyph
DEFAULT_RESERVED = tuple(f"TBD{i}" for i in range(32))
N_BYTE_SYMBOLS = 256


def _escape_bytes(bs: bytes) -> str:
    out = []
    for b in bs:
        if 0x21 <= b <= 0x7E and b != 0x5C:
            out.append(chr(b))
        else:
            out.append(f"\\x{b:02x}")
    return "".join(out)


@dataclass
class SubwordModel:
    reserved: tuple[str, ...]
    merges: list[tuple[int, int, int]]
    vocab_size_target: int

    def __post_init__(self):
        self.n_reserved = len(self.reserved)
        self.marker_id = self.n_reserved
        self.byte_base = self.n_reserved + 1
        self.first_merge_id = self.byte_base + N_BYTE_SYMBOLS
        self._merge_rank = {
            (a, b): (rank, new_id) for rank, (a, b, new_id) in enumerate(self.merges)
        }
        # token id -> raw byte expansion (marker renders as a space)
        exp: dict[int, bytes] = {self.marker_id: b" "}
        for b in range(N_BYTE_SYMBOLS):
            exp[self.byte_base + b] = bytes([b])
        for a, b, new_id in self.merges:
            exp[new_id] = exp[a] + exp[b]
        self._expansion = exp
        self._reserved_ids = {tag: i for i, tag in enumerate(self.reserved)}

    # -- identity ----------------------------------------------------------

    @property
    def size(self) -> int:
        return self.first_merge_id + len(self.merges)

    def reserved_id(self, tag: str) -> int:
        try:
            return self._reserved_ids[tag]
        except KeyError:
            raise DataError(f"{tag!r} is not a reserved tag") from None

    def token_display(self, token_id: int) -> str:
        """Printable token string; content tokens are byte-escaped."""
        if token_id < 0 or token_id >= self.size:
            raise DataError(f"token id {token_id} out of range")
        if token_id < self.n_reserved:
            return self.reserved[token_id]
        if token_id == self.marker_id:
            return MARKER
        raw = self._expansion[token_id]
        if token_id >= self.first_merge_id:
            disp = _escape_bytes(raw).replace(" ", MARKER)
        else:
            disp = _escape_bytes(raw)
        # a merge product can spell out a reserved tag; force the hex form then
        if disp in self._reserved_ids:
            disp = "".join(f"\\x{b:02x}" for b in raw)
        return disp

    def vocab(self) -> dict[str, int]:
        """Injective token-string -> id map of exactly ``size`` entries.

        Distinct merge products occasionally share a byte expansion (e.g.
        "ab"+"c" and "a"+"bc"); later duplicates get a ``#id`` suffix so the
        map stays one-to-one.
        """
        out: dict[str, int] = {}
        for i in range(self.size):
            disp = self.token_display(i)
            if disp in out:
                disp = f"{disp}#{i}"
            out[disp] = i
        return out

    # -- encode / decode -----------------------------------------------------

    def _chunks(self, text: str) -> Iterable[list[int]]:
        byte_base = self.byte_base
        for k, part in enumerate(text.split(" ")):
            syms: list[int] = [self.marker_id] if k > 0 else []
            syms.extend(byte_base + b for b in part.encode("utf-8"))
            if syms:
                yield syms

    def encode(self, text: str) -> list[int]:
        """Deterministic lossless segmentation; never emits reserved ids."""
        ids: list[int] = []
        rank = self._merge_rank
        for syms in self._chunks(text):
            ids.extend(kernels.apply_merges(syms, rank))
        return ids

    def decode(self, ids: Iterable[int]) -> str:
        out: list[str] = []
        buf = bytearray()
        for i in ids:
            i = int(i)
            if i < 0 or i >= self.size:
                raise DataError(f"token id {i} out of range (vocab size {self.size})")
            if i < self.n_reserved:
                if buf:
                    out.append(buf.decode("utf-8", errors="replace"))
                    buf.clear()
                out.append(self.reserved[i])
            else:
                buf.extend(self._expansion[i])
        if buf:
            out.append(buf.decode("utf-8", errors="replace"))
        return "".join(out)

    # -- persistence ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        blob = {
            "reserved": list(self.reserved),
            "merges": [list(m) for m in self.merges],
            "vocab_size_target": self.vocab_size_target,
            "vocab": self.vocab(),
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(blob, f, ensure_ascii=False)
            f.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "SubwordModel":
        with open(path, "r", encoding="utf-8") as f:
            blob = json.load(f)
        try:
            model = cls(
                reserved=tuple(blob["reserved"]),
                merges=[tuple(m) for m in blob["merges"]],
                vocab_size_target=blob["vocab_size_target"],
            )
        except KeyError as e:
            raise DataError(f"{path}: subword model missing field {e}") from e
        return model


def language_weights(sizes: dict[str, int], alpha: float) -> dict[str, float]:
    """Per-language training weights p_l ~ |D_l|^alpha over sorted codes."""
    if not 0.0 < alpha <= 1.0:
        raise DataError("alpha must lie in (0, 1]")
    langs = sorted(sizes)
    dist = temperature_distribution([sizes[l] for l in langs], tau=1.0 / alpha)
    return dict(zip(langs, dist.probs.tolist()))


def train_subword(
    corpora: dict[str, Iterable[str]],
    alpha: float,
    vocab_size: int,
    reserved: tuple[str, ...] = DEFAULT_RESERVED,
    sizes: dict[str, int] | None = None,
) -> SubwordModel:
    """Learn a shared merge table over the alpha-smoothed language mix.

    Each language contributes word-count mass proportional to
    |D_l|^alpha / sum |D|^alpha; |D_l| defaults to the language's line count.
    The returned model has exactly vocab_size entries: the reserved block,
    the marker + 256 byte symbols, then the learned merges.
    """
    if not corpora:
        raise DataError("no training corpora supplied")
    if len(set(reserved)) != len(reserved):
        raise DataError("reserved tags must be unique")
    base_count = len(reserved) + 1 + N_BYTE_SYMBOLS
    if vocab_size <= base_count:
        raise DataError(
            f"vocab_size must exceed the {base_count} reserved+base symbols"
        )

    scratch = SubwordModel(reserved=tuple(reserved), merges=[], vocab_size_target=vocab_size)
    per_lang_counts: dict[str, dict[tuple[int, ...], int]] = {}
    line_counts: dict[str, int] = {}
    for lang in sorted(corpora):
        counts: dict[tuple[int, ...], int] = {}
        n_lines = 0
        for line in corpora[lang]:
            line = line.rstrip("\n")
            if not line:
                continue
            n_lines += 1
            for syms in scratch._chunks(line):
                key = tuple(syms)
                counts[key] = counts.get(key, 0) + 1
        if not counts:
            raise DataError(f"training corpus for {lang!r} is empty")
        per_lang_counts[lang] = counts
        line_counts[lang] = n_lines

    if sizes is None:
        sizes = line_counts
    missing = set(per_lang_counts) - set(sizes)
    if missing:
        raise DataError(f"sizes missing for languages: {sorted(missing)}")
    weights = language_weights({l: sizes[l] for l in per_lang_counts}, alpha)

    agg: dict[tuple[int, ...], float] = {}
    for lang in sorted(per_lang_counts):
        counts = per_lang_counts[lang]
        scale = weights[lang] / sum(counts.values())
        for word, count in counts.items():
            agg[word] = agg.get(word, 0.0) + count * scale

    words = [list(w) for w in agg]
    word_weights = list(agg.values())
    target_merges = vocab_size - base_count
    merges = kernels.train_merges(words, word_weights, target_merges, base_count)
    if len(merges) < target_merges:
        raise DataError(
            f"vocab_size {vocab_size} unreachable: merges exhausted at "
            f"{base_count + len(merges)} tokens"
        )
    return SubwordModel(reserved=tuple(reserved), merges=merges, vocab_size_target=vocab_size)
