"""Corpus ingestion and the four-step preprocessing pipeline.

Steps: reformat (TSV / JSONL / HTML-like input into aligned records),
exact deduplication, language-identity filtering, and subword length
limits. Every filter is a pure subsequence operation over the record
stream: surviving records are byte-identical to their inputs and keep
their relative order, so the composed pipeline is idempotent.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator

from .detect import LanguageDetector
from .errors import DataError
from .langs import AFRICAN_LANGS, check_lang, split_pair

PROVENANCES = ("clean", "bt", "st")


@dataclass(frozen=True)
class SentencePair:
    source_text: str
    target_text: str
    source_lang: str
    target_lang: str
    provenance: str = "clean"
    tagged: bool = False

    def __post_init__(self):
        check_lang(self.source_lang)
        check_lang(self.target_lang)
        if self.source_lang == self.target_lang:
            raise DataError(f"source and target language are both {self.source_lang!r}")
        if not self.source_text.strip() or not self.target_text.strip():
            raise DataError("sentence pair has an empty side")
        if self.provenance not in PROVENANCES:
            raise DataError(f"unknown provenance {self.provenance!r}")
        if self.tagged and self.provenance == "clean":
            raise DataError("clean pairs cannot carry the augmentation tag")

    @property
    def direction(self) -> str:
        return f"{self.source_lang}-{self.target_lang}"

    def to_json(self) -> str:
        return json.dumps(
            {
                "src": self.source_text,
                "tgt": self.target_text,
                "src_lang": self.source_lang,
                "tgt_lang": self.target_lang,
                "provenance": self.provenance,
                "tagged": self.tagged,
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "SentencePair":
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise DataError(f"bad JSONL record: {e}") from e
        try:
            return cls(
                source_text=rec["src"],
                target_text=rec["tgt"],
                source_lang=rec["src_lang"],
                target_lang=rec["tgt_lang"],
                provenance=rec.get("provenance", "clean"),
                tagged=rec.get("tagged", False),
            )
        except KeyError as e:
            raise DataError(f"JSONL record missing field {e}") from e


@dataclass
class FilterPolicy:
    min_tokens: int = 4
    max_tokens: int = 512
    max_len_ratio: float = 3.0
    strict_langs: frozenset[str] = frozenset({"eng", "fra"})
    african_langs: frozenset[str] = AFRICAN_LANGS

    def __post_init__(self):
        if self.min_tokens < 1:
            raise DataError("min_tokens must be >= 1")
        if self.max_tokens <= self.min_tokens:
            raise DataError("max_tokens must exceed min_tokens")
        if self.max_len_ratio <= 1.0:
            raise DataError("max_len_ratio must exceed 1")

    @classmethod
    def from_dict(cls, blob: dict) -> "FilterPolicy":
        kwargs = {}
        for key in ("min_tokens", "max_tokens", "max_len_ratio"):
            if key in blob:
                kwargs[key] = blob[key]
        if "strict_langs" in blob:
            kwargs["strict_langs"] = frozenset(blob["strict_langs"])
        if "african_langs" in blob:
            kwargs["african_langs"] = frozenset(blob["african_langs"])
        return cls(**kwargs)


@dataclass
class DirectionEntry:
    size: int = 0
    shards: list[str] = field(default_factory=list)
    subset_flags: set[str] = field(default_factory=set)


KNOWN_SUBSETS = ("base146", "large234", "eval106")


@dataclass
class CorpusManifest:
    directions: dict[str, DirectionEntry] = field(default_factory=dict)

    def __post_init__(self):
        for key, entry in self.directions.items():
            split_pair(key)
            if entry.size < 0:
                raise DataError(f"negative size for direction {key}")
            unknown = entry.subset_flags - set(KNOWN_SUBSETS)
            if unknown:
                raise DataError(f"unknown subset flags {sorted(unknown)} on {key}")

    def add(self, direction: str, size: int = 0, shards: list[str] | None = None,
            subset_flags: set[str] | None = None) -> None:
        split_pair(direction)
        self.directions[direction] = DirectionEntry(
            size=size, shards=list(shards or []), subset_flags=set(subset_flags or ()),
        )

    def to_dict(self) -> dict:
        return {
            "directions": {
                key: {
                    "size": e.size,
                    "shards": e.shards,
                    "subset_flags": sorted(e.subset_flags),
                }
                for key, e in sorted(self.directions.items())
            }
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "CorpusManifest":
        with open(path, "r", encoding="utf-8") as f:
            blob = json.load(f)
        if "directions" not in blob:
            raise DataError(f"{path}: not a corpus manifest (no 'directions')")
        directions = {}
        for key, rec in blob["directions"].items():
            directions[key] = DirectionEntry(
                size=rec.get("size", 0),
                shards=list(rec.get("shards", [])),
                subset_flags=set(rec.get("subset_flags", [])),
            )
        return cls(directions=directions)


def table1_manifest() -> CorpusManifest:
    """The built-in pair-table fixture: 117 pairs with subset flags, no shards."""
    from .langs import BASE146_PAIRS, EVAL106_PAIRS, LARGE234_PAIRS

    m = CorpusManifest()
    base = set(BASE146_PAIRS)
    ev = set(EVAL106_PAIRS)
    for pair in LARGE234_PAIRS:
        flags = {"large234"}
        if pair in base:
            flags.add("base146")
        if pair in ev:
            flags.add("eval106")
        m.add(pair, size=0, shards=[], subset_flags=flags)
    return m


def enumerate_directions(manifest: CorpusManifest, subset: str) -> list[tuple[str, str]]:
    """Both orientations of every pair flagged with ``subset``, sorted by codes."""
    if subset not in KNOWN_SUBSETS:
        raise DataError(f"unknown subset {subset!r}")
    pairs: set[frozenset[str]] = set()
    for key, entry in manifest.directions.items():
        if subset in entry.subset_flags:
            s, t = split_pair(key)
            pairs.add(frozenset((s, t)))
    directions: set[tuple[str, str]] = set()
    for pair in pairs:
        a, b = sorted(pair)
        directions.add((a, b))
        directions.add((b, a))
    if not directions:
        raise DataError(f"subset {subset!r} contains no directions")
    return sorted(directions)


# --- Step 1: reformatting -------------------------------------------------

_SEG_RE = re.compile(r"<seg\b[^>]*>(.*?)</seg>", re.DOTALL)

FORMATS = ("tsv", "jsonl", "html_like")


def _pair_or_none(src: str, tgt: str, src_lang: str, tgt_lang: str) -> SentencePair | None:
    src = src.strip()
    tgt = tgt.strip()
    if not src or not tgt:
        return None
    try:
        return SentencePair(src, tgt, src_lang, tgt_lang)
    except DataError:
        return None


def reformat_records(
    raw: Iterable[bytes],
    format: str,
    src_lang: str,
    tgt_lang: str,
    tally: Counter | None = None,
) -> Iterator[SentencePair]:
    """Normalize one raw byte stream into aligned SentencePair records.

    Lines whose pairing cannot be recovered (missing fields, bad encoding,
    unsplittable columns) are dropped and counted under ``reformat_dropped``.
    Column-shifted TSV rows (extra empty columns) are realigned when exactly
    two non-empty columns remain.
    """
    if format not in FORMATS:
        raise DataError(f"unknown input format {format!r}")
    tally = tally if tally is not None else Counter()
    for raw_line in raw:
        try:
            line = raw_line.decode("utf-8")
        except UnicodeDecodeError:
            tally["reformat_dropped"] += 1
            continue
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        pair: SentencePair | None = None
        if format == "tsv":
            cols = line.split("\t")
            if len(cols) == 2:
                pair = _pair_or_none(cols[0], cols[1], src_lang, tgt_lang)
            else:
                nonempty = [c for c in cols if c.strip()]
                if len(nonempty) == 2:
                    pair = _pair_or_none(nonempty[0], nonempty[1], src_lang, tgt_lang)
        elif format == "jsonl":
            try:
                rec = json.loads(line)
                src = rec["src"]
                tgt = rec["tgt"]
                pair = _pair_or_none(
                    src, tgt, rec.get("src_lang", src_lang), rec.get("tgt_lang", tgt_lang)
                )
            except (json.JSONDecodeError, KeyError, TypeError, DataError):
                pair = None
        else:  # html_like
            segs = _SEG_RE.findall(line)
            if len(segs) == 2:
                pair = _pair_or_none(segs[0], segs[1], src_lang, tgt_lang)
        if pair is None:
            tally["reformat_dropped"] += 1
        else:
            yield pair


# --- Step 2: deduplication -------------------------------------------------

def _dedup_key(pair: SentencePair) -> tuple:
    return (
        unicodedata.normalize("NFC", pair.source_text.strip()),
        unicodedata.normalize("NFC", pair.target_text.strip()),
        pair.source_lang,
        pair.target_lang,
    )


def deduplicate(
    pairs: Iterable[SentencePair], tally: Counter | None = None
) -> Iterator[SentencePair]:
    """Emit the first occurrence of each record; key is NFC + trim normalized."""
    tally = tally if tally is not None else Counter()
    seen: set[tuple] = set()
    for pair in pairs:
        key = _dedup_key(pair)
        if key in seen:
            tally["duplicate_dropped"] += 1
            continue
        seen.add(key)
        yield pair


# --- Step 3: language-identity filtering -----------------------------------

def _side_ok(text: str, declared: str, detector: LanguageDetector, policy: FilterPolicy) -> bool:
    try:
        detected = detector.detect(text)
    except Exception:
        detected = None
    if detected is None:
        return False
    if declared in policy.strict_langs:
        return detected == declared
    return detected in policy.african_langs


def filter_language(
    pairs: Iterable[SentencePair],
    detector: LanguageDetector,
    policy: FilterPolicy,
    tally: Counter | None = None,
) -> Iterator[SentencePair]:
    """Drop pairs whose detected language contradicts the declared tags.

    eng/fra sides must detect as exactly themselves; sides declared as one of
    the 24 African languages pass if the detection lands anywhere inside the
    African set. Detector failures count as non-matching.
    """
    tally = tally if tally is not None else Counter()
    for pair in pairs:
        if _side_ok(pair.source_text, pair.source_lang, detector, policy) and _side_ok(
            pair.target_text, pair.target_lang, detector, policy
        ):
            yield pair
        else:
            tally["language_dropped"] += 1


# --- Step 4: length limitation ----------------------------------------------

def filter_length(
    pairs: Iterable[SentencePair],
    tokenizer,
    policy: FilterPolicy,
    tally: Counter | None = None,
) -> Iterator[SentencePair]:
    """Keep pairs whose subword lengths fall in [min_tokens, max_tokens] on
    both sides (inclusive) with a length ratio strictly below max_len_ratio."""
    tally = tally if tally is not None else Counter()
    for pair in pairs:
        n_src = len(tokenizer.encode(pair.source_text))
        n_tgt = len(tokenizer.encode(pair.target_text))
        within = (
            policy.min_tokens <= n_src <= policy.max_tokens
            and policy.min_tokens <= n_tgt <= policy.max_tokens
        )
        ratio_ok = max(n_src, n_tgt) / min(n_src, n_tgt) < policy.max_len_ratio
        if within and ratio_ok:
            yield pair
        else:
            tally["length_dropped"] += 1


# --- Whole-pipeline driver ---------------------------------------------------

@dataclass
class InputFile:
    path: str
    format: str
    src_lang: str
    tgt_lang: str


def load_input_manifest(path: str | Path) -> list[InputFile]:
    with open(path, "r", encoding="utf-8") as f:
        blob = json.load(f)
    files = blob.get("files")
    if not isinstance(files, list):
        raise DataError(f"{path}: input manifest needs a 'files' list")
    out = []
    for rec in files:
        try:
            out.append(
                InputFile(
                    path=rec["path"],
                    format=rec["format"],
                    src_lang=rec["src_lang"],
                    tgt_lang=rec["tgt_lang"],
                )
            )
        except KeyError as e:
            raise DataError(f"{path}: input file record missing {e}") from e
    return out


def read_raw_lines(path: Path) -> Iterator[bytes]:
    with open(path, "rb") as f:
        yield from f


def run_preprocess(
    in_dir: str | Path,
    input_manifest_path: str | Path,
    policy: FilterPolicy,
    out_dir: str | Path,
    detector: LanguageDetector | None = None,
    tokenizer=None,
    subset_flags: dict[str, set[str]] | None = None,
) -> tuple[CorpusManifest, Counter]:
    """Apply reformat -> dedup -> language filter -> length filter and shard.

    Returns the output manifest plus the per-step drop tallies. The language
    step is skipped when no detector is supplied, the length step when no
    tokenizer is supplied (their tallies stay at zero).
    """
    in_dir = Path(in_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    inputs = load_input_manifest(input_manifest_path)
    tally: Counter = Counter()
    by_direction: dict[str, list[SentencePair]] = {}
    for spec in inputs:
        path = in_dir / spec.path
        if not path.exists():
            raise DataError(f"input file not found: {path}")
        stream: Iterable[SentencePair] = reformat_records(
            read_raw_lines(path), spec.format, spec.src_lang, spec.tgt_lang, tally
        )
        stream = deduplicate(stream, tally)
        if detector is not None:
            stream = filter_language(stream, detector, policy, tally)
        if tokenizer is not None:
            stream = filter_length(stream, tokenizer, policy, tally)
        for pair in stream:
            by_direction.setdefault(pair.direction, []).append(pair)

    manifest = CorpusManifest()
    for direction in sorted(by_direction):
        shard = out_dir / f"{direction}.jsonl"
        with open(shard, "w", encoding="utf-8") as f:
            for pair in by_direction[direction]:
                f.write(pair.to_json() + "\n")
        flags = (subset_flags or {}).get(direction, set())
        manifest.add(
            direction,
            size=len(by_direction[direction]),
            shards=[shard.name],
            subset_flags=flags,
        )
    manifest.save(out_dir / "corpus_manifest.json")
    return manifest, tally


def read_shard(path: str | Path) -> Iterator[SentencePair]:
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                yield SentencePair.from_json(line)


def write_shard(path: str | Path, pairs: Iterable[SentencePair]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for pair in pairs:
            f.write(pair.to_json() + "\n")
            n += 1
    return n
