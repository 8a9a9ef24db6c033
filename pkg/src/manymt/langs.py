"""Language inventory, pair tables, and family groups for the 26-language task.

The closed set is 24 African languages plus eng and fra. Pair membership in the
Base-146 / Large-234 / Eval-106 subsets and the 5 target-language family groups
are shipped as constants; a JSON config can override the group table at load
time (see :mod:`manymt.routing`).
"""

from __future__ import annotations

from .errors import DataError

AFRICAN_LANGS = frozenset(
    {
        "afr", "amh", "fuv", "hau", "ibo", "kam", "kin", "lin", "lug", "luo",
        "nso", "nya", "orm", "sna", "som", "ssw", "swh", "tsn", "tso", "umb",
        "wol", "xho", "yor", "zul",
    }
)

CENTRAL_LANGS = frozenset({"eng", "fra"})

ALL_LANGS = AFRICAN_LANGS | CENTRAL_LANGS

# Sorted code list; also fixes the direction-tag assignment ("<2xxx>" -> TBD1..TBD26).
LANG_CODES = tuple(sorted(ALL_LANGS))


def check_lang(code: str) -> str:
    if code not in ALL_LANGS:
        raise DataError(f"unknown language code: {code!r}")
    return code


def is_african(code: str) -> bool:
    return code in AFRICAN_LANGS


# Bitext pair inventory. Each entry is a canonical "src-tgt" pair string; the
# base tuple holds pairs with provided bitext, extension holds the long-tail
# additions that only exist with synthetic data.
PAIRS_ENGC_BASE = (
    "afr-eng", "amh-eng", "eng-fra", "eng-fuv", "eng-hau", "eng-ibo",
    "eng-kam", "eng-kin", "eng-lug", "eng-luo", "eng-nso", "eng-nya",
    "eng-orm", "eng-sna", "eng-som", "eng-ssw", "eng-swh", "eng-tsn",
    "eng-tso", "eng-umb", "eng-xho", "eng-yor", "eng-zul",
)
PAIRS_ENGC_EXT = ("eng-lin", "eng-wol")

PAIRS_FRAC_BASE = ("fra-kin", "fra-lin", "fra-swh", "fra-wol")
PAIRS_FRAC_EXT = ("amh-fra", "fra-kam", "fra-lug", "fra-luo", "fra-orm", "fra-umb")

PAIRS_SSEA_BASE = (
    "afr-ssw", "afr-tsn", "afr-xho", "afr-tso", "afr-zul", "nso-sna",
    "nso-ssw", "nso-tsn", "nso-xho", "nso-tso", "nso-zul", "sna-ssw",
    "sna-tsn", "sna-xho", "sna-tso", "sna-zul", "ssw-tsn", "ssw-xho",
    "ssw-tso", "ssw-zul", "tsn-xho", "tsn-tso", "tsn-zul", "tso-xho",
    "tso-zul", "xho-zul",
)
PAIRS_SSEA_EXT = ("afr-nso", "afr-sna")

PAIRS_HCEA_BASE = (
    "amh-orm", "amh-som", "amh-swh", "luo-orm", "luo-som", "luo-swh",
    "orm-som", "orm-swh", "som-swh",
)
PAIRS_HCEA_EXT = ("amh-luo",)

PAIRS_NGG_BASE = ("fuv-hau", "fuv-ibo", "fuv-yor", "hau-ibo", "hau-yor", "ibo-yor")
PAIRS_NGG_EXT = ()

PAIRS_CA_BASE = ("kin-lug", "kin-nya", "kin-swh", "lug-nya", "lug-swh", "nya-swh")
PAIRS_CA_EXT = ("kin-lin", "lin-lug", "lin-nya", "lin-swh")

PAIRS_OTHER_EXT = (
    "fuv-kin", "fuv-nya", "fuv-som", "fuv-zul", "kam-nya", "kam-sna",
    "kam-som", "kam-swh", "kam-tso", "kam-zul", "kin-yor", "lug-sna",
    "lug-zul", "luo-nya", "luo-sna", "luo-zul", "nya-umb", "nya-yor",
    "sna-umb", "sna-yor", "som-wol", "som-yor", "swh-umb", "swh-yor",
    "tso-yor", "umb-zul", "xho-yor", "yor-zul",
)

BITEXT_PAIRS = (
    PAIRS_ENGC_BASE + PAIRS_FRAC_BASE + PAIRS_SSEA_BASE
    + PAIRS_HCEA_BASE + PAIRS_NGG_BASE + PAIRS_CA_BASE
)
EXTENSION_PAIRS = (
    PAIRS_ENGC_EXT + PAIRS_FRAC_EXT + PAIRS_SSEA_EXT + PAIRS_HCEA_EXT
    + PAIRS_NGG_EXT + PAIRS_CA_EXT + PAIRS_OTHER_EXT
)
ALL_PAIRS = BITEXT_PAIRS + EXTENSION_PAIRS

# The published count of bitext pairs is 73 while the table body lists 74
# non-extension rows; afr-tso (the one row out of sorted order) is excluded
# from the base subset to keep Base-146 at exactly 146 directions.
BASE146_PAIRS = tuple(p for p in BITEXT_PAIRS if p != "afr-tso")
LARGE234_PAIRS = ALL_PAIRS


def _xx_pairs() -> tuple[str, ...]:
    out = [
        p
        for p in BITEXT_PAIRS
        if not (set(p.split("-")) & CENTRAL_LANGS) and p != "afr-tso"
    ]
    return tuple(sorted(out)[:24])


EVAL106_PAIRS = tuple(
    sorted(PAIRS_ENGC_BASE + PAIRS_ENGC_EXT + PAIRS_FRAC_BASE + _xx_pairs())
)

# Target-language family groups. swh belongs to two groups for training; at
# inference it is routed to the group holding the Horn-of-Africa languages.
FAMILY_GROUPS: dict[int, frozenset[str]] = {
    1: frozenset({"eng", "fra"}),
    2: frozenset({"afr", "nso", "sna", "ssw", "tsn", "tso", "xho", "zul"}),
    3: frozenset({"amh", "luo", "orm", "som", "swh", "wol"}),
    4: frozenset({"fuv", "hau", "ibo", "yor"}),
    5: frozenset({"kam", "kin", "lin", "lug", "nya", "swh", "umb"}),
}

# Inference override is anchored to set identity, not the row number: swh goes
# to whichever group contains the {amh, luo, orm, som, swh, wol} family.
SWH_INFERENCE_FAMILY = frozenset({"amh", "luo", "orm", "som", "swh", "wol"})


def split_pair(pair: str) -> tuple[str, str]:
    parts = pair.split("-")
    if len(parts) != 2:
        raise DataError(f"malformed pair string: {pair!r}")
    s, t = parts
    check_lang(s)
    check_lang(t)
    if s == t:
        raise DataError(f"degenerate pair: {pair!r}")
    return s, t


def direction_tag(lang: str) -> str:
    """Surface form of the target-language tag prepended in T-Enc formatting."""
    check_lang(lang)
    return f"<2{lang}>"


def direction_tag_reserved_index(lang: str) -> int:
    """Reserved-token slot backing a direction tag (TBD1..TBD26 by sorted code)."""
    check_lang(lang)
    return 1 + LANG_CODES.index(lang)
