"""Target-language family grouping and inference-time model routing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError
from .langs import ALL_LANGS, FAMILY_GROUPS, SWH_INFERENCE_FAMILY, check_lang


@dataclass
class GroupTable:
    groups: dict[int, frozenset[str]] = field(default_factory=lambda: dict(FAMILY_GROUPS))
    inference_overrides: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        covered = set()
        memberships: dict[str, int] = {}
        for gid, langs in self.groups.items():
            for lang in langs:
                check_lang(lang)
                memberships[lang] = memberships.get(lang, 0) + 1
            covered |= set(langs)
        if covered != ALL_LANGS:
            missing = sorted(ALL_LANGS - covered)
            raise DataError(f"group table does not cover: {missing}")
        if not self.inference_overrides:
            # Languages in several groups route to the group matching the
            # Horn-of-Africa family when present, else the lowest group id.
            for lang, n in memberships.items():
                if n > 1:
                    target = None
                    for gid, langs in sorted(self.groups.items()):
                        if lang in langs and langs == SWH_INFERENCE_FAMILY:
                            target = gid
                            break
                    if target is None:
                        target = min(g for g, langs in self.groups.items() if lang in langs)
                    self.inference_overrides[lang] = target

    def groups_of(self, lang: str) -> set[int]:
        check_lang(lang)
        out = {gid for gid, langs in self.groups.items() if lang in langs}
        if not out:
            raise DataError(f"{lang!r} missing from the group table")
        return out

    @classmethod
    def load(cls, path: str | Path) -> "GroupTable":
        with open(path, "r", encoding="utf-8") as f:
            blob = json.load(f)
        groups = {int(gid): frozenset(langs) for gid, langs in blob["groups"].items()}
        overrides = {l: int(g) for l, g in blob.get("inference_overrides", {}).items()}
        return cls(groups=groups, inference_overrides=overrides)


@dataclass
class ModelRegistry:
    entries: dict[int, str]

    def model_for(self, group_id: int) -> str:
        try:
            return self.entries[group_id]
        except KeyError:
            raise DataError(f"registry has no model for group {group_id}") from None

    @classmethod
    def load(cls, path: str | Path) -> "ModelRegistry":
        with open(path, "r", encoding="utf-8") as f:
            blob = json.load(f)
        return cls(entries={int(g): m for g, m in blob.items()})


DEFAULT_TABLE = GroupTable()


def groups_of(lang: str, table: GroupTable = DEFAULT_TABLE) -> set[int]:
    return table.groups_of(lang)


def route(target: str, registry: ModelRegistry, table: GroupTable = DEFAULT_TABLE) -> str:
    """Model identifier for a target language; multi-group languages follow
    the inference override (swh goes to the Horn-of-Africa group's model)."""
    gids = table.groups_of(target)
    if len(gids) == 1:
        gid = next(iter(gids))
    else:
        gid = table.inference_overrides.get(target)
        if gid is None:
            raise DataError(f"{target!r} is in groups {sorted(gids)} with no override")
    return registry.model_for(gid)


def plan_training_groups(
    directions: list[tuple[str, str]], table: GroupTable = DEFAULT_TABLE
) -> dict[int, list[tuple[str, str]]]:
    """Assign each direction to every group containing its target language."""
    plan: dict[int, list[tuple[str, str]]] = {}
    for src, tgt in directions:
        check_lang(src)
        for gid in sorted(table.groups_of(tgt)):
            plan.setdefault(gid, []).append((src, tgt))
    return plan
