"""Scenario catalog: the closed vocabulary of maneuver types.

The catalog is a versioned data file listing every scenario type with its
category, textual definition, negative scenarios (types that cannot occur
simultaneously for the same subjects), and the question template used when
the type becomes a multiple-choice question. Entries flagged
``distractor_only`` are referenced as negatives but are not mined
themselves; they carry no negatives of their own.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, NamedTuple

CATEGORIES = ("Ego", "Agent", "EgoToAgent", "AgentToAgent")
CATEGORY_ARITY = {"Ego": 0, "Agent": 1, "EgoToAgent": 1, "AgentToAgent": 2}
MINED_CARDINALITY = {"Ego": 6, "Agent": 17, "EgoToAgent": 7, "AgentToAgent": 13}

DEFAULT_CATALOG_RESOURCE = "data/catalog/stsnu.v1.json"


class CatalogError(ValueError):
    """Raised when a catalog document cannot be loaded."""


class Violation(NamedTuple):
    path: str
    rule: str

    def __str__(self) -> str:
        return f"{self.path}: {self.rule}"


@dataclass(frozen=True)
class CatalogEntry:
    """One scenario type.

    ``negatives`` are ordered as authored; ``option_label`` is the short
    phrase used when the type appears as an answer option, with an optional
    ``{PARTNER}`` placeholder for the interaction partner.
    """

    name: str
    category: str
    arity: int
    definition_text: str
    negatives: tuple[str, ...]
    question_template: str
    option_label: str
    distractor_only: bool = False


@dataclass(frozen=True)
class Catalog:
    """Immutable collection of catalog entries, indexed by name."""

    entries: tuple[CatalogEntry, ...]
    _by_name: dict[str, CatalogEntry] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_name", {e.name: e for e in self.entries})

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def entry(self, name: str) -> CatalogEntry:
        try:
            return self._by_name[name]
        except KeyError:
            raise CatalogError(f"unknown scenario type '{name}'") from None

    def mined_entries(self) -> tuple[CatalogEntry, ...]:
        return tuple(e for e in self.entries if not e.distractor_only)

    def negatives_of(
        self,
        type_name: str,
        context: Iterable[str] = (),
        rejected: Iterable[str] = (),
    ) -> list[str]:
        """Negatives of ``type_name`` minus co-detected and rejected types.

        Order follows the authored negative list.
        """
        drop = set(context) | set(rejected)
        return [n for n in self.entry(type_name).negatives if n not in drop]


_REQUIRED_KEYS = {
    "name", "category", "arity", "definition_text", "negatives",
    "question_template",
}
_OPTIONAL_KEYS = {"option_label", "distractor_only"}


def _entry_from_dict(doc: object, position: int) -> CatalogEntry:
    if not isinstance(doc, dict):
        raise CatalogError(f"entry {position}: expected object")
    label = doc.get("name", f"entry {position}")
    keys = set(doc)
    missing = _REQUIRED_KEYS - keys
    if missing:
        raise CatalogError(f"{label}: missing key '{sorted(missing)[0]}'")
    unexpected = keys - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if unexpected:
        raise CatalogError(f"{label}: unexpected key '{sorted(unexpected)[0]}'")
    name = doc["name"]
    category = doc["category"]
    arity = doc["arity"]
    negatives = doc["negatives"]
    if not isinstance(name, str) or not name:
        raise CatalogError(f"{label}: name must be a non-empty string")
    if category not in CATEGORIES:
        raise CatalogError(f"{name}: unknown category '{category}'")
    if not isinstance(arity, int) or isinstance(arity, bool):
        raise CatalogError(f"{name}: arity must be an integer")
    if arity != CATEGORY_ARITY[category]:
        raise CatalogError(
            f"{name}: arity {arity} does not match category {category}"
        )
    if not isinstance(negatives, list) or any(
        not isinstance(n, str) for n in negatives
    ):
        raise CatalogError(f"{name}: negatives must be a list of names")
    for key in ("definition_text", "question_template"):
        if not isinstance(doc[key], str):
            raise CatalogError(f"{name}: {key} must be a string")
    option_label = doc.get("option_label", name.split("_", 1)[-1].replace("_", " "))
    if not isinstance(option_label, str):
        raise CatalogError(f"{name}: option_label must be a string")
    distractor_only = doc.get("distractor_only", False)
    if not isinstance(distractor_only, bool):
        raise CatalogError(f"{name}: distractor_only must be a boolean")
    return CatalogEntry(
        name=name,
        category=category,
        arity=arity,
        definition_text=doc["definition_text"],
        negatives=tuple(negatives),
        question_template=doc["question_template"],
        option_label=option_label,
        distractor_only=distractor_only,
    )


def load_catalog(document: str | bytes | list) -> Catalog:
    """Load a catalog from JSON text or an already-parsed entry list.

    The document must describe the full vocabulary: 43 mined entries split
    6/17/7/13 across the four categories, with every negative resolving to
    an entry in the same file. Violating documents raise
    :class:`CatalogError` naming the offending entry.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"invalid catalog JSON: {exc}") from None
    if not isinstance(document, list):
        raise CatalogError("catalog document must be a list of entries")
    entries = [_entry_from_dict(doc, i) for i, doc in enumerate(document)]
    seen: set[str] = set()
    for entry in entries:
        if entry.name in seen:
            raise CatalogError(f"{entry.name}: duplicate entry")
        seen.add(entry.name)
    for entry in entries:
        for negative in entry.negatives:
            if negative not in seen:
                raise CatalogError(
                    f"{entry.name}: unknown negative name '{negative}'"
                )
    counts = {c: 0 for c in CATEGORIES}
    for entry in entries:
        if not entry.distractor_only:
            counts[entry.category] += 1
    if counts != MINED_CARDINALITY:
        raise CatalogError(
            "wrong cardinality: expected "
            f"{MINED_CARDINALITY}, got {counts}"
        )
    return Catalog(tuple(entries))


@lru_cache(maxsize=1)
def default_catalog() -> Catalog:
    """The catalog shipped with the package."""
    data = resources.files("sts").joinpath(DEFAULT_CATALOG_RESOURCE).read_bytes()
    return load_catalog(data)


def _template_violations(entry: CatalogEntry) -> list[Violation]:
    violations = []
    template = entry.question_template
    wants_agent1 = entry.arity >= 1
    wants_agent2 = entry.arity >= 2
    for placeholder, wanted in (("{AGENT1}", wants_agent1), ("{AGENT2}", wants_agent2)):
        present = placeholder in template
        if wanted and not present:
            violations.append(Violation(
                entry.name,
                f"question_template missing {placeholder} for arity {entry.arity}",
            ))
        if present and not wanted:
            violations.append(Violation(
                entry.name,
                f"question_template has {placeholder} but arity is {entry.arity}",
            ))
    return violations


def validate_catalog(catalog: Catalog) -> list[Violation]:
    """Check catalog-wide invariants and report every breach."""
    violations: list[Violation] = []
    counts = {c: 0 for c in CATEGORIES}
    for entry in catalog.entries:
        if not entry.distractor_only:
            counts[entry.category] += 1
    for category in CATEGORIES:
        if counts[category] != MINED_CARDINALITY[category]:
            violations.append(Violation(
                f"category {category}",
                f"expected {MINED_CARDINALITY[category]} mined entries, "
                f"got {counts[category]}",
            ))
    for entry in catalog.entries:
        if entry.name in entry.negatives:
            violations.append(Violation(
                entry.name, "negatives must not contain the entry itself"
            ))
        if not entry.distractor_only and not entry.negatives:
            violations.append(Violation(entry.name, "negatives must be non-empty"))
        for negative in entry.negatives:
            if negative not in catalog:
                violations.append(Violation(
                    entry.name, f"negative '{negative}' does not resolve"
                ))
        violations.extend(_template_violations(entry))
    return violations
