"""Label sets: in-domain and OOD class lists with prompt-ensemble embeddings.

A class is identified by its exact name string. Prompts are template strings
holding at most one ``{}`` placeholder, replaced by the class name; a class
with no prompts falls back to the bare name. Near-OOD classes are ordinary
out-side classes tagged ``tier: "near"``.

The seen/unseen protocol splits an ordered class list at index ceil(n/2):
the first half is the seen set, the second half the unseen set.

All types are frozen dataclasses; every operation is a pure function.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .embeddings import normalize
from .errors import (
    BadConfig,
    BadPromptTemplate,
    EmptyInSet,
    EmptyOutSet,
    MissingTextEmbedding,
)

IN_TIERS = ("seen", "unseen")
OUT_TIERS = ("seen", "unseen", "near")


@dataclass(frozen=True)
class ClassSpec:
    """One named class plus the prompt templates used to embed it."""

    name: str
    prompts: tuple[str, ...] = ()
    tier: str = "seen"

    def __post_init__(self):
        if not self.name:
            raise BadConfig("class name must be a non-empty string")
        for template in self.prompts:
            if template.count("{}") > 1:
                raise BadPromptTemplate(
                    f"prompt {template!r} holds more than one {{}} placeholder"
                )

    def expanded_prompts(self) -> tuple[str, ...]:
        """Prompt strings with the class name substituted; bare name if none."""
        if not self.prompts:
            return (self.name,)
        return tuple(t.replace("{}", self.name) for t in self.prompts)


@dataclass(frozen=True)
class LabelSet:
    """Disjoint in-domain and OOD class lists, order-preserving."""

    name: str
    in_classes: tuple[ClassSpec, ...]
    out_classes: tuple[ClassSpec, ...] = ()

    def in_names(self) -> tuple[str, ...]:
        return tuple(spec.name for spec in self.in_classes)

    def out_names(self) -> tuple[str, ...]:
        return tuple(spec.name for spec in self.out_classes)


@dataclass(frozen=True)
class SplitSpec:
    """Seen/unseen partition of both sides, plus optional near-OOD names."""

    seen_in: tuple[str, ...]
    unseen_in: tuple[str, ...] = ()
    seen_out: tuple[str, ...] = ()
    unseen_out: tuple[str, ...] = ()
    near_out: tuple[str, ...] = ()


def class_embedding(spec: ClassSpec, text_embedder) -> np.ndarray:
    """Mean of the class's prompt embeddings, re-normalized to unit norm.

    ``text_embedder`` maps an exact prompt string to its embedding vector;
    a dict works. A class with zero prompts uses the bare-name embedding.
    """
    lookup = text_embedder.get if hasattr(text_embedder, "get") else text_embedder
    rows = []
    for prompt in spec.expanded_prompts():
        vec = lookup(prompt)
        if vec is None:
            raise MissingTextEmbedding(
                f"no text embedding for prompt {prompt!r} (class {spec.name!r})"
            )
        rows.append(np.asarray(vec, dtype=np.float64))
    mean = np.mean(np.vstack(rows), axis=0)
    return normalize(mean)


def class_matrix(specs, text_embedder) -> np.ndarray:
    """Stacked class embeddings, one row per spec, in listed order."""
    return np.vstack([class_embedding(s, text_embedder) for s in specs])


def halves_split(class_names):
    """Cut an ordered list at ceil(n/2); concatenation restores the input."""
    names = tuple(class_names)
    if not names:
        raise BadConfig("cannot split an empty class list")
    cut = (len(names) + 1) // 2
    return names[:cut], names[cut:]


def validate(labelset: LabelSet) -> list[str]:
    """Structural violations as strings; empty list means the set is usable."""
    violations = []
    in_names = labelset.in_names()
    out_names = labelset.out_names()
    if not in_names:
        violations.append("in-domain class list is empty")
    for side, names in (("in", in_names), ("out", out_names)):
        seen = set()
        for name in names:
            if name in seen:
                violations.append(f"duplicate {side} class name {name!r}")
            seen.add(name)
    overlap = sorted(set(in_names) & set(out_names))
    for name in overlap:
        violations.append(f"class {name!r} appears on both sides")
    for spec in labelset.in_classes:
        if spec.tier not in IN_TIERS:
            violations.append(f"in class {spec.name!r} has invalid tier {spec.tier!r}")
    for spec in labelset.out_classes:
        if spec.tier not in OUT_TIERS:
            violations.append(f"out class {spec.name!r} has invalid tier {spec.tier!r}")
    return violations


def require_sides(labelset: LabelSet, need_out: bool = True) -> None:
    """Raise the config error a scoring run would hit on an unusable set."""
    if not labelset.in_classes:
        raise EmptyInSet(f"label set {labelset.name!r} has no in-domain classes")
    if need_out and not labelset.out_classes:
        raise EmptyOutSet(f"label set {labelset.name!r} has no OOD classes")


def split_spec(labelset: LabelSet) -> SplitSpec:
    """Seen/unseen/near partition read off the per-class tier tags."""
    return SplitSpec(
        seen_in=tuple(s.name for s in labelset.in_classes if s.tier == "seen"),
        unseen_in=tuple(s.name for s in labelset.in_classes if s.tier == "unseen"),
        seen_out=tuple(s.name for s in labelset.out_classes if s.tier == "seen"),
        unseen_out=tuple(s.name for s in labelset.out_classes if s.tier == "unseen"),
        near_out=tuple(s.name for s in labelset.out_classes if s.tier == "near"),
    )


def _parse_class(obj, side: str) -> ClassSpec:
    if not isinstance(obj, dict) or "name" not in obj:
        raise BadConfig(f"{side} class entry must be an object with a name")
    prompts = obj.get("prompts", [])
    if not isinstance(prompts, list) or not all(isinstance(p, str) for p in prompts):
        raise BadConfig(f"{side} class {obj['name']!r}: prompts must be strings")
    tier = obj.get("tier", "seen")
    allowed = IN_TIERS if side == "in" else OUT_TIERS
    if tier not in allowed:
        raise BadConfig(f"{side} class {obj['name']!r}: tier must be one of {allowed}")
    return ClassSpec(name=str(obj["name"]), prompts=tuple(prompts), tier=tier)


def from_config(obj: dict) -> LabelSet:
    """Build a LabelSet from the label-config JSON object."""
    if not isinstance(obj, dict):
        raise BadConfig("label config must be a JSON object")
    in_list = obj.get("in", [])
    out_list = obj.get("out", [])
    if not isinstance(in_list, list) or not isinstance(out_list, list):
        raise BadConfig("label config 'in' and 'out' must be lists")
    return LabelSet(
        name=str(obj.get("name", "")),
        in_classes=tuple(_parse_class(c, "in") for c in in_list),
        out_classes=tuple(_parse_class(c, "out") for c in out_list),
    )


def load_config(path) -> LabelSet:
    """Read a label-config JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise BadConfig(f"{path}: not valid JSON ({exc})") from exc
    return from_config(obj)


def to_config(labelset: LabelSet) -> dict:
    """Label-config JSON object for a LabelSet (inverse of from_config)."""
    def enc(spec: ClassSpec) -> dict:
        return {"name": spec.name, "prompts": list(spec.prompts), "tier": spec.tier}

    return {
        "name": labelset.name,
        "in": [enc(s) for s in labelset.in_classes],
        "out": [enc(s) for s in labelset.out_classes],
    }
