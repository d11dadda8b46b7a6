"""Labelled sentence- and target-level datasets in JSONL."""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .errors import ArgumentError, FormatError


@dataclass(frozen=True)
class LabelSchema:
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) < 2 or len(set(self.names)) != len(self.names):
            raise ArgumentError(f"label schema needs >= 2 unique names, got {self.names}")

    @property
    def arity(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


BINARY = LabelSchema(("negative", "positive"))
THREE_CLASS = LabelSchema(("negative", "neutral", "positive"))
FOUR_CLASS = LabelSchema(("strong_negative", "negative", "positive", "strong_positive"))
SCHEMAS = {"binary": BINARY, "3class": THREE_CLASS, "4class": FOUR_CLASS}


def get_schema(spec: str) -> LabelSchema:
    """A named schema or a comma-separated list of label names."""
    if spec in SCHEMAS:
        return SCHEMAS[spec]
    return LabelSchema(tuple(s.strip() for s in spec.split(",")))


@dataclass(frozen=True)
class LabeledSentence:
    tokens: tuple[str, ...]
    label: int

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ArgumentError("sentence has no tokens")


@dataclass(frozen=True)
class TargetedInstance:
    """Token sequence with a half-open target span; span ``[0, 0)`` marks a sentence-level item."""

    tokens: tuple[str, ...]
    label: int
    target_start: int = 0
    target_end: int = 0
    sid: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ArgumentError("instance has no tokens")
        if self.is_sentence_level:
            return
        if not 0 <= self.target_start < self.target_end <= len(self.tokens):
            raise ArgumentError(
                f"target span [{self.target_start}, {self.target_end}) invalid for "
                f"{len(self.tokens)} tokens")

    @property
    def is_sentence_level(self) -> bool:
        return self.target_start == 0 and self.target_end == 0


def load_corpus(stream: TextIO, schema: LabelSchema, drop_mixed: bool = False) -> list[TargetedInstance]:
    """Parse JSONL records ``{"tokens": [...], "label": name, "target": [s, e], "sid": id}``.

    With ``drop_mixed`` every sentence group (shared ``sid``) whose targets
    disagree in label is removed.
    """
    out: list[TargetedInstance] = []
    spans: dict[str, list[tuple[int, int, int]]] = defaultdict(list)
    for lineno, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", lineno) from None
        if not isinstance(rec, dict):
            raise FormatError("record is not a JSON object", lineno)
        tokens = rec.get("tokens")
        if not isinstance(tokens, list) or not tokens or not all(isinstance(t, str) for t in tokens):
            raise FormatError("'tokens' must be a non-empty list of strings", lineno)
        name = rec.get("label")
        if name not in schema.names:
            raise FormatError(f"unknown label {name!r}", lineno)
        sid = rec.get("sid")
        sid = None if sid is None else str(sid)
        start = end = 0
        if rec.get("target") is not None:
            target = rec["target"]
            if (not isinstance(target, list) or len(target) != 2
                    or not all(isinstance(x, int) for x in target)):
                raise FormatError("'target' must be [start, end]", lineno)
            start, end = target
            if not 0 <= start < end <= len(tokens):
                raise FormatError(f"target span [{start}, {end}) out of bounds", lineno)
            if sid is not None:
                for s0, e0, other in spans[sid]:
                    if start < e0 and s0 < end:
                        raise FormatError(
                            f"target span overlaps the span on line {other} in sentence {sid!r}", lineno)
                spans[sid].append((start, end, lineno))
        out.append(TargetedInstance(tuple(tokens), schema.index(name), start, end, sid))
    if drop_mixed:
        out = remove_mixed_polarity(out)
    return out


def read_corpus(path, schema: LabelSchema, drop_mixed: bool = False) -> list[TargetedInstance]:
    with open(path, encoding="utf-8") as fh:
        return load_corpus(fh, schema, drop_mixed)


def dump_corpus(corpus: Iterable, schema: LabelSchema, stream: TextIO) -> None:
    for inst in corpus:
        rec = {"tokens": list(inst.tokens), "label": schema.names[inst.label]}
        if isinstance(inst, TargetedInstance):
            if not inst.is_sentence_level:
                rec["target"] = [inst.target_start, inst.target_end]
            if inst.sid is not None:
                rec["sid"] = inst.sid
        stream.write(json.dumps(rec, ensure_ascii=False) + "\n")


def group_by_sentence(corpus: Sequence[TargetedInstance]) -> dict[str, list[int]]:
    """Instance indices keyed by ``sid``, in first-appearance order."""
    groups: dict[str, list[int]] = {}
    for i, inst in enumerate(corpus):
        if inst.sid is None:
            raise ArgumentError(f"instance {i} has no sentence id")
        groups.setdefault(inst.sid, []).append(i)
    return groups


def remove_mixed_polarity(corpus: Sequence[TargetedInstance]) -> list[TargetedInstance]:
    labels: dict[str, set[int]] = defaultdict(set)
    for inst in corpus:
        if inst.sid is not None:
            labels[inst.sid].add(inst.label)
    return [inst for inst in corpus if inst.sid is None or len(labels[inst.sid]) == 1]


def to_sentence_level(corpus: Sequence[TargetedInstance]) -> list[LabeledSentence]:
    """Collapse sentence groups to one example carrying the most common target label.

    Ties go to the lowest label index. Instances without ``sid`` stand alone.
    """
    out: list[LabeledSentence] = []
    seen: dict[str, int] = {}
    votes: dict[str, Counter] = defaultdict(Counter)
    for inst in corpus:
        if inst.sid is None:
            out.append(LabeledSentence(inst.tokens, inst.label))
            continue
        votes[inst.sid][inst.label] += 1
        if inst.sid not in seen:
            seen[inst.sid] = len(out)
            out.append(LabeledSentence(inst.tokens, inst.label))
    for sid, pos in seen.items():
        counts = votes[sid]
        top = max(counts.values())
        label = min(k for k, c in counts.items() if c == top)
        out[pos] = LabeledSentence(out[pos].tokens, label)
    return out


def map_labels(corpus: Sequence, schema: LabelSchema, mode: str):
    """Re-express ``corpus`` under a binary or multiclass schema.

    Binary merges strong and weak classes of the same polarity and drops
    neutral instances. Multiclass keeps the source schema unchanged.
    Returns ``(new_corpus, new_schema)``.
    """
    if mode not in ("binary", "multiclass"):
        raise ArgumentError(f"unknown mode {mode!r}")
    if schema.arity < 3:
        raise ArgumentError(f"mode {mode!r} needs a 3- or 4-class source schema, got {schema.names}")
    if mode == "multiclass":
        return list(corpus), schema
    target = {}
    for i, name in enumerate(schema.names):
        key = name.lower()
        if key == "neutral":
            target[i] = None
        elif key.endswith("negative"):
            target[i] = BINARY.index("negative")
        elif key.endswith("positive"):
            target[i] = BINARY.index("positive")
        else:
            raise ArgumentError(f"label {name!r} has no binary counterpart")
    out = []
    for inst in corpus:
        new = target[inst.label]
        if new is None:
            continue
        if isinstance(inst, TargetedInstance):
            out.append(TargetedInstance(inst.tokens, new, inst.target_start, inst.target_end, inst.sid))
        else:
            out.append(LabeledSentence(inst.tokens, new))
    return out, BINARY


def split_at_target(instance: TargetedInstance):
    """``(left, target, right)`` token tuples around the target span."""
    if instance.is_sentence_level:
        raise ArgumentError("sentence-level instance has no target span")
    t = instance.tokens
    s, e = instance.target_start, instance.target_end
    return t[:s], t[s:e], t[e:]
