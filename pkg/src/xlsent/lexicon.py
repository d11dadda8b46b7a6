"""Bilingual word-to-word translation lexicons (TSV)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .errors import ArgumentError, FormatError


@dataclass(frozen=True)
class BilingualLexicon:
    pairs: tuple[tuple[str, str], ...]
    name: str = "lexicon"

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((s, t) for s, t in self.pairs))
        for s, t in self.pairs:
            if not s or not t:
                raise ArgumentError(f"empty token in pair ({s!r}, {t!r})")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def head(self, n: int) -> "BilingualLexicon":
        return BilingualLexicon(self.pairs[:n], f"{self.name}[:{n}]")

    def deduplicated(self) -> "BilingualLexicon":
        return BilingualLexicon(tuple(dict.fromkeys(self.pairs)), self.name)

    def resolve(self, src_space, trg_space):
        """Row vectors of the pairs present in both spaces, plus the skipped count."""
        kept = [(s, t) for s, t in self.pairs if s in src_space and t in trg_space]
        if kept:
            S = src_space.matrix[[src_space.index[s] for s, _ in kept]]
            T = trg_space.matrix[[trg_space.index[t] for _, t in kept]]
        else:
            S = np.zeros((0, src_space.dim))
            T = np.zeros((0, trg_space.dim))
        return S, T, len(self.pairs) - len(kept)


def load_lexicon(stream: TextIO, name: str = "lexicon") -> BilingualLexicon:
    pairs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError(f"expected 'source<TAB>target', got {len(fields)} field(s)", lineno)
        src, trg = fields[0].strip(), fields[1].strip()
        if not src or not trg:
            raise FormatError("missing source or target token", lineno)
        if len(src.split()) > 1 or len(trg.split()) > 1:
            raise FormatError("multi-word expressions are not allowed", lineno)
        pairs.append((src, trg))
    if not pairs:
        raise FormatError("lexicon contains no pairs")
    return BilingualLexicon(tuple(pairs), name)


def read_lexicon(path, name: str | None = None) -> BilingualLexicon:
    with open(path, encoding="utf-8") as fh:
        return load_lexicon(fh, name or str(path))


def save_lexicon(lexicon: BilingualLexicon, stream: TextIO) -> None:
    for s, t in lexicon.pairs:
        stream.write(f"{s}\t{t}\n")


def split_dev(lexicon: BilingualLexicon, fraction: float = 0.1, seed: int = 0):
    """Seeded random partition into ``(train, dev)`` with ``round(fraction * n)`` dev pairs."""
    if not 0.0 < fraction < 1.0:
        raise ArgumentError(f"fraction must be in (0, 1), got {fraction}")
    n = len(lexicon)
    n_dev = int(round(fraction * n))
    if n_dev < 1 or n_dev >= n:
        raise ArgumentError(f"split of {n} pairs at fraction {fraction} leaves a side empty")
    order = np.random.default_rng(seed).permutation(n)
    dev_idx = set(order[:n_dev].tolist())
    train = tuple(p for i, p in enumerate(lexicon.pairs) if i not in dev_idx)
    dev = tuple(p for i, p in enumerate(lexicon.pairs) if i in dev_idx)
    return (BilingualLexicon(train, f"{lexicon.name}:train"),
            BilingualLexicon(dev, f"{lexicon.name}:dev"))
