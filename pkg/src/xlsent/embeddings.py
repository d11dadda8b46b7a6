"""Monolingual embedding spaces in word2vec text format."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import ArgumentError, FormatError, SizeError

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddingSpace:
    words: tuple[str, ...]
    matrix: np.ndarray
    is_normalized: bool = False
    skipped_duplicates: int = 0
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] < 1:
            raise SizeError(f"embedding matrix must be v x d with d >= 1, got {matrix.shape}")
        if len(self.words) != matrix.shape[0]:
            raise SizeError(f"{len(self.words)} words for {matrix.shape[0]} rows")
        index = {w: i for i, w in enumerate(self.words)}
        if len(index) != len(self.words):
            raise ArgumentError("duplicate tokens in vocabulary")
        matrix.setflags(write=False)
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "index", index)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def vector(self, word: str) -> np.ndarray:
        return self.matrix[self.index[word]]

    def average(self, tokens: Iterable[str], oov_policy: str = "skip") -> np.ndarray:
        """Mean vector of ``tokens``.

        ``skip`` ignores unknown tokens; ``zero`` counts them as zero vectors.
        An empty effective set yields the zero vector.
        """
        vec, _ = self.average_with_count(tokens, oov_policy)
        return vec

    def average_with_count(self, tokens: Iterable[str], oov_policy: str = "skip"):
        if oov_policy not in ("skip", "zero"):
            raise ArgumentError(f"unknown oov_policy {oov_policy!r}")
        tokens = list(tokens)
        rows = [self.index[t] for t in tokens if t in self.index]
        divisor = len(rows) if oov_policy == "skip" else len(tokens)
        if divisor == 0:
            return np.zeros(self.dim), 0
        return self.matrix[rows].sum(axis=0) / divisor, len(rows)

    def normalize_rows(self) -> "EmbeddingSpace":
        norms = np.linalg.norm(self.matrix, axis=1, keepdims=True)
        safe = np.where(norms > 0, norms, 1.0)
        return EmbeddingSpace(self.words, self.matrix / safe, is_normalized=True)

    def subset(self, limit: int) -> "EmbeddingSpace":
        """First ``limit`` rows, as used by the monolingual-data ablation."""
        return EmbeddingSpace(self.words[:limit], self.matrix[:limit], self.is_normalized)


def load_embeddings(stream: TextIO, limit: int | None = None) -> EmbeddingSpace:
    words: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    dim = None
    duplicates = 0
    first = True
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        parts = line.rstrip().split(" ")
        if first:
            first = False
            if len(parts) == 2 and all(p.isdigit() for p in parts):
                dim = int(parts[1])
                continue
        if limit is not None and len(words) >= limit:
            break
        token, values = parts[0], parts[1:]
        if dim is None:
            dim = len(values)
        if len(values) != dim or dim == 0:
            raise FormatError(f"expected {dim} values for token {token!r}, got {len(values)}", lineno)
        try:
            vec = [float(v) for v in values]
        except ValueError as exc:
            raise FormatError(f"bad number for token {token!r}: {exc}", lineno) from None
        if token in seen:
            duplicates += 1
            continue
        seen.add(token)
        words.append(token)
        rows.append(vec)
    if dim is None or (not words and limit != 0):
        raise FormatError("empty embedding file")
    if duplicates:
        log.warning("skipped %d duplicate tokens", duplicates)
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    return EmbeddingSpace(tuple(words), matrix, skipped_duplicates=duplicates)


def save_embeddings(space_or_words, stream: TextIO, matrix: np.ndarray | None = None,
                    precision: int = 6) -> None:
    """Write ``<v> <d>`` then one ``token f1 ... fd`` line per row."""
    if isinstance(space_or_words, EmbeddingSpace):
        words, matrix = space_or_words.words, space_or_words.matrix
    else:
        words = list(space_or_words)
        matrix = np.zeros((0, 1)) if matrix is None else np.asarray(matrix)
    dim = matrix.shape[1] if matrix.ndim == 2 else 0
    stream.write(f"{len(words)} {dim}\n")
    fmt = f"%.{precision}f"
    for word, row in zip(words, matrix):
        stream.write(word + " " + " ".join(fmt % x for x in row) + "\n")


def read_embeddings(path, limit: int | None = None) -> EmbeddingSpace:
    with open(path, encoding="utf-8", errors="surrogateescape") as fh:
        return load_embeddings(fh, limit)
