"""Projection baselines: least-squares mapping, CSLS retrieval, Barista corpora, linear classifier."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import checkpoint
from .errors import ArgumentError, DegenerateSystemError, FormatError, NumericDomainError
from .linalg import AdamState, adam_step, least_squares_solve, softmax_rows, unit_rows

log = logging.getLogger(__name__)

DEFAULT_K = 10


# least-squares mapping ----------------------------------------------------

@dataclass
class MappingMatrix:
    W: np.ndarray
    fit_residual: float
    pairs_used: int = 0
    pairs_skipped: int = 0

    def project_source(self, a):
        return np.asarray(a, dtype=np.float64) @ self.W

    def project_target(self, a):
        return np.asarray(a, dtype=np.float64)

    def project(self, a, side: str):
        return self.project_source(a) if side == "source" else self.project_target(a)

    def save(self, stream: TextIO) -> None:
        meta = {"d": self.W.shape[0], "dprime": self.W.shape[1],
                "residual": repr(self.fit_residual), "pairs": self.pairs_used}
        checkpoint.write_checkpoint(stream, "mapping", meta, {"W": self.W})

    @classmethod
    def load(cls, stream: TextIO) -> "MappingMatrix":
        kind, meta, mats = checkpoint.read_checkpoint(stream)
        if kind != "mapping":
            raise FormatError(f"expected a mapping checkpoint, got kind {kind!r}")
        return cls(mats["W"], float(meta.get("residual", "nan")), int(meta.get("pairs", 0)))


def nearest_orthogonal(W: np.ndarray) -> np.ndarray:
    """Orthogonal polar factor ``U V^T`` of ``W``."""
    U, _, Vt = np.linalg.svd(W, full_matrices=False)
    return U @ Vt


def fit_mapping(src_space, trg_space, lexicon, orthogonal: bool = False) -> MappingMatrix:
    """Least-squares W with ``S' W ~ T'`` over the lexicon pairs found in both spaces."""
    S, T, skipped = lexicon.resolve(src_space, trg_space)
    if skipped:
        log.info("skipped %d unresolvable lexicon pairs", skipped)
    d = src_space.dim
    if S.shape[0] < d:
        raise DegenerateSystemError(
            f"only {S.shape[0]} resolvable pairs for a {d}-dimensional source space")
    W = least_squares_solve(S, T)
    if orthogonal:
        W = nearest_orthogonal(W)
    residual = float(np.sum((S @ W - T) ** 2))
    return MappingMatrix(W, residual, S.shape[0], skipped)


# CSLS ---------------------------------------------------------------------

def _cos_matrix(Q: np.ndarray, C: np.ndarray) -> np.ndarray:
    return np.clip(unit_rows(np.atleast_2d(Q)) @ unit_rows(np.atleast_2d(C)).T, -1.0, 1.0)


def mean_knn_cosine(query, candidates, k: int) -> float:
    """Mean cosine between ``query`` and its ``k`` most similar candidate rows."""
    C = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    if C.shape[0] == 0:
        raise ArgumentError("candidate space is empty")
    if not 1 <= k <= C.shape[0]:
        raise ArgumentError(f"k={k} must be in [1, {C.shape[0]}]")
    sims = _cos_matrix(np.asarray(query, dtype=np.float64), C)[0]
    return float(np.mean(np.sort(sims)[-k:]))


def _row_topk_mean(sims: np.ndarray, k: int) -> np.ndarray:
    if not 1 <= k <= sims.shape[1]:
        raise ArgumentError(f"k={k} must be in [1, {sims.shape[1]}]")
    return np.mean(np.partition(sims, sims.shape[1] - k, axis=1)[:, -k:], axis=1)


def csls_score(wx, y, r_t: float, r_s: float) -> float:
    wx = np.asarray(wx, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    nx, ny = np.linalg.norm(wx), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise NumericDomainError("cosine undefined for a zero-norm vector")
    if not all(np.isfinite([nx, ny, r_t, r_s])):
        raise NumericDomainError("non-finite CSLS input")
    return 2.0 * float(wx @ y / (nx * ny)) - r_t - r_s


@dataclass
class CslsIndex:
    k: int
    r_source: np.ndarray  # per query: mean cosine to its k nearest candidates
    r_target: np.ndarray  # per candidate: mean cosine to its k nearest projected sources
    sims: np.ndarray

    def scores(self) -> np.ndarray:
        return 2.0 * self.sims - self.r_source[:, None] - self.r_target[None, :]


def build_csls(queries, candidates, k: int = DEFAULT_K, source_pool=None) -> CslsIndex:
    """Neighbourhood terms for CSLS.

    ``source_pool`` is the projected source vocabulary used for the candidate
    side neighbourhoods; it defaults to the queries themselves.
    """
    Q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    C = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    pool = Q if source_pool is None else np.atleast_2d(np.asarray(source_pool, dtype=np.float64))
    if np.any(np.linalg.norm(Q, axis=1) == 0) or np.any(np.linalg.norm(C, axis=1) == 0):
        raise NumericDomainError("zero-norm vector in CSLS input")
    sims = _cos_matrix(Q, C)
    r_s = _row_topk_mean(sims, k)
    r_t = _row_topk_mean(_cos_matrix(C, pool), k)
    return CslsIndex(k, r_s, r_t, sims)


def csls_retrieve(queries, candidates, k: int = DEFAULT_K, top: int | None = None, source_pool=None):
    """Rank every candidate for each query by CSLS; ties go to the lower candidate index.

    Returns ``(ranked_indices, ranked_scores)``, each of shape (queries, top).
    """
    index = build_csls(queries, candidates, k, source_pool)
    scores = index.scores()
    order = np.argsort(-scores, axis=1, kind="stable")
    if top is not None:
        order = order[:, :top]
    return order, np.take_along_axis(scores, order, axis=1)


def precision_at_1(ranked: np.ndarray, gold: Sequence[int]) -> float:
    return float(np.mean(ranked[:, 0] == np.asarray(gold)))


# Barista ------------------------------------------------------------------

def barista_corpus(src_lines: Iterable[Sequence[str]], trg_lines: Iterable[Sequence[str]], lexicon,
                   p: float = 0.5, seed: int = 0) -> list[list[str]]:
    """Concatenate both corpora and swap each lexicon-covered token for a translation with probability p.

    Source tokens are looked up source->target and target tokens
    target->source; a token with several translations takes one uniformly.
    """
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"p must be in [0, 1], got {p}")
    s2t: dict[str, list[str]] = {}
    t2s: dict[str, list[str]] = {}
    for s, t in lexicon.pairs:
        s2t.setdefault(s, []).append(t)
        t2s.setdefault(t, []).append(s)
    rng = np.random.default_rng(seed)
    out = []
    for lines, table in ((src_lines, s2t), (trg_lines, t2s)):
        for line in lines:
            new = []
            for tok in line:
                options = table.get(tok)
                if options is not None and rng.random() < p:
                    tok = options[0] if len(options) == 1 else options[rng.integers(len(options))]
                new.append(tok)
            out.append(new)
    return out


# linear classifier --------------------------------------------------------

@dataclass
class LinearClassifier:
    W: np.ndarray
    b: np.ndarray

    def decision_function(self, X) -> np.ndarray:
        return np.atleast_2d(np.asarray(X, dtype=np.float64)) @ self.W + self.b

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)


def linear_classifier_fit(X, y, n_labels: int | None = None, l2: float = 1e-4, epochs: int = 500,
                          learning_rate: float = 0.05, seed: int = 0) -> LinearClassifier:
    """L2-regularised multinomial logistic regression trained with full-batch ADAM.

    Weights start at zero, so ``seed`` only matters for API symmetry.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    o = n_labels if n_labels is not None else int(y.max()) + 1
    if len(np.unique(y)) < 2:
        raise ArgumentError("need at least two classes to train a classifier")
    n, d = X.shape
    W = np.zeros((d, o))
    b = np.zeros(o)
    sw = AdamState.zeros_like(W, learning_rate)
    sb = AdamState.zeros_like(b, learning_rate)
    Y = np.zeros((n, o))
    Y[np.arange(n), y] = 1.0
    for _ in range(epochs):
        G = (softmax_rows(X @ W + b) - Y) / n
        W, sw = adam_step(W, X.T @ G + l2 * W, sw)
        b, sb = adam_step(b, G.sum(axis=0), sb)
    return LinearClassifier(W, b)


def linear_classifier_predict(model: LinearClassifier, features) -> np.ndarray:
    return model.predict(features)
