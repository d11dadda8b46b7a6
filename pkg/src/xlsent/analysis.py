"""Diagnostics for bilingual spaces and corpora.

Models passed in here only need ``project_source`` / ``project_target``
methods, so ``BlseParams``, ``TargetedParams`` and ``MappingMatrix`` all work.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .embeddings import save_embeddings
from .errors import ArgumentError, NumericDomainError
from .linalg import cosine_rows, unit_rows


def _project(model, X: np.ndarray, side: str) -> np.ndarray:
    if side == "source":
        return model.project_source(X)
    if side == "target":
        return model.project_target(X)
    raise ArgumentError(f"side must be 'source' or 'target', got {side!r}")


def pair_cosine(model, src_space, trg_space, lexicon):
    """Mean cosine of projected translation pairs; returns ``(mean, pairs_used, pairs_skipped)``."""
    S, T, skipped = lexicon.resolve(src_space, trg_space)
    if S.shape[0] == 0:
        raise ArgumentError("no lexicon pair is covered by both spaces")
    cos = cosine_rows(model.project_source(S), model.project_target(T))
    return float(np.mean(cos)), S.shape[0], skipped


def synonym_antonym_separation(model, space, positive: Sequence[str], negative: Sequence[str],
                               side: str = "source"):
    """``(within, cross)`` mean pairwise cosines of projected polarity words.

    ``within`` pools all unordered pairs inside the positive set and inside
    the negative set; ``cross`` averages every positive/negative pair.
    """
    def rows(words, label):
        known = [w for w in words if w in space]
        if not known:
            raise ArgumentError(f"no {label} word is in the vocabulary")
        return unit_rows(_project(model, space.matrix[[space.index[w] for w in known]], side))

    P, N = rows(positive, "positive"), rows(negative, "negative")
    within = []
    for X in (P, N):
        sims = X @ X.T
        within.extend(sims[np.triu_indices(X.shape[0], k=1)].tolist())
    if not within:
        within = [1.0]
    cross = (P @ N.T).ravel()
    return float(np.mean(within)), float(np.mean(cross))


# n-gram profiles ----------------------------------------------------------

@dataclass
class NgramProfile:
    counts: Counter
    n: int = 3

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def normalized(self) -> dict[str, float]:
        total = self.total
        return {k: c / total for k, c in self.counts.items()}

    def to_dict(self) -> dict:
        return {"n": self.n, "counts": dict(sorted(self.counts.items()))}


def ngram_profile(symbols, n: int = 3) -> NgramProfile:
    """Sliding-window n-gram counts over a string (characters) or a token sequence.

    Token n-grams are keyed by their space-joined symbols.
    """
    if n < 1:
        raise ArgumentError("n must be >= 1")
    if len(symbols) < n:
        raise ArgumentError(f"sequence of length {len(symbols)} is shorter than n={n}")
    if isinstance(symbols, str):
        grams = (symbols[i:i + n] for i in range(len(symbols) - n + 1))
    else:
        seq = list(symbols)
        grams = (" ".join(seq[i:i + n]) for i in range(len(seq) - n + 1))
    return NgramProfile(Counter(grams), n)


def profile_lines(lines: Iterable, n: int = 3, chars: bool = False) -> NgramProfile:
    """Accumulate n-grams line by line so no n-gram spans two sentences."""
    counts: Counter = Counter()
    for line in lines:
        if chars:
            seq = line.rstrip("\n")
        else:
            seq = line.split() if isinstance(line, str) else list(line)
        if len(seq) >= n:
            counts.update(ngram_profile(seq, n).counts)
    if not counts:
        raise ArgumentError(f"no line has at least {n} symbols")
    return NgramProfile(counts, n)


def language_similarity(a_pos: NgramProfile, a_char: NgramProfile,
                        b_pos: NgramProfile, b_char: NgramProfile) -> float:
    """Cosine of the concatenated POS and character n-gram distributions."""
    def concat(pos, char):
        out = {("pos", k): v for k, v in pos.normalized.items()}
        out.update({("char", k): v for k, v in char.normalized.items()})
        return out

    for prof in (a_pos, a_char, b_pos, b_char):
        if not prof.counts:
            raise ArgumentError("empty n-gram profile")
    A, B = concat(a_pos, a_char), concat(b_pos, b_char)
    dot = sum(v * B.get(k, 0.0) for k, v in A.items())
    na = math.sqrt(sum(v * v for v in A.values()))
    nb = math.sqrt(sum(v * v for v in B.values()))
    return min(1.0, max(0.0, dot / (na * nb)))


# domain divergence --------------------------------------------------------

def _aligned(P, Q, smoothing: float):
    if isinstance(P, Mapping) or isinstance(Q, Mapping):
        keys = sorted(set(P) | set(Q))
        p = np.array([P.get(k, 0.0) for k in keys], dtype=np.float64)
        q = np.array([Q.get(k, 0.0) for k in keys], dtype=np.float64)
    else:
        p, q = np.asarray(P, dtype=np.float64), np.asarray(Q, dtype=np.float64)
        if p.shape != q.shape:
            raise ArgumentError("distributions have different supports")
    if p.size == 0 or p.sum() + q.sum() == 0:
        raise ArgumentError("empty distribution")
    if np.any(p < 0) or np.any(q < 0):
        raise NumericDomainError("negative count in distribution")
    p = p + smoothing
    q = q + smoothing
    return p / p.sum(), q / q.sum()


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def js_divergence(P, Q, smoothing: float = 1e-6) -> float:
    """``0.5 * (KL(P||Q) + KL(Q||P))`` after adding ``smoothing`` to every count.

    This is the symmetrised KL divergence, not the mixture-based
    Jensen-Shannon divergence. Accepts arrays or key -> count mappings.
    """
    if not smoothing > 0:
        raise ArgumentError("smoothing must be positive")
    p, q = _aligned(P, Q, smoothing)
    return max(0.0, 0.5 * (kl_divergence(p, q) + kl_divergence(q, p)))


def common_top_unigrams(corpora: Sequence[Iterable[Sequence[str]]], top: int = 10_000) -> list[str]:
    """Words in every corpus's ``top`` most frequent list, ordered by total frequency."""
    counts = [Counter(tok for line in corpus for tok in line) for corpus in corpora]
    common = None
    for c in counts:
        tops = {w for w, _ in sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[:top]}
        common = tops if common is None else common & tops
    total = Counter()
    for c in counts:
        total.update({w: c[w] for w in common})
    return sorted(common, key=lambda w: (-total[w], w))


def domain_divergence(corpus_a, corpus_b, top: int = 10_000, smoothing: float = 1e-6) -> float:
    a, b = list(corpus_a), list(corpus_b)
    vocab = common_top_unigrams([a, b], top)
    if not vocab:
        raise ArgumentError("the corpora share no frequent unigrams")
    ca = Counter(tok for line in a for tok in line)
    cb = Counter(tok for line in b for tok in line)
    return js_divergence([ca[w] for w in vocab], [cb[w] for w in vocab], smoothing)


# correlation --------------------------------------------------------------

def pearson_r(xs, ys) -> float:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ArgumentError("xs and ys must be 1-D sequences of equal length")
    if x.size < 2:
        raise ArgumentError("need at least two points")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = math.sqrt(float(dx @ dx)), math.sqrt(float(dy @ dy))
    if sx == 0 or sy == 0:
        raise NumericDomainError("zero variance")
    return max(-1.0, min(1.0, float(dx @ dy) / (sx * sy)))


# export -------------------------------------------------------------------

def export_projected(model, space, tokens: Sequence[str], side: str, stream: TextIO,
                     precision: int = 8) -> int:
    """Write projected vectors of ``tokens`` in word2vec text format; returns the count written."""
    missing = [t for t in tokens if t not in space]
    if missing:
        raise ArgumentError(f"{len(missing)} token(s) not in vocabulary, e.g. {missing[0]!r}")
    tokens = list(dict.fromkeys(tokens))
    if tokens:
        Z = _project(model, space.matrix[[space.index[t] for t in tokens]], side)
    else:
        width = _project(model, np.zeros((1, space.dim)), side).shape[1]
        Z = np.zeros((0, width))
    save_embeddings(tokens, stream, Z, precision=precision)
    return len(tokens)

