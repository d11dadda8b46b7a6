"""Slow, obviously-correct reference implementations used as test oracles.

Everything here is plain Python loops over lists so it shares no code path
with the vectorised library.
"""

from __future__ import annotations

import itertools
import math


def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def vecmat(a, B):
    return matmul([list(a)], B)[0]


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def norm(a):
    return math.sqrt(dot(a, a))


def cosine(a, b):
    return dot(a, b) / (norm(a) * norm(b))


def softmax(z):
    m = max(z)
    e = [math.exp(x - m) for x in z]
    s = sum(e)
    return [x / s for x in e]


def mean_sq_distance(S, T, M, Mp):
    total = 0.0
    for s, t in zip(S, T):
        zs, zt = vecmat(s, M), vecmat(t, Mp)
        total += sum((a - b) ** 2 for a, b in zip(zs, zt))
    return total / len(S)


def nll(probs_rows, labels):
    return -sum(math.log(p[y]) for p, y in zip(probs_rows, labels)) / len(labels)


def knn_mean(query, rows, k):
    sims = sorted((cosine(query, r) for r in rows), reverse=True)
    return sum(sims[:k]) / k


def csls_rank(queries, candidates, k, pool=None):
    """Full CSLS ranking per query by enumerating every (query, candidate) pair."""
    pool = queries if pool is None else pool
    r_s = [knn_mean(q, candidates, k) for q in queries]
    r_t = [knn_mean(c, pool, k) for c in candidates]
    out = []
    for qi, q in enumerate(queries):
        scored = [(2 * cosine(q, c) - r_s[qi] - r_t[ci], ci) for ci, c in enumerate(candidates)]
        scored.sort(key=lambda sc: (-sc[0], sc[1]))
        out.append([ci for _, ci in scored])
    return out


def macro_f1(gold, pred, o):
    f_total = 0.0
    for c in range(o):
        tp = sum(1 for g, p in zip(gold, pred) if g == c and p == c)
        n_pred = sum(1 for p in pred if p == c)
        n_gold = sum(1 for g in gold if g == c)
        prec = tp / n_pred if n_pred else 0.0
        rec = tp / n_gold if n_gold else 0.0
        f_total += 2 * prec * rec / (prec + rec) if prec + rec else 0.0
    return f_total / o


def exact_randomization(gold, a, b, o):
    """Exact permutation p-value: fraction of all 2^n swap patterns reaching the observed statistic."""
    observed = abs(macro_f1(gold, a, o) - macro_f1(gold, b, o))
    hits = 0
    total = 0
    for mask in itertools.product((False, True), repeat=len(gold)):
        pa = [y if m else x for x, y, m in zip(a, b, mask)]
        pb = [x if m else y for x, y, m in zip(a, b, mask)]
        hits += abs(macro_f1(gold, pa, o) - macro_f1(gold, pb, o)) >= observed - 1e-12
        total += 1
    return hits / total


def ngram_counts(symbols, n):
    counts = {}
    for i in range(len(symbols) - n + 1):
        gram = symbols[i:i + n]
        key = gram if isinstance(gram, str) else " ".join(gram)
        counts[key] = counts.get(key, 0) + 1
    return counts


def sym_kl(p, q):
    kl = lambda a, b: sum(x * math.log(x / y) for x, y in zip(a, b) if x > 0)
    return 0.5 * (kl(p, q) + kl(q, p))
