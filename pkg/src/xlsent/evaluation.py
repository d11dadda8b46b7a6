"""Macro-averaged classification metrics and paired significance testing."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArgumentError

DEFAULT_ROUNDS = 10_000
_BLOCK = 1_000


@dataclass
class EvalReport:
    confusion: np.ndarray  # rows gold, columns predicted
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    macro_f1: float
    labels: tuple[str, ...] | None = None
    p_value: float | None = None

    def to_dict(self) -> dict:
        names = self.labels or tuple(str(i) for i in range(len(self.f1)))
        out = {
            "macro_f1": self.macro_f1,
            "per_class": {
                name: {"precision": float(p), "recall": float(r), "f1": float(f), "support": int(s)}
                for name, p, r, f, s in zip(names, self.precision, self.recall, self.f1, self.support)
            },
            "confusion": self.confusion.tolist(),
        }
        if self.p_value is not None:
            out["p_value"] = self.p_value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _as_labels(x) -> np.ndarray:
    return np.asarray(x, dtype=np.int64).reshape(-1)


def confusion_matrix(gold, pred, o: int) -> np.ndarray:
    gold, pred = _as_labels(gold), _as_labels(pred)
    if gold.shape != pred.shape:
        raise ArgumentError(f"{gold.size} gold labels but {pred.size} predictions")
    if gold.size == 0:
        raise ArgumentError("no instances to evaluate")
    for arr in (gold, pred):
        if arr.min() < 0 or arr.max() >= o:
            raise ArgumentError(f"labels must lie in [0, {o})")
    cm = np.zeros((o, o), dtype=np.int64)
    np.add.at(cm, (gold, pred), 1)
    return cm


def _prf(tp, n_pred, n_gold):
    tp, n_pred, n_gold = (np.asarray(a, dtype=np.float64) for a in (tp, n_pred, n_gold))
    p = np.divide(tp, n_pred, out=np.zeros_like(tp), where=n_pred > 0)
    r = np.divide(tp, n_gold, out=np.zeros_like(tp), where=n_gold > 0)
    denom = p + r
    f = np.divide(2 * p * r, denom, out=np.zeros_like(tp), where=denom > 0)
    return p, r, f


def evaluate(gold, pred, o: int, labels: Sequence[str] | None = None) -> EvalReport:
    cm = confusion_matrix(gold, pred, o)
    tp = np.diag(cm)
    p, r, f = _prf(tp, cm.sum(axis=0), cm.sum(axis=1))
    return EvalReport(cm, p, r, f, cm.sum(axis=1), float(f.mean()),
                      tuple(labels) if labels is not None else None)


def macro_f1(gold, pred, o: int) -> float:
    return evaluate(gold, pred, o).macro_f1


def _macro_f1_rows(gold: np.ndarray, preds: np.ndarray, o: int) -> np.ndarray:
    """Macro F1 for every row of a (rounds x n) prediction matrix."""
    f_sum = np.zeros(preds.shape[0])
    for c in range(o):
        is_pred = preds == c
        is_gold = gold == c
        tp = np.sum(is_pred & is_gold, axis=1)
        f_sum += _prf(tp, is_pred.sum(axis=1), np.full(preds.shape[0], is_gold.sum()))[2]
    return f_sum / o


def approx_randomization(gold, pred_a, pred_b, rounds: int = DEFAULT_ROUNDS, seed: int = 0,
                         o: int | None = None) -> float:
    """Paired approximate randomization test on the macro-F1 difference.

    Each round swaps the two systems' predictions per instance with
    probability 1/2. Returns ``(hits + 1) / (rounds + 1)`` where ``hits`` counts
    rounds whose statistic reaches the observed one. Rounds are drawn in fixed
    blocks of 1000 with independently spawned seeds, so the result does not
    depend on how blocks are scheduled.
    """
    gold, a, b = _as_labels(gold), _as_labels(pred_a), _as_labels(pred_b)
    if not (gold.shape == a.shape == b.shape):
        raise ArgumentError("gold and prediction sequences differ in length")
    if gold.size == 0:
        raise ArgumentError("no instances to test")
    if rounds < 1:
        raise ArgumentError("rounds must be >= 1")
    if o is None:
        o = int(max(gold.max(), a.max(), b.max())) + 1
    observed = abs(macro_f1(gold, a, o) - macro_f1(gold, b, o))
    seeds = np.random.SeedSequence(seed).spawn((rounds + _BLOCK - 1) // _BLOCK)
    hits = 0
    for block, ss in enumerate(seeds):
        size = min(_BLOCK, rounds - block * _BLOCK)
        swap = np.random.default_rng(ss).random((size, gold.size)) < 0.5
        pa = np.where(swap, b, a)
        pb = np.where(swap, a, b)
        stat = np.abs(_macro_f1_rows(gold, pa, o) - _macro_f1_rows(gold, pb, o))
        hits += int(np.sum(stat >= observed - 1e-12))
    return (hits + 1) / (rounds + 1)
