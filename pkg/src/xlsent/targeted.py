"""Target-level classifiers on top of the bilingual projection.

SPLIT averages the left context, the target phrase and the right context
separately, projects each with ``M`` (source) or ``M'`` (target), and feeds
the concatenation to a softmax layer ``Tclf`` of shape ``(3h, o)``.

``target_only`` zeroes both context blocks; ``context_only`` swaps the
target block for one learned vector shared by every target. The ``sent``
baseline classifies the whole sentence with a sentence-level model and
copies that label to each of its targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from . import blse, checkpoint
from .corpus import group_by_sentence, split_at_target, to_sentence_level
from .errors import ArgumentError, FormatError, SizeError
from .evaluation import macro_f1
from .linalg import softmax_rows

TARGETED_VARIANTS = ("split", "target_only", "context_only")


@dataclass
class TargetedParams:
    base: blse.BlseParams
    Tclf: np.ndarray
    variant: str = "split"
    shared_target: np.ndarray | None = None

    def __post_init__(self):
        if self.variant not in TARGETED_VARIANTS:
            raise ArgumentError(f"unknown targeted variant {self.variant!r}")
        if self.Tclf.shape[0] != 3 * self.h:
            raise SizeError(f"Tclf has {self.Tclf.shape[0]} rows, expected 3h = {3 * self.h}")
        if self.variant == "context_only" and self.shared_target is None:
            self.shared_target = np.zeros(self.h)

    @property
    def h(self) -> int:
        return self.base.h

    @property
    def o(self) -> int:
        return self.Tclf.shape[1]

    def project_source(self, a):
        return self.base.project_source(a)

    def project_target(self, a):
        return self.base.project_target(a)

    def features(self, L: np.ndarray, A: np.ndarray, R: np.ndarray, side: str) -> np.ndarray:
        """Concatenated ``[left, target, right]`` joint-space blocks after variant masking."""
        W = self.base.side_matrix(side)
        n = A.shape[0]
        zeros = np.zeros((n, self.h))
        Zl = zeros if self.variant == "target_only" else blse._project(L, W)
        Zr = zeros if self.variant == "target_only" else blse._project(R, W)
        if self.variant == "context_only":
            Zt = np.broadcast_to(self.shared_target, (n, self.h))
        else:
            Zt = blse._project(A, W)
        return np.hstack([Zl, Zt, Zr])

    def logits(self, L, A, R, side: str) -> np.ndarray:
        return self.features(L, A, R, side) @ self.Tclf

    def trainable(self) -> dict[str, np.ndarray]:
        out = {"M": self.base.M, "Mprime": self.base.Mprime, "Tclf": self.Tclf}
        if self.variant == "context_only":
            out["shared"] = self.shared_target
        return out

    def with_values(self, values: dict) -> "TargetedParams":
        base = blse.BlseParams(values.get("M", self.base.M), values.get("Mprime", self.base.Mprime),
                               None, "blse")
        return TargetedParams(base, values.get("Tclf", self.Tclf), self.variant,
                              values.get("shared", self.shared_target))

    def save(self, stream: TextIO, **extra_meta) -> None:
        meta = {"variant": self.variant, "d": self.base.M.shape[0],
                "dprime": self.base.Mprime.shape[0], "h": self.h, "o": self.o, **extra_meta}
        mats = {"M": self.base.M, "Mprime": self.base.Mprime, "Tclf": self.Tclf}
        if self.shared_target is not None:
            mats["shared"] = self.shared_target[None, :]
        checkpoint.write_checkpoint(stream, "targeted", meta, mats)

    @classmethod
    def load(cls, stream: TextIO) -> "TargetedParams":
        kind, meta, mats = checkpoint.read_checkpoint(stream)
        if kind != "targeted":
            raise FormatError(f"expected a targeted checkpoint, got kind {kind!r}")
        return cls.from_checkpoint(meta, mats)

    @classmethod
    def from_checkpoint(cls, meta: dict, mats: dict) -> "TargetedParams":
        base = blse.BlseParams(mats["M"], mats["Mprime"], None, "blse")
        shared = mats["shared"][0] if "shared" in mats else None
        return cls(base, mats["Tclf"], meta.get("variant", "split"), shared)


def init_targeted(d: int, dprime: int, h: int, o: int, seed: int = 0, variant: str = "split",
                  init: str = "uniform") -> TargetedParams:
    base = blse.init_params(d, dprime, h, o, seed, init)
    rng = np.random.default_rng([seed, 2])
    bound = 1.0 / math.sqrt(3 * h)
    Tclf = rng.uniform(-bound, bound, size=(3 * h, o))
    if variant == "target_only":
        Tclf[:h] = 0.0
        Tclf[2 * h:] = 0.0
    base = blse.BlseParams(base.M, base.Mprime, None, "blse")
    return TargetedParams(base, Tclf, variant)


def segment_features(space, instances: Sequence, oov_policy: str = "skip"):
    """Averaged ``(left, target, right)`` matrices and labels; empty segments average to zero."""
    n = len(instances)
    L, A, R = (np.zeros((n, space.dim)) for _ in range(3))
    for i, inst in enumerate(instances):
        left, target, right = split_at_target(inst)
        L[i] = space.average(left, oov_policy)
        A[i] = space.average(target, oov_policy)
        R[i] = space.average(right, oov_policy)
    y = np.array([inst.label for inst in instances], dtype=np.int64)
    return L, A, R, y


def targeted_forward(params: TargetedParams, space, instance, side: str = "source") -> np.ndarray:
    L, A, R, _ = segment_features(space, [instance])
    return softmax_rows(params.logits(L, A, R, side))[0]


variant_forward = targeted_forward


def predict_targeted(params: TargetedParams, space, instances: Sequence, side: str = "source") -> np.ndarray:
    L, A, R, _ = segment_features(space, instances)
    return np.argmax(params.logits(L, A, R, side), axis=1)


def loss_and_gradients(params: TargetedParams, alpha: float, L, A, R, y, S, T):
    """Joint loss of the targeted model and gradients for M, M', Tclf (and the shared target vector)."""
    h = params.h
    M, Mp, Tc = params.base.M, params.base.Mprime, params.Tclf
    grads = {k: np.zeros_like(v) for k, v in params.trainable().items()}
    Zcat = params.features(L, A, R, "source")
    H, G = blse.cross_entropy(Zcat @ Tc, y)
    grads["Tclf"] += alpha * (Zcat.T @ G)
    blocks = (Tc[:h], Tc[h:2 * h], Tc[2 * h:])
    if params.variant != "target_only":
        grads["M"] += alpha * (L.T @ (G @ blocks[0].T) + R.T @ (G @ blocks[2].T))
    if params.variant == "context_only":
        grads["shared"] += alpha * (G.sum(axis=0) @ blocks[1].T)
    else:
        grads["M"] += alpha * (A.T @ (G @ blocks[1].T))
    if params.variant == "target_only":
        grads["Tclf"][:h] = 0.0
        grads["Tclf"][2 * h:] = 0.0

    n = S.shape[0]
    mse = 0.0
    if n:
        D = S @ M - T @ Mp
        mse = float(np.sum(D * D) / n)
        grads["M"] += (1.0 - alpha) * (S.T @ (2.0 * D / n))
        grads["Mprime"] -= (1.0 - alpha) * (T.T @ (2.0 * D / n))
    return alpha * H + (1.0 - alpha) * mse, H, mse, grads


def train_targeted(config: blse.TrainConfig, src_space, trg_space, corpus: Sequence, lexicon,
                   lexicon_dev=None, src_dev: Sequence | None = None, trg_dev: Sequence | None = None,
                   variant: str = "split", n_labels: int | None = None):
    """Train a targeted model; ``variant='sent'`` trains the sentence-level model behind the Sent baseline.

    Returns ``(params, history)``; params are ``TargetedParams`` or, for
    ``sent``, ``BlseParams``.
    """
    if variant == "sent":
        sentences = to_sentence_level(corpus) if all(i.sid is not None for i in corpus) else list(corpus)
        return blse.train(config, src_space, trg_space, sentences, lexicon, lexicon_dev,
                          src_dev, trg_dev, n_labels=n_labels)
    if not corpus:
        raise ArgumentError("training corpus is empty")
    L, A, R, y = segment_features(src_space, corpus, config.oov_policy)
    o = n_labels if n_labels is not None else int(y.max()) + 1
    S, T, _ = lexicon.resolve(src_space, trg_space) if lexicon is not None else (
        np.zeros((0, src_space.dim)), np.zeros((0, trg_space.dim)), 0)
    S_dev, T_dev = (lexicon_dev.resolve(src_space, trg_space)[:2] if lexicon_dev is not None
                    else (None, None))
    h = config.hidden or src_space.dim
    params = init_targeted(src_space.dim, trg_space.dim, h, o, config.seed, variant, config.init)
    alpha = config.alpha

    def objective(values, idx, S_b, T_b):
        return loss_and_gradients(params.with_values(values), alpha, L[idx], A[idx], R[idx], y[idx],
                                  S_b, T_b)

    def dev_f1(p, space, data, side):
        if not data:
            return math.nan
        return macro_f1([i.label for i in data], predict_targeted(p, space, data, side), o)

    def evaluate(values):
        p = params.with_values(values)
        cos = blse.pair_cosine_values(p, S_dev, T_dev) if S_dev is not None else math.nan
        return cos, dev_f1(p, src_space, src_dev, "source"), dev_f1(p, trg_space, trg_dev, "target")

    values, history = blse.run_training(params.trainable(), objective, len(corpus), S, T, config,
                                        evaluate)
    return params.with_values(values), history


def sent_baseline(params: blse.BlseParams, space, instances: Sequence, side: str = "source") -> np.ndarray:
    """Label every target with the sentence-level prediction for its sentence."""
    groups = group_by_sentence(instances)
    out = np.empty(len(instances), dtype=np.int64)
    for members in groups.values():
        label = blse.predict(params, space, instances[members[0]].tokens, side)
        out[members] = label
    return out
