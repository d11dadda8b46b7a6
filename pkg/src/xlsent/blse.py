"""Bilingual sentiment embeddings: joint projection + sentiment model.

Source sentences are averaged, projected with ``M`` and classified with the
softmax head ``P``; translation pairs are pulled together by a squared
distance between ``s M`` and ``t M'``. At test time target-language text is
projected with ``M'`` and classified by the same head.

Two ablations live here as well:

* ``no_mprime`` shares one matrix ``M`` between both languages.
* ``no_projection`` drops ``P``; ``M`` and ``M'`` map straight to label
  logits and the alignment penalty is the plain (unsquared) distance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields
from typing import Callable, Sequence, TextIO

import numpy as np

from . import checkpoint
from .errors import ArgumentError, FormatError, SizeError, TrainingError
from .evaluation import macro_f1
from .linalg import AdamState, adam_step, cosine_rows, log_softmax_rows, softmax_rows

log = logging.getLogger(__name__)

VARIANTS = ("blse", "no_mprime", "no_projection")
SIDES = ("source", "target")


@dataclass
class BlseParams:
    M: np.ndarray
    Mprime: np.ndarray | None
    P: np.ndarray | None
    variant: str = "blse"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ArgumentError(f"unknown variant {self.variant!r}")
        width = self.M.shape[1]
        if self.Mprime is not None and self.Mprime.shape[1] != width:
            raise SizeError(f"M has {width} columns but M' has {self.Mprime.shape[1]}")
        if self.P is not None and self.P.shape[0] != width:
            raise SizeError(f"P has {self.P.shape[0]} rows, expected {width}")

    @property
    def target_matrix(self) -> np.ndarray:
        return self.M if self.Mprime is None else self.Mprime

    @property
    def h(self) -> int:
        return self.M.shape[1]

    @property
    def o(self) -> int:
        return self.h if self.P is None else self.P.shape[1]

    def side_matrix(self, side: str) -> np.ndarray:
        if side == "source":
            return self.M
        if side == "target":
            return self.target_matrix
        raise ArgumentError(f"side must be 'source' or 'target', got {side!r}")

    def project_source(self, a) -> np.ndarray:
        return _project(np.asarray(a, dtype=np.float64), self.M)

    def project_target(self, a) -> np.ndarray:
        return _project(np.asarray(a, dtype=np.float64), self.target_matrix)

    def project(self, a, side: str) -> np.ndarray:
        return _project(np.asarray(a, dtype=np.float64), self.side_matrix(side))

    def logits(self, X: np.ndarray, side: str) -> np.ndarray:
        Z = self.project(X, side)
        return Z if self.P is None else Z @ self.P

    def trainable(self) -> dict[str, np.ndarray]:
        return {k: v for k, v in (("M", self.M), ("Mprime", self.Mprime), ("P", self.P)) if v is not None}

    def with_values(self, values: dict[str, np.ndarray]) -> "BlseParams":
        return BlseParams(values.get("M", self.M), values.get("Mprime", self.Mprime),
                          values.get("P", self.P), self.variant)

    def copy(self) -> "BlseParams":
        return self.with_values({k: v.copy() for k, v in self.trainable().items()})

    def save(self, stream: TextIO, **extra_meta) -> None:
        meta = {"variant": self.variant, "d": self.M.shape[0],
                "dprime": self.target_matrix.shape[0], "h": self.h, "o": self.o, **extra_meta}
        checkpoint.write_checkpoint(stream, "blse", meta, self.trainable())

    @classmethod
    def load(cls, stream: TextIO) -> "BlseParams":
        kind, meta, mats = checkpoint.read_checkpoint(stream)
        if kind != "blse":
            raise FormatError(f"expected a blse checkpoint, got kind {kind!r}")
        return cls.from_checkpoint(meta, mats)

    @classmethod
    def from_checkpoint(cls, meta: dict, mats: dict) -> "BlseParams":
        return cls(mats["M"], mats.get("Mprime"), mats.get("P"), meta.get("variant", "blse"))


def _project(a: np.ndarray, W: np.ndarray) -> np.ndarray:
    if a.shape[-1] != W.shape[0]:
        raise SizeError(f"vector of dim {a.shape[-1]} cannot be projected by a {W.shape} matrix")
    return a @ W


def init_params(d: int, dprime: int, h: int, o: int, seed: int = 0,
                init: str = "uniform", variant: str = "blse") -> BlseParams:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) entries, or identity projections."""
    if min(d, dprime, h, o) < 1:
        raise ArgumentError("all dimensions must be >= 1")
    if variant not in VARIANTS:
        raise ArgumentError(f"unknown variant {variant!r}")
    if variant == "no_mprime" and d != dprime:
        raise SizeError(f"shared projection needs d == d', got {d} and {dprime}")
    if variant == "no_projection":
        h = o
    rng = np.random.default_rng(seed)

    def uniform(rows, cols):
        bound = 1.0 / math.sqrt(rows)
        return rng.uniform(-bound, bound, size=(rows, cols))

    if init == "identity":
        if d != h or dprime != h:
            raise ArgumentError(f"identity init needs d == d' == h, got {d}, {dprime}, {h}")
        M = np.eye(d)
        Mprime = np.eye(dprime)
    elif init == "uniform":
        M = uniform(d, h)
        Mprime = uniform(dprime, h)
    else:
        raise ArgumentError(f"unknown init {init!r}")
    P = uniform(h, o)
    if variant == "no_mprime":
        Mprime = None
    if variant == "no_projection":
        P = None
    return BlseParams(M, Mprime, P, variant)


def featurize(space, sentences: Sequence, oov_policy: str = "skip"):
    """Averaged embeddings ``X`` (n x d), labels ``y`` and a mask of instances with any known token."""
    X = np.zeros((len(sentences), space.dim))
    found = np.zeros(len(sentences), dtype=bool)
    for i, sent in enumerate(sentences):
        X[i], hits = space.average_with_count(sent.tokens, oov_policy)
        found[i] = hits > 0
    y = np.array([s.label for s in sentences], dtype=np.int64)
    return X, y, found


# losses -------------------------------------------------------------------

def sentiment_forward(params: BlseParams, space, tokens: Sequence[str], side: str = "source",
                      oov_policy: str = "skip") -> np.ndarray:
    """Label distribution for one tokenised sentence; all-OOV input gives the uniform distribution."""
    a, hits = space.average_with_count(tokens, oov_policy)
    if hits == 0:
        log.debug("sentence has no in-vocabulary tokens: %r", list(tokens)[:8])
    return softmax_rows(params.logits(a[None, :], side))[0]


def predict_probs(params: BlseParams, X: np.ndarray, side: str = "source") -> np.ndarray:
    return softmax_rows(params.logits(X, side))


def predict_features(params: BlseParams, X: np.ndarray, side: str = "source") -> np.ndarray:
    """Argmax labels for averaged features; ties go to the lowest index."""
    return np.argmax(params.logits(X, side), axis=1)


def predict(params: BlseParams, space, tokens: Sequence[str], side: str = "source") -> int:
    return int(np.argmax(sentiment_forward(params, space, tokens, side)))


def predict_batch(params: BlseParams, space, sentences: Sequence, side: str = "source") -> np.ndarray:
    X, _, _ = featurize(space, sentences)
    return predict_features(params, X, side)


def _check_labels(y: np.ndarray, o: int):
    if y.size and (y.min() < 0 or y.max() >= o):
        raise ArgumentError(f"labels must lie in [0, {o}), got range [{y.min()}, {y.max()}]")


def cross_entropy(logits: np.ndarray, y: np.ndarray):
    """Mean NLL of gold labels and its gradient w.r.t. the logits."""
    b = logits.shape[0]
    logp = log_softmax_rows(logits)
    loss = -float(np.mean(logp[np.arange(b), y]))
    G = np.exp(logp)
    G[np.arange(b), y] -= 1.0
    return loss, G / b


def sentiment_loss(params: BlseParams, X: np.ndarray, y, side: str = "source") -> float:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ArgumentError("sentiment batch is empty")
    _check_labels(y, params.o)
    return cross_entropy(params.logits(X, side), y)[0]


def projection_loss(params: BlseParams, S: np.ndarray, T: np.ndarray) -> float:
    """Mean over pairs of ``||s M - t M'||^2`` (``||.||`` unsquared for ``no_projection``)."""
    S = np.atleast_2d(np.asarray(S, dtype=np.float64))
    T = np.atleast_2d(np.asarray(T, dtype=np.float64))
    if S.shape[0] == 0:
        raise ArgumentError("translation pair list is empty")
    if S.shape[0] != T.shape[0]:
        raise SizeError(f"{S.shape[0]} source vectors for {T.shape[0]} target vectors")
    D = params.project_source(S) - params.project_target(T)
    if params.variant == "no_projection":
        return float(np.mean(np.linalg.norm(D, axis=1)))
    return float(np.sum(D * D) / S.shape[0])


def joint_loss(params: BlseParams, alpha: float, X, y, S, T):
    """``(J, H, MSE)`` with ``J = alpha * H + (1 - alpha) * MSE``."""
    H = sentiment_loss(params, X, y)
    mse = projection_loss(params, S, T)
    return alpha * H + (1.0 - alpha) * mse, H, mse


def loss_and_gradients(params: BlseParams, alpha: float, X: np.ndarray, y: np.ndarray,
                       S: np.ndarray, T: np.ndarray):
    """Joint loss pieces and analytic gradients for every trainable matrix.

    An empty lexicon batch contributes zero alignment loss.
    Returns ``(J, H, MSE, grads)`` where ``grads`` is keyed like ``params.trainable()``.
    """
    M, P = params.M, params.P
    grads = {k: np.zeros_like(v) for k, v in params.trainable().items()}

    Z = X @ M
    logits = Z if P is None else Z @ P
    H, G = cross_entropy(logits, y)
    if P is None:
        grads["M"] += alpha * (X.T @ G)
    else:
        grads["P"] += alpha * (Z.T @ G)
        grads["M"] += alpha * (X.T @ (G @ P.T))

    n = S.shape[0]
    mse = 0.0
    if n:
        D = S @ M - T @ params.target_matrix
        if params.variant == "no_projection":
            norms = np.linalg.norm(D, axis=1)
            mse = float(np.mean(norms))
            # subgradient 0 where the two projections coincide
            R = np.divide(D, norms[:, None], out=np.zeros_like(D), where=norms[:, None] > 0) / n
        else:
            mse = float(np.sum(D * D) / n)
            R = 2.0 * D / n
        w = 1.0 - alpha
        if params.Mprime is None:
            grads["M"] += w * ((S - T).T @ R)
        else:
            grads["M"] += w * (S.T @ R)
            grads["Mprime"] -= w * (T.T @ R)
    return alpha * H + (1.0 - alpha) * mse, H, mse, grads


def gradients(params: BlseParams, alpha: float, X, y, S, T) -> dict[str, np.ndarray]:
    return loss_and_gradients(params, alpha, np.atleast_2d(X), np.asarray(y), np.atleast_2d(S),
                              np.atleast_2d(T))[3]


# training -----------------------------------------------------------------

@dataclass
class TrainConfig:
    alpha: float = 0.3
    epochs: int = 300
    batch_size: int = 20
    learning_rate: float = 0.001
    seed: int = 0
    dev_eval_every: int = 1
    hidden: int | None = None
    init: str = "uniform"
    lexicon_batch_size: int | None = None
    oov_policy: str = "skip"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ArgumentError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.epochs < 1:
            raise ArgumentError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ArgumentError("batch_size must be >= 1")
        if not self.learning_rate > 0:
            raise ArgumentError("learning_rate must be positive")
        if self.dev_eval_every < 1:
            raise ArgumentError("dev_eval_every must be >= 1")
        if self.lexicon_batch_size is not None and self.lexicon_batch_size < 1:
            raise ArgumentError("lexicon_batch_size must be >= 1")


HISTORY_COLUMNS = ("epoch", "H", "MSE", "J", "dev_pair_cosine", "src_f1", "tgt_f1")


@dataclass
class EpochRecord:
    epoch: int
    H: float
    MSE: float
    J: float
    dev_pair_cosine: float = math.nan
    src_f1: float = math.nan
    tgt_f1: float = math.nan


@dataclass
class TrainHistory:
    records: list[EpochRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, i) -> EpochRecord:
        return self.records[i]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=np.float64)

    def to_csv(self, stream: TextIO) -> None:
        stream.write(",".join(HISTORY_COLUMNS) + "\n")
        for r in self.records:
            cells = []
            for f in fields(r):
                v = getattr(r, f.name)
                if f.name == "epoch":
                    cells.append(str(v))
                else:
                    cells.append("" if math.isnan(v) else repr(float(v)))
            stream.write(",".join(cells) + "\n")

    @classmethod
    def from_csv(cls, stream: TextIO) -> "TrainHistory":
        header = stream.readline().strip().split(",")
        if tuple(header) != HISTORY_COLUMNS:
            raise FormatError(f"unexpected history header {header}")
        records = []
        for line in stream:
            if not line.strip():
                continue
            cells = line.rstrip("\n").split(",")
            vals = [math.nan if c == "" else float(c) for c in cells[1:]]
            records.append(EpochRecord(int(cells[0]), *vals))
        return cls(records)


Objective = Callable[[dict, np.ndarray, np.ndarray, np.ndarray], tuple]


def run_training(values: dict[str, np.ndarray], objective: Objective, n_items: int,
                 S: np.ndarray, T: np.ndarray, config: TrainConfig,
                 evaluate: Callable[[dict], tuple] | None = None,
                 on_epoch_end: Callable[[int], None] | None = None):
    """Shared mini-batch loop.

    Each epoch shuffles the sentiment items; every sentiment batch is paired
    with the next lexicon batch (cycled round-robin) and one ADAM step is
    taken on the joint loss. ``objective(values, idx, S_b, T_b)`` returns
    ``(J, H, MSE, grads)``; ``evaluate(values)`` returns
    ``(dev_pair_cosine, src_f1, tgt_f1)``.
    """
    if n_items < 1:
        raise ArgumentError("training corpus is empty")
    rng = np.random.default_rng([config.seed, 1])
    states = {k: AdamState.zeros_like(v, config.learning_rate) for k, v in values.items()}
    lex_bs = config.lexicon_batch_size or config.batch_size
    lex_batches = [np.arange(i, min(i + lex_bs, S.shape[0])) for i in range(0, S.shape[0], lex_bs)]
    lex_pos = 0
    history = TrainHistory()
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n_items)
        sums = np.zeros(3)
        n_batches = 0
        for start in range(0, n_items, config.batch_size):
            idx = order[start:start + config.batch_size]
            if lex_batches:
                lex_idx = lex_batches[lex_pos % len(lex_batches)]
                lex_pos += 1
            else:
                lex_idx = np.arange(0)
            J, H, mse, grads = objective(values, idx, S[lex_idx], T[lex_idx])
            for k in values:
                values[k], states[k] = adam_step(values[k], grads[k], states[k])
            sums += (J, H, mse)
            n_batches += 1
        J, H, mse = sums / n_batches
        record = EpochRecord(epoch, H, mse, J)
        if evaluate is not None and (epoch % config.dev_eval_every == 0 or epoch == config.epochs):
            record.dev_pair_cosine, record.src_f1, record.tgt_f1 = evaluate(values)
        history.records.append(record)
        if on_epoch_end is not None:
            on_epoch_end(epoch)
        log.debug("epoch %d J=%.6f H=%.6f MSE=%.6f", epoch, J, H, mse)
    return values, history


def pair_cosine_values(params, S: np.ndarray, T: np.ndarray) -> float:
    if S.shape[0] == 0:
        return math.nan
    return float(np.mean(cosine_rows(params.project_source(S), params.project_target(T))))


def _dev_f1(params, space, corpus, side, o, policy) -> float:
    if not corpus:
        return math.nan
    X, y, _ = featurize(space, corpus, policy)
    return macro_f1(y, predict_features(params, X, side), o)


def train(config: TrainConfig, src_space, trg_space, corpus: Sequence, lexicon,
          lexicon_dev=None, src_dev: Sequence | None = None, trg_dev: Sequence | None = None,
          n_labels: int | None = None, variant: str = "blse"):
    """Train a sentence-level model; returns ``(params, history)``."""
    if not corpus:
        raise ArgumentError("training corpus is empty")
    X, y, found = featurize(src_space, corpus, config.oov_policy)
    o = n_labels if n_labels is not None else int(y.max()) + 1
    _check_labels(y, o)
    S, T, skipped = lexicon.resolve(src_space, trg_space) if lexicon is not None else (
        np.zeros((0, src_space.dim)), np.zeros((0, trg_space.dim)), 0)
    if skipped:
        log.info("skipped %d lexicon pairs missing from the embeddings", skipped)
    if lexicon is not None and len(lexicon) and S.shape[0] == 0:
        raise TrainingError("no lexicon pair is covered by both embedding spaces")
    if not found.all():
        log.warning("%d of %d training instances have no known tokens", (~found).sum(), len(found))
    if lexicon_dev is not None:
        S_dev, T_dev, _ = lexicon_dev.resolve(src_space, trg_space)
    else:
        S_dev = T_dev = None

    h = config.hidden or src_space.dim
    params = init_params(src_space.dim, trg_space.dim, h, o, config.seed, config.init, variant)
    alpha = config.alpha

    def objective(values, idx, S_b, T_b):
        return loss_and_gradients(params.with_values(values), alpha, X[idx], y[idx], S_b, T_b)

    def evaluate(values):
        p = params.with_values(values)
        cos = pair_cosine_values(p, S_dev, T_dev) if S_dev is not None else math.nan
        return (cos, _dev_f1(p, src_space, src_dev, "source", o, config.oov_policy),
                _dev_f1(p, trg_space, trg_dev, "target", o, config.oov_policy))

    def check_first_epoch(epoch):
        if epoch == 1 and not found.any():
            raise TrainingError("every training instance is out of vocabulary")

    values, history = run_training(params.trainable(), objective, len(corpus), S, T, config,
                                   evaluate, check_first_epoch)
    return params.with_values(values), history


def train_no_mprime(config: TrainConfig, *args, **kwargs):
    """Ablation: one projection matrix ``M`` shared by both languages."""
    return train(config, *args, variant="no_mprime", **kwargs)


def train_no_projection(config: TrainConfig, *args, **kwargs):
    """Ablation: ``M`` (d x o) and ``M'`` (d' x o) without the head ``P``."""
    return train(config, *args, variant="no_projection", **kwargs)
