"""Synthetic bilingual sentiment tasks with known ground truth.

The source space holds random unit vectors. The 40 designated sentiment
words additionally carry a shared polarity direction (plus for positive,
minus for negative) before renormalisation; without it a linear model
cannot separate majority-vote sentences of isotropic random words. The
target space is the source space rotated by a random orthogonal matrix plus
Gaussian noise, and word ``i`` translates to word ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import BINARY, LabeledSentence, TargetedInstance
from .embeddings import EmbeddingSpace
from .lexicon import BilingualLexicon

NEG, POS = BINARY.index("negative"), BINARY.index("positive")


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.normal(size=(dim, dim)))
    return Q * np.sign(np.diag(R))


@dataclass
class RotationTask:
    src: EmbeddingSpace
    trg: EmbeddingSpace
    rotation: np.ndarray
    lexicon_train: BilingualLexicon
    lexicon_dev: BilingualLexicon
    positive: list[int]
    negative: list[int]
    train: list = field(default_factory=list)
    src_dev: list = field(default_factory=list)
    trg_test: list = field(default_factory=list)

    def src_word(self, i: int) -> str:
        return self.src.words[i]

    def trg_word(self, i: int) -> str:
        return self.trg.words[i]

    @property
    def src_positive(self):
        return [self.src_word(i) for i in self.positive]

    @property
    def src_negative(self):
        return [self.src_word(i) for i in self.negative]

    @property
    def trg_positive(self):
        return [self.trg_word(i) for i in self.positive]

    @property
    def trg_negative(self):
        return [self.trg_word(i) for i in self.negative]


def _spaces(rng, vocab, dim, noise, n_sentiment, polarity_strength):
    E = rng.normal(size=(vocab, dim))
    E /= np.linalg.norm(E, axis=1, keepdims=True)
    words = rng.permutation(vocab)
    positive = sorted(words[:n_sentiment].tolist())
    negative = sorted(words[n_sentiment:2 * n_sentiment].tolist())
    u = rng.normal(size=dim)
    u /= np.linalg.norm(u)
    E[positive] += polarity_strength * u
    E[negative] -= polarity_strength * u
    E /= np.linalg.norm(E, axis=1, keepdims=True)
    Q = random_orthogonal(dim, rng)
    F = E @ Q + noise * rng.normal(size=E.shape)
    src = EmbeddingSpace(tuple(f"src_{i:03d}" for i in range(vocab)), E)
    trg = EmbeddingSpace(tuple(f"trg_{i:03d}" for i in range(vocab)), F)
    return src, trg, Q, positive, negative


def _sentence(rng, positive, negative, length):
    """Word ids with a fair coin per slot; label is the majority polarity (ties go negative)."""
    pol = rng.random(length) < 0.5
    ids = np.where(pol, rng.choice(positive, length), rng.choice(negative, length))
    label = POS if pol.sum() * 2 > length else NEG
    return ids.tolist(), label


def rotation_task(seed: int = 0, vocab: int = 200, dim: int = 16, noise: float = 0.01,
                  n_train_pairs: int = 150, n_dev_pairs: int = 50, n_sentences: int = 400,
                  sentence_length: int = 5, n_sentiment: int = 20, n_dev: int = 100,
                  n_test: int = 100, polarity_strength: float = 1.0) -> RotationTask:
    rng = np.random.default_rng(seed)
    src, trg, Q, positive, negative = _spaces(rng, vocab, dim, noise, n_sentiment, polarity_strength)
    order = rng.permutation(vocab)
    lex_train = BilingualLexicon(tuple((src.words[i], trg.words[i]) for i in order[:n_train_pairs]),
                                 "synthetic:train")
    lex_dev = BilingualLexicon(
        tuple((src.words[i], trg.words[i]) for i in order[n_train_pairs:n_train_pairs + n_dev_pairs]),
        "synthetic:dev")
    task = RotationTask(src, trg, Q, lex_train, lex_dev, positive, negative)

    def make(n, space):
        out = []
        for _ in range(n):
            ids, label = _sentence(rng, positive, negative, sentence_length)
            out.append(LabeledSentence(tuple(space.words[i] for i in ids), label))
        return out

    task.train = make(n_sentences, src)
    task.src_dev = make(n_dev, src)
    task.trg_test = make(n_test, trg)
    return task


def targeted_task(seed: int = 0, conflict_rate: float = 0.3, context_length: int = 2,
                  n_sentences: int = 400, n_dev: int = 100, n_test: int = 100,
                  **kwargs) -> RotationTask:
    """Rotation task whose examples are one-target sentences.

    The gold label is the polarity of the target word. Context words on both
    sides share one polarity, which is the opposite of the target's in a
    ``conflict_rate`` fraction of instances. ``sid`` values end in ``:c`` for
    conflicting instances and ``:a`` otherwise.
    """
    task = rotation_task(seed, n_sentences=0, n_dev=0, n_test=0, **kwargs)
    rng = np.random.default_rng([seed, 7])
    pools = {POS: task.positive, NEG: task.negative}

    def make(n, space, prefix):
        out = []
        for i in range(n):
            label = POS if rng.random() < 0.5 else NEG
            conflict = rng.random() < conflict_rate
            ctx = (NEG if label == POS else POS) if conflict else label
            left = rng.choice(pools[ctx], context_length).tolist()
            right = rng.choice(pools[ctx], context_length).tolist()
            target = [int(rng.choice(pools[label]))]
            ids = left + target + right
            out.append(TargetedInstance(tuple(space.words[j] for j in ids), label,
                                        context_length, context_length + 1,
                                        f"{prefix}{i}:{'c' if conflict else 'a'}"))
        return out

    task.train = make(n_sentences, task.src, "train")
    task.src_dev = make(n_dev, task.src, "dev")
    task.trg_test = make(n_test, task.trg, "test")
    return task


def is_conflicting(instance: TargetedInstance) -> bool:
    return instance.sid is not None and instance.sid.endswith(":c")
