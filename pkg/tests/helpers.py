"""Small fixture builders shared by the test modules."""

import io

import numpy as np

from xlsent.embeddings import EmbeddingSpace

ACCEPTANCE_LINES: list[str] = []


def verdict(number: int, title: str, checks: dict, seconds: float | None = None) -> None:
    """Record and print one PASS/FAIL line for an acceptance criterion, then assert it."""
    ok = all(bool(v) for v, _ in checks.values())
    detail = "; ".join(f"{name}={shown}" for name, (_, shown) in checks.items())
    if seconds is not None and not any(name.startswith("runtime") for name in checks):
        detail += f"; runtime={seconds:.2f}s"
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    failed = [name for name, (v, _) in checks.items() if not v]
    assert ok, f"criterion {number} failed checks: {', '.join(failed)}"


def make_space(prefix, matrix):
    matrix = np.asarray(matrix, dtype=float)
    return EmbeddingSpace(tuple(f"{prefix}{i}" for i in range(len(matrix))), matrix)


def text(fn, *args, **kwargs):
    buf = io.StringIO()
    fn(*args, buf, **kwargs)
    return buf.getvalue()


def random_batch(rng, d=8, dprime=8, n=6, pairs=5, o=3):
    """Random averaged features, labels and translation-pair rows."""
    X = rng.normal(size=(n, d))
    y = rng.integers(0, o, size=n)
    S = rng.normal(size=(pairs, d))
    T = rng.normal(size=(pairs, dprime))
    return X, y, S, T


def tiny_task(seed=0, **kwargs):
    from xlsent.synthetic import rotation_task

    defaults = dict(vocab=60, dim=6, n_train_pairs=40, n_dev_pairs=10, n_sentences=60, n_dev=20,
                    n_test=20, n_sentiment=8)
    defaults.update(kwargs)
    return rotation_task(seed, **defaults)
