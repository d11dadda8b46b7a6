import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from helpers import make_space, text
from xlsent.baselines import (MappingMatrix, barista_corpus, build_csls, csls_retrieve, csls_score,
                              fit_mapping, linear_classifier_fit, linear_classifier_predict,
                              mean_knn_cosine, nearest_orthogonal, precision_at_1)
from xlsent.errors import DegenerateSystemError, NumericDomainError
from xlsent.lexicon import BilingualLexicon
from xlsent.synthetic import random_orthogonal


def identity_lexicon(n, src="s", trg="t"):
    return BilingualLexicon(tuple((f"{src}{i}", f"{trg}{i}") for i in range(n)))


def test_fit_identity(rng):
    E = rng.normal(size=(20, 5))
    m = fit_mapping(make_space("s", E), make_space("t", E), identity_lexicon(20))
    np.testing.assert_allclose(m.W, np.eye(5), atol=1e-6)
    assert m.pairs_used == 20 and m.fit_residual < 1e-9


@pytest.mark.parametrize("orthogonal", [False, True])
def test_fit_recovers_rotation(rng, orthogonal):
    E = rng.normal(size=(30, 6))
    Q = random_orthogonal(6, rng)
    m = fit_mapping(make_space("s", E), make_space("t", E @ Q), identity_lexicon(30), orthogonal)
    np.testing.assert_allclose(m.W, Q, atol=1e-6)


def test_fit_degenerate():
    src = make_space("s", [[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(DegenerateSystemError):
        fit_mapping(src, make_space("t", [[1.0, 0.0], [0.0, 1.0]]), identity_lexicon(1))


def test_fit_is_locally_optimal(rng):
    E, F = rng.normal(size=(25, 4)), rng.normal(size=(25, 4))
    m = fit_mapping(make_space("s", E), make_space("t", F), identity_lexicon(25))
    base = np.sum((E @ m.W - F) ** 2)
    for i in range(4):
        for j in range(4):
            for step in (1e-3, -1e-3):
                W = m.W.copy()
                W[i, j] += step
                assert base <= np.sum((E @ W - F) ** 2)


def test_nearest_orthogonal_is_orthogonal(rng):
    W = nearest_orthogonal(rng.normal(size=(5, 5)))
    np.testing.assert_allclose(W.T @ W, np.eye(5), atol=1e-10)


def test_mapping_checkpoint_roundtrip(rng):
    m = MappingMatrix(rng.normal(size=(3, 3)), 0.25, 10)
    back = MappingMatrix.load(io.StringIO(text(m.save)))
    assert np.array_equal(back.W, m.W) and back.fit_residual == 0.25 and back.pairs_used == 10


def test_mean_knn_cases(rng):
    C = rng.normal(size=(7, 3))
    assert mean_knn_cosine(C[2], C, 1) == pytest.approx(1.0)
    assert mean_knn_cosine([0.0, 0.0, 1.0], [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]], 2) == pytest.approx(0.0)
    q = rng.normal(size=3)
    assert mean_knn_cosine(q, C, 3) == pytest.approx(oracles.knn_mean(q.tolist(), C.tolist(), 3), abs=1e-12)


def test_csls_score_cases(rng):
    v = np.array([1.0, 2.0])
    assert csls_score(v, v, 1.0, 1.0) == pytest.approx(0.0)
    assert csls_score(v, 3 * v, 0.0, 0.0) == pytest.approx(2.0)
    x, y = rng.normal(size=4), rng.normal(size=4)
    assert csls_score(x, y, 0.3, 0.1) == pytest.approx(2 * oracles.cosine(x, y) - 0.4, abs=1e-12)
    with pytest.raises(NumericDomainError):
        csls_score(np.zeros(2), v, 0, 0)


@given(st.integers(0, 10_000), st.floats(-1, 1), st.floats(-1, 1))
@settings(max_examples=30)
def test_csls_score_symmetric(seed, r1, r2):
    g = np.random.default_rng(seed)
    x, y = g.normal(size=3), g.normal(size=3)
    assert csls_score(x, y, r1, r2) == pytest.approx(csls_score(y, x, r2, r1), abs=1e-12)


@given(st.integers(3, 15), st.data())
@settings(max_examples=20)
def test_identity_retrieval(v, data):
    k = data.draw(st.integers(1, v - 1))
    E = np.random.default_rng(v).normal(size=(v, 4))
    ranked, _ = csls_retrieve(E, E, k)
    assert ranked[:, 0].tolist() == list(range(v))


def test_brute_force_oracle_small(rng):
    Q, C = rng.normal(size=(6, 3)), rng.normal(size=(6, 3))
    ranked, scores = csls_retrieve(Q, C, 2)
    assert ranked.tolist() == oracles.csls_rank(Q.tolist(), C.tolist(), 2)
    assert np.all(np.diff(scores, axis=1) <= 0)


def test_hub_is_demoted():
    angle = lambda deg: [math.cos(math.radians(deg)), math.sin(math.radians(deg))]
    queries = np.array([angle(20), angle(-5), angle(5)])
    candidates = np.array([angle(0), angle(42)])  # candidate 0 is a hub near every query
    raw_best = int(np.argmax(queries[0] @ candidates.T))
    ranked, _ = csls_retrieve(queries, candidates, 1)
    assert raw_best == 0 and ranked[0, 0] == 1
    assert ranked.tolist() == oracles.csls_rank(queries.tolist(), candidates.tolist(), 1)


def test_source_pool_changes_candidate_terms(rng):
    Q, C, pool = rng.normal(size=(3, 4)), rng.normal(size=(5, 4)), rng.normal(size=(9, 4))
    idx = build_csls(Q, C, 2, source_pool=pool)
    want = [oracles.knn_mean(c, pool.tolist(), 2) for c in C.tolist()]
    np.testing.assert_allclose(idx.r_target, want, atol=1e-12)


def test_precision_at_1():
    assert precision_at_1(np.array([[0, 1], [1, 0]]), [0, 0]) == 0.5


SRC = [["good", "film", "here"], ["bad"]]
TRG = [["buena", "pelicula"]]
LEX = BilingualLexicon((("good", "buena"), ("bad", "mala"), ("film", "pelicula")))


def test_barista_p0_identity():
    assert barista_corpus(SRC, TRG, LEX, p=0.0) == SRC + TRG


def test_barista_p1_replaces_all_covered():
    out = barista_corpus(SRC, TRG, LEX, p=1.0)
    assert out == [["buena", "pelicula", "here"], ["mala"], ["good", "film"]]


def test_barista_half_fraction_and_length():
    src = [["good"] * 100 for _ in range(50)]
    trg = [["pelicula"] * 100 for _ in range(50)]
    out = barista_corpus(src, trg, LEX, p=0.5, seed=11)
    replaced = sum(tok in ("buena",) for line in out[:50] for tok in line)
    replaced += sum(tok == "film" for line in out[50:] for tok in line)
    assert 0.45 <= replaced / 10_000 <= 0.55
    assert [len(l) for l in out] == [len(l) for l in src + trg]


@given(st.lists(st.lists(st.sampled_from(["good", "bad", "x", "film"]), max_size=6), max_size=6),
       st.floats(0, 1), st.integers(0, 100))
@settings(max_examples=30)
def test_barista_conserves_length(lines, p, seed):
    out = barista_corpus(lines, [], LEX, p, seed)
    assert [len(l) for l in out] == [len(l) for l in lines]


def test_linear_classifier_separable():
    X = np.array([[-2.0, 0.1], [-1.0, -0.3], [1.0, 0.2], [2.5, -0.1]])
    y = np.array([0, 0, 1, 1])
    model = linear_classifier_fit(X, y)
    assert linear_classifier_predict(model, X).tolist() == y.tolist()


def test_linear_classifier_duplicates_do_not_change_fit(rng):
    X = rng.normal(size=(12, 3))
    y = (X[:, 0] > 0).astype(int)
    a = linear_classifier_fit(X, y, epochs=100)
    b = linear_classifier_fit(np.vstack([X, X]), np.concatenate([y, y]), epochs=100)
    np.testing.assert_allclose(a.decision_function(X), b.decision_function(X), atol=1e-9)


def test_linear_classifier_blobs():
    g = np.random.default_rng(5)
    centers = np.array([[0.0, 3.0], [3.0, -2.0], [-3.0, -2.0]])
    y = np.repeat(np.arange(3), 100)
    X = centers[y] + g.normal(size=(300, 2))
    order = g.permutation(300)
    train, test = order[:200], order[200:]
    model = linear_classifier_fit(X[train], y[train], 3)
    assert np.mean(model.predict(X[test]) == y[test]) >= 0.9
