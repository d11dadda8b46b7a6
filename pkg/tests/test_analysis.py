import io
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from helpers import make_space
from xlsent.analysis import (NgramProfile, common_top_unigrams, domain_divergence, export_projected,
                             js_divergence, language_similarity, ngram_profile, pair_cosine,
                             pearson_r, profile_lines, synonym_antonym_separation)
from xlsent.baselines import MappingMatrix
from xlsent.blse import BlseParams, init_params
from xlsent.embeddings import load_embeddings
from xlsent.errors import ArgumentError, NumericDomainError
from xlsent.lexicon import BilingualLexicon

LEX = BilingualLexicon((("s0", "t0"), ("s1", "t1"), ("s2", "t2")))


def test_pair_cosine_identical_and_antipodal(rng):
    E = rng.normal(size=(3, 4))
    ident = MappingMatrix(np.eye(4), 0.0)
    assert pair_cosine(ident, make_space("s", E), make_space("t", E), LEX)[0] == pytest.approx(1.0)
    assert pair_cosine(ident, make_space("s", E), make_space("t", -E), LEX)[0] == pytest.approx(-1.0)


def test_pair_cosine_oracle_and_bounds(rng):
    p = init_params(4, 5, 3, 2, seed=1)
    S, T = rng.normal(size=(3, 4)), rng.normal(size=(3, 5))
    mean, used, skipped = pair_cosine(p, make_space("s", S), make_space("t", T), LEX)
    want = np.mean([oracles.cosine(oracles.vecmat(s, p.M.tolist()), oracles.vecmat(t, p.Mprime.tolist()))
                    for s, t in zip(S.tolist(), T.tolist())])
    assert mean == pytest.approx(want, abs=1e-12) and (used, skipped) == (3, 0)


@given(st.integers(0, 1000), st.floats(0.01, 100))
@settings(max_examples=25)
def test_pair_cosine_scale_invariant(seed, c):
    g = np.random.default_rng(seed)
    M, Mp = g.normal(size=(3, 3)), g.normal(size=(3, 3))
    src, trg = make_space("s", g.normal(size=(3, 3))), make_space("t", g.normal(size=(3, 3)))
    a = pair_cosine(BlseParams(M, Mp, None, "no_projection"), src, trg, LEX)[0]
    b = pair_cosine(BlseParams(c * M, c * Mp, None, "no_projection"), src, trg, LEX)[0]
    assert -1.0 <= a <= 1.0 and a == pytest.approx(b, abs=1e-9)


def test_synant_cases():
    ident = MappingMatrix(np.eye(2), 0.0)
    same = make_space("w", [[1.0, 1.0]] * 4)
    assert synonym_antonym_separation(ident, same, ["w0", "w1"], ["w2", "w3"]) == pytest.approx((1.0, 1.0))
    axis = make_space("w", [[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0], [-3.0, 0.0]])
    assert synonym_antonym_separation(ident, axis, ["w0", "w1"], ["w2", "w3"]) == pytest.approx((1.0, -1.0))
    with pytest.raises(ArgumentError):
        synonym_antonym_separation(ident, axis, ["nope"], ["w2"])


def test_ngram_profiles():
    assert ngram_profile("abc", 3).normalized == {"abc": 1.0}
    assert ngram_profile("abab", 2).normalized == pytest.approx({"ab": 2 / 3, "ba": 1 / 3})
    assert ngram_profile(["DET", "NOUN", "VERB", "DET"], 2).counts["DET NOUN"] == 1
    with pytest.raises(ArgumentError):
        ngram_profile("ab", 3)


@given(st.text(alphabet="abc ", min_size=3, max_size=60), st.integers(1, 3))
def test_ngram_matches_brute_force(s, n):
    prof = ngram_profile(s, n)
    assert dict(prof.counts) == oracles.ngram_counts(s, n)
    assert sum(prof.normalized.values()) == pytest.approx(1.0)


def test_profile_lines_does_not_cross_lines():
    prof = profile_lines(["ab\n", "cd\n"], 2, chars=True)
    assert dict(prof.counts) == {"ab": 1, "cd": 1}


def p(d):
    return NgramProfile(Counter(d))


def test_language_similarity_cases():
    a_pos, a_char = p({"x": 2, "y": 1}), p({"ab": 3})
    assert language_similarity(a_pos, a_char, a_pos, a_char) == pytest.approx(1.0)
    assert language_similarity(p({"x": 1}), p({"a": 1}), p({"y": 1}), p({"b": 1})) == 0.0
    # A = (0.5, 0.5 | 1), B = (1, 0 | 1): cos = 1.5 / sqrt(1.5 * 2)
    got = language_similarity(p({"x": 1, "y": 1}), p({"a": 1}), p({"x": 1}), p({"a": 1}))
    assert got == pytest.approx(1.5 / math.sqrt(3.0), abs=1e-12)


@given(st.dictionaries(st.sampled_from("abcdef"), st.integers(1, 20), min_size=1),
       st.dictionaries(st.sampled_from("uvwxyz"), st.integers(1, 20), min_size=1))
def test_language_similarity_self_is_one(pos, char):
    assert language_similarity(p(pos), p(char), p(pos), p(char)) == pytest.approx(1.0)


def test_js_divergence_cases():
    assert js_divergence([0.8, 0.2], [0.8, 0.2]) == pytest.approx(0.0, abs=1e-15)
    assert js_divergence([0.8, 0.2], [0.2, 0.8], smoothing=1e-9) == pytest.approx(0.6 * math.log(4), abs=1e-3)
    assert js_divergence({"a": 3, "b": 1}, {"b": 2}) == pytest.approx(js_divergence({"b": 2}, {"a": 3, "b": 1}))
    with pytest.raises(ArgumentError):
        js_divergence([1, 2], [1, 2, 3])
    with pytest.raises(ArgumentError):
        js_divergence([1], [1], smoothing=0)


@given(st.lists(st.integers(0, 50), min_size=2, max_size=8), st.data())
def test_js_divergence_properties(ps, data):
    qs = data.draw(st.lists(st.integers(0, 50), min_size=len(ps), max_size=len(ps)))
    if sum(ps) + sum(qs) == 0:
        return
    d = js_divergence(ps, qs)
    assert d >= 0 and d == pytest.approx(js_divergence(qs, ps))
    a = np.asarray(ps, float) + 1e-6
    b = np.asarray(qs, float) + 1e-6
    assert d == pytest.approx(oracles.sym_kl((a / a.sum()).tolist(), (b / b.sum()).tolist()), abs=1e-9)


def test_domain_divergence():
    a = [["the", "food", "was", "good"], ["the", "staff"]]
    b = [["the", "room", "was", "bad", "the"], ["the", "food"]]
    assert domain_divergence(a, a) == 0.0
    assert common_top_unigrams([a, b], 10) == ["the", "food", "was"]
    assert domain_divergence(a, b) > 0


def test_pearson_cases():
    xs = [1.0, 2.0, 3.0, 4.0]
    assert pearson_r(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0, abs=1e-12)
    assert pearson_r(xs, [-x for x in xs]) == pytest.approx(-1.0, abs=1e-12)
    assert pearson_r(xs, [2.0, 1.0, 4.0, 3.0]) == pytest.approx(0.6, abs=1e-12)
    with pytest.raises(NumericDomainError):
        pearson_r(xs, [1.0] * 4)


def test_export_roundtrip_and_identity(rng):
    space = make_space("w", rng.normal(size=(4, 3)))
    params = init_params(3, 3, 2, 2, seed=0)
    buf = io.StringIO()
    assert export_projected(params, space, ["w1", "w3"], "target", buf) == 2
    back = load_embeddings(io.StringIO(buf.getvalue()))
    np.testing.assert_allclose(back.matrix, params.project_target(space.matrix[[1, 3]]), atol=1e-6)
    buf = io.StringIO()
    export_projected(MappingMatrix(np.eye(3), 0.0), space, list(space.words), "source", buf)
    np.testing.assert_allclose(load_embeddings(io.StringIO(buf.getvalue())).matrix, space.matrix, atol=1e-6)


def test_export_empty_is_header_only(rng):
    buf = io.StringIO()
    export_projected(init_params(3, 3, 2, 2), make_space("w", rng.normal(size=(2, 3))), [], "source", buf)
    assert buf.getvalue() == "0 2\n"
