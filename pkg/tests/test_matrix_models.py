import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from awlab.matrix_models import (EnsembleSpec, alternating_words, asymptotic_freeness_check,
                                 load_bands, mc_moments, rng_for, sample_ginibre, sample_gue,
                                 single_family_word, word_label, word_traces)


def brute_word_trace(X, Y, word):
    n = X.shape[0]
    out = np.eye(n, dtype=complex)
    for fam, p in word:
        M = np.linalg.matrix_power(X if fam == "X" else Y, p)
        out = out @ (M - np.trace(M) / n * np.eye(n))
    return np.trace(out).real / n


@given(st.integers(2, 12), st.integers(0, 2 ** 32), st.integers(0, 5))
def test_gue_hermitian_and_deterministic(n, seed, sample):
    X = sample_gue(n, seed, sample)
    assert np.allclose(X, X.conj().T)
    assert np.array_equal(X, sample_gue(n, seed, sample))


def test_streams_are_independent_draws():
    assert not np.allclose(sample_gue(8, 1, 0, 0), sample_gue(8, 1, 0, 1))
    assert not np.allclose(sample_gue(8, 1, 0, 0), sample_gue(8, 1, 1, 0))
    a = rng_for(5, 2, 1).standard_normal(3)
    assert np.array_equal(a, rng_for(5, 2, 1).standard_normal(3))


def test_gue_second_moment_single_sample():
    X = sample_gue(512, 3)
    assert 0.9 <= np.trace(X @ X).real / 512 <= 1.1


def test_ginibre_normalisation():
    Y = sample_ginibre(512, 3)
    assert abs(np.trace(Y.conj().T @ Y).real / 512 - 1) < 0.02


def test_alternating_word_count():
    assert len(alternating_words(6, 2)) == sum(2 * 2 ** k for k in range(2, 7))
    assert all(not single_family_word(w) for w in alternating_words(4, 2))
    assert single_family_word((("X", 1), ("X", 2)))
    with pytest.raises(ValueError):
        alternating_words(7)


@pytest.mark.parametrize("word_len", [2, 3, 5])
def test_word_traces_against_brute_force(word_len):
    X, Y = sample_gue(10, 4, 0, 0), sample_gue(10, 4, 0, 1)
    got = word_traces(X, Y, word_len, 2)
    for w in alternating_words(word_len, 2):
        assert abs(got[word_label(w)] - brute_word_trace(X, Y, w)) < 1e-12


def test_mc_moments_small():
    est = mc_moments(EnsembleSpec(128, 20, 9, "gue_single"), order=4)
    assert est.within(4.0).all()
    assert est.target.tolist() == [0, 1, 0, 2]
    csv = est.to_csv().splitlines()
    assert csv[0].startswith("# family=gue_single n=128 samples=20 seed=9")
    assert csv[1] == "k,estimate,stderr,target"
    gin = mc_moments(EnsembleSpec(128, 20, 9, "complex_ginibre"), order=3)
    assert gin.target.tolist() == [1, 2, 5]
    assert gin.within(4.0).all()


def test_mc_moments_reproducible():
    spec = EnsembleSpec(32, 4, 1)
    assert np.array_equal(mc_moments(spec).estimate, mc_moments(spec).estimate)


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(1, 3, 0)
    with pytest.raises(ValueError):
        EnsembleSpec(8, 3, 0, "goe")
    with pytest.raises(ValueError):
        mc_moments(EnsembleSpec(8, 3, 0), order=9)
    with pytest.raises(ValueError):
        asymptotic_freeness_check(EnsembleSpec(8, 3, 0, "gue_single"))


def test_freeness_check_small_fresh_pilot():
    rep = asymptotic_freeness_check(EnsembleSpec(48, 20, 3, "gue_pair"), word_len=4)
    assert rep.band_source == "fresh pilot"
    assert len(rep.rows) == len(alternating_words(4, 2))
    assert rep.passed


def test_fixture_shape():
    bands = load_bands()
    assert bands is not None
    assert bands["n"] == 512 and bands["samples"] == 50
    assert set(bands["C"]) == {word_label(w) for w in alternating_words(6, 2)}
