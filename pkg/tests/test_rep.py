import json
import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from awlab.rep import (RepSpec, RepSpecError, classify, direct_sum, embed, generator_spectrum,
                       involution_apply, parse_rep_spec)

LN2, LN3 = math.log(2), math.log(3)

thetas = st.floats(min_value=0.05, max_value=3.0)
reps = st.builds(
    lambda triv, blocks: RepSpec.create(triv, blocks) if triv + len(blocks) else RepSpec.create(1),
    st.integers(0, 2),
    st.lists(st.tuples(thetas, st.integers(1, 2)), max_size=2))


def generator_oracle(rep):
    """A = exp(-i G) with G = log U_1 computed by scipy (valid for theta < pi)."""
    G = sla.logm(rep.U(1.0))
    return sla.expm(-1j * G)


# parsing


def test_parse_trivial():
    rep = parse_rep_spec({"trivial_dim": 2, "blocks": []})
    assert rep.dim == 2 and rep.is_trivial()


def test_parse_rotation_block_matches_rotation_by_t_log_lambda():
    rep = parse_rep_spec(json.dumps({"trivial_dim": 0,
                                     "blocks": [{"frequency": LN2, "multiplicity": 1}]}))
    lam = 0.5
    for t in (-1.3, 0.0, 0.7, 2.0):
        c, s = math.cos(t * math.log(lam)), math.sin(t * math.log(lam))
        R = np.array([[c, -s], [s, c]])
        # same one-parameter group, read with the opposite orientation of t
        assert np.allclose(rep.U(-t), R, atol=1e-14)


def test_parse_merges_repeated_frequencies():
    rep = parse_rep_spec({"trivial_dim": 0, "blocks": [{"frequency": 1.0, "multiplicity": 1},
                                                       {"frequency": 1.0, "multiplicity": 2}]})
    assert len(rep.blocks) == 1 and rep.blocks[0].multiplicity == 3 and rep.dim == 6


def test_parse_exact_frequency():
    rep = parse_rep_spec({"trivial_dim": 0, "blocks": [
        {"frequency": {"num": 1, "den": 1, "log_base": 2}, "multiplicity": 1}]})
    assert rep.thetas[0] == pytest.approx(LN2)


@pytest.mark.parametrize("doc, code", [
    ({"trivial_dim": 0, "blocks": [{"frequency": -1, "multiplicity": 1}]}, "non_positive_frequency"),
    ({"trivial_dim": 0, "blocks": [{"frequency": 0.0, "multiplicity": 1}]}, "non_positive_frequency"),
    ({"trivial_dim": 0, "blocks": []}, "zero_dimension"),
    ({"trivial_dim": -1}, "malformed"),
    ({"trivial_dim": 1, "colour": "red"}, "malformed"),
    ("{not json", "malformed"),
    ([1, 2], "malformed"),
])
def test_parse_errors(doc, code):
    with pytest.raises(RepSpecError) as exc:
        parse_rep_spec(doc)
    assert exc.value.code == code


def test_roundtrip_json():
    rep = RepSpec.create(1, [(LN2, 1), (LN3, 2)])
    assert parse_rep_spec(rep.to_json()) == rep


# spectrum


def test_spectrum_trivial():
    assert generator_spectrum(RepSpec.create(2)).as_dict() == {1.0: 2}


def test_spectrum_single_block_against_oracle():
    rep = RepSpec.create(0, [(LN2, 1)])
    got = sorted(generator_spectrum(rep).eigen_pairs)
    assert [m for _, m in got] == [1, 1]
    assert np.allclose([v for v, _ in got], [0.5, 2.0], atol=1e-14)
    A = generator_oracle(rep)
    assert np.allclose(np.sort(np.linalg.eigvals(A).real), [0.5, 2.0], atol=1e-12)
    assert np.allclose(rep.A_power(1.0), A, atol=1e-12)


def test_spectrum_with_multiplicity():
    rep = RepSpec.create(1, [(LN3, 2)])
    d = {round(v, 12): m for v, m in generator_spectrum(rep).eigen_pairs}
    assert d == {1.0: 1, 3.0: 2, round(1 / 3, 12): 2}
    oracle = np.sort(np.linalg.eigvals(generator_oracle(rep)).real)
    assert np.allclose(oracle, [1 / 3, 1 / 3, 1, 3, 3], atol=1e-12)


def test_xi1_is_eigenvector():
    rep = RepSpec.rotation(0.5)
    xi1 = np.array([1, -1j]) / math.sqrt(2)
    assert np.allclose(rep.A_power(1.0) @ xi1, 2 * xi1, atol=1e-14)


@given(reps)
def test_spectrum_inversion_symmetric(rep):
    assert generator_spectrum(rep).is_inversion_symmetric()


@given(reps, st.floats(-5, 5))
def test_A_it_is_U_t(rep, t):
    assert np.allclose(rep.A_power(1j * t), rep.U(t), atol=1e-12)


# embedding and involutions


def test_embed_half_block_closed_form():
    # (2/(A^{-1}+1))^{1/2} scales xi1 by sqrt(4/3) and xi2 by sqrt(2/3)
    rep = RepSpec.rotation(0.5)
    a, b = math.sqrt(4 / 3), math.sqrt(2 / 3)
    expected = np.array([(a + b) / 2, -1j * (a - b) / 2])
    got = embed(rep, [1.0, 0.0])
    assert np.allclose(got, expected, atol=1e-15)
    assert abs(np.linalg.norm(got) - 1) < 1e-12
    A = generator_oracle(rep)
    K = sla.sqrtm(2 * np.linalg.inv(np.linalg.inv(A) + np.eye(2)))
    assert np.allclose(K @ [1, 0], expected, atol=1e-12)


def test_embed_trivial_is_identity():
    rep = RepSpec.create(3)
    assert np.allclose(embed(rep, [1.0, -2.0, 0.5]), [1.0, -2.0, 0.5])
    assert np.allclose(embed(rep, np.zeros(3)), 0)


def test_embed_dimension_mismatch():
    with pytest.raises(RepSpecError):
        embed(RepSpec.create(2), [1.0, 2.0, 3.0])


def test_T_fixes_embedded_vector():
    rep = RepSpec.rotation(0.5)
    k = embed(rep, [1.0, 0.0])
    assert np.allclose(involution_apply(rep, k, "T"), k, atol=1e-12)


def test_T_is_conjugation_when_trivial():
    rep = RepSpec.create(2)
    z = np.array([1 + 2j, -3j])
    assert np.allclose(involution_apply(rep, z, "T"), z.conj())


@given(reps, st.data())
def test_embed_isometric_and_T_fixed(rep, data):
    xi = np.array(data.draw(st.lists(st.floats(-3, 3), min_size=rep.dim, max_size=rep.dim)))
    k = embed(rep, xi)
    assert abs(np.linalg.norm(k) - np.linalg.norm(xi)) <= 1e-12 * max(1, np.linalg.norm(xi))
    assert np.allclose(involution_apply(rep, k, "T"), k, atol=1e-12)


@given(reps, st.data())
def test_T_involution_and_conjugate_linear(rep, data):
    vals = st.floats(-2, 2)
    z = np.array(data.draw(st.lists(vals, min_size=rep.dim, max_size=rep.dim))) \
        + 1j * np.array(data.draw(st.lists(vals, min_size=rep.dim, max_size=rep.dim)))
    Tz = involution_apply(rep, z, "T")
    assert np.allclose(involution_apply(rep, Tz, "T"), z, atol=1e-12)
    assert np.allclose(involution_apply(rep, 1j * z, "T"), -1j * Tz, atol=1e-12)


@given(reps, st.floats(-4, 4))
def test_A_it_unitary(rep, t):
    z = np.arange(1, rep.dim + 1) * (1 + 0.5j)
    w = involution_apply(rep, z, ("A", 1j * t))
    assert abs(np.linalg.norm(w) - np.linalg.norm(z)) < 1e-12


# classification


@pytest.mark.parametrize("rep, kind, lam, gens", [
    (RepSpec.create(3), "II_1", None, ()),
    (RepSpec.create(0, [(LN2, 1)]), "III_lambda", 0.5, (2.0,)),
    (RepSpec.create(0, [(LN2, 1), (LN3, 1)]), "III_1", None, (2.0, 3.0)),
    (RepSpec.create(1), "NonFactor_dim1", None, ()),
])
def test_classification_table(rep, kind, lam, gens):
    label = classify(rep)
    assert label.kind == kind
    if lam is not None:
        assert label.lam == pytest.approx(lam, abs=1e-15)
        assert label.period == pytest.approx(2 * math.pi / LN2)
    assert np.allclose(label.s_invariant, gens)


def test_commensurable_frequencies_give_common_unit():
    label = classify(RepSpec.create(1, [(LN2, 1), (2 * LN2, 1), (3 * LN2, 1)]))
    assert label.kind == "III_lambda" and label.lam == pytest.approx(0.5)
    label = classify(RepSpec.create(0, [(2 * LN2, 1), (3 * LN2, 1)]))
    assert label.lam == pytest.approx(0.5)


def test_classify_json():
    doc = classify(RepSpec.create(0, [(LN2, 1)])).to_json()
    assert doc["type"] == "III_lambda" and doc["lambda"] == 0.5 and doc["s_invariant"] == ["2"]


def test_declared_continuous_is_metadata_only():
    rep = RepSpec.create(0, [(LN2, 1)], declared_continuous=True, declared_type="III_1")
    label = classify(rep)
    assert label.kind == "III_lambda" and not label.almost_periodic
    assert label.to_json()["declared_type"] == "III_1"


@given(st.lists(st.tuples(thetas, st.integers(1, 3)), min_size=1, max_size=3),
       st.integers(0, 2), st.randoms())
def test_classify_invariant_under_multiplicity_and_order(blocks, triv, rnd):
    base = classify(RepSpec.create(triv, blocks))
    shuffled = list(blocks)
    rnd.shuffle(shuffled)
    altered = [(th, m + rnd.randint(0, 2)) for th, m in shuffled]
    other = classify(RepSpec.create(triv, altered))
    assert other.kind == base.kind
    if base.lam is not None:
        assert other.lam == pytest.approx(base.lam)


def test_direct_sum_coordinates():
    a, b = RepSpec.rotation(0.5), RepSpec.create(1)
    total, (ca, cb) = direct_sum(a, b)
    assert total.dim == 3
    assert sorted(np.concatenate([ca, cb]).tolist()) == [0, 1, 2]
    # restricting U_t of the sum to each summand's coordinates gives the summand
    for t in (0.3, 1.7):
        assert np.allclose(total.U(t)[np.ix_(ca, ca)], a.U(t))
        assert np.allclose(total.U(t)[np.ix_(cb, cb)], b.U(t))
