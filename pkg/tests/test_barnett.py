import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from awlab.barnett import (SIGMA_X, SIGMA_Z, barnett_check, c_const, ef_consts, make_setup,
                           modular_setup, random_polynomials, tracial_setup, two_norm)
from awlab.free import m2_space
from awlab.words import WordExpr

a, b, c = (WordExpr.gen(g) for g in ("a", "b", "c"))


def test_unit_norm_E_is_fourteen():
    assert ef_consts(tracial_setup()).E == 14.0
    assert ef_consts(modular_setup(0.5)).E == pytest.approx(14.0, abs=1e-12)


def test_E_scales_cubically():
    setup = make_setup(None, None, 2 * SIGMA_Z, SIGMA_Z, SIGMA_X)
    assert ef_consts(setup).E == pytest.approx(6 * 8 + 4 + 4)


def test_C_of_identity():
    assert c_const(m2_space(), np.eye(2)) == pytest.approx(6.0)


def test_C_vanishes_for_centered_unitary_in_trace():
    assert c_const(m2_space(), SIGMA_Z) == pytest.approx(0.0, abs=1e-15)
    K = ef_consts(tracial_setup())
    assert K.C_a == K.C_b == K.C_c == 0 and K.F == 0


def test_C_of_sigma_x_in_modular_state():
    lam = 0.5
    space = m2_space(lam)
    # s(a) - a has entries sqrt(lam) - 1 and 1/sqrt(lam) - 1
    closed = 2 * (1 / math.sqrt(lam) - 1)
    assert c_const(space, SIGMA_X) == pytest.approx(closed, rel=1e-13)
    # brute-force half step of the modular group, rho^{iz} a rho^{-iz} at z = i/2
    w, V = np.linalg.eigh(space.rho)
    half = (V * w ** -0.5) @ V.conj().T @ SIGMA_X @ (V * w ** 0.5) @ V.conj().T
    assert np.allclose(space.modular_halfstep(SIGMA_X), half, atol=1e-14)
    assert np.allclose(space.modular_flow(SIGMA_X, 0.5j), half, atol=1e-14)
    assert ef_consts(modular_setup(lam)).C_a == pytest.approx(closed)


def test_two_norm_examples():
    P = tracial_setup().product
    assert two_norm(P, a) == pytest.approx(1.0, abs=1e-14)
    assert two_norm(P, a * b - b * a) == pytest.approx(math.sqrt(2), abs=1e-14)
    assert two_norm(P, WordExpr.one() * 3) == pytest.approx(3.0)


def test_tracial_x_equals_a():
    report = barnett_check(tracial_setup(), [a])
    row = report.rows[0]
    assert row["lhs"] == pytest.approx(1.0)
    assert row["rhs"] == pytest.approx(14 * math.sqrt(2))
    assert report.passed


words = st.lists(st.tuples(st.sampled_from(["a", "e01", "e11", "b", "c", "f10"]), st.booleans()),
                 min_size=1, max_size=4).map(tuple)
polys = st.lists(st.tuples(words, st.floats(-1, 1)), min_size=1, max_size=3).map(WordExpr)


@given(polys, polys)
def test_parallelogram_law(x, y):
    P = modular_setup(0.5).product
    lhs = two_norm(P, x + y) ** 2 + two_norm(P, x - y) ** 2
    rhs = 2 * two_norm(P, x) ** 2 + 2 * two_norm(P, y) ** 2
    assert abs(lhs - rhs) < 1e-9 * max(1, rhs)


@given(polys)
def test_centering_does_not_increase_norm(x):
    P = modular_setup(0.5).product
    assert two_norm(P, x - P.state(x)) <= two_norm(P, x) + 1e-10


def test_random_polynomials_deterministic():
    s = tracial_setup()
    p1, p2 = random_polynomials(s, 5, 3), random_polynomials(s, 5, 3)
    assert p1 == p2
    assert p1 != random_polynomials(s, 5, 4)
    assert all(p.degree <= 6 for p in random_polynomials(s, 50, 0))


def test_random_batch_both_setups():
    for setup in (tracial_setup(), modular_setup(0.5)):
        report = barnett_check(setup, random_polynomials(setup, 20, 11))
        assert report.passed and report.min_margin > 0
        doc = report.to_json()
        assert doc["summary"]["count"] == 20


def test_state_preserving_automorphisms():
    u1 = np.diag([1, 1j])
    u2 = np.array([[0, 1], [1, 0]], dtype=complex)
    setup = modular_setup(0.5, u1=u1, u2=u2)
    report = barnett_check(setup, random_polynomials(setup, 10, 2))
    assert report.passed


def test_setup_validation():
    with pytest.raises(ValueError):
        make_setup(None, None, SIGMA_Z, SIGMA_Z, SIGMA_X, u1=np.diag([1.0, 2.0]))
    with pytest.raises(ValueError):
        make_setup(np.diag([0.6, 0.4]), None, SIGMA_Z, SIGMA_Z, SIGMA_X, u1=SIGMA_X)
    with pytest.raises(ValueError):
        barnett_check(tracial_setup(), [a ** 8])
