import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from awlab.fock import build_fock, semicircular_field
from awlab.free import (FockNCSpace, FreeProductSpace, MatrixSpace, check_freeness,
                        free_product_moment, m2_space, omega_lambda_space)
from awlab.rep import RepSpec
from awlab.words import WordExpr

N1 = m2_space(0.5, prefix="e")
N2 = m2_space(None, prefix="f")
P = FreeProductSpace([N1, N2])
LETTERS = list(N1.generators) + list(N2.generators)


def naive_moment(blocks):
    """Independent oracle by literal centering expansion.

    ``blocks`` is a list of (factor, matrix).  Adjacent blocks of one factor
    are multiplied; then prod (a_i) = prod (a_i0 + phi(a_i)) is expanded over
    subsets and the all-centered alternating term is dropped.
    """
    spaces = (N1, N2)
    merged = []
    for f, m in blocks:
        if merged and merged[-1][0] == f:
            merged[-1] = (f, merged[-1][1] @ m)
        else:
            merged.append((f, m))
    if not merged:
        return 1.0
    if len(merged) == 1:
        f, m = merged[0]
        return spaces[f].functional(m)
    phis = [spaces[f].functional(m) for f, m in merged]
    centered = [(f, m - phi * np.eye(m.shape[0])) for (f, m), phi in zip(merged, phis)]
    n = len(merged)
    total = 0j
    for keep in itertools.product([0, 1], repeat=n):
        if all(keep):
            continue
        coef = np.prod([phis[i] for i in range(n) if not keep[i]])
        if coef == 0:
            continue
        total += coef * naive_moment([centered[i] for i in range(n) if keep[i]])
    return total


def word_blocks(word):
    out = []
    for name, dag in word:
        f = 0 if name in N1.generators else 1
        m = (N1 if f == 0 else N2).mats[name]
        out.append((f, m.conj().T if dag else m))
    return out


words = st.lists(st.tuples(st.sampled_from(LETTERS), st.booleans()), min_size=1,
                 max_size=5).map(tuple)
polys = st.lists(st.tuples(words, st.complex_numbers(max_magnitude=2, allow_nan=False,
                                                     allow_infinity=False)),
                 min_size=1, max_size=3).map(WordExpr)


def test_factorization_of_free_pair():
    a = WordExpr.gen("e00") + 2 * WordExpr.gen("e01")
    b = WordExpr.gen("f11") - WordExpr.gen("f10")
    assert abs(P.state(a * b) - N1.state(a) * N2.state(b)) < 1e-15


def test_omega_lambda_diagonal():
    lam = 0.3
    om = omega_lambda_space(lam)
    for j in range(4):
        assert abs(om.state(WordExpr.gen(f"e{j}_{j}")) - lam ** j * (1 - lam)) < 1e-12
    assert om.state(WordExpr.gen("e0_1")) == 0
    # the M2 state diag(1, lam)/(1 + lam)
    m2 = m2_space(lam)
    assert abs(m2.state(WordExpr.gen("e11")) - lam / (1 + lam)) < 1e-15


def test_matrix_space_validation():
    with pytest.raises(ValueError):
        MatrixSpace({"a": np.eye(2)}, rho=np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        MatrixSpace({"a": np.eye(2)}, rho=np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        FreeProductSpace([N1, N1])


@given(words)
def test_moments_match_naive_oracle(w):
    assert abs(P.word_state(w) - naive_moment(word_blocks(w))) < 1e-12


@given(words)
def test_conjugation(w):
    adj = tuple((n, not d) for n, d in reversed(w))
    assert abs(P.word_state(adj) - np.conj(P.word_state(w))) < 1e-12


@given(polys)
def test_positivity(x):
    assert P.inner(x, x).real >= -1e-12
    assert abs(P.inner(x, x) - P.state(x.adjoint() * x)) < 1e-10


@given(polys, polys)
def test_inner_matches_state(x, y):
    assert abs(P.inner(x, y) - P.state(x.adjoint() * y)) < 1e-10


@given(st.lists(st.sampled_from(["A", "B"]), min_size=2, max_size=6))
def test_alternating_centered_exactly_zero(pattern):
    elems = {"A": [P.center(WordExpr.gen("e01") * 3 + WordExpr.gen("e00")),
                   P.center(WordExpr.gen("e10"))],
             "B": [P.center(WordExpr.gen("f00") + WordExpr.gen("f01", True))]}
    seq = [pattern[0]]
    for p in pattern[1:]:
        seq.append("B" if seq[-1] == "A" else "A")
    chosen = [elems[f][i % len(elems[f])] for i, f in enumerate(seq)]
    assert P.product_moment(chosen) == 0


def test_free_product_moment_alias():
    w = WordExpr.gen("e00") * WordExpr.gen("f01") * WordExpr.gen("e00")
    assert free_product_moment(P, w) == P.state(w)


def semicircular_pair(depth):
    rep = RepSpec.create(trivial_dim=2)
    F = build_fock(2, depth)
    return FockNCSpace({"s1": semicircular_field(F, rep, [1, 0]),
                        "s2": semicircular_field(F, rep, [0, 1])})


def test_fock_pair_matches_recursion():
    joint = semicircular_pair(6)
    one = build_fock(1, 6)
    line = RepSpec.create(1)
    marg = FreeProductSpace([FockNCSpace({"s1": semicircular_field(one, line, [1.0])}),
                             FockNCSpace({"s2": semicircular_field(one, line, [1.0])})])
    for L in range(1, 7):
        for w in itertools.product([("s1", False), ("s2", False)], repeat=L):
            assert abs(joint.word_state(w) - marg.word_state(w)) < 1e-12
    # four-point crossing moment of free semicirculars vanishes, nested one is 1/16
    assert abs(joint.state(WordExpr.from_word([("s1", 0), ("s2", 0), ("s1", 0), ("s2", 0)]))) < 1e-15
    assert abs(joint.state(WordExpr.from_word([("s1", 0), ("s2", 0), ("s2", 0), ("s1", 0)]))
               - 1 / 16) < 1e-15


def test_check_freeness_fock_pass():
    rep = check_freeness(semicircular_pair(8), {"A": ["s1"], "B": ["s2"]}, max_len=4,
                         max_degree=2)
    assert rep.applicable and rep.passed and rep.max_residual <= 1e-10
    assert rep.n_words > 0


def test_check_freeness_detects_dependence():
    rep = RepSpec.create(trivial_dim=2)
    F = build_fock(2, 6)
    s1 = semicircular_field(F, rep, [1, 0])
    s12 = semicircular_field(F, rep, [1 / math.sqrt(2), 1 / math.sqrt(2)])
    space = FockNCSpace({"u": s1, "v": s12})
    report = check_freeness(space, {"A": ["u"], "B": ["v"]}, max_len=4, max_degree=2)
    assert report.applicable and not report.passed


def test_check_freeness_recursion_exact():
    report = check_freeness(P, {"N1": ["e01", "e00"], "N2": ["f01"]}, max_len=4,
                            max_degree=1, star=True)
    assert report.passed and report.max_residual == 0.0


def test_check_freeness_inapplicable():
    assert not check_freeness(P, {"A": ["e00"]}).applicable
    assert not check_freeness(P, {"A": ["e00"], "B": ["e00", "f00"]}).applicable
    with pytest.raises(ValueError):
        check_freeness(P, {"A": ["e00"], "B": ["f00"]}, max_len=9)


def test_fock_space_raises_on_inexact_words():
    space = semicircular_pair(2)
    with pytest.raises(ValueError):
        space.state(WordExpr.gen("s1") ** 4)


def test_modular_halfstep_matches_flow():
    m = m2_space(0.5)
    a = np.array([[0, 1], [1, 0]], dtype=complex)
    assert np.allclose(m.modular_halfstep(a), m.modular_flow(a, 0.5j), atol=1e-14)
    # KMS for the density matrix: w(x s_{-i}(y)) = w(y x)
    x = np.array([[1, 2j], [0.5, -1]])
    y = np.array([[0.3, 1], [2, 1j]])
    assert abs(m.functional(x @ m.modular_flow(y, -1j)) - m.functional(y @ x)) < 1e-14
