"""Constants and numerical check of the generalized 14-epsilon inequality.

Setting: two realized factors ``(N1, w1)``, ``(N2, w2)``, elements ``a in N1``,
``b, c in N2``, state-preserving inner automorphisms ``alpha_i = Ad u_i`` and
the free product state ``w``.  For every polynomial ``x`` the check compares

    LHS = ||x - w(x)1||_2
    RHS = E max(||xa - alpha(a)x||_2, ||xb - alpha(b)x||_2, ||xc - alpha(c)x||_2) + F ||x||_2

with ``E = 6||a||^3 + 4||b||^3 + 4||c||^3`` and
``F = 3C(a) + 2C(b) + 2C(c) + 12 |w(cb^*)| ||cb^*||``.  All 2-norms come from
exact free product moments; operator norms are taken in the factors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .free import FreeProductSpace, MatrixSpace, matrix_units
from .words import WordExpr, format_word

__all__ = [
    "BarnettSetup",
    "BarnettConstants",
    "BarnettReport",
    "make_setup",
    "tracial_setup",
    "modular_setup",
    "c_const",
    "ef_consts",
    "two_norm",
    "random_polynomials",
    "barnett_check",
    "SIGMA_X",
    "SIGMA_Z",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
MAX_DEGREE = 8


def op_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def c_const(space: MatrixSpace, a) -> float:
    """``C(a) = 2||a||^3 ||s(a) - a|| + 2||a||^2 ||a^*a - 1|| + 3(1 + ||a||^2) ||aa^* - 1||
    + 6 |w(a)| ||a||`` with ``s(a) = rho^{-1/2} a rho^{1/2}``."""
    if isinstance(a, str):
        a = space.mats[a]
    a = np.asarray(a, dtype=complex)
    one = np.eye(space.n)
    na = op_norm(a)
    return (2 * na ** 3 * op_norm(space.modular_halfstep(a) - a)
            + 2 * na ** 2 * op_norm(a.conj().T @ a - one)
            + 3 * (1 + na ** 2) * op_norm(a @ a.conj().T - one)
            + 6 * abs(space.functional(a)) * na)


@dataclass
class BarnettConstants:
    C_a: float
    C_b: float
    C_c: float
    E: float
    F: float

    def to_json(self) -> dict:
        return {"C_a": self.C_a, "C_b": self.C_b, "C_c": self.C_c, "E": self.E, "F": self.F}


@dataclass
class BarnettSetup:
    """Two realized factors carrying generators ``a`` (in N1) and ``b, c`` (in N2).

    ``alpha(a)``, ``alpha(b)``, ``alpha(c)`` are added as generators holding
    ``u a u^*`` etc.; with no unitaries they equal ``a, b, c``.
    """

    N1: MatrixSpace
    N2: MatrixSpace
    name: str = ""
    product: FreeProductSpace = field(init=False, repr=False)

    def __post_init__(self):
        for g in ("a", "alpha(a)"):
            if g not in self.N1.generators:
                raise ValueError(f"N1 must carry generator {g!r}")
        for g in ("b", "c", "alpha(b)", "alpha(c)"):
            if g not in self.N2.generators:
                raise ValueError(f"N2 must carry generator {g!r}")
        self.product = FreeProductSpace([self.N1, self.N2])

    def letters(self, factor: int) -> List[str]:
        space = self.N1 if factor == 0 else self.N2
        return [g for g in space.generators if not g.startswith("alpha(")]


def make_setup(rho1: Optional[np.ndarray], rho2: Optional[np.ndarray], a, b, c,
               u1: Optional[np.ndarray] = None, u2: Optional[np.ndarray] = None,
               name: str = "", tol: float = 1e-12) -> BarnettSetup:
    """Build a setup on two full matrix algebras (matrix units as extra letters)."""
    a, b, c = (np.asarray(m, dtype=complex) for m in (a, b, c))
    n1, n2 = a.shape[0], b.shape[0]
    rho1 = np.eye(n1) / n1 if rho1 is None else np.asarray(rho1, dtype=complex)
    rho2 = np.eye(n2) / n2 if rho2 is None else np.asarray(rho2, dtype=complex)
    u1 = np.eye(n1, dtype=complex) if u1 is None else np.asarray(u1, dtype=complex)
    u2 = np.eye(n2, dtype=complex) if u2 is None else np.asarray(u2, dtype=complex)
    for u, rho, k in ((u1, rho1, 1), (u2, rho2, 2)):
        if np.max(np.abs(u.conj().T @ u - np.eye(len(u)))) > tol:
            raise ValueError(f"u{k} is not unitary")
        if np.max(np.abs(u @ rho - rho @ u)) > tol:
            raise ValueError(f"Ad u{k} does not preserve the state (u{k} must commute with rho)")
    g1 = matrix_units(n1, "e")
    g1.update({"a": a, "alpha(a)": u1 @ a @ u1.conj().T})
    g2 = matrix_units(n2, "f")
    g2.update({"b": b, "c": c, "alpha(b)": u2 @ b @ u2.conj().T,
               "alpha(c)": u2 @ c @ u2.conj().T})
    return BarnettSetup(MatrixSpace(g1, rho1, "N1"), MatrixSpace(g2, rho2, "N2"), name)


def tracial_setup(u1=None, u2=None) -> BarnettSetup:
    """``M2 * M2`` with traces; ``a = b = diag(1, -1)``, ``c = sigma_x``."""
    return make_setup(None, None, SIGMA_Z, SIGMA_Z, SIGMA_X, u1, u2, name="tracial")


def modular_setup(lam: float = 0.5, u1=None, u2=None) -> BarnettSetup:
    """``(M2, diag(1, lam)/(1+lam)) * (M2, tr)``; ``a = sigma_x``, ``b = diag(1, -1)``, ``c = sigma_x``."""
    rho1 = np.diag([1.0, lam]) / (1.0 + lam)
    return make_setup(rho1, None, SIGMA_X, SIGMA_Z, SIGMA_X, u1, u2, name=f"modular_{lam:g}")


def ef_consts(setup: BarnettSetup) -> BarnettConstants:
    a = setup.N1.mats["a"]
    b, c = setup.N2.mats["b"], setup.N2.mats["c"]
    cb = c @ b.conj().T
    Ca, Cb, Cc = c_const(setup.N1, a), c_const(setup.N2, b), c_const(setup.N2, c)
    E = 6 * op_norm(a) ** 3 + 4 * op_norm(b) ** 3 + 4 * op_norm(c) ** 3
    F = 3 * Ca + 2 * Cb + 2 * Cc + 12 * abs(setup.N2.functional(cb)) * op_norm(cb)
    return BarnettConstants(Ca, Cb, Cc, E, F)


def two_norm(space: FreeProductSpace, x) -> float:
    """``phi(x^* x)^{1/2}`` from exact free product moments."""
    val = space.inner(WordExpr.coerce(x), WordExpr.coerce(x)).real
    if val < -1e-9:
        raise ArithmeticError(f"negative squared 2-norm {val}")
    return math.sqrt(max(val, 0.0))


def random_polynomials(setup: BarnettSetup, count: int, seed: int, max_degree: int = 6,
                       max_terms: int = 3) -> List[WordExpr]:
    """Seeded random polynomials over both factors.

    Each polynomial has 1..``max_terms`` terms; a term has a length drawn
    uniformly from 1..``max_degree``, a random starting factor, alternating
    factors, letters drawn uniformly from the factor (adjoint with
    probability 1/2) and a coefficient uniform in [-1, 1].
    """
    if max_degree > MAX_DEGREE - 1:
        raise ValueError(f"degree above {MAX_DEGREE - 1} exceeds the budget")
    rng = np.random.Generator(np.random.Philox(seed))
    letters = [setup.letters(0), setup.letters(1)]
    out = []
    for _ in range(count):
        terms = []
        for _ in range(int(rng.integers(1, max_terms + 1))):
            length = int(rng.integers(1, max_degree + 1))
            f = int(rng.integers(0, 2))
            word = []
            for _ in range(length):
                name = letters[f][int(rng.integers(0, len(letters[f])))]
                word.append((name, bool(rng.integers(0, 2))))
                f = 1 - f
            terms.append((tuple(word), float(rng.uniform(-1, 1))))
        out.append(WordExpr(terms))
    return out


@dataclass
class BarnettReport:
    setup: str
    constants: BarnettConstants
    rows: List[dict]
    min_margin: float
    passed: bool

    def to_json(self) -> dict:
        return {"setup": self.setup, "constants": self.constants.to_json(),
                "per_x": self.rows,
                "summary": {"min_margin": self.min_margin, "pass": self.passed,
                            "count": len(self.rows)}}


def barnett_check(setup: BarnettSetup, xs: Sequence, slack: float = 1e-9) -> BarnettReport:
    """Evaluate both sides of the inequality for every ``x`` in ``xs``."""
    P = setup.product
    K = ef_consts(setup)
    gens = {g: WordExpr.gen(g) for g in ("a", "b", "c", "alpha(a)", "alpha(b)", "alpha(c)")}
    rows, min_margin, ok = [], math.inf, True
    for x in xs:
        x = WordExpr.coerce(x)
        if x.degree > MAX_DEGREE - 1:
            raise ValueError(f"degree {x.degree} exceeds the budget")
        lhs = two_norm(P, x - P.state(x))
        defects = [two_norm(P, x * gens[g] - gens[f"alpha({g})"] * x) for g in ("a", "b", "c")]
        rhs = K.E * max(defects) + K.F * two_norm(P, x)
        margin = rhs - lhs
        min_margin = min(min_margin, margin)
        ok = ok and lhs <= rhs + slack
        rows.append({"lhs": lhs, "rhs": rhs, "margin": margin, "word": str(x)})
    return BarnettReport(setup.name, K, rows, min_margin, ok)


def report_json(report: BarnettReport) -> str:
    return json.dumps(report.to_json(), sort_keys=True)
