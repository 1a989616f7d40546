"""Non-commutative probability spaces, free products and freeness checks.

Mixed moments in a free product are computed by the centering recursion:
every letter is split as ``a = (a - phi(a)) + phi(a)``, alternating products of
centered letters have state zero, and adjacent letters from the same factor
are merged.  The recursion is run left to right on a *normal form*: a
dictionary from alternating tuples of centered factor elements to
coefficients.  Multiplying a normal form on the right by an element ``u`` of
factor ``f`` uses

    e_p * u = e_{pu} + (phi(pu) - phi(p) phi(u)) - phi(p) e_u,      e_p = p - phi(p),

when the last letter ``e_p`` already belongs to ``f``, and plain
concatenation otherwise.  The state of the product is the coefficient of the
empty tuple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .fock import FockOperator, evaluate_word
from .words import Word, WordExpr, format_word

__all__ = [
    "NCSpace",
    "MatrixSpace",
    "FockNCSpace",
    "FreeProductSpace",
    "FreenessReport",
    "free_product_moment",
    "check_freeness",
    "omega_lambda_space",
    "m2_space",
    "matrix_units",
]


class NCSpace:
    """A unital *-algebra given by named generators and a state on words.

    Subclasses implement :meth:`word_state`.  The state of a
    :class:`~awlab.words.WordExpr` is obtained by linearity.
    """

    generators: Tuple[str, ...] = ()
    exact: bool = True

    def word_state(self, word: Word) -> complex:
        raise NotImplementedError

    def state(self, expr) -> complex:
        expr = WordExpr.coerce(expr)
        unknown = expr.generators - set(self.generators)
        if unknown:
            raise KeyError(f"unknown generators {sorted(unknown)}")
        return sum((c * self.word_state(w) for w, c in expr.items()), 0j)

    def gen(self, name: str, dagger: bool = False) -> WordExpr:
        if name not in self.generators:
            raise KeyError(f"unknown generator {name!r}")
        return WordExpr.gen(name, dagger)

    def center(self, expr) -> WordExpr:
        expr = WordExpr.coerce(expr)
        return expr - self.state(expr)

    # realized spaces override these to evaluate long products quickly
    def represent(self, expr):
        return None

    def chain_state(self, ops: Sequence) -> complex:
        raise NotImplementedError


class MatrixSpace(NCSpace):
    """Finite-dimensional matrix algebra with the state ``Tr(rho .)``.

    Parameters
    ----------
    generators : mapping of name -> square matrix
    rho : density matrix (positive, trace one); ``None`` means the normalised trace.
    """

    def __init__(self, generators: Mapping[str, np.ndarray], rho: Optional[np.ndarray] = None,
                 name: str = ""):
        mats = {k: np.asarray(v, dtype=complex) for k, v in generators.items()}
        if not mats:
            raise ValueError("need at least one generator")
        n = next(iter(mats.values())).shape[0]
        for k, m in mats.items():
            if m.shape != (n, n):
                raise ValueError(f"generator {k!r} has shape {m.shape}, expected {(n, n)}")
        if rho is None:
            rho = np.eye(n) / n
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (n, n):
            raise ValueError("density matrix has the wrong shape")
        if not np.allclose(rho, rho.conj().T, atol=1e-12):
            raise ValueError("density matrix must be self-adjoint")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise ValueError("density matrix must have trace one")
        if np.linalg.eigvalsh(rho).min() < -1e-12:
            raise ValueError("density matrix must be positive")
        self.mats = mats
        self.rho = rho
        self.n = n
        self.name = name
        self.generators = tuple(mats)
        self._cache: Dict[Word, np.ndarray] = {}

    def with_generators(self, extra: Mapping[str, np.ndarray]) -> "MatrixSpace":
        mats = dict(self.mats)
        mats.update(extra)
        return MatrixSpace(mats, self.rho, self.name)

    def renamed(self, prefix: str) -> "MatrixSpace":
        return MatrixSpace({prefix + k: v for k, v in self.mats.items()}, self.rho, self.name)

    def letter_matrix(self, name: str, dagger: bool) -> np.ndarray:
        m = self.mats[name]
        return m.conj().T if dagger else m

    def word_matrix(self, word: Word) -> np.ndarray:
        if not word:
            return np.eye(self.n, dtype=complex)
        hit = self._cache.get(word)
        if hit is None:
            hit = self.word_matrix(word[:-1]) @ self.letter_matrix(*word[-1])
            if len(self._cache) < 200_000:
                self._cache[word] = hit
        return hit

    def word_state(self, word: Word) -> complex:
        if not word:
            return 1.0 + 0j
        return complex(np.sum(self.rho.T * self.word_matrix(word)))

    def represent(self, expr) -> np.ndarray:
        expr = WordExpr.coerce(expr)
        out = np.zeros((self.n, self.n), dtype=complex)
        for w, c in expr.items():
            out += c * self.word_matrix(w)
        return out

    def functional(self, mat: np.ndarray) -> complex:
        return complex(np.sum(self.rho.T * mat))

    def chain_state(self, ops: Sequence[np.ndarray]) -> complex:
        acc = np.eye(self.n, dtype=complex)
        for m in ops:
            acc = acc @ m
        return self.functional(acc)

    def modular_halfstep(self, a: np.ndarray) -> np.ndarray:
        """``rho^{-1/2} a rho^{1/2}``, the modular group at ``z = i/2``."""
        w, V = np.linalg.eigh(self.rho)
        if w.min() <= 0:
            raise np.linalg.LinAlgError("singular density matrix: modular group undefined")
        r_half = (V * np.sqrt(w)) @ V.conj().T
        r_mhalf = (V / np.sqrt(w)) @ V.conj().T
        return r_mhalf @ np.asarray(a, dtype=complex) @ r_half

    def modular_flow(self, a: np.ndarray, z: complex) -> np.ndarray:
        """``rho^{iz} a rho^{-iz}`` for complex ``z``."""
        w, V = np.linalg.eigh(self.rho)
        if w.min() <= 0:
            raise np.linalg.LinAlgError("singular density matrix: modular group undefined")
        lw = np.log(w)
        left = (V * np.exp(1j * z * lw)) @ V.conj().T
        right = (V * np.exp(-1j * z * lw)) @ V.conj().T
        return left @ np.asarray(a, dtype=complex) @ right


class FockNCSpace(NCSpace):
    """Named operators on a truncated Fock space with the vacuum state.

    Word moments whose degree exceeds the truncation depth raise unless
    ``allow_inexact`` is set.
    """

    def __init__(self, ops: Mapping[str, FockOperator], allow_inexact: bool = False):
        if not ops:
            raise ValueError("need at least one operator")
        self.ops = dict(ops)
        self.fock = next(iter(self.ops.values())).fock
        self.generators = tuple(self.ops)
        self.allow_inexact = allow_inexact
        self._cache: Dict[Word, complex] = {}

    def word_state(self, word: Word) -> complex:
        if not word:
            return 1.0 + 0j
        hit = self._cache.get(word)
        if hit is None:
            value, exact = evaluate_word(word, self.ops)
            if not exact and not self.allow_inexact:
                raise ValueError(f"word of degree {len(word)} exceeds the truncation depth "
                                 f"{self.fock.D}; the vacuum moment would not be exact")
            self._cache[word] = hit = value
        return hit

    def represent(self, expr) -> FockOperator:
        expr = WordExpr.coerce(expr)
        out = self.fock.zero()
        for w, c in expr.items():
            term = self.fock.identity()
            for name, dag in w:
                op = self.ops[name]
                term = term @ (op.adjoint() if dag else op)
            out = out + term * c
        return out

    def chain_state(self, ops: Sequence[FockOperator]) -> complex:
        vec = self.fock.vacuum()
        for op in reversed(ops):
            vec = op.matrix @ vec
        return complex(vec[0])


# free products


class FreeProductSpace(NCSpace):
    """Free product of NC spaces; generator names must be distinct across factors."""

    def __init__(self, factors: Sequence[NCSpace]):
        self.factors = list(factors)
        owner: Dict[str, int] = {}
        for k, fac in enumerate(self.factors):
            for g in fac.generators:
                if g in owner:
                    raise ValueError(f"generator {g!r} appears in factors {owner[g]} and {k}")
                owner[g] = k
        self.owner = owner
        self.generators = tuple(owner)
        self._elem_state: Dict[Tuple[int, WordExpr], complex] = {}

    def factor_of(self, name: str) -> int:
        try:
            return self.owner[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def _phi(self, f: int, elem: WordExpr) -> complex:
        key = (f, elem)
        hit = self._elem_state.get(key)
        if hit is None:
            hit = self.factors[f].state(elem)
            if len(self._elem_state) < 500_000:
                self._elem_state[key] = hit
        return hit

    def split_word(self, word: Word) -> List[Tuple[int, WordExpr]]:
        """Group a word into maximal runs of letters from one factor."""
        blocks: List[Tuple[int, List]] = []
        for letter in word:
            f = self.factor_of(letter[0])
            if blocks and blocks[-1][0] == f:
                blocks[-1][1].append(letter)
            else:
                blocks.append((f, [letter]))
        return [(f, WordExpr.from_word(tuple(ls))) for f, ls in blocks]

    def normal_form(self, blocks: Sequence[Tuple[int, WordExpr]], prune: bool = False
                    ) -> Dict[Tuple, complex]:
        """Reduce a product of factor elements to alternating centered tuples.

        With ``prune`` set, tuples that can no longer collapse to the empty
        tuple are dropped, which is all that is needed for the state.
        """
        nf: Dict[Tuple, complex] = {(): 1.0 + 0j}
        nblocks = len(blocks)
        for pos, (f, u) in enumerate(blocks):
            remaining = nblocks - pos - 1
            phi_u = self._phi(f, u)
            out: Dict[Tuple, complex] = {}

            def add(key, c):
                if c == 0 or (prune and len(key) > remaining):
                    return
                out[key] = out.get(key, 0) + c

            for key, c in nf.items():
                if key and key[-1][0] == f:
                    p = key[-1][1]
                    base = key[:-1]
                    pu = p * u
                    phi_p = self._phi(f, p)
                    add(base + ((f, pu),), c)
                    add(base, c * (self._phi(f, pu) - phi_p * phi_u))
                    add(base + ((f, u),), -c * phi_p)
                else:
                    add(key + ((f, u),), c)
                    add(key, c * phi_u)
            nf = {k: v for k, v in out.items() if v != 0}
        return nf

    def blocks_moment(self, blocks: Sequence[Tuple[int, WordExpr]]) -> complex:
        merged: List[Tuple[int, WordExpr]] = []
        for f, u in blocks:
            if merged and merged[-1][0] == f:
                merged[-1] = (f, merged[-1][1] * u)
            else:
                merged.append((f, u))
        if not merged:
            return 1.0 + 0j
        if len(merged) == 1:
            return self._phi(*merged[0])
        return self.normal_form(merged, prune=True).get((), 0j)

    def word_state(self, word: Word) -> complex:
        if not word:
            return 1.0 + 0j
        return self.blocks_moment(self.split_word(word))

    def product_moment(self, elements: Sequence[WordExpr]) -> complex:
        """State of a product of elements, each living in a single factor."""
        scalar = 1.0 + 0j
        blocks = []
        for e in elements:
            e = WordExpr.coerce(e)
            owners = {self.factor_of(g) for g in e.generators}
            if len(owners) > 1:
                raise ValueError("each element must live in one factor")
            if owners:
                blocks.append((owners.pop(), e))
            else:
                scalar *= e.scalar_part()
        if scalar == 0:
            return 0j
        return scalar * self.blocks_moment(blocks)

    def expr_normal_form(self, expr) -> Dict[Tuple, complex]:
        """Normal form of a polynomial (sum over its words, no pruning)."""
        expr = WordExpr.coerce(expr)
        total: Dict[Tuple, complex] = {}
        for w, c in expr.items():
            if not w:
                total[()] = total.get((), 0) + c
                continue
            for key, v in self.normal_form(self.split_word(w)).items():
                total[key] = total.get(key, 0) + c * v
        return {k: v for k, v in total.items() if v != 0}

    def inner(self, x, y) -> complex:
        """``phi(x^* y)`` computed from the two normal forms.

        Centered alternating tuples with different factor patterns are
        orthogonal; equal patterns pair letter by letter through
        ``phi(e_p^* e_q) = phi(p^* q) - conj(phi(p)) phi(q)``.
        """
        nx = self.expr_normal_form(x)
        ny = nx if y is x else self.expr_normal_form(y)
        by_pattern: Dict[Tuple[int, ...], List] = {}
        for key, c in ny.items():
            by_pattern.setdefault(tuple(f for f, _ in key), []).append((key, c))
        cov_cache: Dict = {}
        total = 0j
        for kx, cx in nx.items():
            pattern = tuple(f for f, _ in kx)
            for ky, cy in by_pattern.get(pattern, ()):
                prod = np.conj(cx) * cy
                for (f, p), (_, q) in zip(kx, ky):
                    ck = (f, p, q)
                    cov = cov_cache.get(ck)
                    if cov is None:
                        cov = self._phi(f, p.adjoint() * q) - np.conj(self._phi(f, p)) * self._phi(f, q)
                        cov_cache[ck] = cov
                    prod *= cov
                    if prod == 0:
                        break
                total += prod
        return total


def free_product_moment(space: FreeProductSpace, w) -> complex:
    """Mixed moment of ``w`` in the free product state."""
    return space.state(w)


# standard factors


def matrix_units(n: int, prefix: str = "e") -> Dict[str, np.ndarray]:
    out = {}
    for i in range(n):
        for j in range(n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = 1.0
            out[f"{prefix}{i}{j}"] = m
    return out


def omega_lambda_space(lam: float, K: Optional[int] = None, tail: float = 1e-12,
                       prefix: str = "e") -> MatrixSpace:
    """Truncated ``(B(l^2), omega_lambda)`` with ``omega(e_jj) = lambda^j (1 - lambda)``.

    The weights on ``0..K`` are renormalised to sum to one; by default ``K``
    is the smallest cut with dropped mass ``lambda^{K+1}`` below ``tail``.
    Generators are the matrix units ``e{i}{j}`` (``e{i}_{j}`` when K >= 10).
    """
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    if K is None:
        K = max(1, math.ceil(math.log(tail) / math.log(lam)) - 1)
    weights = np.array([lam ** j * (1 - lam) for j in range(K + 1)])
    weights /= weights.sum()
    n = K + 1
    gens = {}
    sep = "_" if n > 10 else ""
    for i in range(n):
        for j in range(n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = 1.0
            gens[f"{prefix}{i}{sep}{j}"] = m
    return MatrixSpace(gens, np.diag(weights), name=f"omega_{lam:g}")


def m2_space(lam: Optional[float] = None, extra: Optional[Mapping[str, np.ndarray]] = None,
             prefix: str = "e") -> MatrixSpace:
    """``M_2(C)`` with the trace (``lam=None``) or ``diag(1, lam) / (1 + lam)``."""
    rho = None if lam is None else np.diag([1.0, lam]) / (1.0 + lam)
    gens = matrix_units(2, prefix)
    if extra:
        gens.update({k: np.asarray(v, dtype=complex) for k, v in extra.items()})
    return MatrixSpace(gens, rho, name="tr" if lam is None else f"D_{lam:g}")


# freeness


@dataclass
class FreenessReport:
    applicable: bool
    passed: bool
    max_residual: float
    n_words: int
    max_len: int
    tol: float
    worst_word: str = ""
    note: str = ""

    def to_json(self) -> dict:
        return {"applicable": self.applicable, "pass": self.passed,
                "max_residual": self.max_residual, "n_words": self.n_words,
                "max_len": self.max_len, "tol": self.tol,
                "worst_word": self.worst_word, "note": self.note}


MAX_FREENESS_LEN = 8


def _family_elements(space: NCSpace, gens: Sequence[str], max_degree: int, star: bool
                     ) -> List[Tuple[str, WordExpr]]:
    letters = [(g, False) for g in gens] + ([(g, True) for g in gens] if star else [])
    out = []
    for deg in range(1, max_degree + 1):
        for word in itertools.product(letters, repeat=deg):
            e = WordExpr.from_word(word)
            out.append((format_word(word), space.center(e)))
    return out


def check_freeness(space: NCSpace, families: Mapping[str, Sequence[str]], max_len: int = 4,
                   max_degree: int = 2, star: bool = False, tol: float = 1e-10
                   ) -> FreenessReport:
    """Evaluate every alternating product of centered family elements.

    Family elements are the centered words of length ``1..max_degree`` in
    the family's generators (with adjoints when ``star`` is set).  Products
    of length ``2..max_len`` with neighbours from different families are
    evaluated; the families pass as free when every value is below ``tol``.
    """
    if max_len > MAX_FREENESS_LEN:
        raise ValueError(f"max_len above {MAX_FREENESS_LEN} exceeds the combinatorial budget")
    names = list(families)
    seen: Dict[str, str] = {}
    overlap = False
    for fam in names:
        for g in families[fam]:
            if g in seen:
                overlap = True
            seen[g] = fam
    if len(names) < 2 or overlap:
        return FreenessReport(False, False, float("nan"), 0, max_len, tol,
                              note="freeness needs at least two disjoint families")
    elems = {fam: _family_elements(space, families[fam], max_degree, star) for fam in names}
    realized = {}
    probe = elems[names[0]][0][1]
    if space.represent(probe) is not None:
        for fam in names:
            realized[fam] = [space.represent(e) for _, e in elems[fam]]

    worst, worst_word, count = 0.0, "", 0

    def record(value, labels):
        nonlocal worst, worst_word, count
        count += 1
        if abs(value) > worst or count == 1:
            worst, worst_word = max(worst, abs(value)), " . ".join(labels)

    def extend(chain_fams, chain_idx):
        # chain_* list the product from left to right
        if len(chain_fams) >= 2:
            labels = [elems[f][i][0] for f, i in zip(chain_fams, chain_idx)]
            if realized:
                value = space.chain_state([realized[f][i] for f, i in zip(chain_fams, chain_idx)])
            elif isinstance(space, FreeProductSpace):
                value = space.product_moment([elems[f][i][1] for f, i in zip(chain_fams, chain_idx)])
            else:
                prod = WordExpr.one()
                for f, i in zip(chain_fams, chain_idx):
                    prod = prod * elems[f][i][1]
                value = space.state(prod)
            record(value, labels)
        if len(chain_fams) == max_len:
            return
        for fam in names:
            if chain_fams and chain_fams[-1] == fam:
                continue
            for i in range(len(elems[fam])):
                extend(chain_fams + [fam], chain_idx + [i])

    extend([], [])
    return FreenessReport(True, worst <= tol, worst, count, max_len, tol, worst_word)
