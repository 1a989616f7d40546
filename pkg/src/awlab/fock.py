"""Truncated full Fock space and the operators acting on it.

The truncated space over ``C^d`` keeps tensors of rank ``0..D``.  Basis
vectors are words ``(i_1, ..., i_n)`` over ``{0..d-1}`` in graded
lexicographic order: all words of length 0 (the vacuum, index 0), then of
length 1, and so on, with the first letter most significant inside a level.
So the word ``(j,) + w`` sits at ``offset(n+1) + j * d**n + index_in_level(w)``
when ``w`` has length ``n``.

Creation operators map level ``n`` into level ``n+1`` and kill the top level.
A vacuum moment of a word with at most ``D`` creation/annihilation letters
never sees that cut, which is what the ``exact_depth`` bookkeeping records.
"""

from __future__ import annotations

import base64
import io
import json
import os
from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .rep import RepSpec, embed, involution_apply
from .words import WordExpr

__all__ = [
    "FockBudgetError",
    "FockSpace",
    "FockOperator",
    "Histogram",
    "build_fock",
    "creation",
    "s_field",
    "semicircular_field",
    "field",
    "generalized_circular",
    "field_pair_identity_check",
    "vacuum_expectation",
    "evaluate_word",
    "empirical_spectrum",
    "second_quantize",
    "DENSE_LIMIT",
]

DENSE_LIMIT = 2048
DEFAULT_BUDGET_BYTES = 4 * 1024 ** 3
DEFAULT_MAX_DIM = 20_000_000

Matrix = Union[np.ndarray, sp.csr_array]


class FockBudgetError(MemoryError):
    """The requested truncation does not fit the configured budget."""

    code = "budget_exceeded"

    def __init__(self, message: str, required_dim: int, required_bytes: int):
        super().__init__(message)
        self.required_dim = required_dim
        self.required_bytes = required_bytes


def budget_bytes() -> int:
    raw = os.environ.get("AWLAB_BUDGET_BYTES")
    return int(raw) if raw else DEFAULT_BUDGET_BYTES


@dataclass(frozen=True)
class FockSpace:
    """Full Fock space over ``C^d`` truncated at tensor rank ``D``."""

    d: int
    D: int
    dense: bool = True

    @property
    def one_particle_dim(self) -> int:
        return self.d

    @property
    def depth(self) -> int:
        return self.D

    @property
    def total_dim(self) -> int:
        return _total_dim(self.d, self.D)

    def level_offset(self, n: int) -> int:
        return _total_dim(self.d, n - 1) if n > 0 else 0

    def level_size(self, n: int) -> int:
        return self.d ** n

    def level_slice(self, n: int) -> slice:
        start = self.level_offset(n)
        return slice(start, start + self.d ** n)

    def index(self, word: Sequence[int]) -> int:
        n = len(word)
        if n > self.D:
            raise IndexError(f"word of length {n} exceeds depth {self.D}")
        pos = 0
        for letter in word:
            if not 0 <= letter < self.d:
                raise IndexError(f"letter {letter} outside 0..{self.d - 1}")
            pos = pos * self.d + letter
        return self.level_offset(n) + pos

    def word(self, index: int) -> Tuple[int, ...]:
        if not 0 <= index < self.total_dim:
            raise IndexError(index)
        n = 0
        while index >= self.level_offset(n + 1):
            n += 1
        pos = index - self.level_offset(n)
        letters = []
        for _ in range(n):
            pos, r = divmod(pos, self.d)
            letters.append(r)
        return tuple(reversed(letters))

    def basis(self) -> Iterator[Tuple[int, ...]]:
        for i in range(self.total_dim):
            yield self.word(i)

    def levels(self) -> np.ndarray:
        """Tensor rank of every basis vector."""
        return np.repeat(np.arange(self.D + 1), [self.d ** n for n in range(self.D + 1)])

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.total_dim, dtype=complex)
        v[0] = 1.0
        return v

    def identity(self) -> "FockOperator":
        n = self.total_dim
        mat = np.eye(n, dtype=complex) if self.dense else sp.identity(n, dtype=complex, format="csr")
        return FockOperator(self, mat, self.D, 0, "1")

    def zero(self) -> "FockOperator":
        n = self.total_dim
        mat = np.zeros((n, n), dtype=complex) if self.dense else sp.csr_array((n, n), dtype=complex)
        return FockOperator(self, mat, self.D, 0, "0")

    def with_storage(self, dense: bool) -> "FockSpace":
        return FockSpace(self.d, self.D, dense)


def _total_dim(d: int, D: int) -> int:
    if D < 0:
        return 0
    if d == 1:
        return D + 1
    return (d ** (D + 1) - 1) // (d - 1)


def build_fock(d: int, D: int, *, dense: Optional[bool] = None,
               max_dim: Optional[int] = None, budget: Optional[int] = None) -> FockSpace:
    """Truncated Fock space over ``C^d`` with tensors up to rank ``D``.

    Storage is dense up to :data:`DENSE_LIMIT` basis vectors and sparse (CSR)
    above unless ``dense`` forces a choice.  Raises :class:`FockBudgetError`
    when the dimension exceeds ``max_dim`` or the estimated size of one
    operator exceeds the byte budget (``AWLAB_BUDGET_BYTES``).
    """
    if int(d) != d or d < 1 or int(D) != D or D < 1:
        raise ValueError(f"need integers d >= 1 and D >= 1, got d={d}, D={D}")
    d, D = int(d), int(D)
    n = _total_dim(d, D)
    max_dim = DEFAULT_MAX_DIM if max_dim is None else max_dim
    budget = budget_bytes() if budget is None else budget
    if dense is None:
        dense = n <= DENSE_LIMIT
    need = 16 * n * n if dense else 32 * (d + 1) * n
    if n > max_dim or need > budget:
        raise FockBudgetError(
            f"Fock space d={d}, D={D} needs dimension {n} (~{need} bytes per operator); "
            f"limits are dimension {max_dim} and {budget} bytes", n, need)
    return FockSpace(d, D, bool(dense))


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Operator on a truncated Fock space.

    ``degree`` counts creation/annihilation letters (0 for operators that
    preserve the grading); vacuum moments are exact when ``degree`` does not
    exceed ``exact_depth``.
    """

    fock: FockSpace
    matrix: Matrix
    exact_depth: int
    degree: int = 1
    label: str = ""

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def adjoint(self) -> "FockOperator":
        m = self.matrix.conj().T
        if self.is_sparse:
            m = m.tocsr()
        return FockOperator(self.fock, m, self.exact_depth, self.degree, _dagger(self.label))

    @property
    def H(self) -> "FockOperator":
        return self.adjoint()

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def _check(self, other: "FockOperator"):
        if other.fock.d != self.fock.d or other.fock.D != self.fock.D:
            raise ValueError("operators live on different Fock spaces")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = self.fock.identity() * other
        if not isinstance(other, FockOperator):
            return NotImplemented
        self._check(other)
        return FockOperator(self.fock, _tidy(self.matrix + other.matrix),
                            min(self.exact_depth, other.exact_depth),
                            max(self.degree, other.degree), f"({self.label} + {other.label})")

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return FockOperator(self.fock, self.matrix * other, self.exact_depth, self.degree,
                                f"{other}*{self.label}")
        return self.__matmul__(other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def __matmul__(self, other):
        if not isinstance(other, FockOperator):
            return NotImplemented
        self._check(other)
        return FockOperator(self.fock, _tidy(self.matrix @ other.matrix),
                            min(self.exact_depth, other.exact_depth),
                            self.degree + other.degree, f"{self.label} {other.label}")

    def __pow__(self, k: int):
        out = self.fock.identity()
        for _ in range(k):
            out = out @ self
        return out

    def is_self_adjoint(self, tol: float = 1e-10) -> bool:
        diff = self.matrix - self.matrix.conj().T
        return _max_abs(diff) <= tol

    def max_abs_diff(self, other: "FockOperator") -> float:
        self._check(other)
        return _max_abs(self.matrix - other.matrix)

    # serialization

    def to_json(self) -> str:
        """JSON header plus base64 column-major little-endian complex128 data."""
        dense = np.asarray(self.toarray(), dtype="<c16")
        header = {"d": self.fock.d, "D": self.fock.D, "label": self.label,
                  "exact_depth": self.exact_depth, "degree": self.degree,
                  "dtype": "complex128", "order": "F"}
        payload = base64.b64encode(dense.tobytes(order="F")).decode("ascii")
        return json.dumps({"header": header, "data": payload}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FockOperator":
        doc = json.loads(text)
        h = doc["header"]
        fock = build_fock(h["d"], h["D"])
        n = fock.total_dim
        raw = base64.b64decode(doc["data"])
        mat = np.frombuffer(raw, dtype="<c16").reshape((n, n), order="F").astype(complex)
        if not fock.dense:
            mat = sp.csr_array(mat)
        return cls(fock, mat, h["exact_depth"], h.get("degree", 1), h["label"])


def _dagger(label: str) -> str:
    if not label:
        return label
    return label[:-1] if label.endswith("*") else label + "*"


def _tidy(m: Matrix) -> Matrix:
    if sp.issparse(m):
        m = sp.csr_array(m)
        m.eliminate_zeros()
    return m


def _max_abs(m) -> float:
    if sp.issparse(m):
        return float(np.max(np.abs(m.data), initial=0.0))
    return float(np.max(np.abs(m), initial=0.0))


# building blocks


def _creation_matrix(F: FockSpace, xi: np.ndarray) -> Matrix:
    d, D = F.d, F.D
    rows, cols, vals = [], [], []
    for n in range(D):
        size = d ** n
        src = F.level_offset(n) + np.arange(size)
        base = F.level_offset(n + 1)
        for j in np.flatnonzero(xi):
            rows.append(base + j * size + np.arange(size))
            cols.append(src)
            vals.append(np.full(size, xi[j], dtype=complex))
    N = F.total_dim
    if rows:
        m = sp.csr_array((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(N, N))
    else:
        m = sp.csr_array((N, N), dtype=complex)
    return m.toarray() if F.dense else m


def _vector(F: FockSpace, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (F.d,):
        raise ValueError(f"vector of length {F.d} expected, got shape {xi.shape}")
    return xi


def creation(F: FockSpace, xi, adjoint: bool = False, label: str = "") -> FockOperator:
    """Left creation operator ``l(xi)`` (or its adjoint, the annihilation operator).

    ``l(xi)`` sends the vacuum to ``xi`` and a tensor ``x_1 (x) ... (x) x_n`` to
    ``xi (x) x_1 (x) ... (x) x_n``; the top level is sent to zero.
    """
    xi = _vector(F, xi)
    op = FockOperator(F, _creation_matrix(F, xi), F.D, 1, label or "l")
    return op.adjoint() if adjoint else op


def s_field(F: FockSpace, k) -> FockOperator:
    """``(l(k) + l(k)^*) / 2`` for a vector ``k`` already in the complex space."""
    ell = creation(F, k)
    out = (ell + ell.adjoint()) * 0.5
    return FockOperator(F, out.matrix, F.D, 1, "s")


def semicircular_field(F: FockSpace, rep: RepSpec, xi) -> FockOperator:
    """``s(xi)`` for a real vector ``xi`` of H_R, placed in H through :func:`embed`."""
    if rep.dim != F.d:
        raise ValueError(f"representation has dimension {rep.dim}, Fock space {F.d}")
    return s_field(F, embed(rep, xi))


def field(F: FockSpace, rep: RepSpec, zeta) -> FockOperator:
    """``l(zeta) + l(T zeta)^*`` for any complex ``zeta``."""
    if rep.dim != F.d:
        raise ValueError(f"representation has dimension {rep.dim}, Fock space {F.d}")
    zeta = _vector(F, zeta)
    out = creation(F, zeta) + creation(F, involution_apply(rep, zeta, "T"), adjoint=True)
    return FockOperator(F, out.matrix, F.D, 1, "x")


def generalized_circular(F: FockSpace, lam: float, xi1, xi2, tol: float = 1e-12) -> FockOperator:
    """``y = l(xi1) + sqrt(lam) l(xi2)^*`` for orthonormal ``xi1, xi2``."""
    if not 0 < lam <= 1:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    xi1, xi2 = _vector(F, xi1), _vector(F, xi2)
    gram = np.array([[np.vdot(a, b) for b in (xi1, xi2)] for a in (xi1, xi2)])
    if np.max(np.abs(gram - np.eye(2))) > tol:
        raise ValueError("xi1 and xi2 must be orthonormal")
    out = creation(F, xi1) + creation(F, xi2, adjoint=True) * np.sqrt(lam)
    return FockOperator(F, out.matrix, F.D, 1, "y")


def field_pair_identity_check(F: FockSpace, rep: RepSpec, xi, eta) -> float:
    """Max-entry residual of ``2 s(xi) + 2i s(eta) - (l(zeta) + l(T zeta)^*)``.

    ``xi`` and ``eta`` are vectors of K_R (outputs of :func:`embed`) and
    ``zeta = xi + i eta``.
    """
    xi, eta = _vector(F, xi), _vector(F, eta)
    lhs = s_field(F, xi) * 2 + s_field(F, eta) * 2j
    rhs = field(F, rep, xi + 1j * eta)
    return lhs.max_abs_diff(rhs)


# evaluation


def vacuum_expectation(x: Union[FockOperator, WordExpr],
                       ops: Optional[Mapping[str, FockOperator]] = None,
                       *, with_flag: bool = False):
    """``<x Omega, Omega>`` for an operator or a word expression over named operators.

    With ``with_flag=True`` returns ``(value, exact)`` where ``exact`` tells
    whether the truncation cannot have affected the value (degree <= depth).
    """
    if isinstance(x, FockOperator):
        value = complex(x.matrix[0, 0])
        exact = x.degree <= x.exact_depth
        return (value, exact) if with_flag else value
    if not isinstance(x, WordExpr):
        raise TypeError("expected FockOperator or WordExpr")
    if ops is None:
        raise ValueError("a WordExpr needs the mapping from generator names to operators")
    value, exact = 0j, True
    for word, coef in x.items():
        v, ex = evaluate_word(word, ops)
        value += coef * v
        exact = exact and ex
    return (value, exact) if with_flag else value


def evaluate_word(word, ops: Mapping[str, FockOperator]) -> Tuple[complex, bool]:
    """Vacuum moment of one word, applying letters to the vacuum right to left."""
    if not word:
        return 1.0 + 0j, True
    first = ops[word[0][0]]
    vec = first.fock.vacuum()
    degree, depth = 0, first.exact_depth
    adj_cache: Dict[str, FockOperator] = {}
    for name, dag in reversed(word):
        try:
            op = ops[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None
        if dag:
            if name not in adj_cache:
                adj_cache[name] = op.adjoint()
            op = adj_cache[name]
        vec = op.matrix @ vec
        degree += op.degree
        depth = min(depth, op.exact_depth)
    return complex(vec[0]), degree <= depth


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("bin_left,bin_right,count\n")
        for lo, hi, c in zip(self.edges[:-1], self.edges[1:], self.counts):
            buf.write(f"{lo:.17g},{hi:.17g},{int(c)}\n")
        return buf.getvalue()


def empirical_spectrum(x: FockOperator, bins: int = 50, tol: float = 1e-10) -> Histogram:
    """Eigenvalue histogram of a self-adjoint operator on the truncated space.

    The truncated spectrum only approximates the vacuum distribution;
    moments are the reliable quantity.
    """
    if not x.is_self_adjoint(tol):
        raise ValueError("empirical_spectrum needs a self-adjoint operator")
    mat = x.toarray()
    evals = np.linalg.eigvalsh((mat + mat.conj().T) / 2)
    counts, edges = np.histogram(evals, bins=bins)
    return Histogram(edges, counts)


def second_quantize(F: FockSpace, U) -> FockOperator:
    """``Gamma(U) = 1 (+) U (+) U(x)U (+) ...`` on the truncated space."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (F.d, F.d):
        raise ValueError(f"need a {F.d}x{F.d} matrix")
    blocks = [sp.csr_array(np.ones((1, 1), dtype=complex))]
    Us = sp.csr_array(U)
    cur = blocks[0]
    for _ in range(F.D):
        cur = sp.csr_array(sp.kron(Us, cur, format="csr"))
        blocks.append(cur)
    mat = sp.csr_array(sp.block_diag(blocks, format="csr"))
    if F.dense:
        mat = mat.toarray()
    return FockOperator(F, mat, F.D, 0, "Gamma")
