"""Orthogonal one-parameter groups on finite-dimensional real Hilbert spaces.

A representation is stored through its spectral data: a trivial part of
dimension ``trivial_dim`` on which ``U_t`` is the identity, and rotation
blocks.  A block of frequency ``theta > 0`` acts on a real plane as the
rotation by angle ``t * theta``.  On the complexification the generator ``A``
(``U_t = A^{it}``) has the orthonormal eigenvectors

    xi_1 = (1, -i) / sqrt(2)   with  A xi_1 = e^{theta}  xi_1,
    xi_2 = (1,  i) / sqrt(2)   with  A xi_2 = e^{-theta} xi_2,

so every block contributes the pair ``{e^theta, e^-theta}`` and the complex
conjugation ``J`` swaps the two eigenvectors (``J A J = A^{-1}``).

Real coordinates are laid out as ``trivial_dim`` fixed coordinates followed
by one coordinate pair per block copy, in the order the blocks are listed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "RepSpecError",
    "Frequency",
    "Block",
    "RepSpec",
    "SpectralData",
    "TypeLabel",
    "parse_rep_spec",
    "generator_spectrum",
    "embed",
    "involution_apply",
    "classify",
    "direct_sum",
    "COMMENSURABILITY_TOL",
]

COMMENSURABILITY_TOL = 1e-9
_MAX_DENOMINATOR = 10_000
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class RepSpecError(ValueError):
    """Invalid representation data.  ``code`` is a short machine-readable tag."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Frequency:
    """A positive frequency, either a float or ``(num/den) * ln(log_base)``."""

    value: float
    ratio: Optional[Fraction] = None
    log_base: Optional[float] = None

    @classmethod
    def exact(cls, num: int, den: int, log_base: float) -> "Frequency":
        ratio = Fraction(int(num), int(den))
        return cls(float(ratio) * math.log(log_base), ratio, float(log_base))

    @property
    def is_exact(self) -> bool:
        return self.ratio is not None

    def same_as(self, other: "Frequency") -> bool:
        if self.is_exact and other.is_exact and self.log_base == other.log_base:
            return self.ratio == other.ratio
        return math.isclose(self.value, other.value, rel_tol=1e-12, abs_tol=0.0)

    def to_json(self):
        if self.is_exact:
            return {"num": self.ratio.numerator, "den": self.ratio.denominator,
                    "log_base": self.log_base}
        return self.value


@dataclass(frozen=True)
class Block:
    frequency: Frequency
    multiplicity: int

    @property
    def theta(self) -> float:
        return self.frequency.value


@dataclass(frozen=True)
class RepSpec:
    """Finite spectral description of an orthogonal representation of R.

    Build instances with :meth:`RepSpec.create` or :func:`parse_rep_spec`;
    both validate and merge repeated frequencies.
    """

    trivial_dim: int
    blocks: Tuple[Block, ...] = ()
    declared_continuous: bool = False
    declared_type: Optional[str] = None

    @classmethod
    def create(cls, trivial_dim: int, blocks: Sequence = (), *,
               declared_continuous: bool = False,
               declared_type: Optional[str] = None) -> "RepSpec":
        """Validate and normalise.

        ``blocks`` holds ``(frequency, multiplicity)`` pairs where the
        frequency is a float or a :class:`Frequency`.
        """
        if isinstance(trivial_dim, bool) or not isinstance(trivial_dim, (int, np.integer)):
            raise RepSpecError("malformed", "trivial_dim must be an integer")
        if trivial_dim < 0:
            raise RepSpecError("malformed", "trivial_dim must be non-negative")
        merged: List[Block] = []
        for item in blocks:
            if isinstance(item, Block):
                freq, mult = item.frequency, item.multiplicity
            else:
                freq, mult = item
            if not isinstance(freq, Frequency):
                freq = Frequency(float(freq))
            if not math.isfinite(freq.value) or freq.value <= 0:
                raise RepSpecError("non_positive_frequency",
                                   f"block frequency must be positive, got {freq.value}")
            if isinstance(mult, bool) or int(mult) != mult or mult < 1:
                raise RepSpecError("malformed", f"multiplicity must be a positive integer, got {mult}")
            for k, blk in enumerate(merged):
                if blk.frequency.same_as(freq):
                    merged[k] = Block(blk.frequency, blk.multiplicity + int(mult))
                    break
            else:
                merged.append(Block(freq, int(mult)))
        rep = cls(int(trivial_dim), tuple(merged), bool(declared_continuous), declared_type)
        if rep.dim == 0:
            raise RepSpecError("zero_dimension", "representation has zero total dimension")
        return rep

    @classmethod
    def rotation(cls, lam: float, trivial_dim: int = 0) -> "RepSpec":
        """The rotation block with ``lambda = exp(-theta)`` in (0, 1)."""
        if not 0 < lam < 1:
            raise RepSpecError("malformed", "lambda must lie in (0, 1)")
        return cls.create(trivial_dim, [(-math.log(lam), 1)])

    @property
    def dim(self) -> int:
        """Real dimension of H_R (= complex dimension of H)."""
        return self.trivial_dim + 2 * sum(b.multiplicity for b in self.blocks)

    @property
    def thetas(self) -> Tuple[float, ...]:
        return tuple(b.theta for b in self.blocks)

    def is_trivial(self) -> bool:
        return not self.blocks

    def block_slices(self) -> List[Tuple[float, int]]:
        """``(theta, offset)`` for every block copy, offset into real coordinates."""
        out = []
        pos = self.trivial_dim
        for blk in self.blocks:
            for _ in range(blk.multiplicity):
                out.append((blk.theta, pos))
                pos += 2
        return out

    def to_json(self) -> dict:
        doc = {"trivial_dim": self.trivial_dim,
               "blocks": [{"frequency": b.frequency.to_json(), "multiplicity": b.multiplicity}
                          for b in self.blocks]}
        if self.declared_continuous:
            doc["declared_continuous"] = True
        if self.declared_type is not None:
            doc["declared_type"] = self.declared_type
        return doc

    # spectral machinery, cached per instance

    @cached_property
    def _eig(self) -> Tuple[np.ndarray, np.ndarray]:
        n = self.dim
        V = np.zeros((n, n), dtype=complex)
        logs = np.zeros(n)
        V[: self.trivial_dim, : self.trivial_dim] = np.eye(self.trivial_dim)
        for theta, pos in self.block_slices():
            V[pos, pos] = _INV_SQRT2
            V[pos + 1, pos] = -1j * _INV_SQRT2
            V[pos, pos + 1] = _INV_SQRT2
            V[pos + 1, pos + 1] = 1j * _INV_SQRT2
            logs[pos] = theta
            logs[pos + 1] = -theta
        V.setflags(write=False)
        logs.setflags(write=False)
        return V, logs

    @property
    def eigvecs(self) -> np.ndarray:
        """Unitary whose columns are A-eigenvectors (xi_1, xi_2 per block)."""
        return self._eig[0]

    @property
    def log_eigvals(self) -> np.ndarray:
        """log of the A-eigenvalue for each column of :attr:`eigvecs`."""
        return self._eig[1]

    def function_of_A(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Matrix of ``f(A)`` where ``f`` acts on the eigenvalue array."""
        V, logs = self._eig
        vals = np.asarray(f(np.exp(logs)), dtype=complex)
        return (V * vals) @ V.conj().T

    def A_power(self, s: complex) -> np.ndarray:
        """``A^s`` for complex ``s`` (``A^{it}`` is the unitary ``U_t``)."""
        V, logs = self._eig
        return (V * np.exp(complex(s) * logs)) @ V.conj().T

    def U(self, t: float) -> np.ndarray:
        """Real orthogonal matrix U_t acting on H_R."""
        n = self.dim
        out = np.eye(n)
        for theta, pos in self.block_slices():
            c, s = math.cos(t * theta), math.sin(t * theta)
            out[pos:pos + 2, pos:pos + 2] = [[c, -s], [s, c]]
        return out

    def spectral_vector(self, log_value: float, tol: float = 1e-12) -> Optional[np.ndarray]:
        """A unit eigenvector of A with eigenvalue ``exp(log_value)``, if any."""
        V, logs = self._eig
        idx = np.flatnonzero(np.abs(logs - log_value) <= tol)
        if idx.size == 0:
            return None
        return V[:, idx[0]].copy()


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues of A with multiplicities, stored through their logarithms."""

    log_pairs: Tuple[Tuple[float, int], ...]

    @property
    def eigen_pairs(self) -> List[Tuple[float, int]]:
        return [(math.exp(lv), m) for lv, m in self.log_pairs]

    def as_dict(self) -> dict:
        return {math.exp(lv): m for lv, m in self.log_pairs}

    def is_inversion_symmetric(self) -> bool:
        table = {}
        for lv, m in self.log_pairs:
            table[lv] = table.get(lv, 0) + m
        return all(table.get(-lv, 0) == m for lv, m in table.items())


@dataclass(frozen=True)
class TypeLabel:
    """Factor type of the free Araki-Woods algebra of a representation.

    ``kind`` is one of ``NonFactor_dim1``, ``II_1``, ``III_lambda``, ``III_1``.
    ``s_invariant`` lists generators ``e^{theta_j}`` of the multiplicative
    group spanned by the point spectrum.  ``method`` records how
    commensurability of frequencies was decided.
    """

    kind: str
    lam: Optional[float] = None
    s_invariant: Tuple[float, ...] = ()
    almost_periodic: bool = True
    period: Optional[float] = None
    method: str = "none"
    declared_type: Optional[str] = None

    def to_json(self) -> dict:
        doc = {"type": self.kind,
               "s_invariant": [format_number(g) for g in self.s_invariant],
               "almost_periodic": self.almost_periodic,
               "commensurability": self.method}
        if self.lam is not None:
            doc["lambda"] = _clean_float(self.lam)
            doc["period"] = _clean_float(self.period)
        if self.declared_type is not None:
            doc["declared_type"] = self.declared_type
        return doc


def format_number(x: float) -> str:
    return f"{x:.12g}"


def _clean_float(x: float) -> float:
    # strip representation noise such as 0.5000000000000001
    return float(f"{x:.14g}")


# parsing


def _parse_frequency(raw) -> Frequency:
    if isinstance(raw, bool):
        raise RepSpecError("malformed", "frequency must be a number or an exact triple")
    if isinstance(raw, (int, float)):
        return Frequency(float(raw))
    if isinstance(raw, dict):
        try:
            num, den, base = raw["num"], raw["den"], raw["log_base"]
        except KeyError as exc:
            raise RepSpecError("malformed", f"exact frequency missing key {exc}") from None
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (num, den)):
            raise RepSpecError("malformed", "num and den must be integers")
        if den == 0:
            raise RepSpecError("malformed", "den must be non-zero")
        if not isinstance(base, (int, float)) or base <= 0 or base == 1:
            raise RepSpecError("malformed", "log_base must be a positive number other than 1")
        freq = Frequency.exact(num, den, base)
        if freq.value <= 0:
            raise RepSpecError("non_positive_frequency",
                               f"block frequency must be positive, got {freq.value}")
        return freq
    raise RepSpecError("malformed", f"cannot read frequency {raw!r}")


def parse_rep_spec(document) -> RepSpec:
    """Read a representation document (JSON text, bytes or an already-decoded dict).

    Schema::

        {"trivial_dim": int,
         "blocks": [{"frequency": float | {"num": int, "den": int, "log_base": float},
                     "multiplicity": int}],
         "declared_continuous": bool,      # optional
         "declared_type": str}             # optional, reported verbatim
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise RepSpecError("malformed", f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise RepSpecError("malformed", "representation document must be a JSON object")
    unknown = set(document) - {"trivial_dim", "blocks", "declared_continuous", "declared_type"}
    if unknown:
        raise RepSpecError("malformed", f"unknown keys: {sorted(unknown)}")
    trivial_dim = document.get("trivial_dim", 0)
    raw_blocks = document.get("blocks", [])
    if not isinstance(raw_blocks, list):
        raise RepSpecError("malformed", "blocks must be a list")
    blocks = []
    for entry in raw_blocks:
        if not isinstance(entry, dict) or "frequency" not in entry:
            raise RepSpecError("malformed", f"bad block entry {entry!r}")
        mult = entry.get("multiplicity", 1)
        if isinstance(mult, bool) or not isinstance(mult, int):
            raise RepSpecError("malformed", "multiplicity must be an integer")
        blocks.append((_parse_frequency(entry["frequency"]), mult))
    declared = document.get("declared_continuous", False)
    if not isinstance(declared, bool):
        raise RepSpecError("malformed", "declared_continuous must be a boolean")
    declared_type = document.get("declared_type")
    if declared_type is not None and not isinstance(declared_type, str):
        raise RepSpecError("malformed", "declared_type must be a string")
    return RepSpec.create(trivial_dim, blocks, declared_continuous=declared,
                          declared_type=declared_type)


def direct_sum(*reps: RepSpec) -> Tuple[RepSpec, List[np.ndarray]]:
    """Direct sum of representations.

    Returns the summed representation and, for every summand, the indices of
    its real coordinates inside the sum (blocks with equal frequencies are
    merged, so coordinates are interleaved rather than concatenated).
    """
    total = RepSpec.create(sum(r.trivial_dim for r in reps),
                           [b for r in reps for b in r.blocks])
    coords: List[List[int]] = [[] for _ in reps]
    pos = 0
    for k, r in enumerate(reps):
        coords[k].extend(range(pos, pos + r.trivial_dim))
        pos += r.trivial_dim
    for blk in total.blocks:
        for k, r in enumerate(reps):
            for own in r.blocks:
                if own.frequency.same_as(blk.frequency):
                    for _ in range(own.multiplicity):
                        coords[k].extend((pos, pos + 1))
                        pos += 2
    return total, [np.array(c, dtype=int) for c in coords]


# spectral operations


def generator_spectrum(rep: RepSpec) -> SpectralData:
    pairs = []
    if rep.trivial_dim:
        pairs.append((0.0, rep.trivial_dim))
    for blk in rep.blocks:
        pairs.append((blk.theta, blk.multiplicity))
        pairs.append((-blk.theta, blk.multiplicity))
    return SpectralData(tuple(pairs))


def _check_dim(rep: RepSpec, vec) -> np.ndarray:
    vec = np.asarray(vec)
    if vec.shape != (rep.dim,):
        raise RepSpecError("dimension_mismatch",
                           f"expected a vector of length {rep.dim}, got shape {vec.shape}")
    return vec


def embed(rep: RepSpec, xi) -> np.ndarray:
    """Isometric embedding of H_R into H, ``xi -> (2 / (A^{-1} + 1))^{1/2} xi``."""
    xi = _check_dim(rep, xi)
    if np.iscomplexobj(xi):
        if np.any(xi.imag != 0):
            raise RepSpecError("malformed", "embed expects a real vector of H_R")
        xi = xi.real
    K = rep.function_of_A(lambda a: np.sqrt(2.0 * a / (1.0 + a)))
    return K @ xi.astype(float)


def involution_apply(rep: RepSpec, zeta, which="T") -> np.ndarray:
    """Apply ``T = J A^{-1/2}``, the conjugation ``J``, or a power of ``A``.

    ``which`` is ``"T"``, ``"J"`` or ``("A", s)`` for ``A^s`` with complex
    ``s``; ``("A", 1j * t)`` is the unitary ``U_t``.
    """
    zeta = _check_dim(rep, zeta).astype(complex)
    if which == "J":
        return zeta.conj()
    if which == "T":
        return (rep.A_power(-0.5) @ zeta).conj()
    if isinstance(which, tuple) and len(which) == 2 and which[0] == "A":
        return rep.A_power(which[1]) @ zeta
    raise ValueError(f"unknown operator {which!r}")


# classification


def _fraction_gcd(values: Sequence[Fraction]) -> Fraction:
    num = reduce(math.gcd, (v.numerator for v in values))
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in values))
    return Fraction(num, den)


def _common_unit(freqs: Sequence[Frequency], tol: float) -> Tuple[Optional[float], str]:
    """Largest theta* with every frequency an integer multiple of it, or None."""
    bases = {f.log_base for f in freqs}
    if all(f.is_exact for f in freqs) and len(bases) == 1:
        unit = _fraction_gcd([f.ratio for f in freqs])
        return float(unit) * math.log(bases.pop()), "exact"
    thetas = [f.value for f in freqs]
    tmin = min(thetas)
    approx = []
    for th in thetas:
        r = th / tmin
        q = Fraction(r).limit_denominator(_MAX_DENOMINATOR)
        if abs(r - float(q)) > tol * max(1.0, r):
            return None, f"tolerance({tol:g})"
        approx.append(q)
    unit = _fraction_gcd(approx)
    return float(unit) * tmin, f"tolerance({tol:g})"


def classify(rep: RepSpec, tol: float = COMMENSURABILITY_TOL) -> TypeLabel:
    """Type of the free Araki-Woods algebra attached to ``rep``.

    Dimension one gives the abelian algebra of a single semicircular element;
    a trivial representation of dimension at least two gives II_1; all
    frequencies multiples of a common unit ``theta*`` give III_lambda with
    ``lambda = exp(-theta*)``; anything else is III_1.
    """
    gens = tuple(sorted(math.exp(t) for t in rep.thetas))
    common = dict(s_invariant=gens, almost_periodic=not rep.declared_continuous,
                  declared_type=rep.declared_type)
    if rep.dim == 1:
        return TypeLabel("NonFactor_dim1", **common)
    if rep.is_trivial():
        return TypeLabel("II_1", **common)
    unit, method = _common_unit([b.frequency for b in rep.blocks], tol)
    if unit is None:
        return TypeLabel("III_1", method=method, **common)
    return TypeLabel("III_lambda", lam=math.exp(-unit), period=2 * math.pi / unit,
                     method=method, **common)
