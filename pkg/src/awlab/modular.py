"""Modular group of the vacuum state, analytic continuation and KMS checks.

The modular group acts by second quantization, ``sigma_t = Ad Gamma(A^{it})``.
Complex parameters are handled only on polynomials in the fields
``x(zeta) = l(zeta) + l(T zeta)^*`` by substitution letter by letter,

    sigma_z(x(zeta)) = l(A^{iz} zeta) + l(A^{i conj(z)} T zeta)^*,

which agrees with ``Ad Gamma(A^{it})`` for real ``z = t``.  Since ``T`` is an
involution, ``x(zeta)^* = x(T zeta)``, so adjoints of fields are fields again.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .fock import FockOperator, FockSpace, build_fock, creation, field, second_quantize
from .rep import RepSpec, involution_apply
from .words import WordExpr

__all__ = [
    "ModularFlow",
    "FieldPoly",
    "modular_apply",
    "analytic_field",
    "kms_check",
    "almost_eigen",
    "periodicity_defect",
    "DEFAULT_T_GRID",
    "DEFAULT_Z_GRID",
]

DEFAULT_T_GRID = (-1.0, -0.5, 0.0, 0.5, 1.0)
DEFAULT_Z_GRID = tuple(complex(a, b) for a in np.arange(-1, 1.0001, 0.25)
                       for b in np.arange(-1, 1.0001, 0.25))


class ModularFlow:
    """``sigma_t`` on a truncated Fock space over the complexification of ``rep``."""

    def __init__(self, rep: RepSpec, fock: Optional[FockSpace] = None, depth: int = 4):
        self.rep = rep
        self.fock = fock if fock is not None else build_fock(rep.dim, depth)
        if self.fock.d != rep.dim:
            raise ValueError(f"Fock space over C^{self.fock.d} does not match "
                             f"representation dimension {rep.dim}")

    def gamma(self, t: float) -> FockOperator:
        """``Gamma(A^{it})``."""
        return second_quantize(self.fock, self.rep.A_power(1j * t))

    def field(self, zeta) -> FockOperator:
        return field(self.fock, self.rep, zeta)


def modular_apply(flow: ModularFlow, x: FockOperator, t: float) -> FockOperator:
    """``Gamma(A^{it}) x Gamma(A^{it})^*``."""
    if x.fock.total_dim != flow.fock.total_dim or x.fock.d != flow.fock.d:
        raise ValueError("operator does not live on the flow's Fock space")
    g = flow.gamma(t)
    out = g @ x @ g.adjoint()
    return FockOperator(x.fock, out.matrix, x.exact_depth, x.degree, f"sigma_{t:g}({x.label})")


def analytic_field(flow: ModularFlow, zeta, z: complex) -> FockOperator:
    """``sigma_z`` of the field ``l(zeta) + l(T zeta)^*``."""
    F, rep = flow.fock, flow.rep
    zeta = np.asarray(zeta, dtype=complex)
    tz = involution_apply(rep, zeta, "T")
    z = complex(z)
    left = creation(F, rep.A_power(1j * z) @ zeta)
    right = creation(F, rep.A_power(1j * z.conjugate()) @ tz, adjoint=True)
    out = left + right
    return FockOperator(F, out.matrix, F.D, 1, "x_z")


@dataclass
class FieldPoly:
    """A polynomial in fields: a :class:`WordExpr` plus the vector behind each name.

    The letter ``(name, False)`` is ``x(zeta)`` and ``(name, True)`` its adjoint
    ``x(T zeta)``.
    """

    expr: WordExpr
    vectors: Mapping[str, np.ndarray]
    label: str = ""

    @classmethod
    def single(cls, name: str, zeta) -> "FieldPoly":
        return cls(WordExpr.gen(name), {name: np.asarray(zeta, dtype=complex)}, name)

    def __mul__(self, other: "FieldPoly") -> "FieldPoly":
        vecs = dict(self.vectors)
        vecs.update(other.vectors)
        return FieldPoly(self.expr * other.expr, vecs, f"{self.label} {other.label}".strip())

    @property
    def degree(self) -> int:
        return self.expr.degree

    def _letter_ops(self, flow: ModularFlow, z: complex, cache: Optional[dict] = None
                    ) -> Dict[Tuple[str, bool], FockOperator]:
        cache = {} if cache is None else cache
        out = {}
        for name, dag in {l for w, _ in self.expr.items() for l in w}:
            key = (name, dag, complex(z), self.vectors[name].tobytes())
            if key not in cache:
                zeta = self.vectors[name]
                if dag:
                    zeta = involution_apply(flow.rep, zeta, "T")
                cache[key] = analytic_field(flow, zeta, z)
            out[(name, dag)] = cache[key]
        return out

    def realize(self, flow: ModularFlow, z: complex = 0.0) -> FockOperator:
        """Matrix of ``sigma_z`` applied to the polynomial."""
        F = flow.fock
        ops = self._letter_ops(flow, z)
        out = F.zero()
        for word, c in self.expr.items():
            term = F.identity()
            for letter in word:
                term = term @ ops[letter]
            out = out + term * c
        return FockOperator(F, out.matrix, F.D, max(self.degree, 0), self.label)

    def apply(self, flow: ModularFlow, vec: np.ndarray, z: complex = 0.0,
              cache: Optional[dict] = None) -> np.ndarray:
        """``sigma_z(p) vec`` by matrix-vector products, letters applied right to left."""
        ops = self._letter_ops(flow, z, cache)
        out = np.zeros_like(vec, dtype=complex)
        for word, c in self.expr.items():
            v = vec
            for letter in reversed(word):
                v = ops[letter].matrix @ v
            out = out + c * v
        return out


@dataclass
class KmsReport:
    rep: dict
    operators: List[str]
    grid: List[float]
    max_residual: float
    per_point: List[dict]

    @property
    def passed(self) -> bool:
        return self.max_residual <= 1e-9

    def to_json(self) -> dict:
        return {"rep": self.rep, "operators": self.operators, "grid": self.grid,
                "max_residual": self.max_residual, "per_point": self.per_point}


def kms_check(flow: ModularFlow, x: FieldPoly, y: FieldPoly,
              t_grid: Sequence[float] = DEFAULT_T_GRID, cache: Optional[dict] = None
              ) -> KmsReport:
    """Compare ``f(t + i) = phi(x sigma_{t+i}(y))`` with ``phi(sigma_t(y) x)``.

    ``cache`` may be shared between calls on the same flow to reuse the
    continued field operators.
    """
    if x.degree + y.degree > flow.fock.D:
        raise ValueError(f"total degree {x.degree + y.degree} exceeds the truncation depth "
                         f"{flow.fock.D}; vacuum moments would not be exact")
    omega = flow.fock.vacuum()
    cache = {} if cache is None else cache
    x_omega = x.apply(flow, omega, 0.0, cache)
    points, worst = [], 0.0
    for t in t_grid:
        # phi(x sigma_{t+i}(y)) and phi(sigma_t(y) x), both read off at the vacuum
        f_shift = complex(x.apply(flow, y.apply(flow, omega, complex(t, 1.0), cache), 0.0, cache)[0])
        g = complex(y.apply(flow, x_omega, complex(t, 0.0), cache)[0])
        res = abs(f_shift - g)
        worst = max(worst, res)
        points.append({"t": float(t), "f(t+i)": [f_shift.real, f_shift.imag],
                       "phi(sigma_t(y)x)": [g.real, g.imag], "residual": res})
    return KmsReport(flow.rep.to_json(), [x.label, y.label], [float(t) for t in t_grid],
                     worst, points)


def _op_norm(op: FockOperator) -> float:
    return float(np.linalg.norm(op.toarray(), 2))


@dataclass
class EigenReport:
    theta: float
    lam: float
    max_defect: float
    grid: List[List[float]]
    per_point: List[dict]

    def to_json(self) -> dict:
        return {"theta": self.theta, "lambda": self.lam, "max_residual": self.max_defect,
                "grid": self.grid, "per_point": self.per_point}


def almost_eigen(flow: ModularFlow, theta_target: float, window: float = 1e-9,
                 z_grid: Sequence[complex] = DEFAULT_Z_GRID) -> Tuple[FockOperator, EigenReport]:
    """Field of a spectral vector of ``A`` near ``exp(theta_target)`` and its eigen-defect.

    The defect is ``sup_z ||sigma_z(x) - lam^{iz} x||`` (operator norm) with
    ``lam = exp(theta_target)``.
    """
    xi = flow.rep.spectral_vector(theta_target, tol=window)
    if xi is None:
        raise ValueError(f"no eigenvalue of A within {window:g} of exp({theta_target:g})")
    xi = xi / np.linalg.norm(xi)
    x = flow.field(xi)
    lam = math.exp(theta_target)
    points, worst = [], 0.0
    for z in z_grid:
        z = complex(z)
        diff = analytic_field(flow, xi, z) - x * (lam ** (1j * z))
        d = _op_norm(diff)
        worst = max(worst, d)
        points.append({"z": [z.real, z.imag], "defect": d})
    report = EigenReport(theta_target, lam, worst, [[complex(z).real, complex(z).imag]
                                                     for z in z_grid], points)
    return x, report


def periodicity_defect(flow: ModularFlow, period: float) -> float:
    """``max |Gamma(A^{i period}) - 1|`` entrywise."""
    return flow.gamma(period).max_abs_diff(flow.fock.identity())


def report_json(report) -> str:
    return json.dumps(report.to_json(), sort_keys=True)
