"""Polar decomposition of the generalized circular element at finite depth.

``y = l(e0) + sqrt(lam) l(e1)^*`` raises the charge ``#0 - #1`` of a basis word
by exactly one, so ``y`` is block diagonal between charge sectors and its
singular value decomposition splits sector by sector.

Truncation: ``y`` is taken as the map from the depth-``D`` space into the
depth-``D+1`` space (its columns are never cut).  Then ``Y^* Y`` is the exact
compression of ``y^* y`` to depth ``D`` and ``Y`` is injective, so the polar
part ``v`` is an honest isometry on the truncated space.  Cutting ``y`` to a
square matrix on depth ``D`` instead makes the top level collapse and the
moment defects oscillate with the parity of ``D``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .fock import Histogram, build_fock, generalized_circular

__all__ = ["TlaReport", "polar_tla", "tla_sweep", "sweep_verdict", "word_charges", "KERNEL_TOL"]

KERNEL_TOL = 1e-10
TABLE_K = 3


def word_charges(D: int) -> np.ndarray:
    """``#0 - #1`` for every basis word of the depth-``D`` Fock space over C^2."""
    out = [np.zeros(1, dtype=np.int64)]
    for n in range(1, D + 1):
        idx = np.arange(2 ** n, dtype=np.int64)
        ones = np.zeros_like(idx)
        for bit in range(n):
            ones += (idx >> bit) & 1
        out.append(n - 2 * ones)
    return np.concatenate(out)


@dataclass
class _Sector:
    rows: np.ndarray   # indices in depth D+1
    cols: np.ndarray   # indices in depth D
    U: np.ndarray
    s: np.ndarray
    W: np.ndarray      # columns span the supported subspace


@dataclass
class TlaReport:
    lam: float
    depth: int
    table: np.ndarray
    b_distribution: Histogram
    isometry_defect: float
    min_singular: float
    kernel_dim: int
    diagnostics: Dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "depth": self.depth,
            "table": self.table.tolist(),
            "isometry_defect": self.isometry_defect,
            "min_singular": self.min_singular,
            "kernel_dim": self.kernel_dim,
            "b_distribution": {"edges": self.b_distribution.edges.tolist(),
                               "counts": self.b_distribution.counts.tolist()},
            "diagnostics": self.diagnostics,
        }

    def to_csv_rows(self) -> List[str]:
        K = self.table.shape[0]
        return [f"{k},{l},{self.depth},{self.table[k, l]:.17g}"
                for k in range(K) for l in range(K)]


class _TruncatedPolar:
    def __init__(self, lam: float, D: int, tol: float):
        G = build_fock(2, D + 1, dense=False)
        self.N = build_fock(2, D, dense=False).total_dim
        self.M = G.total_dim
        y = generalized_circular(G, lam, [1.0, 0.0], [0.0, 1.0]).matrix.tocsc()[:, : self.N]
        y = y.tocsr()
        charge = word_charges(D + 1)
        self.sectors: List[_Sector] = []
        for c in np.unique(charge[: self.N]):
            cols = np.flatnonzero(charge[: self.N] == c)
            rows = np.flatnonzero(charge == c + 1)
            block = y[rows][:, cols].toarray()
            try:
                U, s, Wh = np.linalg.svd(block, full_matrices=False)
            except np.linalg.LinAlgError as exc:
                raise RuntimeError(f"SVD failed in charge sector {c}") from exc
            keep = s > tol
            self.sectors.append(_Sector(rows, cols, U[:, keep], s, Wh[keep].conj().T))

    def v(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(self.M, dtype=complex)
        for sec in self.sectors:
            out[sec.rows] += sec.U @ (sec.W.conj().T @ x[sec.cols])
        return out

    def v_star(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros(self.N, dtype=complex)
        for sec in self.sectors:
            out[sec.cols] += sec.W @ (sec.U.conj().T @ z[sec.rows])
        return out

    def b(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(self.N, dtype=complex)
        for sec in self.sectors:
            k = sec.W.shape[1]
            out[sec.cols] += sec.W @ (sec.s[:k] * (sec.W.conj().T @ x[sec.cols]))
        return out

    def pad(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(self.M, dtype=complex)
        out[: self.N] = x
        return out


def polar_tla(lam: float, depth: int, bins: int = 40, tol: float = KERNEL_TOL) -> TlaReport:
    """Moment defects of the polar part ``v`` of ``y = v b`` at depth ``depth``.

    ``table[k, l] = |phi(v^k (v^*)^l) - delta_kl lam^k|`` for ``k, l <= 3``.
    """
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    if depth < 4:
        raise ValueError("depth must be at least 4")
    P = _TruncatedPolar(lam, depth, tol)

    # (v^*)^l Omega for l = 0..K, each a vector of the depth-D space
    vecs = [np.zeros(P.N, dtype=complex)]
    vecs[0][0] = 1.0
    for _ in range(TABLE_K):
        vecs.append(P.v_star(P.pad(vecs[-1])))
    K = TABLE_K + 1
    table = np.zeros((K, K))
    for k in range(K):
        for l in range(K):
            # phi(v^k v*^l) = <v*^l Omega, v*^k Omega>
            target = lam ** k if k == l else 0.0
            table[k, l] = abs(np.vdot(vecs[k], vecs[l]) - target)

    svals = np.concatenate([sec.s for sec in P.sectors])
    defect = 0.0
    for sec in P.sectors:
        k = sec.U.shape[1]
        if k:
            defect = max(defect, np.linalg.norm(sec.U.conj().T @ sec.U - np.eye(k), 2))
    kernel = int(sum(len(sec.cols) - sec.W.shape[1] for sec in P.sectors))
    counts, edges = np.histogram(svals, bins=bins)
    return TlaReport(lam, depth, table, Histogram(edges, counts), float(defect),
                     float(svals.min()), kernel, _freeness_diagnostics(P))


def _freeness_diagnostics(P: _TruncatedPolar) -> Dict[str, float]:
    # alternating words in v and the centered b; zero if (v, b) are *-free
    omega = np.zeros(P.N, dtype=complex)
    omega[0] = 1.0
    phi_b = P.b(omega)[0].real

    def b0(x):
        return P.b(x) - phi_b * x

    vo = P.v(omega)
    w1 = P.v_star(P.pad(b0(vo[: P.N])))            # v* b0 v Omega
    w2 = P.v(b0(P.v_star(P.pad(b0(omega)))))        # v b0 v* b0 Omega
    return {"phi(b)": float(phi_b),
            "|phi(v* b0 v)|": float(abs(w1[0])),
            "|phi(v b0 v* b0)|": float(abs(w2[0]))}


def tla_sweep(lam: float, depths: Sequence[int]) -> List[TlaReport]:
    return [polar_tla(lam, D) for D in depths]


def sweep_verdict(reports: Sequence[TlaReport], factor: float = 2.0, floor: float = 1e-3
                  ) -> Dict[str, object]:
    """Monotone decrease of every entry plus a final improvement check."""
    tables = np.stack([r.table for r in reports])
    diffs = np.diff(tables, axis=0)
    monotone = bool(np.all(diffs <= 1e-13))
    first, last = tables[0], tables[-1]
    improved = bool(np.all((last <= first / factor) | (last < floor)))
    return {"depths": [r.depth for r in reports], "monotone": monotone,
            "improved": improved, "pass": monotone and improved,
            "first": first.tolist(), "last": last.tolist()}


def reports_json(reports: Sequence[TlaReport]) -> str:
    return json.dumps([r.to_json() for r in reports], sort_keys=True)
