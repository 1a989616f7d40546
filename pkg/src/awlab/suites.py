"""Verification suites shared by the command line and the demo scripts.

Every suite returns a JSON-ready dictionary with a boolean ``pass`` entry.
"""

from __future__ import annotations

import itertools
import math
from typing import List, Optional, Sequence

import numpy as np

from . import barnett as bn
from .fock import build_fock, field, generalized_circular, semicircular_field
from .free import FockNCSpace, FreeProductSpace, check_freeness
from .laws import catalan
from .modular import FieldPoly, ModularFlow, kms_check, modular_apply, periodicity_defect
from .rep import RepSpec, direct_sum, embed
from .tla import sweep_verdict, tla_sweep
from .words import WordExpr

__all__ = [
    "semicircle_suite",
    "circular_suite",
    "freeness_suite",
    "kms_suite",
    "tla_suite",
    "barnett_suite",
    "default_kms_reps",
    "random_words",
]


def semicircle_suite(depth: int = 8) -> dict:
    """Vacuum moments of ``s(xi)``, ``||xi|| = 1``, on the one-dimensional Fock space."""
    rep = RepSpec.create(trivial_dim=1)
    F = build_fock(1, depth)
    s = semicircular_field(F, rep, [1.0])
    rows, even_err, odd_err = [], 0.0, 0.0
    vec = F.vacuum()
    for k in range(depth + 1):
        # vec = s^k Omega, so phi(s^k) = <s^k Omega, Omega>
        value = complex(vec[0]).real
        target = catalan(k // 2) / 4 ** (k // 2) if k % 2 == 0 else 0.0
        if k % 2 == 0:
            even_err = max(even_err, abs(value - target) / target)
        else:
            odd_err = max(odd_err, abs(value))
        rows.append({"k": k, "moment": value, "target": target})
        vec = s.matrix @ vec
    return {"suite": "semicircle", "depth": depth, "moments": rows,
            "max_rel_error_even": even_err, "max_abs_odd": odd_err,
            "pass": even_err <= 1e-12 and odd_err <= 1e-14}


def circular_suite(lams: Sequence[float] = (0.25, 0.5, 0.9), depth: int = 4) -> dict:
    F = build_fock(2, depth)
    rows, worst = [], 0.0
    for lam in lams:
        y = generalized_circular(F, lam, [1, 0], [0, 1])
        ysy = complex((y.adjoint() @ y).matrix[0, 0])
        yys = complex((y @ y.adjoint()).matrix[0, 0])
        err = max(abs(ysy - 1), abs(yys - lam))
        worst = max(worst, err)
        rows.append({"lambda": lam, "phi(y*y)": ysy.real, "phi(yy*)": yys.real, "error": err})
    return {"suite": "circular", "depth": depth, "rows": rows, "max_error": worst,
            "pass": worst <= 1e-12}


def random_words(letters: Sequence[str], count: int, max_len: int, seed: int,
                 star: bool = True) -> List[WordExpr]:
    """Seeded random words (coefficient 1) of length 1..max_len."""
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    for _ in range(count):
        L = int(rng.integers(1, max_len + 1))
        word = tuple((letters[int(rng.integers(len(letters)))],
                      bool(star and rng.integers(2))) for _ in range(L))
        out.append(WordExpr.from_word(word))
    return out


def freeness_setup(lam: float = 0.5, depth: int = 6):
    """Fields from the two orthogonal summands of ``(lam block) + (trivial line)``.

    Returns the joint Fock space (names ``x`` for the block field
    ``l(xi1) + l(T xi1)^*`` and ``s`` for the semicircular field of the line),
    and the free product of the two marginals, each on its own Fock space.
    """
    block, line = RepSpec.rotation(lam), RepSpec.create(trivial_dim=1)
    total, (cb, cl) = direct_sum(block, line)
    xi1 = block.spectral_vector(-math.log(lam))      # A xi1 = xi1 / lam
    zeta = np.zeros(total.dim, dtype=complex)
    zeta[cb] = xi1
    e_line = np.zeros(total.dim)
    e_line[cl] = 1.0
    F = build_fock(total.dim, depth)
    joint = FockNCSpace({"x": field(F, total, zeta), "s": semicircular_field(F, total, e_line)})
    Fb, Fl = build_fock(block.dim, depth), build_fock(1, depth)
    marg = FreeProductSpace([FockNCSpace({"x": field(Fb, block, xi1)}),
                             FockNCSpace({"s": semicircular_field(Fl, line, [1.0])})])
    return joint, marg


def freeness_suite(lam: float = 0.5, max_len: int = 6, n_random: int = 100, seed: int = 0,
                   pair_depth: int = 12) -> dict:
    """Freeness of fields from orthogonal summands, on Fock space and in the recursion."""
    joint, marg = freeness_setup(lam, max_len)
    fam = {"block": ["x"], "line": ["s"]}
    fock_rep = check_freeness(joint, fam, max_len=max_len, max_degree=1, star=True)
    rec_rep = check_freeness(marg, fam, max_len=max_len, max_degree=1, star=True)
    # two semicirculars from orthogonal trivial lines, centered squares included
    rep2 = RepSpec.create(trivial_dim=2)
    F2 = build_fock(2, pair_depth)
    pair = FockNCSpace({"s1": semicircular_field(F2, rep2, [1, 0]),
                        "s2": semicircular_field(F2, rep2, [0, 1])})
    pair_rep = check_freeness(pair, {"A": ["s1"], "B": ["s2"]}, max_len=max_len,
                              max_degree=2)
    words = random_words(["x", "s"], n_random, max_len, seed)
    diffs = [abs(joint.state(w) - marg.state(w)) for w in words]
    cross = max(diffs) if diffs else 0.0
    ok = (fock_rep.passed and rec_rep.passed and rec_rep.max_residual == 0.0
          and pair_rep.passed and cross <= 1e-10)
    return {"suite": "freeness", "lambda": lam, "max_len": max_len,
            "fock": fock_rep.to_json(), "recursion": rec_rep.to_json(),
            "semicircular_pair": pair_rep.to_json(),
            "cross_check": {"words": n_random, "seed": seed, "max_diff": cross},
            "pass": ok}


def default_kms_reps() -> List[RepSpec]:
    return [RepSpec.create(trivial_dim=2), RepSpec.rotation(0.5),
            RepSpec.create(0, [(math.log(2), 1), (math.log(3), 1)])]


def kms_suite(reps: Optional[Sequence[RepSpec]] = None, depth: int = 4,
              t_grid: Sequence[float] = (-1.0, -0.5, 0.0, 0.5, 1.0), period_lam: float = 0.5
              ) -> dict:
    """Covariance, KMS for all pairs of basis fields and their quadratic products, periodicity."""
    reps = default_kms_reps() if reps is None else list(reps)
    out_reps, ok = [], True
    for rep in reps:
        flow = ModularFlow(rep, depth=depth)
        d = rep.dim
        basis = np.eye(d)
        # s(e_i) = x(embed(e_i) / 2)
        fields = [FieldPoly.single(f"s{i + 1}", embed(rep, basis[i]) / 2) for i in range(d)]
        cov = 0.0
        for i in range(d):
            s = semicircular_field(flow.fock, rep, basis[i])
            for t in t_grid:
                st = semicircular_field(flow.fock, rep, rep.U(t) @ basis[i])
                cov = max(cov, modular_apply(flow, s, t).max_abs_diff(st))
        kms, count, cache = 0.0, 0, {}
        for x, y in itertools.product(fields, repeat=2):
            kms = max(kms, kms_check(flow, x, y, t_grid, cache).max_residual)
            count += 1
        quads = [a * b for a, b in itertools.product(fields, repeat=2)]
        for x, y in itertools.product(quads, repeat=2):
            kms = max(kms, kms_check(flow, x, y, t_grid, cache).max_residual)
            count += 1
        passed = cov <= 1e-12 and kms <= 1e-9
        ok = ok and passed
        out_reps.append({"rep": rep.to_json(), "covariance_error": cov, "kms_residual": kms,
                         "pairs": count, "pass": passed})
    flow = ModularFlow(RepSpec.rotation(period_lam), depth=depth)
    period = 2 * math.pi / abs(math.log(period_lam))
    per = periodicity_defect(flow, period)
    ok = ok and per <= 1e-10
    return {"suite": "kms", "depth": depth, "t_grid": list(t_grid), "reps": out_reps,
            "periodicity": {"lambda": period_lam, "period": period, "defect": per},
            "pass": ok}


def tla_suite(lam: float = 0.5, depths: Sequence[int] = tuple(range(6, 13))) -> dict:
    reports = tla_sweep(lam, depths)
    verdict = sweep_verdict(reports)
    return {"suite": "tla", "lambda": lam, "verdict": verdict,
            "reports": [r.to_json() for r in reports], "pass": verdict["pass"]}


def barnett_suite(seed: int = 7, samples: int = 200, lam: float = 0.5) -> dict:
    out, ok = [], True
    for setup in (bn.tracial_setup(), bn.modular_setup(lam)):
        xs = bn.random_polynomials(setup, samples, seed)
        rep = bn.barnett_check(setup, xs)
        ok = ok and rep.passed
        doc = rep.to_json()
        out.append({"setup": doc["setup"], "constants": doc["constants"],
                    "summary": doc["summary"]})
    E_unit = bn.ef_consts(bn.tracial_setup()).E
    ok = ok and E_unit == 14.0
    return {"suite": "barnett", "seed": seed, "samples": samples, "lambda": lam,
            "setups": out, "E_unit": E_unit,
            "min_margin": min(s["summary"]["min_margin"] for s in out), "pass": ok}
