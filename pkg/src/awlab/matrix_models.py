"""Random matrix models: GUE and complex Ginibre ensembles.

Randomness comes from numpy's Philox counter-based generator.  Sample ``s``
of stream ``k`` under seed ``seed`` uses the key ``SeedSequence(seed,
spawn_key=(s, k))``, so each sample is reproducible on its own and the
result does not depend on the order in which samples are drawn.  Entries
inside one sample are drawn in a fixed row-major order.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from .laws import catalan

__all__ = [
    "EnsembleSpec",
    "rng_for",
    "sample_gue",
    "sample_ginibre",
    "mc_moments",
    "MomentEstimate",
    "alternating_words",
    "word_label",
    "single_family_word",
    "word_traces",
    "calibrate_bands",
    "load_bands",
    "asymptotic_freeness_check",
    "convergence_trend",
    "FAMILIES",
]

FAMILIES = ("gue_single", "gue_pair", "complex_ginibre")
MAX_ORDER = 8
MAX_WORD_LEN = 6
BAND_SIGMAS = 4.0
PILOT_SEED = 20240611
BANDS_RESOURCE = "gue_bands.json"


@dataclass(frozen=True)
class EnsembleSpec:
    n: int
    samples: int
    seed: int
    family: str = "gue_single"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("matrix size must be at least 2")
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.seed is None:
            raise ValueError("a seed is mandatory")

    def to_json(self) -> dict:
        return {"n": self.n, "samples": self.samples, "seed": self.seed, "family": self.family}


def rng_for(seed: int, sample: int = 0, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(sample), int(stream)))
    return np.random.Generator(np.random.Philox(ss))


def _complex_normal(rng: np.random.Generator, n: int) -> np.ndarray:
    # unit variance: E|z|^2 = 1
    z = rng.standard_normal((n, n, 2))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2)


def sample_gue(n: int, seed: int, sample: int = 0, stream: int = 0) -> np.ndarray:
    """GUE matrix with off-diagonal ``E|X_ij|^2 = 1/n`` and real diagonal of variance ``1/n``."""
    if n < 2:
        raise ValueError("matrix size must be at least 2")
    A = _complex_normal(rng_for(seed, sample, stream), n)
    H = (A + A.conj().T) / math.sqrt(2)
    return H / math.sqrt(n)


def sample_ginibre(n: int, seed: int, sample: int = 0, stream: int = 0) -> np.ndarray:
    """Complex Ginibre matrix with i.i.d. entries, ``E|Y_ij|^2 = 1/n``."""
    if n < 2:
        raise ValueError("matrix size must be at least 2")
    return _complex_normal(rng_for(seed, sample, stream), n) / math.sqrt(n)


@dataclass
class MomentEstimate:
    spec: EnsembleSpec
    k: List[int]
    estimate: np.ndarray
    stderr: np.ndarray
    target: np.ndarray
    quantity: str

    def within(self, sigmas: float = 3.0) -> np.ndarray:
        return np.abs(self.estimate - self.target) <= sigmas * self.stderr

    def to_csv(self) -> str:
        buf = io.StringIO()
        s = self.spec
        buf.write(f"# family={s.family} n={s.n} samples={s.samples} seed={s.seed} "
                  f"quantity={self.quantity}\n")
        buf.write("k,estimate,stderr,target\n")
        for k, e, se, t in zip(self.k, self.estimate, self.stderr, self.target):
            buf.write(f"{k},{e:.17g},{se:.17g},{t:.17g}\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "seed": self.spec.seed, "quantity": self.quantity,
                "rows": [{"k": k, "estimate": float(e), "stderr": float(se), "target": float(t)}
                         for k, e, se, t in zip(self.k, self.estimate, self.stderr, self.target)]}


def _sample_spectrum(spec: EnsembleSpec, s: int) -> np.ndarray:
    if spec.family == "complex_ginibre":
        Y = sample_ginibre(spec.n, spec.seed, s)
        return np.linalg.eigvalsh(Y.conj().T @ Y)
    return np.linalg.eigvalsh(sample_gue(spec.n, spec.seed, s))


def mc_moments(spec: EnsembleSpec, order: int = 4) -> MomentEstimate:
    """Monte Carlo normalized-trace moments with standard errors.

    GUE families estimate ``tr_n(X^k)`` (target: semicircle of radius 2);
    ``complex_ginibre`` estimates ``tr_n((Y^*Y)^k)`` (target: Catalan ``C_k``).
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must lie in 1..{MAX_ORDER}")
    ks = list(range(1, order + 1))
    per = np.empty((spec.samples, order))
    for s in range(spec.samples):
        ev = _sample_spectrum(spec, s)
        per[s] = [np.mean(ev ** k) for k in ks]
    est = per.mean(axis=0)
    se = per.std(axis=0, ddof=1) / math.sqrt(spec.samples) if spec.samples > 1 else np.full(order, np.inf)
    if spec.family == "complex_ginibre":
        target = np.array([catalan(k) for k in ks], dtype=float)
        quantity = "tr((Y*Y)^k)"
    else:
        target = np.array([catalan(k // 2) if k % 2 == 0 else 0.0 for k in ks], dtype=float)
        quantity = "tr(X^k)"
    return MomentEstimate(spec, ks, est, se, target, quantity)


# asymptotic freeness


def alternating_words(word_len: int, max_power: int = 2) -> List[Tuple[Tuple[str, int], ...]]:
    """Alternating words in centered powers ``X^p - tr(X^p)``, ``Y^q - tr(Y^q)``, length 2..word_len."""
    if word_len > MAX_WORD_LEN:
        raise ValueError(f"word length above {MAX_WORD_LEN} is not supported")
    out = []

    def grow(prefix):
        if len(prefix) >= 2:
            out.append(tuple(prefix))
        if len(prefix) == word_len:
            return
        for fam in ("X", "Y"):
            if prefix and prefix[-1][0] == fam:
                continue
            for p in range(1, max_power + 1):
                grow(prefix + [(fam, p)])

    grow([])
    return out


def word_label(word) -> str:
    return " ".join(f"{f}{p}" for f, p in word)


def word_traces(X: np.ndarray, Y: np.ndarray, word_len: int, max_power: int = 2
                ) -> Dict[str, float]:
    """Normalized traces of all alternating centered words for one sample.

    Works in the eigenbasis of ``X`` so that X-letters are diagonal.  Every
    word is split as ``left . right`` with halves of length at most
    ``ceil(word_len / 2)``; the half products are computed once (sharing
    prefixes) and ``tr(L R) = sum(L * R^T)``.
    """
    n = X.shape[0]
    ev, V = sla.eigh(X, driver="evr")
    Yb = V.conj().T @ Y @ V
    letters = {}
    for p in range(1, max_power + 1):
        d = ev ** p
        letters[("X", p)] = d - d.mean()
    Yp = np.eye(n, dtype=complex)
    for q in range(1, max_power + 1):
        Yp = Yp @ Yb
        letters[("Y", q)] = Yp - (np.trace(Yp) / n) * np.eye(n)

    half = (word_len + 1) // 2
    prods: Dict[tuple, np.ndarray] = {}
    # products of all alternating words of length 1..half, built from prefixes
    frontier = []
    for key, L in letters.items():
        prods[(key,)] = np.diag(L).astype(complex) if key[0] == "X" else L
        frontier.append((key,))
    for _ in range(half - 1):
        nxt = []
        for w in frontier:
            M = prods[w]
            for key, L in letters.items():
                if key[0] == w[-1][0]:
                    continue
                prods[w + (key,)] = M * L[None, :] if key[0] == "X" else M @ L
                nxt.append(w + (key,))
        frontier = nxt
    flat = {w: M.ravel() for w, M in prods.items()}
    flat_t = {w: np.ascontiguousarray(M.T).ravel() for w, M in prods.items()}
    out: Dict[str, float] = {}
    for w in alternating_words(word_len, max_power):
        cut = (len(w) + 1) // 2
        out[word_label(w)] = float(np.dot(flat[w[:cut]], flat_t[w[cut:]]).real / n)
    return out


def _pair_traces(spec: EnsembleSpec, word_len: int, max_power: int) -> Dict[str, np.ndarray]:
    rows: Dict[str, List[float]] = {}
    for s in range(spec.samples):
        X = sample_gue(spec.n, spec.seed, s, 0)
        Y = sample_gue(spec.n, spec.seed, s, 1)
        for k, v in word_traces(X, Y, word_len, max_power).items():
            rows.setdefault(k, []).append(v)
    return {k: np.array(v) for k, v in rows.items()}


def calibrate_bands(n: int = 512, samples: int = 50, seed: int = PILOT_SEED, word_len: int = 6,
                    max_power: int = 2) -> dict:
    """Pilot run: per-word constant ``C_w = sigma_w sqrt(n)`` from sample spread."""
    spec = EnsembleSpec(n, samples, seed, "gue_pair")
    traces = _pair_traces(spec, word_len, max_power)
    consts = {k: float(np.std(v, ddof=1) * math.sqrt(n)) for k, v in sorted(traces.items())}
    return {"n": n, "samples": samples, "seed": seed, "word_len": word_len,
            "max_power": max_power, "sigmas": BAND_SIGMAS, "C": consts}


def load_bands() -> Optional[dict]:
    try:
        text = resources.files("awlab.data").joinpath(BANDS_RESOURCE).read_text()
    except (FileNotFoundError, ModuleNotFoundError):
        return None
    return json.loads(text)


@dataclass
class FreenessMCReport:
    spec: EnsembleSpec
    rows: List[dict]
    passed: bool
    band_source: str

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "seed": self.spec.seed, "pass": self.passed,
                "band_source": self.band_source, "words": self.rows}


def asymptotic_freeness_check(spec: EnsembleSpec, word_len: int = 6, max_power: int = 2,
                              bands: Optional[dict] = None) -> FreenessMCReport:
    """Mean normalized traces of alternating centered words against calibrated bands.

    The band for word ``w`` is ``sigmas * C_w / sqrt(n) / sqrt(S)`` with ``C_w``
    from a pilot run at the same ``n`` and ``S`` under a separate pilot seed:
    the stored fixture when it matches, otherwise a fresh pilot.
    """
    if spec.family != "gue_pair":
        raise ValueError("asymptotic freeness needs the gue_pair family")
    if word_len < 2:
        raise ValueError("alternating words need length at least 2")
    source = "fixture"
    if bands is None:
        bands = load_bands()
    if (bands is None or bands["n"] != spec.n or bands["samples"] != spec.samples
            or bands["word_len"] < word_len or bands["max_power"] < max_power):
        source = "fresh pilot"
        bands = calibrate_bands(spec.n, max(spec.samples, 2), PILOT_SEED, word_len, max_power)
    traces = _pair_traces(spec, word_len, max_power)
    rows, ok = [], True
    for label, vals in sorted(traces.items()):
        mean = float(vals.mean())
        band = bands["sigmas"] * bands["C"][label] / math.sqrt(spec.n) / math.sqrt(spec.samples)
        inside = abs(mean) <= band
        ok = ok and inside
        rows.append({"word": label, "mean": mean, "band": band, "pass": inside})
    return FreenessMCReport(spec, rows, ok, source)


def single_family_word(word: Sequence[Tuple[str, int]]) -> bool:
    """True when a word never switches family (freeness says nothing about it)."""
    return len({f for f, _ in word}) < 2 or any(a[0] == b[0] for a, b in zip(word, word[1:]))


def convergence_trend(sizes: Sequence[int] = (64, 256, 512), samples: int = 20, seed: int = 1,
                      ks: Sequence[int] = (2, 4)) -> dict:
    """Median over samples of ``|tr(X^k) - C_{k/2}|`` for each size; should decrease."""
    out = {"sizes": list(sizes), "samples": samples, "seed": seed, "k": list(ks), "median": {}}
    ok = True
    for k in ks:
        target = catalan(k // 2) if k % 2 == 0 else 0.0
        meds = []
        for n in sizes:
            devs = [abs(np.mean(np.linalg.eigvalsh(sample_gue(n, seed, s)) ** k) - target)
                    for s in range(samples)]
            meds.append(float(np.median(devs)))
        out["median"][str(k)] = meds
        ok = ok and all(b < a for a, b in zip(meds, meds[1:]))
    out["pass"] = ok
    return out
