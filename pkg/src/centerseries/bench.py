"""Terms-to-tolerance benchmark: direct partial sums versus the center series.

For each method the reported ``N`` is the smallest index such that every
partial sum from ``S_N`` up to the end of the examined horizon is within
tolerance of the reference.  The horizon doubles until the last failing
index lies in its first half, so a lucky zero crossing of an oscillating
error is never reported as convergence.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .center import CenterFactorization, build_polynomial, factor
from .coeffs import CoefficientSequence
from .corpus import CORPUS, CorpusEntry
from .evaluation import EvalQuery, eval_center
from .exact import Angle
from .singularity import SingularitySet

DEFAULT_CAP = 10_000_000
FAIRNESS_WINDOW = 0.2
START_HORIZON = 64
BLOCK = 1 << 20


@dataclass(frozen=True)
class BenchmarkResult:
    series: str
    theta: float
    tolerance: float
    terms_direct: int | None
    terms_center: int | None
    reference: complex
    reference_kind: str
    cap: int

    @property
    def speedup(self) -> float | None:
        if self.terms_direct is None or self.terms_center is None:
            return None
        return self.terms_direct / self.terms_center

    def row(self) -> dict:
        def cnt(n):
            return "exceeded-cap" if n is None else n
        ref = self.reference
        return {"series": self.series, "theta": repr(self.theta), "tolerance": repr(self.tolerance),
                "terms_direct": cnt(self.terms_direct), "terms_center": cnt(self.terms_center),
                "speedup": "" if self.speedup is None else f"{self.speedup:.6g}",
                "reference_re": repr(ref.real), "reference_im": repr(ref.imag),
                "reference_kind": self.reference_kind, "cap": self.cap}


FIELDS = ["series", "theta", "tolerance", "terms_direct", "terms_center", "speedup",
          "reference_re", "reference_im", "reference_kind", "cap"]


def terms_to_tolerance(seq: CoefficientSequence, theta: float,
                       error_of: Callable[[np.ndarray], np.ndarray],
                       tolerances: Sequence[float], cap: int = DEFAULT_CAP) -> list[int | None]:
    """Smallest stable ``N`` per tolerance, or None when the cap is reached first.

    ``error_of`` maps an array of raw partial sums ``sum_{k<=n} a_k e^{ik theta}``
    to the absolute errors of the method's estimate.
    """
    tols = list(tolerances)
    last_fail = [0] * len(tols)
    done: list[int | None] = [None] * len(tols)
    pending = set(range(len(tols)))
    total = 0j
    n = 0
    horizon = START_HORIZON
    while pending:
        hi = min(horizon, cap)
        while n < hi:
            top = min(hi, n + BLOCK)
            ks = np.arange(n + 1, top + 1, dtype=np.int64)
            terms = seq.terms(ks) * np.exp(1j * (ks.astype(float) * theta))
            sums = total + np.cumsum(terms)
            total = complex(sums[-1])
            err = error_of(sums)
            for i in pending:
                bad = np.nonzero(err > tols[i])[0]
                if len(bad):
                    last_fail[i] = n + 1 + int(bad[-1])
            n = top
        for i in list(pending):
            if last_fail[i] < horizon // 2 or (hi == cap and last_fail[i] < cap):
                done[i] = last_fail[i] + 1
                pending.discard(i)
        if hi == cap:
            break
        horizon *= 2
    return done


def _projector(kind: str) -> Callable[[np.ndarray], np.ndarray]:
    if kind == "sine":
        return np.imag
    if kind == "cosine":
        return np.real
    return lambda v: v


def reference_value(entry: CorpusEntry, theta: float, fact: CenterFactorization,
                    cap: int) -> tuple[complex, str]:
    t = entry.target(np.array([theta]))
    if t is not None:
        v = float(t[0])
        return (complex(0.0, v) if entry.kind == "sine" else complex(v, 0.0)), "closed-form"
    rep = eval_center(fact, EvalQuery(theta, 1.0, 10 * cap, 1e-15))
    return rep.value + complex(float(entry.constant)), "center-10x-cap"


def bench_entry(entry: CorpusEntry, thetas: Iterable[float], tolerances: Sequence[float],
                cap: int = DEFAULT_CAP, singularities: SingularitySet | None = None) -> list[BenchmarkResult]:
    sset = singularities or entry.singularities
    fact = factor(entry.source, build_polynomial(sset, entry.source.is_real))
    proj = _projector(entry.kind)
    const = complex(float(entry.constant))
    out = []
    for theta in thetas:
        theta = float(theta)
        ref, kind = reference_value(entry, theta, fact, cap)
        ref_p = proj(np.array([ref]))[0]
        pz = fact.polynomial.at_angle(theta)

        def err_direct(s, ref_p=ref_p):
            return np.abs(proj(s + const) - ref_p)

        def err_center(s, ref_p=ref_p, pz=pz):
            return np.abs(proj(s / pz + const) - ref_p)

        nd = terms_to_tolerance(entry.source, theta, err_direct, tolerances, cap)
        nc = terms_to_tolerance(fact.residual, theta, err_center, tolerances, cap)
        for tol, a, b in zip(tolerances, nd, nc):
            out.append(BenchmarkResult(entry.name, theta, float(tol), a, b, complex(ref), kind, cap))
    return out


def default_thetas(entry: CorpusEntry, window: float = FAIRNESS_WINDOW) -> list[float]:
    """Fixed benchmark angles kept ``window`` away from every root."""
    cands = [math.pi / 3, math.pi / 2 + 0.4, 2 * math.pi / 3, -math.pi / 4 - 0.2]
    return [t for t in cands if all(r.distance(t) >= window for r in entry.root_angles)]


def near_root_thetas(entry: CorpusEntry, offset: float = 0.05) -> list[float]:
    out = []
    for r in entry.root_angles:
        t = Angle.from_radians(r.radians - offset, snap=False).radians
        out.append(t)
    return out


def run_bench(names: Sequence[str] | None = None, tolerances: Sequence[float] = (1e-1, 1e-3, 1e-6),
              cap: int = DEFAULT_CAP, thetas: Sequence[float] | None = None,
              include_near_root: bool = True) -> list[BenchmarkResult]:
    results = []
    for name in names or list(CORPUS):
        entry = CORPUS[name]
        ts = list(thetas) if thetas is not None else default_thetas(entry)
        if include_near_root and thetas is None:
            ts += near_root_thetas(entry)
        results.extend(bench_entry(entry, ts, tolerances, cap))
    results.sort(key=lambda r: (r.series, r.theta, r.tolerance))
    return results


def to_csv(results: Sequence[BenchmarkResult]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    w.writeheader()
    for r in results:
        w.writerow(r.row())
    return buf.getvalue()


def to_json(results: Sequence[BenchmarkResult]) -> str:
    return json.dumps([r.row() for r in results], indent=2, sort_keys=True) + "\n"

