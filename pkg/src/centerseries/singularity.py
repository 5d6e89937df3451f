"""Unit-circle singularities, their degrees, and convergence classes.

Degrees live on a single ladder, listed from hardest to softest::

    ... hard 2, hard 1, hard 0, soft 0, soft 1, soft 2 ...

with ladder index ``-n`` for ``hard n`` and ``n + 1`` for ``soft n``.  One
logarithmic integration moves one rung to the right.  The infinite degrees
sit at the two ends and never move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Literal

from .coeffs import (DEFAULT_PROBE_WINDOW, CoefficientSequence, DecayFit,
                     ZeroRule, ZeroTermError, fit_decay, is_super_polynomial, monotone_direction,
                     ratio_radius)
from .exact import Angle

Polarity = Literal["hard", "soft"]

# Exponents this close to an integer are treated as that integer, so that a
# fitted 0.9999999 lands on the printed p = 1 boundary.
EXPONENT_SNAP = 1e-6


class PatternUnsupportedError(ValueError):
    """The sequence is outside the patterns whose singularities are known."""


class NonMonotonicError(ValueError):
    pass


class NotPowerLawError(ValueError):
    """Decay is not a power law.  ``super_polynomial`` marks all-soft chains."""

    def __init__(self, message: str, fit: DecayFit | None = None, super_polynomial: bool = False):
        super().__init__(message)
        self.fit = fit
        self.super_polynomial = super_polynomial


# --- degrees -----------------------------------------------------------------

@dataclass(frozen=True)
class Degree:
    """``n`` with a polarity; ``n is None`` means the infinite degree."""

    polarity: Polarity
    n: int | None = 0

    def __post_init__(self) -> None:
        if self.polarity not in ("hard", "soft"):
            raise ValueError(f"polarity must be 'hard' or 'soft', got {self.polarity!r}")
        if self.n is not None and self.n < 0:
            raise ValueError("degree must be non-negative")

    @classmethod
    def hard(cls, n: int | None = 0) -> Degree:
        return cls("hard", n)

    @classmethod
    def soft(cls, n: int | None = 0) -> Degree:
        return cls("soft", n)

    @classmethod
    def from_ladder(cls, index: int) -> Degree:
        return cls("hard", -index) if index <= 0 else cls("soft", index - 1)

    @property
    def is_infinite(self) -> bool:
        return self.n is None

    @property
    def is_borderline(self) -> bool:
        return self.n == 0

    @property
    def ladder(self) -> float:
        if self.n is None:
            return -math.inf if self.polarity == "hard" else math.inf
        return -self.n if self.polarity == "hard" else self.n + 1

    def shifted(self, steps: int) -> Degree:
        if self.is_infinite:
            return self
        return Degree.from_ladder(int(self.ladder) + steps)

    def label(self) -> str:
        if self.n is None:
            return f"infinitely-{self.polarity}"
        if self.n == 0:
            return f"borderline-{self.polarity}"
        return f"{self.n}-{self.polarity}"

    def as_dict(self) -> dict:
        return {"polarity": self.polarity, "degree": "infinite" if self.n is None else self.n}


def ladder_from_exponent(p: float) -> int:
    """Ladder rung of the dominant singularity for ``|a_k| ~ 1/k**p``.

    ``0 < p <= 1`` is hard 0 and each unit step in ``p`` is one rung; the
    half-open intervals put integer ``p`` on the harder side.
    """
    r = round(p)
    if abs(p - r) <= EXPONENT_SNAP:
        p = float(r)
    return math.ceil(p) - 1


# --- points and sets ---------------------------------------------------------------

@dataclass(frozen=True)
class SingularityPoint:
    angle: Angle
    degree: Degree

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", Angle.coerce(self.angle))

    def as_dict(self) -> dict:
        d = {"angle_over_pi": self.angle.label()}
        d.update(self.degree.as_dict())
        return d


def _merge(a: Degree, b: Degree) -> Degree:
    # hard beats soft; the harder of two hards, the less soft of two softs:
    # all three rules pick the smaller ladder index
    return a if a.ladder <= b.ladder else b


@dataclass(frozen=True)
class SingularitySet:
    points: tuple[SingularityPoint, ...] = ()

    def __post_init__(self) -> None:
        pts = tuple(self.points)
        merged: list[SingularityPoint] = []
        for p in pts:
            for i, q in enumerate(merged):
                if q.angle.same_point(p.angle):
                    merged[i] = SingularityPoint(q.angle, _merge(q.degree, p.degree))
                    break
            else:
                merged.append(p)
        merged.sort(key=lambda p: p.angle.sort_key())
        object.__setattr__(self, "points", tuple(merged))

    @classmethod
    def of(cls, *pairs: tuple[Angle | float, Degree]) -> SingularitySet:
        return cls(tuple(SingularityPoint(Angle.coerce(a), d) for a, d in pairs))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def angles(self) -> tuple[Angle, ...]:
        return tuple(p.angle for p in self.points)

    @property
    def dominant(self) -> SingularitySet:
        if not self.points:
            return self
        best = min(p.degree.ladder for p in self.points)
        return SingularitySet(tuple(p for p in self.points if p.degree.ladder == best))

    def is_conjugate_closed(self) -> bool:
        for p in self.points:
            mirror = -p.angle
            if not any(q.angle.same_point(mirror) and q.degree == p.degree for q in self.points):
                return False
        return True

    def rotated(self, theta: Angle) -> SingularitySet:
        return SingularitySet(tuple(SingularityPoint(p.angle + theta, p.degree) for p in self.points))

    def as_list(self) -> list[dict]:
        return [p.as_dict() for p in self.points]


def superpose(sets: Iterable[SingularitySet]) -> SingularitySet:
    """Union with per-angle merging; points are never removed."""
    pts: list[SingularityPoint] = []
    for s in sets:
        pts.extend(s.points)
    return SingularitySet(tuple(pts))


def shift_degrees(sset: SingularitySet, steps: int) -> SingularitySet:
    """Move every finite degree ``steps`` rungs; positive means softer."""
    return SingularitySet(tuple(SingularityPoint(p.angle, p.degree.shifted(steps)) for p in sset.points))


# --- detection ---------------------------------------------------------------------

def pattern_angles(seq: CoefficientSequence) -> list[Angle]:
    """Dominant angles implied by the step/sign pattern and rotation."""
    s = seq.step
    sign = seq.sign_pattern
    if sign == "mixed":
        raise PatternUnsupportedError(
            "sign pattern is not constant or alternating; supply the singularities explicitly")
    if sign == "alternating-in-k":
        # (-1)^k on k = offset + s*j is (-1)^offset * (-1)^(s*j)
        sign = "constant" if s % 2 == 0 else "alternating-in-j"
    if sign == "constant":
        base = [Fraction(2 * m, s) for m in range(s)]
    else:
        base = [Fraction(2 * m + 1, s) for m in range(s)]
    angles = [Angle.pi_multiple(q) for q in base]
    if seq.is_rotated:
        angles = [a + seq.rotation for a in angles]
    return angles


def _degree_from_decay(seq: CoefficientSequence, window: tuple[int, int]) -> tuple[Degree, DecayFit]:
    fit = fit_decay(seq, *window)
    if fit.is_power_law:
        return Degree.from_ladder(ladder_from_exponent(fit.exponent)), fit
    if is_super_polynomial(seq, *window):
        return Degree.soft(None), fit
    raise NotPowerLawError(
        f"decay over {window} is not a power law (residual {fit.residual:.3g})", fit)


def detect_dominant(seq: CoefficientSequence,
                    window: tuple[int, int] = DEFAULT_PROBE_WINDOW) -> SingularitySet:
    """Dominant singularities of an (eventually) monotonic patterned sequence."""
    if isinstance(seq.rule, ZeroRule) or not seq.scale:
        return SingularitySet()
    try:
        probe = ratio_radius(seq)
    except ZeroTermError:
        probe = None
    if probe is not None and not probe.unit_radius:
        if probe.radius > 1:
            return SingularitySet()
        raise PatternUnsupportedError(
            f"convergence radius {probe.radius:.6g} < 1: singularities lie inside the disk")
    if monotone_direction(seq, window) is None:
        raise NonMonotonicError(
            f"non-zero terms are not monotonic in modulus over k in {list(window)}")
    angles = pattern_angles(seq)
    degree, _ = _degree_from_decay(seq, window)
    return SingularitySet(tuple(SingularityPoint(a, degree) for a in angles))


# --- classification ------------------------------------------------------------------

BEHAVIORS = ("divergent-everywhere", "divergent-almost-everywhere",
             "pointwise-almost-everywhere", "absolutely-uniformly-convergent")


@dataclass(frozen=True)
class ConvergenceClass:
    """One row of the classification table, or a strong sentinel.

    ``predicted_series_behavior`` describes ``S_v``; ``dp_series_behavior``
    the real sine/cosine series.
    """

    tag: str
    ladder: float
    predicted_series_behavior: str
    dp_series_behavior: str
    predicted_function_smoothness: str
    exponent: float | None = None
    amplitude: float | None = None
    caveat: str | None = None
    dominant: SingularitySet = field(default_factory=SingularitySet)

    def softer(self) -> bool:
        return self.ladder > 0

    def as_report(self) -> dict:
        return {
            "class_tag": self.tag,
            "p": self.exponent,
            "amplitude": self.amplitude,
            "dominant": self.dominant.as_list(),
            "behavior": self.predicted_series_behavior,
            "dp_behavior": self.dp_series_behavior,
            "smoothness": self.predicted_function_smoothness,
            "caveat": self.caveat,
        }


def class_for_ladder(index: float) -> ConvergenceClass:
    """The fixed table row for a ladder index."""
    if index == -math.inf:
        return ConvergenceClass("strong-divergence", index, "divergent-everywhere",
                                "divergent-everywhere", "no limiting function")
    if index == math.inf:
        return ConvergenceClass("strong-convergence", index, "absolutely-uniformly-convergent",
                                "absolutely-uniformly-convergent", "analytic ew")
    i = int(index)
    if i <= -2:
        return ConvergenceClass(f"{-i}-hard", i, "divergent-everywhere",
                                "divergent-almost-everywhere", "currently unknown")
    if i == -1:
        return ConvergenceClass("1-hard", i, "divergent-everywhere",
                                "divergent-almost-everywhere", "δ-function for p=0")
    if i == 0:
        return ConvergenceClass("borderline-hard", i, "pointwise-almost-everywhere",
                                "pointwise-almost-everywhere", "cont aew, diff aew")
    if i == 1:
        return ConvergenceClass("borderline-soft", i, "absolutely-uniformly-convergent",
                                "absolutely-uniformly-convergent", "cont ew, diff aew")
    if i == 2:
        return ConvergenceClass("1-soft", i, "absolutely-uniformly-convergent",
                                "absolutely-uniformly-convergent", "diff ew, C2 aew")
    n = i - 1
    return ConvergenceClass(f"{n}-soft", i, "absolutely-uniformly-convergent",
                            "absolutely-uniformly-convergent", f"C^{n} ew, C^{n + 1} aew")


def class_for_exponent(p: float) -> ConvergenceClass:
    base = class_for_ladder(ladder_from_exponent(p))
    return _with(base, exponent=p)


def _with(c: ConvergenceClass, **kw) -> ConvergenceClass:
    return replace(c, **kw)


def classify(seq: CoefficientSequence, fit: DecayFit,
             window: tuple[int, int] = DEFAULT_PROBE_WINDOW) -> ConvergenceClass:
    """Map a decay fit to its class; a ratio probe catches exponential behaviour first."""
    try:
        probe = ratio_radius(seq)
    except ZeroTermError:
        probe = None
    if probe is not None and not probe.unit_radius:
        tag = math.inf if probe.radius > 1 else -math.inf
        return _with(class_for_ladder(tag), exponent=None)
    if not fit.is_power_law:
        sup = is_super_polynomial(seq, *window)
        msg = ("sub-power decay, all-soft chain: decay is faster than every power of k, "
               "so every logarithmic derivative still converges absolutely") if sup else (
               f"fit residual {fit.residual:.3g} exceeds the power-law threshold")
        raise NotPowerLawError(msg, fit, sup)
    c = class_for_exponent(fit.exponent)
    caveat = None
    if seq.sign_pattern == "mixed" or monotone_direction(seq, window) is None:
        caveat = "sequence is not extended-monotonic; the table prediction is not established here"
    return _with(c, amplitude=fit.amplitude, caveat=caveat)


def check_absolute_convergence(fit: DecayFit) -> str:
    if not fit.is_power_law:
        return "undecided"
    return "absolutely-convergent" if ladder_from_exponent(fit.exponent) >= 1 else "not-absolutely-convergent"


def classify_sequence(seq: CoefficientSequence, window: tuple[int, int] = DEFAULT_PROBE_WINDOW,
                      singularities: SingularitySet | None = None) -> ConvergenceClass:
    """Fit, classify and attach the dominant set (detected unless supplied)."""
    fit = fit_decay(seq, *window)
    c = classify(seq, fit, window)
    if singularities is None:
        try:
            singularities = detect_dominant(seq, window)
        except (PatternUnsupportedError, NonMonotonicError, NotPowerLawError):
            singularities = SingularitySet()
    return _with(c, dominant=singularities.dominant)
