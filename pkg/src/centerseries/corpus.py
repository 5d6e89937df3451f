"""Built-in worked examples with known singularities, residuals and targets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Literal

import numpy as np

from .center import CenterFactorization, build_polynomial, factor
from .coeffs import (CoefficientSequence, NotExactError, expsqrt_sequence, fit_decay,
                     log_derivative, ratio_radius)
from .evaluation import center_partial
from .exact import Angle, PiMultiple
from .singularity import (Degree, NotPowerLawError, SingularitySet, detect_dominant)

Kind = Literal["sine", "cosine", "complex"]

DEFAULT_DELTA_ROTATION = Angle.pi_multiple(Fraction(1, 3))
RESIDUAL_CHECK_TERMS = 500
GRID_POINTS = 37
GRID_WINDOW = 0.2
GRID_TERMS = 100_000
GRID_TOLERANCE = 1e-10


class UnknownEntryError(KeyError):
    pass


ResidualRule = Callable[[int], PiMultiple]
Target = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    title: str
    kind: Kind
    source: CoefficientSequence
    singularities: SingularitySet
    expected_residual: ResidualRule | None = field(default=None, compare=False)
    target_f_s: Target | None = field(default=None, compare=False)
    target_f_c: Target | None = field(default=None, compare=False)
    constant: PiMultiple = PiMultiple(0)
    prefactor_power: int = 1

    def factorization(self) -> CenterFactorization:
        return factor(self.source, build_polynomial(self.singularities, self.source.is_real))

    def target(self, theta: np.ndarray) -> np.ndarray | None:
        """Closed-form value of the entry's own projection, when known."""
        if self.kind == "sine" and self.target_f_s is not None:
            return self.target_f_s(theta)
        if self.kind == "cosine" and self.target_f_c is not None:
            return self.target_f_c(theta)
        return None

    def project(self, value: complex) -> float | complex:
        if self.kind == "sine":
            return value.imag
        if self.kind == "cosine":
            return value.real
        return value

    @property
    def root_angles(self) -> tuple[Angle, ...]:
        return self.singularities.angles


def _seq(expr: str, scale: str, step: int = 1, offset: int | None = None, **kw) -> CoefficientSequence:
    return CoefficientSequence.from_expression(expr, step=step, offset=offset, scale=scale, **kw)


def _odd_j(k: int) -> int | None:
    return (k - 1) // 2 if k % 2 == 1 else None


def _pm(scale: str, value: Fraction | int) -> PiMultiple:
    return PiMultiple.parse(scale) * Fraction(value)


# --- expected residuals as printed for each example ---------------------------

def _res_sawtooth1(k: int) -> PiMultiple:
    if k == 1:
        return _pm("2/pi", 1)
    m = k - 1
    return _pm("2/pi", Fraction(-(-1) ** m, m * (m + 1)))


def _res_square(k: int) -> PiMultiple:
    j = _odd_j(k)
    if j is None:
        return PiMultiple(0)
    if j == 0:
        return _pm("4/pi", -1)
    return _pm("4/pi", Fraction(2, 4 * j * j - 1))


def _res_sawtooth2(k: int) -> PiMultiple:
    if k % 2:
        return PiMultiple(0)
    if k == 2:
        return _pm("2/pi", 1)
    j = (k - 2) // 2
    return _pm("2/pi", Fraction(-1, j * (j + 1)))


def _res_triangular(k: int) -> PiMultiple:
    j = _odd_j(k)
    if j is None:
        return PiMultiple(0)
    if j == 0:
        return _pm("8/pi^2", 1)
    return _pm("8/pi^2", Fraction(-8 * j, (4 * j * j - 1) ** 2))


def _res_delta(k: int) -> PiMultiple:
    return _pm("1/pi", -1) if k == 1 else PiMultiple(0)


def _res_square_shifted(k: int) -> PiMultiple:
    j = _odd_j(k)
    if j is None:
        return PiMultiple(0)
    if j == 0:
        return _pm("4/pi", 1)
    return _pm("4/pi", Fraction(-2 * (-1) ** j, 4 * j * j - 1))


def _res_quadratic_spline(k: int) -> PiMultiple:
    j = _odd_j(k)
    if j is None:
        return PiMultiple(0)
    if j == 0:
        return _pm("32/pi^3", -1)
    return _pm("32/pi^3", Fraction(24 * j * j + 2, (4 * j * j - 1) ** 3))


# --- target functions ------------------------------------------------------------------

def _wrap(theta: np.ndarray) -> np.ndarray:
    t = np.remainder(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(t == -np.pi, np.pi, t)


def _sawtooth1_fs(t):
    return _wrap(t) / np.pi


def _sawtooth1_fc(t):
    return (2 / np.pi) * np.log(np.abs(2 * np.cos(_wrap(t) / 2)))


def _square_fs(t):
    return np.sign(_wrap(t)).astype(float)


def _square_fc(t):
    t = _wrap(t)
    return (2 / np.pi) * np.log(np.abs(np.cos(t / 2) / np.sin(t / 2)))


def _sawtooth2_fs(t):
    t = _wrap(t)
    return 2 * t / np.pi - np.sign(t)


def _sawtooth2_fc(t):
    return (2 / np.pi) * np.log(np.abs(2 * np.sin(_wrap(t))))


def _triangular_fc(t):
    return 2 * np.abs(_wrap(t)) / np.pi - 1


def _square_shifted_fc(t):
    return np.where(np.abs(_wrap(t)) < np.pi / 2, 1.0, -1.0)


def _square_shifted_fs(t):
    s = np.sin(_wrap(t))
    return np.log(np.abs((1 + s) / (1 - s))) / np.pi


def _quadratic_spline_fs(t):
    t = _wrap(t)
    return 4 * t * (np.pi - np.abs(t)) / np.pi**2


def _delta_targets(theta1: Angle) -> tuple[Target, Target]:
    def fc(t):
        return np.zeros(np.shape(t))

    def fs(t):
        d = np.asarray(t, dtype=float) - theta1.radians
        return np.cos(d / 2) / np.sin(d / 2) / (2 * np.pi)
    return fs, fc


# --- entries -------------------------------------------------------------------------

H0 = Degree.hard(0)


def _pts(*over_pi, degree: Degree) -> SingularitySet:
    return SingularitySet.of(*[(Angle.pi_multiple(Fraction(q)), degree) for q in over_pi])


def delta_entry(theta1: Angle | float = DEFAULT_DELTA_ROTATION) -> CorpusEntry:
    """Rotated delta series ``1/(2 pi) + (1/pi) sum (z/z1)^k``."""
    theta1 = Angle.coerce(theta1)
    src = _seq("1", "1/pi", rotation=theta1, name="delta")
    fs, fc = _delta_targets(theta1)
    sset = SingularitySet.of((theta1, Degree.hard(1)))
    return CorpusEntry("delta", "Dirac delta at theta1", "cosine", src, sset, _res_delta,
                       fs, fc, PiMultiple(Fraction(1, 2), -1), 1)


def _build() -> dict[str, CorpusEntry]:
    entries = [
        CorpusEntry("sawtooth1", "one-cycle unit-amplitude sawtooth wave", "sine",
                    _seq("(-1)^k/k", "-2/pi", name="sawtooth1"),
                    _pts(1, degree=H0), _res_sawtooth1, _sawtooth1_fs, _sawtooth1_fc),
        CorpusEntry("square", "unit-amplitude square wave", "sine",
                    _seq("1/k", "4/pi", step=2, offset=1, name="square"),
                    _pts(0, 1, degree=H0), _res_square, _square_fs, _square_fc),
        CorpusEntry("sawtooth2", "two-cycle unit-amplitude sawtooth wave", "sine",
                    _seq("1/k", "-4/pi", step=2, offset=2, name="sawtooth2"),
                    _pts(0, 1, degree=H0), _res_sawtooth2, _sawtooth2_fs, _sawtooth2_fc,
                    prefactor_power=2),
        CorpusEntry("triangular", "unit-amplitude triangular wave", "cosine",
                    _seq("1/k^2", "-8/pi^2", step=2, offset=1, name="triangular"),
                    _pts(0, 1, degree=Degree.soft(0)), _res_triangular, None, _triangular_fc),
        delta_entry(),
        CorpusEntry("square-shifted", "square wave shifted by a quarter period", "cosine",
                    _seq("(-1)^j/k", "4/pi", step=2, offset=1, name="square-shifted"),
                    _pts(Fraction(-1, 2), Fraction(1, 2), degree=H0), _res_square_shifted,
                    _square_shifted_fs, _square_shifted_fc),
        CorpusEntry("quadratic-spline", "odd wave made of quadratic segments", "sine",
                    _seq("1/k^3", "32/pi^3", step=2, offset=1, name="quadratic-spline"),
                    _pts(0, 1, degree=Degree.soft(1)), _res_quadratic_spline, _quadratic_spline_fs,
                    None),
        CorpusEntry("expsqrt", "exp(-sqrt k) power series", "complex", expsqrt_sequence(),
                    _pts(0, degree=Degree.soft(None))),
    ]
    return {e.name: e for e in entries}


CORPUS: dict[str, CorpusEntry] = _build()


def get_entry(name: str) -> CorpusEntry:
    try:
        return CORPUS[name]
    except KeyError:
        raise UnknownEntryError(f"unknown corpus entry {name!r}; known: {', '.join(CORPUS)}") from None


def names() -> list[str]:
    return list(CORPUS)


# --- chain relations ---------------------------------------------------------------

def chain_constant(target: CoefficientSequence, base: CoefficientSequence, order: int,
                   n_check: int = 200) -> PiMultiple:
    """Constant ``c`` with ``target_k = c * base_k / k**order`` for every checked ``k``.

    Raises ``ValueError`` if the ratio is not constant.
    """
    const: PiMultiple | None = None
    for k in range(1, n_check + 1):
        t = target.exact_coefficient(k)
        b = base.exact_coefficient(k) * Fraction(1, k**order)
        if not b:
            if t:
                raise ValueError(f"term {k}: base vanishes but target does not")
            continue
        c = PiMultiple(t.coef / b.coef, t.pi_power - b.pi_power)
        if const is None:
            const = c
        elif c != const:
            raise ValueError(f"ratio changes at k={k}: {c} vs {const}")
    if const is None:
        raise ValueError("no non-zero terms to compare")
    return const


# --- verification ----------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    max_error: float | None = None

    def as_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "detail": self.detail,
                "max_error": self.max_error}


@dataclass
class VerificationRecord:
    name: str
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": [c.as_dict() for c in self.checks]}


def grid(points: int = GRID_POINTS) -> np.ndarray:
    return np.linspace(-np.pi, np.pi, points)


def grid_outside(roots, width: float, points: int = GRID_POINTS) -> np.ndarray:
    g = grid(points)
    keep = [t for t in g if all(r.distance(float(t)) >= width for r in roots)]
    return np.array(keep)


def _same_set(a: SingularitySet, b: SingularitySet) -> bool:
    if len(a) != len(b):
        return False
    return all(p.angle.same_point(q.angle) and p.degree == q.degree for p, q in zip(a, b))


def residual_mismatches(entry: CorpusEntry, fact: CenterFactorization,
                        n: int = RESIDUAL_CHECK_TERMS, exact: bool = True) -> list[int]:
    bad = []
    res = fact.residual
    if exact:
        for k in range(1, n + 1):
            if res.exact_coefficient(k) != entry.expected_residual(k):
                bad.append(k)
        return bad
    got = res.prefix(n)
    for k in range(1, n + 1):
        want = float(entry.expected_residual(k))
        if abs(got[k - 1] - want) > 1e-12 * max(abs(want), 1e-300):
            bad.append(k)
    return bad


def verify_entry(name: str, exact: bool = True, terms: int = GRID_TERMS,
                 tolerance: float = GRID_TOLERANCE, window: float = GRID_WINDOW) -> VerificationRecord:
    entry = get_entry(name)
    checks: list[Check] = []
    src = entry.source

    try:
        detected = detect_dominant(src)
        ok = _same_set(detected, entry.singularities)
        checks.append(Check("detect_dominant", ok, f"detected {detected.as_list()}"))
    except (ValueError, NotPowerLawError) as exc:
        checks.append(Check("detect_dominant", False, str(exc)))

    fact = entry.factorization()
    checks.append(Check("polynomial_real", fact.polynomial.is_real or not src.is_real,
                        str(fact.polynomial.as_dict())))

    if entry.expected_residual is not None:
        try:
            bad = residual_mismatches(entry, fact, exact=exact)
            checks.append(Check("residual_identity", not bad,
                                f"mismatches at k={bad[:10]}" if bad else f"k <= {RESIDUAL_CHECK_TERMS}"))
        except NotExactError as exc:
            checks.append(Check("residual_identity", False, str(exc)))

    before, after = fact.decay_before, fact.decay_after
    if before is not None and after is not None and before.is_power_law:
        gain = after.exponent - before.exponent
        checks.append(Check("decay_improvement", abs(gain - 1.0) <= 0.1,
                            f"p {before.exponent:.4f} -> {after.exponent:.4f}", abs(gain - 1.0)))

    thetas = grid_outside(entry.root_angles, window)
    const = complex(float(entry.constant))
    for label, target, pick in (("f_s", entry.target_f_s, lambda v: v.imag),
                                ("f_c", entry.target_f_c, lambda v: v.real)):
        if target is None:
            continue
        want = target(thetas)
        errs = [abs(pick(center_partial(fact, float(t), terms) + const) - w)
                for t, w in zip(thetas, want)]
        worst = float(max(errs))
        where = float(thetas[int(np.argmax(errs))])
        checks.append(Check(f"grid_{label}", worst <= tolerance,
                            f"{len(thetas)} points, N={terms}, worst at theta={where:.4f}", worst))

    if entry.name == "expsqrt":
        checks.extend(_expsqrt_checks(src))
    return VerificationRecord(name, checks)


def _expsqrt_checks(src: CoefficientSequence) -> list[Check]:
    out = []
    fit = fit_decay(src, 100, 10000)
    out.append(Check("non_power_law", not fit.is_power_law, f"residual {fit.residual:.3g}"))
    probe = ratio_radius(src)
    out.append(Check("ratio_radius", abs(probe.radius - 1) <= 1e-6, f"radius {probe.radius!r}",
                     abs(probe.radius - 1)))
    s = src
    for order in range(1, 5):
        s = log_derivative(s)
        a, b = abs_sum(s, 100_000), abs_sum(s, 200_000)
        out.append(Check(f"logd{order}_abs_sum", abs(b - a) < 1e-9,
                         f"sum |a_k| to 1e5 = {a:.12g}", abs(b - a)))
    return out


def abs_sum(seq: CoefficientSequence, n: int) -> float:
    """``sum_{k<=n} |a_k|`` with compensated summation."""
    return math.fsum(np.abs(seq.prefix(n)).tolist())


def verify_all(**kw) -> list[VerificationRecord]:
    return [verify_entry(n, **kw) for n in CORPUS]
