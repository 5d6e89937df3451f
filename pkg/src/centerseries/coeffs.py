"""Coefficient sequences ``a_k`` of DP Fourier / power series.

A sequence is ``a_k = scale * rule(k) * exp(-i*(k - rotation_shift)*rotation)``
for ``k >= 1``.  ``scale`` is an exact ``PiMultiple`` so that prefactors like
``4/pi`` never leak into the rational part.  Rules answer three questions:
the exact value at one index (a ``Fraction`` for rational rules), vectorised
float values over an index array, and ``log|rule(k)|`` for ratio probes at
indices far beyond what can be summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Literal, Sequence

import numpy as np

from .exact import ONE, Angle, Number, PiMultiple
from .expr import Expression, parse_expression

SignPattern = Literal["constant", "alternating-in-k", "alternating-in-j", "mixed"]
SIGN_PATTERNS = ("constant", "alternating-in-k", "alternating-in-j", "mixed")

# RMS of log|a_k| residuals above which a fit is not treated as a power law.
POWER_LAW_RESIDUAL_THRESHOLD = 0.05


class NotExactError(ValueError):
    """The rule has no exact (rational) value at the requested index."""


class WindowTooSmallError(ValueError):
    pass


class ZeroTermError(ValueError):
    """A term expected to be non-zero vanished inside the fit window."""


# --- rules -------------------------------------------------------------------

class Rule:
    """Base class for term rules.  Subclasses are immutable."""

    exact_capable = True

    def exact(self, k: int) -> Number:
        raise NotImplementedError

    def values(self, ks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_abs(self, k: int) -> float:
        v = abs(complex(self.values(np.array([k]))[0]))
        return math.log(v) if v > 0 else -math.inf


@dataclass(frozen=True)
class ZeroRule(Rule):
    def exact(self, k: int) -> Fraction:
        return Fraction(0)

    def values(self, ks: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(ks))

    def log_abs(self, k: int) -> float:
        return -math.inf


@dataclass(frozen=True)
class ExpressionRule(Rule):
    """A rational expression in ``k`` (no sign factor, no masking)."""

    expression: Expression

    def exact(self, k: int) -> Fraction:
        return self.expression.exact(k)

    def values(self, ks: np.ndarray) -> np.ndarray:
        return self.expression.values(ks)

    def log_abs(self, k: int) -> float:
        v = abs(float(self.expression.values(np.array([float(k)]))[0]))
        return math.log(v) if v > 0 else -math.inf


@dataclass(frozen=True)
class FunctionRule(Rule):
    """A float-only rule given by a vectorised function and its log-modulus."""

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    log_func: Callable[[float], float] = field(compare=False)
    exact_capable = False

    def exact(self, k: int) -> Number:
        raise NotExactError(f"rule {self.name!r} has no exact values")

    def values(self, ks: np.ndarray) -> np.ndarray:
        return self.func(np.asarray(ks, dtype=float))

    def log_abs(self, k: int) -> float:
        return self.log_func(float(k))


@dataclass(frozen=True)
class PatternRule(Rule):
    """``base(k)`` on ``k = offset + step*j`` with a sign pattern, zero elsewhere."""

    base: Rule
    step: int = 1
    offset: int = 1
    sign: SignPattern = "constant"

    @property
    def exact_capable(self) -> bool:  # type: ignore[override]
        return self.base.exact_capable

    def _on(self, k: int) -> bool:
        return k >= self.offset and (k - self.offset) % self.step == 0

    def _sign(self, k: int) -> int:
        if self.sign == "alternating-in-k":
            return -1 if k % 2 else 1
        if self.sign == "alternating-in-j":
            return -1 if ((k - self.offset) // self.step) % 2 else 1
        return 1

    def exact(self, k: int) -> Number:
        if not self._on(k):
            return Fraction(0)
        return self._sign(k) * self.base.exact(k)

    def values(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks)
        ki = ks.astype(np.int64)
        on = (ki >= self.offset) & ((ki - self.offset) % self.step == 0)
        out = np.zeros(ks.shape, dtype=float)
        if on.any():
            vals = np.asarray(self.base.values(ks[on]), dtype=float)
            if self.sign == "alternating-in-k":
                vals = np.where(ki[on] % 2 == 1, -vals, vals)
            elif self.sign == "alternating-in-j":
                j = (ki[on] - self.offset) // self.step
                vals = np.where(j % 2 == 1, -vals, vals)
            out[on] = vals
        return out

    def log_abs(self, k: int) -> float:
        if not self._on(k):
            return -math.inf
        return self.base.log_abs(k)


@dataclass(frozen=True)
class IndexPowerRule(Rule):
    """``k**power * inner(k)``; the chain operations build these."""

    inner: Rule
    power: int

    @property
    def exact_capable(self) -> bool:  # type: ignore[override]
        return self.inner.exact_capable

    def exact(self, k: int) -> Number:
        return Fraction(k) ** self.power * self.inner.exact(k)

    def values(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks)
        return np.power(ks.astype(float), float(self.power)) * self.inner.values(ks)

    def log_abs(self, k: int) -> float:
        return self.power * math.log(k) + self.inner.log_abs(k)


@dataclass(frozen=True)
class TabulatedRule(Rule):
    """Explicit values for ``k = 1..len(prefix)``, then ``tail`` (or zero)."""

    prefix: tuple[Number, ...]
    tail: Rule | None = None

    @property
    def exact_capable(self) -> bool:  # type: ignore[override]
        ok = all(isinstance(v, (int, Fraction)) for v in self.prefix)
        return ok and (self.tail is None or self.tail.exact_capable)

    def exact(self, k: int) -> Number:
        if k <= len(self.prefix):
            v = self.prefix[k - 1]
            if isinstance(v, float):
                raise NotExactError(f"tabulated value at k={k} is a float")
            return v
        return self.tail.exact(k) if self.tail is not None else Fraction(0)

    def values(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks)
        ki = ks.astype(np.int64)
        is_complex = any(isinstance(v, complex) for v in self.prefix)
        out = np.zeros(ks.shape, dtype=complex if is_complex else float)
        head = ki <= len(self.prefix)
        if head.any():
            table = np.array([complex(v) if is_complex else float(v) for v in self.prefix])
            out[head] = table[ki[head] - 1]
        if self.tail is not None and (~head).any():
            out[~head] = self.tail.values(ks[~head])
        return out


@dataclass(frozen=True)
class ConvolutionRule(Rule):
    """``sum_m coeffs[m] * inner(k - m)`` with ``inner(j) = 0`` for ``j < 1``.

    This is the coefficient rule of a polynomial times a power series.
    """

    coeffs: tuple[Number, ...]
    inner: Rule

    @property
    def exact_capable(self) -> bool:  # type: ignore[override]
        return self.inner.exact_capable and all(isinstance(c, (int, Fraction)) for c in self.coeffs)

    def exact(self, k: int) -> Number:
        total: Number = Fraction(0)
        for m, c in enumerate(self.coeffs):
            if c and k - m >= 1:
                total += c * self.inner.exact(k - m)
        return total

    def values(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks)
        ki = ks.astype(np.int64)
        cplx = any(isinstance(c, complex) for c in self.coeffs)
        out = np.zeros(ks.shape, dtype=complex if cplx else float)
        for m, c in enumerate(self.coeffs):
            if not c:
                continue
            src = ki - m
            ok = src >= 1
            if ok.any():
                cc = complex(c) if cplx else float(c)
                out[ok] += cc * self.inner.values(src[ok])
        return out


# --- sequences ---------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientSequence:
    """Coefficients ``a_k`` (``k >= 1``) with structural metadata.

    ``rotation`` places the series in powers of ``z/z1`` with
    ``z1 = exp(i*rotation)``; ``rotation_shift`` is the extra integer
    exponent that a center polynomial contributes after factoring in the
    rotated frame.
    """

    rule: Rule
    step: int = 1
    offset: int = 1
    sign_pattern: SignPattern = "constant"
    is_real: bool = True
    rotation: Angle = Angle(0.0, Fraction(0))
    scale: PiMultiple = ONE
    rotation_shift: int = 0
    name: str = ""

    def __post_init__(self) -> None:
        if self.step < 1:
            raise ValueError("step must be a positive integer")
        if self.offset < 1:
            raise ValueError("offset must be at least 1 (indices are 1-based)")
        if self.sign_pattern not in SIGN_PATTERNS:
            raise ValueError(f"unknown sign pattern {self.sign_pattern!r}")
        object.__setattr__(self, "rotation", Angle.coerce(self.rotation))
        if not isinstance(self.scale, PiMultiple):
            object.__setattr__(self, "scale", PiMultiple.parse(self.scale))

    # construction helpers
    @classmethod
    def from_expression(cls, text: str, *, step: int = 1, offset: int | None = None,
                        sign_pattern: SignPattern | None = None, scale: PiMultiple | str = ONE,
                        rotation: Angle | float = 0.0, name: str = "") -> CoefficientSequence:
        expr = parse_expression(text)
        offset = 1 if offset is None else offset
        detected = {"k": "alternating-in-k", "j": "alternating-in-j", None: None}[expr.sign]
        if sign_pattern is not None and detected is not None and sign_pattern != detected:
            raise ValueError(f"sign_pattern {sign_pattern!r} contradicts the expression's {detected!r} factor")
        sign = detected or sign_pattern or "constant"
        rot = Angle.coerce(rotation)
        rule = PatternRule(ExpressionRule(expr), step, offset, sign)
        scale = scale if isinstance(scale, PiMultiple) else PiMultiple.parse(scale)
        return cls(rule, step, offset, sign, rot.is_zero, rot, scale, 0, name or text)

    # evaluation
    @property
    def is_rotated(self) -> bool:
        return not self.rotation.is_zero

    def frame_exact(self, k: int) -> Number:
        """Exact ``rule(k)``: the coefficient in the rotated frame, unscaled."""
        if not self.rule.exact_capable:
            raise NotExactError(f"sequence {self.name!r} has no exact coefficients")
        return self.rule.exact(k)

    def exact_coefficient(self, k: int) -> PiMultiple:
        """``a_k`` as an exact ``PiMultiple``.

        Only possible where the rotation phase is exactly one, i.e. for
        unrotated sequences or at ``k == rotation_shift``, and for zeros.
        """
        v = self.frame_exact(k)
        if not isinstance(v, (int, Fraction)):
            raise NotExactError(f"coefficient {k} of {self.name!r} is not rational")
        if v != 0 and self.is_rotated and k != self.rotation_shift:
            raise NotExactError(f"coefficient {k} carries a non-trivial rotation phase")
        return self.scale * Fraction(v)

    def terms(self, ks: Sequence[int] | np.ndarray) -> np.ndarray:
        """Complex float coefficients at the given indices."""
        ks = np.asarray(ks, dtype=np.int64)
        vals = np.asarray(self.rule.values(ks)) * float(self.scale)
        if self.is_rotated:
            ph = (ks - self.rotation_shift).astype(float) * self.rotation.radians
            return vals * np.exp(-1j * ph)
        return vals.astype(complex)

    def term(self, k: int) -> complex:
        return complex(self.terms([k])[0])

    def prefix(self, n: int) -> np.ndarray:
        """Coefficients ``a_1..a_n``."""
        return self.terms(np.arange(1, n + 1))

    def log_abs(self, k: int) -> float:
        s = abs(float(self.scale))
        if s == 0:
            return -math.inf
        return math.log(s) + self.rule.log_abs(k)

    def pattern_indices(self, k_lo: int, k_hi: int) -> np.ndarray:
        """Indices in ``[k_lo, k_hi]`` where the step pattern allows non-zero terms."""
        start = max(k_lo, self.offset)
        r = (start - self.offset) % self.step
        if r:
            start += self.step - r
        return np.arange(start, k_hi + 1, self.step, dtype=np.int64)

    def with_metadata(self, **changes) -> CoefficientSequence:
        return replace(self, **changes)


def _merge_power(rule: Rule, power: int) -> Rule:
    if isinstance(rule, IndexPowerRule):
        p = rule.power + power
        return rule.inner if p == 0 else IndexPowerRule(rule.inner, p)
    return IndexPowerRule(rule, power)


def log_derivative(seq: CoefficientSequence) -> CoefficientSequence:
    """Coefficients of ``z w'(z)``: ``a_k -> k a_k``."""
    return replace(seq, rule=_merge_power(seq.rule, 1), name=f"logd({seq.name})")


def log_integral(seq: CoefficientSequence) -> CoefficientSequence:
    """Coefficients of the zero-constant logarithmic primitive: ``a_k -> a_k / k``."""
    return replace(seq, rule=_merge_power(seq.rule, -1), name=f"logi({seq.name})")


# --- decay fitting -------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    """``|a_k| ~ amplitude / k**exponent`` fitted over ``window``."""

    amplitude: float
    exponent: float
    window: tuple[int, int]
    residual: float

    def __post_init__(self) -> None:
        lo, hi = self.window
        if lo < 1 or hi <= lo:
            raise ValueError(f"invalid window {self.window}")
        if self.residual < 0:
            raise ValueError("residual must be non-negative")

    @property
    def is_power_law(self) -> bool:
        return self.residual <= POWER_LAW_RESIDUAL_THRESHOLD

    def as_dict(self) -> dict:
        return {"amplitude": self.amplitude, "exponent": self.exponent,
                "window": list(self.window), "residual": self.residual}


MIN_FIT_TERMS = 8


def fit_decay(seq: CoefficientSequence, k_lo: int, k_hi: int) -> DecayFit:
    """Least-squares line through ``(log k, log|a_k|)`` over the non-zero pattern terms."""
    if k_lo < 1 or k_hi <= k_lo:
        raise WindowTooSmallError(f"invalid window [{k_lo}, {k_hi}]")
    ks = seq.pattern_indices(k_lo, k_hi)
    if len(ks) < MIN_FIT_TERMS:
        raise WindowTooSmallError(
            f"window [{k_lo}, {k_hi}] holds {len(ks)} pattern terms, need {MIN_FIT_TERMS}")
    mags = np.abs(seq.terms(ks))
    if np.any(mags == 0):
        bad = int(ks[np.argmax(mags == 0)])
        raise ZeroTermError(f"a_{bad} vanishes inside the fit window; shift the window")
    x = np.log(ks.astype(float))
    y = np.log(mags)
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    return DecayFit(float(math.exp(intercept)), float(-slope), (int(k_lo), int(k_hi)), rms)


def local_exponents(seq: CoefficientSequence, k_lo: int, k_hi: int, pieces: int = 4) -> list[float]:
    """Decay exponents fitted on consecutive log-spaced sub-windows."""
    edges = np.unique(np.geomspace(k_lo, k_hi, pieces + 1).astype(np.int64))
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        try:
            out.append(fit_decay(seq, int(lo), int(hi)).exponent)
        except (WindowTooSmallError, ZeroTermError):
            continue
    return out


def is_super_polynomial(seq: CoefficientSequence, k_lo: int, k_hi: int) -> bool:
    """True when the local decay exponent keeps growing over the window.

    That is the signature of decay faster than any power (``exp(-sqrt k)``):
    every logarithmic derivative still decays.
    """
    exps = local_exponents(seq, k_lo, k_hi)
    if len(exps) < 3:
        return False
    return all(b > a for a, b in zip(exps, exps[1:])) and exps[-1] > exps[0] + 1.0


# --- ratio probe -----------------------------------------------------------------

RATIO_PROBE_POINTS = (10**3, 10**6, 10**9, 10**12)
RADIUS_TOLERANCE = 1e-6


@dataclass(frozen=True)
class RatioProbe:
    """Radius-of-convergence estimates ``|a_k / a_{k+L}|**(1/L)`` with ``L ~ k``."""

    radius: float
    estimates: tuple[tuple[int, float], ...]

    @property
    def unit_radius(self) -> bool:
        return abs(self.radius - 1.0) <= RADIUS_TOLERANCE


def ratio_radius(seq: CoefficientSequence, points: Sequence[int] = RATIO_PROBE_POINTS) -> RatioProbe:
    """Ratio test over a span comparable to ``k``, evaluated in log space.

    A one-step ratio never settles for bounded wobbles such as
    ``(2 + sin k) / k**2``; spanning ``k .. 2k`` gives the same limit
    whenever the one-step ratio converges and still reaches 1 here.
    """
    est = []
    for k in points:
        ks = seq.pattern_indices(k, k + seq.step)
        if len(ks) == 0:
            continue
        k0 = int(ks[0])
        span = max(seq.step, (k0 // seq.step) * seq.step)
        la, lb = seq.log_abs(k0), seq.log_abs(k0 + span)
        if not (math.isfinite(la) and math.isfinite(lb)):
            continue
        est.append((k0, math.exp((la - lb) / span)))
    if not est:
        raise ZeroTermError("ratio probe found no non-zero terms")
    return RatioProbe(est[-1][1], tuple(est))


# --- monotonicity probe --------------------------------------------------------------

DEFAULT_PROBE_WINDOW = (32, 4096)


def monotone_direction(seq: CoefficientSequence, window: tuple[int, int] = DEFAULT_PROBE_WINDOW,
                       rtol: float = 1e-12) -> str | None:
    """'decreasing', 'increasing' (both allow ties), or None for non-monotone moduli."""
    ks = seq.pattern_indices(*window)
    if len(ks) < 2:
        return None
    mags = np.abs(seq.terms(ks))
    d = np.diff(mags)
    slack = rtol * np.maximum(mags[:-1], mags[1:])
    if np.all(d <= slack):
        return "decreasing"
    if np.all(d >= -slack):
        return "increasing"
    return None


def derive_metadata(rule: Rule, probe_k: int = 256) -> tuple[int, int, SignPattern]:
    """Step, offset and eventual sign pattern observed for ``k <= probe_k``."""
    ks = np.arange(1, probe_k + 1)
    if rule.exact_capable:
        vals = [rule.exact(int(k)) for k in ks]
        nz = [int(k) for k, v in zip(ks, vals) if v != 0]
        reals = [float(v) if isinstance(v, (int, Fraction)) else complex(v).real
                 for k, v in zip(ks, vals) if v != 0]
        all_real = all(isinstance(v, (int, Fraction)) or complex(v).imag == 0 for v in vals)
    else:
        arr = np.asarray(rule.values(ks))
        mask = np.abs(arr) > 0
        nz = [int(k) for k in ks[mask]]
        reals = list(np.real(arr[mask]))
        all_real = bool(np.all(np.imag(arr) == 0)) if np.iscomplexobj(arr) else True
    if not nz:
        return 1, 1, "constant"
    offset = nz[0]
    step = 0
    for k in nz[1:]:
        step = math.gcd(step, k - offset)
    step = step or 1
    if not all_real:
        return step, offset, "mixed"
    tail = [(k, s) for k, s in zip(nz, reals) if k > probe_k // 2]
    if len(tail) < 2:
        return step, offset, "constant"
    signs = [(k, 1 if s > 0 else -1) for k, s in tail]
    if all(s == signs[0][1] for _, s in signs):
        return step, offset, "constant"
    if all(s * (-1 if k % 2 else 1) == signs[0][1] * (-1 if signs[0][0] % 2 else 1) for k, s in signs):
        return step, offset, "alternating-in-k"
    jpar = [(((k - offset) // step) % 2, s) for k, s in signs]
    if all(s * (-1 if j else 1) == jpar[0][1] * (-1 if jpar[0][0] else 1) for j, s in jpar):
        return step, offset, "alternating-in-j"
    return step, offset, "mixed"


def zero_sequence(name: str = "zero") -> CoefficientSequence:
    return CoefficientSequence(ZeroRule(), name=name)


def expsqrt_sequence() -> CoefficientSequence:
    """``a_k = exp(-sqrt k)``: decays faster than every power."""
    rule = FunctionRule("expsqrt", lambda k: np.exp(-np.sqrt(k)), lambda k: -math.sqrt(k))
    return CoefficientSequence(rule, name="expsqrt")
