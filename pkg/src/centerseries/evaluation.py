"""Numerical evaluation on and inside the unit circle.

The complex value of a series at ``z = rho * exp(i*theta)`` has the cosine
series as its real part and the sine series as its imaginary part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np

from .center import CenterFactorization, CenterPolynomial
from .coeffs import CoefficientSequence, ZeroRule

Method = Literal["direct", "center", "closed-form-oracle"]

DEFAULT_EXCLUSION_WINDOW = 1e-6
CHUNK = 1 << 16


class SpecialPointError(ValueError):
    """The query angle sits inside the exclusion window of a root."""

    def __init__(self, message: str, report: EvaluationReport | None = None):
        super().__init__(message)
        self.report = report


class ThetaZeroError(ValueError):
    pass


class ShapeNotCataloguedError(ValueError):
    pass


@dataclass(frozen=True)
class EvalQuery:
    theta: float
    rho: float = 1.0
    max_terms: int = 100_000
    tolerance: float = 1e-8
    method: Method = "direct"

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class EvaluationReport:
    """``error_estimate`` is a heuristic estimate, not a rigorous bound."""

    value: complex | None
    terms_used: int
    error_estimate: float
    method: str
    special_point: bool = False
    converged: bool = True
    theta: float = 0.0

    @property
    def f_c(self) -> float | None:
        return None if self.value is None else self.value.real

    @property
    def f_s(self) -> float | None:
        return None if self.value is None else self.value.imag

    def shifted(self, constant: complex) -> EvaluationReport:
        if self.value is None or constant == 0:
            return self
        return replace(self, value=self.value + constant)

    def as_row(self) -> dict:
        return {"theta": self.theta, "f_c": self.f_c, "f_s": self.f_s,
                "terms_used": self.terms_used, "error_estimate": self.error_estimate,
                "special_point": self.special_point}


# --- helpers -----------------------------------------------------------------

def effective_angle(seq: CoefficientSequence, theta: float) -> float:
    """Phase advance between consecutive non-zero terms at ``theta``."""
    t = theta - seq.rotation.radians if seq.is_rotated else theta
    if seq.sign_pattern == "alternating-in-k":
        t += math.pi
    phi = seq.step * t
    if seq.sign_pattern == "alternating-in-j":
        phi += math.pi
    return phi


def dirichlet_radius(theta: float) -> float:
    s = abs(math.sin(theta / 2))
    return math.inf if s == 0 else 1.0 / (2.0 * s)


def envelope_estimate(seq: CoefficientSequence, theta: float, n: int) -> float:
    """``|a_N| * R(phi)``: summation-by-parts size of the tail after ``n`` terms."""
    ks = seq.pattern_indices(max(1, n - seq.step + 1), n)
    if len(ks) == 0:
        ks = seq.pattern_indices(n, n + seq.step)
    last = abs(seq.term(int(ks[-1]))) if len(ks) else 0.0
    if last == 0:
        return 0.0
    return last * dirichlet_radius(effective_angle(seq, theta))


def _chunk_sum(seq: CoefficientSequence, z_angle: float, rho: float, k0: int, k1: int) -> complex:
    ks = seq.pattern_indices(k0, k1)
    if len(ks) == 0:
        return 0j
    a = seq.terms(ks)
    ph = np.exp(1j * (ks.astype(float) * z_angle))
    if rho != 1.0:
        ph = ph * np.power(rho, ks.astype(float))
    return complex(np.sum(a * ph))


def partial_sum(seq: CoefficientSequence, theta: float, n: int, rho: float = 1.0) -> complex:
    """``sum_{k<=n} a_k rho^k e^{ik theta}`` with a fixed chunk order."""
    total = 0j
    for k0 in range(1, n + 1, CHUNK):
        total += _chunk_sum(seq, theta, rho, k0, min(n, k0 + CHUNK - 1))
    return total


def cumulative_sums(seq: CoefficientSequence, theta: float, k0: int, k1: int,
                    start: complex = 0j) -> np.ndarray:
    """Running partial sums ``S_k0 .. S_k1`` given ``start = S_{k0 - 1}``."""
    ks = np.arange(k0, k1 + 1, dtype=np.int64)
    terms = seq.terms(ks) * np.exp(1j * (ks.astype(float) * theta))
    return start + np.cumsum(terms)


# --- direct ------------------------------------------------------------------------

def eval_direct(seq: CoefficientSequence, q: EvalQuery) -> EvaluationReport:
    if q.rho == 0.0 or isinstance(seq.rule, ZeroRule):
        return EvaluationReport(0j, 0, 0.0, "direct", theta=q.theta)
    total = 0j
    n = 0
    size = 1024
    est = math.inf
    while n < q.max_terms:
        hi = min(q.max_terms, n + size)
        total += _chunk_sum(seq, q.theta, q.rho, n + 1, hi)
        n = hi
        est = _direct_tail(seq, q, n)
        if est <= q.tolerance:
            break
        size = min(2 * size, CHUNK * 16)
    return EvaluationReport(total, n, est, "direct", converged=est <= q.tolerance, theta=q.theta)


def _direct_tail(seq: CoefficientSequence, q: EvalQuery, n: int) -> float:
    if q.rho < 1.0:
        ks = seq.pattern_indices(n + 1, n + seq.step)
        if len(ks) == 0:
            return 0.0
        k = int(ks[0])
        lead = math.exp(seq.log_abs(k) + k * math.log(q.rho))
        return lead / (1.0 - q.rho ** seq.step)
    return envelope_estimate(seq, q.theta, n)


# --- center --------------------------------------------------------------------------

def _check_special(poly: CenterPolynomial, theta: float, window: float, method: str) -> None:
    d = poly.nearest_root_distance(theta)
    if d < window:
        rep = EvaluationReport(None, 0, math.inf, method, special_point=True,
                               converged=False, theta=theta)
        raise SpecialPointError(
            f"theta = {theta!r} is within {window:g} rad of a root of the center polynomial", rep)


def _center_tail(fact: CenterFactorization, n: int) -> float:
    """Estimate of ``sum_{k>n} |b_k|`` from the fitted decay of the residual."""
    res = fact.residual
    probe = res.pattern_indices(n + 1, max(n + 1, 4 * n, fact.window[1]))
    if len(probe) == 0:
        return 0.0
    fit = fact.decay_after
    if fit is None or not fit.is_power_law:
        tail = np.abs(res.terms(probe))
        return float(np.sum(tail)) if np.any(tail) else 0.0
    p = fit.exponent
    if p <= 1.0:
        return math.inf
    return fit.amplitude / ((p - 1.0) * res.step * n ** (p - 1.0))


def eval_center(fact: CenterFactorization, q: EvalQuery,
                window: float = DEFAULT_EXCLUSION_WINDOW) -> EvaluationReport:
    """``(sum b_k z^k) / P_N(z)`` with an absolutely-convergent tail estimate."""
    poly = fact.polynomial
    if q.rho == 1.0:
        _check_special(poly, q.theta, window, "center")
        pz = poly.at_angle(q.theta)
    else:
        pz = poly(q.rho * complex(math.cos(q.theta), math.sin(q.theta)))
    if q.rho == 0.0:
        return EvaluationReport(0j, 0, 0.0, "center", theta=q.theta)
    res = fact.residual
    total = 0j
    n = 0
    size = 256
    est = math.inf
    while n < q.max_terms:
        hi = min(q.max_terms, n + size)
        total += _chunk_sum(res, q.theta, q.rho, n + 1, hi)
        n = hi
        tail = _center_tail(fact, n)
        if q.rho < 1.0:
            tail = min(tail, _direct_tail(res, q, n))
        if not math.isfinite(tail):
            tail = envelope_estimate(res, q.theta, n)
        est = tail / abs(pz)
        if est <= q.tolerance:
            break
        size = min(2 * size, CHUNK * 16)
    return EvaluationReport(total / pz, n, est, "center", converged=est <= q.tolerance, theta=q.theta)


def center_partial(fact: CenterFactorization, theta: float, n: int,
                   window: float = DEFAULT_EXCLUSION_WINDOW) -> complex:
    """Fixed-length center evaluation on the unit circle."""
    _check_special(fact.polynomial, theta, window, "center")
    return partial_sum(fact.residual, theta, n) / fact.polynomial.at_angle(theta)


# --- Dirichlet kernel ----------------------------------------------------------------

def dirichlet_partial_sums(theta: float, n_max: int) -> np.ndarray:
    """``D_1 .. D_{n_max}`` with ``D_N = sum_{k=1}^N exp(ik theta)``.

    Phases and running sums use extended precision so the results are
    accurate to a few ulp of ``|D_N|``.
    """
    if theta == 0.0 or math.remainder(theta, 2 * math.pi) == 0.0:
        raise ThetaZeroError("the Dirichlet partial sums are unbounded at theta = 0")
    if n_max < 1:
        return np.zeros(0, dtype=complex)
    ks = np.arange(1, n_max + 1, dtype=np.longdouble)
    ph = ks * np.longdouble(theta)
    re = np.cumsum(np.cos(ph))
    im = np.cumsum(np.sin(ph))
    return re.astype(float) + 1j * im.astype(float)


def dirichlet_disk(theta: float) -> tuple[complex, float]:
    """Center and radius of the circle through all ``D_N`` (sums from ``k = 1``).

    ``D_N = v/(1 - v) - v^{N+1}/(1 - v)``, so every partial sum lies on the
    circle of radius ``1/(2|sin(theta/2)|)`` about ``v/(1 - v)``.
    """
    if math.sin(theta / 2) == 0:
        raise ThetaZeroError("no disk at theta = 0")
    c = complex(-0.5, 0.5 / math.tan(theta / 2))
    return c, dirichlet_radius(theta)


def dirichlet_disk_from_zero(theta: float) -> tuple[complex, float]:
    """The same circle for sums that include the ``k = 0`` term: center shifted by one."""
    c, r = dirichlet_disk(theta)
    return c + 1, r


# --- Abel limits ---------------------------------------------------------------------

@dataclass(frozen=True)
class AbelResult:
    value: complex
    error_estimate: float
    radii: tuple[float, ...]
    samples: tuple[complex, ...]


def _neville_at_zero(xs: Sequence[float], ys: Sequence[complex]) -> complex:
    p = list(ys)
    n = len(xs)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i])
    return p[0]


def abel_limit(seq: CoefficientSequence, theta: float, rho_schedule: Sequence[float],
               tolerance: float = 1e-14, max_terms: int = 10_000_000) -> AbelResult:
    """Extrapolate ``w(rho e^{i theta})`` to ``rho -> 1`` by a polynomial in ``1 - rho``."""
    radii = tuple(float(r) for r in rho_schedule)
    if not radii:
        raise ValueError("empty radius schedule")
    if any(not 0.0 <= r < 1.0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("rho_schedule must be strictly increasing with every radius in [0, 1)")
    samples = tuple(eval_direct(seq, EvalQuery(theta, r, max_terms, tolerance)).value
                    for r in radii)
    xs = [1.0 - r for r in radii]
    value = _neville_at_zero(xs, samples)
    if len(radii) > 1:
        err = abs(value - _neville_at_zero(xs[1:], samples[1:]))
    else:
        err = math.inf
    return AbelResult(value, err, radii, samples)


# --- closed-form prefactors ------------------------------------------------------------

def _cot(x: float) -> float:
    return math.cos(x) / math.sin(x)


def pole_prefactor_closed_form(poly: CenterPolynomial, theta: float, power: int = 1,
                               window: float = DEFAULT_EXCLUSION_WINDOW) -> complex:
    """Closed form of ``z**power / P(z)`` on ``|z| = 1`` for the catalogued shapes.

    Shapes: a single root ``z - z1`` (power 1), ``z^2 - 1`` and ``z^2 + 1``
    (power 1 or 2).
    """
    roots = poly.roots
    labels = sorted(r.over_pi for r in roots) if all(r.over_pi is not None for r in roots) else None
    if len(roots) == 1 and power == 1:
        _check_special(poly, theta, window, "closed-form-oracle")
        d = theta - roots[0].radians
        return complex(0.5, -0.5 * _cot(d / 2))
    if len(roots) == 2 and labels is not None and power in (1, 2):
        _check_special(poly, theta, window, "closed-form-oracle")
        if labels == [0, 1]:
            # z^2 - 1
            if power == 1:
                return complex(0.0, -1.0 / (2.0 * math.sin(theta)))
            return complex(0.5, -0.5 * _cot(theta))
        if labels == [-0.5, 0.5]:
            # z^2 + 1
            if power == 1:
                return complex(1.0 / (2.0 * math.cos(theta)), 0.0)
            return complex(0.5, 0.5 * math.tan(theta))
    raise ShapeNotCataloguedError(
        f"no closed form for z^{power}/P(z) with roots/pi = {[r.label() for r in roots]}")


def prefactor_numeric(poly: CenterPolynomial, theta: float, power: int = 1) -> complex:
    z = complex(math.cos(theta), math.sin(theta))
    return z**power / poly.at_angle(theta)
