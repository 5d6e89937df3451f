"""Center polynomials and the factorization ``C_z = P_N(z) * S_z``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .coeffs import (DEFAULT_PROBE_WINDOW, CoefficientSequence, ConvolutionRule, DecayFit,
                     WindowTooSmallError, ZeroRule, ZeroTermError, derive_metadata, fit_decay,
                     monotone_direction)
from .exact import Angle, Number, expand_roots
from .singularity import SingularitySet

# Fit window for the before/after decay comparison.
DECAY_WINDOW = (50, 5000)


class EmptySetError(ValueError):
    pass


class NotConjugateClosedError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


def _realify(coeffs: list[Number]) -> list[Number]:
    out = []
    for c in coeffs:
        if isinstance(c, complex):
            out.append(c.real)
        else:
            out.append(c)
    return out


def _conjugate_pairs(roots: Sequence[Angle]) -> bool:
    left = list(roots)
    while left:
        a = left.pop()
        if a.same_point(-a):
            continue
        for i, b in enumerate(left):
            if b.same_point(-a):
                del left[i]
                break
        else:
            return False
    return True


def _real_expand(roots: Sequence[Angle]) -> list[float]:
    """Float expansion from real quadratic factors ``z^2 - 2cos(phi) z + 1``."""
    left = list(roots)
    poly = np.array([1.0])
    while left:
        a = left.pop()
        if a.same_point(-a):
            factor = np.array([-a.unit().real, 1.0])
        else:
            for i, b in enumerate(left):
                if b.same_point(-a):
                    del left[i]
                    break
            factor = np.array([1.0, -2.0 * math.cos(a.radians), 1.0])
        poly = np.convolve(poly, factor)
    return [float(c) for c in poly]


@dataclass(frozen=True)
class CenterPolynomial:
    """Monic ``P_N(z) = prod(z - exp(i*angle))``; ``coeffs`` low degree first."""

    roots: tuple[Angle, ...]
    coeffs: tuple[Number, ...]

    @classmethod
    def from_roots(cls, roots: Sequence[Angle | float]) -> CenterPolynomial:
        roots = tuple(sorted((Angle.coerce(r) for r in roots), key=Angle.sort_key))
        if not _conjugate_pairs(roots):
            return cls(roots, tuple(expand_roots(roots)))
        if all(a.over_pi is not None for a in roots):
            # real algebraic coefficients such as sqrt(2) come back complex
            return cls(roots, tuple(_realify(expand_roots(roots))))
        return cls(roots, tuple(_real_expand(roots)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_real(self) -> bool:
        return not any(isinstance(c, complex) and c.imag != 0 for c in self.coeffs)

    def __call__(self, z: complex | np.ndarray) -> complex | np.ndarray:
        out = 0j * np.asarray(z)
        for c in reversed(self.coeffs):
            out = out * z + complex(c)
        return out if np.ndim(out) else complex(out)

    def at_angle(self, theta: float | np.ndarray) -> complex | np.ndarray:
        """``P(e^{i theta})`` as a product of root factors.

        The product form keeps relative accuracy close to the roots, where
        the expanded form cancels.
        """
        theta = np.asarray(theta, dtype=float)
        out = np.ones(theta.shape, dtype=complex)
        for r in self.roots:
            d = theta - r.radians
            # exp(i t) - exp(i r) = 2i sin(d/2) exp(i (t + r)/2)
            out = out * (2j * np.sin(d / 2) * np.exp(1j * (theta + r.radians) / 2))
        return out if out.ndim else complex(out)

    def times(self, other: CenterPolynomial) -> CenterPolynomial:
        return CenterPolynomial.from_roots(self.roots + other.roots)

    def nearest_root_distance(self, theta: float) -> float:
        return min((r.distance(theta) for r in self.roots), default=math.inf)

    def as_dict(self) -> dict:
        def enc(c):
            if isinstance(c, Fraction):
                return str(c)
            if isinstance(c, complex):
                return [c.real, c.imag]
            return c
        return {"roots_over_pi": [r.label() for r in self.roots],
                "coeffs": [enc(c) for c in self.coeffs]}


def build_polynomial(sset: SingularitySet, is_real: bool) -> CenterPolynomial:
    if len(sset) == 0:
        raise EmptySetError("cannot build a center polynomial from an empty singularity set")
    roots = sset.angles
    if is_real and not _conjugate_pairs(roots):
        raise NotConjugateClosedError(
            "a real sequence needs conjugate-paired roots; got angles/pi = "
            + ", ".join(r.label() for r in roots))
    return CenterPolynomial.from_roots(roots)


@dataclass(frozen=True)
class CenterFactorization:
    polynomial: CenterPolynomial
    residual: CoefficientSequence
    source: CoefficientSequence
    window: tuple[int, int] = field(default=DECAY_WINDOW)

    @cached_property
    def decay_before(self) -> DecayFit | None:
        return _safe_fit(self.source, self.window)

    @cached_property
    def decay_after(self) -> DecayFit | None:
        return _safe_fit(self.residual, self.window)

    def residual_preview(self, n: int = 16) -> list:
        return [complex(v) for v in self.residual.prefix(n)]

    def as_report(self) -> dict:
        def fit(d):
            return d.as_dict() if d is not None else None
        prev = []
        for v in self.residual_preview():
            prev.append(v.real if v.imag == 0 else [v.real, v.imag])
        return {"poly": self.polynomial.as_dict(), "residual_preview": prev,
                "decay_before": fit(self.decay_before), "decay_after": fit(self.decay_after)}


def _safe_fit(seq: CoefficientSequence, window: tuple[int, int]) -> DecayFit | None:
    try:
        return fit_decay(seq, *window)
    except (WindowTooSmallError, ZeroTermError):
        return None


def frame_polynomial(seq: CoefficientSequence, poly: CenterPolynomial) -> list[Number]:
    """Coefficients of ``P`` written in the sequence's rotated variable ``u = z/z1``.

    ``P(z) = z1**N * Q(u)`` where ``Q`` has the roots shifted by ``-rotation``.
    """
    if not seq.is_rotated:
        return list(poly.coeffs)
    shifted = tuple(r - seq.rotation for r in poly.roots)
    return expand_roots(shifted)


def factor(seq: CoefficientSequence, poly: CenterPolynomial,
           window: tuple[int, int] = DECAY_WINDOW) -> CenterFactorization:
    """Residual ``b_k = sum_m p_m a_{k-m}`` of ``P_N(z) S_z`` (with ``a_j = 0`` for ``j < 1``)."""
    q = frame_polynomial(seq, poly)
    if isinstance(seq.rule, ZeroRule):
        rule = seq.rule
    else:
        rule = ConvolutionRule(tuple(q), seq.rule)
    step, offset, sign = derive_metadata(rule)
    is_real = seq.is_real and poly.is_real
    if seq.is_rotated:
        vals = np.asarray(rule.values(np.arange(1, 257)))
        nz = np.nonzero(np.abs(vals) > 0)[0] + 1
        shift = seq.rotation_shift + poly.degree
        is_real = bool(np.all(np.imag(vals) == 0)) and bool(np.all(nz == shift))
    residual = CoefficientSequence(
        rule, step, offset, sign, is_real, seq.rotation, seq.scale,
        seq.rotation_shift + poly.degree, f"center({seq.name})")
    return CenterFactorization(poly, residual, seq, window)


def factor_iterated(seq: CoefficientSequence, sets: Sequence[SingularitySet],
                    window: tuple[int, int] = DECAY_WINDOW) -> CenterFactorization:
    if not sets:
        raise EmptySetError("factor_iterated needs at least one singularity set")
    polys = [build_polynomial(s, seq.is_real) for s in sets]
    roots: tuple[Angle, ...] = ()
    for p in polys:
        roots += p.roots
    return factor(seq, CenterPolynomial.from_roots(roots), window)


def monotone_center_bound(seq: CoefficientSequence, check_terms: int = DEFAULT_PROBE_WINDOW[1]) -> float:
    """``2 a_1`` for positive non-increasing step-1 sequences.

    The residual of ``(z - 1) S_z`` telescopes, so partial sums of ``|b_k|``
    stay below ``2 a_1``.  The first ``check_terms`` are verified.
    """
    if seq.step != 1 or seq.offset != 1 or not seq.is_real or seq.is_rotated:
        raise PreconditionError("monotone_center_bound needs a real, unrotated step-1 sequence")
    a = seq.prefix(check_terms).real
    if np.any(a <= 0):
        raise PreconditionError("coefficients must be positive")
    if monotone_direction(seq, (1, check_terms)) != "decreasing":
        raise PreconditionError("coefficients must be non-increasing")
    bound = 2.0 * float(a[0])
    fact = factor(seq, CenterPolynomial.from_roots([Angle.pi_multiple(0)]))
    running = np.cumsum(np.abs(fact.residual.prefix(check_terms)))
    if np.any(running > bound * (1 + 1e-14)):
        raise PreconditionError("partial sums of |b_k| exceed 2*a_1")
    return bound
