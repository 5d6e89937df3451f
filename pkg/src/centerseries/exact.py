"""Exact scalars used throughout the package.

``PiMultiple`` holds constants of the form ``q * pi**n`` with rational ``q``;
every prefactor of the built-in series has that shape.  ``Angle`` is a point
on the unit circle, kept as a rational multiple of pi whenever one is known.
``expand_roots`` multiplies out ``prod(z - exp(i*angle))`` exactly in the
cyclotomic field when all angles are rational multiples of pi.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence, Union

Number = Union[int, Fraction, float, complex]

# Largest denominator accepted when snapping a float angle to a multiple of pi.
MAX_ANGLE_DENOMINATOR = 720
ANGLE_SNAP_TOLERANCE = 1e-12

_PI_RE = re.compile(
    r"^\s*([+-]?\s*\d+(?:\s*/\s*\d+)?)?\s*(?:(\*|/)?\s*(pi|π)(?:\s*(?:\^|\*\*)\s*(\d+))?)?\s*$"
)


@dataclass(frozen=True)
class PiMultiple:
    """The constant ``coef * pi**pi_power``."""

    coef: Fraction
    pi_power: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "coef", Fraction(self.coef))
        if self.coef == 0:
            object.__setattr__(self, "pi_power", 0)

    @classmethod
    def parse(cls, text: str | int | float | Fraction) -> PiMultiple:
        """Parse ``"4/pi"``, ``"-8/pi^2"``, ``"2*pi"``, ``"3/4"`` or a plain number."""
        if isinstance(text, (int, Fraction)):
            return cls(Fraction(text))
        if isinstance(text, float):
            return cls(Fraction(text))
        m = _PI_RE.match(text)
        if not m or (m.group(1) is None and m.group(3) is None):
            raise ValueError(f"cannot parse constant {text!r}; expected forms like '4/pi' or '-8/pi^2'")
        coef = Fraction(m.group(1).replace(" ", "")) if m.group(1) else Fraction(1)
        power = 0
        if m.group(3):
            power = int(m.group(4) or 1)
            if m.group(2) == "/":
                power = -power
            elif m.group(1) and m.group(2) is None:
                raise ValueError(f"cannot parse constant {text!r}")
        return cls(coef, power)

    def __float__(self) -> float:
        return float(self.coef) * math.pi**self.pi_power

    def __mul__(self, other: object) -> PiMultiple:
        if isinstance(other, PiMultiple):
            return PiMultiple(self.coef * other.coef, self.pi_power + other.pi_power)
        if isinstance(other, (int, Fraction)):
            return PiMultiple(self.coef * other, self.pi_power)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self) -> PiMultiple:
        return PiMultiple(-self.coef, self.pi_power)

    def __bool__(self) -> bool:
        return self.coef != 0

    def __str__(self) -> str:
        if self.pi_power == 0:
            return str(self.coef)
        p = abs(self.pi_power)
        pi = "pi" if p == 1 else f"pi^{p}"
        if self.pi_power > 0:
            return f"{self.coef}*{pi}"
        return f"{self.coef}/{pi}"


ONE = PiMultiple(Fraction(1))


def _normalize_over_pi(q: Fraction) -> Fraction:
    # map to (-1, 1]
    q = q - 2 * math.floor((q + 1) / 2)
    if q == -1:
        q = Fraction(1)
    return q


def _normalize_radians(x: float) -> float:
    y = math.remainder(x, 2 * math.pi)
    if y <= -math.pi:
        y += 2 * math.pi
    return y


@dataclass(frozen=True)
class Angle:
    """A unit-circle position in (-pi, pi].

    ``over_pi`` is the exact rational multiple of pi when known.
    """

    radians: float
    over_pi: Fraction | None = None

    @classmethod
    def pi_multiple(cls, q: Fraction | int | str) -> Angle:
        q = _normalize_over_pi(Fraction(q))
        return cls(float(q) * math.pi, q)

    @classmethod
    def from_radians(cls, x: float, snap: bool = True) -> Angle:
        x = _normalize_radians(float(x))
        if snap:
            q = Fraction(x / math.pi).limit_denominator(MAX_ANGLE_DENOMINATOR)
            if abs(float(q) * math.pi - x) <= ANGLE_SNAP_TOLERANCE:
                return cls.pi_multiple(q)
        return cls(x, None)

    @classmethod
    def coerce(cls, value: Angle | float | int) -> Angle:
        if isinstance(value, Angle):
            return value
        return cls.from_radians(value)

    def __add__(self, other: Angle) -> Angle:
        if self.over_pi is not None and other.over_pi is not None:
            return Angle.pi_multiple(self.over_pi + other.over_pi)
        return Angle.from_radians(self.radians + other.radians)

    def __sub__(self, other: Angle) -> Angle:
        if self.over_pi is not None and other.over_pi is not None:
            return Angle.pi_multiple(self.over_pi - other.over_pi)
        return Angle.from_radians(self.radians - other.radians)

    def __neg__(self) -> Angle:
        if self.over_pi is not None:
            return Angle.pi_multiple(-self.over_pi)
        return Angle.from_radians(-self.radians)

    @property
    def is_zero(self) -> bool:
        return self.over_pi == 0 if self.over_pi is not None else self.radians == 0.0

    def distance(self, theta: float) -> float:
        """Circular distance in radians to the angle ``theta``."""
        return abs(math.remainder(theta - self.radians, 2 * math.pi))

    def same_point(self, other: Angle, tol: float = ANGLE_SNAP_TOLERANCE) -> bool:
        if self.over_pi is not None and other.over_pi is not None:
            return self.over_pi == other.over_pi
        return other.distance(self.radians) <= tol

    def unit(self) -> complex:
        """``exp(i*angle)``, exact for the quarter-turn angles."""
        if self.over_pi is not None:
            exact = {Fraction(0): 1 + 0j, Fraction(1): -1 + 0j,
                     Fraction(1, 2): 1j, Fraction(-1, 2): -1j}
            if self.over_pi in exact:
                return exact[self.over_pi]
        return complex(math.cos(self.radians), math.sin(self.radians))

    def label(self) -> str:
        """``angle/pi`` as a rational string, or a float when not rational."""
        if self.over_pi is not None:
            return str(self.over_pi)
        return repr(self.radians / math.pi)

    def sort_key(self) -> float:
        return self.radians


# --- cyclotomic arithmetic ---------------------------------------------------

def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Divide integer polynomials (low-to-high coefficients); ``den`` monic."""
    num = list(num)
    dq = len(den) - 1
    quot = [0] * max(len(num) - dq, 1)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            quot[i - dq] = c
            for j, d in enumerate(den):
                num[i - dq + j] -= c * d
    return quot, num[:dq]


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic(d)))
            assert not any(rem)
    return tuple(poly)


def _reduce_mod_cyclotomic(elem: list[Fraction], n: int) -> list[Fraction]:
    phi = cyclotomic(n)
    deg = len(phi) - 1
    work = list(elem)
    for i in range(len(work) - 1, deg - 1, -1):
        c = work[i]
        if c:
            for j, d in enumerate(phi):
                work[i - deg + j] -= c * d
    return work[:deg]


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def expand_roots(angles: Sequence[Angle], exact: bool = True) -> list[Number]:
    """Coefficients ``p_0..p_N`` of ``prod(z - exp(i*a))``, low degree first.

    When every angle is a rational multiple of pi the product is expanded
    in ``Q(zeta_n)``; coefficients that reduce to rationals are returned as
    ``Fraction``, the rest as ``complex``.  Otherwise plain complex products
    are used.
    """
    if not angles:
        return [Fraction(1)]
    if exact and all(a.over_pi is not None for a in angles):
        n = reduce(_lcm, (2 * a.over_pi.denominator for a in angles), 1)
        exps = [int(a.over_pi * n / 2) % n for a in angles]
        zero = [Fraction(0)] * n
        one = list(zero)
        one[0] = Fraction(1)
        coeffs: list[list[Fraction]] = [one]
        for m in exps:
            new = [list(zero) for _ in range(len(coeffs) + 1)]
            for i, c in enumerate(coeffs):
                # z * c
                for t in range(n):
                    new[i + 1][t] += c[t]
                # -zeta^m * c
                for t in range(n):
                    new[i][(t + m) % n] -= c[t]
            coeffs = new
        out: list[Number] = []
        for c in coeffs:
            red = _reduce_mod_cyclotomic(c, n)
            if not any(red[1:]):
                out.append(red[0] if red else Fraction(0))
            else:
                out.append(sum(complex(float(v)) * complex(math.cos(2 * math.pi * t / n),
                                                           math.sin(2 * math.pi * t / n))
                               for t, v in enumerate(red) if v))
        return out
    coeffs_c: list[complex] = [1 + 0j]
    for a in angles:
        r = a.unit()
        new_c = [0j] * (len(coeffs_c) + 1)
        for i, c in enumerate(coeffs_c):
            new_c[i + 1] += c
            new_c[i] -= r * c
        coeffs_c = new_c
    return list(coeffs_c)
