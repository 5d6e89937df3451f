"""JSON series descriptors.

A descriptor is an object such as::

    {"name": "my-square", "kind": "sine", "rule": "1/k", "step": 2,
     "offset": 1, "sign_pattern": "constant", "scale": "4/pi",
     "rotation": 0.0}

``rule`` is either the name of a built-in corpus entry or a rational
expression in ``k`` (see ``centerseries.expr``).  ``rotation`` is a number
in radians or ``{"over_pi": "1/3"}``.  An optional ``singularities`` list
(``[{"angle_over_pi": "1/2", "polarity": "hard", "degree": 0}, ...]``)
overrides detection; ``degree`` may be ``"infinite"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .coeffs import SIGN_PATTERNS, CoefficientSequence
from .corpus import CORPUS, CorpusEntry, delta_entry
from .exact import Angle, PiMultiple
from .expr import ExpressionError
from .singularity import Degree, SingularityPoint, SingularitySet

KINDS = ("sine", "cosine", "complex")
_FIELDS = {"name", "kind", "rule", "step", "offset", "sign_pattern", "rotation", "scale",
           "singularities", "constant"}


class DescriptorError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


@dataclass(frozen=True)
class SeriesSpec:
    name: str
    kind: str
    sequence: CoefficientSequence
    singularities: SingularitySet | None = None
    constant: PiMultiple = PiMultiple(0)
    entry: CorpusEntry | None = None


def _int_field(d: dict, key: str, default: int | None, minimum: int) -> int | None:
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise DescriptorError(f"expected an integer, got {v!r}", key)
    if v < minimum:
        raise DescriptorError(f"must be >= {minimum}, got {v}", key)
    return v


def _angle(v: Any, path: str) -> Angle:
    if isinstance(v, bool):
        raise DescriptorError("expected radians or {\"over_pi\": ...}", path)
    if isinstance(v, (int, float)):
        return Angle.from_radians(float(v))
    if isinstance(v, dict) and set(v) == {"over_pi"}:
        try:
            return Angle.pi_multiple(Fraction(str(v["over_pi"])))
        except (ValueError, ZeroDivisionError):
            raise DescriptorError(f"bad rational {v['over_pi']!r}", path + ".over_pi") from None
    raise DescriptorError("expected radians or {\"over_pi\": ...}", path)


def _singularities(v: Any) -> SingularitySet:
    if not isinstance(v, list):
        raise DescriptorError("expected a list", "singularities")
    pts = []
    for i, item in enumerate(v):
        path = f"singularities[{i}]"
        if not isinstance(item, dict):
            raise DescriptorError("expected an object", path)
        if "angle_over_pi" in item:
            ang = _angle({"over_pi": item["angle_over_pi"]}, path)
        elif "angle" in item:
            ang = _angle(item["angle"], path + ".angle")
        else:
            raise DescriptorError("needs 'angle_over_pi' or 'angle'", path)
        pol = item.get("polarity", "hard")
        if pol not in ("hard", "soft"):
            raise DescriptorError(f"expected 'hard' or 'soft', got {pol!r}", path + ".polarity")
        deg = item.get("degree", 0)
        if deg == "infinite":
            n = None
        elif isinstance(deg, int) and not isinstance(deg, bool) and deg >= 0:
            n = deg
        else:
            raise DescriptorError(f"expected a non-negative integer or 'infinite', got {deg!r}",
                                  path + ".degree")
        pts.append(SingularityPoint(ang, Degree(pol, n)))
    return SingularitySet(tuple(pts))


def _pi_constant(v: Any, key: str) -> PiMultiple:
    try:
        return PiMultiple.parse(v if isinstance(v, str) else Fraction(v))
    except (ValueError, TypeError):
        raise DescriptorError(f"expected a constant like '4/pi', got {v!r}", key) from None


def from_dict(d: Any) -> SeriesSpec:
    if not isinstance(d, dict):
        raise DescriptorError("descriptor must be a JSON object")
    unknown = set(d) - _FIELDS
    if unknown:
        raise DescriptorError(f"unknown field(s) {sorted(unknown)}", sorted(unknown)[0])
    if "rule" not in d:
        raise DescriptorError("missing required field", "rule")
    rule = d["rule"]
    if not isinstance(rule, str):
        raise DescriptorError("expected a builtin name or expression string", "rule")
    kind = d.get("kind")
    if kind is not None and kind not in KINDS:
        raise DescriptorError(f"expected one of {KINDS}, got {kind!r}", "kind")
    sings = _singularities(d["singularities"]) if "singularities" in d else None
    name = d.get("name", rule)
    if not isinstance(name, str):
        raise DescriptorError("expected a string", "name")

    if rule in CORPUS:
        entry = CORPUS[rule]
        if "rotation" in d and entry.name == "delta":
            entry = delta_entry(_angle(d["rotation"], "rotation"))
        for key in ("step", "offset", "sign_pattern"):
            if key in d and d[key] != getattr(entry.source, key):
                raise DescriptorError(
                    f"builtin '{rule}' has {key}={getattr(entry.source, key)!r}, got {d[key]!r}", key)
        return SeriesSpec(name, kind or entry.kind, entry.source,
                          sings or entry.singularities, entry.constant, entry)

    step = _int_field(d, "step", 1, 1)
    offset = _int_field(d, "offset", None, 1)
    sign = d.get("sign_pattern")
    if sign is not None and sign not in SIGN_PATTERNS[:3]:
        raise DescriptorError(f"expected one of {SIGN_PATTERNS[:3]}, got {sign!r}", "sign_pattern")
    rotation = _angle(d["rotation"], "rotation") if "rotation" in d else Angle.pi_multiple(0)
    scale = _pi_constant(d["scale"], "scale") if "scale" in d else PiMultiple(1)
    constant = _pi_constant(d["constant"], "constant") if "constant" in d else PiMultiple(0)
    try:
        seq = CoefficientSequence.from_expression(rule, step=step, offset=offset, sign_pattern=sign,
                                                  scale=scale, rotation=rotation, name=name)
    except ExpressionError as exc:
        raise DescriptorError(str(exc), "rule") from None
    except ValueError as exc:
        raise DescriptorError(str(exc), "sign_pattern" if "sign" in str(exc) else "rule") from None
    try:
        for k in seq.pattern_indices(1, 256):
            seq.rule.exact(int(k))
    except ZeroDivisionError as exc:
        raise DescriptorError(str(exc), "rule") from None
    return SeriesSpec(name, kind or "complex", seq, sings, constant)


def loads(text: str) -> SeriesSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    return from_dict(data)


def load(path: str | Path) -> SeriesSpec:
    return loads(Path(path).read_text())


def resolve(arg: str) -> SeriesSpec:
    """A corpus name or the path of a descriptor file."""
    if arg in CORPUS:
        return from_dict({"rule": arg, "name": arg})
    p = Path(arg)
    if not p.exists():
        raise DescriptorError(f"{arg!r} is neither a corpus entry nor a descriptor file")
    return load(p)
