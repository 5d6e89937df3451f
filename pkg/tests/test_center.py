import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from centerseries.center import (CenterPolynomial, EmptySetError, NotConjugateClosedError, PreconditionError,
                                 build_polynomial, factor, factor_iterated, monotone_center_bound)
from centerseries.coeffs import CoefficientSequence, fit_decay, zero_sequence
from centerseries.corpus import CORPUS
from centerseries.exact import Angle
from centerseries.singularity import Degree, SingularitySet

H0 = Degree.hard(0)


def pts(*qs, d=H0):
    return SingularitySet.of(*[(Angle.pi_multiple(Fraction(q)), d) for q in qs])


def test_build_examples():
    assert build_polynomial(pts(0), True).coeffs == (-1, 1)
    assert build_polynomial(pts(0, 1), True).coeffs == (-1, 0, 1)
    assert build_polynomial(pts(Fraction(1, 2), Fraction(-1, 2)), True).coeffs == (1, 0, 1)
    assert build_polynomial(pts(Fraction(1, 3), Fraction(-1, 3)), True).coeffs == (1, -1, 1)


def test_build_real_octagon_coefficients():
    p = build_polynomial(pts(Fraction(1, 4), Fraction(-1, 4)), True)
    assert p.is_real
    assert abs(complex(p.coeffs[1]) + math.sqrt(2)) < 1e-15


def test_build_errors():
    with pytest.raises(EmptySetError):
        build_polynomial(SingularitySet(), True)
    with pytest.raises(NotConjugateClosedError):
        build_polynomial(pts(Fraction(1, 3)), True)
    assert build_polynomial(pts(Fraction(1, 3)), False).degree == 1


def test_polynomial_vanishes_at_roots():
    p = CenterPolynomial.from_roots([Angle.pi_multiple(Fraction(m, 5)) for m in (-3, -1, 1, 3, 5)])
    for r in p.roots:
        assert abs(p(r.unit())) < 1e-13
        assert abs(p.at_angle(r.radians)) < 1e-15
    t = 0.77
    assert abs(p(cmath.exp(1j * t)) - p.at_angle(t)) < 1e-13


def test_factor_sawtooth1():
    r = CORPUS["sawtooth1"].factorization().residual
    assert [str(r.exact_coefficient(k)) for k in range(1, 5)] == ["2/pi", "1/pi", "-1/3/pi", "1/6/pi"]


def test_factor_triangular():
    r = CORPUS["triangular"].factorization().residual
    # b_k = a_{k-2} - a_k with a_k = -8/(pi k)^2 on odd k
    got = [str(r.exact_coefficient(k)) for k in range(1, 6)]
    assert got == ["8/pi^2", "0", "-64/9/pi^2", "0", "-128/225/pi^2"]


def test_factor_zero():
    fact = factor(zero_sequence(), build_polynomial(pts(0), True))
    assert np.all(fact.residual.prefix(100) == 0)


def brute_residual(seq, poly, n):
    a = [0] * (n + 1)
    for k in range(1, n + 1):
        a[k] = seq.frame_exact(k)
    p = list(poly.coeffs)
    out = []
    for k in range(1, n + 1):
        out.append(sum(p[m] * a[k - m] for m in range(len(p)) if k - m >= 1))
    return out


@pytest.mark.parametrize("name", [n for n in CORPUS if n not in ("delta", "expsqrt")])
def test_residual_brute_force(name):
    e = CORPUS[name]
    fact = e.factorization()
    want = brute_residual(e.source, fact.polynomial, 500)
    got = [fact.residual.frame_exact(k) for k in range(1, 501)]
    assert got == want
    fl = fact.residual.prefix(500)
    scale = float(e.source.scale)
    assert np.allclose(fl.real, [float(w) * scale for w in want], rtol=1e-12, atol=1e-15)


def test_residual_real_for_real_source():
    for name in ("sawtooth1", "square", "sawtooth2", "square-shifted"):
        r = CORPUS[name].factorization().residual
        assert r.is_real and np.all(r.prefix(1000).imag == 0)


def test_delta_residual_single_term():
    r = CORPUS["delta"].factorization().residual
    v = r.prefix(300)
    assert abs(v[0] + 1 / math.pi) < 1e-15 and np.all(v[1:] == 0)


def test_factor_improves_decay():
    e = CORPUS["square"]
    fact = e.factorization()
    assert abs(fact.decay_after.exponent - fact.decay_before.exponent - 1) < 0.1


def test_factor_iterated_square():
    e = CORPUS["square"]
    fact = factor_iterated(e.source, [e.singularities, e.singularities])
    assert fact.polynomial.degree == 4
    assert abs(fit_decay(fact.residual, 50, 5000).exponent - 3) < 0.1
    with pytest.raises(EmptySetError):
        factor_iterated(e.source, [])


def test_monotone_center_bound():
    assert monotone_center_bound(CoefficientSequence.from_expression("1/k")) == 2.0
    assert monotone_center_bound(CoefficientSequence.from_expression("3/k^2")) == 6.0
    with pytest.raises(PreconditionError):
        monotone_center_bound(CoefficientSequence.from_expression("k"))
    with pytest.raises(PreconditionError):
        monotone_center_bound(CoefficientSequence.from_expression("1/k", step=2))
    with pytest.raises(PreconditionError):
        monotone_center_bound(CoefficientSequence.from_expression("(-1)^k/k"))
