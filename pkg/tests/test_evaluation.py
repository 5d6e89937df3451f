import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from centerseries.center import CenterPolynomial
from centerseries.coeffs import CoefficientSequence, zero_sequence
from centerseries.corpus import CORPUS
from centerseries.evaluation import (EvalQuery, ShapeNotCataloguedError, SpecialPointError, ThetaZeroError,
                                     abel_limit, center_partial, dirichlet_disk, dirichlet_disk_from_zero,
                                     dirichlet_partial_sums, eval_center, eval_direct, partial_sum,
                                     pole_prefactor_closed_form, prefactor_numeric)
from centerseries.exact import Angle

SAWTOOTH = CORPUS["sawtooth1"]
SQUARE = CORPUS["square"]


def sawtooth_oracle(z):
    # -2/pi * sum (-1)^k z^k / k = (2/pi) log(1 + z)
    return (2 / math.pi) * cmath.log(1 + z)


def square_oracle(z):
    # 4/pi * sum_{odd k} z^k / k = (2/pi) log((1 + z)/(1 - z))
    return (2 / math.pi) * cmath.log((1 + z) / (1 - z))


def test_direct_inside_disk():
    for rho, th in [(0.5, 1.0), (0.9, -2.0), (0.3, 3.0)]:
        rep = eval_direct(SAWTOOTH.source, EvalQuery(th, rho, 100_000, 1e-13))
        assert rep.converged
        assert abs(rep.value - sawtooth_oracle(rho * cmath.exp(1j * th))) < 1e-12


def test_rho_zero_is_zero():
    for m in ("direct", "center"):
        q = EvalQuery(1.0, 0.0)
        rep = eval_direct(SQUARE.source, q) if m == "direct" else eval_center(SQUARE.factorization(), q)
        assert rep.value == 0 and rep.terms_used == 0


def test_zero_sequence_direct():
    assert eval_direct(zero_sequence(), EvalQuery(1.0)).value == 0


def test_query_validation():
    with pytest.raises(ValueError):
        EvalQuery(1.0, rho=1.5)
    with pytest.raises(ValueError):
        EvalQuery(1.0, max_terms=0)
    with pytest.raises(ValueError):
        EvalQuery(1.0, tolerance=0)


@pytest.mark.parametrize("th", [0.4, 1.0, 2.0, -1.3, 2.9])
def test_center_on_circle(th):
    want = square_oracle(cmath.exp(1j * th))
    rep = eval_center(SQUARE.factorization(), EvalQuery(th, 1.0, 200_000, 1e-8))
    # the absolute tail estimate is conservative, so it need not certify 1e-8 here
    assert abs(rep.value - want) < 1e-8 <= rep.error_estimate
    assert abs(rep.value.imag - math.copysign(1.0, th)) < 1e-8  # square wave


def test_center_error_estimate_is_an_upper_estimate():
    th = 1.0
    rep = eval_center(SQUARE.factorization(), EvalQuery(th, 1.0, 200_000, 1e-5))
    assert rep.converged
    assert abs(rep.value - square_oracle(cmath.exp(1j * th))) <= rep.error_estimate


def test_center_special_point():
    fact = SQUARE.factorization()
    with pytest.raises(SpecialPointError) as ei:
        eval_center(fact, EvalQuery(0.0))
    assert ei.value.report.special_point and ei.value.report.value is None
    with pytest.raises(SpecialPointError):
        center_partial(fact, math.pi - 1e-8, 100)
    center_partial(fact, math.pi - 1e-3, 100)


def test_center_matches_direct_inside():
    fact = SAWTOOTH.factorization()
    for rho in (0.5, 0.95):
        a = eval_direct(SAWTOOTH.source, EvalQuery(1.0, rho, 10_000, 1e-14)).value
        b = eval_center(fact, EvalQuery(1.0, rho, 10_000, 1e-14)).value
        assert abs(a - b) < 1e-12


@given(st.floats(0.05, math.pi - 0.05))
def test_conjugate_parity(th):
    fact = SAWTOOTH.factorization()
    a, b = center_partial(fact, th, 2000), center_partial(fact, -th, 2000)
    assert abs(a - b.conjugate()) < 1e-12


@pytest.mark.parametrize("th", [0.01, 0.5, 1.0, 2.0, math.pi - 0.01, -1.7])
def test_dirichlet_sums_on_circle(th):
    d = dirichlet_partial_sums(th, 20_000)
    c, r = dirichlet_disk(th)
    assert np.max(np.abs(np.abs(d - c) - r)) <= 1e-12 * r
    # brute force for the first few
    v = cmath.exp(1j * th)
    assert abs(d[4] - sum(v**k for k in range(1, 6))) < 1e-13


def test_dirichlet_disk_from_zero():
    th = 1.1
    d0 = 1 + dirichlet_partial_sums(th, 1000)
    c, r = dirichlet_disk_from_zero(th)
    assert np.max(np.abs(np.abs(d0 - c) - r)) < 1e-12
    assert c == complex(0.5, 0.5 / math.tan(th / 2))


def test_dirichlet_theta_zero():
    with pytest.raises(ThetaZeroError):
        dirichlet_partial_sums(0.0, 10)
    with pytest.raises(ThetaZeroError):
        dirichlet_disk(0.0)


def test_abel_sawtooth():
    th = 1.0
    res = abel_limit(SAWTOOTH.source, th, [0.9, 0.95, 0.98, 0.99, 0.995])
    want = sawtooth_oracle(cmath.exp(1j * th))
    assert abs(res.value - want) < 1e-6
    assert res.error_estimate < 1e-4


def test_abel_matches_center():
    th = 2.0
    a = abel_limit(SQUARE.source, th, [0.9, 0.95, 0.98, 0.99, 0.995]).value
    c = eval_center(SQUARE.factorization(), EvalQuery(th, 1.0, 200_000, 1e-9)).value
    assert abs(a - c) < 1e-6


def test_abel_schedule_validation():
    with pytest.raises(ValueError):
        abel_limit(SQUARE.source, 1.0, [])
    with pytest.raises(ValueError):
        abel_limit(SQUARE.source, 1.0, [0.9, 0.5])
    with pytest.raises(ValueError):
        abel_limit(SQUARE.source, 1.0, [0.5, 1.0])


SHAPES = [
    (CenterPolynomial.from_roots([Angle.pi_multiple(Fraction(1, 3))]), 1),
    (CenterPolynomial.from_roots([Angle.from_radians(0.7)]), 1),
    (CenterPolynomial.from_roots([Angle.pi_multiple(0), Angle.pi_multiple(1)]), 1),
    (CenterPolynomial.from_roots([Angle.pi_multiple(0), Angle.pi_multiple(1)]), 2),
    (CenterPolynomial.from_roots([Angle.pi_multiple(Fraction(1, 2)), Angle.pi_multiple(Fraction(-1, 2))]), 1),
    (CenterPolynomial.from_roots([Angle.pi_multiple(Fraction(1, 2)), Angle.pi_multiple(Fraction(-1, 2))]), 2),
]


@pytest.mark.parametrize("poly,power", SHAPES)
def test_prefactor_closed_form_random(poly, power):
    rng = np.random.default_rng(12345)
    checked = 0
    while checked < 1000:
        th = float(rng.uniform(-math.pi, math.pi))
        if poly.nearest_root_distance(th) < 1e-3:
            continue
        z = cmath.exp(1j * th)
        oracle = z**power / np.prod([z - r.unit() for r in poly.roots])
        got = pole_prefactor_closed_form(poly, th, power)
        assert abs(got - oracle) <= 1e-12 * max(1.0, abs(oracle))
        assert abs(prefactor_numeric(poly, th, power) - oracle) <= 1e-12 * max(1.0, abs(oracle))
        checked += 1


def test_prefactor_errors():
    tri = CenterPolynomial.from_roots([Angle.pi_multiple(Fraction(2 * m, 3)) for m in range(3)])
    with pytest.raises(ShapeNotCataloguedError):
        pole_prefactor_closed_form(tri, 1.0)
    single = CenterPolynomial.from_roots([Angle.pi_multiple(0)])
    with pytest.raises(ShapeNotCataloguedError):
        pole_prefactor_closed_form(single, 1.0, power=2)
    with pytest.raises(SpecialPointError):
        pole_prefactor_closed_form(single, 1e-9)


def test_partial_sum_matches_loop():
    seq = CoefficientSequence.from_expression("1/k^2", step=3, offset=2)
    th = 0.9
    want = sum(seq.term(k) * cmath.exp(1j * k * th) for k in range(1, 301))
    assert abs(partial_sum(seq, th, 300) - want) < 1e-14
