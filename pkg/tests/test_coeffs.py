import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centerseries.coeffs import (CoefficientSequence, FunctionRule, TabulatedRule, WindowTooSmallError,
                                 ZeroTermError, derive_metadata, expsqrt_sequence, fit_decay,
                                 log_derivative, log_integral, monotone_direction, ratio_radius)
from centerseries.exact import Angle, PiMultiple

SAWTOOTH = CoefficientSequence.from_expression("(-1)^k/k", scale="-2/pi")
SQUARE = CoefficientSequence.from_expression("1/k", step=2, offset=1, scale="4/pi")


def brute(seq, n):
    return np.array([seq.term(k) for k in range(1, n + 1)])


def test_log_derivative_of_harmonic_is_one():
    d = log_derivative(CoefficientSequence.from_expression("1/k"))
    assert all(d.frame_exact(k) == 1 for k in range(1, 200))


def test_log_derivative_expsqrt():
    d = log_derivative(expsqrt_sequence())
    ks = np.arange(1, 101)
    assert np.allclose(d.terms(ks).real, ks * np.exp(-np.sqrt(ks)), rtol=1e-15)


def test_log_derivative_sawtooth():
    d = log_derivative(SAWTOOTH)
    for k in range(1, 101):
        assert d.exact_coefficient(k) == PiMultiple(Fraction(-2 * (-1) ** k), -1)


def test_log_integral_of_constant():
    i = log_integral(CoefficientSequence.from_expression("1"))
    assert [i.frame_exact(k) for k in range(1, 6)] == [Fraction(1, k) for k in range(1, 6)]


def test_log_integral_square_gives_triangular_shape():
    i = log_integral(SQUARE)
    for j in range(0, 50):
        k = 2 * j + 1
        assert i.exact_coefficient(k) == PiMultiple(Fraction(4, k * k), -1)
        assert i.exact_coefficient(k + 1) == PiMultiple(0)


@pytest.mark.parametrize("seq", [SAWTOOTH, SQUARE, expsqrt_sequence(),
                                 CoefficientSequence.from_expression("1", scale="1/pi",
                                                                     rotation=Angle.pi_multiple(Fraction(1, 3)))])
def test_chain_round_trip(seq):
    ks = np.arange(1, 1001)
    a = seq.terms(ks)
    for s in (log_integral(log_derivative(seq)), log_derivative(log_integral(seq))):
        assert s.rule == seq.rule  # powers cancel structurally
        assert np.array_equal(s.terms(ks), a)
        for attr in ("step", "offset", "sign_pattern", "rotation", "is_real", "scale"):
            assert getattr(s, attr) == getattr(seq, attr)


@settings(max_examples=30)
@given(st.integers(-3, 3), st.integers(1, 4), st.integers(1, 3))
def test_chain_round_trip_exact(power, step, offset):
    seq = CoefficientSequence.from_expression(f"k^({power})", step=step, offset=offset)
    s = log_derivative(log_integral(log_integral(log_derivative(seq))))
    for k in range(1, 60):
        assert s.frame_exact(k) == seq.frame_exact(k)


def test_step_invariant_zero_off_pattern():
    seq = CoefficientSequence.from_expression("1/k", step=3, offset=2)
    vals = seq.prefix(60)
    for k in range(1, 61):
        if (k - 2) % 3:
            assert vals[k - 1] == 0
    assert np.array_equal(seq.prefix(60), seq.prefix(60))


def test_real_sequences_have_zero_imaginary_part():
    for seq in (SAWTOOTH, SQUARE):
        assert np.all(seq.prefix(500).imag == 0)


def test_fit_decay_harmonic():
    f = fit_decay(CoefficientSequence.from_expression("1/k"), 10, 1000)
    assert abs(f.exponent - 1) < 1e-9
    assert f.residual < 1e-12


def test_fit_decay_sawtooth_uses_modulus():
    f = fit_decay(SAWTOOTH, 10, 1000)
    assert abs(f.exponent - 1) < 1e-9
    assert math.isclose(f.amplitude, 2 / math.pi, rel_tol=1e-9)


def test_fit_decay_expsqrt_not_power_law():
    f = fit_decay(expsqrt_sequence(), 100, 10000)
    assert not f.is_power_law
    assert f.residual > 0.05
    small = fit_decay(expsqrt_sequence(), 100, 1000)
    assert f.exponent > small.exponent  # drifts upward with the window


@pytest.mark.parametrize("A", [0.1, 1, 10])
@pytest.mark.parametrize("p", [0.25, 0.5, 1, 1.5, 2, 3])
def test_fit_decay_recovers_amplitude_and_exponent(A, p):
    rule = FunctionRule("pw", lambda k: A * k ** (-p), lambda k: math.log(A) - p * math.log(k))
    f = fit_decay(CoefficientSequence(rule), 10, 10000)
    assert abs(f.exponent - p) / p < 1e-6
    assert abs(f.amplitude - A) / A < 1e-6


def test_fit_decay_errors():
    with pytest.raises(WindowTooSmallError):
        fit_decay(SQUARE, 10, 20)
    with pytest.raises(WindowTooSmallError):
        fit_decay(SQUARE, 100, 50)
    holes = CoefficientSequence(TabulatedRule(tuple([Fraction(1, k) for k in range(1, 31)] + [0])
                                              + tuple(Fraction(1, k) for k in range(32, 60))))
    with pytest.raises(ZeroTermError):
        fit_decay(holes, 10, 50)


def test_ratio_probe():
    assert abs(ratio_radius(SQUARE).radius - 1) < 1e-6
    geo = CoefficientSequence(FunctionRule("geo", lambda k: 0.5**k, lambda k: k * math.log(0.5)))
    assert abs(ratio_radius(geo).radius - 2) < 1e-12
    wobble = CoefficientSequence(FunctionRule("w", lambda k: (2 + np.sin(k)) / k**2,
                                              lambda k: np.log(2 + np.sin(k)) - 2 * np.log(k)))
    assert ratio_radius(wobble).unit_radius
    assert abs(ratio_radius(expsqrt_sequence()).radius - 1) <= 1e-6


def test_monotone_direction():
    assert monotone_direction(SQUARE) == "decreasing"
    assert monotone_direction(CoefficientSequence.from_expression("k")) == "increasing"
    wobble = CoefficientSequence(FunctionRule("w", lambda k: (2 + np.sin(k)) / k, lambda k: 0.0))
    assert monotone_direction(wobble) is None


def test_derive_metadata():
    s = CoefficientSequence.from_expression("(-1)^j/k", step=2, offset=1)
    assert derive_metadata(s.rule) == (2, 1, "alternating-in-j")
    assert derive_metadata(SAWTOOTH.rule) == (1, 1, "alternating-in-k")
    assert derive_metadata(CoefficientSequence.from_expression("1/k", step=4, offset=3).rule) == (4, 3, "constant")


def test_sequence_validation():
    with pytest.raises(ValueError):
        CoefficientSequence.from_expression("1/k", step=0)
    with pytest.raises(ValueError):
        CoefficientSequence.from_expression("1/k", offset=0)
    with pytest.raises(ValueError):
        CoefficientSequence.from_expression("(-1)^k/k", sign_pattern="alternating-in-j")


def test_rotation_phase():
    th = Angle.pi_multiple(Fraction(1, 3))
    s = CoefficientSequence.from_expression("1", rotation=th)
    assert not s.is_real
    assert abs(s.term(2) - np.exp(-2j * math.pi / 3)) < 1e-15
