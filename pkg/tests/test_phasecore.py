import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nharm import errors
from nharm import phasecore as pc
from nharm.phasecore import HarmonicExponent as H


def mp_frac(n, alpha, x, dps=60):
    """Independent oracle: frac(n**alpha * x) with alpha, x given as decimal text."""
    with mpmath.workdps(dps):
        y = mpmath.mpf(n) ** mpmath.mpf(alpha) * mpmath.mpf(x)
        return float(y - mpmath.floor(y))


def circ(a, b):
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


# -- reduce_phase ------------------------------------------------------------

def test_reduce_phase_trivial_cases():
    assert pc.reduce_phase(1, H("2.5"), 0.25).fractional_part == 0.25
    assert pc.reduce_phase(4, H("0.5"), 0.75).fractional_part == 0.5


def test_reduce_phase_large_n_vs_oracle():
    r = pc.reduce_phase(10**6, H("2.5"), 0.3)
    assert circ(r.fractional_part, mp_frac(10**6, "2.5", "0.3")) < 1e-12
    assert r.error_bound <= 1e-12


@pytest.mark.parametrize("alpha,x", [("2.4999", "0.3"), ("1.731", "0.1234567"), ("0.5123", "7.77"),
                                     ("3.14159", "0.001")])
def test_reduce_phase_double_double_route(alpha, x):
    for n in (10**5, 123457, 10**6):
        r = pc.reduce_phase(n, H(alpha), x)
        assert r.method == "dd"
        assert circ(r.fractional_part, mp_frac(n, alpha, x)) < 1e-12


def test_reduce_phase_mpmath_route():
    r = pc.reduce_phase(10**7, H("2.4999", 40), "0.3")
    assert r.method == "mpmath"
    assert circ(r.fractional_part, mp_frac(10**7, "2.4999", "0.3")) < 1e-12


def test_reduce_phase_precision_exhausted():
    # n**alpha*x near 1e35 cannot be reduced at 30 digits
    with pytest.raises(errors.PrecisionExhausted):
        pc.reduce_phase(10**14, H("2.4999"), "0.3")


def test_reduce_phase_angle_multiplier_is_exact():
    r = pc.reduce_phase(3, H("0.5"), "pi", angle=True)
    assert abs(r.fractional_part - math.sqrt(3) / 2) < 1e-15
    r = pc.reduce_phase(8, H("1/3"), "pi/2", angle=True)
    assert r.fractional_part == 0.5


def test_reduce_phase_rejects_bad_input():
    with pytest.raises(errors.DomainError):
        pc.reduce_phase(0, H("0.5"), 0.3)
    with pytest.raises(errors.DomainError):
        pc.reduce_phase(3, H("0.5"), float("inf"))


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 10**6), a=st.integers(1, 3999), x=st.integers(1, 10**6))
def test_phase_antisymmetry(n, a, x):
    exp = H(f"{a}/1000")
    xs = f"{x}/1000003"
    try:
        p = pc.reduce_phase(n, exp, xs).fractional_part
    except errors.PrecisionExhausted:
        # beyond the double-double budget; the mpmath route must take over
        exp = H(f"{a}/1000", 45)
        p = pc.reduce_phase(n, exp, xs).fractional_part
    q = pc.reduce_phase(n, exp, "-" + xs).fractional_part
    s = p + q
    assert min(abs(s), abs(s - 1.0)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 10**5), a=st.integers(1, 4), x=st.integers(-50, 50))
def test_integer_alpha_integer_x_reduces_to_zero(n, a, x):
    r = pc.reduce_phase(n, H(a), x)
    assert min(r.fractional_part, 1 - r.fractional_part) <= r.error_bound


def test_harmonic_exponent_validation():
    with pytest.raises(errors.DomainError):
        H(0)
    with pytest.raises(errors.DomainError):
        H(-1.5)
    assert H("2/3").value == Fraction(2, 3)
    assert H(3).is_integer and not H("2.5").is_integer
    with pytest.raises(errors.DomainError):
        H(3).require_noninteger()


def test_decimal_reading_of_inputs():
    assert pc.exact_value(0.3) == Fraction(3, 10)
    assert pc.exact_value(np.float64(1e-9)) == Fraction(1, 10**9)
    assert pc.exact_value("2/3") == Fraction(2, 3)
    assert pc.pi_multiple("3pi/4") == Fraction(3, 4)
    assert pc.pi_multiple("0.3") is None


def test_expression_evaluator():
    with mpmath.workdps(40):
        assert abs(pc.real_expression("sqrt(2)-1") - (mpmath.sqrt(2) - 1)) < mpmath.mpf(10) ** -35
        assert abs(pc.real_expression("phi-1") - (mpmath.sqrt(5) - 1) / 2) < mpmath.mpf(10) ** -35
        assert abs(pc.real_expression("frac(sqrt(5))") - (mpmath.sqrt(5) - 2)) < mpmath.mpf(10) ** -35
    with pytest.raises(ValueError):
        pc.real_expression("__import__('os')")


# -- compensated_sum ---------------------------------------------------------

def test_compensated_sum_examples():
    assert pc.compensated_sum([]) == 0
    assert pc.compensated_sum([1.0, -1.0, 1e-16]) == 1e-16
    # oracle: 10**6 * Fraction(0.1) exactly
    exact = float(Fraction(0.1) * 10**6)
    assert abs(pc.compensated_sum([0.1] * 10**6) - 10**5) < 1e-9
    assert pc.compensated_sum([0.1] * 10**6) == exact


def test_compensated_sum_complex():
    z = pc.compensated_sum([1 + 1e-17j, 1e100 + 1j, -1e100 - 1j])
    assert z == 1 + 1e-17j


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=200), st.randoms())
def test_compensated_sum_permutation_robust(terms, rnd):
    shuffled = list(terms)
    rnd.shuffle(shuffled)
    a, b = pc.compensated_sum(terms), pc.compensated_sum(shuffled)
    assert abs(a - b) <= 10 * np.finfo(float).eps * sum(abs(t) for t in terms)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=100))
def test_compensated_sum_accuracy_vs_fractions(terms):
    exact = sum(Fraction(t) for t in terms)
    got = pc.compensated_sum(terms)
    assert abs(Fraction(got) - exact) <= 4 * np.finfo(float).eps * abs(exact) + Fraction(1, 10**300)


# -- bulk sums ---------------------------------------------------------------

def test_partial_sums_match_mpmath_direct():
    exp = H("0.5")
    sums, err = pc.partial_sums(exp, "0.3", 1, 2000, checkpoints=[2000])
    with mpmath.workdps(40):
        ref = mpmath.fsum(mpmath.expjpi(2 * mpmath.sqrt(n) * mpmath.mpf("0.3")) for n in range(1, 2001))
    assert abs(complex(sums[-1]) - complex(ref)) < 1e-11
    assert err < 1e-9


def test_grid_partial_sums_threads_identical():
    exp = H("2.5")
    ys = pc.cycle_coefficients([f"0.{i:03d}" for i in range(1, 200)])
    a, _ = pc.grid_partial_sums(exp, ys, 1, 4096, checkpoints=[64, 4096], threads=1)
    b, _ = pc.grid_partial_sums(exp, ys, 1, 4096, checkpoints=[64, 4096], threads=4)
    assert a.tobytes() == b.tobytes()


# -- quadrature --------------------------------------------------------------

def test_oscillatory_integral_trivial():
    z = pc.oscillatory_integral(lambda y: 0.0 * y, 0.0, 1.0, 1e-10)
    assert abs(z - 1) < 1e-10
    z = pc.oscillatory_integral(lambda y: y, 0.0, 1.0, 1e-10)
    assert abs(z) < 1e-10


def _fixed_gauss(f, u, v, panels, order=20):
    """Oversampled fixed-step Gauss-Legendre oracle."""
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(u, v, panels + 1)
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        y = 0.5 * (b - a) * t + 0.5 * (a + b)
        total += 0.5 * (b - a) * np.sum(w * np.exp(2j * np.pi * f(y)))
    return total


def test_oscillatory_integral_vs_oversampled_oracle():
    f = lambda y: 0.3 * np.sqrt(y)
    got = pc.oscillatory_integral(f, 1.0, 1e4, 1e-10, derivative=lambda y: 0.15 / np.sqrt(y))
    ref = _fixed_gauss(f, 1.0, 1e4, 20000)
    assert abs(got - ref) < 1e-8


def test_oscillatory_integral_vs_scipy():
    from scipy.integrate import quad
    f = lambda y: 0.05 * y ** 1.5
    got = pc.oscillatory_integral(f, 0.0, 30.0, 1e-10)
    re = quad(lambda y: math.cos(2 * math.pi * f(y)), 0, 30, limit=2000, epsabs=1e-13)[0]
    im = quad(lambda y: math.sin(2 * math.pi * f(y)), 0, 30, limit=2000, epsabs=1e-13)[0]
    assert abs(got - complex(re, im)) < 1e-9


def test_oscillatory_integral_budget():
    with pytest.raises(errors.BudgetExceeded) as info:
        pc.oscillatory_integral(lambda y: y * y, 0.0, 2000.0, 1e-12, max_panels=50)
    assert info.value.estimate is not None


@settings(max_examples=25, deadline=None)
@given(m=st.floats(1.5, 299.5), c=st.floats(0.01, 0.5))
def test_oscillatory_integral_additivity(m, c):
    f = lambda y: c * np.sqrt(y)
    tol = 1e-10
    whole = pc.oscillatory_integral(f, 1.0, 300.0, tol)
    parts = pc.oscillatory_integral(f, 1.0, m, tol) + pc.oscillatory_integral(f, m, 300.0, tol)
    assert abs(whole - parts) < 3 * tol


def test_sine_integral_tail_bound_check():
    r = pc.sine_integral_tail_bound_check(1, math.pi)
    assert abs(r.lhs - math.pi) < 1e-9 and r.rhs == pytest.approx(2 * math.pi) and r.ok
    from scipy.integrate import quad
    r = pc.sine_integral_tail_bound_check(0.5, 100)
    ref = abs(quad(lambda t: t ** 0.5 * math.sin(t), 0, 100, limit=500)[0])
    assert r.ok and r.lhs <= 20 and abs(r.lhs - ref) < 1e-7
    r = pc.sine_integral_tail_bound_check(-0.5, 10, 1e4)
    ref = abs(quad(lambda t: t ** -0.5 * math.sin(t), 10, 1e4, limit=5000)[0])
    assert r.ok and abs(r.lhs - ref) < 1e-7
    with pytest.raises(errors.DomainError):
        pc.sine_integral_tail_bound_check(0, 1)
