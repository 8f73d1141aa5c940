import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nharm import errors
from nharm import expsums as es
from nharm import phasecore as pc
from nharm.phasecore import HarmonicExponent as H

alphas = st.sampled_from(["0.5", "0.9", "1.5", "2/3", "2.5", "1.2345", "3.7"])
# k up to 1e5 with |x| <= 3 stays inside the default double-double budget
big_k_alphas = st.sampled_from(["0.5", "0.9", "1.5", "2/3", "2.5", "1.2345"])
reals = st.fractions(min_value=-3, max_value=3, max_denominator=10**6).map(lambda f: f"{f.numerator}/{f.denominator}")


def mp_sum(alpha, x, k, start=1, dps=50):
    """Direct 50-digit summation of e(n**alpha x)."""
    with mpmath.workdps(dps):
        a, y = mpmath.mpf(alpha), mpmath.mpf(x)
        return complex(mpmath.fsum(mpmath.expjpi(2 * mpmath.mpf(n) ** a * y) for n in range(start, k + 1)))


def test_c_exponent():
    assert es.c_exponent(H("0.5")) == 0.5
    assert es.c_exponent(H("2.5")) == pytest.approx(2 / (3 * 3.5 * 4.5), rel=1e-15)
    assert es.c_exponent(H("2.5")) == pytest.approx(0.0423280423, rel=1e-9)
    with pytest.raises(errors.DomainError):
        es.c_exponent(H(3))


def test_exp_sum_trivial():
    assert es.exp_sum(H("0.5"), 0, 7).value == 7
    assert es.exp_sum(H("2.5"), 0, 7).value == 7
    assert abs(es.exp_sum(H(1), 0.5, 3).value - (-1)) < 1e-14


def test_exp_sum_vs_50_digit_oracle():
    got = es.exp_sum(H("0.5"), 0.3, 10**4).value
    assert abs(got - mp_sum("0.5", "0.3", 10**4)) < 1e-8


@pytest.mark.parametrize("alpha,x,k,start", [("2.5", "0.3", 3000, 1), ("1.5", "0.0123", 2000, 500), ("0.75", "3.3", 500, 7)])
def test_exp_sum_more_oracles(alpha, x, k, start):
    got = es.exp_sum(H(alpha), x, k, start=start)
    assert got.count == k - start + 1
    assert abs(got.value - mp_sum(alpha, x, k, start)) < 1e-9


def test_sine_sum_trivial():
    assert es.sine_sum(H("0.7"), 0, 1, 100).value == 0
    assert abs(es.sine_sum(H(2), "pi", 1, 50).value) < 1e-12
    assert abs(es.sine_sum(H(1), "pi/2", 1, 4).value) < 1e-14


def test_sine_sum_vs_oracle():
    got = es.sine_sum(H("0.5"), 1.3, 10, 2000).value
    with mpmath.workdps(50):
        ref = mpmath.fsum(mpmath.sin(mpmath.sqrt(n) * mpmath.mpf("1.3")) for n in range(10, 2001))
    assert abs(got - float(ref)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(alpha=alphas, x=reals, k=st.integers(1, 3000))
def test_triangle_inequality(alpha, x, k):
    r = es.exp_sum(H(alpha), x, k)
    assert abs(r.value) <= k


@settings(max_examples=40, deadline=None)
@given(alpha=big_k_alphas, x=reals, k=st.integers(1, 10**5))
def test_conjugate_symmetry(alpha, x, k):
    a = es.exp_sum(H(alpha), x, k).value
    b = es.exp_sum(H(alpha), "-" + x if not x.startswith("-") else x[1:], k).value
    assert abs(a - b.conjugate()) < 1e-8


@settings(max_examples=40, deadline=None)
@given(alpha=big_k_alphas, t=reals, k=st.integers(1, 10**5))
def test_sine_sum_odd(alpha, t, k):
    neg = "-" + t if not t.startswith("-") else t[1:]
    assert abs(es.sine_sum(H(alpha), t, 1, k).value + es.sine_sum(H(alpha), neg, 1, k).value) < 1e-8


@settings(max_examples=40, deadline=None)
@given(alpha=alphas, t=reals, data=st.data())
def test_windowed_additivity(alpha, t, data):
    c = data.draw(st.integers(2, 20000))
    a = data.draw(st.integers(1, c - 1))
    b = data.draw(st.integers(a, c - 1))
    exp = H(alpha)
    whole = es.sine_sum(exp, t, a, c).value
    parts = es.sine_sum(exp, t, a, b).value + es.sine_sum(exp, t, b + 1, c).value
    assert abs(whole - parts) <= 1e-9 * c


def test_incremental_evaluation():
    exp = H("0.5")
    x = "0.3"
    ks = np.arange(1, 10**4 + 1)
    trace, _ = es.exp_sum_trace(exp, x, ks)
    running = 0j
    worst = 0.0
    for k in range(1, 10**4 + 1):
        running += np.exp(2j * np.pi * pc.reduce_phase(k, exp, x).fractional_part)
        if k % 97 == 0 or k == 10**4:
            fresh = es.exp_sum(exp, x, k).value
            worst = max(worst, abs(running - fresh) / max(1.0, abs(fresh)))
            assert abs(trace[k - 1] - fresh) <= 1e-9 * max(1.0, abs(fresh))
    assert worst < 1e-9


def test_geometric_series_bound_alpha_one():
    exp = H(1)
    for delta in (0.05, 0.1, 0.25):
        xs = np.linspace(delta, 1 - delta, 101)
        for k in (1, 10, 333, 4096):
            for x in xs:
                v = abs(es.exp_sum(exp, float(x), k).value)
                closed = abs(math.sin(math.pi * k * x) / math.sin(math.pi * x))
                assert abs(v - closed) < 1e-9
                assert v <= 1 / (2 * delta) + 1e-9


def test_regime_cutoffs_examples():
    r = es.regime_cutoffs(H(2), 0.01, need_L1=True)
    assert (r.L0, r.L1) == (11, 25)
    r = es.regime_cutoffs(H("1.5"), 0.001, need_L1=True)
    assert (r.L0, r.L1) == (101, 111111)
    r = es.regime_cutoffs(H("0.5"), 0.25)
    assert r.L0 == 17 and r.L1 is None


def floor_rational_power(r, e):
    """Exact floor(r**e) for positive Fractions r and e = p/q: the largest m with m**q <= r**p."""
    p, q = e.numerator, e.denominator
    with mpmath.workdps(60):
        m = int(mpmath.floor((mpmath.mpf(r.numerator) / r.denominator) ** (mpmath.mpf(p) / q)))
    lhs = lambda m: m ** q * r.denominator ** p
    rhs = r.numerator ** p
    while lhs(m) > rhs:
        m -= 1
    while lhs(m + 1) <= rhs:
        m += 1
    return m


@settings(max_examples=60, deadline=None)
@given(alpha=st.sampled_from(["1.5", "2", "2.5", "3.25", "0.5", "0.8"]),
       x=st.one_of(st.fractions(min_value=0, max_value=1, max_denominator=10**5).filter(lambda f: 0 < f < 1),
                   st.integers(2, 500).map(lambda n: Fraction(1, n))))
def test_regime_cutoffs_exact(alpha, x):
    xs = f"{x.numerator}/{x.denominator}"
    exp = H(alpha)
    a = exp.value
    r = es.regime_cutoffs(exp, xs, need_L1=a > 1)
    assert r.L0 == floor_rational_power(1 / x, 1 / a) + 1
    assert Fraction(r.L0) ** a.numerator * x ** a.denominator >= 1  # L0**alpha * x >= 1
    if a > 1:
        assert r.L1 == floor_rational_power(1 / (2 * x * a), 1 / (a - 1))


def test_regime_cutoffs_errors():
    for x in (0, 1, -0.5, 2):
        with pytest.raises(errors.DomainError):
            es.regime_cutoffs(H(2), x)
    with pytest.raises(errors.DomainError):
        es.regime_cutoffs(H("0.5"), 0.25, need_L1=True)


def test_small_alpha_sine_bound_check():
    r = es.check_bound_lemma_2_6(H("0.5"), [0.05], [10])
    assert r.worst_ratio <= 10
    assert r.worst_ratio <= 10 ** 0.5 * 0.05 + 1e-12
    grid = [0.01 * i for i in range(1, 10)]
    r = es.check_bound_lemma_2_6(H("0.9"), grid, [10, 100, 1000, 10**4])
    assert math.isfinite(r.worst_ratio)
    # oracle: direct mpmath evaluation at the reported location
    x, k = r.location["x"], r.location["k"]
    with mpmath.workdps(30):
        s = mpmath.fsum(mpmath.sin(mpmath.mpf(n) ** mpmath.mpf("0.9") * mpmath.mpf(x)) for n in range(1, k + 1))
    assert r.worst_ratio == pytest.approx(abs(float(s)) / (k ** 0.1 / x), rel=1e-9)
    with pytest.raises(errors.DomainError):
        es.check_bound_lemma_2_6(H("0.5"), [0.2], [10])
    with pytest.raises(errors.DomainError):
        es.check_bound_lemma_2_6(H("1.5"), [0.05], [10])


def test_regime_bound_check():
    r = es.check_bound_lemma_2_7(H(2), [0.01])
    assert math.isfinite(r.worst_ratio) and (r.location["L0"], r.location["L1"]) == (11, 25)
    assert 11 <= r.location["k"] <= 24
    with mpmath.workdps(30):
        best = max(abs(mpmath.fsum(mpmath.sin(mpmath.mpf(n) ** 2 * mpmath.mpf("0.01")) for n in range(11, k + 1)))
                   for k in range(11, 25))
    assert r.worst_ratio == pytest.approx(float(best) / 0.01 ** -0.5, rel=1e-9)
    r = es.check_bound_lemma_2_7(H("1.5"), [0.001])
    assert math.isfinite(r.worst_ratio)
    r = es.check_bound_lemma_2_7(H(2), [0.2])
    assert r.worst_ratio is None and r.empty_regimes and r.empty_regimes[0]["L1"] <= r.empty_regimes[0]["L0"]
    with pytest.raises(errors.DomainError):
        es.check_bound_lemma_2_7(H("0.5"), [0.01])


def test_integral_vs_sum():
    r = es.integral_vs_sum(H("0.5"), 0, 10, 100)
    assert r.sum == 89 and abs(r.integral - 90) < 1e-9 and r.diff <= 1
    r = es.integral_vs_sum(H("0.5"), 0.05, 100, 1000)
    assert r.max_derivative == pytest.approx(0.0025, rel=1e-12)
    assert r.diff_theta <= 10
    from scipy.integrate import quad
    f = lambda y: 0.05 * math.sqrt(y)
    re = quad(lambda y: math.cos(2 * math.pi * f(y)), 100, 1000, limit=500)[0]
    im = quad(lambda y: math.sin(2 * math.pi * f(y)), 100, 1000, limit=500)[0]
    assert abs(r.integral - complex(re, im)) < 1e-8
    r = es.integral_vs_sum(H("0.5"), 0.09, 10**4, 10**5)
    assert r.diff_theta <= 10
    with pytest.raises(errors.PreconditionViolated):
        es.integral_vs_sum(H(2), 0.5, 10, 100)


def test_empirical_exponent_alpha_one_bounded():
    est = es.empirical_exponent(H(1), (0.05, 0.45), grid_density=400, k_dyadic_max=1 << 10, refine=False)
    bound = 1 / math.sin(math.pi * 0.05)
    assert all(0 <= s <= bound + 1e-9 for s in est.sup_values)
    assert all(a < b for a, b in zip(est.k_grid, est.k_grid[1:]))


def test_empirical_exponent_small_run():
    est = es.empirical_exponent(H("0.5"), (0.05, 0.5), grid_density=2000, k_dyadic_max=1 << 12)
    assert est.k_grid == [1 << j for j in range(1, 13)]
    assert est.fitted_slope < 1.0
    assert all(s >= 0 for s in est.sup_values)
    assert est.mode == "heuristic"
