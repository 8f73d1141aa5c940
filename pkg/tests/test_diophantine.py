import math
import random
import struct

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nharm import diophantine as dp
from nharm import errors
from nharm import sequences as sq
from nharm.phasecore import HarmonicExponent as H


def squarefree_by_trial(n):
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def mp_norm(x, a, b, dps=60):
    with mpmath.workdps(dps):
        y = x * a + b
        return float(abs(y - mpmath.nint(y)))


# -- sieve -------------------------------------------------------------------

def test_sieve_small():
    t = dp.squarefree_sieve(10)
    assert t.numbers().tolist() == [1, 2, 3, 5, 6, 7, 10] and t.count() == 7
    t = dp.squarefree_sieve(1)
    assert t.numbers().tolist() == [1] and t.count() == 1 and 1 in t


@pytest.fixture(scope="module")
def sieve_million():
    return dp.squarefree_sieve(10**6)


def test_sieve_matches_trial_division(sieve_million):
    rnd = random.Random(20261014)
    for n in [rnd.randint(1, 10**6) for _ in range(1000)] + [4, 8, 9, 12, 25, 27, 49, 999999, 10**6]:
        assert (n in sieve_million) == squarefree_by_trial(n)


@pytest.mark.parametrize("N", [10**4, 10**5, 10**6])
def test_sieve_density(sieve_million, N):
    assert abs(sieve_million.count_prefix[N] / N - 6 / math.pi ** 2) <= 2 * N ** -0.5


def test_sieve_prefix_counts_vs_brute():
    t = dp.squarefree_sieve(3000)
    running = 0
    for n in range(1, 3001):
        running += squarefree_by_trial(n)
        assert t.count_prefix[n] == running


def test_sieve_dump_roundtrip(tmp_path):
    t = dp.squarefree_sieve(12345)
    p = tmp_path / "sq.bin"
    t.dump(p)
    data = p.read_bytes()
    assert data[:4] == b"NHSQ" and struct.unpack_from("<4sIQ", data) == (b"NHSQ", 1, 12345)
    assert len(data) == 16 + (12345 + 7) // 8
    u = dp.load_sieve(p)
    assert u.N == 12345 and np.array_equal(u.numbers(), t.numbers())


def test_sieve_load_errors(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"XXXX" + bytes(20))
    with pytest.raises(errors.DomainError):
        dp.load_sieve(p)
    p.write_bytes(struct.pack("<4sIQ", b"NHSQ", 1, 100) + bytes(3))
    with pytest.raises(errors.DomainError):
        dp.load_sieve(p)


# -- simultaneous approximation ----------------------------------------------

def test_approx_half():
    r = dp.simultaneous_approx_search(dp.DiophantineQuery(["0.5"], [0], 0.1, 1000))
    assert r.found and r.x == 2 and r.norms == [0.0]


def test_approx_golden_vs_scan_oracle():
    r = dp.simultaneous_approx_search(dp.DiophantineQuery(["phi-1"], [0], 0.02, 10**6))
    with mpmath.workdps(60):
        a = (mpmath.sqrt(5) - 1) / 2
        first = next(x for x in range(1, 10**4) if mp_norm(x, a, 0) < 0.02)
    assert r.found and r.x == first == 34


def test_approx_three_roots():
    q = dp.DiophantineQuery(["frac(sqrt(2))", "frac(sqrt(3))", "frac(sqrt(5))"], ["-1/4"] * 3, 0.05, 10**6)
    r = dp.simultaneous_approx_search(q)
    assert r.found and r.x <= 10**6
    with mpmath.workdps(80):
        alphas = [mpmath.sqrt(n) - mpmath.floor(mpmath.sqrt(n)) for n in (2, 3, 5)]
        norms = [mp_norm(r.x, a, mpmath.mpf(-1) / 4, 80) for a in alphas]
        assert all(nm < 0.05 for nm in norms)
        assert norms == pytest.approx(r.norms, abs=1e-15)
        # smallest: no earlier x works
        for x in range(1, r.x):
            assert not all(mp_norm(x, a, mpmath.mpf(-1) / 4, 40) < 0.05 for a in alphas)


def test_approx_not_found_is_a_result():
    r = dp.simultaneous_approx_search(dp.DiophantineQuery(["sqrt(2)"], [0], 0.001, 50))
    assert not r.found and r.x is None and r.scanned == 50


def test_approx_query_validation():
    with pytest.raises(errors.DomainError):
        dp.DiophantineQuery(["0.5"], [0, 0], 0.1, 10)
    with pytest.raises(errors.DomainError):
        dp.DiophantineQuery(["0.5"], [0], 0.5, 10)


def test_approx_threads_identical():
    q = dp.DiophantineQuery(["frac(sqrt(2))", "frac(sqrt(3))"], ["0.1", "0.2"], 0.01, 10**6)
    a = dp.simultaneous_approx_search(q, threads=1, chunk=4096)
    b = dp.simultaneous_approx_search(q, threads=4, chunk=4096)
    assert a == b


# -- bad points --------------------------------------------------------------

def _fresh_sines(alpha, x0, ns):
    with mpmath.workdps(50):
        x = mpmath.mpf(repr(x0))
        return [float(mpmath.sin(mpmath.mpf(n) ** mpmath.mpf(alpha) * x)) for n in ns]


def test_alignment_single_constraint():
    r = dp.bad_point_search_alignment(H("0.5"), 1, 0.8, (0, 10), grid=2000)
    assert r.success and r.constrained_n == [1]
    assert math.sin(r.x0) >= 0.8


def test_alignment_L10():
    r = dp.bad_point_search_alignment(H("0.5"), 10, 0.8)
    assert r.success and r.constrained_n == [1, 2, 3, 5, 6, 7, 10]
    sines = _fresh_sines("0.5", r.x0, r.constrained_n)
    assert min(sines) >= 0.8
    assert r.min_aligned_sine == pytest.approx(min(sines), abs=1e-12)
    assert [c[0] for c in r.certificates] == r.constrained_n and all(c[-1] for c in r.certificates)


def test_alignment_infeasible_reports_statistics():
    r = dp.bad_point_search_alignment(H("0.5"), 10, 0.999999, (0, 50), grid=2000)
    assert not r.success
    assert r.stats["grid_points"] == 2000 and r.stats["constraints"] == 7


@pytest.mark.parametrize("alpha,L", [("0.5", 50), ("0.5", 1), ("2.5", 30)])
def test_partial_sum_search(alpha, L):
    r = dp.bad_point_search_partial_sum(H(alpha), L, **({"grid": 1000} if L == 1 else {}))
    assert r.success and r.certified_range() == (1, L)
    sines = _fresh_sines(alpha, r.x0, range(1, L + 1))
    s = np.cumsum(sines)
    for k, (kk, sk, bound, ok) in enumerate(r.certificates, start=1):
        assert kk == k and ok and bound == pytest.approx(0.1 * k)
        assert sk == pytest.approx(s[k - 1], abs=1e-12)
        assert s[k - 1] > 0.1 * k


@pytest.fixture(scope="module")
def bad_point_50():
    return dp.bad_point_search_partial_sum(H("0.5"), 50)


def test_divergence_bound_harmonic(bad_point_50):
    r = dp.divergence_lower_bound(sq.power(1), bad_point_50, 10, 50)
    h = math.fsum(1 / k for k in range(11, 51))
    assert r.bound == pytest.approx(0.1 * h - 0.9, rel=1e-12)
    assert r.holds and r.weak


def test_divergence_bound_constant(bad_point_50):
    r = dp.divergence_lower_bound(sq.constant(1.0), bad_point_50, 10, 50)
    assert r.bound == pytest.approx(0.1 * 40 - 9.0) and r.holds
    r = dp.divergence_lower_bound(sq.constant(1.0), bad_point_50, 1, 50)
    assert r.bound == pytest.approx(0.1 * 49 - 0.9) and not r.weak and r.holds


def test_divergence_bound_direct_sum(bad_point_50):
    r = dp.divergence_lower_bound(sq.power(0.9), bad_point_50, 10, 50)
    sines = _fresh_sines("0.5", bad_point_50.x0, range(10, 51))
    ref = math.fsum(k ** -0.9 * s for k, s in zip(range(10, 51), sines))
    assert r.sum_at_x0 == pytest.approx(ref, abs=1e-12) and r.holds


@pytest.mark.parametrize("seq", [sq.power(1), sq.power(0.3), sq.constant(2.0), sq.power_log(1, 1)], ids=lambda s: s.name)
def test_divergence_holds_when_preconditions_pass(bad_point_50, seq):
    for l in (1, 5, 10, 25):
        r = dp.divergence_lower_bound(seq, bad_point_50, l, 50)
        if r.certificates_ok and r.monotone:
            assert r.holds


def test_divergence_bound_rejects_non_monotone(bad_point_50):
    with pytest.raises(errors.PreconditionViolated):
        dp.divergence_lower_bound(sq.oscillating(1.0), bad_point_50, 10, 50)


# -- independence probe ------------------------------------------------------

def test_besicovitch_two_roots_vs_brute():
    r = dp.besicovitch_rational_check("1/2", [2, 3])
    assert (r.u, r.v, r.s, r.r) == (1, 2, 2, 1) and r.assumed_independent and not r.relation_found
    q1 = np.arange(-1000, 1001, dtype=float)
    best = math.inf
    for q2 in range(-1000, 1001):
        vals = np.abs(q1 * math.sqrt(2) + q2 * math.sqrt(3))
        if q2 == 0:
            vals[1000] = math.inf
        best = min(best, vals.min())
    assert r.min_abs == pytest.approx(best, rel=1e-9)
    assert r.min_abs >= 1e-9


def test_besicovitch_trivial_and_errors():
    r = dp.besicovitch_rational_check("1/2", [1])
    assert r.assumed_independent and not r.relation_found
    with pytest.raises(errors.DomainError):
        dp.besicovitch_rational_check(2, [2, 3])


def test_besicovitch_two_thirds():
    r = dp.besicovitch_rational_check("2/3", [2, 3, 5])
    assert not r.relation_found and r.min_abs > 0
