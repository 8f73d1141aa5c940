"""Exponential and sine sums over noninteger harmonics.

Two conventions are used and kept apart:

* exponential sums take x in cycles: ``V_k(x) = sum_{n<=k} e(n**alpha x)``
  with ``e(y) = exp(2 pi i y)``;
* sine sums take the raw angle t: ``sum sin(n**alpha t)``, so t = 2 pi x.

Angles may be given as strings such as ``"pi/2"`` for exact multiples of pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import phasecore as pc
from .errors import DomainError, PreconditionViolated
from .phasecore import HarmonicExponent

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _as_exponent(exp) -> HarmonicExponent:
    return exp if isinstance(exp, HarmonicExponent) else HarmonicExponent(exp)


def c_exponent(exp) -> float:
    """Sum-growth exponent: alpha on (0, 1), 2 / (3 (alpha+1)(alpha+2)) above 1."""
    exp = _as_exponent(exp)
    exp.require_noninteger()
    a = exp.value
    if a < 1:
        return float(a)
    return float(Fraction(2) / (3 * (a + 1) * (a + 2)))


@dataclass(frozen=True)
class ExpSumResult:
    value: complex | float
    start: int
    count: int
    alpha: float
    x: float
    max_phase_error: float

    @property
    def stop(self) -> int:
        return self.start + self.count - 1


def _x_float(x) -> float:
    with mpmath.workdps(20):
        return float(pc.to_mpf(x))


def _check_range(start, k):
    if isinstance(k, bool) or int(k) != k or isinstance(start, bool) or int(start) != start:
        raise DomainError("start and k must be integers")
    if not 1 <= start <= k:
        raise DomainError(f"need 1 <= start <= k, got start={start}, k={k}")


def exp_sum(exp, x, k: int, start: int = 1) -> ExpSumResult:
    """sum_{n=start}^{k} e(n**alpha x)."""
    exp = _as_exponent(exp)
    _check_range(start, k)
    count = int(k) - int(start) + 1
    sums, err = pc.partial_sums(exp, x, int(start), count)
    return ExpSumResult(complex(sums[-1]), int(start), count, exp.alpha, _x_float(x), err)


def sine_sum(exp, t, start: int, k: int) -> ExpSumResult:
    """sum_{n=start}^{k} sin(n**alpha t), t a raw angle."""
    exp = _as_exponent(exp)
    _check_range(start, k)
    count = int(k) - int(start) + 1
    sums, err = pc.partial_sums(exp, t, int(start), count, angle=True)
    return ExpSumResult(float(sums[-1].imag), int(start), count, exp.alpha, _x_float(t), err)


def exp_sum_trace(exp, x, ks, start: int = 1) -> tuple[np.ndarray, float]:
    """V sums ending at every k in ``ks`` (nondecreasing), one pass."""
    exp = _as_exponent(exp)
    ks = np.asarray(ks, dtype=np.int64)
    if len(ks) == 0:
        raise DomainError("ks must be nonempty")
    _check_range(start, int(ks[0]))
    sums, err = pc.partial_sums(exp, x, start, int(ks[-1]) - start + 1, checkpoints=ks - start + 1)
    return sums, err


def sine_sum_trace(exp, t, ks, start: int = 1) -> tuple[np.ndarray, float]:
    """Sine sums from ``start`` to every k in ``ks`` (nondecreasing), one pass."""
    exp = _as_exponent(exp)
    ks = np.asarray(ks, dtype=np.int64)
    if len(ks) == 0:
        raise DomainError("ks must be nonempty")
    _check_range(start, int(ks[0]))
    sums, err = pc.partial_sums(exp, t, start, int(ks[-1]) - start + 1, angle=True,
                                checkpoints=ks - start + 1)
    return sums.imag.copy(), err


# ---------------------------------------------------------------------------
# regime cutoffs

def _floor_power(base: Fraction, e: Fraction) -> int:
    """floor(base ** e) for base > 0 and e > 0, exactly."""
    s, t = e.numerator, e.denominator  # base**(s/t)
    num, den = base.numerator, base.denominator
    with mpmath.workdps(60):
        guess = int(mpmath.floor(mpmath.power(mpmath.mpf(num) / den, mpmath.mpf(s) / t)))
    guess = max(guess, 0)
    bits = t * max(guess, 2).bit_length() + s * max(num.bit_length(), den.bit_length())
    if bits > 4_000_000:
        # exact comparison too large; 60 digits resolve any non-pathological case
        return guess

    def below(m):  # m**t <= base**s
        return m ** t * den ** s <= num ** s

    m = guess
    while m > 0 and not below(m):
        m -= 1
    while below(m + 1):
        m += 1
    return m


@dataclass(frozen=True)
class RegimeCutoffs:
    L0: int
    L1: int | None
    alpha: float
    x: float


def regime_cutoffs(exp, x, *, need_L1: bool = False) -> RegimeCutoffs:
    """L0 = floor(x**(-1/alpha)) + 1 and, for alpha > 1, L1 = floor((2 x alpha)**(-1/(alpha-1)))."""
    exp = _as_exponent(exp)
    xq = pc.exact_value(x)
    if not 0 < xq < 1:
        raise DomainError(f"x must lie in (0, 1), got {x!r}")
    a = exp.value
    L0 = _floor_power(1 / xq, 1 / a) + 1
    L1 = None
    if a > 1:
        L1 = _floor_power(1 / (2 * xq * a), 1 / (a - 1))
    elif need_L1:
        raise DomainError(f"L1 is defined only for alpha > 1, got alpha = {exp.alpha}")
    return RegimeCutoffs(L0, L1, exp.alpha, float(xq))


# ---------------------------------------------------------------------------
# bound checks for sine sums (raw angle convention)

@dataclass(frozen=True)
class BoundReport:
    alpha: float
    worst_ratio: float | None
    location: dict | None
    ratios: list = field(default_factory=list, repr=False)
    empty_regimes: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return self.worst_ratio is None


def check_bound_lemma_2_6(exp, x_grid, k_grid, *, threads: int = 1) -> BoundReport:
    """max over the grid of |sum_{n<=k} sin(n**alpha x)| / (k**(1-alpha) / x), 0 < alpha < 1."""
    exp = _as_exponent(exp)
    if not 0 < exp.value < 1:
        raise DomainError("this bound needs 0 < alpha < 1")
    xs = [pc.exact_value(x) for x in x_grid]
    if not xs or any(not 0 < x < Fraction(1, 10) for x in xs):
        raise DomainError("every x must lie in (0, 1/10)")
    ks = np.array(sorted({int(k) for k in k_grid}), dtype=np.int64)
    if len(ks) == 0 or ks[0] < 1:
        raise DomainError("k_grid must contain positive integers")
    ys = pc.cycle_coefficients(xs, angle=True)
    sums, err = pc.grid_partial_sums(exp, ys, 1, int(ks[-1]), checkpoints=ks, threads=threads)
    xf = np.array([float(x) for x in xs])
    bound = np.power(ks.astype(np.float64), 1.0 - exp.alpha)[None, :] / xf[:, None]
    ratio = np.abs(sums.imag) / bound
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    rows = [{"x": float(xf[r]), "k": int(ks[c]), "sum": float(sums[r, c].imag), "ratio": float(ratio[r, c])}
            for r in range(len(xf)) for c in range(len(ks))]
    return BoundReport(exp.alpha, float(ratio[i, j]),
                       {"x": float(xf[i]), "k": int(ks[j]), "phase_error": err}, rows)


def _regime_ks(L0: int, L1: int, max_points: int) -> np.ndarray:
    if L1 - L0 <= max_points:
        return np.arange(L0, L1, dtype=np.int64)
    ks = {L0, L1 - 1}
    m = L0
    while m < L1:
        ks.add(m)
        m *= 2
    return np.array(sorted(ks), dtype=np.int64)


def check_bound_lemma_2_7(exp, x_grid, *, max_points: int = 1 << 20) -> BoundReport:
    """max |sum_{n=L0}^{k} sin(n**alpha x)| / x**(-1/alpha) over L0 <= k < L1, alpha > 1.

    The bound is stated for x below some x0(alpha); operationally we require
    alpha y**(alpha-1) x <= 1/2 on [L0, L1], checked at y = L1.  By the
    definition of L1 this always holds, and the check is kept as a guard.
    x values whose regime is empty (L1 <= L0) are listed, not errors.
    """
    exp = _as_exponent(exp)
    if exp.value <= 1:
        raise DomainError("this bound needs alpha > 1")
    rows, empty = [], []
    worst, where = None, None
    for x in x_grid:
        cut = regime_cutoffs(exp, x)
        xq = pc.exact_value(x)
        if cut.L1 <= cut.L0:
            empty.append({"x": cut.x, "L0": cut.L0, "L1": cut.L1})
            continue
        if exp.alpha * float(cut.L1) ** (exp.alpha - 1) * float(xq) > 0.5 * (1 + 1e-12):
            raise PreconditionViolated(f"x = {cut.x} exceeds the operational x0 for alpha = {exp.alpha}")
        ks = _regime_ks(cut.L0, cut.L1, max_points)
        sums, err = pc.partial_sums(exp, xq, cut.L0, int(ks[-1]) - cut.L0 + 1, angle=True,
                                    checkpoints=ks - cut.L0 + 1)
        scale = float(xq) ** (-1.0 / exp.alpha)
        ratio = np.abs(sums.imag) / scale
        j = int(np.argmax(ratio))
        rows.append({"x": cut.x, "L0": cut.L0, "L1": cut.L1, "k": int(ks[j]), "ratio": float(ratio[j]),
                     "n_k": len(ks)})
        if worst is None or ratio[j] > worst:
            worst = float(ratio[j])
            where = {"x": cut.x, "k": int(ks[j]), "L0": cut.L0, "L1": cut.L1, "phase_error": err}
    notes = [] if worst is not None else ["every regime [L0, L1) is empty on this grid"]
    return BoundReport(exp.alpha, worst, where, rows, empty, notes)


# ---------------------------------------------------------------------------
# empirical exponents

@dataclass(frozen=True)
class ExponentEstimate:
    alpha: float
    x_interval: tuple[float, float]
    fitted_slope: float
    intercept: float
    k_grid: list
    sup_values: list
    argsup_x: list
    residual: float
    fit_levels: list
    mode: str
    grid_points: int
    density_ok: bool
    density_levels: list
    poor_fit: bool
    block: bool = False
    notes: list = field(default_factory=list)


def _golden_max(fun, lo: float, hi: float, iters: int) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return (c, fc) if fc >= fd else (d, fd)


def exact_grid_points(exp, b: float, k: int, eps: float) -> int:
    """Grid size making the sup over [a', b'] accurate to eps at this k (per unit length)."""
    exp = _as_exponent(exp)
    return int(math.ceil(2 * math.pi * float(k) ** (exp.alpha + 1) / eps))


def empirical_exponent(exp, x_interval, grid_density: int = 10_000, k_dyadic_max: int = 1 << 16, *,
                       mode: str = "heuristic", fit_from: int | None = None, refine: bool = True,
                       block: bool = False, eps: float = 0.5, max_grid: int = 200_000,
                       threads: int = 1) -> ExponentEstimate:
    """Fit log sup_x |V_k(x)| against log k on dyadic k.

    ``mode="heuristic"``: uniform grid of ``grid_density`` points, then a
    golden-section search around the best grid point at each k.
    ``mode="exact"``: the grid step is at most eps / (2 pi k**(alpha+1)),
    which bounds the sup error by eps; refused above ``max_grid`` points.
    ``block=True`` sums over dyadic blocks M <= n < 2M instead of 1..k.
    The fit uses k >= 2**fit_from (default: the upper half of the levels).
    """
    exp = _as_exponent(exp)
    lo, hi = (pc.exact_value(v) for v in x_interval)
    if not 0 < lo < hi:
        raise DomainError("x_interval must satisfy 0 < a' < b'")
    J = int(math.floor(math.log2(k_dyadic_max)))
    if J < 2:
        raise DomainError("k_dyadic_max must be at least 4")
    ks = np.array([1 << j for j in range(1, J + 1)], dtype=np.int64)
    notes = []
    if mode == "exact":
        npts = int(math.ceil(float(hi - lo) * exact_grid_points(exp, float(hi), int(ks[-1]) * (2 if block else 1), eps))) + 1
        if npts > max_grid:
            raise DomainError(f"exact mode needs {npts} grid points (limit {max_grid}); use the heuristic mode")
        refine = False
    elif mode == "heuristic":
        npts = int(grid_density)
        notes.append("heuristic grid: sup accuracy not guaranteed")
    else:
        raise DomainError(f"unknown mode {mode!r}")
    if npts < 2:
        raise DomainError("grid_density must be at least 2")
    step = (hi - lo) / (npts - 1)
    xs = [lo + i * step for i in range(npts)]
    ys = pc.cycle_coefficients(xs)
    xf = np.array([float(x) for x in xs])
    if block:
        top = int(2 * ks[-1] - 1)
        cps = np.concatenate(([0], np.sort(np.concatenate((ks - 1, 2 * ks - 1)))))
        cps = np.unique(cps)
        sums, err = pc.grid_partial_sums(exp, ys, 1, top, checkpoints=cps, threads=threads)
        idx = {int(c): i for i, c in enumerate(cps)}
        vals = np.stack([sums[:, idx[int(2 * k - 1)]] - sums[:, idx[int(k - 1)]] for k in ks], axis=1)
    else:
        vals, err = pc.grid_partial_sums(exp, ys, 1, int(ks[-1]), checkpoints=ks, threads=threads)
    absv = np.abs(vals)
    sup = absv.max(axis=0)
    arg = absv.argmax(axis=0)
    jumps = np.abs(np.diff(vals, axis=0)).max(axis=0) if npts > 1 else np.zeros(len(ks))
    dens = [bool(jumps[j] < 0.1 * sup[j]) for j in range(len(ks))]
    sup_list = [float(s) for s in sup]
    argx = [float(xf[a]) for a in arg]
    if refine:
        h = float(step)
        for j, k in enumerate(ks):
            k = int(k)
            x0 = float(xf[arg[j]])
            a_, b_ = max(float(lo), x0 - h), min(float(hi), x0 + h)

            def f(x, k=k):
                if block:
                    return abs(complex(pc.partial_sums(exp, x, k, k)[0][0]))
                return abs(complex(pc.partial_sums(exp, x, 1, k)[0][0]))

            xb, fb = _golden_max(f, a_, b_, 40)
            if fb > sup_list[j]:
                sup_list[j], argx[j] = fb, xb
    first = J // 2 if fit_from is None else int(fit_from)
    sel = [j for j in range(len(ks)) if ks[j] >= (1 << max(first, 0))]
    if len(sel) < 2:
        raise DomainError("fewer than two dyadic levels in the fit window")
    lx = np.log(ks[sel].astype(np.float64))
    ly = np.log(np.maximum(np.array(sup_list)[sel], 1e-300))
    (slope, intercept), res, *_ = np.polyfit(lx, ly, 1, full=True)
    resid = float(math.sqrt(res[0] / len(sel))) if len(res) else 0.0
    poor = resid > 0.5
    if poor:
        notes.append("poor fit: residual above 0.5")
    if not all(dens):
        notes.append("density check failed at some k: adjacent grid sums differ by 10% of the sup or more")
    return ExponentEstimate(exp.alpha, (float(lo), float(hi)), float(slope), float(intercept),
                            [int(k) for k in ks], sup_list, argx, resid, [int(ks[j]) for j in sel],
                            mode, npts, all(dens), dens, poor, block, notes)


# ---------------------------------------------------------------------------
# sum versus integral

@dataclass(frozen=True)
class IntegralComparison:
    alpha: float
    x: float
    u: int
    v: int
    sum: complex
    integral: complex
    diff: float
    theta: float
    diff_theta: float
    max_derivative: float


def integral_vs_sum(exp, x, u: int, v: int, *, tol: float = 1e-9) -> IntegralComparison:
    """Compare sum_{u<n<v} e(n**alpha x) with the integral of e(y**alpha x) over [u, v].

    theta = 1 - max |f'| on [u, v] with f(y) = y**alpha x; |f'| >= 1 is refused.
    """
    exp = _as_exponent(exp)
    u, v = int(u), int(v)
    if not 1 <= u < v:
        raise DomainError("need 1 <= u < v")
    xq = pc.exact_value(x)
    a = exp.alpha
    xf = float(xq)
    # |f'| = alpha |x| y**(alpha-1) is monotone, so its max sits at an endpoint
    ends = [a * abs(xf) * float(y) ** (a - 1.0) for y in (u, v)]
    dmax = max(ends)
    if dmax >= 1.0:
        raise PreconditionViolated(f"|f'| reaches {dmax:.6g} >= 1 on [{u}, {v}]")
    theta = 1.0 - dmax
    if v - u >= 2:
        s = complex(pc.partial_sums(exp, xq, u + 1, v - u - 1)[0][0])
    else:
        s = 0j
    if xf == 0.0:
        integral = complex(v - u)
    else:
        integral = pc.oscillatory_integral(
            lambda y: xf * np.power(y, a), float(u), float(v), tol,
            derivative=lambda y: a * xf * np.power(y, a - 1.0),
        )
    diff = abs(s - integral)
    return IntegralComparison(a, xf, u, v, s, integral, diff, theta, diff * theta, dmax)
