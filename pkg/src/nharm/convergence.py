"""Tails of the series sum c_k sin(k**alpha t), sum c_k cos(k**alpha t).

Angles t are raw (radians).  Everything here is finite-scale evidence:
sup-norms over finite grids, tails truncated at an explicit L, witness
windows at explicit m.  No report claims a limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import _backend
from . import phasecore as pc
from .errors import DomainError, WitnessNotFound
from .expsums import _as_exponent, _floor_power, c_exponent
from .sequences import CoefficientSequence

_SQRT_HALF = math.sqrt(0.5)


# ---------------------------------------------------------------------------
# grids and tails

def make_grid(domain, points: int = 1001, spacing: str = "linear") -> list:
    """Grid over ``domain``: an explicit list of angles, or an interval (a, b).

    Linear grids of n points are contained in the grid of 2n - 1 points,
    so doubling the density refines the grid.
    """
    if isinstance(domain, (list, np.ndarray)):
        return list(domain)
    a, b = domain
    if points < 1:
        raise DomainError("a grid needs at least one point")
    if points == 1:
        return [a]
    if spacing == "linear":
        a_q, b_q = pc.exact_value(a), pc.exact_value(b)
        step = (b_q - a_q) / (points - 1)
        return [a_q + i * step for i in range(points)]
    if spacing == "log":
        if not 0 < float(a) < float(b):
            raise DomainError("log grids need 0 < a < b")
        return list(np.geomspace(float(a), float(b), points))
    raise DomainError(f"unknown grid spacing {spacing!r}")


@dataclass(frozen=True)
class TailQuery:
    l: int
    L: int
    x_domain: object = (1.0, 2.0)
    series_kind: str = "sine"
    points: int = 1001
    spacing: str = "linear"

    def __post_init__(self):
        if not 1 <= self.l < self.L:
            raise DomainError(f"need 1 <= l < L, got l={self.l}, L={self.L}")
        if self.series_kind not in ("sine", "cosine"):
            raise DomainError(f"series_kind must be 'sine' or 'cosine', got {self.series_kind!r}")


@dataclass(frozen=True)
class TailReport:
    l: int
    L: int
    series_kind: str
    sup_abs: float
    arg_sup: float
    value_at_sup: float
    grid: np.ndarray = field(repr=False)
    trace: np.ndarray = field(repr=False)
    phase_error: float = 0.0


def series_tail(seq: CoefficientSequence, exp, q: TailQuery, *, threads: int = 1) -> TailReport:
    """sup over the grid of |sum_{k=l}^{L} c_k sin(k**alpha t)| (or cos)."""
    exp = _as_exponent(exp)
    xs = make_grid(q.x_domain, q.points, q.spacing)
    if not xs:
        raise DomainError("empty x domain")
    c = np.ascontiguousarray(seq.window(q.l, q.L))
    ys = pc.cycle_coefficients(xs, angle=True)
    sums, err = pc.grid_partial_sums(exp, ys, q.l, q.L - q.l + 1, weights=c, threads=threads)
    col = sums[:, -1]
    vals = col.imag.copy() if q.series_kind == "sine" else col.real.copy()
    i = int(np.argmax(np.abs(vals)))
    with mpmath.workdps(20):
        grid = np.array([float(pc.to_mpf(x)) for x in xs])
    return TailReport(q.l, q.L, q.series_kind, float(abs(vals[i])), float(grid[i]), float(vals[i]),
                      grid, vals, err)


# ---------------------------------------------------------------------------
# summation by parts

@dataclass(frozen=True)
class AbelReport:
    l: int
    L: int
    t: float
    direct: float
    abel: float
    diff: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.diff <= self.tolerance


def abel_identity_check(seq: CoefficientSequence, exp, l: int, L: int, t) -> AbelReport:
    """sum_{k=l}^{L} c_k s_k against sum_{k=l}^{L-1} (c_k - c_{k+1}) S_k - c_l S_{l-1} + c_L S_L.

    s_k = sin(k**alpha t) and S_k = s_1 + ... + s_k.  The direct side is a
    weighted sum over [l, L]; the other side uses the running sums S_k.
    """
    exp = _as_exponent(exp)
    l, L = int(l), int(L)
    if not 1 <= l <= L:
        raise DomainError("need 1 <= l <= L")
    c = seq.window(l, L)
    direct_sums, _ = pc.partial_sums(exp, t, l, L - l + 1, angle=True, weights=np.ascontiguousarray(c))
    direct = float(direct_sums[-1].imag)
    ks = np.arange(l - 1, L + 1, dtype=np.int64)  # S_{l-1} .. S_L
    S, _ = pc.partial_sums(exp, t, 1, L, angle=True, checkpoints=ks)
    S = S.imag
    terms = list((c[:-1] - c[1:]) * S[1:-1]) + [-float(c[0]) * S[0], float(c[-1]) * S[-1]]
    abel = pc.compensated_sum(terms)
    diff = abs(direct - abel)
    tol = 1e-9 * L * float(np.max(c))
    with mpmath.workdps(20):
        tf = float(pc.to_mpf(t))
    return AbelReport(l, L, tf, direct, float(abel), diff, tol)


# ---------------------------------------------------------------------------
# witnesses

@dataclass(frozen=True)
class NecessityWitness:
    m: int
    n: int
    r0: int
    x: float
    window_sum: float
    lower_bound: float
    phase_start: float
    window_phases_ok: bool
    candidates_tried: int = 1
    note: str = "finite-scale proxy: a large window sum at fixed x, not a divergence proof"


def _window_fracs(exp, x, n: int, count: int, digits: int = 40) -> list:
    """frac(k**alpha x / 2pi) for k = n .. n+count-1 by mpmath (independent of the dd engine)."""
    out = []
    with mpmath.workdps(digits):
        y = pc.to_mpf(x) / (2 * mpmath.pi)
        a = exp.mpf()
        for k in range(n, n + count):
            p = mpmath.mpf(k) ** a * y
            out.append(p - mpmath.floor(p))
    return out


def _r0(exp, x, n: int) -> int:
    with mpmath.workdps(50):
        a = exp.mpf()
        v = mpmath.mpf(n) ** (1 - a) * mpmath.pi / (8 * a * pc.to_mpf(x))
        return int(mpmath.floor(v))


def necessity_witness_small_alpha(seq: CoefficientSequence, exp, x, m: int) -> NecessityWitness:
    """Smallest n in [m, 2m] whose window n .. n+r0 has every phase in (pi/4, 3pi/4).

    Candidates are n with frac(n**alpha x / 2pi) in (1/8, 1/4) and
    r0 = floor(n**(1-alpha) pi / (8 alpha x)).  Each window is rechecked
    term by term; a candidate failing the recheck is skipped.
    """
    exp = _as_exponent(exp)
    if not 0 < exp.value < 1:
        raise DomainError("witnesses need 0 < alpha < 1")
    with mpmath.workdps(20):
        if not pc.to_mpf(x) > 0:
            raise DomainError("x must be positive")
    m = int(m)
    if m < 1:
        raise DomainError("m must be positive")
    power_hi, power_lo = pc.power_table(exp, m, m + 1)
    y_hi, y_lo = pc.cycle_coefficient(x, angle=True)
    fr = np.asarray(_backend.kernels.frac_products(power_hi, power_lo, y_hi, y_lo))
    slack = 1e-9
    cand = np.flatnonzero((fr > 0.125 - slack) & (fr < 0.25 + slack))
    tried = 0
    for i in cand:
        n = m + int(i)
        tried += 1
        with mpmath.workdps(40):
            f0 = _window_fracs(exp, x, n, 1)[0]
            if not (mpmath.mpf(1) / 8 < f0 < mpmath.mpf(1) / 4):
                continue
        r0 = _r0(exp, x, n)
        fracs = _window_fracs(exp, x, n, r0 + 1)
        ok = all(mpmath.mpf(1) / 8 < f < mpmath.mpf(3) / 8 for f in fracs)
        if not ok:
            continue
        c = seq.window(n, n + r0)
        with mpmath.workdps(40):
            sines = [float(mpmath.sin(2 * mpmath.pi * f)) for f in fracs]
        wsum = pc.compensated_sum(list(c * np.array(sines)))
        lower = _SQRT_HALF * pc.compensated_sum(list(c))
        with mpmath.workdps(20):
            xf = float(pc.to_mpf(x))
        return NecessityWitness(m, n, r0, xf, float(wsum), float(lower), float(f0), True, tried)
    raise WitnessNotFound(f"no witness n in [{m}, {2 * m}] for alpha={exp.alpha}, x={x}; increase m")


@dataclass(frozen=True)
class NecessityProbe:
    l: int
    L: int
    x: float
    tail_value: float
    coefficient_sum: float
    lower_bound: float
    phases_ok: bool
    min_phase: float
    max_phase: float

    @property
    def inequality_holds(self) -> bool:
        return self.tail_value >= self.lower_bound * (1 - 1e-12)


def necessity_probe_theorem_1_2(seq: CoefficientSequence, exp, l: int) -> NecessityProbe:
    """Tail sum_{k=l}^{L} c_k sin(k**alpha x) at x = pi l**-alpha / 4, L = floor(2**(1/alpha) l).

    Every k in [l, L] has k**alpha x in [pi/4, pi/2], so each sine is at
    least sqrt(2)/2 and the tail is at least sqrt(2)/2 * sum c_k.
    """
    exp = _as_exponent(exp)
    l = int(l)
    if l < 1:
        raise DomainError("l must be positive")
    a = exp.value
    L = _floor_power(Fraction(2 ** a.denominator * l ** a.numerator), Fraction(1, a.numerator))
    if L <= l:
        raise DomainError(f"degenerate range: floor(2**(1/alpha) l) = {L} <= l = {l}")
    with mpmath.workdps(50):
        y = mpmath.mpf(l) ** (-exp.mpf()) / 8  # x / 2pi in cycles
        x = float(y * 2 * mpmath.pi)
    sums, _ = pc.partial_sums(exp, y, l, L - l + 1, weights=np.ascontiguousarray(seq.window(l, L)))
    tail = float(sums[-1].imag)
    # phase range: k**alpha y is increasing, check the endpoints at 50 digits
    with mpmath.workdps(50):
        lo = mpmath.mpf(l) ** exp.mpf() * y
        hi = mpmath.mpf(L) ** exp.mpf() * y
        tiny = mpmath.mpf(10) ** -40
        ok = bool(mpmath.mpf(1) / 8 - tiny <= lo and hi <= mpmath.mpf(1) / 4 + tiny)
    # exact form of the upper end: L**alpha <= 2 l**alpha
    ok = ok and L ** a.numerator <= 2 ** a.denominator * l ** a.numerator
    csum = pc.compensated_sum(list(seq.window(l, L)))
    return NecessityProbe(l, L, x, tail, float(csum), _SQRT_HALF * float(csum), ok, float(lo), float(hi))


# ---------------------------------------------------------------------------
# verdicts

@dataclass(frozen=True)
class VerdictRow:
    l: int
    L: int
    sup_abs: float
    x_at_sup: float
    precondition_stat: float
    block_stat: float | None = None
    witness_lower_bound: float | None = None


@dataclass(frozen=True)
class VerdictReport:
    sequence: str
    alpha: float
    statistic: str
    rows: list
    decaying: bool
    statistic_decaying: bool
    K_stat: int
    notes: list = field(default_factory=list)


def _decay_flag(values) -> bool:
    v = [float(s) for s in values]
    if len(v) < 2:
        return False
    steps = all(v[i + 1] <= 1.05 * v[i] for i in range(len(v) - 1))
    return bool(steps and v[-1] <= 0.5 * v[0])


def uniform_convergence_verdict(seq: CoefficientSequence, exp, x_domain, l_schedule, L_factor: float | None = None,
                                *, points: int = 1001, spacing: str = "linear", series_kind: str = "sine",
                                threads: int = 1, witness_m: bool = True,
                                K_stat: int | None = None) -> VerdictReport:
    """Tail sup-norms along ``l_schedule`` next to the precondition statistics.

    Noninteger alpha < 1: the statistic is sum_{k=l}^{K} c_k k**-c(alpha)
    together with its dyadic block sum_{k=l}^{2l-1}, and, at the left end of
    the domain, the witness lower bound for m = l.  alpha > 1: the statistic
    is b_l = max_{l<=k<=K} c_k k.  K defaults to 16 times the largest L.
    ``decaying`` means each value is at most 5% above the previous one and
    the last is at most half the first.  For alpha < 1 the statistic trend
    is judged on the block sums, which do not shrink merely because the
    truncated tail gets shorter.
    """
    exp = _as_exponent(exp)
    sched = [int(l) for l in l_schedule]
    if not sched:
        raise DomainError("l_schedule must be nonempty")
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise DomainError("l_schedule must be strictly increasing")
    if L_factor is None:
        L_factor = 2.0 ** (1.0 / exp.alpha)
    Ls = [max(l + 1, int(math.ceil(L_factor * l))) for l in sched]
    K = 16 * max(Ls) if K_stat is None else int(K_stat)
    if K < max(Ls):
        raise DomainError("K_stat must be at least the largest L")
    small = exp.value < 1 and not exp.is_integer
    if exp.is_integer:
        statistic = "none (integer alpha)"
    elif small:
        statistic = "sum c_k k^-c(alpha)"
    else:
        statistic = "b_l = max c_k k"
    cK = seq.values(K)
    k = np.arange(1, K + 1, dtype=np.float64)
    if small:
        w = cK * np.power(k, -c_exponent(exp))
        suffix = np.cumsum(w[::-1])[::-1]
        csum = np.concatenate(([0.0], np.cumsum(w)))
    else:
        suffix = np.maximum.accumulate((cK * k)[::-1])[::-1]
    notes = ["finite-scale trend report; no limit is claimed"]
    x_left = make_grid(x_domain, 1)[0]
    rows = []
    for l, L in zip(sched, Ls):
        tail = series_tail(seq, exp, TailQuery(l, L, x_domain, series_kind, points, spacing), threads=threads)
        stat = float(suffix[l - 1]) if not exp.is_integer else float("nan")
        wb = None
        block = float(csum[min(2 * l - 1, K)] - csum[l - 1]) if small else None
        if small and witness_m:
            try:
                wb = necessity_witness_small_alpha(seq, exp, x_left, l).lower_bound
            except (WitnessNotFound, DomainError):
                wb = None
        block = float(csum[min(2 * l - 1, K)] - csum[l - 1]) if small else None
        rows.append(VerdictRow(l, L, tail.sup_abs, tail.arg_sup, stat, block, wb))
    decaying = _decay_flag([r.sup_abs for r in rows])
    if exp.is_integer:
        stat_dec = False
    else:
        stat_dec = _decay_flag([r.block_stat if small else r.precondition_stat for r in rows])
    if small and any(r.witness_lower_bound is not None for r in rows):
        notes.append("witness lower bounds are window sums at the left end of the domain")
    return VerdictReport(seq.name, exp.alpha, statistic, rows, decaying, stat_dec, K, notes)
