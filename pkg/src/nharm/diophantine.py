"""Square-free integers, simultaneous approximation and bad points.

A bad point for the exponent alpha and length L is a real x0 where the
terms sin(n**alpha x0) line up: either every square-free n <= L has
sin(n**alpha x0) >= threshold (alignment), or every partial sum satisfies
S_k(x0) > 0.1 k for k <= L (partial sums).  Searches are heuristic; the
returned certificates are recomputed from scratch at 50 digits.
"""
from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from . import _backend
from . import phasecore as pc
from .errors import DomainError, PreconditionViolated
from .expsums import _as_exponent
from .phasecore import HarmonicExponent
from .sequences import CoefficientSequence

CERT_DIGITS = 50
SIEVE_MAGIC = b"NHSQ"
SIEVE_VERSION = 1
_HEADER = struct.Struct("<4sIQ")


# ---------------------------------------------------------------------------
# square-free sieve

@dataclass(frozen=True, eq=False)
class SquareFreeTable:
    """indicator[n] is True iff n is square-free, for 1 <= n <= N (index 0 unused)."""

    N: int
    indicator: np.ndarray = field(repr=False)
    _prefix: list = field(default_factory=list, repr=False)

    @property
    def count_prefix(self) -> np.ndarray:
        """count_prefix[n] = number of square-free integers in [1, n]."""
        if not self._prefix:
            cp = np.cumsum(self.indicator, dtype=np.int64)
            cp.setflags(write=False)
            self._prefix.append(cp)
        return self._prefix[0]

    def count(self, n: int | None = None) -> int:
        n = self.N if n is None else int(n)
        if not 0 <= n <= self.N:
            raise DomainError(f"n must lie in [0, {self.N}]")
        return int(np.count_nonzero(self.indicator[1:n + 1]))

    def numbers(self, upto: int | None = None) -> np.ndarray:
        upto = self.N if upto is None else min(int(upto), self.N)
        return np.flatnonzero(self.indicator[:upto + 1])

    def __contains__(self, n) -> bool:
        return 1 <= n <= self.N and bool(self.indicator[n])

    def density(self) -> float:
        return self.count() / self.N

    def dump(self, path) -> None:
        """Raw bitset: 16-byte header (magic, uint32 version, uint64 N), then bits of n = 1..N."""
        bits = np.packbits(self.indicator[1:], bitorder="little")
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(SIEVE_MAGIC, SIEVE_VERSION, self.N))
            fh.write(bits.tobytes())


def load_sieve(path) -> SquareFreeTable:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise DomainError("sieve file is shorter than its header")
    magic, version, N = _HEADER.unpack_from(data)
    if magic != SIEVE_MAGIC:
        raise DomainError("not a square-free sieve file (bad magic)")
    if version != SIEVE_VERSION:
        raise DomainError(f"unsupported sieve file version {version}")
    payload = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
    if len(payload) != (N + 7) // 8:
        raise DomainError("sieve file length does not match its header")
    ind = np.zeros(N + 1, dtype=bool)
    ind[1:] = np.unpackbits(payload, count=N, bitorder="little").astype(bool)
    ind.setflags(write=False)
    return SquareFreeTable(int(N), ind)


def _primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if s[p]:
            s[p * p::p] = False
    return np.flatnonzero(s)


def squarefree_sieve(N: int) -> SquareFreeTable:
    """Mark multiples of p**2 for every prime p <= sqrt(N)."""
    N = int(N)
    if N < 1:
        raise DomainError("N must be at least 1")
    ind = np.ones(N + 1, dtype=bool)
    ind[0] = False
    for p in _primes_upto(math.isqrt(N)):
        ind[int(p) * int(p)::int(p) * int(p)] = False
    ind.setflags(write=False)
    return SquareFreeTable(N, ind)


# ---------------------------------------------------------------------------
# simultaneous approximation

@dataclass(frozen=True)
class DiophantineQuery:
    alphas: tuple
    betas: tuple
    delta: float
    search_bound: int

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        object.__setattr__(self, "betas", tuple(self.betas))
        if len(self.alphas) < 1 or len(self.alphas) != len(self.betas):
            raise DomainError("alphas and betas must be nonempty and of equal length")
        if not 0 < float(self.delta) < 0.5:
            raise DomainError("delta must lie in (0, 1/2)")
        if int(self.search_bound) < 1:
            raise DomainError("search_bound must be positive")

    @property
    def nu(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class ApproxResult:
    found: bool
    x: int | None
    norms: list
    scanned: int
    recheck_digits: int
    candidates_rejected: int = 0


def _dist_int(f: np.ndarray) -> np.ndarray:
    return np.abs(f - np.rint(f))


def _mp_norms(q: DiophantineQuery, x: int, digits: int) -> list:
    with mpmath.workdps(digits):
        out = []
        for a, b in zip(q.alphas, q.betas):
            v = x * pc.to_mpf(a) + pc.to_mpf(b)
            out.append(abs(v - mpmath.nint(v)))
        return out


def _scan_chunk(q, a_dd, b_dd, lo, hi, slack):
    xs = np.arange(lo, hi, dtype=np.float64)
    zeros = np.zeros_like(xs)
    ok = np.ones(len(xs), dtype=bool)
    for (ah, al), (bh, bl) in zip(a_dd, b_dd):
        f = np.asarray(_backend.kernels.frac_products(xs, zeros, ah, al))
        ok &= _dist_int(f + (bh + bl)) < float(q.delta) + slack
        if not ok.any():
            break
    return (lo + np.flatnonzero(ok)).tolist()


def simultaneous_approx_search(q: DiophantineQuery, *, threads: int = 1, chunk: int = 1 << 16,
                               precision_digits: int | None = None) -> ApproxResult:
    """Smallest integer 1 <= x <= search_bound with ||x a_j + b_j|| < delta for all j.

    The scan uses double-double fractional parts; each hit is rechecked at
    twice the working precision with mpmath, and rejected hits are skipped.
    """
    digits = pc.default_precision() if precision_digits is None else int(precision_digits)
    recheck = 2 * digits
    with mpmath.workdps(45):
        a_dd = [pc.dd_split(pc.to_mpf(a)) for a in q.alphas]
        b_dd = [pc.dd_split(pc.to_mpf(b)) for b in q.betas]
    bound = int(q.search_bound)
    if bound >= 2 ** 52:
        raise DomainError("search_bound must be below 2**52")
    slack = 1e-12
    starts = list(range(1, bound + 1, chunk))
    rejected = 0
    delta = mpmath.mpf(pc.exact_value(q.delta).numerator) / pc.exact_value(q.delta).denominator

    def scan(lo):
        return _scan_chunk(q, a_dd, b_dd, lo, min(lo + chunk, bound + 1), slack)

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        # walk chunks in order in batches; the first certified hit wins
        for i in range(0, len(starts), max(1, int(threads))):
            batch = starts[i:i + max(1, int(threads))]
            for hits in pool.map(scan, batch):
                for x in hits:
                    with mpmath.workdps(recheck):
                        norms = _mp_norms(q, x, recheck)
                        good = all(nv < delta for nv in norms)
                    if good:
                        return ApproxResult(True, int(x), [float(v) for v in norms], int(x), recheck, rejected)
                    rejected += 1
    return ApproxResult(False, None, [], bound, recheck, rejected)


# ---------------------------------------------------------------------------
# bad points

@dataclass(frozen=True)
class BadPointResult:
    success: bool
    x0: float | None
    L: int
    alpha: float
    mode: str
    threshold: float | None = None
    min_aligned_sine: float | None = None
    constrained_n: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def certified_range(self) -> tuple[int, int] | None:
        """Largest [1, K] on which every partial-sum certificate passes."""
        if self.mode != "partial_sum":
            return None
        K = 0
        for k, _, _, ok in self.certificates:
            if not ok:
                break
            K = k
        return (1, K) if K else None


def _fresh_sines(alpha: Fraction, x0: float, ns) -> list:
    """sin(n**alpha x0) from an independent 50-digit phase reduction."""
    exp = HarmonicExponent(alpha, precision_digits=CERT_DIGITS)
    out = []
    with mpmath.workdps(CERT_DIGITS):
        for n in ns:
            f = pc.reduce_phase(int(n), exp, x0, angle=True).fractional_part
            out.append(float(mpmath.sin(2 * mpmath.pi * mpmath.mpf(f))))
    return out


def _grid(x_range, grid: int) -> np.ndarray:
    a, b = float(x_range[0]), float(x_range[1])
    if not a < b:
        raise DomainError("x_range must satisfy a < b")
    if int(grid) < 2:
        raise DomainError("grid must have at least 2 points")
    return np.linspace(a, b, int(grid))


def _zoom(objective, x_best: float, width: float, lo: float, hi: float, rounds: int = 8, pts: int = 201):
    best_x, best_v = x_best, float(objective(np.array([x_best]))[0])
    for _ in range(rounds):
        xs = np.linspace(max(lo, best_x - width), min(hi, best_x + width), pts)
        vs = objective(xs)
        i = int(np.argmax(vs))
        if vs[i] > best_v:
            best_x, best_v = float(xs[i]), float(vs[i])
        width *= 4.0 / pts
    return best_x, best_v


def _blocked(objective, xs: np.ndarray, block: int = 1 << 15, threads: int = 1) -> np.ndarray:
    """objective on fixed blocks of xs; blocks are independent, so threads do not change the result."""
    parts = [xs[i:i + block] for i in range(0, len(xs), block)]
    if threads <= 1 or len(parts) < 2:
        return np.concatenate([objective(p) for p in parts])
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return np.concatenate(list(pool.map(objective, parts)))


def _top_candidates(vals: np.ndarray, count: int) -> np.ndarray:
    count = min(count, len(vals))
    idx = np.argpartition(-vals, count - 1)[:count]
    return idx[np.argsort(-vals[idx], kind="stable")]


def bad_point_search_alignment(exp, L: int, threshold: float = 0.8, x_range=(0.0, 20000.0),
                               grid: int = 400_000, *, candidates: int = 16, threads: int = 1) -> BadPointResult:
    """x0 in x_range with sin(n**alpha x0) >= threshold for every square-free n <= L.

    Coarse grid, then zoom refinement around the best grid points; the
    winner is certified at 50 digits.  ``success`` is False when no
    certified point is found.
    """
    exp = _as_exponent(exp)
    L = int(L)
    if L < 1:
        raise DomainError("L must be at least 1")
    if not -1.0 < threshold <= 1.0:
        raise DomainError("threshold must lie in (-1, 1]")
    ns = squarefree_sieve(L).numbers()
    pw = np.power(ns.astype(np.float64), exp.alpha)

    def objective(xs):
        return np.min(np.sin(np.outer(xs, pw)), axis=1)

    xs = _grid(x_range, grid)
    vals = _blocked(objective, xs, threads=threads)
    step = float(xs[1] - xs[0])
    best = None
    refined = 0
    for i in _top_candidates(vals, candidates):
        refined += 1
        x, v = _zoom(objective, float(xs[i]), step, float(xs[0]), float(xs[-1]))
        if best is None or v > best[1]:
            best = (x, v)
    stats = {"grid_points": int(grid), "grid_step": step, "coarse_best": float(np.max(vals)),
             "refined_candidates": refined, "refined_best": float(best[1]),
             "constraints": int(len(ns))}
    sines = _fresh_sines(exp.value, best[0], ns)
    cert = [(int(n), s, bool(s >= threshold)) for n, s in zip(ns, sines)]
    ok = all(c[2] for c in cert)
    return BadPointResult(ok, best[0] if ok else None, L, exp.alpha, "alignment", float(threshold),
                          float(min(sines)), [int(n) for n in ns], cert,
                          dict(stats, best_x=best[0]))


def bad_point_search_partial_sum(exp, L: int, x_range=(0.0, 2 * math.pi), grid: int = 200_000, *,
                                 candidates: int = 16, threads: int = 1) -> BadPointResult:
    """x0 maximizing min_{k<=L} S_k(x)/k, with certificates S_k(x0) > 0.1 k for k <= L."""
    exp = _as_exponent(exp)
    L = int(L)
    if L < 1:
        raise DomainError("L must be at least 1")
    ks = np.arange(1, L + 1, dtype=np.float64)
    pw = np.power(ks, exp.alpha)

    def objective(xs):
        s = np.cumsum(np.sin(np.outer(xs, pw)), axis=1)
        return np.min(s / ks, axis=1)

    xs = _grid(x_range, grid)
    vals = _blocked(objective, xs, block=1 << 13, threads=threads)
    step = float(xs[1] - xs[0])
    best = None
    for i in _top_candidates(vals, candidates):
        x, v = _zoom(objective, float(xs[i]), step, float(xs[0]), float(xs[-1]))
        if best is None or v > best[1]:
            best = (x, v)
    sines = _fresh_sines(exp.value, best[0], range(1, L + 1))
    cert, acc = [], []
    for k, s in enumerate(sines, start=1):
        acc.append(s)
        S = math.fsum(acc)
        cert.append((k, S, 0.1 * k, bool(S > 0.1 * k)))
    ok = all(c[3] for c in cert)
    stats = {"grid_points": int(grid), "grid_step": step, "coarse_best": float(np.max(vals)),
             "refined_best": float(best[1]), "best_x": best[0]}
    return BadPointResult(ok, best[0], L, exp.alpha, "partial_sum", None, None, [], cert, stats)


@dataclass(frozen=True)
class DivergenceBound:
    l: int
    L: int
    sum_at_x0: float
    bound: float
    holds: bool
    weak: bool
    certificates_ok: bool
    monotone: bool


def divergence_lower_bound(seq: CoefficientSequence, bp: BadPointResult, l: int, L: int) -> DivergenceBound:
    """sum_{k=l}^{L} c_k sin(k**alpha x0) against 0.1 sum_{k=l+1}^{L} c_k - 0.9 c_l l.

    Needs partial-sum certificates on [l, L] and a nonincreasing sequence.
    ``weak`` marks a negative (trivially satisfied) bound.
    """
    l, L = int(l), int(L)
    if not 1 <= l <= L:
        raise DomainError("need 1 <= l <= L")
    if bp.mode != "partial_sum" or bp.x0 is None:
        raise PreconditionViolated("a partial-sum bad point is required")
    if L > bp.L:
        raise PreconditionViolated(f"certificates stop at k = {bp.L} < L = {L}")
    certs_ok = all(ok for k, _, _, ok in bp.certificates if l <= k <= L)
    if not certs_ok:
        raise PreconditionViolated(f"partial-sum certificates fail inside [{l}, {L}]")
    c = seq.window(l, L + 1)
    monotone = bool(np.all(c[1:] <= c[:-1]))
    if not monotone:
        raise PreconditionViolated(f"{seq.name} is not nonincreasing on [{l}, {L + 1}]")
    sines = _fresh_sines(pc.exact_value(bp.alpha), bp.x0, range(l, L + 1))
    total = pc.compensated_sum(list(c[:-1] * np.array(sines)))
    bound = 0.1 * pc.compensated_sum(list(c[1:-1])) - 0.9 * float(c[0]) * l
    return DivergenceBound(l, L, float(total), float(bound), bool(total > bound), bound < 0, certs_ok, monotone)


# ---------------------------------------------------------------------------
# linear independence probe

@dataclass(frozen=True)
class IndependenceReport:
    u: int
    v: int
    s: int
    r: int
    n_list: list
    assumed_independent: bool
    probe_run: bool
    q_max: int | None = None
    min_abs: float | None = None
    argmin: list | None = None
    relation_found: bool = False
    expected_min: float | None = None
    note: str = ("linear independence of the n**(r/v) is assumed, not proved; "
                 "the probe is numerical evidence only")


def _nearest_completion(partial: np.ndarray, last: float, q_max: int):
    """min over |q| <= q_max of |partial + q last|, elementwise."""
    q = np.clip(np.rint(-partial / last), -q_max, q_max)
    best = np.abs(partial + q * last)
    bq = q.copy()
    for d in (-1.0, 1.0):
        qq = np.clip(q + d, -q_max, q_max)
        v = np.abs(partial + qq * last)
        better = v < best
        best = np.where(better, v, best)
        bq = np.where(better, qq, bq)
    return best, bq


def besicovitch_rational_check(alpha, n_list, *, probe: bool = True, q_max: int = 1000,
                               relation_tol: float = 1e-40, max_pairs: int = 20_000_000) -> IndependenceReport:
    """Parameters of the reduction for alpha = u/v and an optional small-relation probe.

    The probe looks for integers |q_j| <= q_max, not all zero, minimizing
    |sum q_j n_j**alpha|.  A double-precision scan picks the best candidate,
    which is then re-evaluated at 50 digits; a relation is reported only if
    that value is below ``relation_tol`` (an exact zero at this precision).
    With four or more terms small values are expected by counting alone,
    so ``min_abs`` must be read against ``expected_min``.  For more than
    three terms the scan meets in the middle; q_max is lowered if needed to
    keep each half below ``max_pairs`` combinations.
    """
    a = pc.exact_value(alpha)
    if a.denominator == 1:
        raise DomainError("alpha must be a noninteger rational u/v")
    u, v = a.numerator, a.denominator
    ns = [int(n) for n in n_list]
    if not ns or any(n < 1 for n in ns):
        raise DomainError("n_list must contain positive integers")
    if len(set(ns)) != len(ns):
        raise DomainError("n_list entries must be distinct")
    for n in ns:
        if n > 1 and any(n % (p * p) == 0 for p in range(2, math.isqrt(n) + 1)):
            raise DomainError(f"{n} is not square-free")
    r = u % v
    base = dict(u=u, v=v, s=len(ns), r=r, n_list=ns, assumed_independent=True)
    if not probe:
        return IndependenceReport(**base, probe_run=False)
    with mpmath.workdps(40):
        vals = [float(mpmath.mpf(n) ** (mpmath.mpf(u) / v)) for n in ns]
    nu = len(ns)
    if nu == 1:
        return IndependenceReport(**base, probe_run=True, q_max=q_max, min_abs=vals[0], argmin=[1])
    half = nu // 2 if nu >= 4 else nu - 1
    while (2 * q_max + 1) ** half > max_pairs and q_max > 1:
        q_max //= 2
    qs = np.arange(-q_max, q_max + 1, dtype=np.float64)
    if nu <= 3:
        grids = np.meshgrid(*([qs] * (nu - 1)), indexing="ij")
        coeffs = [g.ravel() for g in grids]
        partial = sum(c * val for c, val in zip(coeffs, vals[:-1]))
        best, q_last = _nearest_completion(partial, vals[-1], q_max)
        nonzero = np.any(np.stack(coeffs), axis=0) | (q_last != 0)
        best = np.where(nonzero, best, np.inf)
        i = int(np.argmin(best))
        arg = [int(c[i]) for c in coeffs] + [int(q_last[i])]
    else:
        left = np.meshgrid(*([qs] * half), indexing="ij")
        right = np.meshgrid(*([qs] * (nu - half)), indexing="ij")
        lc = [g.ravel() for g in left]
        rc = [g.ravel() for g in right]
        lv = sum(c * val for c, val in zip(lc, vals[:half]))
        rv = sum(c * val for c, val in zip(rc, vals[half:]))
        order = np.argsort(rv, kind="stable")
        rs = rv[order]
        pos = np.searchsorted(rs, -lv)
        best_v, arg = math.inf, None
        for off in (-1, 0):
            j = np.clip(pos + off, 0, len(rs) - 1)
            d = np.abs(lv + rs[j])
            zero = ~np.any(np.stack(lc), axis=0) & ~np.any(np.stack(rc), axis=0)[order[j]]
            d = np.where(zero, np.inf, d)
            i = int(np.argmin(d))
            if d[i] < best_v:
                best_v = float(d[i])
                arg = [int(c[i]) for c in lc] + [int(c[order[j[i]]]) for c in rc]
    with mpmath.workdps(CERT_DIGITS):
        exact = abs(mpmath.fsum(q * mpmath.mpf(n) ** (mpmath.mpf(u) / v) for q, n in zip(arg, ns)))
    min_abs = float(exact)
    # spread of the attainable sums divided by the number of coefficient vectors
    expected = 2 * q_max * sum(vals) / float((2 * q_max + 1) ** nu)
    return IndependenceReport(**base, probe_run=True, q_max=q_max, min_abs=min_abs, argmin=arg,
                              relation_found=min_abs < relation_tol, expected_min=expected)
