"""Coefficient sequences and their class constants.

A sequence {c_k} is probed on a finite index range.  The estimated
constants are

* ``A``: smallest A with c_k <= A c_l for l <= k <= K_max,
* ``B``: smallest B with sum_{k=l}^{2l-1} |c_k - c_{k+1}| <= B c_l,
* ``V``: smallest V with sum_{k=l}^{K_max} |c_k - c_{k+1}| <= V c_l,

maximized over the tested l.  Everything is truncated at ``K_max`` and the
reports say so; no statement about the infinite tail is made.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, InvalidSequence, SequenceFileError

KINDS = ("power", "power_log", "oscillating", "custom")


@dataclass(frozen=True, eq=False)
class CoefficientSequence:
    """Positive coefficients c_1, c_2, ... from a named generator.

    ``power(beta)``: k**-beta; ``power_log(beta, gamma)``:
    k**-beta * log(k+1)**-gamma; ``oscillating(beta)``: (2 + (-1)**k) k**-beta;
    ``custom``: an explicit finite table.  ``scale`` multiplies every value.
    """

    kind: str
    params: tuple = ()
    scale: float = 1.0
    table: np.ndarray | None = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "custom":
            if self.table is None:
                raise DomainError("custom sequences need a table")
            t = np.array(self.table, dtype=np.float64)
            bad = np.flatnonzero(~(t > 0) | ~np.isfinite(t))
            if len(bad):
                raise InvalidSequence(f"c_{bad[0] + 1} = {t[bad[0]]} is not a positive number", int(bad[0]) + 1)
            t.setflags(write=False)
            object.__setattr__(self, "table", t)
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError("scale must be a positive finite number")

    @property
    def name(self) -> str:
        if self.kind == "custom":
            return f"custom[{len(self.table)}]"
        args = ",".join(f"{p:g}" for p in self.params)
        base = f"{self.kind}({args})"
        return base if self.scale == 1.0 else f"{self.scale:g}*{base}"

    @property
    def length(self) -> float:
        return len(self.table) if self.kind == "custom" else math.inf

    def _generate(self, k: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            (beta,) = self.params
            out = np.power(k, -float(beta))
        elif self.kind == "power_log":
            beta, gamma = self.params
            out = np.power(k, -float(beta)) * np.power(np.log(k + 1.0), -float(gamma))
        elif self.kind == "oscillating":
            (beta,) = self.params
            sign = np.where(k.astype(np.int64) % 2 == 0, 1.0, -1.0)
            out = (2.0 + sign) * np.power(k, -float(beta))
        else:
            out = self.table[k.astype(np.int64) - 1]
        return out * self.scale

    def values(self, K: int) -> np.ndarray:
        """Read-only array [c_1, ..., c_K]."""
        K = int(K)
        if K < 0:
            raise DomainError("K must be nonnegative")
        if K > self.length:
            raise InvalidSequence(f"{self.name} has only {len(self.table)} values, {K} requested", len(self.table) + 1)
        with self._lock:
            have = self._cache.get("values")
            if have is None or len(have) < K:
                n = max(K, 0 if have is None else 2 * len(have))
                n = min(n, self.length) if self.kind == "custom" else n
                k = np.arange(1, n + 1, dtype=np.float64)
                vals = self._generate(k)
                bad = np.flatnonzero(~(vals > 0) | ~np.isfinite(vals))
                if len(bad):
                    raise InvalidSequence(f"c_{bad[0] + 1} = {vals[bad[0]]} is not positive", int(bad[0]) + 1)
                vals.setflags(write=False)
                self._cache["values"] = vals
                have = vals
        return have[:K]

    def __call__(self, k: int) -> float:
        return float(self.values(k)[k - 1])

    def window(self, start: int, stop: int) -> np.ndarray:
        """[c_start, ..., c_stop] inclusive."""
        return self.values(stop)[start - 1:stop]

    def is_nonincreasing(self, K: int, start: int = 1) -> bool:
        v = self.values(K)[start - 1:]
        return bool(np.all(v[1:] <= v[:-1]))


def power(beta: float, scale: float = 1.0) -> CoefficientSequence:
    return CoefficientSequence("power", (float(beta),), scale)


def power_log(beta: float, gamma: float, scale: float = 1.0) -> CoefficientSequence:
    return CoefficientSequence("power_log", (float(beta), float(gamma)), scale)


def oscillating(beta: float, scale: float = 1.0) -> CoefficientSequence:
    return CoefficientSequence("oscillating", (float(beta),), scale)


def constant(c: float = 1.0) -> CoefficientSequence:
    return power(0.0, scale=c)


def custom(values) -> CoefficientSequence:
    return CoefficientSequence("custom", (), 1.0, np.asarray(values, dtype=np.float64))


def parse_sequence_text(text: str) -> CoefficientSequence:
    """Table format: one positive decimal per line, line number = k."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise SequenceFileError("sequence file is empty", 1)
    vals = []
    for i, line in enumerate(lines, start=1):
        s = line.strip()
        try:
            v = float(s)
        except ValueError:
            raise SequenceFileError(f"line {i}: {s!r} is not a decimal number", i) from None
        if not (v > 0 and math.isfinite(v)):
            raise SequenceFileError(f"line {i}: value {s} is not positive", i)
        vals.append(v)
    return custom(vals)


def load_sequence(path) -> CoefficientSequence:
    return parse_sequence_text(Path(path).read_text())


def parse_sequence_spec(spec: str) -> CoefficientSequence:
    """``power:1.2``, ``power_log:1,2``, ``oscillating:1.5``, ``constant:3``, ``file:PATH``."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip()
    if kind == "file":
        return load_sequence(rest)
    try:
        args = [float(a) for a in rest.split(",")] if rest.strip() else []
    except ValueError:
        raise DomainError(f"bad sequence parameters in {spec!r}") from None
    makers = {"power": (power, 1), "power_log": (power_log, 2), "oscillating": (oscillating, 1), "constant": (constant, 1)}
    if kind not in makers:
        raise DomainError(f"unknown sequence kind {kind!r} in {spec!r}")
    make, arity = makers[kind]
    if len(args) != arity:
        raise DomainError(f"{kind} takes {arity} parameter(s), got {len(args)}")
    return make(*args)


# ---------------------------------------------------------------------------
# class constants

@dataclass(frozen=True)
class ClassReport:
    sequence: str
    range_l: tuple[int, int]
    K_max: int
    A_min: float
    B_min: float
    V_min: float
    V_truncated: float
    V_diverging: bool
    is_monotone: bool
    truncated: bool = True


def _suffix_variation(c_ext: np.ndarray) -> np.ndarray:
    """T[i] = sum_{j >= i} |c_j - c_{j+1}| over the table (0-based)."""
    d = np.abs(np.diff(c_ext))
    t = np.cumsum(d[::-1])[::-1]
    return np.concatenate((t, [0.0]))


def estimate_class_constants(seq: CoefficientSequence, l_range: tuple[int, int], K_max: int) -> ClassReport:
    """Estimate A, B and V over l in ``l_range`` (inclusive), truncated at K_max."""
    l_lo, l_hi = int(l_range[0]), int(l_range[1])
    if not 1 <= l_lo <= l_hi:
        raise DomainError("l_range must satisfy 1 <= l_min <= l_max")
    if K_max < 4 * l_hi:
        raise DomainError(f"K_max must be at least 4 * max(l_range) = {4 * l_hi}")
    c = seq.values(K_max + 1)  # c_{K_max+1} closes the last difference
    ls = np.arange(l_lo, l_hi + 1)
    cl = c[ls - 1]
    head = c[:K_max]
    suffix_max = np.maximum.accumulate(head[::-1])[::-1]
    A = float(np.max(suffix_max[ls - 1] / cl))
    T = _suffix_variation(c)  # T[i]: from index i+1 (1-based) to K_max
    block = T[ls - 1] - T[2 * ls - 1]
    B = float(np.max(block / cl))
    V = float(np.max(T[ls - 1] / cl))
    half = K_max // 2
    # growth of the variation sum from l_min between K_max/2 and K_max
    var_half = T[l_lo - 1] - T[half]
    var_full = T[l_lo - 1]
    diverging = bool(var_half > 0 and (var_full - var_half) > 0.01 * var_half)
    monotone = bool(np.all(c[l_lo:K_max + 1] <= c[l_lo - 1:K_max]))
    return ClassReport(seq.name, (l_lo, l_hi), int(K_max), A, B, math.inf if diverging else V, V, diverging, monotone)


# ---------------------------------------------------------------------------
# tail statistics

@dataclass(frozen=True)
class TailReport:
    sequence: str
    l: int
    K_max: int
    weight_exponent: float
    b_l: float
    argmax_k: int
    weighted_sum: float


def tail_statistics(seq: CoefficientSequence, l: int, weight_exponent: float, K_max: int) -> TailReport:
    """max_{l<=k<=K_max} c_k k**w and sum_{k=l}^{K_max} c_k k**(w-1)."""
    if not 1 <= l <= K_max:
        raise DomainError("need 1 <= l <= K_max")
    c = seq.window(l, K_max)
    k = np.arange(l, K_max + 1, dtype=np.float64)
    w = float(weight_exponent)
    weighted = c * np.power(k, w)
    i = int(np.argmax(weighted))
    total = math.fsum((c * np.power(k, w - 1.0)).tolist())
    return TailReport(seq.name, int(l), int(K_max), w, float(weighted[i]), int(l + i), total)


def tail_sup_profile(seq: CoefficientSequence, weight_exponent: float, K_max: int) -> np.ndarray:
    """b_l for every l = 1..K_max in one pass (suffix maxima)."""
    c = seq.values(K_max)
    k = np.arange(1, K_max + 1, dtype=np.float64)
    weighted = c * np.power(k, float(weight_exponent))
    return np.maximum.accumulate(weighted[::-1])[::-1]


# ---------------------------------------------------------------------------
# auxiliary diagnostics

@dataclass(frozen=True)
class ProductDecayReport:
    K_max: int
    partial_sums: np.ndarray
    partial_sum_k: np.ndarray
    product_trace: np.ndarray
    late_max: float
    early_max: float
    decaying: bool
    A_c: float
    A_u: float


def check_lemma_2_0(c: CoefficientSequence, u: CoefficientSequence, K_max: int) -> ProductDecayReport:
    """Trace sum c_k u_k and c_k k u_k; flag decay of the product at scale K_max.

    ``decaying`` is true when the maximum of c_k k u_k over [K_max/2, K_max]
    is below its maximum over [K_max/4, K_max/2] by more than rounding.
    """
    if K_max < 8:
        raise DomainError("K_max must be at least 8")
    cv = c.values(K_max)
    uv = u.values(K_max)
    k = np.arange(1, K_max + 1, dtype=np.float64)
    prod = cv * k * uv
    terms = cv * uv
    cum = np.cumsum(terms)
    marks = sorted({2 ** j for j in range(int(math.log2(K_max)) + 1)} | {K_max})
    sums = np.array([math.fsum(terms[:m].tolist()) for m in marks]) if K_max <= 1 << 16 else cum[np.array(marks) - 1]
    q, h = K_max // 4, K_max // 2
    early = float(np.max(prod[q - 1:h]))
    late = float(np.max(prod[h - 1:K_max]))
    decaying = late < early * (1.0 - 1e-9)
    lr = (1, max(1, K_max // 4))
    A_c = estimate_class_constants(c, lr, K_max).A_min
    A_u = estimate_class_constants(u, lr, K_max).A_min
    return ProductDecayReport(int(K_max), sums, np.array(marks), prod, late, early, decaying, A_c, A_u)


@dataclass(frozen=True)
class VariationBoundReport:
    l: int
    L: int
    gamma: float
    lhs: float
    rhs_terms: tuple[float, float]
    ratio: float


def check_lemma_2_1(seq: CoefficientSequence, gamma: float, l: int, L: int) -> VariationBoundReport:
    """lhs = sum_{k=l}^{L} |c_k - c_{k+1}| k**gamma against c_l l**gamma + sum c_k k**(gamma-1)."""
    if not 1 <= l < L:
        raise DomainError("need 1 <= l < L")
    c = seq.window(l, L + 1)
    k = np.arange(l, L + 1, dtype=np.float64)
    g = float(gamma)
    lhs = math.fsum((np.abs(np.diff(c)) * np.power(k, g)).tolist())
    first = float(c[0]) * float(l) ** g
    second = math.fsum((c[:-1] * np.power(k, g - 1.0)).tolist())
    return VariationBoundReport(int(l), int(L), g, lhs, (first, second), lhs / (first + second))
