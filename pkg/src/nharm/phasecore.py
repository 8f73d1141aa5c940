"""Phase reduction, compensated summation and oscillatory quadrature.

A phase is the fractional part of ``n**alpha * x``.  For the sums studied
here ``n**alpha * x`` routinely exceeds ``2**53``, so the integer part eats
the whole double mantissa and a naive ``(n**alpha * x) % 1`` is noise.
Phases are therefore formed in extended precision and only the reduced
fraction is rounded to a double.

Three routes are used, chosen per call:

* rational exponents ``u/v`` with small ``v`` and rational ``x`` go through
  exact integer roots (scalar calls only);
* otherwise, when ``precision_digits <= 31``, double-double arithmetic
  (about 32 significant digits) from the compiled kernels or their numpy
  twin;
* larger precision budgets fall back to mpmath, term by term.

Real inputs are read as the decimal numbers they print as: ``0.3`` means
``3/10``, not the nearest binary double.  This keeps command-line input,
the exact cutoff formulas and the phase engine in agreement.
"""
from __future__ import annotations

import ast
import math
import os
import re
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Real

import mpmath
import numpy as np

from . import _backend
from .errors import BudgetExceeded, DomainError, PrecisionExhausted

#: Significant decimal digits delivered by the double-double route.
DD_DIGITS = 31
#: Largest phase error the engines will certify.
PHASE_ERROR_LIMIT = 1e-12
#: Exponents u/v with v up to this use exact integer roots in reduce_phase.
SMALL_DENOMINATOR = 12

_U53 = 2.0 ** -53
_DD_UNIT = 2.0 ** -104


def default_precision() -> int:
    """Working digits: ``HARMONIC_PRECISION`` from the environment, else 30."""
    raw = os.environ.get("HARMONIC_PRECISION")
    if raw is None or raw.strip() == "":
        return 30
    try:
        digits = int(raw)
    except ValueError:
        raise DomainError(f"HARMONIC_PRECISION must be an integer, got {raw!r}") from None
    if digits < 16:
        raise DomainError("HARMONIC_PRECISION must be at least 16")
    return digits


def exact_value(value) -> Fraction:
    """Exact rational reading of a real input (floats by their decimal repr)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError("booleans are not real inputs")
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite input {value!r}")
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"cannot read {value!r} as a rational number") from None
    if isinstance(value, mpmath.mpf):
        if not mpmath.isfinite(value):
            raise DomainError(f"non-finite input {value!r}")
        man, exp = value.man_exp
        return Fraction(int(man)) * (Fraction(2) ** int(exp))
    if isinstance(value, Real):
        return exact_value(float(value))
    raise DomainError(f"unsupported real input {value!r}")


_PI_FORM = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?(?:/\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$")


def pi_multiple(value) -> Fraction | None:
    """q for angle strings of the form ``q*pi``, ``pi/4``, ``3pi/2``; else None."""
    if not isinstance(value, str):
        return None
    m = _PI_FORM.match(value.lower())
    if m is None:
        return None
    coef, den = m.group(1), m.group(2)
    if coef in ("", "+"):
        q = Fraction(1)
    elif coef == "-":
        q = Fraction(-1)
    else:
        q = Fraction(coef)
    return q / int(den) if den else q


_FUNCS = {"sqrt": mpmath.sqrt, "cbrt": mpmath.cbrt, "exp": mpmath.exp, "log": mpmath.log,
          "sin": mpmath.sin, "cos": mpmath.cos, "frac": mpmath.frac}
_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b,
           ast.Div: lambda a, b: a / b, ast.Pow: lambda a, b: a ** b}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return to_mpf(str(node.value) if isinstance(node.value, float) else node.value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Name) and node.id in ("pi", "e", "phi"):
        return {"pi": mpmath.pi, "e": mpmath.e, "phi": mpmath.phi}[node.id] * 1
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
            and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise DomainError("unsupported element in real expression")


def real_expression(text: str) -> mpmath.mpf:
    """Evaluate an expression such as ``sqrt(2) - 1`` or ``phi - 1`` at the working precision.

    Allowed: numbers, + - * / **, pi, e, phi and sqrt, cbrt, exp, log, sin, cos, frac.
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise DomainError(f"cannot parse real expression {text!r}") from None
    try:
        return _eval_node(tree)
    except DomainError as exc:
        raise DomainError(f"{exc} in {text!r}") from None


def is_rational_input(value) -> bool:
    if isinstance(value, str):
        try:
            Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            return False
    return True


def to_mpf(value) -> mpmath.mpf:
    """mpmath value at the current working precision."""
    if isinstance(value, mpmath.mpf):
        return +value
    m = pi_multiple(value)
    if m is not None:
        return mpmath.mpf(m.numerator) / m.denominator * mpmath.pi
    if not is_rational_input(value):
        return real_expression(value)
    q = exact_value(value)
    return mpmath.mpf(q.numerator) / q.denominator


def dd_split(value) -> tuple[float, float]:
    """Double-double pair (hi, lo) with hi + lo equal to value to ~32 digits."""
    if not is_rational_input(value):
        with mpmath.workdps(45):
            value = to_mpf(value)
    if isinstance(value, mpmath.mpf):
        with mpmath.workdps(40):
            hi = float(value)
            return hi, float(value - hi)
    q = exact_value(value)
    hi = float(q)
    return hi, float(q - Fraction(hi))


def cycle_coefficient(value, angle: bool = False) -> tuple[float, float]:
    """Double-double multiplier turning n**alpha into cycles.

    ``angle=False``: value is x of e(n**alpha x).  ``angle=True``: value is a
    raw angle t and the multiplier is t / (2 pi).
    """
    if not angle:
        return dd_split(value)
    m = pi_multiple(value)
    if m is not None:
        return dd_split(m / 2)
    with mpmath.workdps(45):
        return dd_split(to_mpf(value) / (2 * mpmath.pi))


def cycle_coefficients(values, angle: bool = False) -> tuple[np.ndarray, np.ndarray]:
    pairs = [cycle_coefficient(v, angle) for v in values]
    if not pairs:
        return np.zeros(0), np.zeros(0)
    hi, lo = zip(*pairs)
    return np.array(hi, dtype=np.float64), np.array(lo, dtype=np.float64)


@dataclass(frozen=True)
class HarmonicExponent:
    """The exponent alpha > 0 of the harmonics n**alpha.

    ``alpha`` may be a float, int, Fraction or a string such as ``"2/3"``;
    the exact rational value is kept in ``value``.
    """

    alpha: float
    precision_digits: int = field(default_factory=default_precision)
    value: Fraction = field(init=False, repr=False)

    def __post_init__(self):
        value = exact_value(self.alpha)
        if value <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if int(self.precision_digits) < 16:
            raise DomainError("precision_digits must be at least 16")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "alpha", float(value))
        object.__setattr__(self, "precision_digits", int(self.precision_digits))

    @classmethod
    def rational(cls, u: int, v: int, **kwargs) -> "HarmonicExponent":
        return cls(Fraction(u, v), **kwargs)

    @property
    def is_integer(self) -> bool:
        return self.value.denominator == 1

    @property
    def dd(self) -> tuple[float, float]:
        return dd_split(self.value)

    def mpf(self) -> mpmath.mpf:
        return mpmath.mpf(self.value.numerator) / self.value.denominator

    def require_noninteger(self) -> None:
        if self.is_integer:
            raise DomainError(f"alpha = {self.alpha} is an integer; a noninteger exponent is required")

    def power_rel_error(self, n_max: float) -> float:
        """Relative error bound of the double-double n**alpha for n <= n_max."""
        expo = abs(self.alpha) * math.log(max(float(n_max), 1.0))
        return 8.0 * (expo + 16.0) * _DD_UNIT


@dataclass(frozen=True)
class ReducedPhase:
    """frac(n**alpha * x) with a bound on its absolute error."""

    fractional_part: float
    n: int
    x: float
    error_bound: float
    method: str = "dd"


# ---------------------------------------------------------------------------
# power tables

_PREFIX_LIMIT = 1 << 21
_prefix_cache: "OrderedDict[Fraction, tuple[np.ndarray, np.ndarray]]" = OrderedDict()
_prefix_lock = threading.Lock()


def _compute_powers(exp: HarmonicExponent, start: int, count: int):
    a_hi, a_lo = exp.dd
    hi, lo = _backend.kernels.powers_dd(a_hi, a_lo, int(start), int(count))
    return np.asarray(hi), np.asarray(lo)


def power_table(exp: HarmonicExponent, start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Read-only double-double table of n**alpha for n = start .. start+count-1."""
    if start < 1 or count < 0:
        raise DomainError("power tables need start >= 1 and count >= 0")
    stop = start + count - 1
    if stop > _PREFIX_LIMIT:
        hi, lo = _compute_powers(exp, start, count)
    else:
        with _prefix_lock:
            cached = _prefix_cache.get(exp.value)
            have = 0 if cached is None else len(cached[0])
            if have < stop:
                new_len = min(_PREFIX_LIMIT, max(stop, 2 * have, 1024))
                h, l = _compute_powers(exp, have + 1, new_len - have)
                if cached is not None:
                    h = np.concatenate((cached[0], h))
                    l = np.concatenate((cached[1], l))
                h.setflags(write=False)
                l.setflags(write=False)
                cached = (h, l)
                _prefix_cache[exp.value] = cached
                while len(_prefix_cache) > 4:
                    _prefix_cache.popitem(last=False)
            _prefix_cache.move_to_end(exp.value)
        hi = cached[0][start - 1:stop]
        lo = cached[1][start - 1:stop]
    hi.setflags(write=False)
    lo.setflags(write=False)
    return hi, lo


def clear_power_cache() -> None:
    with _prefix_lock:
        _prefix_cache.clear()


# ---------------------------------------------------------------------------
# scalar phase reduction

def _iroot(a: int, v: int) -> int:
    """floor(a ** (1/v)) for a >= 0."""
    if a < 2:
        return a
    if v == 2:
        return math.isqrt(a)
    x = 1 << -(-a.bit_length() // v)
    while True:
        y = ((v - 1) * x + a // x ** (v - 1)) // v
        if y >= x:
            return x
        x = y


def _reduce_rational(n: int, ratio: Fraction, xq: Fraction) -> tuple[float, float]:
    u, v = ratio.numerator, ratio.denominator
    bits = 80 + max(0, abs(xq).numerator.bit_length() - abs(xq).denominator.bit_length())
    root = _iroot(n ** u << (v * bits), v)  # floor(n**(u/v) * 2**bits)
    modulus = xq.denominator << bits
    frac = Fraction((root * xq.numerator) % modulus, modulus)
    err = float(abs(xq)) * 2.0 ** -bits
    return float(frac), err + _U53


def _reduce_mp(n: int, exp: HarmonicExponent, x, angle: bool) -> tuple[float, float]:
    digits = exp.precision_digits
    with mpmath.workdps(digits):
        y = to_mpf(x)
        if angle:
            y = y / (2 * mpmath.pi)
        p = mpmath.mpf(n) ** exp.mpf() * y
        frac = p - mpmath.floor(p)
        err = float(abs(p)) * 10.0 ** (1 - digits)
        return float(frac) % 1.0, err + _U53


def _reduce_dd(n: int, exp: HarmonicExponent, x, angle: bool) -> tuple[float, float]:
    y_hi, y_lo = cycle_coefficient(x, angle)
    p_hi, p_lo = _compute_powers(exp, n, 1)
    frac = float(_backend.kernels.frac_products(p_hi, p_lo, y_hi, y_lo)[0])
    mag = abs(float(p_hi[0]) * y_hi)
    return frac, mag * exp.power_rel_error(n) + _U53


def reduce_phase(n: int, exp: HarmonicExponent, x, *, angle: bool = False) -> ReducedPhase:
    """Fractional part of ``n**alpha * x`` (``angle=True``: of ``n**alpha * x / 2pi``).

    Raises PrecisionExhausted when the precision budget cannot certify an
    error of at most ``PHASE_ERROR_LIMIT``.
    """
    if isinstance(n, bool) or not isinstance(n, Integral) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if isinstance(x, float) and not math.isfinite(x):
        raise DomainError("x must be finite")
    method = "dd"
    if not angle and exp.value.denominator <= SMALL_DENOMINATOR and not isinstance(x, mpmath.mpf):
        frac, err = _reduce_rational(n, exp.value, exact_value(x))
        method = "rational"
    elif exp.precision_digits <= DD_DIGITS and n < 2 ** 53:
        frac, err = _reduce_dd(n, exp, x, angle)
    else:
        frac, err = _reduce_mp(n, exp, x, angle)
        method = "mpmath"
    if err > PHASE_ERROR_LIMIT:
        raise PrecisionExhausted(
            f"phase of n={n}, alpha={exp.alpha}, x={x} needs more than "
            f"{exp.precision_digits} digits (error bound {err:.3g})"
        )
    if frac >= 1.0:
        frac = 0.0
    with mpmath.workdps(20):
        x_float = float(to_mpf(x))
    return ReducedPhase(frac, n, x_float, err, method)


# ---------------------------------------------------------------------------
# bulk sums

def sum_error_bound(exp: HarmonicExponent, start: int, count: int, y_abs: float) -> float:
    """Per-term phase error bound of the bulk engine over n in [start, start+count)."""
    n_max = start + count - 1
    mag = float(n_max) ** exp.alpha * y_abs
    if exp.precision_digits <= DD_DIGITS:
        return mag * exp.power_rel_error(n_max) + 2 * _U53
    return mag * 10.0 ** (1 - exp.precision_digits) + 2 * _U53


def _check_budget(exp, start, count, y_abs):
    err = sum_error_bound(exp, start, count, y_abs)
    if err > PHASE_ERROR_LIMIT:
        raise PrecisionExhausted(
            f"phases up to n={start + count - 1} with alpha={exp.alpha} and |x|={y_abs:.6g} "
            f"exceed the {exp.precision_digits}-digit budget (error bound {err:.3g})"
        )
    return err


def _mp_fracs(exp: HarmonicExponent, y_mp, start: int, count: int) -> np.ndarray:
    out = np.empty(count)
    with mpmath.workdps(exp.precision_digits):
        a = exp.mpf()
        y = +y_mp
        for i in range(count):
            p = mpmath.mpf(start + i) ** a * y
            out[i] = float(p - mpmath.floor(p)) % 1.0
    return out


def _normalize_checkpoints(checkpoints, count):
    if checkpoints is None:
        return np.array([count], dtype=np.int64)
    cps = np.asarray(checkpoints, dtype=np.int64)
    if cps.ndim != 1 or len(cps) == 0:
        raise DomainError("checkpoints must be a nonempty 1-d sequence")
    if np.any(np.diff(cps) < 0) or cps[0] < 0 or cps[-1] > count:
        raise DomainError("checkpoints must be nondecreasing term counts within [0, count]")
    return np.ascontiguousarray(cps)


def _weights(weights, count):
    if weights is None:
        return None
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.shape != (count,):
        raise DomainError(f"weights must have length {count}")
    return w


def _mp_partial_sums(exp, y_mp, start, count, w, cps):
    f = _mp_fracs(exp, y_mp, start, count)
    # reuse the fallback summation on precomputed fractions
    ang = 2 * np.pi * f
    re, im = np.cos(ang), np.sin(ang)
    if w is not None:
        re, im = re * w, im * w
    bounds = np.clip(cps, 0, count)
    starts = np.concatenate(([0], bounds[:-1]))
    rl, il = re.tolist(), im.tolist()
    br = [math.fsum(rl[a:b]) for a, b in zip(starts, bounds)]
    bi = [math.fsum(il[a:b]) for a, b in zip(starts, bounds)]
    out = np.empty(len(cps), dtype=np.complex128)
    out.real = _backend.fallback._neumaier_blocks(br)
    out.imag = _backend.fallback._neumaier_blocks(bi)
    return out


def partial_sums(exp: HarmonicExponent, x, start: int, count: int, *, angle: bool = False,
                 weights=None, checkpoints=None) -> tuple[np.ndarray, float]:
    """Partial sums of ``w_n e(n**alpha y)`` over n = start .. start+count-1.

    ``y`` is x (``angle=False``) or x / 2pi (``angle=True``).  Entry j of the
    result holds the sum of the first ``checkpoints[j]`` terms; the default
    is the full sum.  Returns (sums, per-term phase error bound).
    """
    if start < 1 or count < 0:
        raise DomainError("need start >= 1 and count >= 0")
    cps = _normalize_checkpoints(checkpoints, count)
    w = _weights(weights, count)
    if count == 0:
        return np.zeros(len(cps), dtype=np.complex128), 0.0
    y_hi, y_lo = cycle_coefficient(x, angle)
    err = _check_budget(exp, start, count, abs(y_hi))
    if exp.precision_digits > DD_DIGITS:
        with mpmath.workdps(exp.precision_digits + 5):
            y_mp = to_mpf(x) / (2 * mpmath.pi) if angle else to_mpf(x)
            return _mp_partial_sums(exp, y_mp, start, count, w, cps), err
    p_hi, p_lo = power_table(exp, start, count)
    sums = _backend.kernels.phase_sums(p_hi, p_lo, y_hi, y_lo, w, cps)
    return np.asarray(sums), err


def grid_partial_sums(exp: HarmonicExponent, ys: tuple[np.ndarray, np.ndarray], start: int, count: int, *,
                      weights=None, checkpoints=None, threads: int = 1,
                      mp_values=None) -> tuple[np.ndarray, float]:
    """partial_sums for a grid of double-double multipliers ``ys = (hi, lo)``.

    Rows follow the grid order.  Work is split into contiguous chunks across
    ``threads`` workers; every row is computed by the same sequential loop,
    so the output does not depend on the thread count.
    """
    ys_hi = np.ascontiguousarray(ys[0], dtype=np.float64)
    ys_lo = np.ascontiguousarray(ys[1], dtype=np.float64)
    cps = _normalize_checkpoints(checkpoints, count)
    w = _weights(weights, count)
    if len(ys_hi) == 0 or count == 0:
        return np.zeros((len(ys_hi), len(cps)), dtype=np.complex128), 0.0
    err = _check_budget(exp, start, count, float(np.max(np.abs(ys_hi))))
    if exp.precision_digits > DD_DIGITS:
        if mp_values is None:
            mp_values = [mpmath.mpf(h) + mpmath.mpf(l) for h, l in zip(ys_hi, ys_lo)]
        rows = [_mp_partial_sums(exp, y, start, count, w, cps) for y in mp_values]
        return np.array(rows).reshape(len(ys_hi), len(cps)), err
    p_hi, p_lo = power_table(exp, start, count)
    kern = _backend.kernels.phase_sums_grid
    threads = max(1, int(threads))
    if threads == 1 or len(ys_hi) < 2:
        return np.asarray(kern(p_hi, p_lo, ys_hi, ys_lo, w, cps)), err
    bounds = np.linspace(0, len(ys_hi), min(threads, len(ys_hi)) + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(
            lambda ab: np.asarray(kern(p_hi, p_lo, ys_hi[ab[0]:ab[1]], ys_lo[ab[0]:ab[1]], w, cps)),
            zip(bounds[:-1], bounds[1:]),
        ))
    return np.concatenate(parts, axis=0), err


# ---------------------------------------------------------------------------
# summation

def compensated_sum(terms):
    """Sum of a finite sequence of real or complex numbers.

    Real and imaginary parts go through ``math.fsum`` (Shewchuk's exact
    partials), so each part is the correctly rounded exact sum.  The result
    is complex when any term is complex.
    """
    re, im = [], []
    is_complex = False
    for t in terms:
        if isinstance(t, complex) or np.iscomplexobj(t):
            is_complex = True
            c = complex(t)
            re.append(c.real)
            im.append(c.imag)
        else:
            re.append(float(t))
    total = math.fsum(re)
    if is_complex:
        return complex(total, math.fsum(im))
    return total


# ---------------------------------------------------------------------------
# quadrature

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


def _as_vectorized(func):
    def call(y):
        try:
            out = np.asarray(func(y))
            if out.shape == y.shape:
                return out
        except Exception:
            pass
        return np.array([func(float(v)) for v in y.ravel()]).reshape(y.shape)
    return call


def _gauss(g, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = g(pts.ravel()).reshape(pts.shape)
    return half * (vals @ _GL_WEIGHTS)


def adaptive_quadrature(g, u: float, v: float, tol: float, *, max_width=None,
                        max_panels: int = 400_000):
    """Adaptive 15-point Gauss-Legendre panels for a vectorized integrand g.

    ``max_width(y)`` (array -> array) caps the panel width near y; panels
    are split until a panel and its two halves agree to
    ``tol * width / (v - u)``.  Returns (value, panel count).
    """
    length = v - u
    edges = np.linspace(u, v, 9)
    if max_width is not None:
        for _ in range(12):
            a, b = edges[:-1], edges[1:]
            cap = np.asarray(max_width(0.5 * (a + b)), dtype=np.float64)
            pieces = np.maximum(1, np.ceil((b - a) / np.maximum(cap, 1e-300))).astype(np.int64)
            if np.all(pieces == 1):
                break
            if pieces.sum() > max_panels:
                best = compensated_sum(_gauss(g, a, b).tolist())
                raise BudgetExceeded("panel budget exhausted while resolving oscillation", best)
            new = [np.linspace(lo, hi, k + 1)[:-1] for lo, hi, k in zip(a, b, pieces)]
            edges = np.concatenate(new + [edges[-1:]])
    a, b = edges[:-1], edges[1:]
    accepted = []
    panels = len(a)
    while len(a):
        m = 0.5 * (a + b)
        coarse = _gauss(g, a, b)
        fine = _gauss(g, a, m) + _gauss(g, m, b)
        # roundoff floor keeps tiny panels from splitting forever
        floor = 64 * _U53 * (np.abs(fine) + np.abs(coarse))
        ok = np.abs(fine - coarse) <= np.maximum(tol * (b - a) / length, floor)
        accepted.extend(fine[ok].tolist())
        a, m, b = a[~ok], m[~ok], b[~ok]
        if len(a) == 0:
            break
        panels += len(a)
        if panels > max_panels or np.min(b - a) < 1e-13 * max(1.0, abs(u), abs(v)):
            best = compensated_sum(accepted + fine[~ok].tolist())
            raise BudgetExceeded(
                f"tolerance {tol:g} not reached within {max_panels} panels", best
            )
        a = np.concatenate((a, m))
        b = np.concatenate((m, b))
    return compensated_sum(accepted), panels


def _derivative(f, y):
    h = 1e-6 * np.maximum(1.0, np.abs(y))
    return (f(y + h) - f(y - h)) / (2 * h)


def oscillatory_integral(f_phase, u: float, v: float, tol: float = 1e-10, *,
                         derivative=None, panel_fraction: float = 0.25,
                         max_panels: int = 400_000) -> complex:
    """Integral of e(f(y)) = exp(2 pi i f(y)) over [u, v].

    Panels start no wider than ``panel_fraction`` of the local period
    1/|f'(y)| and are then refined adaptively until the absolute error
    estimate is below ``tol``.  ``f_phase`` should accept numpy arrays;
    scalar-only callables are wrapped.  ``derivative`` defaults to central
    differences.
    """
    if not (u < v):
        raise DomainError("oscillatory_integral needs u < v")
    if tol <= 0:
        raise DomainError("tol must be positive")
    f = _as_vectorized(f_phase)
    df = _as_vectorized(derivative) if derivative is not None else (lambda y: _derivative(f, y))

    def width(y):
        return panel_fraction / np.maximum(np.abs(df(y)), 1e-300)

    def g(y):
        return np.exp(2j * np.pi * f(y))

    value, _ = adaptive_quadrature(g, float(u), float(v), tol, max_width=width, max_panels=max_panels)
    return complex(value)


@dataclass(frozen=True)
class SineIntegralReport:
    a: float
    u: float
    v: float | None
    lhs: float
    rhs: float
    ok: bool
    constant: float


#: Constant used for |int_u^v t^a sin t dt| <= C u^a when a < 0.
NEGATIVE_POWER_CONSTANT = 4.0


def sine_integral_tail_bound_check(a: float, u: float, v: float | None = None) -> SineIntegralReport:
    """Check |int_0^u t^a sin t dt| <= 2 u^a (a > 0) or |int_u^v ...| <= 4 u^a (a < 0)."""
    if a == 0:
        raise DomainError("the exponent a = 0 is not covered by either bound")
    if a > 0:
        if not u > 0:
            raise DomainError("a > 0 needs u > 0")
        lo, hi, const = 0.0, float(u), 2.0
    else:
        if v is None or not (0 < u < v):
            raise DomainError("a < 0 needs 0 < u < v")
        lo, hi, const = float(u), float(v), NEGATIVE_POWER_CONSTANT
    rhs = const * float(u) ** a

    def g(t):
        return np.power(t, a) * np.sin(t)

    value, _ = adaptive_quadrature(g, lo, hi, 1e-10 * max(1.0, rhs), max_width=lambda y: np.full_like(y, 0.5))
    lhs = abs(value)
    return SineIntegralReport(a, float(u), None if v is None else float(v), lhs, rhs, lhs <= rhs, const)
