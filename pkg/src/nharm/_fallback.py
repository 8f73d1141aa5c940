"""Pure numpy implementation of the kernel API.

Same entry points and semantics as the compiled ``nharm._kernels``.  Pairs
``(hi, lo)`` are double-double numbers with ``|lo| <= ulp(hi) / 2``; all
helpers act elementwise on arrays.
"""
from __future__ import annotations

import math

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1
_LN2_HI = 0.6931471805599453
_LN2_LO = 2.3190468138462996e-17
_TWO_PI = 6.283185307179586
_CHUNK = 1 << 16


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_add(ah, al, bh, bl):
    sh, sl = two_sum(ah, bh)
    th, tl = two_sum(al, bl)
    sh, sl = quick_two_sum(sh, sl + th)
    return quick_two_sum(sh, sl + tl)


def dd_mul(ah, al, bh, bl):
    ph, pl = two_prod(ah, bh)
    return quick_two_sum(ph, pl + (ah * bl + al * bh))


def dd_mul_d(ah, al, b):
    ph, pl = two_prod(ah, b)
    return quick_two_sum(ph, pl + al * b)


def dd_div_d(ah, al, b):
    q1 = ah / b
    ph, pl = two_prod(q1, b)
    rh, rl = two_sum(ah, -ph)
    q2 = (rh + (rl - pl + al)) / b
    return quick_two_sum(q1, q2)


def dd_exp(ah, al):
    k = np.rint(ah / _LN2_HI)
    kh, kl = two_prod(k, _LN2_HI)
    kl = kl + k * _LN2_LO
    rh, rl = dd_add(ah, al, -kh, -kl)
    rh = np.ldexp(rh, -10)
    rl = np.ldexp(rl, -10)
    one = np.ones_like(rh)
    zero = np.zeros_like(rh)
    qh, ql = dd_div_d(rh, rl, 11.0)
    sh, sl = dd_add(one, zero, qh, ql)
    for i in range(10, 1, -1):
        mh, ml = dd_mul(rh, rl, sh, sl)
        qh, ql = dd_div_d(mh, ml, float(i))
        sh, sl = dd_add(one, zero, qh, ql)
    sh, sl = dd_mul(rh, rl, sh, sl)
    for _ in range(10):
        dh, dl = dd_mul_d(sh, sl, 2.0)
        qh, ql = dd_mul(sh, sl, sh, sl)
        sh, sl = dd_add(dh, dl, qh, ql)
    sh, sl = dd_add(sh, sl, one, zero)
    ki = k.astype(np.int64)
    return np.ldexp(sh, ki), np.ldexp(sl, ki)


def dd_log(n):
    n = np.asarray(n, dtype=np.float64)
    lh = np.log(n)
    ll = np.zeros_like(lh)
    for _ in range(2):
        eh, el = dd_exp(-lh, -ll)
        th, tl = dd_mul_d(eh, el, n)
        th, tl = dd_add(th, tl, -np.ones_like(th), np.zeros_like(th))
        lh, ll = dd_add(lh, ll, th, tl)
    return lh, ll


def frac_dd(qh, ql):
    """Fractional part in [0, 1) of the double-double qh + ql."""
    f = qh - np.floor(qh)
    big = np.abs(ql) >= 1.0
    lo = np.where(big, ql - np.floor(ql), ql)
    f = f + lo
    f = f - np.floor(f)
    return np.where(f >= 1.0, 0.0, f)


def _frac_mul(p_hi, p_lo, y_hi, y_lo):
    qh, ql = two_prod(p_hi, y_hi)
    qh, ql = quick_two_sum(qh, ql + (p_hi * y_lo + p_lo * y_hi))
    return frac_dd(qh, ql)


def powers_dd(a_hi, a_lo, start, count):
    """Return (hi, lo) arrays with n**a for n = start .. start+count-1."""
    hi = np.empty(count, dtype=np.float64)
    lo = np.empty(count, dtype=np.float64)
    for s in range(0, count, _CHUNK):
        n = np.arange(start + s, start + min(count, s + _CHUNK), dtype=np.float64)
        lh, ll = dd_log(n)
        eh, el = dd_mul(lh, ll, np.full_like(lh, a_hi), np.full_like(lh, a_lo))
        h, l = dd_exp(eh, el)
        hi[s:s + len(n)] = h
        lo[s:s + len(n)] = l
    return hi, lo


def frac_products(p_hi, p_lo, y_hi, y_lo):
    """Fractional parts of p_n * y for every entry of the power table."""
    return _frac_mul(np.asarray(p_hi), np.asarray(p_lo), y_hi, y_lo)


def _neumaier_blocks(blocks):
    s = c = 0.0
    out = []
    for b in blocks:
        t = s + b
        if abs(s) >= abs(b):
            c += (s - t) + b
        else:
            c += (b - t) + s
        s = t
        out.append(s + c)
    return out


def phase_sums(p_hi, p_lo, y_hi, y_lo, weights, checkpoints):
    """Partial sums of w_n e(p_n y); entry j holds the first checkpoints[j] terms."""
    p_hi = np.asarray(p_hi)
    p_lo = np.asarray(p_lo)
    cps = np.asarray(checkpoints, dtype=np.int64)
    n = min(len(p_hi), int(cps[-1])) if len(cps) else 0
    f = _frac_mul(p_hi[:n], p_lo[:n], y_hi, y_lo)
    ang = _TWO_PI * f
    re = np.cos(ang)
    im = np.sin(ang)
    if weights is not None:
        w = np.asarray(weights)[:n]
        re = re * w
        im = im * w
    bounds = np.clip(cps, 0, n)
    starts = np.concatenate(([0], bounds[:-1]))
    re_l = re.tolist()
    im_l = im.tolist()
    blocks_re = [math.fsum(re_l[a:b]) for a, b in zip(starts, bounds)]
    blocks_im = [math.fsum(im_l[a:b]) for a, b in zip(starts, bounds)]
    out = np.empty(len(cps), dtype=np.complex128)
    out.real = _neumaier_blocks(blocks_re)
    out.imag = _neumaier_blocks(blocks_im)
    return out


def phase_sums_grid(p_hi, p_lo, ys_hi, ys_lo, weights, checkpoints):
    """phase_sums for each y of a grid; returns shape (len(ys), len(checkpoints))."""
    out = np.zeros((len(ys_hi), len(checkpoints)), dtype=np.complex128)
    for r, (yh, yl) in enumerate(zip(ys_hi, ys_lo)):
        out[r] = phase_sums(p_hi, p_lo, float(yh), float(yl), weights, checkpoints)
    return out
