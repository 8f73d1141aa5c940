# cython: language_level=3
"""Compiled hot loops: double-double powers, phase reduction and sums.

Every entry point mirrors a function of the same name in
``nharm._fallback``; the two must agree to rounding.
"""
import numpy as np

from libc.math cimport floor, nearbyint, cos, sin, log, ldexp, fabs

cdef double SPLITTER = 134217729.0  # 2**27 + 1
cdef double LN2_HI = 0.6931471805599453
cdef double LN2_LO = 2.3190468138462996e-17
cdef double TWO_PI = 6.283185307179586

cdef struct dd:
    double hi
    double lo


cdef inline dd two_sum(double a, double b) noexcept nogil:
    cdef dd r
    cdef double s = a + b
    cdef double bb = s - a
    r.hi = s
    r.lo = (a - (s - bb)) + (b - bb)
    return r


cdef inline dd quick_two_sum(double a, double b) noexcept nogil:
    cdef dd r
    cdef double s = a + b
    r.hi = s
    r.lo = b - (s - a)
    return r


cdef inline dd two_prod(double a, double b) noexcept nogil:
    cdef dd r
    cdef double p = a * b
    cdef double t, ah, al, bh, bl
    t = SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    r.hi = p
    r.lo = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return r


cdef inline dd dd_add(dd a, dd b) noexcept nogil:
    cdef dd s = two_sum(a.hi, b.hi)
    cdef dd t = two_sum(a.lo, b.lo)
    s.lo += t.hi
    s = quick_two_sum(s.hi, s.lo)
    s.lo += t.lo
    return quick_two_sum(s.hi, s.lo)


cdef inline dd dd_mul(dd a, dd b) noexcept nogil:
    cdef dd p = two_prod(a.hi, b.hi)
    p.lo += a.hi * b.lo + a.lo * b.hi
    return quick_two_sum(p.hi, p.lo)


cdef inline dd dd_mul_d(dd a, double b) noexcept nogil:
    cdef dd p = two_prod(a.hi, b)
    p.lo += a.lo * b
    return quick_two_sum(p.hi, p.lo)


cdef inline dd dd_div_d(dd a, double b) noexcept nogil:
    cdef double q1 = a.hi / b
    cdef dd p = two_prod(q1, b)
    cdef dd r = two_sum(a.hi, -p.hi)
    r.lo -= p.lo
    r.lo += a.lo
    cdef double q2 = (r.hi + r.lo) / b
    return quick_two_sum(q1, q2)


cdef inline dd dd_exp(dd a) noexcept nogil:
    cdef double k = nearbyint(a.hi / LN2_HI)
    cdef dd r, s, kl, one
    cdef int i
    one.hi = 1.0
    one.lo = 0.0
    kl = two_prod(k, LN2_HI)
    kl.lo += k * LN2_LO
    kl.hi = -kl.hi
    kl.lo = -kl.lo
    r = dd_add(a, kl)
    r.hi = ldexp(r.hi, -10)
    r.lo = ldexp(r.lo, -10)
    # expm1(r) = r (1 + r/2 (1 + r/3 (... (1 + r/11)))), |r| <= 3.4e-4
    s = dd_add(one, dd_div_d(r, 11.0))
    for i in range(10, 1, -1):
        s = dd_add(one, dd_div_d(dd_mul(r, s), <double>i))
    s = dd_mul(r, s)
    # (1 + s)**1024 kept in expm1 form
    for i in range(10):
        s = dd_add(dd_mul_d(s, 2.0), dd_mul(s, s))
    s = dd_add(s, one)
    s.hi = ldexp(s.hi, <int>k)
    s.lo = ldexp(s.lo, <int>k)
    return s


cdef inline dd dd_log_d(double n) noexcept nogil:
    cdef dd l, e, t, one
    cdef int it
    l.hi = log(n)
    l.lo = 0.0
    one.hi = -1.0
    one.lo = 0.0
    for it in range(2):
        e.hi = -l.hi
        e.lo = -l.lo
        t = dd_mul_d(dd_exp(e), n)
        t = dd_add(t, one)
        l = dd_add(l, t)
    return l


cdef inline double frac_of(dd p, double y_hi, double y_lo) noexcept nogil:
    cdef dd q = two_prod(p.hi, y_hi)
    cdef double f
    q.lo += p.hi * y_lo + p.lo * y_hi
    q = quick_two_sum(q.hi, q.lo)
    f = q.hi - floor(q.hi)
    if fabs(q.lo) >= 1.0:
        f = f + (q.lo - floor(q.lo))
    else:
        f = f + q.lo
    f = f - floor(f)
    if f >= 1.0:
        f = 0.0
    return f


def powers_dd(double a_hi, double a_lo, long start, long count):
    """Return (hi, lo) arrays with n**a for n = start .. start+count-1."""
    hi = np.empty(count, dtype=np.float64)
    lo = np.empty(count, dtype=np.float64)
    cdef double[::1] h = hi
    cdef double[::1] l = lo
    cdef long i
    cdef dd a, e, lg
    a.hi = a_hi
    a.lo = a_lo
    with nogil:
        for i in range(count):
            lg = dd_log_d(<double>(start + i))
            e = dd_exp(dd_mul(a, lg))
            h[i] = e.hi
            l[i] = e.lo
    return hi, lo


def frac_products(const double[::1] p_hi, const double[::1] p_lo, double y_hi, double y_lo):
    """Fractional parts of p_n * y for every entry of the power table."""
    cdef Py_ssize_t n = p_hi.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef dd p
    with nogil:
        for i in range(n):
            p.hi = p_hi[i]
            p.lo = p_lo[i]
            o[i] = frac_of(p, y_hi, y_lo)
    return out


cdef void _sums_one(const double[::1] p_hi, const double[::1] p_lo,
                    double y_hi, double y_lo, const double[::1] w, bint has_w,
                    const long[::1] cps, double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t n = p_hi.shape[0]
    cdef Py_ssize_t m = cps.shape[0]
    cdef Py_ssize_t i, j = 0
    cdef double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0
    cdef double f, ang, re, im, t
    cdef dd p
    while j < m and cps[j] <= 0:
        out[j] = 0.0
        j += 1
    for i in range(n):
        if j >= m:
            break
        p.hi = p_hi[i]
        p.lo = p_lo[i]
        f = frac_of(p, y_hi, y_lo)
        ang = TWO_PI * f
        re = cos(ang)
        im = sin(ang)
        if has_w:
            re = re * w[i]
            im = im * w[i]
        # Neumaier accumulation, real and imaginary parts separately
        t = sr + re
        if fabs(sr) >= fabs(re):
            cr += (sr - t) + re
        else:
            cr += (re - t) + sr
        sr = t
        t = si + im
        if fabs(si) >= fabs(im):
            ci += (si - t) + im
        else:
            ci += (im - t) + si
        si = t
        while j < m and cps[j] == i + 1:
            out[j].real = sr + cr
            out[j].imag = si + ci
            j += 1


def phase_sums(const double[::1] p_hi, const double[::1] p_lo, double y_hi, double y_lo,
               weights, const long[::1] checkpoints):
    """Partial sums of w_n e(p_n y); entry j holds the first checkpoints[j] terms."""
    out = np.zeros(checkpoints.shape[0], dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef const double[::1] w
    cdef bint has_w = weights is not None
    if has_w:
        w = weights
    else:
        w = p_hi
    with nogil:
        _sums_one(p_hi, p_lo, y_hi, y_lo, w, has_w, checkpoints, o)
    return out


def phase_sums_grid(const double[::1] p_hi, const double[::1] p_lo,
                    const double[::1] ys_hi, const double[::1] ys_lo,
                    weights, const long[::1] checkpoints):
    """phase_sums for each y of a grid; returns shape (len(ys), len(checkpoints))."""
    cdef Py_ssize_t g = ys_hi.shape[0]
    out = np.zeros((g, checkpoints.shape[0]), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef const double[::1] w
    cdef bint has_w = weights is not None
    cdef Py_ssize_t r
    if has_w:
        w = weights
    else:
        w = p_hi
    with nogil:
        for r in range(g):
            _sums_one(p_hi, p_lo, ys_hi[r], ys_lo[r], w, has_w, checkpoints, o[r])
    return out
