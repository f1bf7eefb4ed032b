# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Euler-product sampling, Dirichlet sums, characteristic-function grids.

Mirrors ``_fallback`` exactly, including the counter-based random stream.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, exp, log, log1p, atan2, M_PI
from libc.stdint cimport uint64_t

from . import _arith

cnp.import_array()

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t _PRIME_MULT = 0xD1B54A32D192ED03ULL
cdef uint64_t _PRIME_ADD = 0x8CB92BA72F3D8DD7ULL
cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t x) noexcept nogil:
    x ^= x >> 30
    x *= 0xBF58476D1CE4E5B9ULL
    x ^= x >> 27
    x *= 0x94D049BB133111EBULL
    return x ^ (x >> 31)


# below this w the factor log is replaced by its power series (8 terms, error < 1e-17)
cdef double _SERIES_W = 0.0075


def sample_euler(double sigma, primes, unsigned long long seed, long long start, long long count):
    cdef cnp.ndarray[double, ndim=1] p = np.ascontiguousarray(primes, dtype=np.float64)
    cdef Py_ssize_t nprimes = p.shape[0]
    cdef cnp.ndarray[double, ndim=1] w = np.empty(nprimes)
    cdef cnp.ndarray[uint64_t, ndim=1] pc = np.empty(nprimes, dtype=np.uint64)
    cdef cnp.ndarray[double complex, ndim=1] out = np.empty(count, dtype=np.complex128)
    cdef Py_ssize_t i, j, m
    cdef uint64_t key, bits
    cdef double re, im, theta, c, s, wj, zr, zi, pr, pi_, tmp
    cdef double inv[9]
    for m in range(1, 9):
        inv[m] = 1.0 / m
    for j in range(nprimes):
        w[j] = p[j] ** (-sigma)
        pc[j] = <uint64_t>j * _PRIME_MULT + _PRIME_ADD
    with nogil:
        for i in range(count):
            key = mix64(<uint64_t>seed * _GOLDEN + <uint64_t>(start + i))
            re = 0.0
            im = 0.0
            for j in range(nprimes):
                bits = mix64(key ^ pc[j])
                theta = 2.0 * M_PI * (<double>(bits >> 11) * _INV_2_53)
                c = cos(theta)
                s = sin(theta)
                wj = w[j]
                if wj > _SERIES_W:
                    re -= 0.5 * log1p(wj * wj - 2.0 * wj * c)
                    im -= atan2(-wj * s, 1.0 - wj * c)
                else:
                    # -log(1 - z) = sum z^m / m, z = w e^{i theta}
                    zr = wj * c
                    zi = wj * s
                    pr = zr
                    pi_ = zi
                    for m in range(1, 9):
                        re += pr * inv[m]
                        im += pi_ * inv[m]
                        tmp = pr * zr - pi_ * zi
                        pi_ = pr * zi + pi_ * zr
                        pr = tmp
            out[i] = re + 1j * im
    return out


cdef enum:
    MAX_SIG = 64


def dirichlet_multi(double t, double sigma0, double h, int nsig, long long N):
    """sum_{n<N} n^-(sigma0 + j h + i t), j < nsig.

    n^-s is completely multiplicative, so the phase and both amplitude
    factors are built as products over the smallest prime factor; only
    primes pay for sin/cos/exp, and their phases come reduced in
    double-double from ``_arith.prime_angles``.
    """
    if nsig > MAX_SIG:
        parts = [dirichlet_multi(t, sigma0 + j0 * h, h, min(MAX_SIG, nsig - j0), N) for j0 in range(0, nsig, MAX_SIG)]
        return np.concatenate(parts)
    out = np.zeros(nsig, dtype=np.complex128)
    if N <= 1:
        return out
    cdef int[::1] spf = _arith.spf_table(N)
    cdef double[::1] ang = _arith.prime_angles(t, N)
    # per n: phase re, phase im, n^-sigma0, n^-h
    cdef double[:, ::1] tab = np.empty((N, 4))
    cdef double acc_re[MAX_SIG]
    cdef double acc_im[MAX_SIG]
    cdef double blk_re[MAX_SIG]
    cdef double blk_im[MAX_SIG]
    cdef long long n, q, m
    cdef int j
    cdef double ln, c, s, amp, step
    cdef double *tn
    cdef double *tq
    cdef double *tm
    for j in range(nsig):
        acc_re[j] = 0.0
        acc_im[j] = 0.0
        blk_re[j] = 0.0
        blk_im[j] = 0.0
    with nogil:
        tab[1, 0] = 1.0
        tab[1, 1] = 0.0
        tab[1, 2] = 1.0
        tab[1, 3] = 1.0
        for n in range(1, N):
            tn = &tab[n, 0]
            if n > 1:
                q = spf[n]
                if q == n:
                    ln = log(<double>n)
                    tn[0] = cos(ang[n])
                    tn[1] = -sin(ang[n])
                    tn[2] = exp(-sigma0 * ln)
                    tn[3] = exp(-h * ln)
                else:
                    m = n // q
                    tq = &tab[q, 0]
                    tm = &tab[m, 0]
                    tn[0] = tq[0] * tm[0] - tq[1] * tm[1]
                    tn[1] = tq[0] * tm[1] + tq[1] * tm[0]
                    tn[2] = tq[2] * tm[2]
                    tn[3] = tq[3] * tm[3]
            c = tn[0] * tn[2]
            s = tn[1] * tn[2]
            step = tn[3]
            for j in range(nsig):
                blk_re[j] += c
                blk_im[j] += s
                c *= step
                s *= step
            if (n & 1023) == 0:
                for j in range(nsig):
                    acc_re[j] += blk_re[j]
                    acc_im[j] += blk_im[j]
                    blk_re[j] = 0.0
                    blk_im[j] = 0.0
    for j in range(nsig):
        out[j] = (acc_re[j] + blk_re[j]) + 1j * (acc_im[j] + blk_im[j])
    return out


def char_fn_grid(u, v, re_nodes, im_nodes):
    cdef cnp.ndarray[double, ndim=1] uf = np.ascontiguousarray(u, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] vf = np.ascontiguousarray(v, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] a = np.ascontiguousarray(re_nodes, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] b = np.ascontiguousarray(im_nodes, dtype=np.float64)
    cdef Py_ssize_t npts = uf.shape[0], m = a.shape[0], i, k
    cdef cnp.ndarray[double complex, ndim=1] out = np.empty(npts, dtype=np.complex128)
    cdef double sr, si, ph
    with nogil:
        for i in range(npts):
            sr = 0.0
            si = 0.0
            for k in range(m):
                ph = -2.0 * (uf[i] * a[k] + vf[i] * b[k])
                sr += cos(ph)
                si += sin(ph)
            out[i] = (sr + 1j * si) / m
    return out.reshape(np.shape(u))
