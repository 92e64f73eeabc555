# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Adaptive Dormand-Prince propagation of the 3x3 scattering system.

Integrates Y' = W(x) Y across the sample window for each spectral node k,
where W carries the potential through the oscillatory gauge

    W13 = u(x) e^{2ikx},   W23 = conj(u) e^{2ikx},
    W31 = -conj(u) e^{-2ikx},  W32 = -u e^{-2ikx},

all other entries zero.  In this gauge the right-hand side vanishes with the
potential, so integrating over the finite window captures the full transition
matrix up to tail truncation.  The potential is evaluated from precomputed
cubic-spline segment coefficients on a uniform grid (direct indexing, no
search).

Error control is per-unit-step: a step of size h is accepted when the
embedded 4th/5th-order error estimate is at most tol * h / span, so the
accumulated error over the window is ~tol independent of step count.
"""

import numpy as np

cimport cython
from libc.math cimport cos, sin, floor


cdef struct StepStats:
    long accepted
    long rejected


@cython.boundscheck(False)
cdef inline double complex _spline_eval(const double complex* c0,
                                        const double complex* c1,
                                        const double complex* c2,
                                        const double complex* c3,
                                        double x0, double dx, Py_ssize_t nseg,
                                        double x) noexcept nogil:
    cdef Py_ssize_t i = <Py_ssize_t>floor((x - x0) / dx)
    if i < 0:
        i = 0
    elif i >= nseg:
        i = nseg - 1
    cdef double t = x - (x0 + i * dx)
    return ((c0[i] * t + c1[i]) * t + c2[i]) * t + c3[i]


cdef inline void _rhs(const double complex* c0, const double complex* c1,
                      const double complex* c2, const double complex* c3,
                      double x0, double dx, Py_ssize_t nseg,
                      double k, double x,
                      const double complex* y, double complex* f) noexcept nogil:
    cdef double complex u = _spline_eval(c0, c1, c2, c3, x0, dx, nseg, x)
    cdef double ph = 2.0 * k * x
    cdef double complex e = cos(ph) + 1j * sin(ph)
    cdef double complex em = cos(ph) - 1j * sin(ph)
    cdef double complex uc = u.real - 1j * u.imag
    cdef double complex w13 = u * e
    cdef double complex w23 = uc * e
    cdef double complex w31 = -uc * em
    cdef double complex w32 = -u * em
    cdef Py_ssize_t j
    for j in range(3):
        f[j] = w13 * y[6 + j]
        f[3 + j] = w23 * y[6 + j]
        f[6 + j] = w31 * y[j] + w32 * y[3 + j]


# Dormand-Prince 5(4) tableau
cdef double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0


cdef int _propagate_one(const double complex* c0, const double complex* c1,
                        const double complex* c2, const double complex* c3,
                        double x0, double dx, Py_ssize_t nseg,
                        double k, double xmin, double xmax,
                        double tol, double hmin, long max_steps,
                        double complex* y, StepStats* stats) noexcept nogil:
    """Returns 0 on success, 1 if the controller collapsed below hmin,
    2 if max_steps was exhausted."""
    cdef double complex k1[9]
    cdef double complex k2[9]
    cdef double complex k3[9]
    cdef double complex k4[9]
    cdef double complex k5[9]
    cdef double complex k6[9]
    cdef double complex k7[9]
    cdef double complex yt[9]
    cdef double complex ynew[9]
    cdef double span = xmax - xmin
    cdef double x = xmin
    cdef double h = span * 1e-4
    cdef double err, tol_step, fac, mag
    cdef double complex ej
    cdef Py_ssize_t j
    cdef long nstep = 0
    cdef bint clamped, have_k1 = 0

    for j in range(9):
        y[j] = 0.0
    y[0] = 1.0
    y[4] = 1.0
    y[8] = 1.0

    while x < xmax:
        if nstep >= max_steps:
            return 2
        nstep += 1
        clamped = 0
        if h > xmax - x:
            h = xmax - x
            clamped = 1
        if not have_k1:
            _rhs(c0, c1, c2, c3, x0, dx, nseg, k, x, y, k1)
            have_k1 = 1

        for j in range(9):
            yt[j] = y[j] + h * A21 * k1[j]
        _rhs(c0, c1, c2, c3, x0, dx, nseg, k, x + C2 * h, yt, k2)
        for j in range(9):
            yt[j] = y[j] + h * (A31 * k1[j] + A32 * k2[j])
        _rhs(c0, c1, c2, c3, x0, dx, nseg, k, x + C3 * h, yt, k3)
        for j in range(9):
            yt[j] = y[j] + h * (A41 * k1[j] + A42 * k2[j] + A43 * k3[j])
        _rhs(c0, c1, c2, c3, x0, dx, nseg, k, x + C4 * h, yt, k4)
        for j in range(9):
            yt[j] = y[j] + h * (A51 * k1[j] + A52 * k2[j] + A53 * k3[j]
                                + A54 * k4[j])
        _rhs(c0, c1, c2, c3, x0, dx, nseg, k, x + C5 * h, yt, k5)
        for j in range(9):
            yt[j] = y[j] + h * (A61 * k1[j] + A62 * k2[j] + A63 * k3[j]
                                + A64 * k4[j] + A65 * k5[j])
        _rhs(c0, c1, c2, c3, x0, dx, nseg, k, x + h, yt, k6)
        for j in range(9):
            ynew[j] = y[j] + h * (B1 * k1[j] + B3 * k3[j] + B4 * k4[j]
                                  + B5 * k5[j] + B6 * k6[j])
        _rhs(c0, c1, c2, c3, x0, dx, nseg, k, x + h, ynew, k7)

        err = 0.0
        for j in range(9):
            ej = h * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j]
                      + E6 * k6[j] + E7 * k7[j])
            mag = ej.real * ej.real + ej.imag * ej.imag
            if mag > err:
                err = mag
        err = err ** 0.5

        tol_step = tol * h / span
        if err <= tol_step:
            stats.accepted += 1
            x = x + h
            for j in range(9):
                y[j] = ynew[j]
                k1[j] = k7[j]
            if err > 0.0:
                fac = 0.9 * (tol_step / err) ** 0.2
                if fac > 5.0:
                    fac = 5.0
            else:
                fac = 5.0
            h = h * fac
        else:
            stats.rejected += 1
            have_k1 = 1  # k1 is still valid at unchanged x
            fac = 0.9 * (tol_step / err) ** 0.2
            if fac < 0.2:
                fac = 0.2
            h = h * fac
            if h < hmin and not clamped:
                return 1
    return 0


def propagate(double complex[::1] c0, double complex[::1] c1,
              double complex[::1] c2, double complex[::1] c3,
              double x0, double dx, double xmin, double xmax,
              double[::1] kgrid, double tol, double hmin=1e-12,
              long max_steps=2000000):
    """Transition matrices Y(xmax) for every k in kgrid.

    c0..c3: cubic spline segment coefficients of the potential (highest
    degree first), uniform breakpoints x0 + i*dx.  Returns (smat, accepted,
    rejected) with smat of shape (len(kgrid), 3, 3).
    """
    cdef Py_ssize_t nseg = c0.shape[0]
    cdef Py_ssize_t nk = kgrid.shape[0]
    smat_np = np.empty((nk, 3, 3), dtype=np.complex128)
    acc_np = np.zeros(nk, dtype=np.int64)
    rej_np = np.zeros(nk, dtype=np.int64)
    cdef double complex[:, :, ::1] smat = smat_np
    cdef long[::1] acc = acc_np
    cdef long[::1] rej = rej_np
    cdef double complex y[9]
    cdef StepStats stats
    cdef Py_ssize_t i, r, c
    cdef int status
    cdef double kval

    if nseg < 1 or c1.shape[0] != nseg or c2.shape[0] != nseg or c3.shape[0] != nseg:
        raise ValueError("spline coefficient arrays must share one length >= 1")
    if not (xmax > xmin):
        raise ValueError("xmax must exceed xmin")

    for i in range(nk):
        kval = kgrid[i]
        stats.accepted = 0
        stats.rejected = 0
        with nogil:
            status = _propagate_one(&c0[0], &c1[0], &c2[0], &c3[0],
                                    x0, dx, nseg, kval, xmin, xmax,
                                    tol, hmin, max_steps, y, &stats)
        if status == 1:
            raise RuntimeError(
                f"step size collapsed below {hmin:g} at k = {kval:g}")
        if status == 2:
            raise RuntimeError(f"step budget exhausted at k = {kval:g}")
        for r in range(3):
            for c in range(3):
                smat[i, r, c] = y[3 * r + c]
        acc[i] = stats.accepted
        rej[i] = stats.rejected
    return smat_np, acc_np, rej_np
