# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels.py`` for the reference semantics."""
from libc.math cimport exp, sqrt, fabs, M_PI

import numpy as np

cdef int STATUS_OK = 0
cdef int STATUS_NOT_CONVERGED = 1
cdef int STATUS_SINGULAR = 2
cdef int FILTER_RECT = 0
cdef double DENOMINATOR_EPS = 1e-12
cdef int INITIAL_PANELS = 16
cdef long MAX_EVALS = 10000000
cdef int STACK_SIZE = 4096


def wigner_grid_sum(precision, nodes, weights):
    cdef double[:, ::1] p = np.ascontiguousarray(precision, dtype=np.float64)
    cdef double[::1] x0 = np.ascontiguousarray(nodes[0], dtype=np.float64)
    cdef double[::1] x1 = np.ascontiguousarray(nodes[1], dtype=np.float64)
    cdef double[::1] x2 = np.ascontiguousarray(nodes[2], dtype=np.float64)
    cdef double[::1] x3 = np.ascontiguousarray(nodes[3], dtype=np.float64)
    cdef double[::1] w0 = np.ascontiguousarray(weights[0], dtype=np.float64)
    cdef double[::1] w1 = np.ascontiguousarray(weights[1], dtype=np.float64)
    cdef double[::1] w2 = np.ascontiguousarray(weights[2], dtype=np.float64)
    cdef double[::1] w3 = np.ascontiguousarray(weights[3], dtype=np.float64)
    cdef Py_ssize_t i, j, k, l
    cdef Py_ssize_t n0 = x0.shape[0], n1 = x1.shape[0], n2 = x2.shape[0], n3 = x3.shape[0]
    cdef double q0, q01, q012, lin2, lin3, lin3k, a0, a1, a2, a3, total = 0.0
    cdef double p00 = p[0, 0], p11 = p[1, 1], p22 = p[2, 2], p33 = p[3, 3]
    cdef double p01 = 2 * p[0, 1], p02 = 2 * p[0, 2], p03 = 2 * p[0, 3]
    cdef double p12 = 2 * p[1, 2], p13 = 2 * p[1, 3], p23 = 2 * p[2, 3]
    with nogil:
        for i in range(n0):
            q0 = p00 * x0[i] * x0[i]
            a0 = 0.0
            for j in range(n1):
                q01 = q0 + p01 * x0[i] * x1[j] + p11 * x1[j] * x1[j]
                lin2 = p02 * x0[i] + p12 * x1[j]
                lin3 = p03 * x0[i] + p13 * x1[j]
                a1 = 0.0
                for k in range(n2):
                    q012 = q01 + lin2 * x2[k] + p22 * x2[k] * x2[k]
                    lin3k = lin3 + p23 * x2[k]
                    a2 = 0.0
                    for l in range(n3):
                        a2 += w3[l] * exp(-0.5 * (q012 + lin3k * x3[l] + p33 * x3[l] * x3[l]))
                    a1 += w2[k] * a2
                a0 += w1[j] * a1
            total += w0[i] * a0
    return total


cdef struct Params:
    double c1, c2, eta1, eta2, k1, k2, g, nm, n1, n2, n1i, n2i


cdef inline double sq(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef int alphas(double omega, Params* p, double complex* out) noexcept nogil:
    cdef double complex w1 = 1.0 - 1j * omega / p.k1
    cdef double complex w2 = 1.0 - 1j * omega / p.k2
    cdef double complex wb = 1.0 - 1j * omega / p.g
    cdef double complex den = w1 * p.c2 + w2 * (w1 * wb - p.c1)
    if sqrt(sq(den)) < DENOMINATOR_EPS:
        return STATUS_SINGULAR
    cdef double s12 = sqrt(p.c1 * p.c2)
    cdef double complex num1 = w2 * wb + p.c2
    cdef double complex num2 = w1 * wb - p.c1
    out[0] = -1.0 + 2.0 * p.eta1 * num1 / den
    out[1] = 2.0 * sqrt(p.eta1 * p.eta2) * s12 / den
    out[2] = -2j * sqrt(p.eta1 * p.c1) * w2 / den
    out[3] = 2.0 * sqrt(p.eta1 * (1.0 - p.eta1)) * num1 / den
    out[4] = 2.0 * sqrt(p.eta1 * (1.0 - p.eta2)) * s12 / den
    out[5] = -1.0 + 2.0 * p.eta2 * num2 / den
    out[6] = -2.0 * sqrt(p.eta1 * p.eta2) * s12 / den
    out[7] = -2j * sqrt(p.eta2 * p.c2) * w1 / den
    out[8] = 2.0 * sqrt(p.eta2 * (1.0 - p.eta2)) * num2 / den
    out[9] = -2.0 * sqrt(p.eta2 * (1.0 - p.eta1)) * s12 / den
    return STATUS_OK


cdef int density(double omega, Params* p, double* out) noexcept nogil:
    cdef double complex a[10]
    cdef double complex b[10]
    if alphas(omega, p, a) != STATUS_OK or alphas(-omega, p, b) != STATUS_OK:
        return STATUS_SINGULAR
    cdef double f1 = 2 * p.n1 + 1, f2 = 2 * p.n2 + 1, fm = 2 * p.nm + 1
    cdef double f1i = 2 * p.n1i + 1, f2i = 2 * p.n2i + 1
    out[0] = 0.5 * (sq(a[0]) * f1 + sq(a[1]) * f2 + sq(a[2]) * fm + sq(a[3]) * f1i + sq(a[4]) * f2i)
    out[1] = 0.5 * (sq(a[5]) * f2 + sq(a[6]) * f1 + sq(a[7]) * fm + sq(a[8]) * f2i + sq(a[9]) * f1i)
    cdef double complex cross = (a[0] * b[6] * f1 + a[1] * b[5] * f2 + a[2] * b[7] * fm
                                 + a[3] * b[9] * f1i + a[4] * b[8] * f2i)
    out[2] = 0.5 * cross.real
    return STATUS_OK


cdef Params unpack(params) except *:
    cdef Params p
    v = [float(x) for x in params]
    if len(v) != 12:
        raise ValueError("spectral parameter vector must have 12 entries")
    p.c1, p.c2, p.eta1, p.eta2, p.k1, p.k2, p.g, p.nm, p.n1, p.n2, p.n1i, p.n2i = v
    return p


def spectral_density(double omega, params):
    cdef Params p = unpack(params)
    cdef double out[3]
    cdef int st = density(omega, &p, out)
    if st != STATUS_OK:
        return 0.0, 0.0, 0.0, st
    return out[0], out[1], out[2], st


cdef inline double filter_weight(double omega, int kind, double width) noexcept nogil:
    if kind == FILTER_RECT:
        return 1.0 / width if fabs(omega) <= 0.5 * width else 0.0
    return exp(-0.5 * (omega / width) * (omega / width)) / (sqrt(2.0 * M_PI) * width)


cdef int weighted(double omega, Params* p, int kind, double width, double* out) noexcept nogil:
    cdef int st = density(omega, p, out)
    if st != STATUS_OK:
        return st
    cdef double wt = filter_weight(omega, kind, width)
    out[0] *= wt
    out[1] *= wt
    out[2] *= wt
    return STATUS_OK


# one stack frame: a, b, fa[3], fm[3], fb[3], whole[3], tol, depth
cdef int FRAME = 16


def spectral_integral(params, int filter_kind, double width, double upper, double rtol, int max_depth):
    cdef Params p = unpack(params)
    cdef double[:, ::1] stack = np.empty((STACK_SIZE, FRAME), dtype=np.float64)
    cdef double fe[17][3]
    cdef double fmid[16][3]
    cdef double flm[3], frm[3], left[3], right[3], delta[3], result[3], coarse[3]
    cdef double a, b, m, h, tol, scale, dmax, x
    cdef int i, k, depth, top = 0, st = STATUS_OK
    cdef long evals = 0
    with nogil:
        for k in range(3):
            result[k] = 0.0
            coarse[k] = 0.0
        for i in range(INITIAL_PANELS + 1):
            st = weighted(upper * i / INITIAL_PANELS, &p, filter_kind, width, fe[i])
            evals += 1
            if st != STATUS_OK:
                break
        if st == STATUS_OK:
            for i in range(INITIAL_PANELS):
                st = weighted(upper * (i + 0.5) / INITIAL_PANELS, &p, filter_kind, width, fmid[i])
                evals += 1
                if st != STATUS_OK:
                    break
        if st == STATUS_OK:
            h = upper / INITIAL_PANELS
            for i in range(INITIAL_PANELS):
                for k in range(3):
                    coarse[k] += h / 6.0 * (fe[i][k] + 4.0 * fmid[i][k] + fe[i + 1][k])
            scale = 0.0
            for k in range(3):
                if fabs(coarse[k]) > scale:
                    scale = fabs(coarse[k])
            if scale > 0.0:
                # push panels in reverse so the leftmost is processed first
                for i in range(INITIAL_PANELS - 1, -1, -1):
                    stack[top, 0] = upper * i / INITIAL_PANELS
                    stack[top, 1] = upper * (i + 1) / INITIAL_PANELS
                    for k in range(3):
                        stack[top, 2 + k] = fe[i][k]
                        stack[top, 5 + k] = fmid[i][k]
                        stack[top, 8 + k] = fe[i + 1][k]
                        stack[top, 11 + k] = h / 6.0 * (fe[i][k] + 4.0 * fmid[i][k] + fe[i + 1][k])
                    stack[top, 14] = rtol * scale / INITIAL_PANELS
                    stack[top, 15] = 0
                    top += 1
            while top > 0:
                top -= 1
                a = stack[top, 0]
                b = stack[top, 1]
                tol = stack[top, 14]
                depth = <int>stack[top, 15]
                m = 0.5 * (a + b)
                st = weighted(0.5 * (a + m), &p, filter_kind, width, flm)
                if st != STATUS_OK:
                    break
                st = weighted(0.5 * (m + b), &p, filter_kind, width, frm)
                if st != STATUS_OK:
                    break
                evals += 2
                h = 0.5 * (b - a)
                dmax = 0.0
                for k in range(3):
                    left[k] = h / 6.0 * (stack[top, 2 + k] + 4.0 * flm[k] + stack[top, 5 + k])
                    right[k] = h / 6.0 * (stack[top, 5 + k] + 4.0 * frm[k] + stack[top, 8 + k])
                    delta[k] = left[k] + right[k] - stack[top, 11 + k]
                    if fabs(delta[k]) > dmax:
                        dmax = fabs(delta[k])
                if dmax <= 15.0 * tol:
                    for k in range(3):
                        result[k] += left[k] + right[k] + delta[k] / 15.0
                    continue
                if depth + 1 > max_depth or evals > MAX_EVALS or top + 2 > STACK_SIZE:
                    st = STATUS_NOT_CONVERGED
                    break
                # right half (processed second)
                for k in range(3):
                    x = stack[top, 8 + k]  # fb
                    stack[top + 1, 2 + k] = stack[top, 5 + k]
                    stack[top + 1, 5 + k] = frm[k]
                    stack[top + 1, 8 + k] = x
                    stack[top + 1, 11 + k] = right[k]
                stack[top + 1, 0] = m
                stack[top + 1, 1] = b
                stack[top + 1, 14] = 0.5 * tol
                stack[top + 1, 15] = depth + 1
                # left half overwrites the current frame (fa stays in place)
                for k in range(3):
                    stack[top, 8 + k] = stack[top, 5 + k]
                    stack[top, 5 + k] = flm[k]
                    stack[top, 11 + k] = left[k]
                stack[top, 1] = m
                stack[top, 14] = 0.5 * tol
                stack[top, 15] = depth + 1
                # left must be popped first: swap the two frames
                for k in range(FRAME):
                    x = stack[top, k]
                    stack[top, k] = stack[top + 1, k]
                    stack[top + 1, k] = x
                top += 2
    if st == STATUS_SINGULAR:
        return 0.0, 0.0, 0.0, evals, st
    return 2 * result[0], 2 * result[1], 2 * result[2], evals, st
