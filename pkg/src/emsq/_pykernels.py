"""Pure-Python implementations of the hot kernels.

These mirror ``_ckernels.pyx`` function for function and are used when the
compiled extension is unavailable (or ``EMSQ_PURE_PYTHON=1``). Both backends
are exercised by the test suite and must agree to rounding.

Spectral parameter vector layout (float64, length 12)::

    [c1, c2, eta1, eta2, kappa1, kappa2, gamma_m, n_m, n1_ex, n2_ex, n1_in, n2_in]
"""
import math

import numpy as np

STATUS_OK = 0
STATUS_NOT_CONVERGED = 1
STATUS_SINGULAR = 2

FILTER_RECT = 0
FILTER_GAUSSIAN = 1

DENOMINATOR_EPS = 1e-12
INITIAL_PANELS = 16
MAX_EVALS = 10_000_000


def wigner_grid_sum(precision, nodes, weights):
    """Tensor-product quadrature of ``exp(-psi.P.psi/2)`` on the given per-axis rules."""
    p = np.asarray(precision, dtype=float)
    x0, x1, x2, x3 = (np.asarray(x, dtype=float) for x in nodes)
    w0, w1, w2, w3 = (np.asarray(w, dtype=float) for w in weights)
    # everything independent of the outermost axis is built once
    q123 = (
        p[1, 1] * x1[:, None, None] ** 2
        + p[2, 2] * x2[None, :, None] ** 2
        + p[3, 3] * x3[None, None, :] ** 2
        + 2.0 * p[1, 2] * x1[:, None, None] * x2[None, :, None]
        + 2.0 * p[1, 3] * x1[:, None, None] * x3[None, None, :]
        + 2.0 * p[2, 3] * x2[None, :, None] * x3[None, None, :]
    )
    lin = (
        2.0 * p[0, 1] * x1[:, None, None]
        + 2.0 * p[0, 2] * x2[None, :, None]
        + 2.0 * p[0, 3] * x3[None, None, :]
    )
    w123 = w1[:, None, None] * w2[None, :, None] * w3[None, None, :]
    total = 0.0
    for xi, wi in zip(x0, w0):
        q = q123 + xi * lin + p[0, 0] * xi * xi
        total += wi * float(np.sum(w123 * np.exp(-0.5 * q)))
    return total


def _alphas(omega, c1, c2, eta1, eta2, kappa1, kappa2, gamma_m):
    w1 = 1.0 - 1j * omega / kappa1
    w2 = 1.0 - 1j * omega / kappa2
    wb = 1.0 - 1j * omega / gamma_m
    den = w1 * c2 + w2 * (w1 * wb - c1)
    if abs(den) < DENOMINATOR_EPS:
        return None
    s12 = math.sqrt(c1 * c2)
    num1 = w2 * wb + c2
    num2 = w1 * wb - c1
    return (
        -1.0 + 2.0 * eta1 * num1 / den,  # a1
        2.0 * math.sqrt(eta1 * eta2) * s12 / den,  # a12
        -2j * math.sqrt(eta1 * c1) * w2 / den,  # a1m
        2.0 * math.sqrt(eta1 * (1.0 - eta1)) * num1 / den,  # a1in
        2.0 * math.sqrt(eta1 * (1.0 - eta2)) * s12 / den,  # a12in
        -1.0 + 2.0 * eta2 * num2 / den,  # a2
        -2.0 * math.sqrt(eta1 * eta2) * s12 / den,  # a21
        -2j * math.sqrt(eta2 * c2) * w1 / den,  # a2m
        2.0 * math.sqrt(eta2 * (1.0 - eta2)) * num2 / den,  # a2in
        -2.0 * math.sqrt(eta2 * (1.0 - eta1)) * s12 / den,  # a21in
    )


def spectral_density(omega, params):
    """Symmetrized output CM density at ``omega``: ``(V11, V33, Re M / 2, status)``.

    ``M`` is the anticommutator correlator of ``d1(omega)`` with ``d2(-omega)``;
    the returned third entry carries the raw sign (before any detector-phase
    convention is applied).
    """
    c1, c2, eta1, eta2, k1, k2, g, nm, n1, n2, n1i, n2i = (float(x) for x in params)
    ap = _alphas(omega, c1, c2, eta1, eta2, k1, k2, g)
    am = _alphas(-omega, c1, c2, eta1, eta2, k1, k2, g)
    if ap is None or am is None:
        return 0.0, 0.0, 0.0, STATUS_SINGULAR
    a1, a12, a1m, a1in, a12in, a2, a21, a2m, a2in, a21in = ap
    b1, b12, b1m, b1in, b12in, b2, b21, b2m, b2in, b21in = am
    f1, f2, fm, f1i, f2i = 2 * n1 + 1, 2 * n2 + 1, 2 * nm + 1, 2 * n1i + 1, 2 * n2i + 1

    def sq(z):
        return z.real * z.real + z.imag * z.imag

    big1 = sq(a1) * f1 + sq(a12) * f2 + sq(a1m) * fm + sq(a1in) * f1i + sq(a12in) * f2i
    big2 = sq(a2) * f2 + sq(a21) * f1 + sq(a2m) * fm + sq(a2in) * f2i + sq(a21in) * f1i
    cross = a1 * b21 * f1 + a12 * b2 * f2 + a1m * b2m * fm + a1in * b21in * f1i + a12in * b2in * f2i
    return 0.5 * big1, 0.5 * big2, 0.5 * cross.real, STATUS_OK


def _filter_weight(omega, kind, width):
    if kind == FILTER_RECT:
        return 1.0 / width if abs(omega) <= 0.5 * width else 0.0
    return math.exp(-0.5 * (omega / width) ** 2) / (math.sqrt(2.0 * math.pi) * width)


def spectral_integral(params, filter_kind, width, upper, rtol, max_depth):
    """Adaptive Simpson integral of ``|f|^2 * density`` over ``[-upper, upper]``.

    The integrand is even, so ``[0, upper]`` is integrated and doubled.
    ``width`` is the full width (rad/s) of the rectangle or the standard
    deviation of the Gaussian ``|f|^2``. Returns ``(V11, V33, ReM/2, evals, status)``.
    """
    evals = 0

    def f(omega):
        nonlocal evals
        evals += 1
        a, b, c, st = spectral_density(omega, params)
        if st != STATUS_OK:
            raise ZeroDivisionError
        wt = _filter_weight(omega, filter_kind, width)
        return (wt * a, wt * b, wt * c)

    try:
        edges = [upper * i / INITIAL_PANELS for i in range(INITIAL_PANELS + 1)]
        fe = [f(x) for x in edges]
        fmid = [f(0.5 * (edges[i] + edges[i + 1])) for i in range(INITIAL_PANELS)]
        panels = []
        coarse = [0.0, 0.0, 0.0]
        for i in range(INITIAL_PANELS):
            h = edges[i + 1] - edges[i]
            whole = tuple(h / 6.0 * (fe[i][k] + 4.0 * fmid[i][k] + fe[i + 1][k]) for k in range(3))
            for k in range(3):
                coarse[k] += whole[k]
            panels.append((edges[i], edges[i + 1], fe[i], fmid[i], fe[i + 1], whole))
        scale = max(abs(x) for x in coarse)
        if scale == 0.0:
            return 0.0, 0.0, 0.0, evals, STATUS_OK
        tol_panel = rtol * scale / INITIAL_PANELS
        result = [0.0, 0.0, 0.0]
        stack = [(p + (tol_panel, 0)) for p in reversed(panels)]
        while stack:
            a, b, fa, fm, fb, whole, tol, depth = stack.pop()
            m = 0.5 * (a + b)
            lm, rm = 0.5 * (a + m), 0.5 * (m + b)
            flm, frm = f(lm), f(rm)
            h = 0.5 * (b - a)
            left = tuple(h / 6.0 * (fa[k] + 4.0 * flm[k] + fm[k]) for k in range(3))
            right = tuple(h / 6.0 * (fm[k] + 4.0 * frm[k] + fb[k]) for k in range(3))
            delta = [left[k] + right[k] - whole[k] for k in range(3)]
            if max(abs(d) for d in delta) <= 15.0 * tol:
                for k in range(3):
                    result[k] += left[k] + right[k] + delta[k] / 15.0
                continue
            if depth + 1 > max_depth or evals > MAX_EVALS:
                return 2 * result[0], 2 * result[1], 2 * result[2], evals, STATUS_NOT_CONVERGED
            stack.append((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))
            stack.append((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1))
    except ZeroDivisionError:
        return 0.0, 0.0, 0.0, evals, STATUS_SINGULAR
    return 2 * result[0], 2 * result[1], 2 * result[2], evals, STATUS_OK
