"""Numba-compiled epoch loops: the default backend.

Same function-for-function contract as ``_pyref``; see that module for the
argument conventions. Kernels avoid fastmath so results stay reproducible,
and only read the dataset arrays (which are frozen read-only).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _slope1(code, delta, z, y):
    if code == 0:
        m = y * z
        e = math.exp(-abs(m))
        if m >= 0.0:
            sig = e / (1.0 + e)
        else:
            sig = 1.0 / (1.0 + e)
        return -y * sig
    r = z - y
    if code == 1:
        return r
    return min(max(r, -delta), delta)


@njit(cache=True)
def _row_dot(indptr, indices, values, i, x):
    s = 0.0
    for k in range(indptr[i], indptr[i + 1]):
        s += values[k] * x[indices[k]]
    return s


@njit(cache=True)
def full_grad(indptr, indices, values, labels, lam, code, delta, x, out):
    n = labels.shape[0]
    d = x.shape[0]
    for j in range(d):
        out[j] = 0.0
    for i in range(n):
        z = _row_dot(indptr, indices, values, i, x)
        w = _slope1(code, delta, z, labels[i])
        for k in range(indptr[i], indptr[i + 1]):
            out[indices[k]] += w * values[k]
    inv = 1.0 / n
    for j in range(d):
        out[j] = out[j] * inv + lam * x[j]


@njit(cache=True)
def _vr_grad(indptr, indices, values, labels, lam, code, delta, i, x, u, grad_fu, out):
    zx = _row_dot(indptr, indices, values, i, x)
    zu = _row_dot(indptr, indices, values, i, u)
    dw = _slope1(code, delta, zx, labels[i]) - _slope1(code, delta, zu, labels[i])
    for j in range(x.shape[0]):
        out[j] = grad_fu[j] + lam * (x[j] - u[j])
    for k in range(indptr[i], indptr[i + 1]):
        out[indices[k]] += dw * values[k]


@njit(cache=True)
def _project(x, center, radius, has_ball):
    if not has_ball:
        return
    s = 0.0
    for j in range(x.shape[0]):
        dj = x[j] - center[j]
        s += dj * dj
    nrm = math.sqrt(s)
    if nrm > radius:
        sc = radius / nrm
        for j in range(x.shape[0]):
            x[j] = center[j] + (x[j] - center[j]) * sc


@njit(cache=True)
def _infeas(x, center, radius):
    s = 0.0
    for j in range(x.shape[0]):
        dj = x[j] - center[j]
        s += dj * dj
    return math.sqrt(s) - radius


@njit(cache=True)
def adavrae_epoch(indptr, indices, values, labels, lam, code, delta,
                  center, radius, has_ball,
                  order, T, a, eta, gamma, A, adaptive, finish_tail,
                  xbar, z, u, g_prev, grad_fu):
    d = xbar.shape[0]
    n = labels.shape[0]
    a2 = a * a
    grads = 0
    dsum = 0.0
    min_dgamma = 0.0
    max_infeas = 0.0
    xt = np.empty(d)
    g_new = np.empty(d)
    for t in range(1, T + 1):
        # past extra-gradient step with the previous estimate
        coef = a / gamma
        for j in range(d):
            xt[j] = z[j] - coef * g_prev[j]
        _project(xt, center, radius, has_ball)
        A_new = A + a + a2
        for j in range(d):
            xbar[j] = (A * xbar[j] + a * xt[j] + a2 * u[j]) / A_new
        A = A_new
        if has_ball:
            v = _infeas(xt, center, radius)
            if v > max_infeas:
                max_infeas = v
            v = _infeas(xbar, center, radius)
            if v > max_infeas:
                max_infeas = v
        if t != T:
            i = order[t - 1]
            _vr_grad(indptr, indices, values, labels, lam, code, delta,
                     i, xbar, u, grad_fu, g_new)
            grads += 2
        else:
            if not finish_tail:
                break
            full_grad(indptr, indices, values, labels, lam, code, delta, xbar, g_new)
            grads += n
        if adaptive:
            dg = 0.0
            for j in range(d):
                dd = g_new[j] - g_prev[j]
                dg += dd * dd
            gamma_new = math.sqrt(eta * eta * gamma * gamma + a2 * dg) / eta
            dsum += a2 * dg
            if gamma_new - gamma < min_dgamma:
                min_dgamma = gamma_new - gamma
        else:
            gamma_new = gamma
        # correction step uses both quadratics; the second has weight gamma_new - gamma
        dgam = gamma_new - gamma
        for j in range(d):
            z[j] = (gamma * z[j] + dgam * xt[j] - a * g_new[j]) / gamma_new
        _project(z, center, radius, has_ball)
        if has_ball:
            v = _infeas(z, center, radius)
            if v > max_infeas:
                max_infeas = v
        gamma = gamma_new
        for j in range(d):
            g_prev[j] = g_new[j]
    return gamma, A, grads, dsum, min_dgamma, max_infeas


@njit(cache=True)
def adavrag_epoch(indptr, indices, values, labels, lam, code, delta,
                  center, radius, has_ball,
                  order, T, a, q, eta, gamma, mode, fixed_weight,
                  x, u, grad_fu, u_accum):
    d = x.shape[0]
    n = labels.shape[0]
    full_grad(indptr, indices, values, labels, lam, code, delta, u, grad_fu)
    grads = n
    dsum = 0.0
    min_dgamma = 0.0
    max_infeas = 0.0
    xbar = np.empty(d)
    g = np.empty(d)
    xprev = np.empty(d)
    for j in range(d):
        xbar[j] = a * x[j] + (1.0 - a) * u[j]
        u_accum[j] = 0.0
    for t in range(1, T + 1):
        i = order[t - 1]
        _vr_grad(indptr, indices, values, labels, lam, code, delta,
                 i, xbar, u, grad_fu, g)
        grads += 2
        if mode == 2:
            w = fixed_weight
        else:
            w = gamma * q
        for j in range(d):
            xprev[j] = x[j]
            x[j] = x[j] - g[j] / w
        _project(x, center, radius, has_ball)
        dxn = 0.0
        for j in range(d):
            dd = x[j] - xprev[j]
            dxn += dd * dd
            xbar[j] = a * x[j] + (1.0 - a) * u[j]
            u_accum[j] += xbar[j]
        if has_ball:
            v = _infeas(x, center, radius)
            if v > max_infeas:
                max_infeas = v
            v = _infeas(xbar, center, radius)
            if v > max_infeas:
                max_infeas = v
        if mode == 0:
            gamma_new = gamma * math.sqrt(1.0 + dxn / (eta * eta))
        elif mode == 1:
            inc = dxn / (eta * eta)
            gamma_new = gamma + inc
            dsum += inc
        else:
            gamma_new = gamma
        if gamma_new - gamma < min_dgamma:
            min_dgamma = gamma_new - gamma
        gamma = gamma_new
    return gamma, grads, dsum, min_dgamma, max_infeas


@njit(cache=True)
def svrg_epoch(indptr, indices, values, labels, lam, code, delta,
               center, radius, has_ball,
               order, T, step,
               x, u, grad_fu):
    n = labels.shape[0]
    d = x.shape[0]
    for j in range(d):
        u[j] = x[j]
    full_grad(indptr, indices, values, labels, lam, code, delta, u, grad_fu)
    grads = n
    g = np.empty(d)
    for t in range(T):
        i = order[t]
        _vr_grad(indptr, indices, values, labels, lam, code, delta,
                 i, x, u, grad_fu, g)
        grads += 2
        for j in range(d):
            x[j] = x[j] - step * g[j]
        _project(x, center, radius, has_ball)
    return grads
