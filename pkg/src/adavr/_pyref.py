"""Pure-numpy epoch loops: the fallback backend.

Mirrors the numba kernels in ``_kernels`` function for function; selected via
ADAVR_BACKEND=numpy (see ``_backend``). The per-iteration loop runs in
Python, so this backend is only suitable for small problems and for checking
the compiled path.

Shared conventions: datasets arrive as raw CSR arrays, the feasible set as
(center, radius, has_ball), per-epoch sampling as an ``order`` index array.
State arrays are updated in place; scalar state is returned.
"""

from __future__ import annotations

import math

import numpy as np


def _slopes(code, delta, z, y):
    """d loss / d score, vectorized."""
    if code == 0:
        m = y * z
        e = np.exp(-np.abs(m))
        sig = np.where(m >= 0.0, e / (1.0 + e), 1.0 / (1.0 + e))
        return -y * sig
    r = z - y
    if code == 1:
        return r
    return np.clip(r, -delta, delta)


def _slope1(code, delta, z, y):
    """Scalar slope for a single example."""
    if code == 0:
        m = y * z
        e = math.exp(-abs(m))
        sig = e / (1.0 + e) if m >= 0.0 else 1.0 / (1.0 + e)
        return -y * sig
    r = z - y
    if code == 1:
        return r
    return min(max(r, -delta), delta)


def _row_dot(indptr, indices, values, i, x):
    lo, hi = indptr[i], indptr[i + 1]
    return float(values[lo:hi] @ x[indices[lo:hi]])


def full_grad(indptr, indices, values, labels, lam, code, delta, x, out):
    n = labels.shape[0]
    t = values * x[indices]
    z = np.zeros(n)
    if t.size:
        starts = indptr[:-1]
        nonempty = starts < indptr[1:]
        z[nonempty] = np.add.reduceat(t, starts[nonempty])
    w = _slopes(code, delta, z, labels)
    per_entry = np.repeat(w, np.diff(indptr)) * values
    out[:] = np.bincount(indices, weights=per_entry, minlength=x.shape[0])
    out /= n
    out += lam * x


def _vr_grad(indptr, indices, values, labels, lam, code, delta, i, x, u, grad_fu, out):
    """out = grad f_i(x) - grad f_i(u) + grad_fu; costs two component gradients."""
    lo, hi = indptr[i], indptr[i + 1]
    idx = indices[lo:hi]
    val = values[lo:hi]
    zx = float(val @ x[idx])
    zu = float(val @ u[idx])
    dw = _slope1(code, delta, zx, labels[i]) - _slope1(code, delta, zu, labels[i])
    np.multiply(x - u, lam, out=out)
    out += grad_fu
    out[idx] += dw * val


def _project(x, center, radius, has_ball):
    if not has_ball:
        return
    diff = x - center
    nrm = float(np.linalg.norm(diff))
    if nrm > radius:
        x[:] = center + diff * (radius / nrm)


def _infeas(x, center, radius):
    return float(np.linalg.norm(x - center)) - radius


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
        xt[:] = z - (a / gamma) * g_prev
        _project(xt, center, radius, has_ball)
        A_new = A + a + a2
        xbar[:] = (A * xbar + a * xt + a2 * u) / A_new
        A = A_new
        if has_ball:
            max_infeas = max(max_infeas, _infeas(xt, center, radius),
                             _infeas(xbar, center, radius))
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
            dg = float(np.sum((g_new - g_prev) ** 2))
            gamma_new = math.sqrt(eta * eta * gamma * gamma + a2 * dg) / eta
            dsum += a2 * dg
            min_dgamma = min(min_dgamma, gamma_new - gamma)
        else:
            gamma_new = gamma
        # correction step uses both quadratics; the second has weight gamma_new - gamma
        z[:] = (gamma * z + (gamma_new - gamma) * xt - a * g_new) / gamma_new
        _project(z, center, radius, has_ball)
        if has_ball:
            max_infeas = max(max_infeas, _infeas(z, center, radius))
        gamma = gamma_new
        g_prev[:] = g_new
    return gamma, A, grads, dsum, min_dgamma, max_infeas


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
    xbar = a * x + (1.0 - a) * u
    u_accum[:] = 0.0
    g = np.empty(d)
    xprev = np.empty(d)
    for t in range(1, T + 1):
        i = order[t - 1]
        _vr_grad(indptr, indices, values, labels, lam, code, delta,
                 i, xbar, u, grad_fu, g)
        grads += 2
        w = fixed_weight if mode == 2 else gamma * q
        xprev[:] = x
        x -= g / w
        _project(x, center, radius, has_ball)
        dxn = float(np.sum((x - xprev) ** 2))
        xbar[:] = a * x + (1.0 - a) * u
        u_accum += xbar
        if has_ball:
            max_infeas = max(max_infeas, _infeas(x, center, radius),
                             _infeas(xbar, center, radius))
        if mode == 0:
            gamma_new = gamma * math.sqrt(1.0 + dxn / (eta * eta))
        elif mode == 1:
            inc = dxn / (eta * eta)
            gamma_new = gamma + inc
            dsum += inc
        else:
            gamma_new = gamma
        min_dgamma = min(min_dgamma, gamma_new - gamma)
        gamma = gamma_new
    return gamma, grads, dsum, min_dgamma, max_infeas


def svrg_epoch(indptr, indices, values, labels, lam, code, delta,
               center, radius, has_ball,
               order, T, step,
               x, u, grad_fu):
    n = labels.shape[0]
    u[:] = x
    full_grad(indptr, indices, values, labels, lam, code, delta, u, grad_fu)
    grads = n
    g = np.empty(x.shape[0])
    for t in range(T):
        i = order[t]
        _vr_grad(indptr, indices, values, labels, lam, code, delta,
                 i, x, u, grad_fu, g)
        grads += 2
        x -= step * g
        _project(x, center, radius, has_ball)
    return grads
