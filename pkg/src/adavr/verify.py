"""Independent oracles: reference solver, gradient checks, schedule audits.

These deliberately share no code with the optimizer epoch loops beyond the
problem and geometry primitives, so they can vouch for the optimizers'
outputs. ``run_all_checks`` backs the ``adavr verify`` command.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ProxTerm, Region, diameter, effective_ball, prox
from .problem import (FiniteSumObjective, component_grad, component_value,
                      full_grad, full_value, smoothness_bound, vr_gradient)
from .schedules import (ADAVRAE_A_INIT, ADAVRAE_C, ADAVRAG_C, adavrae_a,
                        adavrag_a, adavrag_q, s0_of)

__all__ = [
    "ReferenceSolution",
    "reference_solution",
    "fd_check",
    "vr_check",
    "AuditCheck",
    "schedule_audit",
    "run_all_checks",
]


@dataclass(frozen=True)
class ReferenceSolution:
    """High-accuracy minimizer with a computable suboptimality certificate."""

    x_star: np.ndarray
    f_star: float
    certified_gap: float
    iterations: int


def reference_solution(obj: FiniteSumObjective, region: Region, h: ProxTerm,
                       tol: float, max_iter: int = 500_000) -> ReferenceSolution:
    """Proximal full-gradient descent with step 1/beta.

    Stops once the prox-gradient mapping satisfies beta ||x - x+|| <= tol,
    certifying F(x+) - F* <= D * beta * ||x - x+|| with D the domain
    diameter (the region must be bounded for the certificate).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    ball = effective_ball(region, h)
    if ball is None:
        raise ValueError("reference_solution needs a bounded region for its certificate")
    D = diameter(ball)
    beta = smoothness_bound(obj)
    step = 1.0 / beta if beta > 0 else 1.0
    x = ball.center.copy()
    for it in range(1, max_iter + 1):
        x_next = prox(ball, x - step * full_grad(obj, x), step)
        resid = (beta if beta > 0 else 1.0) * float(np.linalg.norm(x - x_next))
        if resid <= tol:
            return ReferenceSolution(x_next, full_value(obj, x_next), D * resid, it)
        x = x_next
    raise RuntimeError(
        f"reference solver did not reach tol={tol:g} in {max_iter} iterations "
        f"(last residual {resid:g})")


def fd_check(obj: FiniteSumObjective, x: np.ndarray,
             rng: np.random.Generator | None = None, n_components: int = 20) -> float:
    """Max relative error of analytic gradients against central differences.

    Covers every coordinate of the full gradient plus ``n_components``
    randomly chosen component gradients, with per-coordinate step
    1e-5 (1 + |x_j|) and error |analytic - numeric| / (1 + |analytic|).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    x = np.asarray(x, dtype=np.float64)
    worst = 0.0

    def central(value_fn, g: np.ndarray) -> float:
        err = 0.0
        for j in range(x.shape[0]):
            step = 1e-5 * (1.0 + abs(x[j]))
            xp = x.copy()
            xm = x.copy()
            xp[j] += step
            xm[j] -= step
            num = (value_fn(xp) - value_fn(xm)) / (2.0 * step)
            err = max(err, abs(num - g[j]) / (1.0 + abs(g[j])))
        return err

    worst = max(worst, central(lambda p: full_value(obj, p), full_grad(obj, x)))
    for i in rng.integers(0, obj.n, size=n_components):
        i = int(i)
        worst = max(worst, central(lambda p: component_value(obj, i, p),
                                   component_grad(obj, i, x)))
    return worst


def vr_check(obj: FiniteSumObjective, x: np.ndarray,
             u: np.ndarray) -> tuple[float, float]:
    """Both sides of the variance bound for the reduced estimator.

    lhs = (1/n) sum_i ||g_i - grad f(x)||^2 over all components,
    rhs = 2 beta (f(u) - f(x) - <grad f(x), u - x>). The estimator's
    variance never exceeds rhs; callers check lhs <= rhs up to slack.
    """
    gf = full_grad(obj, x)
    gfu = full_grad(obj, u)
    lhs = 0.0
    for i in range(obj.n):
        diff = vr_gradient(obj, i, x, u, gfu) - gf
        lhs += float(diff @ diff)
    lhs /= obj.n
    beta = smoothness_bound(obj)
    rhs = 2.0 * beta * (full_value(obj, u) - full_value(obj, x)
                        - float(gf @ (np.asarray(u, dtype=np.float64) - x)))
    return lhs, rhs


@dataclass(frozen=True)
class AuditCheck:
    name: str
    passed: bool
    first_violation: int | None = None
    detail: str = ""


def _check_series(name: str, pairs) -> AuditCheck:
    """pairs yields (s, lhs, rhs) meaning lhs <= rhs is required."""
    for s, lhs, rhs in pairs:
        slack = 1e-9 * max(abs(lhs), abs(rhs), 1.0)
        if lhs > rhs + slack:
            return AuditCheck(name, False, s, f"at s={s}: {lhs:.12g} > {rhs:.12g}")
    return AuditCheck(name, True)


def schedule_audit(kind: str, n: int, S: int,
                   a_fn=None, q_fn=None) -> list[AuditCheck]:
    """Evaluate every testable schedule condition for epochs 1..S.

    ``kind`` is "adavrae" or "adavrag". ``a_fn`` / ``q_fn`` override the
    coefficient functions (used to confirm that corrupted schedules are
    detected); they default to the prescribed sequences.
    """
    if n < 1 or S < 1:
        raise ValueError("need n >= 1 and S >= 1")
    s0 = s0_of(n)
    T = n
    if kind == "adavrae":
        a_fn = a_fn or (lambda s: adavrae_a(s, n))
        c = ADAVRAE_C
        A_end = ADAVRAE_A_INIT
        reset_ok = []
        lower_ok = []
        for s in range(1, S + 1):
            a = a_fn(s)
            A0 = A_end - T * a * a
            reset_ok.append((s, a * a, 4.0 * A0))
            A_end = A0 + T * (a + a * a)
            bound = n * np.exp(-(0.5 ** s) * np.log(4.0 * n)) if s <= s0 \
                else n / (4.0 * c) * (s - s0) ** 2
            lower_ok.append((s, bound, A_end))
        checks = [
            _check_series("adavrae.a_sq_below_4A0", reset_ok),
            _check_series("adavrae.A_end_lower_bound", lower_ok),
            _check_series("adavrae.a_nondecreasing_within_phase",
                          ((s, a_fn(s), a_fn(s + 1))
                           for s in range(1, S) if s != s0)),
        ]
        return checks
    if kind == "adavrag":
        a_fn = a_fn or (lambda s: adavrag_a(s, n))
        q_fn = q_fn or (lambda s: adavrag_q(s, n))
        c = ADAVRAG_C
        a_s0 = a_fn(s0)
        checks = [
            AuditCheck("adavrag.a_s0_le_half", a_s0 <= 0.5 * (1.0 + 1e-9),
                       None if a_s0 <= 0.5 * (1.0 + 1e-9) else s0,
                       f"a(s0={s0}) = {a_s0:.12g}"),
            _check_series("adavrag.q_dominates_movement_ratio",
                          ((s, (2.0 - a_fn(s)) * a_fn(s) / (1.0 - a_fn(s)), q_fn(s))
                           for s in range(1, S + 1))),
            _check_series("adavrag.weighted_epochs_monotone",
                          ((s, (1.0 - a_fn(s + 1)) * T / (q_fn(s + 1) * a_fn(s + 1)),
                            T / (q_fn(s) * a_fn(s)))
                           for s in range(1, S))),
            _check_series("adavrag.qa_over_T_bound",
                          ((s, q_fn(s) * a_fn(s) / T,
                            4.0 * np.exp(-(1.0 - 0.5 ** s) * np.log(4.0 * n)) if s <= s0
                            else 2.0 * (5.0 + np.sqrt(33.0)) * c * c
                            / (3.0 * n * (s - s0 + 2.0 * c) ** 2))
                           for s in range(1, S + 1))),
        ]
        return checks
    raise ValueError(f"unknown schedule kind {kind!r}")


def run_all_checks(seed: int = 0) -> list[AuditCheck]:
    """Full audit: gradients, estimator variance, convexity and schedules."""
    from .data import synth_classification
    from .problem import LOGISTIC, SQUARED, huber

    rng = np.random.default_rng(seed)
    results: list[AuditCheck] = []
    ds = synth_classification(20, 5, seed=seed)

    for loss, tol in ((LOGISTIC, 1e-6), (SQUARED, 1e-9), (huber(1.0), 1e-6)):
        obj = FiniteSumObjective(ds, loss, 0.05)
        worst = max(fd_check(obj, rng.uniform(-2, 2, size=5), rng) for _ in range(10))
        results.append(AuditCheck(f"gradients.fd.{loss.kind}", worst <= tol,
                                  detail=f"max rel err {worst:.3g} (tol {tol:g})"))

    obj = FiniteSumObjective(ds, LOGISTIC, 0.05)
    worst_unbias = 0.0
    worst_vr = 0.0
    vr_ok = True
    for _ in range(200):
        x = rng.uniform(-2, 2, size=5)
        u = rng.uniform(-2, 2, size=5)
        gfu = full_grad(obj, u)
        mean = np.mean([vr_gradient(obj, i, x, u, gfu) for i in range(obj.n)], axis=0)
        worst_unbias = max(worst_unbias, float(np.max(np.abs(mean - full_grad(obj, x)))))
        lhs, rhs = vr_check(obj, x, u)
        if lhs > rhs * (1.0 + 1e-9) + 1e-15:
            vr_ok = False
            worst_vr = max(worst_vr, lhs - rhs)
    results.append(AuditCheck("estimator.unbiased", worst_unbias <= 1e-10,
                              detail=f"max abs dev {worst_unbias:.3g}"))
    results.append(AuditCheck("estimator.variance_bound", vr_ok,
                              detail="" if vr_ok else f"excess {worst_vr:.3g}"))

    conv_ok = True
    smooth_ok = True
    beta = smoothness_bound(obj)
    for _ in range(100):
        x = rng.uniform(-2, 2, size=5)
        y = rng.uniform(-2, 2, size=5)
        lin = full_value(obj, x) + float(full_grad(obj, x) @ (y - x))
        conv_ok &= full_value(obj, y) >= lin - 1e-10
        lip = float(np.linalg.norm(full_grad(obj, x) - full_grad(obj, y)))
        smooth_ok &= lip <= beta * float(np.linalg.norm(x - y)) * (1.0 + 1e-9)
    results.append(AuditCheck("objective.convexity", bool(conv_ok)))
    results.append(AuditCheck("objective.smoothness", bool(smooth_ok)))

    for n in (1, 10, 100, 1000, 10 ** 6):
        for kind in ("adavrae", "adavrag"):
            for chk in schedule_audit(kind, n, 60):
                results.append(AuditCheck(f"{chk.name}[n={n}]", chk.passed,
                                          chk.first_violation, chk.detail))
    return results
