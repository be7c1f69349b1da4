"""Epoch state machines for the variance-reduced methods and baselines.

``run`` executes S epochs of the selected algorithm and returns a ``Trace``
of (epoch, cumulative individual gradient evaluations, objective) rows.
Counting convention: a full gradient costs n, one variance-reduced estimate
costs 2, objective evaluations for the trace cost 0.

Algorithms:

    adavrae     adaptive accelerated extra-gradient (step from gradient
                differences); the epoch-final full gradient doubles as the
                next epoch's checkpoint gradient, and the very last epoch
                skips it.
    adavrag-i   adaptive accelerated mirror descent, multiplicative step
    adavrag-ii  same, additive step
    vrae        adavrae with the step fixed to 8 beta (known smoothness)
    vrag        mirror-descent variant with per-epoch weight
                beta (2 - a) a / (1 - a)
    svrg        plain snapshot baseline (practical variant: epoch output is
                the last iterate), constant step
    svrgpp      svrg with doubling epoch lengths, T_1 = ceil(n / 4)

Each run owns its state and generator; runs sharing an objective are safe to
execute concurrently. Sampling uses a fresh permutation per epoch drawn from
a PCG64 generator (recorded as ``numpy-pcg64`` in the trace metadata).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._backend import backend_name, get_backend
from .geometry import Ball, ProxTerm, Region, effective_ball, project
from .problem import FiniteSumObjective, full_value, smoothness_bound
from .schedules import AdaVraeSchedule, AdaVragSchedule, svrgpp_epoch_length, vrag_step_weight

__all__ = [
    "Algorithm",
    "RunParams",
    "GradCounter",
    "TraceEntry",
    "Trace",
    "epoch_permutation",
    "run",
]

RNG_ID = "numpy-pcg64"


class Algorithm(str, Enum):
    ADAVRAE = "adavrae"
    ADAVRAG_I = "adavrag-i"
    ADAVRAG_II = "adavrag-ii"
    VRAE = "vrae"
    VRAG = "vrag"
    SVRG = "svrg"
    SVRGPP = "svrgpp"

    @property
    def option(self) -> str:
        if self is Algorithm.ADAVRAG_I:
            return "I"
        if self is Algorithm.ADAVRAG_II:
            return "II"
        return ""

    @property
    def adaptive(self) -> bool:
        return self in (Algorithm.ADAVRAE, Algorithm.ADAVRAG_I, Algorithm.ADAVRAG_II)


@dataclass
class RunParams:
    """Knobs shared by all algorithms; see ``run`` for which ones apply."""

    epochs: int
    gamma0: float = 0.01
    eta: float | None = None
    beta_override: float | None = None
    step_size: float | None = None
    seed: int = 0
    svrgpp_t1: int | None = None

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be nonnegative")
        if not self.gamma0 > 0:
            raise ValueError("gamma0 must be positive")
        if self.eta is not None and not self.eta > 0:
            raise ValueError("eta must be positive")


@dataclass
class GradCounter:
    """Running count of individual component-gradient evaluations."""

    count: int = 0

    def add_full(self, n: int) -> None:
        self.count += n

    def add_estimator(self) -> None:
        self.count += 2

    def add(self, k: int) -> None:
        self.count += int(k)


@dataclass(frozen=True)
class TraceEntry:
    epoch: int
    grads: int
    objective: float


@dataclass
class Trace:
    """Per-epoch record of one run, plus run metadata and diagnostics."""

    algorithm: str
    option: str
    seed: int
    params: dict
    entries: list[TraceEntry] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def final_objective(self) -> float:
        return self.entries[-1].objective

    @property
    def final_grads(self) -> int:
        return self.entries[-1].grads

    def objectives(self) -> np.ndarray:
        return np.array([e.objective for e in self.entries])

    def grads(self) -> np.ndarray:
        return np.array([e.grads for e in self.entries], dtype=np.int64)


def epoch_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform permutation of 0..n-1 (Fisher-Yates, via the generator)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return rng.permutation(n).astype(np.int64, copy=False)


def _epoch_order(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """First ``count`` entries of fresh concatenated permutations."""
    if count <= 0:
        # keep the per-epoch draw so epoch boundaries stay aligned
        epoch_permutation(n, rng)
        return np.empty(0, dtype=np.int64)
    parts = [epoch_permutation(n, rng) for _ in range(-(-count // n))]
    return np.concatenate(parts)[:count]


def _ball_args(ball: Ball | None, d: int):
    if ball is None:
        return np.zeros(d), 0.0, False
    return ball.center, ball.radius, True


def run(obj: FiniteSumObjective, region: Region, h: ProxTerm, kind: Algorithm,
        u0: np.ndarray, params: RunParams, backend: str | None = None) -> Trace:
    """Execute ``params.epochs`` epochs of ``kind`` from ``u0``.

    ``u0`` is projected onto the feasible set if needed. Adaptive kinds
    require a bounded region (ball); ``eta`` defaults to its radius. The
    non-adaptive kinds take the smoothness constant from ``beta_override``
    or from the objective; svrg/svrgpp require ``step_size``. Deterministic
    given identical inputs, seed and backend.
    """
    kind = Algorithm(kind)
    u0 = np.asarray(u0, dtype=np.float64).copy()
    if u0.shape != (obj.d,):
        raise ValueError(f"initial point has shape {u0.shape}, expected ({obj.d},)")
    ball = effective_ball(region, h)
    if kind.adaptive and ball is None:
        raise ValueError(f"{kind.value} requires a bounded feasible region")
    if ball is not None:
        u0 = project(ball, u0)

    eta = params.eta if params.eta is not None else (ball.radius if ball else 1.0)
    meta = {
        "epochs": params.epochs,
        "gamma0": params.gamma0,
        "eta": eta,
        "rng": RNG_ID,
        "backend": backend_name(backend),
    }
    trace = Trace(kind.value, kind.option, params.seed, meta)
    trace.entries.append(TraceEntry(0, 0, full_value(obj, u0)))
    if params.epochs == 0:
        return trace

    if kind is Algorithm.ADAVRAG_I and ball is not None:
        D = 2.0 * ball.radius
        if 2.0 * eta * eta <= D * D:
            warnings.warn(
                f"option-I step rule assumes 2 eta^2 > D^2 (eta={eta:g}, D={D:g}); "
                "the run proceeds but the guarantee does not apply",
                RuntimeWarning,
                stacklevel=2,
            )

    rng = np.random.Generator(np.random.PCG64(params.seed))
    B = get_backend(backend)
    ds = obj.dataset
    raw = (ds.indptr, ds.indices, ds.values, ds.labels,
           float(obj.l2_lambda), obj.loss.code, float(obj.loss.delta))
    center, radius, has_ball = _ball_args(ball, obj.d)
    counter = GradCounter()

    if kind in (Algorithm.ADAVRAE, Algorithm.VRAE):
        _run_extragrad(obj, raw, center, radius, has_ball, kind, u0, params,
                       eta, rng, B, counter, trace)
    elif kind in (Algorithm.ADAVRAG_I, Algorithm.ADAVRAG_II, Algorithm.VRAG):
        _run_mirror(obj, raw, center, radius, has_ball, kind, u0, params,
                    eta, rng, B, counter, trace)
    else:
        _run_svrg(obj, raw, center, radius, has_ball, kind, u0, params,
                  rng, B, counter, trace)
    return trace


def _resolve_beta(obj: FiniteSumObjective, params: RunParams) -> float:
    beta = params.beta_override if params.beta_override is not None else smoothness_bound(obj)
    if not beta > 0:
        raise ValueError("smoothness constant must be positive; pass beta_override")
    return beta


def _run_extragrad(obj, raw, center, radius, has_ball, kind, u0, params,
                   eta, rng, B, counter, trace):
    n, d, S = obj.n, obj.d, params.epochs
    adaptive = kind is Algorithm.ADAVRAE
    if adaptive:
        gamma = params.gamma0
    else:
        beta = _resolve_beta(obj, params)
        gamma = 8.0 * beta
        trace.params["beta"] = beta
    sched = AdaVraeSchedule(n)

    xbar = u0.copy()
    z = u0.copy()
    u = u0.copy()
    g_prev = np.empty(d)
    grad_fu = np.empty(d)
    B.full_grad(*raw, u, grad_fu)
    counter.add_full(n)
    g_prev[:] = grad_fu

    dsum_total = 0.0
    min_dgamma = 0.0
    max_infeas = 0.0
    gamma0 = gamma
    for s in range(1, S + 1):
        a, A0 = sched.begin_epoch(s)
        T = sched.epoch_length(s)
        order = _epoch_order(rng, n, T - 1)
        gamma, A, grads, dsum, mind, infeas = B.adavrae_epoch(
            *raw, center, radius, has_ball,
            order, T, a, eta, gamma, A0, adaptive, s < S,
            xbar, z, u, g_prev, grad_fu)
        counter.add(grads)
        sched.end_epoch(A)
        dsum_total += dsum
        min_dgamma = min(min_dgamma, mind)
        max_infeas = max(max_infeas, infeas)
        if s < S:
            u[:] = xbar
            grad_fu[:] = g_prev
        trace.entries.append(TraceEntry(s, counter.count, full_value(obj, xbar)))
    trace.diagnostics.update(
        gamma0=gamma0, gamma_final=gamma, eta=eta, gamma_sq_increments=dsum_total,
        min_gamma_step=min_dgamma, max_infeasibility=max_infeas)


def _run_mirror(obj, raw, center, radius, has_ball, kind, u0, params,
                eta, rng, B, counter, trace):
    n, d, S = obj.n, obj.d, params.epochs
    mode = {Algorithm.ADAVRAG_I: 0, Algorithm.ADAVRAG_II: 1, Algorithm.VRAG: 2}[kind]
    beta = 0.0
    if mode == 2:
        beta = _resolve_beta(obj, params)
        trace.params["beta"] = beta
    sched = AdaVragSchedule(n)

    x = u0.copy()
    u = u0.copy()
    grad_fu = np.empty(d)
    u_accum = np.empty(d)
    gamma = params.gamma0

    dsum_total = 0.0
    min_dgamma = 0.0
    max_infeas = 0.0
    for s in range(1, S + 1):
        a = sched.a(s)
        q = sched.q(s) if mode != 2 else 0.0
        w = vrag_step_weight(a, beta) if mode == 2 else 0.0
        T = sched.epoch_length(s)
        order = _epoch_order(rng, n, T)
        gamma, grads, dsum, mind, infeas = B.adavrag_epoch(
            *raw, center, radius, has_ball,
            order, T, a, q, eta, gamma, mode, w,
            x, u, grad_fu, u_accum)
        counter.add(grads)
        dsum_total += dsum
        min_dgamma = min(min_dgamma, mind)
        max_infeas = max(max_infeas, infeas)
        np.divide(u_accum, T, out=u)
        trace.entries.append(TraceEntry(s, counter.count, full_value(obj, u)))
    trace.diagnostics.update(
        gamma0=params.gamma0, gamma_final=gamma, eta=eta,
        gamma_increments=dsum_total, min_gamma_step=min_dgamma,
        max_infeasibility=max_infeas)


def _run_svrg(obj, raw, center, radius, has_ball, kind, u0, params,
              rng, B, counter, trace):
    n, S = obj.n, params.epochs
    if params.step_size is None or not params.step_size >= 0:
        raise ValueError(f"{kind.value} requires a nonnegative step_size")
    step = float(params.step_size)
    trace.params["step_size"] = step
    t1 = params.svrgpp_t1 if params.svrgpp_t1 is not None else -(-n // 4)

    x = u0.copy()
    u = np.empty(obj.d)
    grad_fu = np.empty(obj.d)
    for s in range(1, S + 1):
        T = svrgpp_epoch_length(s, t1) if kind is Algorithm.SVRGPP else n
        order = _epoch_order(rng, n, T)
        grads = B.svrg_epoch(*raw, center, radius, has_ball, order, T, step,
                             x, u, grad_fu)
        counter.add(grads)
        trace.entries.append(TraceEntry(s, counter.count, full_value(obj, x)))
