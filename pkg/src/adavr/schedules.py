"""Epoch coefficient schedules for the accelerated variance-reduced methods.

Both method families split epochs into two phases at

    s0 = ceil(log2 log2 4n)

with doubly-exponential coefficient growth before s0 and polynomial growth
after. The extra-gradient family (adavrae / vrae) additionally carries an
averaging accumulator A across epochs:

    A_0^(s)   = A_end^(s-1) - T_s * a_s^2        (epoch reset)
    A_t^(s)   = A_{t-1}^(s) + a_s + a_s^2        (per iteration)

which must keep a_s^2 < 4 A_0^(s); violating that indicates an invalid
schedule and raises ``ScheduleError``. Powers (4n)^(-0.5^s) are evaluated as
exp(-0.5^s ln 4n) to avoid pow-of-pow precision loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "ScheduleError",
    "s0_of",
    "adavrae_a",
    "adavrae_accum_step",
    "adavrae_accum_epoch_init",
    "adavrag_a",
    "adavrag_q",
    "vrag_step_weight",
    "svrgpp_epoch_length",
    "AdaVraeSchedule",
    "AdaVragSchedule",
    "ADAVRAE_C",
    "ADAVRAG_C",
    "ADAVRAE_A_INIT",
]

ADAVRAE_C = 1.5
ADAVRAG_C = (3.0 + math.sqrt(33.0)) / 4.0
ADAVRAE_A_INIT = 1.25

_INT_GUARD = 1e-12


class ScheduleError(ValueError):
    """A coefficient sequence violated a schedule invariant."""


def s0_of(n: int) -> int:
    """ceil(log2 log2 4n), with values within 1e-12 of an integer snapped down."""
    if n < 1:
        raise ValueError("n must be at least 1")
    v = math.log2(math.log2(4.0 * n))
    nearest = round(v)
    if abs(v - nearest) <= _INT_GUARD:
        return int(nearest)
    return int(math.ceil(v))


def _pow_4n(n: int, s: int) -> float:
    """(4n)^(-0.5^s)."""
    return math.exp(-(0.5 ** s) * math.log(4.0 * n))


def adavrae_a(s: int, n: int) -> float:
    """Extra-gradient coefficient: (4n)^(-0.5^s) up to s0, then linear growth."""
    if s < 1:
        raise ValueError("epoch index must be at least 1")
    s0 = s0_of(n)
    if s <= s0:
        return _pow_4n(n, s)
    return (s - s0 - 1 + ADAVRAE_C) / (2.0 * ADAVRAE_C)


def adavrae_accum_step(A_prev: float, a: float) -> float:
    """A_t = A_{t-1} + a + a^2."""
    return A_prev + a + a * a


def adavrae_accum_epoch_init(A_end_prev: float, a: float, T: int) -> float:
    """Epoch reset A_0 = A_end_prev - T a^2; requires a^2 < 4 A_0."""
    A0 = A_end_prev - T * a * a
    if not (A0 > 0.0 and a * a < 4.0 * A0):
        raise ScheduleError(
            f"invalid schedule: a^2 = {a * a:.6g} must stay below 4 A_0 = {4.0 * A0:.6g}"
        )
    return A0


def adavrag_a(s: int, n: int) -> float:
    """Mirror-descent mixing coefficient, in (0, 1)."""
    if s < 1:
        raise ValueError("epoch index must be at least 1")
    if n < 1:
        raise ValueError("n must be at least 1")
    s0 = s0_of(n)
    if s <= s0:
        return 1.0 - _pow_4n(n, s)
    return ADAVRAG_C / (s - s0 + 2.0 * ADAVRAG_C)


def adavrag_q(s: int, n: int) -> float:
    """Per-epoch acceleration coefficient paired with adavrag_a."""
    a = adavrag_a(s, n)
    s0 = s0_of(n)
    if s <= s0:
        return 1.0 / ((1.0 - a) * a)
    return 8.0 * (2.0 - a) * a / (3.0 * (1.0 - a))


def vrag_step_weight(a: float, beta: float) -> float:
    """Quadratic weight beta (2 - a) a / (1 - a) of the known-smoothness x-step."""
    if not 0.0 < a < 1.0:
        raise ValueError("a must lie in (0, 1)")
    if not beta > 0:
        raise ValueError("beta must be positive")
    return beta * (2.0 - a) * a / (1.0 - a)


def svrgpp_epoch_length(s: int, t1: int) -> int:
    """Doubling epoch lengths T_s = 2^(s-1) T_1 for the svrg++ baseline."""
    if s < 1 or t1 < 1:
        raise ValueError("epoch index and T_1 must be at least 1")
    return t1 << (s - 1)


@dataclass
class AdaVraeSchedule:
    """Coefficient stream for the extra-gradient family; owns the A carry."""

    n: int
    A_end: float = ADAVRAE_A_INIT
    s0: int = field(init=False)

    def __post_init__(self):
        self.s0 = s0_of(self.n)

    @property
    def c(self) -> float:
        return ADAVRAE_C

    def epoch_length(self, s: int) -> int:
        return self.n

    def a(self, s: int) -> float:
        return adavrae_a(s, self.n)

    def begin_epoch(self, s: int) -> tuple[float, float]:
        """(a_s, A_0^(s)); validates the reset invariant."""
        a = self.a(s)
        return a, adavrae_accum_epoch_init(self.A_end, a, self.epoch_length(s))

    def end_epoch(self, A_end: float) -> None:
        self.A_end = A_end


@dataclass
class AdaVragSchedule:
    """Coefficient stream for the mirror-descent family."""

    n: int
    s0: int = field(init=False)

    def __post_init__(self):
        self.s0 = s0_of(self.n)

    @property
    def c(self) -> float:
        return ADAVRAG_C

    def epoch_length(self, s: int) -> int:
        return self.n

    def a(self, s: int) -> float:
        return adavrag_a(s, self.n)

    def q(self, s: int) -> float:
        return adavrag_q(s, self.n)
