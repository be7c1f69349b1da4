"""Feasible regions, projections and proximal steps.

A region is either unconstrained (``None``) or a Euclidean ``Ball``. The
composite term h of the objective is likewise either zero (``None``) or the
indicator of a ball, whose proximal operator is the projection. Every argmin
sub-step of the optimizers reduces to ``combined_prox``:

    argmin_x  a <g, x> + a h(x) + sum_k (w_k / 2) ||x - c_k||^2

which collapses the quadratics into a single one and applies the prox.
All functions here are pure and stateless.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

__all__ = ["Ball", "Region", "ProxTerm", "project", "prox", "combined_prox",
           "diameter", "effective_ball"]


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed Euclidean ball {x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.ascontiguousarray(self.center, dtype=np.float64)
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        if not np.all(np.isfinite(center)):
            raise ValueError("ball center must be finite")
        center.flags.writeable = False
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, x: np.ndarray, slack: float = 0.0) -> bool:
        return float(np.linalg.norm(np.asarray(x) - self.center)) <= self.radius + slack


# None means unconstrained / no composite term.
Region = Optional[Ball]
ProxTerm = Optional[Ball]


def project(region: Region, x: np.ndarray) -> np.ndarray:
    """Euclidean-nearest feasible point; identity when unconstrained."""
    x = np.asarray(x, dtype=np.float64)
    if region is None:
        return x.copy()
    diff = x - region.center
    nrm = float(np.linalg.norm(diff))
    if nrm <= region.radius:
        return x.copy()
    return region.center + diff * (region.radius / nrm)


def prox(term: ProxTerm, v: np.ndarray, t: float) -> np.ndarray:
    """argmin_x t h(x) + 0.5 ||x - v||^2.

    Zero term returns v; a ball indicator projects (independent of t).
    """
    if t < 0:
        raise ValueError("prox scale must be nonnegative")
    if term is None:
        return np.asarray(v, dtype=np.float64).copy()
    return project(term, v)


def combined_prox(term: ProxTerm, g: np.ndarray,
                  quads: Sequence[tuple[float, np.ndarray]], a: float) -> np.ndarray:
    """Minimize a <g, x> + a h(x) + sum_k (w_k/2)||x - c_k||^2 in closed form.

    Equals prox(term, (sum_k w_k c_k - a g) / W, a / W) with W = sum_k w_k.
    Requires at least one quadratic with positive weight.
    """
    if len(quads) == 0:
        raise ValueError("combined_prox needs at least one quadratic term")
    g = np.asarray(g, dtype=np.float64)
    total = 0.0
    acc = -a * g
    for w, c in quads:
        if not w > 0:
            raise ValueError("quadratic weights must be positive")
        total += w
        acc = acc + w * np.asarray(c, dtype=np.float64)
    return prox(term, acc / total, a / total)


def diameter(region: Region) -> float:
    """sup ||x - y|| over feasible pairs; inf when unconstrained."""
    if region is None:
        return float("inf")
    return 2.0 * region.radius


def effective_ball(region: Region, h: ProxTerm) -> Ball | None:
    """The single ball driving every projection, or None when unconstrained.

    The constraint set and a ball-indicator composite term must coincide
    when both are given (their intersection has no closed-form prox).
    """
    if h is not None and region is not None:
        if not (np.array_equal(h.center, region.center) and h.radius == region.radius):
            raise ValueError("composite-term ball and feasible region must coincide")
        return h
    return h if h is not None else region
