"""Experiment orchestration: repetitions, CSV traces and summaries.

``execute`` repeats the configured runs: each repetition draws one initial
point, centers the feasible ball on it, and runs every algorithm from that
same point with the repetition's seed. Rows land in a CSV sorted by
(algorithm, rep, epoch) and written atomically; numeric fields carry 17
significant digits so re-reading round-trips exactly.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import load_libsvm, synth_classification
from .geometry import Ball
from .optimizers import Algorithm, RunParams, run
from .problem import FiniteSumObjective, LabeledDataset, LossKind

__all__ = ["ExperimentConfig", "CSV_HEADER", "SUMMARY_HEADER",
           "init_point", "execute", "summarize", "load_any"]

CSV_HEADER = ["algorithm", "option", "rep", "seed", "epoch",
              "grads", "grads_over_n", "objective"]
SUMMARY_HEADER = ["algorithm", "option", "epoch",
                  "mean_grads_over_n", "mean_objective", "ci_low", "ci_high"]


@dataclass
class ExperimentConfig:
    """One benchmark invocation; mirrors the CLI flags."""

    data: str
    loss: LossKind
    algorithms: list[Algorithm]
    epochs: int
    out: str | Path
    l2_lambda: float | None = None
    radius: float = 100.0
    reps: int = 5
    base_seed: int = 0
    gamma0: float = 0.01
    eta: float | None = None
    step_size: float | None = None
    svrgpp_t1: int | None = None
    min_dim: int = 0
    # per-algorithm RunParams field overrides, e.g. {Algorithm.SVRG: {"step_size": 0.1}}
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")

    def params_for(self, algo: Algorithm, seed: int) -> RunParams:
        kwargs = dict(epochs=self.epochs, gamma0=self.gamma0, eta=self.eta,
                      step_size=self.step_size, seed=seed,
                      svrgpp_t1=self.svrgpp_t1)
        kwargs.update(self.overrides.get(Algorithm(algo), {}))
        return RunParams(**kwargs)


def init_point(d: int, seed: int) -> np.ndarray:
    """Initial point with coordinates uniform on [0, 10]."""
    if d < 1:
        raise ValueError("d must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.uniform(0.0, 10.0, size=d)


def load_any(source: str, min_dim: int = 0) -> LabeledDataset:
    """Load ``synth:n,d[,seed]`` or a LIBSVM path (``.gz`` accepted)."""
    if source.startswith("synth:"):
        parts = source[len("synth:"):].split(",")
        if len(parts) not in (2, 3):
            raise ValueError("synthetic source must be synth:n,d or synth:n,d,seed")
        n, d = int(parts[0]), int(parts[1])
        seed = int(parts[2]) if len(parts) == 3 else 0
        return synth_classification(n, d, seed)
    ds, _ = load_libsvm(source, min_dim=min_dim)
    return ds


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_atomic(path: str | Path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def execute(config: ExperimentConfig) -> Path:
    """Run the experiment and write its trace CSV; returns the output path."""
    ds = load_any(config.data, config.min_dim)
    lam = config.l2_lambda if config.l2_lambda is not None else 1.0 / ds.n
    obj = FiniteSumObjective(ds, config.loss, lam)

    rows = []
    for rep in range(config.reps):
        seed = config.base_seed + rep
        u0 = init_point(ds.d, seed)
        ball = Ball(u0, config.radius)
        for algo in config.algorithms:
            trace = run(obj, ball, None, algo, u0, config.params_for(algo, seed))
            for e in trace.entries:
                rows.append((algo.value, algo.option, rep, seed, e.epoch,
                             e.grads, e.grads / ds.n, e.objective))
    rows.sort(key=lambda r: (r[0], r[2], r[4]))
    out_rows = [(r[0], r[1], r[2], r[3], r[4], r[5], _fmt(r[6]), _fmt(r[7]))
                for r in rows]
    return _write_atomic(config.out, CSV_HEADER, out_rows)


def summarize(in_path: str | Path, out_path: str | Path) -> Path:
    """Aggregate a trace CSV into per-(algorithm, epoch) means and 95% CIs.

    The interval is the normal approximation mean +- 1.96 sd / sqrt(reps),
    with sd = 0 when there is a single repetition.
    """
    groups: dict[tuple[str, str, int], tuple[list[float], list[float]]] = {}
    with open(in_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected trace header {reader.fieldnames}")
        for row in reader:
            key = (row["algorithm"], row["option"], int(row["epoch"]))
            gg, oo = groups.setdefault(key, ([], []))
            gg.append(float(row["grads_over_n"]))
            oo.append(float(row["objective"]))

    out_rows = []
    for (algo, option, epoch) in sorted(groups):
        gg, oo = groups[(algo, option, epoch)]
        reps = len(oo)
        mean_obj = sum(oo) / reps
        sd = math.sqrt(sum((v - mean_obj) ** 2 for v in oo) / (reps - 1)) if reps > 1 else 0.0
        half = 1.96 * sd / math.sqrt(reps)
        out_rows.append((algo, option, epoch, _fmt(sum(gg) / reps),
                         _fmt(mean_obj), _fmt(mean_obj - half), _fmt(mean_obj + half)))
    return _write_atomic(out_path, SUMMARY_HEADER, out_rows)
