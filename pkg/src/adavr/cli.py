"""Command-line interface: run benchmarks, summarize traces, audit, bench.

Exit status is 0 on success and nonzero with a diagnostic on stderr
otherwise (parse errors carry line numbers).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .data import ParseError
from .harness import ExperimentConfig, execute, summarize
from .optimizers import Algorithm
from .problem import LOGISTIC, SQUARED, huber

_LOSSES = {"logistic", "squared", "huber"}


def _loss_from(name: str, delta: float):
    if name == "logistic":
        return LOGISTIC
    if name == "squared":
        return SQUARED
    return huber(delta)


def _read_config_file(path: str) -> dict[str, str]:
    """``key = value`` lines mirroring the flags; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "algo" and "algo" in out:
            out["algo"] += "," + value
        else:
            out[key] = value
    return out


def _pick(flag, config: dict[str, str], key: str, cast, default=None):
    """Flag value if given, else config-file value, else default."""
    if flag is not None:
        return flag
    if key in config:
        return cast(config[key])
    return default


def cmd_run(args) -> int:
    config = _read_config_file(args.config) if args.config else {}
    algos = args.algo or []
    if not algos and "algo" in config:
        algos = [a.strip() for a in config["algo"].split(",") if a.strip()]
    if not algos:
        algos = ["adavrae", "adavrag-i", "adavrag-ii", "vrae", "vrag"]

    data = _pick(args.data, config, "data", str)
    epochs = _pick(args.epochs, config, "epochs", int)
    out = _pick(args.out, config, "out", str)
    if data is None or epochs is None or out is None:
        print("error: --data, --epochs and --out are required (flag or config file)",
              file=sys.stderr)
        return 2
    loss_name = _pick(args.loss, config, "loss", str, "logistic")
    if loss_name not in _LOSSES:
        print(f"error: unknown loss {loss_name!r}", file=sys.stderr)
        return 2

    cfg = ExperimentConfig(
        data=data,
        loss=_loss_from(loss_name, _pick(args.huber_delta, config, "huber-delta", float, 1.0)),
        algorithms=[Algorithm(a) for a in algos],
        epochs=epochs,
        out=out,
        l2_lambda=_pick(args.l2_lambda, config, "lambda", float),
        radius=_pick(args.radius, config, "radius", float, 100.0),
        reps=_pick(args.reps, config, "reps", int, 5),
        base_seed=_pick(args.seed, config, "seed", int, 0),
        gamma0=_pick(args.gamma0, config, "gamma0", float, 0.01),
        eta=_pick(args.eta, config, "eta", float),
        step_size=_pick(args.step, config, "step", float),
        svrgpp_t1=_pick(args.svrgpp_t1, config, "svrgpp-t1", int),
        min_dim=_pick(args.min_dim, config, "min-dim", int, 0),
    )
    path = execute(cfg)
    print(f"wrote {path}")
    return 0


def cmd_summarize(args) -> int:
    path = summarize(args.infile, args.out)
    print(f"wrote {path}")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_all_checks

    failures = 0
    for chk in run_all_checks(seed=args.seed):
        status = "PASS" if chk.passed else "FAIL"
        detail = f"  {chk.detail}" if chk.detail else ""
        print(f"{status} {chk.name}{detail}")
        failures += not chk.passed
    print(f"{'OK' if failures == 0 else 'FAILED'}: {failures} failing check(s)")
    return 0 if failures == 0 else 1


def cmd_bench(args) -> int:
    import numpy as np

    from ._backend import backend_name
    from .data import synth_classification
    from .geometry import Ball
    from .harness import init_point
    from .optimizers import RunParams, run
    from .problem import FiniteSumObjective

    ds = synth_classification(args.n, args.d, seed=args.seed)
    obj = FiniteSumObjective(ds, _loss_from(args.loss, 1.0), 1.0 / ds.n)
    u0 = init_point(ds.d, args.seed)
    ball = Ball(u0, 100.0)
    algo = Algorithm(args.algo)
    params = RunParams(epochs=args.epochs, seed=args.seed, step_size=args.step)

    results = {}
    for backend in ("numba", "numpy"):
        resolved = backend_name(backend)
        start = time.perf_counter()
        trace = run(obj, ball, None, algo, u0, params, backend=backend)
        elapsed = time.perf_counter() - start
        if backend == "numba":  # report steady-state time, not compilation
            start = time.perf_counter()
            trace = run(obj, ball, None, algo, u0, params, backend=backend)
            elapsed = time.perf_counter() - start
        results[backend] = (resolved, elapsed, trace)
        print(f"{backend:>6} ({resolved}): {elapsed:8.3f} s   "
              f"final objective {trace.final_objective:.12g}")

    t_numba = results["numba"][1]
    t_numpy = results["numpy"][1]
    if t_numba > 0:
        print(f"speedup: {t_numpy / t_numba:.1f}x")
    diff = np.max(np.abs(results["numba"][2].objectives()
                         - results["numpy"][2].objectives()))
    print(f"max trace objective difference: {diff:.3g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adavr",
        description="Finite-sum convex optimization benchmarks with adaptive "
                    "accelerated variance-reduced methods.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run algorithms and write a trace CSV")
    p_run.add_argument("--data", help="LIBSVM path (.gz ok) or synth:n,d[,seed]")
    p_run.add_argument("--loss", choices=sorted(_LOSSES))
    p_run.add_argument("--lambda", dest="l2_lambda", type=float,
                       help="ridge weight (default 1/n)")
    p_run.add_argument("--radius", type=float, help="feasible ball radius (default 100)")
    p_run.add_argument("--algo", action="append",
                       choices=[a.value for a in Algorithm],
                       help="repeatable; default: the five adaptive/known-beta methods")
    p_run.add_argument("--epochs", type=int)
    p_run.add_argument("--reps", type=int, help="repetitions (default 5)")
    p_run.add_argument("--seed", type=int, help="base seed (default 0)")
    p_run.add_argument("--gamma0", type=float, help="initial step (default 0.01)")
    p_run.add_argument("--eta", type=float, help="adaptivity scale (default: radius)")
    p_run.add_argument("--step", type=float, help="svrg/svrgpp step size")
    p_run.add_argument("--huber-delta", type=float, help="huber threshold (default 1)")
    p_run.add_argument("--svrgpp-t1", type=int, help="svrgpp first epoch length")
    p_run.add_argument("--min-dim", type=int, help="lower bound on feature dimension")
    p_run.add_argument("--out", help="trace CSV path")
    p_run.add_argument("--config", help="key = value file mirroring the flags")
    p_run.set_defaults(func=cmd_run)

    p_sum = sub.add_parser("summarize", help="aggregate a trace CSV")
    p_sum.add_argument("--in", dest="infile", required=True)
    p_sum.add_argument("--out", required=True)
    p_sum.set_defaults(func=cmd_summarize)

    p_ver = sub.add_parser("verify", help="run the full audit suite")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="compare the numba and numpy backends")
    p_bench.add_argument("--n", type=int, default=2000)
    p_bench.add_argument("--d", type=int, default=50)
    p_bench.add_argument("--epochs", type=int, default=10)
    p_bench.add_argument("--loss", choices=sorted(_LOSSES), default="logistic")
    p_bench.add_argument("--algo", default="adavrag-ii",
                         choices=[a.value for a in Algorithm])
    p_bench.add_argument("--step", type=float, default=0.1,
                         help="step size when benchmarking svrg/svrgpp")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
