"""Adaptive accelerated variance-reduced methods for finite-sum convex problems.

Implements two adaptive accelerated families (extra-gradient and mirror
descent flavored, with smoothness-free step rules), their known-smoothness
variants, and svrg baselines, together with dataset ingestion, a benchmark
harness and an independent verification suite.
"""

from ._backend import backend_name, get_backend
from .data import (ParseError, ParseReport, dumps_libsvm, load_libsvm,
                   parse_libsvm, synth_classification)
from .geometry import Ball, combined_prox, diameter, effective_ball, project, prox
from .harness import ExperimentConfig, execute, init_point, summarize
from .optimizers import (Algorithm, GradCounter, RunParams, Trace, TraceEntry,
                         epoch_permutation, run)
from .problem import (LOGISTIC, SQUARED, FiniteSumObjective, LabeledDataset,
                      LossKind, component_grad, component_value, full_grad,
                      full_value, huber, smoothness_bound, vr_gradient)
from .schedules import (AdaVraeSchedule, AdaVragSchedule, ScheduleError,
                        adavrae_a, adavrae_accum_epoch_init, adavrae_accum_step,
                        adavrag_a, adavrag_q, s0_of, svrgpp_epoch_length,
                        vrag_step_weight)
from .verify import (AuditCheck, ReferenceSolution, fd_check,
                     reference_solution, run_all_checks, schedule_audit,
                     vr_check)

__version__ = "0.1.0"
