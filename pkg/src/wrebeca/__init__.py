"""Explicit-state verification toolkit for wRebeca models of MANETs.

Parse actor-based network models, generate their state spaces under all
admissible topologies (full, counter-abstracted, or tau-eliminated),
check invariants on the fly, validate the reductions by bisimulation
checking, and exchange LTSs in the Aldebaran format.
"""

from .equivalence import branching_bisim_equivalent, strong_bisim_equivalent
from .errors import (ExplorationLimitExceeded, ModelRuntimeError, ParseError,
                     StaticTopologyRequired, StepBudgetExceeded, WrebecaError)
from .explorer import (Clts, Limits, Lts, Trace, add_monitor_selfloops,
                       check_invariant_on_the_fly,
                       explore_counter_abstraction, explore_full,
                       explore_tau_eliminated, reexpand_clts)
from .export import read_aldebaran, write_aldebaran, write_trace
from .invariants import (InvariantConfigError, LoopFreedomSpec,
                         PredicateSpec, StepMonotoneSpec, eval_loop_freedom,
                         eval_predicate, check_step_monotone, parse_invariant)
from .parser import parse_constraint, parse_model
from .semantics import (Environment, GlobalState, ModelRuntime, eval_expr,
                        exec_block, exec_comm, handle_message, mov)
from .syntax import Model, format_model
from .topology import (EquivClassPartition, Topology, enumerate_valid,
                       equivalence_classes, is_static, satisfies)
from .wellformed import Violation, check_well_formed

__version__ = "1.0.0"

__all__ = [
    "branching_bisim_equivalent", "strong_bisim_equivalent",
    "ExplorationLimitExceeded", "ModelRuntimeError", "ParseError",
    "StaticTopologyRequired", "StepBudgetExceeded", "WrebecaError",
    "Clts", "Limits", "Lts", "Trace", "add_monitor_selfloops",
    "check_invariant_on_the_fly", "explore_counter_abstraction",
    "explore_full", "explore_tau_eliminated", "reexpand_clts",
    "read_aldebaran", "write_aldebaran", "write_trace",
    "InvariantConfigError", "LoopFreedomSpec", "PredicateSpec",
    "StepMonotoneSpec", "eval_loop_freedom", "eval_predicate",
    "check_step_monotone", "parse_invariant",
    "parse_constraint", "parse_model",
    "Environment", "GlobalState", "ModelRuntime", "eval_expr",
    "exec_block", "exec_comm", "handle_message", "mov",
    "Model", "format_model",
    "EquivClassPartition", "Topology", "enumerate_valid",
    "equivalence_classes", "is_static", "satisfies",
    "Violation", "check_well_formed",
]
