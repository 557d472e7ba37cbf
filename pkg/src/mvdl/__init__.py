"""Workbench for many-valued coalgebraic dynamic logics."""

from .algebra import (
    Algebra,
    algebra_by_name,
    build_builtin,
    derive_residuum,
    is_chi_definable,
    is_semiprimal,
    unary_term_closure,
    validate_flew,
)
from .actions import OperationSpec, TestSpec, apply_op, apply_test, kleisli_star
from .functors import Kind, enumerate_fvalues, functor_ops
from .harness import (
    Verdict,
    bounded_entailment,
    check_invariance,
    check_safety,
    check_separation,
    is_morphism,
    one_step_witness,
    verify_reduction_rule,
    verify_registry,
)
from .jsonio import config_from_json, config_to_json, model_from_json, model_to_json
from .presets import make_preset
from .reduction import ReductionRule, RuleRegistry, builtin_rules, reduce_full, reduce_step
from .semantics import (
    EvalSession,
    LiftingSpec,
    LogicConfig,
    Model,
    apply_lifting,
    eval_formula,
    interpret_action,
)
from .syntax import Signature, Template, instantiate, parse, render

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "Kind",
    "LiftingSpec",
    "LogicConfig",
    "Model",
    "OperationSpec",
    "ReductionRule",
    "RuleRegistry",
    "EvalSession",
    "Signature",
    "Template",
    "TestSpec",
    "Verdict",
    "algebra_by_name",
    "apply_lifting",
    "apply_op",
    "apply_test",
    "bounded_entailment",
    "build_builtin",
    "builtin_rules",
    "check_invariance",
    "check_safety",
    "check_separation",
    "config_from_json",
    "config_to_json",
    "derive_residuum",
    "enumerate_fvalues",
    "eval_formula",
    "functor_ops",
    "instantiate",
    "interpret_action",
    "is_chi_definable",
    "is_morphism",
    "is_semiprimal",
    "kleisli_star",
    "make_preset",
    "model_from_json",
    "model_to_json",
    "one_step_witness",
    "parse",
    "reduce_full",
    "reduce_step",
    "render",
    "unary_term_closure",
    "validate_flew",
    "verify_reduction_rule",
    "verify_registry",
]
