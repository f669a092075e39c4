"""Shifted operator logarithms of evolution families and the checks built on them."""

__version__ = "0.1.0"

from .linalg import (EigenDecomposition, EigenError, ExpmOverflowError, SingularMatrixError,
                     commutator, eig, eigfunc, expm, inv, matmul, opnorm, solve)
from .contour import (BranchError, Contour, ContourError, KappaChoice, LogRep, build_contour,
                      dunford_apply, dunford_log, enclosing_contours, select_kappa)
from .evolution import (EvolutionFamily, GeneratorSpec, IntervalError, RegularizedEvolution,
                        SemigroupResiduals, alternative_generator, check_modified_semigroup,
                        evolve, exp_series, family_from_dict, inverse_relation_residual,
                        load_family, positive_families, recover_generator,
                        regularized_evolution, shipped_families, structure_decomposition)
from .cauchy import (CauchyProblem, MildParts, SolutionTrace, holomorphy_probe,
                     mild_decomposition, rk4_oracle, solve_autonomous, solve_nonautonomous)
from .heat import (BurgersField, Field1D, HeatSetup, PositivityError, SidewaysResult,
                   WindowError, burgers_residual, cole_hopf, decaying_waves, derivative_apply,
                   fractional_power_apply, heat_evolve_t, heat_evolve_x, miura_compose,
                   resolvent_bound_probe, sideways_symbol)
from .module_algebra import (CommutationError, CommutingSet, KappaFloorError, ShiftedLogElement,
                             branch_certificate, module_action, product_perturbation_rep,
                             shifted_log, shifted_logs, strong_continuity_probe,
                             sum_commuting_families, sum_same_family)
from .rotation import (RotationOp, SpinRep, bch_defect, build_spin_rep,
                       collective_renormalization, rotation_log_rep, sum_decomposition_check)
from .reports import (ReportRecord, emit_csv_field, instance_rng, read_csv_field, read_report,
                      write_report)
from .estimators import OperatorLogTransformer

__all__ = [
    "EigenDecomposition", "EigenError", "ExpmOverflowError", "SingularMatrixError",
    "commutator", "eig", "eigfunc", "expm", "inv", "matmul", "opnorm", "solve", "BranchError",
    "Contour", "ContourError", "KappaChoice", "LogRep", "build_contour", "dunford_apply",
    "dunford_log", "enclosing_contours", "select_kappa", "EvolutionFamily", "GeneratorSpec",
    "IntervalError", "RegularizedEvolution", "SemigroupResiduals", "alternative_generator",
    "check_modified_semigroup", "evolve", "exp_series", "family_from_dict",
    "inverse_relation_residual", "load_family", "positive_families", "recover_generator",
    "regularized_evolution", "shipped_families", "structure_decomposition", "CauchyProblem",
    "MildParts", "SolutionTrace", "holomorphy_probe", "mild_decomposition", "rk4_oracle",
    "solve_autonomous", "solve_nonautonomous", "BurgersField", "Field1D", "HeatSetup",
    "PositivityError", "SidewaysResult", "WindowError", "burgers_residual", "cole_hopf",
    "decaying_waves", "derivative_apply", "fractional_power_apply", "heat_evolve_t",
    "heat_evolve_x", "miura_compose", "resolvent_bound_probe", "sideways_symbol",
    "CommutationError", "CommutingSet", "KappaFloorError", "ShiftedLogElement",
    "branch_certificate", "module_action", "product_perturbation_rep", "shifted_log",
    "shifted_logs", "strong_continuity_probe", "sum_commuting_families", "sum_same_family",
    "RotationOp", "SpinRep", "bch_defect", "build_spin_rep", "collective_renormalization",
    "rotation_log_rep", "sum_decomposition_check", "ReportRecord", "emit_csv_field",
    "instance_rng", "read_csv_field", "read_report", "write_report", "OperatorLogTransformer",
]
