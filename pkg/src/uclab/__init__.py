"""Exact oracles, lower-bound constructions, and experiments for uniform convergence of halfspaces."""
from .errors import (ConfigError, ConstructionInfeasible, EmptyBand, InvalidArgument,
                     InvalidDistribution, InvalidInput, UndefinedEmpiricalError)
from .constants import DEFAULT as DEFAULT_CONSTANTS, Constants
from .geometry import (Angle, BlockLabeling, Closure, InhomHalfspace, Label, Openness, Semicircle,
                       StructuredSupport, WedgeKind, WedgeSpec, angle_from_turns, build_support,
                       halfspace_classify, realize_labeling, semicircle_classify, wedge_contains)
from .distributions import (LabeledAtom, LabeledDist, Mode, Sample, empirical_error, label_by_target,
                            load_dist, make_dist, sample_n, save_dist, true_error, uniform_circle,
                            uniform_structured)
from .oracles2d import (CriticalRadii, DeviationReport, VersionSpaceIndex, critical_radii,
                        sup_deviation, uniform_grid_worst_error, worst_consistent_error)
from .bounds import (BinomQuery, BoundKind, Side, binom_tail, bound_value, delta_schedule,
                     paley_zygmund_check, reverse_chernoff_check)
from .adversary import (DyadicConstruction, TrialOutcome, lemma8_audit, thm2_params, thm2_trial,
                        thm3_params, thm3_trial, thm7_construct, thm7_trial)
from .harness import (ExperimentConfig, ModelComparison, Summary, fit_rate, run_trials,
                      wilson_interval)
from .kernels import BACKEND

__version__ = "0.1.0"
