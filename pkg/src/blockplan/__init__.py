"""Physical effort and risk models for block-construction tasks.

Effort is the kinetic energy spent moving blocks from a start scene into a
target structure; risk is the chance the target falls when its blocks are
placed imprecisely.  A linear model of both predicts how hard people judge
a build to be.
"""

from .analysis import (BootstrapReport, GridResult, HumanDataset, ModelFit, bootstrap_compare,
                       default_grid, fit_all, fit_effort_only, fit_full, fit_risk_only,
                       grid_search_datasets, grid_search_sigma, grid_search_table, parse_grid,
                       zscore_and_average)
from .assign import Assignment, assign_blocks
from .errors import (BlockplanError, CapacityError, EmptyDatasetError, InfeasibleError,
                     OverConstrainedError, PlanningError, SceneParseError, SimulationError,
                     SingularFitError, ValidationError)
from .physics import SimConfig, SimOutcome, simulate, static_stable
from .pipeline import SuiteResult, TrialResult, read_table, run_suite, run_trial
from .risk import RiskEstimate, estimate_risk, perturb_scene
from .scene import (Block, BucketTemplate, Scene, ScatterTemplate, SupportGraph, TrialSpec,
                    extract_support_graph, load_scene, load_trials, sample_bucket_trial,
                    sample_scattered_state, save_scene, save_trials, validate_scene)
from .stimuli import build_suite, load_suite
from .symplan import SymbolicPlan, check_prefix, execute_plan, plan_symbolic
from .trajectory import EffortEstimate, Trajectory, estimate_effort, plan_transport

__version__ = "0.1.0"
