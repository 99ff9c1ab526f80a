"""Exploration paths, branching forests, and the local-time identities
coupling them.

The package samples continuous-time binary branching forests and their
piecewise-linear exploration paths, converts each representation into the
other exactly, computes level local times in closed form, and ships
verification experiments for the exact discrete coupling and for the
diffusion-limit statements.
"""

from gwexplore._core import BACKEND, HAVE_SPEEDUPS
from gwexplore.bijection import forest_to_path, path_to_forest
from gwexplore.diagnostics import (ExperimentReport, MomentSummary, StatRow,
                                   feller_convergence_report, ks_two_sample,
                                   martingale_diagnostic, moment_report,
                                   run_replicated, verify_discrete_rk,
                                   verify_excision, verify_law_equality,
                                   verify_rk_limit)
from gwexplore.errors import (GwExploreError, ResourceLimitError,
                              ValidationError)
from gwexplore.paths import (ExplorationPath, LevelStepFunction,
                             LocalTimeProfile, ceiling_local_time,
                             crossing_count, excise_above, local_time,
                             local_time_profile, midpoint_levels,
                             occupation_integral, read_path, tau,
                             write_path)
from gwexplore.samplers import (FellerPath, RateParams, RenormParams,
                                feller_values_at, population_values_at,
                                renormalized_crossings, sample_feller,
                                sample_forest, sample_path,
                                sample_population,
                                sample_renormalized_path)
from gwexplore.trees import (Forest, PopulationTrajectory, TreeNode,
                             alive_count, build_forest, extinction_time,
                             read_forest, total_individuals, trajectory,
                             write_forest)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "HAVE_SPEEDUPS",
    "GwExploreError",
    "ValidationError",
    "ResourceLimitError",
    "ExplorationPath",
    "LocalTimeProfile",
    "LevelStepFunction",
    "crossing_count",
    "local_time",
    "ceiling_local_time",
    "local_time_profile",
    "midpoint_levels",
    "occupation_integral",
    "tau",
    "excise_above",
    "write_path",
    "read_path",
    "TreeNode",
    "Forest",
    "PopulationTrajectory",
    "build_forest",
    "alive_count",
    "trajectory",
    "extinction_time",
    "total_individuals",
    "write_forest",
    "read_forest",
    "path_to_forest",
    "forest_to_path",
    "RateParams",
    "RenormParams",
    "FellerPath",
    "sample_path",
    "sample_forest",
    "sample_population",
    "population_values_at",
    "sample_renormalized_path",
    "renormalized_crossings",
    "sample_feller",
    "feller_values_at",
    "MomentSummary",
    "StatRow",
    "ExperimentReport",
    "moment_report",
    "ks_two_sample",
    "run_replicated",
    "verify_discrete_rk",
    "verify_law_equality",
    "verify_excision",
    "martingale_diagnostic",
    "verify_rk_limit",
    "feller_convergence_report",
]
