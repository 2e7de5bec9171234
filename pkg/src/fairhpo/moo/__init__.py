"""Multi-objective engine: Pareto machinery, hypervolume indicators, and
the NSGA-II / NSGA-III optimizers."""

from fairhpo.moo.hypervolume import (HvSpec, hv_monte_carlo, hypervolume_exact,
                                     normalized_hypervolume)
from fairhpo.moo.nsga import (Archive, EvalContext, EvalRecord,
                              ReferenceDirectionSet, das_dennis,
                              default_partitions, derive_eval_seed, run_nsga2,
                              run_nsga3)
from fairhpo.moo.pareto import (crowding_distance, dominates,
                                non_dominated_sort, pareto_front_indices,
                                ranks_of)

__all__ = [
    "Archive", "EvalContext", "EvalRecord", "HvSpec", "ReferenceDirectionSet",
    "crowding_distance", "das_dennis", "default_partitions", "derive_eval_seed",
    "dominates", "hv_monte_carlo", "hypervolume_exact", "non_dominated_sort",
    "normalized_hypervolume", "pareto_front_indices", "ranks_of", "run_nsga2",
    "run_nsga3",
]
