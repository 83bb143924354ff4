"""Exact local optima networks for small QAP instances.

Builds the complete weighted directed network of best-improvement local
optima by exhaustive enumeration, generates the two studied instance classes,
filters and symmetrizes the networks, detects communities (greedy, annealed
spin-glass, Markov clustering), and quantifies their statistical significance
against degree-preserving null models.
"""

__version__ = "0.1.0"

from .community import (GREEDY, MCL, SPINGLASS, MclResult, Partition,
                        cross_evaluate, greedy_communities, mcl, modularity,
                        spinglass_communities)
from .errors import ComputeError, ParseError, QaplonError, SizeGuardError
from .generators import (INSTANCE_CLASSES, REAL_LIKE, UNIFORM, GeneratorParams,
                         generate, read_instance, write_instance)
from .graphio import (export_graph, load_lon, load_ulon, lon_from_json,
                      lon_to_json, save_artifact, ulon_from_json, ulon_to_json)
from .lon import (LocalOptimum, Lon, best_improvement, build_lon,
                  global_optimum)
from .qap import (QapInstance, cost, delta_cost, identity_perm, neighbors,
                  perm_rank, perm_unrank, swap, swap_pairs)
from .stats import (AnovaResult, AssortativityReport, NullModelEnsemble,
                    RewireResult, SignificanceResult, fitness_assortativity,
                    null_ensemble, permutation_anova, q_significance,
                    rewire_null, spearman)
from .transform import (DEFAULT_GRID, DensityStats, ThresholdResult,
                        UndirectedLon, density_stats, is_connected,
                        max_connected_threshold, quantile_filter, symmetrize,
                        weight_quantile)

__all__ = [name for name in dir() if not name.startswith("_")]
