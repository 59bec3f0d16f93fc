"""Interchange-based local search for hierarchical clustering.

Build or load a pairwise similarity, grow a hierarchy (random or by
agglomerative linkage), then hill-climb it with interchange moves under the
pairwise revenue objective; every converged tree carries a local-optimality
certificate and is guaranteed at least a third of the best possible revenue.
"""

from .errors import (DataIOError, DegenerateInputError, InputError,
                     InternalInvariantError, MatrixFormatError,
                     StaleMoveError, TreeFormatError)
from .interchange import (InterchangeMove, LocalOptCertificate, MoveVariant,
                          WMatrix, apply_move, best_move, build_w,
                          certify_local_optimality, enumerate_moves,
                          profitable_moves)
from .linkage import agglomerate, build_linkage, ward
from .localsearch import (GREEDY, RANDOM, MultiRunReport, SearchConfig,
                          SearchReport, multi_run, search)
from .objective import (Score, cost, cost_and_revenue, cost_by_pairs,
                        normalized_revenue, revenue, revenue_by_pairs, score)
from .similarity import (AUTO, Dataset, SimilarityMatrix, gaussian_similarity,
                         load_dataset, load_matrix, save_matrix)
from .tree import HcTree, from_merges, parse, random_tree, serialize

__version__ = "0.1.0"

__all__ = [
    "AUTO", "GREEDY", "RANDOM",
    "Dataset", "HcTree", "InterchangeMove", "LocalOptCertificate",
    "MoveVariant", "MultiRunReport", "Score", "SearchConfig", "SearchReport",
    "SimilarityMatrix", "WMatrix",
    "agglomerate", "apply_move", "best_move", "build_linkage", "build_w",
    "certify_local_optimality", "cost", "cost_and_revenue", "cost_by_pairs",
    "enumerate_moves", "from_merges", "gaussian_similarity", "load_dataset",
    "load_matrix", "multi_run", "normalized_revenue", "parse",
    "profitable_moves", "random_tree", "revenue", "revenue_by_pairs",
    "save_matrix", "score", "search", "serialize", "ward",
    "DataIOError", "DegenerateInputError", "InputError",
    "InternalInvariantError", "MatrixFormatError", "StaleMoveError",
    "TreeFormatError",
]
