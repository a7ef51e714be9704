"""Analysis of bipartite user-object networks with tf-idf edge weighting.

The usual pipeline is::

    g = load_edge_list("data.tsv")          # or southern_women()
    w = tfidf_reweight(g)                   # log base 2 by default
    f = filter_by_threshold(w, 1.0)
    p = project(f, "users")
    part = louvain(p, seed=0)
"""

__version__ = "0.1.0"

from .community import Partition, louvain, modularity
from .distfit import CandidateModel, FitResult, best_fit, compare_models, fit_model
from .errors import (ConvergenceError, DegenerateFitError, EmptyGraphError,
                     InvalidComparisonError, InvalidPartitionError, NodeNotFoundError,
                     ParseError, UndefinedMetricError, UonetError)
from .experiment import (SweepConfig, SweepReport, make_planted_bipartite, random_baseline,
                         run_sweep)
from .graph import (OBJECTS, USERS, BipartiteGraph, ProjectedGraph, average_degrees, degree,
                    degree_sequence, density, projected_density, top_objects)
from .ingest import IngestOptions, load_edge_list, read_edge_list, southern_women
from .projection import co_neighbor_count, project
from .weighting import (compute_tfidf, filter_by_threshold, filter_with_report,
                        inverse_user_frequency, term_frequency, tfidf_reweight)
