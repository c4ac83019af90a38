"""Semi-external k-core decomposition and maintenance for disk-resident graphs."""

from .decomp import (
    CoreState,
    RunReport,
    compute_cnt,
    decompose_star,
    im_core,
    local_core,
    semi_core,
    semi_core_plus,
    semi_core_star,
    update_nbr_cnt,
    update_range,
)
from .errors import (
    DuplicateEdgeError,
    GraphError,
    InputError,
    MissingEdgeError,
    NodeRangeError,
    SelfLoopError,
    StorageError,
    StreamError,
)
from .maintain import (
    MaintainReport,
    NodeStatus,
    apply_stream,
    compute_cnt_star,
    semi_delete_star,
    semi_insert,
    semi_insert_star,
)
from .store import DiskGraph, IoAccountant, IoStats, UpdateBuffer, build_from_edge_list, build_from_edges
from .verify import brute_force_core, compare_cores, gen_random_graph, record_trace, sample_graph_g9

__version__ = "0.1.0"
