"""Exact graph distance parameters via separator recursion and range trees."""

from .cover_distances import (
    CoverTooLargeError,
    HTable,
    VcCounters,
    VertexCover,
    compute_h,
    ecc_fast_vc,
    ecc_wiener_vc,
    find_vertex_cover,
    is_vertex_cover,
)
from .decomposition import (
    SkewSeparatorNode,
    SkewSeparatorTree,
    TreeDecomposition,
    Violation,
    heuristic_td,
    parse_td,
    prepare_sst,
    skew_separator_tree,
    validate_sst,
    validate_td,
)
from .graph import (
    UNREACHABLE,
    DisconnectedGraphError,
    DistanceOverflowError,
    DistanceReport,
    DistanceRow,
    Graph,
    ParseError,
    add_shortcut_clique,
    bfs,
    check_connected,
    dijkstra,
    distance_rows,
    induced_subgraph,
    parse_graph,
)
from .generators import SplitMix64, gen_partial_ktree, gen_planted_cover, gen_points
from .oracle import apsp_oracle, range_query_oracle, report_oracle
from .rangetree import (
    COUNT_SUM,
    MAX_DISTANCE,
    NEG_INFINITY,
    POS_INFINITY,
    BoundViolationError,
    CountSum,
    MaxDistance,
    Monoid,
    Point,
    QueryBox,
    RangeTree,
    aggregate,
    batch_query,
    binomial_bound,
    build,
    canonical_structure_size,
    ceil_log2,
    construction_bound,
    fold_box_batches,
    query,
    query_visit_bound,
)
from .separator_distances import (
    TwRunCounters,
    VisitingEccTable,
    combine_visiting,
    distance_report_tw,
    eccentricities_tw,
    visiting_eccentricities,
    wiener_tw,
)

__version__ = "0.1.0"
