"""Circular split networks: split combinatorics, metric tests, polygon
twists, the network fan and the Catalan-coordinate embedding of the real
genus-zero moduli space.
"""

from .associahedron import AssocFace, catalan, face_vertices, faces, flags, subflags
from .errors import (
    AmbientMismatch,
    CapacityError,
    ConsistencyError,
    DecodeError,
    IllegalTwist,
    IncompatibleSplits,
    InfeasibleFit,
    MalformedMatrix,
    MalformedPartition,
    RepresentationError,
    SplitIndexError,
    SplitSpaceError,
)
from .metrics import (
    DissimilarityMatrix,
    find_kalmanson_ordering,
    four_point_check,
    kalmanson_check,
    metric_from_network,
    recover_split_weights,
)
from .moduli import (
    EmbeddedPoint,
    ModuliPoint,
    decode,
    flag_simplex_dim,
    glue_moduli,
    phi_face,
    phi_point,
    phi_vertex,
)
from .polygon import PolygonRep, Twist, compatible_orderings, polygon_from, twist, twist_sequence
from .space import (
    NetworkPoint,
    census,
    chambers,
    classify_cell,
    complete_one_skeleton,
    delta,
    empty_triangle_witness,
    link_cells,
    max_shared_face_dim,
)
from .splits import (
    CircularOrdering,
    Split,
    SplitSystem,
    WeightedSplitSystem,
    buneman_tree,
    canonicalize,
    is_circular,
    pairwise_compatible,
)

__version__ = "0.1.0"
