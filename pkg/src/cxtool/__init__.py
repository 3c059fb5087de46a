"""Square complexes, their simplexification, and local curvature checks.

Square complexes are checked for nonpositive curvature and VH structure;
VH complexes are subdivided into Delta complexes whose vertex links are
checked for local 6-largeness.  Homology, fundamental group presentations
and finite covers serve as cross-checks.
"""
from .complexes import (
    DeltaComplex,
    LinkComplex,
    LinkGraph,
    SquareComplex,
    components,
    delta_vertex_link,
    euler_characteristic,
    iterated_face,
    simplex_link,
    square_vertex_link,
    validate_delta_complex,
    validate_square_complex,
)
from .curvature import (
    Certificate,
    Verdict,
    VHPartition,
    check_flag,
    check_locally_6_large,
    check_npc,
    check_simple,
    check_vh_partition,
    chordless_cycle_search,
    detect_vh,
    link_girth,
    short_cycle_search,
    verify_certificate,
)
from .fundamental import (
    EdgeLabeling,
    Presentation,
    abelianization,
    enumerate_z2_covers,
    finite_cover,
    pi1_presentation,
)
from .homology import IntegerMatrix, boundary_matrices, homology_groups, smith_normal_form
from .simplexify import (
    CombinatorialMap,
    SimplicialMap,
    Subdivision,
    induced_map,
    simplexify,
    triangulate_vh,
    verify_center_link,
    verify_link_suspension,
)

__version__ = "0.1.0"
