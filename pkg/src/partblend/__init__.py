"""Part-based 3D shape retrieval over light-field descriptor manifolds."""

from .descriptor import (
    FULL_LENGTH,
    VIEW_LENGTH,
    HogConfig,
    LightFieldDescriptor,
    ViewDescriptor,
    hog_cells,
    part_descriptor,
    shape_distance,
    view_descriptor,
)
from .geometry import (
    CHAIR_LABELS,
    Mesh,
    NormalizationTransform,
    PartLabeledMesh,
    load_mesh,
    normalize,
    save_mesh_json,
    split_parts,
)
from .index_store import (
    ExternalEmbedding,
    ExternalTable,
    IndexConfig,
    ShapeIndex,
    build_index,
    ingest_external,
    load_index,
    save_index,
)
from .manifold import (
    DistanceMatrix,
    PartManifold,
    SammonConfig,
    SammonEmbedding,
    build_distance_matrix,
    build_manifold,
    collapse_duplicates,
    normalize_manifold,
    out_of_sample_embed,
    project_2d,
    sammon_gradient,
    sammon_stress,
)
from .rasterizer import (
    SilhouetteImage,
    Viewpoint,
    dodecahedron_viewpoints,
    render_all,
    render_silhouette,
)
from .retrieval import (
    BlendQuery,
    PartPick,
    RankedResult,
    blend_retrieve,
    knn_part,
    query_from_json,
    resolve_pick,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
