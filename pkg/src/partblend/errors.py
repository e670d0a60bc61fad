"""Exception types shared across the package."""


class PartBlendError(Exception):
    """Base class for all package errors."""


class ParseError(PartBlendError):
    """Input file could not be parsed."""


class LabelError(PartBlendError):
    """A face has a missing or unknown part label."""


class EmptyMeshError(PartBlendError):
    """Mesh has no faces."""


class DegenerateError(PartBlendError):
    """Geometry is degenerate (e.g. all vertices coincident)."""


class ResolutionError(PartBlendError):
    """Requested raster resolution is too small."""


class GridError(PartBlendError):
    """HoG cell grid does not fit the image."""


class ArityError(PartBlendError):
    """Wrong number of items (e.g. not exactly 20 view images)."""


class SizeError(PartBlendError):
    """Too few points for the requested operation."""


class SingularError(PartBlendError):
    """Zero off-diagonal distance where the objective is singular."""


class EmptyManifoldError(PartBlendError):
    """Manifold has no anchor points."""


class UnknownPartError(PartBlendError):
    """Query names a part not in the label set."""


class UnknownSourceError(PartBlendError):
    """Query pick references an unknown shape or embedding id."""


class EmptyIndexError(PartBlendError):
    """Query against an index with no shapes."""


class DimensionError(PartBlendError):
    """Coordinate vector does not match the manifold dimension."""


class ParamError(PartBlendError):
    """Procedural generation parameter out of range."""


class MissingGroundTruthError(PartBlendError):
    """Evaluation case references a shape absent from the index."""


class ConfigError(PartBlendError):
    """Index configuration fingerprint mismatch."""


class VersionError(PartBlendError):
    """Index file version not supported."""


class CorruptionError(PartBlendError):
    """Index file failed checksum or structural validation."""


class DuplicateIdError(PartBlendError):
    """External embedding id already registered."""


class ConvergenceWarning(UserWarning):
    """Optimizer stopped at the iteration cap before reaching tolerance."""
