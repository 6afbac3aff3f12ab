"""Exception hierarchy shared by all neuroseg modules."""


class NeurosegError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(NeurosegError, ValueError):
    """Invalid argument or malformed request."""


class RangeError(NeurosegError, IndexError):
    """Index or coordinate outside the valid range."""


class FormatError(NeurosegError, ValueError):
    """File does not conform to the expected format."""


class UnsupportedDtypeError(FormatError):
    """Datatype code present in the file is not supported."""


class UnsupportedEncodingError(FormatError):
    """Data encoding present in the file is not supported."""


class TruncationError(FormatError):
    """File ends before the expected amount of voxel data."""

    def __init__(self, expected: int, actual: int):
        super().__init__(
            f"truncated data: expected {expected} bytes, got {actual}"
        )
        self.expected = expected
        self.actual = actual


class DegenerateAffineError(ValidationError):
    """Affine matrix is singular."""


class DegenerateOrientationError(ValidationError):
    """Affine axis directions are too ambiguous to name."""


class DegenerateSegmentError(ValidationError):
    """Two measurement points coincide."""


class UnimodalInputError(ValidationError):
    """Histogram has fewer than two occupied bins; no threshold exists."""


class EmptyExtractionError(NeurosegError):
    """Brain extraction produced an empty mask; try a lower offset."""


class EmptyEndpointError(ValidationError):
    """An interpolation endpoint slice contains no pixel of the label."""


class NothingToFillError(ValidationError):
    """No intermediate slices exist between the two endpoints."""


class CorruptArchiveError(NeurosegError):
    """Project archive is unreadable or missing its manifest."""


class VersionError(NeurosegError):
    """Project archive was written by a newer format version."""


class IntegrityError(NeurosegError):
    """Stored content hash does not match the referenced data."""


class MissingVolumeError(NeurosegError):
    """Referenced source volume could not be found."""

    def __init__(self, sha256: str, path: str):
        super().__init__(
            f"source volume not found at '{path}' (sha256 {sha256})"
        )
        self.sha256 = sha256
        self.path = path
