"""Exception types shared across the package.

Kept in one place so the CLI can map each failure class to a distinct
exit code (I/O errors are plain OSError and need no class here).
"""


class FormatError(ValueError):
    """Malformed input data: bad PGM header, label sidecar, config file, ..."""


class TriangleCapError(RuntimeError):
    """Triangle enumeration aborted because the safety cap was exceeded."""

    def __init__(self, cap):
        super().__init__(
            f"triangle count exceeded the safety cap of {cap}; "
            "the point cloud is pathologically dense"
        )
        self.cap = cap
