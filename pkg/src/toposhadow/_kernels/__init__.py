"""Hot-kernel backend selection.

The compiled Cython core is preferred when it was built; otherwise the
pure numpy twins take over.  Both produce bit-identical results, so the
choice only affects speed.  Override with TOPOSHADOW_KERNELS=pure or
=compiled (the latter raises if the extension is missing).
"""

import os

from . import _pure

_requested = os.environ.get("TOPOSHADOW_KERNELS", "auto")
if _requested not in ("auto", "compiled", "pure"):
    raise ValueError(
        f"TOPOSHADOW_KERNELS={_requested!r}: expected auto, compiled or pure"
    )

if _requested == "pure":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _pure
        BACKEND = "pure"

correlate1d_replicate = _impl.correlate1d_replicate
thin_points = _impl.thin_points
rips_triangles = _impl.rips_triangles
occurrence_counts = _impl.occurrence_counts


def get_backend(name="auto"):
    """Return the module implementing the given backend name."""
    if name in ("auto", BACKEND):
        return _impl
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
