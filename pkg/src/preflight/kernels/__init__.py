"""Numeric kernels for continuous-time conflict detection.

The compiled extension (``_speedups``, Cython) is preferred; the
pure-Python twin (``_pure``) is selected when the extension is missing or
when the environment variable PREFLIGHT_PURE_KERNELS=1 is set. Both
implementations are exercised against each other in the test suite.
"""

import os

if os.environ.get("PREFLIGHT_PURE_KERNELS") == "1":
    from . import _pure as _impl

    IMPLEMENTATION = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        IMPLEMENTATION = "cython"
    except ImportError:
        from . import _pure as _impl

        IMPLEMENTATION = "pure"

segment_min_separation = _impl.segment_min_separation
count_conflicting_paths = _impl.count_conflicting_paths
path_pair_min_separation = _impl.path_pair_min_separation

__all__ = [
    "IMPLEMENTATION",
    "segment_min_separation",
    "count_conflicting_paths",
    "path_pair_min_separation",
]
