"""Backend selection for the hot kernels.

The compiled extension is used when importable; setting ``MCLSEARCH_PURE=1``
forces the pure-Python twins (useful for cross-checking both backends).
"""

import os

if os.environ.get("MCLSEARCH_PURE", "") not in ("", "0"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pykernels as _impl

from . import _pykernels as python_backend

BACKEND = _impl.BACKEND
ExactCover = _impl.ExactCover
bundle_invariants = _impl.bundle_invariants
filter_disjoint = _impl.filter_disjoint
naive_compatible = _impl.naive_compatible
count_independent_sets = _impl.count_independent_sets


def compiled_backend():
    """The compiled module, or None when it is not available."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels
