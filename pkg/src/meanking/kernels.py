"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy
versions in ``_kernels_py`` take over. Set ``MEANKING_PURE_PYTHON=1`` to
force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("MEANKING_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

pair_counts = _impl.pair_counts
complete_basis = _impl.complete_basis
sample_rounds = _impl.sample_rounds
