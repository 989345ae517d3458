"""Hot loops with a compiled backend and a pure-Python fallback.

The compiled extension is used when it was built; set
``NBESTGEC_PURE_PYTHON=1`` to force the fallback. ``BACKEND`` names the
active choice. Both backends expose the same three functions and are tested
for identical output.
"""

import os

from . import _pure

try:
    if os.environ.get("NBESTGEC_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels forced by environment")
    from . import _core
except ImportError:
    _core = None

if _core is not None:
    align_ops = _core.align_ops
    sparse_dot = _core.sparse_dot
    cw_update = _core.cw_update
    BACKEND = "cython"
else:
    align_ops = _pure.align_ops
    sparse_dot = _pure.sparse_dot
    cw_update = _pure.cw_update
    BACKEND = "python"


def backends():
    """Map of available backend name -> module, for tests and benchmarks."""
    found = {"python": _pure}
    if _core is not None:
        found["cython"] = _core
    return found
