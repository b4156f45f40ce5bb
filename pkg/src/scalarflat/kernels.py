"""Backend selection for the inner loops.

The compiled extension is used when it imported cleanly; otherwise, or when
SCALARFLAT_PURE_PYTHON=1 is set, the numpy versions take over. Both expose
``ray_jets_sum`` and ``sor_solve`` with identical semantics.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

if _compiled is not None and os.environ.get("SCALARFLAT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    BACKEND = "compiled"
else:
    BACKEND = "python"

_impl = BACKENDS[BACKEND]
ray_jets_sum = _impl.ray_jets_sum
sor_solve = _impl.sor_solve


def get_backend(name=None):
    """Module implementing the kernels; default is the active backend."""
    if name is None:
        return _impl
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable (have {sorted(BACKENDS)})") from None
