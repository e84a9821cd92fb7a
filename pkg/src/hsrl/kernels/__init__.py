"""Hot loops: random walks, SGNS and LINE training.

The compiled extension is used when it was built; otherwise the pure-Python
module with the same functions is loaded.  Both expose ``random_walks``,
``train_sgns``, ``train_line`` and ``pair_update``.
"""
from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

DEFAULT_BACKEND = "cython" if _ckernels is not None else "python"


def get_backend(name: str | None = None) -> ModuleType:
    """Kernel module for ``name`` (``"cython"``, ``"python"`` or ``None``/``"auto"``)."""
    if name is None or name == "auto":
        name = DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}"
        ) from None
