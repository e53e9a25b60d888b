"""Backend selection for the scaling kernels.

The compiled ``_gis_c`` extension is used when it imports; otherwise the
numpy implementation in ``_gis_py`` takes over.  Setting ``ADMUI_PURE_PYTHON=1``
forces the fallback.
"""

import contextlib
import os

from . import _gis_py
from ._gis_py import (  # noqa: F401
    MODE_DISTANCE,
    MODE_ETA_GAP,
    STATUS_CAP,
    STATUS_CONVERGED,
    STATUS_DEGENERATE,
)

try:
    from . import _gis_c
except ImportError:  # extension not built
    _gis_c = None

BACKENDS = {"python": _gis_py}
if _gis_c is not None:
    BACKENDS["cython"] = _gis_c

if os.environ.get("ADMUI_PURE_PYTHON", "") not in ("", "0") or _gis_c is None:
    active = _gis_py
else:
    active = _gis_c


def backend_name() -> str:
    return active.BACKEND


def set_backend(name: str) -> None:
    global active
    try:
        active = BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available; have {sorted(BACKENDS)}") from None


@contextlib.contextmanager
def using_backend(name: str):
    global active
    previous = active
    set_backend(name)
    try:
        yield active
    finally:
        active = previous
