"""Kernel backend selection.

The hot circuit passes exist twice: a Cython extension (_ckernels) and a
pure-Python twin (_pykernels) with identical signatures and outputs.  The
compiled one is used when present; set BOOLREASON_KERNELS=python or
=compiled to force a side.
"""

import os

_choice = os.environ.get("BOOLREASON_KERNELS", "").strip().lower()
if _choice not in ("", "python", "compiled"):
    raise RuntimeError(
        f"BOOLREASON_KERNELS must be 'python' or 'compiled', not {_choice!r}"
    )

if _choice == "python":
    from . import _pykernels as _impl
elif _choice == "compiled":
    from . import _ckernels as _impl  # type: ignore[attr-defined]
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = "compiled" if _impl.__name__.endswith("_ckernels") else "python"

nnf_eval = _impl.nnf_eval
monotone_sat = _impl.monotone_sat
monotone_valid = _impl.monotone_valid
substitute = _impl.substitute
reason_build = _impl.reason_build


def backend() -> str:
    """Name of the active kernel backend."""
    return BACKEND
