"""Backend selection for the path generator.

The compiled extension is used when it imports; otherwise the numpy
implementation. ``INSIDER_DISCLOSURE_BACKEND=python`` forces the fallback
and ``=compiled`` makes a missing extension an import error.
"""
from __future__ import annotations

import os

from . import _paths_py

_choice = os.environ.get("INSIDER_DISCLOSURE_BACKEND", "auto").strip().lower()
if _choice not in {"auto", "python", "compiled"}:
    raise ImportError(f"INSIDER_DISCLOSURE_BACKEND must be auto, python or compiled, got {_choice!r}")

_compiled = None
if _choice != "python":
    try:
        from . import _paths as _compiled  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "compiled":
            raise

BACKEND = "compiled" if _compiled is not None else "python"
simulate_block = (_compiled or _paths_py).simulate_block
python_simulate_block = _paths_py.simulate_block
compiled_simulate_block = None if _compiled is None else _compiled.simulate_block
