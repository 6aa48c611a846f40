"""Sweep backend selection.

The level/slab sweep has a compiled kernel (Cython) and a pure numpy + scipy
fallback with identical outputs.  REEBSMOOTH_BACKEND=pure|compiled forces one;
the default tries the compiled kernel and falls back to pure.
"""

import os

from ..errors import GuardViolation

_choice = os.environ.get("REEBSMOOTH_BACKEND", "auto").strip().lower() or "auto"

if _choice == "auto":
    try:
        from . import _sweep as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import pysweep as _impl

        BACKEND = "pure"
elif _choice in ("compiled", "cython"):
    from . import _sweep as _impl

    BACKEND = "compiled"
elif _choice in ("pure", "python"):
    from . import pysweep as _impl

    BACKEND = "pure"
else:
    raise GuardViolation(
        f"REEBSMOOTH_BACKEND={_choice!r} not recognized (use 'pure' or 'compiled')"
    )

sweep_quotient = _impl.sweep_quotient
