"""Backend selection for the hot loops.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
numpy fallback in ``_pykernels`` is loaded. Set ``CLIFFBELL_PURE_PYTHON=1`` to
force the fallback.
"""

import os

if os.environ.get("CLIFFBELL_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"
    else:
        BACKEND = "cython"

gp = _impl.gp
gp_batch = _impl.gp_batch
party_outcomes = _impl.party_outcomes
chsh_grid_max = _impl.chsh_grid_max

__all__ = ["BACKEND", "gp", "gp_batch", "party_outcomes", "chsh_grid_max"]
