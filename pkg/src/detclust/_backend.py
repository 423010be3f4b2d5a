"""Backend selection for the numerical core.

On import, prefer the compiled extension and fall back to the
pure-numpy twin if it is not built.  The environment variable
DETCLUST_BACKEND forces the choice: "compiled" or "python"
("auto" is the default behaviour).

Code that wants the hot primitives should fetch them per use site as
`_backend.core.<fn>` (or bind `core = _backend.core` locally right
before a loop); the indirection is what lets the benchmark harness and
the parity tests swap implementations with `use_backend`.
"""

import os

from . import _core_py

_requested = os.environ.get("DETCLUST_BACKEND", "auto").strip().lower()

if _requested in ("auto", ""):
    try:
        from . import _core as core
    except ImportError:
        core = _core_py
elif _requested == "compiled":
    from . import _core as core
elif _requested == "python":
    core = _core_py
else:
    raise ImportError(
        f"DETCLUST_BACKEND={_requested!r} is not recognised; "
        "use 'auto', 'compiled' or 'python'"
    )


def active_backend():
    """Name of the numerical core in use: 'compiled' or 'python'."""
    return core.BACKEND_NAME


def use_backend(name):
    """Swap the active core at runtime.  Intended for tests and benchmarks."""
    global core
    if name == "python":
        core = _core_py
    elif name == "compiled":
        from . import _core

        core = _core
    else:
        raise ValueError(f"unknown backend {name!r}")
    return core
