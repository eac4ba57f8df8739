"""Backend selection for the evaluation kernels.

The hot loops are compiled with numba unless the environment variable
``NURBSKIT_NO_NUMBA`` is set to a truthy value (``1``, ``true``, ``yes``,
``on``) or numba is not importable, in which case vectorized pure-NumPy
implementations are used instead.  Both backends implement the same
function set (see ``_kernels``).
"""

import os

_TRUTHY = {"1", "true", "yes", "on"}


def numba_disabled_by_env() -> bool:
    return os.environ.get("NURBSKIT_NO_NUMBA", "").strip().lower() in _TRUTHY


if numba_disabled_by_env():
    HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"
