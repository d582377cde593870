"""Optional numba acceleration.

Set ``CPDIST_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.
"""
import os

_flag = os.environ.get("CPDIST_DISABLE_NUMBA", "").strip().lower()
DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(func=None, **options):
    """``numba.njit`` when numba is installed, otherwise the identity decorator.

    The numba-flavoured kernels are always compiled if numba is importable,
    regardless of the env flag, so both paths stay testable side by side.
    """
    options.setdefault("cache", True)
    options.setdefault("nogil", True)

    def decorate(f):
        if HAVE_NUMBA:
            return numba.njit(**options)(f)
        return f

    if func is not None:
        return decorate(func)
    return decorate
