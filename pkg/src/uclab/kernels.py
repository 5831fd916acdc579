"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
implementation takes over. Set ``UCLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py as python_backend

if os.environ.get("UCLAB_PURE_PYTHON"):
    compiled_backend = None
else:
    try:
        from . import _kernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

stream = _impl.stream
draw_uniform = _impl.draw_uniform
count_uniform = _impl.count_uniform
count_cdf = _impl.count_cdf
arc_profile = _impl.arc_profile
