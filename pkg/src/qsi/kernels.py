"""Backend selection for the Monte Carlo inner loops.

The compiled extension is used for the kernels where it is faster than
numpy (see ``benchmarks/bench_kernels.py``): the top-hat acceptance loop
rejects on the z coordinate before evaluating any trigonometry. The
likelihood loop stays on numpy, whose vectorized transcendental functions
beat a scalar loop. ``QSI_PURE_PYTHON=1`` forces numpy everywhere and
``QSI_KERNELS=cython`` forces the compiled module everywhere.
"""
import os

from . import _kernels_py

MIXED = _kernels_py.MIXED
PURE = _kernels_py.PURE

_compiled = None
if os.environ.get("QSI_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

if _compiled is None:
    BACKEND = "python"
    bloch_from_uniforms = _kernels_py.bloch_from_uniforms
    loglik_moments = _kernels_py.loglik_moments
    tophat_moments = _kernels_py.tophat_moments
elif os.environ.get("QSI_KERNELS") == "cython":
    BACKEND = "cython"
    bloch_from_uniforms = _compiled.bloch_from_uniforms
    loglik_moments = _compiled.loglik_moments
    tophat_moments = _compiled.tophat_moments
else:
    BACKEND = "cython+numpy"
    bloch_from_uniforms = _compiled.bloch_from_uniforms
    loglik_moments = _kernels_py.loglik_moments
    tophat_moments = _compiled.tophat_moments


def get_backend(name: str):
    """Return the kernel module named ``"python"`` or ``"cython"``."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
