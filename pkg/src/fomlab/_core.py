"""Kernel backend selection.

The compiled ``_kernels`` extension is used when importable; otherwise, or
when ``FOMLAB_PURE=1`` is set, the NumPy fallback is used.
"""
import os

from . import _fallback

if os.environ.get("FOMLAB_PURE", "") in ("", "0"):
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"
else:
    _impl = _fallback
    BACKEND = "python"

ogmg_triangle = _impl.ogmg_triangle
ogmg_alt_triangle = _impl.ogmg_alt_triangle
ogm_triangle = _impl.ogm_triangle
tail_sums = _impl.tail_sums
assemble_s = _impl.assemble_s
pivoted_cholesky = _impl.pivoted_cholesky

__all__ = [
    "BACKEND",
    "ogmg_triangle",
    "ogmg_alt_triangle",
    "ogm_triangle",
    "tail_sums",
    "assemble_s",
    "pivoted_cholesky",
]
