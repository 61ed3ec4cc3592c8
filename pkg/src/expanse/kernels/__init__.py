"""Kernel selection: compiled extension when present, numpy fallback otherwise.

BACKEND reports which one is live. The two implementations return identical
values (integer results, and float work limited to comparisons), so callers
never need to care; tests and benchmarks import both explicitly.
"""

from . import pure

try:
    from . import _speedups

    orbit_min_max_sqnorm = _speedups.orbit_min_max_sqnorm
    farthest_first_peaks = _speedups.farthest_first_peaks
    BACKEND = "compiled"
except ImportError:  # extension not built; numpy path is fully equivalent
    orbit_min_max_sqnorm = pure.orbit_min_max_sqnorm
    farthest_first_peaks = pure.farthest_first_peaks
    BACKEND = "pure"

__all__ = ["BACKEND", "orbit_min_max_sqnorm", "farthest_first_peaks", "pure"]
