"""Directed fuzzing by noisy binary search over counted input regions."""

try:
    from ._mc2 import *  # noqa: F401,F403
    from ._mc2 import __doc__ as _core_doc  # noqa: F401
except ImportError:  # development tree: module next to the build directory
    from _mc2 import *  # noqa: F401,F403

__all__ = [
    "Interval",
    "InputRegion",
    "TotalOrder",
    "TargetProgram",
    "load_program",
    "parse_program",
    "execute",
    "split_half",
    "sample_uniform",
    "chebyshev_bound",
    "bootstrap_paths",
    "assign_total_order",
    "run_campaign",
    "blackbox_search",
]
