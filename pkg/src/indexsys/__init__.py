"""Exact verification and analysis of index systems for piecewise-linear maps."""

from .dynamics import PLMap
from .geometry import CIRCLE, LINE, CompactPair, RegionSet, normalize
from .index_core import IndexSystem, Status, verify

__all__ = ["CIRCLE", "LINE", "CompactPair", "IndexSystem", "PLMap", "RegionSet", "Status", "normalize", "verify"]
__version__ = "0.1.0"
