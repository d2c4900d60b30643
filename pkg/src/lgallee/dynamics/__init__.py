"""Time integration, limit cycles, invariant manifolds, basins and connections."""
from .basins import BasinGrid, attracting_sets, basins
from .connection import ConnectionResult, connection_search, separation
from .cycles import LimitCycle, ReturnMap, cycle_inventory, find_limit_cycles, polyline_distance, winding_number
from .integrator import Section, Trajectory, integrate
from .manifolds import ManifoldBranch, compass, find_branch, trace_branch, trace_manifolds

__all__ = [
    "BasinGrid", "ConnectionResult", "LimitCycle", "ManifoldBranch", "ReturnMap", "Section",
    "Trajectory", "attracting_sets", "basins", "compass", "connection_search", "cycle_inventory", "find_branch",
    "find_limit_cycles", "integrate", "polyline_distance", "separation", "trace_branch", "trace_manifolds",
    "winding_number",
]
