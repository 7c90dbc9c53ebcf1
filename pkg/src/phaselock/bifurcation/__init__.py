"""Delay sweeps, branch tracing and bifurcation detection."""

from .branches import Branch, sweep_tau, tau_grid
from .detect import (
    BifurcationPoint,
    EventKind,
    detect_bifurcations,
    pitchfork_event,
    saddle_node_locked_event,
    saddle_node_out_of_phase_event,
)
from .export import DIAGRAM_COLUMNS, export_diagram, read_diagram_csv, write_diagram_csv, write_diagram_svg

__all__ = [
    "Branch", "BifurcationPoint", "DIAGRAM_COLUMNS", "EventKind", "detect_bifurcations", "export_diagram",
    "pitchfork_event", "read_diagram_csv", "saddle_node_locked_event",
    "saddle_node_out_of_phase_event", "sweep_tau", "tau_grid", "write_diagram_csv",
    "write_diagram_svg",
]
