"""Bifurcation diagrams as CSV tables or SVG scatter plots."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

from ..errors import IoFailure
from ..phasemodel import Kind, PhaseLockedSolution, RegionLabel, RootRegion, Verdict
from .branches import Branch
from .detect import BifurcationPoint, EventKind

DIAGRAM_COLUMNS = ("record", "branch", "tau", "psi", "omega", "kind", "a", "b",
                   "region", "stable", "residual", "flags")


def _num(x):
    return repr(float(x))


def _rows(branches, bifs):
    for i, br in enumerate(branches):
        for tau, s in br.points:
            yield ["point", str(i), _num(tau), _num(s.psi), _num(s.omega), s.kind.value,
                   _num(s.a), _num(s.b), s.region.label.value, s.stable.value, "", ""]
    for e in bifs:
        yield ["event", "", _num(e.tau_star), _num(e.psi_star), _num(e.omega_star), e.kind.value,
               "", "", "", "", _num(e.residual), ";".join(e.flags)]


def write_diagram_csv(branches, bifs, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DIAGRAM_COLUMNS)
        writer.writerows(_rows(branches, bifs))


def read_diagram_csv(path):
    """Inverse of write_diagram_csv; region sign triples are not stored."""
    branches: dict[int, Branch] = {}
    events = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["record"] == "event":
                flags = tuple(f for f in row["flags"].split(";") if f)
                events.append(BifurcationPoint(float(row["tau"]), EventKind(row["kind"]),
                                               float(row["psi"]), float(row["omega"]),
                                               float(row["residual"]), flags))
                continue
            kind = Kind(row["kind"])
            sol = PhaseLockedSolution(float(row["psi"]), float(row["omega"]), kind,
                                      float(row["a"]), float(row["b"]),
                                      RootRegion(RegionLabel(row["region"]), ()),
                                      Verdict(row["stable"]), float(row["tau"]))
            br = branches.setdefault(int(row["branch"]), Branch(kind))
            br.points.append((sol.tau, sol))
    return [branches[i] for i in sorted(branches)], events


# -- SVG ----------------------------------------------------------------------

_PANEL_W, _PANEL_H, _MARGIN = 480, 320, 50
_STYLE = """
  .stable { fill: #1f77b4; stroke: none; }
  .unstable { fill: none; stroke: #d62728; stroke-width: 0.8; }
  .marginal { fill: #7f7f7f; stroke: none; }
  .event { fill: none; stroke: #000; stroke-width: 1.2; }
  .axis { stroke: #000; stroke-width: 1; fill: none; }
  text { font-family: sans-serif; font-size: 11px; }
"""


def _extent(values, pad=0.05):
    lo, hi = min(values), max(values)
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0
    span = hi - lo
    return lo - pad * span, hi + pad * span


def _panel(x0, title, ylabel, pts, events, xr, yr):
    def sx(x):
        return x0 + _MARGIN + (x - xr[0]) / (xr[1] - xr[0]) * (_PANEL_W - 2 * _MARGIN)

    def sy(y):
        return _PANEL_H - _MARGIN - (y - yr[0]) / (yr[1] - yr[0]) * (_PANEL_H - 2 * _MARGIN)

    out = ['<g class="panel">',
           f'<rect class="axis" x="{x0 + _MARGIN}" y="{_MARGIN}" '
           f'width="{_PANEL_W - 2 * _MARGIN}" height="{_PANEL_H - 2 * _MARGIN}"/>',
           f'<text x="{x0 + _PANEL_W / 2}" y="{_MARGIN - 15}" text-anchor="middle">{escape(title)}</text>',
           f'<text x="{x0 + _PANEL_W / 2}" y="{_PANEL_H - 12}" text-anchor="middle">tau</text>',
           f'<text x="{x0 + 14}" y="{_PANEL_H / 2}" text-anchor="middle" '
           f'transform="rotate(-90 {x0 + 14} {_PANEL_H / 2})">{escape(ylabel)}</text>']
    for label, value, anchor in ((f"{xr[0]:.4g}", xr[0], "start"), (f"{xr[1]:.4g}", xr[1], "end")):
        out.append(f'<text x="{sx(value):.2f}" y="{_PANEL_H - _MARGIN + 14}" '
                   f'text-anchor="{anchor}">{label}</text>')
    for label, value in ((f"{yr[0]:.4g}", yr[0]), (f"{yr[1]:.4g}", yr[1])):
        out.append(f'<text x="{x0 + _MARGIN - 4}" y="{sy(value):.2f}" text-anchor="end">{label}</text>')
    for x, y, cls in pts:
        out.append(f'<circle class="{cls}" cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="1.6"/>')
    for x, y in events:
        out.append(f'<circle class="event" cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4"/>')
    out.append("</g>")
    return out


def write_diagram_svg(branches, bifs, path) -> None:
    pts = [(tau, s) for br in branches for tau, s in br.points]
    taus = [t for t, _ in pts] + [e.tau_star for e in bifs] or [0.0, 1.0]
    xr = _extent(taus, pad=0.0)
    psi_r = (0.0, 2 * math.pi)
    omegas = [s.omega for _, s in pts] + [e.omega_star for e in bifs] or [0.0]
    om_r = _extent(omegas)
    cls = {Verdict.STABLE: "stable", Verdict.UNSTABLE: "unstable", Verdict.MARGINAL: "marginal"}
    width = 2 * _PANEL_W
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{_PANEL_H}" '
             f'viewBox="0 0 {width} {_PANEL_H}">',
             f"<style>{_STYLE}</style>"]
    lines += _panel(0, "phase difference", "psi",
                    [(t, s.psi, cls[s.stable]) for t, s in pts],
                    [(e.tau_star, e.psi_star) for e in bifs], xr, psi_r)
    lines += _panel(_PANEL_W, "frequency deviation", "omega",
                    [(t, s.omega, cls[s.stable]) for t, s in pts],
                    [(e.tau_star, e.omega_star) for e in bifs], xr, om_r)
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n")


def export_diagram(branches, bifs, path, format: str = "csv") -> Path:
    """Write the diagram to ``path`` as "csv" or "svg"; raises IoFailure on OS errors."""
    path = Path(path)
    if format not in ("csv", "svg"):
        raise ValueError("format must be 'csv' or 'svg'")
    try:
        if format == "csv":
            write_diagram_csv(branches, bifs, path)
        else:
            write_diagram_svg(branches, bifs, path)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path
