"""CSV rows for locked solutions."""

from __future__ import annotations

import csv
from pathlib import Path

from .config import Kind, PhaseLockedSolution
from .stability import RegionLabel, RootRegion, Verdict

SOLUTION_COLUMNS = ("tau", "psi", "omega", "kind", "a", "b", "region", "stable")


def _num(x: float) -> str:
    return repr(float(x))


def solution_row(sol: PhaseLockedSolution) -> list:
    return [_num(sol.tau), _num(sol.psi), _num(sol.omega), sol.kind.value,
            _num(sol.a), _num(sol.b), sol.region.label.value, sol.stable.value]


def write_solutions_csv(path, solutions) -> None:
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SOLUTION_COLUMNS)
        for sol in solutions:
            writer.writerow(solution_row(sol))


def read_solutions_csv(path) -> list:
    """Rows back as solutions; the region's sign triple is not stored and is left empty."""
    out = []
    with open(Path(path), newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(PhaseLockedSolution(
                psi=float(row["psi"]), omega=float(row["omega"]), kind=Kind(row["kind"]),
                a=float(row["a"]), b=float(row["b"]),
                region=RootRegion(RegionLabel(row["region"]), ()),
                stable=Verdict(row["stable"]), tau=float(row["tau"])))
    return out
