"""Phase-locking analysis of two identical oscillators with delayed coupling."""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"

BUNDLED_DATA = ("H_I", "H_II", "hopf", "morris_lecar_I", "morris_lecar_II",
                "morris_lecar_example")


def bundled_path(name: str) -> Path:
    """Path of a JSON file shipped with the package, e.g. ``bundled_path("H_II")``."""
    if name not in BUNDLED_DATA:
        raise KeyError(name)
    return Path(str(resources.files("phaselock") / "data" / f"{name}.json"))
