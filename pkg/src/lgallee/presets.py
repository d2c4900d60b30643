"""Parameter presets reproducing the published figures.

Each preset names the subcommand it belongs to and pins every numeric setting
so that repeated runs on one platform produce identical files.
"""
import math

Q_MINUS = (73 - math.sqrt(5)) / 200
Q_PLUS = (73 + math.sqrt(5)) / 200

FIGURES = {
    "F02": {"command": "equilibria", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.25, "rootscan": True},
    "F04a": {"command": "portrait", "A": 0.5, "M": -0.05, "Q": 0.51, "S": 0.1},
    "F04b": {"command": "portrait", "A": 0.5, "M": -0.05, "Q": 0.51, "S": 0.045},
    "F05a": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.3},
    "F05b": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.2},
    "F05c": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.13},
    "F06a": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": Q_MINUS, "S": 0.25},
    "F06b": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": Q_PLUS, "S": 0.25},
    "F08": {"command": "bifurcation", "A": 0.1, "M": -0.1, "window": (0.3, 0.42, 0.0, 0.45),
            "resolution": 40},
    "F09a": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.3, "basins": True},
    "F09b": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.24962827, "basins": True},
    "F09c": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.235, "basins": True},
    "F09d": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.225, "basins": True},
    "F09e": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.18, "basins": True},
    "F09f": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.13, "basins": True},
    "F10a": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.345, "S": 0.134332},
    "F10b": {"command": "portrait", "A": 0.1, "M": -0.1, "Q": 0.363, "S": 0.1298},
}

CONNECTIONS = {
    "heteroclinic": {"A": 0.1, "M": -0.1, "Q": 0.363, "bracket": (0.235, 0.3)},
    "homoclinic": {"A": 0.1, "M": -0.1, "Q": 0.363, "bracket": (0.225, 0.235)},
}

BASIN_RESOLUTION = 100


def files_for(figure: str) -> list[str]:
    """Output file names a preset produces (format "both")."""
    p = FIGURES[figure]
    cmd = p["command"]
    if cmd == "equilibria":
        out = [f"{figure}_equilibria.txt"]
        if p.get("rootscan"):
            out += [f"{figure}_rootscan.txt", f"{figure}_rootscan.svg"]
        return out
    if cmd == "bifurcation":
        return [f"{figure}_bifurcation.txt", f"{figure}_bifurcation.svg"]
    out = [f"{figure}_portrait.csv", f"{figure}_portrait.svg"]
    if p.get("basins"):
        out += [f"{figure}_basins.csv", f"{figure}_basins.svg"]
    return out
