"""
Access to the stored published reference values in data/published.yaml.
"""

import functools
from pathlib import Path

import yaml

from .model import AngleSchedule, AnsatzKind, MissingReferenceException, preset

DATA_FILE = Path(__file__).parent / "data" / "published.yaml"


@functools.lru_cache(maxsize=None)
def load_published(path=DATA_FILE):
    with open(path, "r") as fp:
        data = yaml.safe_load(fp)
    if not isinstance(data, dict) or "per_edge_energy" not in data:
        raise TypeError(f"Unexpected YAML format in {path}")
    return data


def _depth_entry(values, p, what):
    if p < 1 or p > len(values):
        raise MissingReferenceException(f"No stored {what} for p={p}")
    return values[p - 1]


def _ham_key(hamiltonian):
    return preset(hamiltonian).name.lower()


def table2_value(ansatz, p, hamiltonian, D):
    """
    Published per-edge energy of the ansatz at depth p on a (D+1)-regular
    graph.
    """
    rows = load_published()["per_edge_energy"]
    kind = AnsatzKind.parse(ansatz)
    try:
        values = rows[D][_ham_key(hamiltonian)][kind.value]
    except KeyError:
        raise MissingReferenceException(
            f"No stored per-edge energy for {kind} on {hamiltonian} at D={D}"
        )
    return _depth_entry(values, p, f"{kind} per-edge energy at D={D}")


def table2_baseline(algorithm, hamiltonian, D=None):
    """
    Published per-edge ZERO or MATCH value.
    """
    data = load_published()
    key = _ham_key(hamiltonian)
    try:
        if algorithm.upper() == "ZERO":
            return data["zero_per_edge"][key]
        if algorithm.upper() == "MATCH":
            return data["match_per_edge"][D][key]
    except KeyError:
        pass
    raise MissingReferenceException(
        f"No stored {algorithm} value for {hamiltonian} at D={D}"
    )


NU_TABLES = {
    "3": ("nu_mc_ansatz", "xy"),
    "3mc": ("nu_mc_ansatz", "mc"),
    "4": ("nu_xy_ansatz", "xy"),
}


def nu_reference(table, p):
    """
    Published infinite-degree nu_p: table "3" (MC ansatz, XY Hamiltonian),
    "3mc" (MC ansatz, MC Hamiltonian) or "4" (XY ansatz, XY Hamiltonian).
    """
    try:
        block, row = NU_TABLES[str(table)]
    except KeyError:
        raise MissingReferenceException(f"Unknown nu table {table}")
    return _depth_entry(load_published()[block][row], p, f"nu in table {table}")


def published_schedule(table, p):
    """
    Published optimal angles: table "5" (MC ansatz) or "6" (XY ansatz).
    """
    data = load_published()
    if str(table) == "5":
        block = data["angles_mc_ansatz"]
    elif str(table) == "6":
        block = data["angles_xy_ansatz"]
    else:
        raise MissingReferenceException(f"Unknown angle table {table}")
    if p not in block:
        raise MissingReferenceException(f"No stored angles in table {table} for p={p}")
    entry = block[p]
    if str(table) == "5":
        return AngleSchedule.mc(entry["gamma"], entry["beta"])
    return AngleSchedule.xy(entry["gamma_z"], entry["gamma_y"], entry["beta"])


def cut_reference(D=None):
    """
    (Parisi nu benchmark, per-edge bounds). D of None is the infinite-degree
    limit and has no finite-D bounds.
    """
    cut = load_published()["cut"]
    if D is None:
        return cut["parisi_nu"], None
    try:
        low, high = cut["per_edge_bounds"][D]
    except KeyError:
        raise MissingReferenceException(f"No stored CUT bound for D={D}")
    return cut["parisi_nu"], (low, high)
