"""
Classical comparison algorithms: ZERO (the all-zeros product state), MATCH
(two-qubit eigenstates on a maximum matching) and CUT (a maximum cut),
with exhaustive exact solvers for small graphs and stored reference values.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .model import (
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    UnsupportedHamiltonianException,
    VertexCapExceededException,
    preset,
)
from .oracle import apply_pauli_y, basis_state
from .published import cut_reference
from .tools import resolve_workers

EXHAUSTIVE_VERTEX_CAP = 24
CUT_CHUNK = 1 << 16


@dataclass(frozen=True)
class BaselineReport:
    algorithm: str
    total_energy: float
    witness: Optional[Tuple] = None

    def to_dict(self):
        witness = None
        if self.witness is not None:
            witness = [list(w) if isinstance(w, tuple) else w for w in self.witness]
        return {
            "algorithm": self.algorithm,
            "total_energy": self.total_energy,
            "witness": witness,
        }


def zero_energy(spec, m):
    """
    Energy of the all-zeros state: <ZZ> = 1 and <XX> = <YY> = 0 on every edge.
    """
    if m < 0:
        raise ValueError(f"Edge count must be non-negative, got {m}")
    return m * (spec.c_I + spec.c_Z)


def _match_family(spec):
    for name in ("QMC", "EPR", "XY"):
        if spec.matches(preset(name)):
            return name
    raise UnsupportedHamiltonianException(
        f"MATCH is tabulated for QMC, XY and EPR only, not {spec.name}"
    )


def match_energy(spec, m, M):
    """
    Energy of the matched state: (3M+m)/2 for QMC and EPR, (2M+m)/2 for XY.
    """
    spec = preset(spec)
    if M < 0 or m < M:
        raise ValueError(f"Invalid matching size {M} for {m} edges")
    if _match_family(spec) == "XY":
        return (2 * M + m) / 2
    return (3 * M + m) / 2


def cut_energy(spec, C):
    """
    Value of the CUT algorithm: the cut size, for every Hamiltonian here.
    """
    spec = preset(spec)
    if not spec.matches(preset("MC")):
        _match_family(spec)
    return C


def _check_cap(g, cap):
    if g.n > cap:
        raise VertexCapExceededException(
            f"Exhaustive search over {g.n} vertices exceeds the cap of {cap}"
        )


def max_matching(g, vertex_cap=EXHAUSTIVE_VERTEX_CAP):
    """
    Maximum matching by branch and bound. Vertices are decided in index
    order, matched partners are tried in increasing order before leaving a
    vertex unmatched, so the first optimum found is the reported witness.
    """
    _check_cap(g, vertex_cap)
    n = g.n
    adjacency = [sorted(g.neighbors(u)) for u in range(n)]
    best = {"size": 0, "edges": ()}

    def search(v, used, chosen):
        while v < n and (used >> v) & 1:
            v += 1
        free = (n - v) - bin(used >> v).count("1") if v < n else 0
        if len(chosen) + free // 2 <= best["size"]:
            return
        if v >= n:
            return
        for w in adjacency[v]:
            if w > v and not (used >> w) & 1:
                chosen.append((v, w))
                if len(chosen) > best["size"]:
                    best["size"], best["edges"] = len(chosen), tuple(chosen)
                search(v + 1, used | (1 << v) | (1 << w), chosen)
                chosen.pop()
        search(v + 1, used | (1 << v), chosen)

    search(0, 0, [])
    return best["size"], best["edges"]


def max_cut(g, vertex_cap=EXHAUSTIVE_VERTEX_CAP, workers=1):
    """
    Maximum cut by enumerating every bipartition with vertex 0 on side 0.
    The witness is the vertex set of side 1 for the lowest-index optimum.
    """
    _check_cap(g, vertex_cap)
    log = logging.getLogger("baselines")
    if g.n <= 1 or g.m == 0:
        return 0, ()
    workers = resolve_workers(workers)
    total = 1 << (g.n - 1)
    edges = np.array(g.edges, dtype=np.int64)

    def chunk(start):
        sides = np.arange(start, min(total, start + CUT_CHUNK), dtype=np.int64) << 1
        sizes = np.zeros(sides.shape[0], dtype=np.int64)
        for u, v in edges:
            sizes += ((sides >> u) ^ (sides >> v)) & 1
        best = int(np.argmax(sizes))
        return int(sizes[best]), int(sides[best])

    starts = range(0, total, CUT_CHUNK)
    if workers == 1:
        results = [chunk(start) for start in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(chunk, starts))

    best_size, best_side = -1, 0
    for size, side in results:
        if size > best_size:
            best_size, best_side = size, side
    log.debug(f"max cut {best_size} over {total} bipartitions")
    witness = tuple(u for u in range(g.n) if (best_side >> u) & 1)
    return best_size, witness


def _reduced_states(pair):
    rho = np.outer(pair, pair.conj()).reshape(2, 2, 2, 2)
    return np.einsum("ijkj->ik", rho), np.einsum("ijil->jl", rho)


def matched_state_energy(g, spec, matching):
    """
    Exact energy of the product of top eigenstates of the edge term on the
    matched pairs, with every unmatched qubit maximally mixed. Edges between
    different blocks see the product of single-qubit reduced states.
    """
    spec = preset(spec)
    values, vectors = np.linalg.eigh(spec.term_matrix())
    top, pair = values[-1], vectors[:, -1]
    first, second = _reduced_states(pair)

    local = {u: PAULI_I / 2 for u in range(g.n)}
    matched = set()
    for u, v in matching:
        u, v = min(u, v), max(u, v)
        local[u], local[v] = first, second
        matched.add((u, v))

    paulis = (PAULI_X, PAULI_Y, PAULI_Z)
    total = 0.0
    for u, v in g.edges:
        if (u, v) in matched:
            total += top
            continue
        total += spec.c_I
        for c, pauli in zip(spec.coefficients[1:], paulis):
            total += (
                c
                * np.trace(local[u] @ pauli).real
                * np.trace(local[v] @ pauli).real
            )
    return float(total)


def cut_state(g, cut, spec=None):
    """
    Basis state with the cut side set to 1. For EPR the cut side is then
    rotated by Y, which maps every edge onto the EPR-favoured parity.
    """
    state = basis_state(g.n, cut)
    if spec is not None and preset(spec).matches(preset("EPR")):
        state = apply_pauli_y(state, cut)
    return state


def baseline_report(g, spec, vertex_cap=EXHAUSTIVE_VERTEX_CAP, workers=1):
    """
    ZERO, MATCH and CUT reports for the Hamiltonian on g, with witnesses.
    MATCH is omitted for Hamiltonians it is not tabulated for.
    """
    spec = preset(spec)
    reports = [BaselineReport("ZERO", zero_energy(spec, g.m))]
    try:
        _match_family(spec)
    except UnsupportedHamiltonianException:
        pass
    else:
        M, matching = max_matching(g, vertex_cap)
        reports.append(BaselineReport("MATCH", match_energy(spec, g.m, M), matching))
    C, cut = max_cut(g, vertex_cap, workers)
    reports.append(BaselineReport("CUT", cut_energy(spec, C), cut))
    return reports


def reference_cut_values(D=None):
    """
    Stored CUT benchmarks: the Parisi normalized value for D = None (the
    infinite-degree limit) alongside per-edge bounds for a finite D. These
    are reference data, not computed here.
    """
    return cut_reference(D)
