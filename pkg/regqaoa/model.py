"""
Classes and types used across regqaoa: Hamiltonian coefficients, angle
schedules, graphs and energy reports.
"""

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import networkx as nx
import numpy as np

DEFAULT_VERTEX_CAP = 1 << 20

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class HamiltonianSpec:
    """
    Per-edge coefficients of a 2-local Hamiltonian of the form
    c_I + c_X XX + c_Y YY + c_Z ZZ, summed over every edge of a graph.
    """

    name: str
    c_I: float
    c_X: float
    c_Y: float
    c_Z: float

    def __post_init__(self):
        for coefficient in self.coefficients:
            if not math.isfinite(coefficient):
                raise ValueError(f"{self.name} has a non-finite coefficient")

    @property
    def coefficients(self):
        return (self.c_I, self.c_X, self.c_Y, self.c_Z)

    @property
    def mixer_commutes(self):
        """
        True when the edge term commutes with the transverse-field mixer on
        both qubits, so a trailing mixer layer cannot change the energy.
        """
        return self.c_Y == self.c_Z

    def edge_energy(self, xx, yy, zz):
        return self.c_I + self.c_X * xx + self.c_Y * yy + self.c_Z * zz

    def matches(self, other):
        """True if both specs carry the same coefficients, whatever the name."""
        return self.coefficients == other.coefficients

    def term_matrix(self):
        """
        Return the 4x4 matrix of a single edge term.
        """
        return (
            self.c_I * np.kron(PAULI_I, PAULI_I)
            + self.c_X * np.kron(PAULI_X, PAULI_X)
            + self.c_Y * np.kron(PAULI_Y, PAULI_Y)
            + self.c_Z * np.kron(PAULI_Z, PAULI_Z)
        )

    def to_dict(self):
        return {
            "name": self.name,
            "c_I": self.c_I,
            "c_X": self.c_X,
            "c_Y": self.c_Y,
            "c_Z": self.c_Z,
        }

    def __str__(self):
        return self.name


PRESETS = {
    "MC": HamiltonianSpec("MC", 0.5, 0.0, 0.0, -0.5),
    "QMC": HamiltonianSpec("QMC", 0.5, -0.5, -0.5, -0.5),
    "XY": HamiltonianSpec("XY", 0.5, 0.0, -0.5, -0.5),
    "EPR": HamiltonianSpec("EPR", 0.5, 0.5, -0.5, 0.5),
}


def preset(name):
    """
    Look up one of the named Hamiltonians, case-insensitively.
    """
    if isinstance(name, HamiltonianSpec):
        return name
    try:
        return PRESETS[str(name).upper()]
    except KeyError:
        valid = ", ".join(PRESETS)
        raise UnknownHamiltonianException(
            f"Unknown Hamiltonian {name}; valid names are {valid}"
        )


class AnsatzKind(enum.Enum):
    """
    MC alternates ZZ phasers with a transverse-field mixer; XY applies a ZZ
    phaser then a YY phaser before each mixer layer.
    """

    MC = "mc"
    XY = "xy"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"Unknown ansatz {value}; valid kinds are mc, xy")

    def __str__(self):
        return self.value


def _as_angles(values):
    angles = tuple(float(v) for v in values)
    for angle in angles:
        if not math.isfinite(angle):
            raise ValueError(f"Angles must be finite: {angles}")
    return angles


@dataclass(frozen=True)
class AngleSchedule:
    """
    Depth-p angles for one of the ansatze. MC schedules carry gamma and
    beta; XY schedules carry gamma_z, gamma_y and beta.
    """

    kind: AnsatzKind
    beta: Tuple[float, ...]
    gamma: Tuple[float, ...] = ()
    gamma_y: Tuple[float, ...] = ()
    gamma_z: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", AnsatzKind.parse(self.kind))
        for name in ("beta", "gamma", "gamma_y", "gamma_z"):
            object.__setattr__(self, name, _as_angles(getattr(self, name)))

        p = len(self.beta)
        if p < 1:
            raise ScheduleMismatchException("A schedule needs at least one layer")
        if self.kind is AnsatzKind.MC:
            if len(self.gamma) != p or self.gamma_y or self.gamma_z:
                raise ScheduleMismatchException(
                    f"MC schedule needs {p} gamma values and no gamma_y/gamma_z"
                )
        else:
            if len(self.gamma_y) != p or len(self.gamma_z) != p or self.gamma:
                raise ScheduleMismatchException(
                    f"XY schedule needs {p} gamma_y and gamma_z values and no gamma"
                )

    @classmethod
    def mc(cls, gamma, beta):
        return cls(AnsatzKind.MC, beta=beta, gamma=gamma)

    @classmethod
    def xy(cls, gamma_z, gamma_y, beta):
        return cls(AnsatzKind.XY, beta=beta, gamma_y=gamma_y, gamma_z=gamma_z)

    @classmethod
    def zeros(cls, kind, p):
        kind = AnsatzKind.parse(kind)
        if kind is AnsatzKind.MC:
            return cls.mc([0.0] * p, [0.0] * p)
        return cls.xy([0.0] * p, [0.0] * p, [0.0] * p)

    @property
    def p(self):
        return len(self.beta)

    def phaser_angles(self):
        """
        The phaser angles in circuit order: gamma for MC, and
        (gamma_y_1, gamma_z_1, ..., gamma_y_p, gamma_z_p) for XY, whose rounds
        apply the YY phaser before the ZZ phaser.
        """
        if self.kind is AnsatzKind.MC:
            return self.gamma
        interleaved = []
        for y, z in zip(self.gamma_y, self.gamma_z):
            interleaved.extend((y, z))
        return tuple(interleaved)

    def as_xy(self):
        """
        The XY schedule with the same state: an MC schedule gains zero
        gamma_y.
        """
        if self.kind is AnsatzKind.XY:
            return self
        return AngleSchedule.xy(self.gamma, (0.0,) * self.p, self.beta)

    def require(self, kind, p):
        """
        Raise unless this schedule is of the given kind and depth.
        """
        kind = AnsatzKind.parse(kind)
        if self.kind is not kind or self.p != p:
            raise ScheduleMismatchException(
                f"Expected a {kind} schedule of depth {p}, "
                f"got {self.kind} of depth {self.p}"
            )
        return self

    def negated(self):
        return AngleSchedule(
            self.kind,
            beta=[-b for b in self.beta],
            gamma=[-g for g in self.gamma],
            gamma_y=[-g for g in self.gamma_y],
            gamma_z=[-g for g in self.gamma_z],
        )

    def with_final_beta(self, value):
        return AngleSchedule(
            self.kind,
            beta=self.beta[:-1] + (value,),
            gamma=self.gamma,
            gamma_y=self.gamma_y,
            gamma_z=self.gamma_z,
        )

    def padded(self, p):
        """
        Extend to depth p with trailing zero layers, which leave the state
        unchanged.
        """
        if p < self.p:
            raise ScheduleMismatchException(f"Cannot pad depth {self.p} down to {p}")
        extra = (0.0,) * (p - self.p)
        if self.kind is AnsatzKind.MC:
            return AngleSchedule.mc(self.gamma + extra, self.beta + extra)
        return AngleSchedule.xy(
            self.gamma_z + extra, self.gamma_y + extra, self.beta + extra
        )

    def to_dict(self):
        out = {"kind": self.kind.value, "p": self.p}
        if self.kind is AnsatzKind.MC:
            out["gamma"] = list(self.gamma)
        else:
            out["gamma_y"] = list(self.gamma_y)
            out["gamma_z"] = list(self.gamma_z)
        out["beta"] = list(self.beta)
        return out

    @classmethod
    def from_dict(cls, data):
        """
        Build a schedule from a dictionary, typically parsed from JSON. A
        document holding a "schedule" entry, as written by the optimizer, is
        accepted too.
        """
        if "schedule" in data and isinstance(data["schedule"], dict):
            data = data["schedule"]
        try:
            kind = AnsatzKind.parse(data["kind"])
            if kind is AnsatzKind.MC:
                schedule = cls.mc(data["gamma"], data["beta"])
            else:
                schedule = cls.xy(data["gamma_z"], data["gamma_y"], data["beta"])
        except KeyError as ke:
            raise ScheduleMismatchException(f"Schedule is missing the field {ke}")
        except ValueError as ve:
            raise ScheduleMismatchException(str(ve))
        if "p" in data and int(data["p"]) != schedule.p:
            raise ScheduleMismatchException(
                f"Schedule declares p={data['p']} but carries {schedule.p} layers"
            )
        return schedule

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, fp):
        try:
            return cls.from_dict(json.load(fp))
        except json.JSONDecodeError as jde:
            raise ScheduleMismatchException(f"Schedule file is not JSON: {jde}")


class Graph:
    """
    A simple undirected unweighted graph on vertices 0..n-1. The edge list
    keeps the order it was given in, with each pair stored as (low, high).
    """

    def __init__(self, n, edges):
        if n < 0:
            raise GraphFormatException(f"Vertex count must be non-negative, got {n}")
        g = nx.Graph()
        g.add_nodes_from(range(n))
        normalized = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatException(f"Edge ({u}, {v}) leaves [0, {n})")
            if u == v:
                raise GraphFormatException(f"Self-loop at vertex {u}")
            if g.has_edge(u, v):
                raise GraphFormatException(f"Parallel edge ({u}, {v})")
            g.add_edge(u, v)
            normalized.append((min(u, v), max(u, v)))
        self._graph = nx.freeze(g)
        self._edges = tuple(normalized)

    @classmethod
    def from_networkx(cls, g):
        g = nx.convert_node_labels_to_integers(g)
        return cls(g.number_of_nodes(), g.edges())

    @classmethod
    def read_edge_list(cls, fp):
        """
        Parse the plain-text format: a header line "n m", then m lines "u v".
        Blank lines and lines starting with # are ignored.
        """
        lines = [
            line.split()
            for line in fp
            if line.strip() and not line.lstrip().startswith("#")
        ]
        if not lines or len(lines[0]) != 2:
            raise GraphFormatException("Expected a header line 'n m'")
        try:
            n, m = int(lines[0][0]), int(lines[0][1])
            edges = [(int(u), int(v)) for u, v in lines[1:]]
        except ValueError as ve:
            raise GraphFormatException(f"Unparseable graph file: {ve}")
        if len(edges) != m:
            raise GraphFormatException(f"Header promises {m} edges, found {len(edges)}")
        return cls(n, edges)

    def write_edge_list(self, fp):
        fp.write(f"{self.n} {self.m}\n")
        for u, v in self._edges:
            fp.write(f"{u} {v}\n")

    @property
    def n(self):
        return self._graph.number_of_nodes()

    @property
    def m(self):
        return len(self._edges)

    @property
    def edges(self):
        return self._edges

    @property
    def networkx(self):
        """A read-only networkx view of this graph."""
        return self._graph

    @property
    def adjacency(self):
        return {u: frozenset(self._graph[u]) for u in range(self.n)}

    def neighbors(self, u):
        return frozenset(self._graph[u])

    def degree(self, u):
        return self._graph.degree(u)

    def triangle_count(self, u, v):
        """
        Number of triangles through the edge (u, v): the common neighbours.
        """
        return sum(1 for _ in nx.common_neighbors(self._graph, u, v))

    def is_bipartite(self):
        return nx.is_bipartite(self._graph)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class GluedTree:
    """
    Two complete D-ary trees of the given depth, joined by an edge between
    their roots. Every non-leaf vertex has degree D+1.
    """

    graph: Graph
    left: int
    right: int
    D: int
    depth: int

    @property
    def edge(self):
        return (self.left, self.right)


def glued_tree_size(D, depth):
    return 2 * sum(D ** i for i in range(depth + 1))


def build_glued_tree(D, depth, vertex_cap=DEFAULT_VERTEX_CAP):
    """
    Build the glued tree pair. The roots are vertices 0 (left) and 1 (right)
    and the other vertices are numbered breadth-first, alternating sides.
    """
    if D < 1 or depth < 0:
        raise ValueError(f"Need D >= 1 and depth >= 0, got D={D}, depth={depth}")
    size = glued_tree_size(D, depth)
    if size > vertex_cap:
        raise VertexCapExceededException(
            f"Glued tree with D={D}, depth={depth} has {size} vertices, "
            f"above the cap of {vertex_cap}"
        )

    edges = [(0, 1)]
    frontiers = [[0], [1]]
    next_vertex = 2
    for _ in range(depth):
        for side, frontier in enumerate(frontiers):
            children = []
            for parent in frontier:
                for _ in range(D):
                    edges.append((parent, next_vertex))
                    children.append(next_vertex)
                    next_vertex += 1
            frontiers[side] = children
    return GluedTree(Graph(size, edges), 0, 1, D, depth)


def nu_from_energy(spec, per_edge_energy, D):
    """
    Normalized energy: sqrt(D) times the per-edge energy above the value of
    the maximally mixed state.
    """
    if D < 1:
        raise ValueError(f"D must be at least 1, got {D}")
    return math.sqrt(D) * (per_edge_energy - spec.c_I)


def energy_from_nu(spec, nu, D):
    if D < 1:
        raise ValueError(f"D must be at least 1, got {D}")
    return spec.c_I + nu / math.sqrt(D)


@dataclass(frozen=True)
class EnergyReport:
    """
    Per-edge energy of an ansatz on a Hamiltonian. D of None stands for the
    infinite-degree limit, where only nu is finite and there are no edge
    expectations to report.
    """

    spec: HamiltonianSpec
    per_edge_energy: Optional[float]
    nu: float
    edge_expectations: Optional[Tuple[float, float, float]] = None
    D: Optional[int] = None

    @classmethod
    def from_expectations(cls, spec, expectations, D):
        xx, yy, zz = expectations
        energy = spec.edge_energy(xx, yy, zz)
        return cls(
            spec=spec,
            per_edge_energy=energy,
            nu=nu_from_energy(spec, energy, D),
            edge_expectations=(xx, yy, zz),
            D=D,
        )

    @classmethod
    def from_nu(cls, spec, nu):
        return cls(spec=spec, per_edge_energy=None, nu=nu)

    def to_dict(self):
        out = {
            "hamiltonian": self.spec.name,
            "D": "inf" if self.D is None else self.D,
            "per_edge_energy": self.per_edge_energy,
            "nu": self.nu,
        }
        if self.edge_expectations is not None:
            out["xx"], out["yy"], out["zz"] = self.edge_expectations
        return out


class ValidationException(Exception):
    """
    Base class for rejections of user-supplied input.
    """


class UnknownHamiltonianException(ValidationException):
    """
    Raised for a Hamiltonian name that is not a preset.
    """


class ScheduleMismatchException(ValidationException):
    """
    Raised when an angle schedule has the wrong kind, depth or layout.
    """


class GraphFormatException(ValidationException):
    """
    Raised when a graph is not simple or its file cannot be parsed.
    """


class VertexCapExceededException(ValidationException):
    """
    Raised when a graph or tree would exceed a configured vertex cap.
    """


class TableSizeExceededException(ValidationException):
    """
    Raised when a configuration table would exceed its depth cap.
    """


class DivergentChannelException(ValidationException):
    """
    Raised when a normalized energy has no finite infinite-degree limit.
    """


class NonSymmetricTermException(ValidationException):
    """
    Raised when a two-qubit term is not symmetric under swapping the qubits.
    """


class UnsupportedHamiltonianException(ValidationException):
    """
    Raised when an operation only supports some of the Hamiltonians.
    """


class MissingReferenceException(ValidationException):
    """
    Raised when no stored reference value exists for the request.
    """


class InvalidSettingException(ValidationException, ValueError):
    """
    Raised for an out-of-range run setting such as a worker count or an
    optimizer option.
    """


class ImaginaryResidueException(Exception):
    """
    Raised if a quantity that must be real keeps an imaginary part.
    """


class NonFiniteObjectiveException(Exception):
    """
    Raised if an objective evaluates to NaN or infinity.
    """
