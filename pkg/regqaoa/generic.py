"""
Expectation values of permutation-symmetric k-local terms under ansatze with
q phaser sub-layers per round, on (D+1)-regular k-uniform hypergraphs whose
girth exceeds the light cone.

Sub-layer j of round l applies exp(i gamma_(l,j)/sqrt(D) sum_e h_j^(x)k),
where h_j is the traceless part of the phaser rescaled to eigenvalues +-1, and
each round ends with a single-qubit mixer on every qubit. Configurations have
length 2pq+1: entry (l-1)q + j-1 holds the h_j eigenvalue in round l on the
bra side, the center holds the eigenvalue of the measured operator, and the
ket side mirrors the bra side.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .finitedeg import x_mixer
from .model import (
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    NonSymmetricTermException,
    ScheduleMismatchException,
    TableSizeExceededException,
    ValidationException,
    VertexCapExceededException,
)
from .tools import chain_product, checked_real, configuration_table, xor_convolve

GENERIC_MAX_LENGTH = 21
UNITARY_TOLERANCE = 1e-12

PLUS_STATE = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
EIGENVALUES = np.diag([1.0, -1.0]).astype(complex)


def rescaled_traceless(h):
    """
    The traceless part of a 2x2 Hermitian matrix, scaled to eigenvalues +-1,
    together with the (trace/2, scale) pair that undoes the rescaling.
    """
    h = np.asarray(h, dtype=complex)
    offset = np.trace(h).real / 2
    traceless = h - offset * PAULI_I
    scale = float(np.linalg.eigvalsh(traceless)[-1])
    if scale < UNITARY_TOLERANCE:
        raise ValidationException(f"{h.tolist()} is proportional to the identity")
    return traceless / scale, offset, scale


@dataclass(frozen=True, eq=False)
class PhaserBasis:
    """
    A phaser generator h with Q holding the eigenvectors of its rescaled
    traceless part: column 0 for eigenvalue +1 and column 1 for -1.
    """

    h: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        Q = np.asarray(self.Q, dtype=complex)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "Q", Q)
        if h.shape != (2, 2) or not np.allclose(h, h.conj().T, atol=UNITARY_TOLERANCE):
            raise ValidationException(f"Phaser {h.tolist()} is not 2x2 Hermitian")
        if not np.allclose(Q.conj().T @ Q, PAULI_I, atol=UNITARY_TOLERANCE):
            raise ValidationException(f"Eigenbasis {Q.tolist()} is not unitary")
        rebuilt = Q @ EIGENVALUES @ Q.conj().T
        if not np.allclose(rebuilt, self.rescaled, atol=UNITARY_TOLERANCE):
            raise ValidationException("Eigenbasis does not diagonalize the phaser")

    @classmethod
    def from_hermitian(cls, h):
        _, vectors = np.linalg.eigh(rescaled_traceless(h)[0])
        return cls(h, vectors[:, ::-1])

    @property
    def rescaled(self):
        return rescaled_traceless(self.h)[0]


@dataclass(frozen=True, eq=False)
class GenericAnsatz:
    k: int
    q: int
    p: int
    bases: Tuple[PhaserBasis, ...]
    mixer: Callable = x_mixer
    initial: np.ndarray = PLUS_STATE

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(self.bases))
        object.__setattr__(self, "initial", np.asarray(self.initial, dtype=complex))
        if self.k < 2 or self.q < 1 or self.p < 1:
            raise ValidationException(
                f"Need k >= 2, q >= 1, p >= 1; got k={self.k}, q={self.q}, p={self.p}"
            )
        if len(self.bases) != self.q:
            raise ValidationException(
                f"{self.q} sub-layers need {self.q} phaser bases, got {len(self.bases)}"
            )
        if not np.allclose(self.mixer(0.0), PAULI_I, atol=UNITARY_TOLERANCE):
            raise ValidationException("The mixer at angle 0 must be the identity")
        if abs(np.linalg.norm(self.initial) - 1) > UNITARY_TOLERANCE:
            raise ValidationException("The initial state must be normalized")

    @property
    def configuration_length(self):
        return 2 * self.p * self.q + 1

    @property
    def center(self):
        return self.p * self.q


@dataclass(frozen=True, eq=False)
class SymmetricTermDecomposition:
    """
    A k-qubit term written as sum_a c_a (h_a)^(x)k.
    """

    k: int
    terms: Tuple[Tuple[float, np.ndarray], ...]

    def matrix(self):
        size = 1 << self.k
        out = np.zeros((size, size), dtype=complex)
        for coefficient, h in self.terms:
            power = np.ones((1, 1), dtype=complex)
            for _ in range(self.k):
                power = np.kron(power, h)
            out += coefficient * power
        return out


def decomposition_from_spec(spec):
    """The four diagonal Pauli products of an edge term, zeros dropped."""
    terms = [
        (coefficient, pauli)
        for coefficient, pauli in zip(
            spec.coefficients, (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)
        )
        if coefficient != 0
    ]
    return SymmetricTermDecomposition(2, tuple(terms))


def decompose_two_local(term, tolerance=1e-10):
    """
    Decompose a swap-symmetric two-qubit Hermitian term. Diagonal Pauli
    correlations become axis terms, correlated axes are rotated onto the
    eigenvectors of the correlation matrix, and single-qubit parts are folded
    into (I+P)^(x)2 and (I-P)^(x)2 terms.
    """
    term = np.asarray(term, dtype=complex)
    if term.shape != (4, 4) or not np.allclose(term, term.conj().T, atol=tolerance):
        raise ValidationException("A two-local term must be a 4x4 Hermitian matrix")
    if not np.allclose(SWAP @ term @ SWAP, term, atol=tolerance):
        raise NonSymmetricTermException("Term changes under swapping the two qubits")

    paulis = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)
    coefficients = np.array(
        [[np.trace(term @ np.kron(a, b)).real / 4 for b in paulis] for a in paulis]
    )
    terms = []
    if abs(coefficients[0, 0]) > tolerance:
        terms.append((float(coefficients[0, 0]), PAULI_I))

    correlations = coefficients[1:, 1:]
    off_diagonal = correlations - np.diag(np.diag(correlations))
    if np.max(np.abs(off_diagonal)) <= tolerance:
        for axis, pauli in enumerate(paulis[1:]):
            if abs(correlations[axis, axis]) > tolerance:
                terms.append((float(correlations[axis, axis]), pauli))
    else:
        values, vectors = np.linalg.eigh(correlations)
        for value, vector in zip(values, vectors.T):
            if abs(value) > tolerance:
                axis = sum(c * pauli for c, pauli in zip(vector, paulis[1:]))
                terms.append((float(value), axis))

    field = coefficients[0, 1:]
    strength = float(np.linalg.norm(field))
    if strength > tolerance:
        axis = sum(c * pauli for c, pauli in zip(field / strength, paulis[1:]))
        terms.append((strength / 2, PAULI_I + axis))
        terms.append((-strength / 2, PAULI_I - axis))

    decomposition = SymmetricTermDecomposition(2, tuple(terms))
    error = np.max(np.abs(decomposition.matrix() - term))
    if error > tolerance:
        raise ValidationException(f"Decomposition misses the term by {error:.2e}")
    return decomposition


def _flat_gammas(gamma):
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    return np.concatenate([gamma, [0.0], -gamma[::-1]])


def generic_f_table(ansatz, beta, center_basis, table=None):
    """
    f for every configuration, given the eigenbasis measured at the center.
    The end factors <psi|v> and <v|psi> carry the normalization, so the
    values sum to one.
    """
    p, q = ansatz.p, ansatz.q
    if table is None:
        table = configuration_table(ansatz.configuration_length)
    bra_side = [basis.Q for _ in range(p) for basis in ansatz.bases]
    positions = bra_side + [np.asarray(center_basis, dtype=complex)] + bra_side[::-1]

    bra_ops = []
    for i in range(p * q):
        if i % q == q - 1:
            bra_ops.append(ansatz.mixer(beta[i // q]).conj().T)
        else:
            bra_ops.append(PAULI_I)
    ops = bra_ops + [op.conj().T for op in reversed(bra_ops)]

    transfers = [
        positions[t].conj().T @ ops[t] @ positions[t + 1] for t in range(len(ops))
    ]
    left = ansatz.initial.conj() @ positions[0]
    right = positions[-1].conj().T @ ansatz.initial
    return chain_product(table, transfers, left, right)


def _check_inputs(ansatz, D, gamma, beta, max_length):
    if len(np.ravel(gamma)) != ansatz.p * ansatz.q or len(beta) != ansatz.p:
        raise ScheduleMismatchException(
            f"Need {ansatz.p * ansatz.q} gammas and {ansatz.p} betas, "
            f"got {len(np.ravel(gamma))} and {len(beta)}"
        )
    if D < 1:
        raise ValueError(f"D must be at least 1, got {D}")
    if ansatz.configuration_length > max_length:
        raise TableSizeExceededException(
            f"Configurations of length {ansatz.configuration_length} exceed "
            f"the cap of {max_length}"
        )


def generic_h_levels(ansatz, D, gamma, f, table, workers=1, method="walsh"):
    """
    Yield the H tables of the hypertree recursion: each level is the D-th
    power of the phase kernel convolved with k-1 copies of f H.
    """
    gammas = _flat_gammas(gamma)
    kernel = np.exp(-1j * (table @ gammas) / math.sqrt(D))
    h = np.ones(table.shape[0], dtype=complex)
    for _ in range(ansatz.p * ansatz.q):
        weights = [f * h] * (ansatz.k - 1)
        h = xor_convolve(kernel, *weights, workers=workers, method=method) ** D
        yield h


def _power_expectations(ansatz, D, gamma, beta, basis, table, workers, method):
    """
    E_s for s = 0..k: the expectation of the product of h' on s of the k
    qubits of the central hyperedge and identity on the rest.
    """
    f = generic_f_table(ansatz, beta, basis, table)
    h = np.ones(table.shape[0], dtype=complex)
    for h in generic_h_levels(ansatz, D, gamma, f, table, workers, method):
        pass
    gammas = _flat_gammas(gamma)
    kernel = np.exp(-1j * (table @ gammas) / math.sqrt(D))
    plain = f * h
    signed = plain * table[:, ansatz.center]
    values = []
    for s in range(ansatz.k + 1):
        weights = [signed] * s + [plain] * (ansatz.k - s)
        values.append(
            xor_convolve(kernel, *weights, workers=workers, method=method)[0]
        )
    return values


def generic_edge_expectation(
    ansatz,
    D,
    decomposition,
    gamma,
    beta,
    workers=1,
    method="walsh",
    max_length=GENERIC_MAX_LENGTH,
):
    """
    Expectation of sum_a c_a (h_a)^(x)k on a hyperedge. Each h_a = aI + b h'
    expands binomially into products of the rescaled h' on subsets of the
    qubits, all of which are evaluated in the eigenbasis of h'.
    """
    log = logging.getLogger("generic")
    _check_inputs(ansatz, D, gamma, beta, max_length)
    if decomposition.k != ansatz.k:
        raise ValidationException(
            f"Decomposition is {decomposition.k}-local "
            f"but the ansatz is {ansatz.k}-local"
        )
    table = configuration_table(ansatz.configuration_length)
    total = 0.0
    for coefficient, h in decomposition.terms:
        h = np.asarray(h, dtype=complex)
        offset = np.trace(h).real / 2
        if np.allclose(h, offset * PAULI_I, atol=UNITARY_TOLERANCE):
            total += coefficient * offset**ansatz.k
            continue
        rescaled, offset, scale = rescaled_traceless(h)
        basis = PhaserBasis.from_hermitian(rescaled)
        powers = _power_expectations(
            ansatz, D, gamma, beta, basis.Q, table, workers, method
        )
        value = sum(
            math.comb(ansatz.k, s) * offset ** (ansatz.k - s) * scale**s * powers[s]
            for s in range(ansatz.k + 1)
        )
        log.debug(f"term {coefficient} x {h.tolist()}: {value}")
        total += coefficient * value
    return checked_real(total, "generic expectation")


@dataclass(frozen=True)
class GluedHypertree:
    """
    Two-sided hypertree around a central hyperedge on vertices 0..k-1: every
    non-leaf vertex lies in D+1 hyperedges.
    """

    n: int
    hyperedges: Tuple[Tuple[int, ...], ...]
    central: Tuple[int, ...]


def glued_hypertree(k, D, depth, vertex_cap=24):
    size = k * sum((D * (k - 1)) ** i for i in range(depth + 1))
    if size > vertex_cap:
        raise VertexCapExceededException(
            f"Hypertree with k={k}, D={D}, depth={depth} has {size} vertices, "
            f"above the cap of {vertex_cap}"
        )
    central = tuple(range(k))
    hyperedges = [central]
    frontier = list(central)
    next_vertex = k
    for _ in range(depth):
        children = []
        for parent in frontier:
            for _ in range(D):
                members = tuple(range(next_vertex, next_vertex + k - 1))
                hyperedges.append((parent,) + members)
                children.extend(members)
                next_vertex += k - 1
        frontier = children
    return GluedHypertree(size, tuple(hyperedges), central)


def matrix_from_pairs(rows):
    """
    A complex matrix written entrywise as [real, imaginary] pairs.
    """
    try:
        data = np.asarray(rows, dtype=float)
    except (TypeError, ValueError):
        raise ValidationException(f"Matrix {rows} is not numeric")
    if data.ndim != 3 or data.shape[-1] != 2:
        raise ValidationException(
            f"Matrices are written as [[[re, im], ...], ...]; got shape {data.shape}"
        )
    return data[..., 0] + 1j * data[..., 1]


def ansatz_from_document(doc):
    """
    Build (ansatz, gamma, beta, decomposition) from a parsed JSON document
    with keys k, bases (phaser generators), gamma (one row of q angles per
    round), beta, and optionally terms as [coefficient, matrix] pairs. The
    decomposition is None when the document carries no terms.
    """
    try:
        bases = [PhaserBasis.from_hermitian(matrix_from_pairs(b)) for b in doc["bases"]]
        gamma = np.asarray(doc["gamma"], dtype=float)
        beta = [float(b) for b in doc["beta"]]
        k = int(doc.get("k", 2))
    except KeyError as ke:
        raise ValidationException(f"Generic ansatz document is missing {ke}")
    if gamma.size != len(beta) * len(bases):
        raise ScheduleMismatchException(
            f"{len(beta)} rounds of {len(bases)} sub-layers need "
            f"{len(beta) * len(bases)} gammas, got {gamma.size}"
        )
    gamma = gamma.reshape(len(beta), len(bases))
    ansatz = GenericAnsatz(k=k, q=len(bases), p=len(beta), bases=bases)
    decomposition = None
    if "terms" in doc:
        terms = tuple(
            (float(coefficient), matrix_from_pairs(matrix))
            for coefficient, matrix in doc["terms"]
        )
        decomposition = SymmetricTermDecomposition(k, terms)
    return ansatz, gamma, beta, decomposition
