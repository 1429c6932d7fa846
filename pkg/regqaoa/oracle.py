"""
Exact statevector simulation of the ansatze on small explicit graphs, and
extremal eigenvalues of the Hamiltonians on them.

Qubits are little-endian: qubit q is bit q of the amplitude index, with bit
value 0 for the Z eigenvalue +1.
"""

import logging
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .finitedeg import Y_BASIS, light_cone_levels, x_mixer
from .model import (
    PAULI_Y,
    AnsatzKind,
    ValidationException,
    VertexCapExceededException,
    build_glued_tree,
)

DEFAULT_QUBIT_CAP = 22
DENSE_EIGEN_CAP = 12
SPARSE_EIGEN_CAP = 20


@dataclass(frozen=True)
class StateVector:
    n: int
    amplitudes: np.ndarray

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


def _check_qubits(n, cap):
    if n > cap:
        raise VertexCapExceededException(
            f"Simulating {n} qubits exceeds the cap of {cap}"
        )


def _index(n):
    return np.arange(1 << n, dtype=np.int64)


def _parity_signs(index, qubits):
    parity = np.zeros_like(index)
    for q in qubits:
        parity ^= (index >> q) & 1
    return 1 - 2 * parity


def zz_diagonal(n, edges):
    """For every basis state, the sum over (hyper)edges of the product of z."""
    index = _index(n)
    total = np.zeros(1 << n, dtype=np.int64)
    for edge in edges:
        total += _parity_signs(index, edge)
    return total


def apply_single_qubit(amplitudes, n, qubit, gate):
    view = amplitudes.reshape(1 << (n - qubit - 1), 2, 1 << qubit)
    return np.einsum("ab,ibj->iaj", gate, view).reshape(-1)


def apply_all(amplitudes, n, gate):
    for qubit in range(n):
        amplitudes = apply_single_qubit(amplitudes, n, qubit, gate)
    return amplitudes


def simulate(g, schedule, d_scale, qubit_cap=DEFAULT_QUBIT_CAP):
    """
    Apply the ansatz to |+>^n on graph g, scaling the phasers by
    1/sqrt(d_scale). Each MC layer is exp(i gamma/sqrt(d) sum ZZ) followed by
    exp(-i beta sum X); XY layers apply exp(i gamma_y/sqrt(d) sum YY) before
    the ZZ phaser.
    """
    n = g.n
    _check_qubits(n, qubit_cap)
    scale = 1.0 / math.sqrt(d_scale)
    amplitudes = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=complex)
    cost = zz_diagonal(n, g.edges) * scale

    if schedule.kind is AnsatzKind.MC:
        layers = [(gz, None, b) for gz, b in zip(schedule.gamma, schedule.beta)]
    else:
        layers = list(zip(schedule.gamma_z, schedule.gamma_y, schedule.beta))
    for gamma_z, gamma_y, beta in layers:
        if gamma_y is not None:
            amplitudes = apply_all(amplitudes, n, Y_BASIS.conj().T)
            amplitudes = amplitudes * np.exp(1j * gamma_y * cost)
            amplitudes = apply_all(amplitudes, n, Y_BASIS)
        amplitudes = amplitudes * np.exp(1j * gamma_z * cost)
        amplitudes = apply_all(amplitudes, n, x_mixer(beta))
    return StateVector(n, amplitudes)


def simulate_generic(
    n, hyperedges, ansatz, gamma, beta, d_scale, qubit_cap=DEFAULT_QUBIT_CAP
):
    """
    Apply a generic ansatz to psi^n on an explicit hypergraph. Sub-layer j of
    round l is exp(i gamma_(l,j)/sqrt(d) sum_e h_j^(x)k) in the eigenbasis of
    the rescaled phaser h_j, followed each round by the mixer on every qubit.
    """
    _check_qubits(n, qubit_cap)
    scale = 1.0 / math.sqrt(d_scale)
    amplitudes = reduce(np.kron, [np.asarray(ansatz.initial, dtype=complex)] * n)
    cost = zz_diagonal(n, hyperedges) * scale
    gamma = np.asarray(gamma, dtype=float).reshape(ansatz.p, ansatz.q)
    for layer, b in enumerate(beta):
        for basis, g in zip(ansatz.bases, gamma[layer]):
            amplitudes = apply_all(amplitudes, n, basis.Q.conj().T)
            amplitudes = amplitudes * np.exp(1j * g * cost)
            amplitudes = apply_all(amplitudes, n, basis.Q)
        amplitudes = apply_all(amplitudes, n, ansatz.mixer(b))
    return StateVector(n, amplitudes)


def edge_observables(state, edge):
    """
    Return (<XX>, <YY>, <ZZ>) on the edge by permuting amplitudes.
    """
    u, v = edge
    index = _index(state.n)
    psi = state.amplitudes
    flipped = psi[index ^ ((1 << u) | (1 << v))]
    signs = _parity_signs(index, (u, v))
    xx = np.vdot(psi, flipped)
    yy = -np.vdot(psi, signs * flipped)
    zz = np.sum(np.abs(psi) ** 2 * signs)
    return float(xx.real), float(yy.real), float(zz)


def product_expectation(state, operators):
    """
    <psi| prod_q O_q |psi> for a mapping of qubit to 2x2 operator.
    """
    phi = state.amplitudes
    for qubit, operator in operators.items():
        phi = apply_single_qubit(phi, state.n, qubit, np.asarray(operator))
    return complex(np.vdot(state.amplitudes, phi))


def apply_pauli_y(state, qubits):
    amplitudes = state.amplitudes
    for qubit in qubits:
        amplitudes = apply_single_qubit(amplitudes, state.n, qubit, PAULI_Y)
    return StateVector(state.n, amplitudes)


def basis_state(n, ones=()):
    """The computational basis state with the given qubits set to 1."""
    amplitudes = np.zeros(1 << n, dtype=complex)
    amplitudes[sum(1 << q for q in ones)] = 1.0
    return StateVector(n, amplitudes)


def energy(state, g, spec):
    return sum(spec.edge_energy(*edge_observables(state, edge)) for edge in g.edges)


def hamiltonian_matrix(g, spec):
    """
    The Hamiltonian on g as a sparse real symmetric matrix.
    """
    n = g.n
    index = _index(n)
    diagonal = np.full(1 << n, g.m * spec.c_I, dtype=float)
    rows, cols, data = [index], [index], []
    for u, v in g.edges:
        signs = _parity_signs(index, (u, v))
        diagonal += spec.c_Z * signs
        # <x^m| (c_X XX + c_Y YY) |x> = c_X - c_Y z_u z_v
        rows.append(index ^ ((1 << u) | (1 << v)))
        cols.append(index)
        data.append(spec.c_X - spec.c_Y * signs)
    data.insert(0, diagonal)
    matrix = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(1 << n, 1 << n),
    )
    return matrix.tocsr()


def extremal_energy(g, spec, dense_cap=DENSE_EIGEN_CAP, sparse_cap=SPARSE_EIGEN_CAP):
    """
    Largest eigenvalue of the Hamiltonian on g: dense up to dense_cap qubits,
    Lanczos up to sparse_cap.
    """
    log = logging.getLogger("oracle")
    if g.n > sparse_cap:
        raise VertexCapExceededException(
            f"Diagonalizing {g.n} qubits exceeds the cap of {sparse_cap}"
        )
    if g.m == 0:
        return 0.0
    matrix = hamiltonian_matrix(g, spec)
    if g.n <= dense_cap:
        return float(np.linalg.eigvalsh(matrix.toarray())[-1])
    log.debug(f"Using eigsh for {g.n} qubits")
    values = eigsh(matrix, k=1, which="LA", return_eigenvectors=False)
    return float(values[0])


def glued_tree_check(schedule, D, evaluate, qubit_cap=DEFAULT_QUBIT_CAP):
    """
    Return the largest deviation between evaluate(schedule, D) and the
    statevector expectations on the central edge of the glued tree that
    contains the light cone.
    """
    tree = build_glued_tree(D, light_cone_levels(schedule.kind, schedule.p))
    if tree.graph.n > qubit_cap:
        raise ValidationException(
            f"The glued tree for {schedule.kind} p={schedule.p} D={D} has "
            f"{tree.graph.n} qubits, above the cap of {qubit_cap}"
        )
    exact = edge_observables(simulate(tree.graph, schedule, D, qubit_cap), tree.edge)
    iterated = evaluate(schedule, D)
    return max(abs(a - b) for a, b in zip(exact, iterated))
