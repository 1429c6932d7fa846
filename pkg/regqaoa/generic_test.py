import json
import unittest
from pathlib import Path

import numpy as np

from .finitedeg import ansatz_energy
from .generic import (
    GenericAnsatz,
    PhaserBasis,
    SymmetricTermDecomposition,
    ansatz_from_document,
    decompose_two_local,
    decomposition_from_spec,
    generic_edge_expectation,
    glued_hypertree,
    matrix_from_pairs,
    rescaled_traceless,
)
from .model import (
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    AngleSchedule,
    NonSymmetricTermException,
    ScheduleMismatchException,
    TableSizeExceededException,
    ValidationException,
    VertexCapExceededException,
    preset,
)
from .oracle import product_expectation, simulate_generic

test_tools = Path(__file__).absolute().parent.parent / "test_tools"


def z_basis():
    return PhaserBasis.from_hermitian(PAULI_Z)


class TestPhaserBasis(unittest.TestCase):
    def test_rescaling(self):
        rescaled, offset, scale = rescaled_traceless(3 * PAULI_I + 2 * PAULI_X)
        np.testing.assert_allclose(rescaled, PAULI_X)
        self.assertAlmostEqual(offset, 3.0)
        self.assertAlmostEqual(scale, 2.0)
        with self.assertRaises(ValidationException):
            rescaled_traceless(PAULI_I)

    def test_eigenbasis(self):
        basis = z_basis()
        np.testing.assert_allclose(np.abs(basis.Q), np.eye(2))

    def test_wrong_eigenbasis(self):
        with self.assertRaises(ValidationException):
            PhaserBasis(PAULI_Z, np.array([[0, 1], [1, 0]]))

    def test_ansatz_validation(self):
        with self.assertRaises(ValidationException):
            GenericAnsatz(k=2, q=2, p=1, bases=[z_basis()])
        with self.assertRaises(ValidationException):
            GenericAnsatz(k=1, q=1, p=1, bases=[z_basis()])


class TestReductions(unittest.TestCase):
    def test_z_basis_is_mc(self):
        ansatz = GenericAnsatz(k=2, q=1, p=2, bases=[z_basis()])
        rng = np.random.default_rng(21)
        for _ in range(50):
            gamma, beta = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
            schedule = AngleSchedule.mc(gamma, beta)
            for name in ("QMC", "XY", "EPR"):
                spec = preset(name)
                expected = ansatz_energy(spec, 2, 2, schedule)
                actual = generic_edge_expectation(
                    ansatz, 2, decomposition_from_spec(spec), gamma[:, None], beta
                )
                self.assertAlmostEqual(actual, expected.per_edge_energy, delta=1e-9)

    def test_y_then_z_bases_are_xy(self):
        bases = [PhaserBasis.from_hermitian(PAULI_Y), z_basis()]
        ansatz = GenericAnsatz(k=2, q=2, p=1, bases=bases)
        rng = np.random.default_rng(22)
        for _ in range(50):
            gamma_y, gamma_z, beta = rng.uniform(-1, 1, 3)
            schedule = AngleSchedule.xy([gamma_z], [gamma_y], [beta])
            for name in ("QMC", "XY", "EPR"):
                spec = preset(name)
                expected = ansatz_energy(spec, 1, 3, schedule)
                decomposition = decomposition_from_spec(spec)
                actual = generic_edge_expectation(
                    ansatz, 3, decomposition, [[gamma_y, gamma_z]], [beta]
                )
                self.assertAlmostEqual(actual, expected.per_edge_energy, delta=1e-9)

    def test_eigenvector_phases(self):
        rng = np.random.default_rng(23)
        y_basis = PhaserBasis.from_hermitian(PAULI_Y)
        plain = GenericAnsatz(k=2, q=2, p=1, bases=[y_basis, z_basis()])
        decomposition = decomposition_from_spec(preset("EPR"))
        for _ in range(5):
            phases = np.diag(np.exp(1j * rng.uniform(-np.pi, np.pi, 2)))
            rephased = GenericAnsatz(
                k=2,
                q=2,
                p=1,
                bases=[PhaserBasis(PAULI_Y, y_basis.Q @ phases), z_basis()],
            )
            gamma, beta = rng.uniform(-1, 1, (1, 2)), rng.uniform(-1, 1, 1)
            self.assertAlmostEqual(
                generic_edge_expectation(rephased, 2, decomposition, gamma, beta),
                generic_edge_expectation(plain, 2, decomposition, gamma, beta),
                delta=1e-10,
            )

    def test_input_checks(self):
        ansatz = GenericAnsatz(k=2, q=1, p=1, bases=[z_basis()])
        decomposition = decomposition_from_spec(preset("QMC"))
        with self.assertRaises(ScheduleMismatchException):
            generic_edge_expectation(ansatz, 1, decomposition, [[0.1], [0.2]], [0.3])
        with self.assertRaises(ValueError):
            generic_edge_expectation(ansatz, 0, decomposition, [[0.1]], [0.3])
        with self.assertRaises(TableSizeExceededException):
            generic_edge_expectation(
                ansatz, 1, decomposition, [[0.1]], [0.3], max_length=2
            )
        three_local = SymmetricTermDecomposition(3, ((1.0, PAULI_Z),))
        with self.assertRaises(ValidationException):
            generic_edge_expectation(ansatz, 1, three_local, [[0.1]], [0.3])


class TestHypertree(unittest.TestCase):
    def test_shape(self):
        tree = glued_hypertree(3, 1, 1)
        self.assertEqual(tree.n, 9)
        self.assertEqual(len(tree.hyperedges), 4)
        self.assertEqual(tree.central, (0, 1, 2))

    def test_cap(self):
        with self.assertRaises(VertexCapExceededException):
            glued_hypertree(3, 3, 2)

    def test_three_local_matches_statevector(self):
        ansatz = GenericAnsatz(k=3, q=1, p=1, bases=[z_basis()])
        tree = glued_hypertree(3, 1, 1)
        for gamma, beta in ((0.4, 0.3), (-0.7, 0.55)):
            state = simulate_generic(
                tree.n, tree.hyperedges, ansatz, [[gamma]], [beta], 1
            )
            for pauli in (PAULI_X, PAULI_Z):
                exact = product_expectation(state, {q: pauli for q in tree.central})
                term = SymmetricTermDecomposition(3, ((1.0, pauli),))
                iterated = generic_edge_expectation(
                    ansatz, 1, term, [[gamma]], [beta]
                )
                self.assertAlmostEqual(iterated, exact.real, delta=1e-9)


class TestDecomposition(unittest.TestCase):
    def test_presets_reconstruct(self):
        for name in ("QMC", "XY", "EPR", "MC"):
            term = preset(name).term_matrix()
            np.testing.assert_allclose(
                decompose_two_local(term).matrix(), term, atol=1e-10
            )

    def test_fields_and_rotated_axes(self):
        axis = (PAULI_X + PAULI_Z) / np.sqrt(2)
        term = (
            np.kron(axis, axis)
            + 0.3 * np.kron(PAULI_Y, PAULI_Y)
            + 0.5 * (np.kron(PAULI_Z, PAULI_I) + np.kron(PAULI_I, PAULI_Z))
        )
        np.testing.assert_allclose(
            decompose_two_local(term).matrix(), term, atol=1e-10
        )

    def test_not_symmetric(self):
        with self.assertRaises(NonSymmetricTermException):
            decompose_two_local(np.kron(PAULI_Z, PAULI_I))
        with self.assertRaises(ValidationException):
            decompose_two_local(np.eye(2))


class TestDocument(unittest.TestCase):
    def test_fixture(self):
        with (test_tools / "generic_mc_p1.json").open() as fp:
            ansatz, gamma, beta, decomposition = ansatz_from_document(json.load(fp))
        self.assertEqual((ansatz.k, ansatz.q, ansatz.p), (2, 1, 1))
        self.assertEqual(gamma.shape, (1, 1))
        self.assertIsNone(decomposition)
        value = generic_edge_expectation(
            ansatz, 1, decomposition_from_spec(preset("EPR")), gamma, beta
        )
        self.assertAlmostEqual(value, 0.75 + np.sqrt(5) / 4, 6)

    def test_terms(self):
        doc = {
            "bases": [[[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]],
            "gamma": [[0.1]],
            "beta": [0.2],
            "terms": [[0.5, [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]],
        }
        _, _, _, decomposition = ansatz_from_document(doc)
        self.assertEqual(len(decomposition.terms), 1)
        np.testing.assert_allclose(decomposition.matrix(), 0.5 * np.eye(4))

    def test_errors(self):
        with self.assertRaises(ValidationException):
            ansatz_from_document({"gamma": [[0.1]], "beta": [0.2]})
        with self.assertRaises(ScheduleMismatchException):
            ansatz_from_document(
                {
                    "bases": [[[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]],
                    "gamma": [[0.1, 0.2]],
                    "beta": [0.2],
                }
            )
        with self.assertRaises(ValidationException):
            matrix_from_pairs([[1, 0], [0, 1]])
