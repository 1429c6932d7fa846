import unittest
from pathlib import Path

import networkx as nx

from .baselines import (
    BaselineReport,
    baseline_report,
    cut_energy,
    cut_state,
    match_energy,
    matched_state_energy,
    max_cut,
    max_matching,
    reference_cut_values,
    zero_energy,
)
from .model import (
    Graph,
    MissingReferenceException,
    UnsupportedHamiltonianException,
    VertexCapExceededException,
    preset,
)
from .oracle import energy

test_tools = Path(__file__).absolute().parent.parent / "test_tools"


def read_graph(name):
    with (test_tools / name).open() as fp:
        return Graph.read_edge_list(fp)


class TestExhaustive(unittest.TestCase):
    def test_c5(self):
        g = read_graph("c5.txt")
        M, matching = max_matching(g)
        self.assertEqual(M, 2)
        self.assertEqual(len(set(u for e in matching for u in e)), 4)
        C, cut = max_cut(g)
        self.assertEqual(C, 4)
        self.assertNotIn(0, cut)

    def test_petersen(self):
        g = read_graph("petersen.txt")
        self.assertEqual((g.n, g.m), (10, 15))
        self.assertEqual(max_matching(g)[0], 5)
        self.assertEqual(max_cut(g)[0], 12)
        self.assertEqual(max_cut(g, workers=2)[0], 12)

    def test_small(self):
        edge = Graph(2, [(0, 1)])
        self.assertEqual(max_matching(edge), (1, ((0, 1),)))
        self.assertEqual(max_cut(edge), (1, (1,)))
        self.assertEqual(max_cut(Graph(3, [])), (0, ()))
        self.assertEqual(max_cut(Graph.from_networkx(nx.cycle_graph(6)))[0], 6)

    def test_caps(self):
        big = Graph(25, [(0, 1)])
        with self.assertRaises(VertexCapExceededException):
            max_cut(big)
        with self.assertRaises(VertexCapExceededException):
            max_matching(big)


class TestFormulas(unittest.TestCase):
    def test_c5_values(self):
        self.assertEqual(match_energy("QMC", 5, 2), 5.5)
        self.assertEqual(match_energy("EPR", 5, 2), 5.5)
        self.assertEqual(match_energy("XY", 5, 2), 4.5)
        self.assertEqual(zero_energy(preset("EPR"), 5), 5.0)
        self.assertEqual(zero_energy(preset("QMC"), 5), 0.0)
        self.assertEqual(cut_energy("QMC", 4), 4)

    def test_errors(self):
        with self.assertRaises(ValueError):
            match_energy("QMC", 2, 3)
        with self.assertRaises(ValueError):
            zero_energy(preset("QMC"), -1)
        with self.assertRaises(UnsupportedHamiltonianException):
            match_energy("MC", 5, 2)


class TestStates(unittest.TestCase):
    def test_matched_state(self):
        g = read_graph("c5.txt")
        M, matching = max_matching(g)
        for name in ("QMC", "XY", "EPR"):
            self.assertAlmostEqual(
                matched_state_energy(g, name, matching), match_energy(name, g.m, M)
            )

    def test_cut_states(self):
        g = read_graph("c5.txt")
        C, cut = max_cut(g)
        self.assertAlmostEqual(energy(cut_state(g, cut), g, preset("QMC")), C)
        self.assertAlmostEqual(
            energy(cut_state(g, cut, "EPR"), g, preset("EPR")), g.m
        )
        self.assertAlmostEqual(energy(cut_state(g, cut), g, preset("EPR")), g.m - C)


class TestReport(unittest.TestCase):
    def test_qmc(self):
        reports = baseline_report(read_graph("c5.txt"), "QMC")
        self.assertEqual([r.algorithm for r in reports], ["ZERO", "MATCH", "CUT"])
        self.assertEqual([r.total_energy for r in reports], [0.0, 5.5, 4])

    def test_maxcut_has_no_match(self):
        reports = baseline_report(read_graph("c5.txt"), "MC")
        self.assertEqual([r.algorithm for r in reports], ["ZERO", "CUT"])

    def test_to_dict(self):
        report = BaselineReport("MATCH", 5.5, ((0, 1), (2, 3)))
        self.assertEqual(report.to_dict()["witness"], [[0, 1], [2, 3]])
        self.assertIsNone(BaselineReport("ZERO", 0.0).to_dict()["witness"])


class TestReferenceValues(unittest.TestCase):
    def test_reference(self):
        self.assertEqual(reference_cut_values(), (0.7631, None))
        parisi, (low, high) = reference_cut_values(2)
        self.assertEqual(parisi, 0.7631)
        self.assertLess(low, high)
        with self.assertRaises(MissingReferenceException):
            reference_cut_values(9)
