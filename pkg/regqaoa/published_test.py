import unittest
from pathlib import Path

from .baselines import match_energy, zero_energy
from .model import AngleSchedule, MissingReferenceException, preset
from .published import (
    cut_reference,
    load_published,
    nu_reference,
    published_schedule,
    table2_baseline,
    table2_value,
)

test_tools = Path(__file__).absolute().parent.parent / "test_tools"


class TestTable2(unittest.TestCase):
    def test_values(self):
        self.assertEqual(table2_value("mc", 1, "EPR", 1), 1.3090)
        self.assertEqual(table2_value("xy", 2, "qmc", 3), 0.72125)
        self.assertEqual(table2_value("mc", 1, "QMC", 4), 0.5)

    def test_missing(self):
        with self.assertRaises(MissingReferenceException):
            table2_value("mc", 6, "QMC", 1)
        with self.assertRaises(MissingReferenceException):
            table2_value("xy", 1, "QMC", 9)
        with self.assertRaises(MissingReferenceException):
            table2_value("mc", 1, "MC", 1)

    def test_zero_column(self):
        for name in ("QMC", "XY", "EPR"):
            expected = zero_energy(preset(name), 1)
            self.assertEqual(table2_baseline("ZERO", name), expected)

    def test_match_column(self):
        # a perfect matching on n vertices of a (D+1)-regular graph has n/2 edges
        n = 8
        for D in range(1, 5):
            m = n * (D + 1) // 2
            for name in ("QMC", "XY", "EPR"):
                self.assertAlmostEqual(
                    table2_baseline("MATCH", name, D),
                    match_energy(name, m, n // 2) / m,
                    delta=1e-4,
                )
        with self.assertRaises(MissingReferenceException):
            table2_baseline("MATCH", "QMC", 7)
        with self.assertRaises(MissingReferenceException):
            table2_baseline("CUT", "QMC", 1)


class TestNuTables(unittest.TestCase):
    def test_values(self):
        self.assertEqual(nu_reference("3mc", 1), 0.3033)
        self.assertEqual(nu_reference("3", 1), 0.0)
        self.assertEqual(nu_reference("4", 2), 0.40611131)

    def test_missing(self):
        with self.assertRaises(MissingReferenceException):
            nu_reference("4", 5)
        with self.assertRaises(MissingReferenceException):
            nu_reference("9", 1)


class TestSchedules(unittest.TestCase):
    def test_xy_angles(self):
        with (test_tools / "table6_p2.json").open() as fp:
            expected = AngleSchedule.from_json(fp)
        self.assertEqual(published_schedule("6", 2), expected)

    def test_mc_angles(self):
        schedule = published_schedule("5", 10)
        self.assertEqual(schedule.p, 10)
        self.assertEqual(schedule.beta[-1], 0.0)

    def test_missing(self):
        with self.assertRaises(MissingReferenceException):
            published_schedule("5", 11)
        with self.assertRaises(MissingReferenceException):
            published_schedule("7", 1)


class TestCutReference(unittest.TestCase):
    def test_values(self):
        self.assertEqual(cut_reference(), (0.7631, None))
        self.assertEqual(cut_reference(1), (0.7631, (1.0, 1.0)))


class TestLoad(unittest.TestCase):
    def test_wrong_file(self):
        with self.assertRaises(TypeError):
            load_published(test_tools / "ring_qmc_golden.yaml")
