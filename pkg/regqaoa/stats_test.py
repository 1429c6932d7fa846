import math
import unittest
from io import StringIO

from .optimize import TrialRecord
from .stats import OptimizerMetrics, format_value, get_statistics


def mkTrial(index, value, restarts=0, converged=True, evaluations=10):
    return TrialRecord(
        index, index, (0.0,), value, None, converged, restarts, evaluations
    )


class TestStatistics(unittest.TestCase):
    def test_statistics_no_trials(self):
        self.assertEqual(get_statistics(list()), {"starts": 0})

    def test_statistics_two_trials(self):
        s = get_statistics([mkTrial(0, 0.5), mkTrial(1, 0.75, restarts=1)])
        self.assertEqual(
            s,
            {
                "starts": 2,
                "restarts": 1,
                "converged": 2,
                "evaluations": 20,
                "best": 0.75,
                "mean": 0.625,
                "spread": 0.25,
            },
        )

    def test_statistics_failed_trial(self):
        s = get_statistics([mkTrial(0, 0.5), mkTrial(1, -math.inf, converged=False)])
        self.assertEqual(s["failed"], 1)
        self.assertEqual(s["converged"], 1)
        self.assertEqual(s["best"], 0.5)
        self.assertEqual(s["spread"], 0.0)

    def test_statistics_all_failed(self):
        s = get_statistics([mkTrial(0, -math.inf, restarts=3, converged=False)])
        self.assertEqual(
            s,
            {
                "starts": 1,
                "restarts": 3,
                "converged": 0,
                "evaluations": 10,
                "failed": 1,
            },
        )


class TestOptimizerMetrics(unittest.TestCase):
    def test_rendering(self):
        exp = OptimizerMetrics()
        exp.observe("name", 42, run="run_name")

        f = StringIO()
        exp.render(f)
        self.assertEqual('regqaoa_name{run="run_name"} 42\n', f.getvalue())

    def test_cell_labels(self):
        exp = OptimizerMetrics()
        exp.declare("deviation", help_text="Deviation", type_name="gauge")
        exp.observe("deviation", 0.5, table="2", p=1, D=3)
        exp.observe("deviation", 0.25, table="4", p=2, D="inf")

        f = StringIO()
        exp.render(f)
        self.assertEqual(
            """# HELP regqaoa_deviation Deviation
# TYPE regqaoa_deviation gauge
regqaoa_deviation{table="2",p="1",D="3"} 0.5
regqaoa_deviation{table="4",p="2",D="inf"} 0.25
""",
            f.getvalue(),
        )

    def test_label_escaping(self):
        exp = OptimizerMetrics()
        exp.observe("x", 1, run='a"b\\c')

        f = StringIO()
        exp.render(f)
        self.assertEqual('regqaoa_x{run="a\\"b\\\\c"} 1\n', f.getvalue())

    def test_non_finite_values(self):
        self.assertEqual(format_value(-math.inf), "-Inf")
        self.assertEqual(format_value(math.inf), "+Inf")
        self.assertEqual(format_value(math.nan), "NaN")
        self.assertEqual(format_value(3), "3")

    def test_run_summary_and_trials(self):
        exp = OptimizerMetrics()
        trials = [mkTrial(0, 0.5), mkTrial(1, -math.inf, converged=False)]
        exp.add_run("mc_p1", trials)

        f = StringIO()
        exp.render(f)
        lines = f.getvalue().splitlines()
        self.assertEqual(lines[0], "# HELP regqaoa_starts Optimizer trials run")
        self.assertEqual(lines[1], "# TYPE regqaoa_starts counter")
        self.assertIn('regqaoa_starts{run="mc_p1"} 2', lines)
        self.assertIn('regqaoa_failed{run="mc_p1"} 1', lines)
        self.assertIn('regqaoa_best{run="mc_p1"} 0.5', lines)
        self.assertIn('regqaoa_trial_value{run="mc_p1",trial="0"} 0.5', lines)
        self.assertIn('regqaoa_trial_value{run="mc_p1",trial="1"} -Inf', lines)
        self.assertIn('regqaoa_trial_evaluations{run="mc_p1",trial="1"} 10', lines)
        self.assertEqual(
            sum(1 for line in lines if line.startswith("# TYPE regqaoa_trial_value")),
            1,
        )
