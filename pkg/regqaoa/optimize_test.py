import math
import unittest

import numpy as np

from .closedform import p1_maxcut_optimum
from .model import AngleSchedule, NonFiniteObjectiveException, ScheduleMismatchException
from .optimize import (
    OptimizeConfig,
    central_gradient,
    depth_sweep,
    evaluate_published_angles,
    free_parameters,
    make_objective,
    optimize,
    parameter_count,
    schedule_from_parameters,
    should_pin,
)
from .published import nu_reference, table2_value

TARGET = np.array([0.3, -0.2])


def quadratic(schedule):
    x = np.array(schedule.gamma + schedule.beta)
    return 1.0 - float(np.sum((x - TARGET) ** 2))


class TestParameters(unittest.TestCase):
    def test_counts(self):
        self.assertEqual(parameter_count("mc", 3), 6)
        self.assertEqual(parameter_count("mc", 3, pinned=True), 5)
        self.assertEqual(parameter_count("xy", 2), 6)
        self.assertEqual(parameter_count("xy", 2, pinned=True), 5)

    def test_round_trip(self):
        schedule = AngleSchedule.xy([0.1, 0.2], [0.3, 0.4], [0.5, 0.0])
        x = free_parameters(schedule, pinned=True)
        self.assertEqual(x.tolist(), [0.1, 0.2, 0.3, 0.4, 0.5])
        self.assertEqual(schedule_from_parameters(x, "xy", 2, pinned=True), schedule)

    def test_wrong_count(self):
        with self.assertRaises(ScheduleMismatchException):
            schedule_from_parameters([0.1, 0.2, 0.3], "mc", 1)

    def test_central_gradient(self):
        grad = central_gradient(lambda x: float(x @ x), np.array([1.0, -2.0]), 1e-6)
        np.testing.assert_allclose(grad, [2.0, -4.0], atol=1e-6)

    def test_should_pin(self):
        pinned = OptimizeConfig(pin_final_beta=True)
        self.assertTrue(should_pin(pinned, "QMC"))
        self.assertTrue(should_pin(pinned, "XY"))
        self.assertFalse(should_pin(pinned, "EPR"))
        self.assertFalse(should_pin(OptimizeConfig(), "QMC"))


class TestConfig(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ValueError):
            OptimizeConfig(n_starts=0)
        with self.assertRaises(ValueError):
            OptimizeConfig(init_range=(1.0, -1.0))
        with self.assertRaises(ValueError):
            OptimizeConfig(seed=-1)
        with self.assertRaises(ValueError):
            OptimizeConfig(gradient_step=0.0)

    def test_to_dict(self):
        self.assertEqual(OptimizeConfig(seed=4).to_dict()["seed"], 4)


class TestOptimize(unittest.TestCase):
    def test_quadratic(self):
        result = optimize(quadratic, 1, "mc", OptimizeConfig(n_starts=3))
        self.assertAlmostEqual(result.best_value, 1.0, delta=1e-8)
        np.testing.assert_allclose(
            result.best_schedule.gamma + result.best_schedule.beta, TARGET, atol=1e-4
        )
        self.assertEqual(len(result.trials), 3)

    def test_deterministic(self):
        config = OptimizeConfig(n_starts=4, seed=9)
        first = optimize(quadratic, 1, "mc", config)
        second = optimize(quadratic, 1, "mc", config)
        self.assertEqual(
            [t.start for t in first.trials], [t.start for t in second.trials]
        )
        self.assertEqual(first.best_value, second.best_value)

    def test_threads_agree(self):
        serial = optimize(quadratic, 1, "mc", OptimizeConfig(n_starts=4, seed=2))
        threaded = optimize(
            quadratic, 1, "mc", OptimizeConfig(n_starts=4, seed=2, workers=2)
        )
        self.assertEqual(
            [t.value for t in serial.trials], [t.value for t in threaded.trials]
        )

    def test_explicit_start_runs_first(self):
        start = AngleSchedule.mc([0.3], [-0.2])
        result = optimize(quadratic, 1, "mc", OptimizeConfig(n_starts=2), (start,))
        self.assertEqual(result.trials[0].start, (0.3, -0.2))
        self.assertEqual(len(result.trials), 3)

    def test_pinned_final_beta(self):
        config = OptimizeConfig(n_starts=2, pin_final_beta=True)
        result = optimize(quadratic, 1, "mc", config, hamiltonian="QMC")
        self.assertEqual(result.best_schedule.beta, (0.0,))
        self.assertEqual(len(result.trials[0].start), 1)

    def test_restart_on_nan(self):
        calls = {"n": 0}

        def flaky(schedule):
            calls["n"] += 1
            if calls["n"] == 1:
                return math.nan
            return quadratic(schedule)

        result = optimize(flaky, 1, "mc", OptimizeConfig(n_starts=1))
        self.assertEqual(result.trials[0].restarts, 1)
        self.assertAlmostEqual(result.best_value, 1.0, delta=1e-8)

    def test_all_trials_fail(self):
        config = OptimizeConfig(n_starts=2, max_restarts=1)
        with self.assertRaises(NonFiniteObjectiveException):
            optimize(lambda s: math.inf, 1, "mc", config)

    def test_result_round_trip(self):
        result = optimize(quadratic, 1, "mc", OptimizeConfig(n_starts=1))
        document = result.to_dict()
        self.assertEqual(AngleSchedule.from_dict(document), result.best_schedule)
        self.assertEqual(len(document["trials"]), 1)


class TestEnergyObjectives(unittest.TestCase):
    def test_maxcut_ring(self):
        result = optimize(make_objective("MC", 1), 1, "mc", OptimizeConfig(n_starts=5))
        self.assertAlmostEqual(result.best_value, 0.75, delta=1e-6)

    def test_depth_sweep(self):
        results = depth_sweep(
            lambda p: make_objective("MC", None), "mc", 2, OptimizeConfig(n_starts=3)
        )
        self.assertEqual(len(results), 2)
        self.assertAlmostEqual(results[0].best_value, 0.3033, delta=1e-4)
        self.assertGreaterEqual(results[1].best_value, results[0].best_value - 1e-9)
        self.assertEqual(results[1].best_schedule.p, 2)

    def test_maxcut_mixer_angle(self):
        for d in range(1, 6):
            objective = make_objective("MC", d)
            result = optimize(objective, 1, "mc", OptimizeConfig(n_starts=4))
            beta = result.best_schedule.beta[0]
            # every optimum sits at pi/8 up to the pi/4 symmetries of sin(4 beta)
            offset = (beta - math.pi / 8) % (math.pi / 4)
            self.assertLess(min(offset, math.pi / 4 - offset), 1e-3, f"d={d}")
            self.assertAlmostEqual(
                result.best_value, p1_maxcut_optimum(d)[2], delta=1e-8
            )

    def test_finite_degree_cells(self):
        config = OptimizeConfig(n_starts=10, pin_final_beta=True)
        for kind, p, hamiltonian, D in (
            ("mc", 1, "EPR", 2),
            ("xy", 1, "EPR", 2),
            ("mc", 2, "XY", 3),
        ):
            result = optimize(
                make_objective(hamiltonian, D), p, kind, config, hamiltonian=hamiltonian
            )
            self.assertAlmostEqual(
                result.best_value,
                table2_value(kind, p, hamiltonian, D),
                delta=2e-3,
                msg=f"{kind} p={p} {hamiltonian} D={D}",
            )

    def test_published_angles(self):
        self.assertAlmostEqual(evaluate_published_angles("5", 1), 0.0, delta=1e-12)
        self.assertAlmostEqual(evaluate_published_angles("5", 3), 0.4099, delta=2e-3)
        self.assertAlmostEqual(evaluate_published_angles("6", 1), 0.0, delta=1e-12)
        self.assertAlmostEqual(
            evaluate_published_angles("6", 2), nu_reference("4", 2), delta=1e-6
        )
