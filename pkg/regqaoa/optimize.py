"""
Multi-start BFGS optimization of angle schedules.

Every trial maximizes the objective from its own start point with
quasi-Newton steps and central-difference gradients. Trial i draws its
random start from a generator seeded with seed XOR i, so a run is
reproducible from the configuration alone.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from .finitedeg import ansatz_energy
from .infdeg import nu_infinite
from .model import (
    AngleSchedule,
    AnsatzKind,
    InvalidSettingException,
    NonFiniteObjectiveException,
    ScheduleMismatchException,
    preset,
)
from .published import published_schedule
from .tools import resolve_workers


@dataclass(frozen=True)
class OptimizeConfig:
    n_starts: int = 30
    init_range: Tuple[float, float] = (-1.0, 1.0)
    seed: int = 0
    max_iters: int = 500
    gradient_step: float = 1e-6
    convergence_tol: float = 1e-8
    pin_final_beta: bool = False
    workers: int = 1
    max_restarts: int = 3

    def __post_init__(self):
        if self.n_starts < 1:
            raise InvalidSettingException(
                f"n_starts must be at least 1, got {self.n_starts}"
            )
        if not self.gradient_step > 0:
            raise InvalidSettingException(
                f"gradient_step must be positive: {self.gradient_step}"
            )
        low, high = self.init_range
        if not low < high:
            raise InvalidSettingException(f"Empty initial range {self.init_range}")
        if self.max_iters < 1 or self.max_restarts < 0:
            raise InvalidSettingException(
                "max_iters must be positive, max_restarts non-negative"
            )
        if self.seed < 0:
            raise InvalidSettingException(f"seed must be non-negative, got {self.seed}")
        object.__setattr__(self, "init_range", (float(low), float(high)))

    def to_dict(self):
        return {
            "n_starts": self.n_starts,
            "init_range": list(self.init_range),
            "seed": self.seed,
            "max_iters": self.max_iters,
            "gradient_step": self.gradient_step,
            "convergence_tol": self.convergence_tol,
            "pin_final_beta": self.pin_final_beta,
            "workers": self.workers,
            "max_restarts": self.max_restarts,
        }


@dataclass(frozen=True)
class TrialRecord:
    """
    The outcome of one start. A trial that ran out of restarts has a value
    of -inf and no schedule.
    """

    index: int
    seed: int
    start: Tuple[float, ...]
    value: float
    schedule: Optional[AngleSchedule]
    converged: bool
    restarts: int
    evaluations: int
    message: str = ""

    def to_dict(self):
        return {
            "index": self.index,
            "seed": self.seed,
            "start": list(self.start),
            "value": self.value if math.isfinite(self.value) else None,
            "schedule": None if self.schedule is None else self.schedule.to_dict(),
            "converged": self.converged,
            "restarts": self.restarts,
            "evaluations": self.evaluations,
            "message": self.message,
        }


@dataclass(frozen=True)
class OptimizeResult:
    best_schedule: AngleSchedule
    best_value: float
    trials: List[TrialRecord] = field(default_factory=list)

    def to_dict(self):
        """
        A document that AngleSchedule.from_dict accepts directly.
        """
        return {
            "schedule": self.best_schedule.to_dict(),
            "value": self.best_value,
            "trials": [t.to_dict() for t in self.trials],
        }


def parameter_count(kind, p, pinned=False):
    kind = AnsatzKind.parse(kind)
    phasers = p if kind is AnsatzKind.MC else 2 * p
    return phasers + p - (1 if pinned else 0)


def free_parameters(schedule, pinned=False):
    """
    Flatten a schedule into the optimizer's vector: the phaser angles
    (gamma, or gamma_z then gamma_y) followed by beta, without the final beta
    when it is pinned.
    """
    if schedule.kind is AnsatzKind.MC:
        phasers = list(schedule.gamma)
    else:
        phasers = list(schedule.gamma_z) + list(schedule.gamma_y)
    beta = list(schedule.beta[:-1] if pinned else schedule.beta)
    return np.array(phasers + beta, dtype=float)


def schedule_from_parameters(x, kind, p, pinned=False):
    """Inverse of free_parameters; a pinned final beta is 0."""
    kind = AnsatzKind.parse(kind)
    x = [float(v) for v in x]
    if len(x) != parameter_count(kind, p, pinned):
        raise ScheduleMismatchException(
            f"Expected {parameter_count(kind, p, pinned)} parameters for {kind} "
            f"p={p}, got {len(x)}"
        )
    if kind is AnsatzKind.MC:
        gamma, rest = x[:p], x[p:]
    else:
        gamma_z, gamma_y, rest = x[:p], x[p : 2 * p], x[2 * p :]
    beta = rest + [0.0] if pinned else rest
    if kind is AnsatzKind.MC:
        return AngleSchedule.mc(gamma, beta)
    return AngleSchedule.xy(gamma_z, gamma_y, beta)


def central_gradient(func, x, step):
    """Central differences with a step relative to each coordinate."""
    grad = np.empty_like(x)
    for i in range(x.size):
        h = step * max(1.0, abs(x[i]))
        up, down = x.copy(), x.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (func(up) - func(down)) / (2 * h)
    return grad


def should_pin(config, hamiltonian):
    """
    The final mixer commutes with QMC and XY, so their energies do not
    depend on the last beta.
    """
    if not config.pin_final_beta:
        return False
    return hamiltonian is None or preset(hamiltonian).mixer_commutes


def _run_trial(objective, kind, p, config, pinned, index, start):
    log = logging.getLogger("optimize")
    seed = config.seed ^ index
    rng = np.random.default_rng(seed)
    size = parameter_count(kind, p, pinned)
    counter = {"evaluations": 0}

    def draw():
        return rng.uniform(*config.init_range, size=size)

    def negated(x):
        counter["evaluations"] += 1
        value = objective(schedule_from_parameters(x, kind, p, pinned))
        if not math.isfinite(value):
            raise NonFiniteObjectiveException(f"Objective returned {value} at {x}")
        return -value

    def gradient(x):
        return central_gradient(negated, x, config.gradient_step)

    x0 = draw() if start is None else np.asarray(start, dtype=float)
    restarts = 0
    while True:
        first = tuple(float(v) for v in x0)
        try:
            result = minimize(
                negated,
                x0,
                jac=gradient,
                method="BFGS",
                options={"maxiter": config.max_iters, "gtol": config.convergence_tol},
            )
            value = -float(result.fun)
            if not math.isfinite(value):
                raise NonFiniteObjectiveException(f"Converged to {value}")
            break
        except NonFiniteObjectiveException as nfoe:
            restarts += 1
            if restarts > config.max_restarts:
                log.warning(f"Trial {index} abandoned after {restarts - 1} restarts")
                return TrialRecord(
                    index,
                    seed,
                    first,
                    -math.inf,
                    None,
                    False,
                    restarts - 1,
                    counter["evaluations"],
                    str(nfoe),
                )
            log.warning(f"Trial {index} restarting ({restarts}): {nfoe}")
            x0 = draw()

    schedule = schedule_from_parameters(result.x, kind, p, pinned)
    log.info(
        f"Trial {index}: value={value:.8f} converged={result.success} "
        f"nfev={counter['evaluations']}"
    )
    return TrialRecord(
        index,
        seed,
        first,
        value,
        schedule,
        bool(result.success),
        restarts,
        counter["evaluations"],
        str(result.message),
    )


def optimize(objective, p, kind, config=None, starts=(), hamiltonian=None):
    """
    Maximize objective(schedule) over depth-p schedules of the given kind.
    Explicit start schedules run first, then config.n_starts random starts.
    The best trial is the first one, in index order, with the largest value.
    """
    log = logging.getLogger("optimize")
    config = config or OptimizeConfig()
    kind = AnsatzKind.parse(kind)
    pinned = should_pin(config, hamiltonian)

    start_points = []
    for schedule in starts:
        schedule.require(kind, p)
        start_points.append(free_parameters(schedule, pinned))
    start_points.extend([None] * config.n_starts)

    def trial(index):
        return _run_trial(
            objective, kind, p, config, pinned, index, start_points[index]
        )

    workers = resolve_workers(config.workers)
    indices = range(len(start_points))
    if workers == 1:
        trials = [trial(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(trial, indices))

    best = None
    for record in trials:
        if record.schedule is None:
            continue
        if best is None or record.value > best.value:
            best = record
    if best is None:
        raise NonFiniteObjectiveException(
            f"Every one of {len(trials)} trials failed for {kind} p={p}"
        )
    log.info(f"{kind} p={p}: best {best.value:.8f} from trial {best.index}")
    return OptimizeResult(best.schedule, best.value, trials)


def depth_sweep(
    objective_for_depth, kind, p_max, config=None, hamiltonian=None, extra_starts=None
):
    """
    Optimize depths 1..p_max, seeding each depth with the previous optimum
    padded by a zero layer, then with extra_starts(p) when given. Returns one
    OptimizeResult per depth.
    """
    log = logging.getLogger("optimize")
    results = []
    previous = None
    for p in range(1, p_max + 1):
        starts = [] if previous is None else [previous.best_schedule.padded(p)]
        if extra_starts is not None:
            starts.extend(extra_starts(p))
        result = optimize(objective_for_depth(p), p, kind, config, starts, hamiltonian)
        if previous is not None and result.best_value < previous.best_value:
            log.warning(
                f"Depth {p} best {result.best_value} is below depth {p - 1} best "
                f"{previous.best_value}"
            )
        results.append(result)
        previous = result
    return results


def make_objective(spec, D=None, workers=1, method="walsh", max_p=None):
    """
    The per-edge energy at degree D, or the infinite-degree normalized energy
    when D is None.
    """
    spec = preset(spec)
    if D is None:

        def nu(schedule):
            return nu_infinite(
                schedule.kind, spec, schedule.p, schedule, workers, max_p=max_p
            )

        return nu

    def per_edge(schedule):
        return ansatz_energy(
            spec, schedule.p, D, schedule, workers=workers, method=method, max_p=max_p
        ).per_edge_energy

    return per_edge


def evaluate_published_angles(table, p, workers=1):
    """
    nu on the XY Hamiltonian at stored optimal angles: table "5" holds MC
    ansatz angles and "6" XY ansatz angles.
    """
    schedule = published_schedule(table, p)
    return nu_infinite(schedule.kind, "XY", p, schedule, workers=workers)
