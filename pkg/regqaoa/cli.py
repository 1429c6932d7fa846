"""
Interface for running regqaoa from a CLI.
"""

from dataclasses import dataclass, field
from pathlib import Path
import argparse
import csv
import json
import logging
import sys
import time
import traceback
import yaml

import numpy as np

from regqaoa import __version__
from regqaoa.baselines import baseline_report
from regqaoa.closedform import p1_graph_energy, p1_maxcut_value
from regqaoa.finitedeg import ansatz_energy, edge_expectations
from regqaoa.generic import (
    ansatz_from_document,
    decomposition_from_spec,
    generic_edge_expectation,
)
from regqaoa.infdeg import nu_infinite
from regqaoa.model import (
    AngleSchedule,
    AnsatzKind,
    EnergyReport,
    Graph,
    ValidationException,
    nu_from_energy,
    preset,
)
from regqaoa.optimize import (
    OptimizeConfig,
    depth_sweep,
    evaluate_published_angles,
    make_objective,
    optimize,
)
from regqaoa.oracle import SPARSE_EIGEN_CAP, extremal_energy, glued_tree_check
from regqaoa.published import load_published, nu_reference, table2_value
from regqaoa.stats import OptimizerMetrics
from regqaoa.tools import resolve_workers

INFINITE = "inf"

PARSER = argparse.ArgumentParser(
    description="""
    Energies of the MC and XY ansatze on quantum MaxCut, XY, EPR and MaxCut
    Hamiltonians over high-girth regular graphs.
"""
)

PARSER.add_argument(
    "--log-level",
    default=logging.INFO,
    type=lambda x: getattr(logging, x.upper()),
    help="Configure the logging level.",
)
PARSER.add_argument(
    "--prometheus-stats", type=Path, help="Path to produce a prometheus statistics file"
)
PARSER.add_argument(
    "--config", "-c", type=argparse.FileType("r"), help="Configuration YAML"
)


def degree(value):
    """
    argparse type for --D: a positive integer or inf.
    """
    if str(value).strip().lower() in ("inf", "infinity"):
        return INFINITE
    try:
        D = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"D must be an integer or inf: {value}")
    if D < 1:
        raise argparse.ArgumentTypeError(f"D must be at least 1, got {D}")
    return D


def degree_range(value):
    """
    argparse type for a set of degrees: "1..4", "1,3" or a single integer.
    """
    text = str(value).strip()
    try:
        if ".." in text:
            low, high = text.split("..", 1)
            values = list(range(int(low), int(high) + 1))
        else:
            values = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Unparseable degree range {value}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"Degrees must be at least 1: {value}")
    return values


COMMON = argparse.ArgumentParser(add_help=False)
COMMON.add_argument("--ansatz", choices=["mc", "xy", "generic"], help="Ansatz kind")
COMMON.add_argument(
    "--ham", dest="hamiltonian", choices=["qmc", "xy", "epr", "mc"], help="Hamiltonian"
)
COMMON.add_argument("--p", type=int, help="Ansatz depth")
COMMON.add_argument("--D", type=degree, help="Degree minus one, or inf")
COMMON.add_argument(
    "--angles", type=argparse.FileType("r"), help="Angle schedule JSON"
)
COMMON.add_argument("--graph", type=argparse.FileType("r"), help="Edge list file")
COMMON.add_argument("--seed", type=int, help="Random seed")
COMMON.add_argument("--starts", type=int, help="Random optimizer starts")
COMMON.add_argument("--threads", help="Worker count, or max")
COMMON.add_argument("--format", choices=["json", "csv"], help="Output format")
COMMON.add_argument(
    "--table-cap", type=int, help="Largest depth the f/G tables may be built for"
)


class Config:
    """
    Configurations that we need; can be created from both an argparse object
    of command-line arguments, from a YAML file, both, and potentially be
    modified via unit tests. Command-line values win over YAML values.
    """

    def __init__(self):
        self.ansatz = "mc"
        self.hamiltonian = "QMC"
        self.p = None
        self.D = 1
        self.schedule = None
        self.graph = None
        self.graph_path = None
        self.bases = None
        self.bases_path = None
        self.seed = 0
        self.starts = 30
        self.threads = None
        self.format = "json"
        self.gamma = None
        self.beta = None
        self.samples = 10
        self.max_p = None
        self.table_cap = None
        self.D_range = [1, 2, 3, 4]
        self.tolerance = 2e-3
        self.published_angles = False
        self.pin_final_beta = True
        self.max_iters = 500
        self.prometheus_stats_path = None

    @property
    def finite_D(self):
        """D as an integer, or None in the infinite-degree limit."""
        return None if self.D == INFINITE else self.D

    def load_graph(self, path):
        with open(path, "r") as fp:
            self.graph = Graph.read_edge_list(fp)
        self.graph_path = str(path)

    def load_bases(self, path):
        with open(path, "r") as fp:
            self.bases = json.load(fp)
        self.bases_path = str(path)

    def from_argparse(self, args):
        """
        Populate this config from an argparse result. Overwrites only what
        is set by argparse.
        """
        for name in (
            "ansatz",
            "hamiltonian",
            "p",
            "D",
            "seed",
            "starts",
            "threads",
            "format",
            "gamma",
            "beta",
            "samples",
            "max_p",
            "table_cap",
            "D_range",
            "tolerance",
            "max_iters",
        ):
            if name in args and getattr(args, name) is not None:
                setattr(self, name, getattr(args, name))
        if "published_angles" in args and args.published_angles:
            self.published_angles = True
        if "free_final_beta" in args and args.free_final_beta:
            self.pin_final_beta = False
        if "angles" in args and args.angles:
            self.schedule = AngleSchedule.from_json(args.angles)
        if "graph" in args and args.graph:
            self.graph = Graph.read_edge_list(args.graph)
            self.graph_path = args.graph.name
        if "bases" in args and args.bases:
            self.bases = json.load(args.bases)
            self.bases_path = args.bases.name
        if "prometheus_stats" in args and args.prometheus_stats:
            self.prometheus_stats_path = args.prometheus_stats

    def from_yaml_file(self, file):
        """
        Populate this config from the yaml in the file-like object supplied.
        Overwrites only what is set by the yaml.
        """
        data = yaml.safe_load(file)
        if not isinstance(data, dict) or "regqaoa" not in data:
            raise TypeError("Unexpected YAML format: missing top-level regqaoa")
        data = data["regqaoa"]
        if not isinstance(data, dict):
            raise TypeError("Unexpected YAML format: regqaoa is not a mapping")
        for name in (
            "ansatz",
            "hamiltonian",
            "p",
            "seed",
            "starts",
            "threads",
            "format",
            "gamma",
            "beta",
            "samples",
            "max_p",
            "table_cap",
            "tolerance",
            "published_angles",
            "pin_final_beta",
            "max_iters",
        ):
            if name in data and data[name] is not None:
                setattr(self, name, data[name])
        if "D" in data:
            self.D = degree(data["D"])
        if "D_range" in data:
            D_range = data["D_range"]
            if isinstance(D_range, list):
                self.D_range = [int(D) for D in D_range]
            else:
                self.D_range = degree_range(D_range)
        if isinstance(data.get("angles"), dict):
            self.schedule = AngleSchedule.from_dict(data["angles"])
        elif data.get("angles"):
            with open(data["angles"], "r") as fp:
                self.schedule = AngleSchedule.from_json(fp)
        if data.get("graph"):
            self.load_graph(data["graph"])
        if data.get("bases"):
            self.load_bases(data["bases"])
        if "prometheus_stats" in data:
            self.prometheus_stats_path = Path(data["prometheus_stats"])

    def to_dict(self):
        """
        The resolved configuration, in the layout from_yaml_file reads.
        """
        return {
            "ansatz": self.ansatz,
            "hamiltonian": self.hamiltonian,
            "p": self.p,
            "D": self.D,
            "angles": None if self.schedule is None else self.schedule.to_dict(),
            "graph": self.graph_path,
            "bases": self.bases_path,
            "seed": self.seed,
            "starts": self.starts,
            "threads": resolve_workers(self.threads),
            "format": self.format,
            "gamma": self.gamma,
            "beta": self.beta,
            "samples": self.samples,
            "max_p": self.max_p,
            "table_cap": self.table_cap,
            "D_range": list(self.D_range),
            "tolerance": self.tolerance,
            "published_angles": self.published_angles,
            "pin_final_beta": self.pin_final_beta,
            "max_iters": self.max_iters,
        }


def config_from_args(args):
    """
    Helper that produces a Config from the arguments, applying any referenced
    YAML first so that the command line takes precedence.
    """
    conf = Config()
    if args.config:
        conf.from_yaml_file(args.config)
    conf.from_argparse(args)
    return conf


@dataclass
class RunRecord:
    """
    The result of a command, with enough of the resolved configuration to
    run it again.
    """

    command: str
    config: dict
    rows: list
    elapsed_seconds: float = 0.0
    extra: dict = field(default_factory=dict)
    exit_code: int = 0

    def to_dict(self):
        out = {
            "command": self.command,
            "version": __version__,
            "elapsed_seconds": self.elapsed_seconds,
            "regqaoa": self.config,
            "rows": self.rows,
        }
        out.update(self.extra)
        return out


def _require(conf, command, *names):
    for name in names:
        if getattr(conf, name) is None:
            flag = {"graph_path": "graph", "schedule": "angles"}.get(name, name)
            raise ValidationException(f"{command} needs --{flag}")


def _schedule_for(conf, command):
    _require(conf, command, "schedule")
    if conf.p is None:
        conf.p = conf.schedule.p
    return conf.schedule.require(conf.ansatz, conf.p)


def _record(command, conf, started, rows, extra=None, exit_code=0):
    return RunRecord(
        command,
        conf.to_dict(),
        rows,
        round(time.monotonic() - started, 6),
        extra or {},
        exit_code,
    )


def _eval_row(conf, report):
    row = {"ansatz": conf.ansatz, "p": conf.p}
    row.update(report.to_dict())
    return row


def do_eval_generic(conf):
    """
    Evaluate a generic ansatz read from the --bases document. Without terms
    in the document, the measured term is the Hamiltonian's edge term.
    """
    if conf.bases is None:
        raise ValidationException("The generic ansatz needs --bases")
    if conf.finite_D is None:
        raise ValidationException("The generic engine has no infinite-degree limit")
    ansatz, gamma, beta, decomposition = ansatz_from_document(conf.bases)
    conf.p = ansatz.p
    spec = preset(conf.hamiltonian)
    custom = decomposition is not None
    if not custom:
        decomposition = decomposition_from_spec(spec)
    value = generic_edge_expectation(
        ansatz,
        conf.D,
        decomposition,
        gamma,
        beta,
        workers=resolve_workers(conf.threads),
    )
    row = {"ansatz": "generic", "k": ansatz.k, "q": ansatz.q, "p": ansatz.p}
    row.update({"D": conf.D, "value": value})
    if not custom:
        row["hamiltonian"] = spec.name
        row["nu"] = nu_from_energy(spec, value, conf.D)
    return row


def eval_cmd(args):
    """
    Per-edge energy of an ansatz at the supplied angles.
    """
    started = time.monotonic()
    conf = config_from_args(args)
    if conf.ansatz == "generic":
        return _record("eval", conf, started, [do_eval_generic(conf)])
    schedule = _schedule_for(conf, "eval")
    spec = preset(conf.hamiltonian)
    workers = resolve_workers(conf.threads)
    if conf.finite_D is None:
        nu = nu_infinite(
            conf.ansatz, spec, conf.p, schedule, workers=workers, max_p=conf.table_cap
        )
        report = EnergyReport.from_nu(spec, nu)
    else:
        report = ansatz_energy(
            spec, conf.p, conf.D, schedule, workers=workers, max_p=conf.table_cap
        )
    return _record("eval", conf, started, [_eval_row(conf, report)])


def eval_inf_cmd(args):
    """
    Infinite-degree normalized energy of an ansatz at the supplied angles.
    """
    started = time.monotonic()
    conf = config_from_args(args)
    conf.D = INFINITE
    if conf.ansatz == "generic":
        raise ValidationException("The generic engine has no infinite-degree limit")
    schedule = _schedule_for(conf, "eval-inf")
    spec = preset(conf.hamiltonian)
    nu = nu_infinite(
        conf.ansatz,
        spec,
        conf.p,
        schedule,
        workers=resolve_workers(conf.threads),
        max_p=conf.table_cap,
    )
    report = EnergyReport.from_nu(spec, nu)
    return _record("eval-inf", conf, started, [_eval_row(conf, report)])


def _optimize_config(conf):
    return OptimizeConfig(
        n_starts=conf.starts,
        seed=conf.seed,
        max_iters=conf.max_iters,
        pin_final_beta=conf.pin_final_beta,
        workers=resolve_workers(conf.threads),
    )


def _write_metrics(conf, metrics):
    if conf.prometheus_stats_path:
        with conf.prometheus_stats_path.open(mode="w", encoding="utf-8") as fp:
            metrics.render(fp)


def optimize_cmd(args):
    """
    Multi-start optimization of the angles for one (ansatz, Hamiltonian, p, D)
    cell. The best schedule is emitted at the top level of the record, so the
    output is itself a valid --angles file.
    """
    started = time.monotonic()
    conf = config_from_args(args)
    if conf.ansatz == "generic":
        raise ValidationException("optimize supports the mc and xy ansatze")
    _require(conf, "optimize", "p")
    spec = preset(conf.hamiltonian)
    objective = make_objective(spec, conf.finite_D, max_p=conf.table_cap)
    starts = ()
    if conf.schedule is not None:
        starts = (conf.schedule.require(conf.ansatz, conf.p),)
    result = optimize(
        objective, conf.p, conf.ansatz, _optimize_config(conf), starts, spec
    )

    metrics = OptimizerMetrics()
    run = f"{conf.ansatz}_p{conf.p}_{spec.name.lower()}_D{conf.D}"
    metrics.add_run(run, result.trials)
    _write_metrics(conf, metrics)

    rows = [
        {k: v for k, v in trial.to_dict().items() if k not in ("start", "schedule")}
        for trial in result.trials
    ]
    extra = {"schedule": result.best_schedule.to_dict(), "value": result.best_value}
    return _record("optimize", conf, started, rows, extra)


def p1_cmd(args):
    """
    Depth-one closed-form energy on an explicit graph.
    """
    started = time.monotonic()
    conf = config_from_args(args)
    _require(conf, "p1", "graph", "gamma", "beta")
    spec = preset(conf.hamiltonian)
    g = conf.graph
    total = p1_graph_energy(g, spec, conf.gamma, conf.beta)
    row = {
        "hamiltonian": spec.name,
        "n": g.n,
        "m": g.m,
        "gamma": conf.gamma,
        "beta": conf.beta,
        "total_energy": total,
        "per_edge_energy": total / g.m if g.m else None,
        # the same state, with gamma in the MaxCut sign convention
        "maxcut_value": p1_maxcut_value(g, -conf.gamma, conf.beta),
    }
    return _record("p1", conf, started, [row])


def random_schedule(kind, p, rng, low=-1.0, high=1.0):
    kind = AnsatzKind.parse(kind)
    if kind is AnsatzKind.MC:
        return AngleSchedule.mc(rng.uniform(low, high, p), rng.uniform(low, high, p))
    return AngleSchedule.xy(
        rng.uniform(low, high, p), rng.uniform(low, high, p), rng.uniform(low, high, p)
    )


def oracle_check_cmd(args):
    """
    Compare the finite-degree iteration against exact simulation on the glued
    tree for random schedules.
    """
    started = time.monotonic()
    conf = config_from_args(args)
    if conf.ansatz == "generic":
        raise ValidationException("oracle-check supports the mc and xy ansatze")
    _require(conf, "oracle-check", "p")
    if conf.finite_D is None:
        raise ValidationException("oracle-check needs a finite --D")
    workers = resolve_workers(conf.threads)
    rng = np.random.default_rng(conf.seed)

    def evaluate(schedule, D):
        return edge_expectations(schedule, D, workers=workers, max_p=conf.table_cap)

    rows = []
    for sample in range(conf.samples):
        schedule = random_schedule(conf.ansatz, conf.p, rng)
        deviation = glued_tree_check(schedule, conf.D, evaluate)
        rows.append({"sample": sample, "deviation": deviation})
    worst = max((r["deviation"] for r in rows), default=0.0)
    logging.getLogger("oracle-check").info(f"max deviation {worst:.3e}")
    return _record("oracle-check", conf, started, rows, {"max_deviation": worst})


def baselines_cmd(args):
    """
    ZERO, MATCH and CUT energies on an explicit graph, and the exact maximum
    energy when the graph is small enough to diagonalize.
    """
    started = time.monotonic()
    conf = config_from_args(args)
    _require(conf, "baselines", "graph")
    spec = preset(conf.hamiltonian)
    g = conf.graph
    reports = baseline_report(g, spec, workers=resolve_workers(conf.threads))
    rows = []
    witnesses = {}
    for report in reports:
        rows.append(
            {
                "algorithm": report.algorithm,
                "total_energy": report.total_energy,
                "per_edge_energy": report.total_energy / g.m if g.m else None,
            }
        )
        witnesses[report.algorithm] = report.to_dict()["witness"]
    if g.n <= SPARSE_EIGEN_CAP:
        exact = extremal_energy(g, spec)
        rows.append(
            {
                "algorithm": "EXACT",
                "total_energy": exact,
                "per_edge_energy": exact / g.m if g.m else None,
            }
        )
    return _record("baselines", conf, started, rows, {"witnesses": witnesses})


TABLE2_DEFAULT_P = {AnsatzKind.MC: 3, AnsatzKind.XY: 2}

NU_TABLE_SETUP = {
    # table: (ansatz, Hamiltonian, angle table, default max p)
    "3": (AnsatzKind.MC, "XY", "5", 5),
    "3mc": (AnsatzKind.MC, "MC", None, 3),
    "4": (AnsatzKind.XY, "XY", "6", 2),
}


def _cell(table, kind, hamiltonian, p, D, computed, published, tolerance):
    deviation = abs(computed - published)
    return {
        "table": table,
        "ansatz": kind.value,
        "hamiltonian": hamiltonian,
        "p": p,
        "D": D,
        "computed": computed,
        "published": published,
        "deviation": deviation,
        "within_tolerance": deviation <= tolerance,
    }


def do_reproduce_table2(conf):
    rows = []
    data = load_published()["per_edge_energy"]
    opt_config = _optimize_config(conf)
    for D in conf.D_range:
        if D not in data:
            logging.getLogger("reproduce").warning(f"No stored energies for D={D}")
            continue
        for hamiltonian in ("QMC", "XY", "EPR"):
            spec = preset(hamiltonian)
            mc_results = []
            for kind in (AnsatzKind.MC, AnsatzKind.XY):
                stored = len(data[D][hamiltonian.lower()][kind.value])
                p_max = min(stored, conf.max_p or TABLE2_DEFAULT_P[kind])
                results = depth_sweep(
                    lambda p: make_objective(spec, D),
                    kind,
                    p_max,
                    opt_config,
                    spec,
                    # the XY ansatz with gamma_y = 0 is the MC ansatz
                    extra_starts=lambda p: [
                        r.best_schedule.as_xy() for r in mc_results[p - 1 : p]
                    ],
                )
                if kind is AnsatzKind.MC:
                    mc_results = results
                for p, result in enumerate(results, start=1):
                    published = table2_value(kind, p, hamiltonian, D)
                    rows.append(
                        _cell(
                            "2",
                            kind,
                            hamiltonian,
                            p,
                            D,
                            result.best_value,
                            published,
                            conf.tolerance,
                        )
                    )
    return rows


def do_reproduce_nu(conf, table):
    kind, hamiltonian, angle_table, default_p = NU_TABLE_SETUP[table]
    p_max = conf.max_p or default_p
    if conf.published_angles:
        if angle_table is None:
            raise ValidationException(f"No stored angles for table {table}")
        values = [
            evaluate_published_angles(angle_table, p) for p in range(1, p_max + 1)
        ]
    else:
        results = depth_sweep(
            lambda p: make_objective(hamiltonian, None),
            kind,
            p_max,
            _optimize_config(conf),
            hamiltonian,
        )
        values = [result.best_value for result in results]
    return [
        _cell(
            table,
            kind,
            hamiltonian,
            p,
            INFINITE,
            value,
            nu_reference(table, p),
            conf.tolerance,
        )
        for p, value in enumerate(values, start=1)
    ]


def reproduce_cmd(args):
    """
    Recompute a stored table and compare every cell with the published value.
    The exit code is 1 if any cell misses the tolerance.
    """
    started = time.monotonic()
    conf = config_from_args(args)
    log = logging.getLogger("reproduce")
    if args.table == "2":
        rows = do_reproduce_table2(conf)
    else:
        rows = do_reproduce_nu(conf, args.table)

    worst = max((r["deviation"] for r in rows), default=0.0)
    failed = [r for r in rows if not r["within_tolerance"]]
    for row in failed:
        log.warning(
            f"Table {row['table']} {row['ansatz']} {row['hamiltonian']} "
            f"p={row['p']} D={row['D']}: {row['computed']:.6f} vs "
            f"{row['published']}"
        )

    metrics = OptimizerMetrics()
    metrics.declare(
        "reproduce_deviation",
        help_text="Absolute deviation from the published value",
        type_name="gauge",
    )
    for row in rows:
        cell = {k: row[k] for k in ("table", "ansatz", "hamiltonian", "p", "D")}
        metrics.observe("reproduce_deviation", row["deviation"], **cell)
    _write_metrics(conf, metrics)

    extra = {"max_deviation": worst, "failed_cells": len(failed)}
    return _record(
        "reproduce", conf, started, rows, extra, exit_code=1 if failed else 0
    )


SUBPARSERS = PARSER.add_subparsers(dest="subparser_name")

EVAL_PARSER = SUBPARSERS.add_parser(
    "eval", parents=[COMMON], help="energy at given angles"
)
EVAL_PARSER.add_argument(
    "--bases", type=argparse.FileType("r"), help="Generic ansatz JSON document"
)
EVAL_PARSER.set_defaults(func=eval_cmd)

EVAL_INF_PARSER = SUBPARSERS.add_parser(
    "eval-inf", parents=[COMMON], help="infinite-degree normalized energy"
)
EVAL_INF_PARSER.set_defaults(func=eval_inf_cmd)

OPTIMIZE_PARSER = SUBPARSERS.add_parser(
    "optimize", parents=[COMMON], help="multi-start angle optimization"
)
OPTIMIZE_PARSER.add_argument("--max-iters", type=int, help="BFGS iteration limit")
OPTIMIZE_PARSER.add_argument(
    "--free-final-beta",
    action="store_true",
    help="Optimize the last mixer angle even where it cannot change the energy",
)
OPTIMIZE_PARSER.set_defaults(func=optimize_cmd)

P1_PARSER = SUBPARSERS.add_parser(
    "p1", parents=[COMMON], help="depth-one closed form on a graph"
)
P1_PARSER.add_argument("--gamma", type=float, help="Closed-form phaser angle")
P1_PARSER.add_argument("--beta", type=float, help="Mixer angle")
P1_PARSER.set_defaults(func=p1_cmd)

ORACLE_PARSER = SUBPARSERS.add_parser(
    "oracle-check", parents=[COMMON], help="iteration versus exact simulation"
)
ORACLE_PARSER.add_argument("--samples", type=int, help="Random schedules to check")
ORACLE_PARSER.set_defaults(func=oracle_check_cmd)

BASELINES_PARSER = SUBPARSERS.add_parser(
    "baselines", parents=[COMMON], help="classical baselines on a graph"
)
BASELINES_PARSER.set_defaults(func=baselines_cmd)

REPRODUCE_PARSER = SUBPARSERS.add_parser(
    "reproduce", parents=[COMMON], help="recompute a published table"
)
REPRODUCE_PARSER.add_argument("table", choices=["2", "3", "3mc", "4"])
REPRODUCE_PARSER.add_argument("--max-p", type=int, help="Largest depth to compute")
REPRODUCE_PARSER.add_argument(
    "--D-range", dest="D_range", type=degree_range, help="Degrees, such as 1..4"
)
REPRODUCE_PARSER.add_argument("--tolerance", type=float, help="Allowed deviation")
REPRODUCE_PARSER.add_argument(
    "--published-angles",
    action="store_true",
    help="Evaluate the stored optimal angles instead of optimizing",
)
REPRODUCE_PARSER.set_defaults(func=reproduce_cmd)


def write_record(record, fp):
    """
    JSON writes the whole record; CSV writes the rows, with the record-level
    values repeated as trailing columns on every row. Nested values are JSON
    encoded, and a record-level name that clashes with a row field gains a
    run_ prefix.
    """
    if record.config.get("format") == "csv":
        fieldnames = []
        for row in record.rows:
            fieldnames.extend(k for k in row if k not in fieldnames)
        trailing = {}
        for key, value in record.extra.items():
            if isinstance(value, (dict, list, tuple)):
                value = json.dumps(value)
            trailing[f"run_{key}" if key in fieldnames else key] = value
        writer = csv.DictWriter(
            fp, fieldnames=fieldnames + list(trailing), lineterminator="\n"
        )
        writer.writeheader()
        for row in record.rows:
            writer.writerow({**row, **trailing})
    else:
        print(json.dumps(record.to_dict(), indent=2), file=fp)


def main(argv=None):
    """
    Start here.
    """
    args = PARSER.parse_args(argv)
    logging.basicConfig(level=args.log_level)
    if "func" not in args:
        PARSER.print_help()
        return 0

    try:
        record = args.func(args)
    except ValidationException as ve:
        logging.error(f"{args.subparser_name}: {ve}")
        return 2
    except Exception as e:
        logging.warning(f"Couldn't complete command: {args.subparser_name}")
        logging.warning(traceback.format_exc())
        raise e
    write_record(record, sys.stdout)
    return record.exit_code


if __name__ == "__main__":
    sys.exit(main())
