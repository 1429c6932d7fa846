"""
Optimizer and reproduction statistics, written in the Prometheus text
exposition format:
https://prometheus.io/docs/instrumenting/exposition_formats/
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import logging
import math

import numpy as np

PREFIX = "regqaoa_"

# name -> (help, type) for the summaries get_statistics produces
RUN_METRICS = {
    "starts": ("Optimizer trials run", "counter"),
    "restarts": ("Trials restarted after a non-finite objective", "counter"),
    "converged": ("Trials whose BFGS run converged", "gauge"),
    "evaluations": ("Objective evaluations", "counter"),
    "failed": ("Trials that ended without a finite value", "gauge"),
    "best": ("Best objective value", "gauge"),
    "mean": ("Mean trial value", "gauge"),
    "spread": ("Best minus worst trial value", "gauge"),
}

TRIAL_METRICS = {
    "trial_value": ("Final objective value of one trial", "gauge"),
    "trial_evaluations": ("Objective evaluations spent by one trial", "gauge"),
}


def format_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        if math.isnan(value):
            return "NaN"
        return "+Inf" if value > 0 else "-Inf"
    return f"{value}"


def format_labels(labels):
    def escape(text):
        text = str(text).replace("\\", "\\\\").replace('"', '\\"')
        return text.replace("\n", "\\n")

    return "{" + ",".join(f'{k}="{escape(v)}"' for k, v in labels) + "}"


@dataclass
class MetricFamily:
    """
    One metric name with its metadata and labelled samples.
    """

    help_text: Optional[str] = None
    type_name: Optional[str] = None
    samples: List[Tuple[Tuple[Tuple[str, str], ...], float]] = field(
        default_factory=list
    )


class OptimizerMetrics:
    """
    Metric families keyed by name, rendered in declaration order. Optimizer
    runs contribute run-level summaries and per-trial gauges labelled with
    the trial index.
    """

    def __init__(self):
        self.families: Dict[str, MetricFamily] = dict()

    def declare(self, name, help_text=None, type_name=None):
        family = self.families.setdefault(name, MetricFamily())
        family.help_text = help_text
        family.type_name = type_name
        return family

    def observe(self, name, value, **labels):
        family = self.families.setdefault(name, MetricFamily())
        family.samples.append((tuple(labels.items()), value))

    def add_run(self, run, trials):
        """
        Record the summary of an optimizer run and one sample per trial.
        """
        for name, value in get_statistics(trials).items():
            if name not in self.families:
                self.declare(name, *RUN_METRICS[name])
            self.observe(name, value, run=run)
        for name, description in TRIAL_METRICS.items():
            if name not in self.families:
                self.declare(name, *description)
        for trial in trials:
            self.observe("trial_value", trial.value, run=run, trial=trial.index)
            self.observe(
                "trial_evaluations", trial.evaluations, run=run, trial=trial.index
            )

    def render(self, fp):
        for n, family in self.families.items():
            name = f"{PREFIX}{n}"
            if family.help_text:
                print(f"# HELP {name} {family.help_text}", file=fp)
            if family.type_name:
                print(f"# TYPE {name} {family.type_name}", file=fp)
            for labels, value in family.samples:
                print(f"{name}{format_labels(labels)} {format_value(value)}", file=fp)


def get_statistics(trials):
    """
    Return a dictionary of statistics about the supplied optimizer trials.
    """
    log = logging.getLogger("get_statistics")
    results = {"starts": len(trials)}
    if not trials:
        return results

    results["restarts"] = sum(t.restarts for t in trials)
    results["converged"] = sum(1 for t in trials if t.converged)
    results["evaluations"] = sum(t.evaluations for t in trials)

    values = np.array([t.value for t in trials if math.isfinite(t.value)])
    failed = len(trials) - values.size
    if failed:
        log.debug(f"{failed} of {len(trials)} trials have no finite value")
        results["failed"] = failed
    if values.size == 0:
        return results

    results["best"] = float(values.max())
    results["mean"] = float(values.mean())
    results["spread"] = float(values.max() - values.min())
    return results
