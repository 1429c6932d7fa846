"""
Depth-one closed forms for the MC ansatz on arbitrary graphs.

Angles here use the unscaled convention: the phaser is
exp(-i gamma/2 sum_edges ZZ) and the mixer exp(-i beta sum X).
finitedeg.closed_form_gamma maps iteration angles into it. In this
convention the classic MaxCut results use the opposite sign of gamma.
"""

import math
from dataclasses import dataclass

from .model import ValidationException


@dataclass(frozen=True)
class EdgeLocalStats:
    """
    d_u + 1 and d_v + 1 are the endpoint degrees and t_uv the number of
    triangles through the edge.
    """

    d_u: int
    d_v: int
    t_uv: int

    def __post_init__(self):
        if self.d_u < 0 or self.d_v < 0:
            raise ValidationException(f"Negative excess degree in {self}")
        if not 0 <= self.t_uv <= min(self.d_u, self.d_v):
            raise ValidationException(f"Triangle count out of range in {self}")


def edge_local_stats(g, u, v):
    return EdgeLocalStats(g.degree(u) - 1, g.degree(v) - 1, g.triangle_count(u, v))


def p1_edge_expectations(stats, gamma, beta):
    """
    (<XX>, <YY>, <ZZ>) on one edge after a single MC layer.
    """
    c = math.cos(gamma)
    d_u, d_v, t = stats.d_u, stats.d_v, stats.t_uv
    outer = c ** (d_u + d_v - 2 * t)
    triangles = outer * (1 - math.cos(2 * gamma) ** t)
    cross = math.sin(4 * beta) * math.sin(gamma) * (c**d_u + c**d_v)

    xx = 0.5 * (1 + math.cos(2 * gamma) ** t) * outer
    yy = -0.5 * cross + 0.5 * math.cos(2 * beta) ** 2 * triangles
    zz = 0.5 * cross + 0.5 * math.sin(2 * beta) ** 2 * triangles
    return xx, yy, zz


def p1_graph_energy(g, spec, gamma, beta):
    """
    Total energy of the Hamiltonian on g after a single MC layer.
    """
    total = 0.0
    for u, v in g.edges:
        expectations = p1_edge_expectations(edge_local_stats(g, u, v), gamma, beta)
        total += spec.edge_energy(*expectations)
    return total


def p1_maxcut_value(g, gamma, beta):
    """
    Expected cut size after a single layer, in the MaxCut convention
    exp(-i gamma C) with C the cut operator.
    """
    total = 0.0
    for u, v in g.edges:
        zz = p1_edge_expectations(edge_local_stats(g, u, v), -gamma, beta)[2]
        total += 0.5 * (1 - zz)
    return total


def maxcut_edge_value(d, gamma, beta):
    """
    Expected cut fraction per edge on a triangle-free (d+1)-regular graph.
    """
    return 0.5 * (1 + math.sin(4 * beta) * math.sin(gamma) * math.cos(gamma) ** d)


def p1_maxcut_optimum(d):
    """
    Return (beta, gamma, per-edge value) at the optimum of maxcut_edge_value.
    The value is at least (1 + 1/sqrt(e (d+1)))/2.
    """
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}")
    beta = math.pi / 8
    gamma = math.atan(1 / math.sqrt(d))
    return beta, gamma, maxcut_edge_value(d, gamma, beta)


def p1_maxcut_lower_bound(d):
    return 0.5 * (1 + 1 / math.sqrt(math.e * (d + 1)))
