"""
Finite-degree energy iterations for the MC and XY ansatze on (D+1)-regular
graphs whose girth exceeds the light cone of an edge.

MC configurations have length 2p+1 and are laid out
(a_1, ..., a_p, a_0, a_-p, ..., a_-1); the center a_0 sits at position p.
XY configurations have length 4p+1 and are laid out
(z_1, y_1, ..., z_p, y_p, a_0, y_-p, z_-p, ..., y_-1, z_-1); the center sits
at position 2p. Entries before the center come from the bra side of the
expectation value and entries after it from the ket side.

Each XY round applies the YY phaser before the ZZ phaser. The iteration runs
in the frame rotated by exp(-i pi/4 X) on every qubit, which fixes |+> and
the mixer and exchanges YY with ZZ. In that frame the ZZ phaser comes first
with angle gamma_y, so the z entries of a configuration carry gamma_y, the y
entries carry gamma_z, and <YY> and <ZZ> swap back at the end.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    AngleSchedule,
    AnsatzKind,
    EnergyReport,
    ScheduleMismatchException,
    TableSizeExceededException,
)
from .tools import (
    checked_real,
    configuration_table,
    power_near_one,
    residue_tolerance,
    xor_convolve,
)

MC_MAX_P = 7
XY_MAX_P = 3

# Columns are the Y eigenvectors for +1 and -1, in the Z basis.
Y_BASIS = np.array([[1, 1], [1j, -1j]], dtype=complex) / math.sqrt(2)


def x_rotation(beta):
    """The matrix of exp(i beta X)."""
    c, s = math.cos(beta), math.sin(beta)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)


def x_mixer(beta):
    """The transverse-field mixer exp(-i beta X) on one qubit."""
    return x_rotation(-beta)


def configuration_length(kind, p):
    return 2 * p + 1 if AnsatzKind.parse(kind) is AnsatzKind.MC else 4 * p + 1


def center_position(kind, p):
    return p if AnsatzKind.parse(kind) is AnsatzKind.MC else 2 * p


def light_cone_levels(kind, p):
    """Number of H levels inside the light cone of an edge."""
    return p if AnsatzKind.parse(kind) is AnsatzKind.MC else 2 * p


def mc_gamma_vector(gamma):
    g = np.asarray(gamma, dtype=float)
    return np.concatenate([g, [0.0], -g[::-1]])


def xy_gamma_vector(gamma_z, gamma_y):
    """
    The phase vector over an XY configuration, in the rotated frame: pass
    gamma_y as gamma_z and gamma_z as gamma_y for a YY-first schedule.
    """
    forward = np.empty(2 * len(gamma_z))
    forward[0::2] = gamma_z
    forward[1::2] = gamma_y
    return np.concatenate([forward, [0.0], -forward[::-1]])


def gamma_vector(schedule):
    if schedule.kind is AnsatzKind.MC:
        return mc_gamma_vector(schedule.gamma)
    return xy_gamma_vector(schedule.gamma_y, schedule.gamma_z)


def frame_channels(kind, yy, zz):
    """
    Map (YY, ZZ) quantities between the rotated frame of the XY iteration
    and the lab frame. The map is its own inverse.
    """
    if AnsatzKind.parse(kind) is AnsatzKind.XY:
        return zz, yy
    return yy, zz


def mc_transfers(beta):
    forward = [x_rotation(b) for b in beta]
    backward = [x_rotation(-b) for b in reversed(beta)]
    return forward + backward


def xy_transfers(beta):
    forward = []
    for b in beta:
        forward.append(Y_BASIS)
        forward.append(Y_BASIS.conj().T @ x_rotation(b))
    backward = []
    for b in reversed(beta):
        backward.append(x_rotation(-b) @ Y_BASIS)
        backward.append(Y_BASIS.conj().T)
    return forward + backward


def _transfers(kind, beta, primed):
    kind = AnsatzKind.parse(kind)
    transfers = mc_transfers(beta) if kind is AnsatzKind.MC else xy_transfers(beta)
    if primed:
        # Flipping the ket at the center swaps the columns of the bracket
        # that ends there.
        center = center_position(kind, len(beta))
        transfers[center - 1] = transfers[center - 1][:, ::-1]
    return transfers


def f_table(kind, beta, primed=False, table=None):
    """
    Return f (or f' when primed) for every configuration. Both carry the
    factor 1/2 from the overlaps with the initial plus state, so that the
    unprimed values sum to one.
    """
    transfers = _transfers(kind, beta, primed)
    if table is None:
        table = configuration_table(len(transfers) + 1)
    bits = (1 - table.astype(np.int64)) // 2
    out = np.full(table.shape[0], 0.5, dtype=complex)
    for t, transfer in enumerate(transfers):
        out *= transfer[bits[:, t], bits[:, t + 1]]
    return out


def _single_f(kind, a, beta, primed):
    a = np.asarray(a)
    expected = configuration_length(kind, len(beta))
    if a.shape != (expected,):
        raise ScheduleMismatchException(
            f"{AnsatzKind.parse(kind)} configuration for p={len(beta)} needs "
            f"{expected} entries, got {a.shape}"
        )
    if not np.all(np.abs(a) == 1):
        raise ValueError(f"Configuration entries must be +1 or -1: {a}")
    return complex(f_table(kind, beta, primed, a.reshape(1, -1).astype(np.int8))[0])


def mc_f(a, beta, primed=False):
    """
    The chained product of <a_t| exp(+-i beta X) |a_t+1> brackets for one MC
    configuration, with the leading 1/2.
    """
    return _single_f(AnsatzKind.MC, a, beta, primed)


def xy_f(a, beta, primed=False):
    """
    The chained product of Z/Y basis overlaps and mixer brackets for one XY
    configuration, with the leading 1/2.
    """
    return _single_f(AnsatzKind.XY, a, beta, primed)


@dataclass(frozen=True)
class HTable:
    """
    One level of the H recursion, holding a complex value per configuration.
    """

    level: int
    values: np.ndarray


def _check_cap(kind, p, max_p):
    if p > max_p:
        raise TableSizeExceededException(
            f"{kind} iteration at p={p} needs 2^{configuration_length(kind, p)} "
            f"configurations; the cap is p <= {max_p}"
        )


def _default_cap(kind):
    return MC_MAX_P if AnsatzKind.parse(kind) is AnsatzKind.MC else XY_MAX_P


def cos_minus_one(phase):
    """cos(phase) - 1 without cancellation for small phases."""
    return -2.0 * np.sin(0.5 * phase) ** 2


def h_levels(table, gammas, f, D, levels, workers=1, method="walsh"):
    """
    Yield H^(1), ..., H^(levels), where H^(m)(a) is the D-th power of
    sum_b cos(Gamma.(a*b)/sqrt(D)) f(b) H^(m-1)(b) and H^(0) = 1.

    Since sum_b f(b) H(b) = 1 at every level, the inner sum is computed as
    1 + delta with delta = sum_b (cos - 1) f(b) H(b), so that the D-th power
    does not amplify the round-off of the leading 1.
    """
    log = logging.getLogger("finitedeg")
    kernel = cos_minus_one(table @ gammas / math.sqrt(D))
    h = np.ones(table.shape[0], dtype=complex)
    for level in range(1, levels + 1):
        delta = xor_convolve(kernel, f * h, workers=workers, method=method)
        h = power_near_one(delta, D)
        log.debug(f"H level {level} of {levels} done")
        yield HTable(level, h)


def _iterate_h(kind, p, D, schedule, levels, workers, method, max_p):
    schedule.require(kind, p)
    if D < 1:
        raise ValueError(f"D must be at least 1, got {D}")
    _check_cap(kind, p, _default_cap(kind) if max_p is None else max_p)
    if levels is None:
        levels = light_cone_levels(kind, p)
    table = configuration_table(configuration_length(kind, p))
    f = f_table(kind, schedule.beta, table=table)
    last = HTable(0, np.ones(table.shape[0], dtype=complex))
    for last in h_levels(
        table, gamma_vector(schedule), f, D, levels, workers, method
    ):
        pass
    return last


def mc_iterate_h(
    p, D, gamma, beta, levels=None, workers=1, method="walsh", max_p=None
):
    """
    Run the MC-ansatz H recursion, by default through the p levels of the
    light cone.
    """
    schedule = AngleSchedule.mc(gamma, beta)
    return _iterate_h(AnsatzKind.MC, p, D, schedule, levels, workers, method, max_p)


def xy_iterate_h(
    p, D, gamma_y, gamma_z, beta, levels=None, workers=1, method="walsh", max_p=None
):
    """
    Run the XY-ansatz H recursion, by default through the 2p levels of its
    light cone.
    """
    schedule = AngleSchedule.xy(gamma_z, gamma_y, beta)
    return _iterate_h(AnsatzKind.XY, p, D, schedule, levels, workers, method, max_p)


def edge_expectations(
    schedule, D, levels=None, workers=1, method="walsh", max_p=None
):
    """
    Return (<XX>, <YY>, <ZZ>) on an edge of a (D+1)-regular graph of large
    girth after the ansatz described by the schedule.
    """
    log = logging.getLogger("finitedeg")
    kind, p = schedule.kind, schedule.p
    if D < 1:
        raise ValueError(f"D must be at least 1, got {D}")
    _check_cap(kind, p, _default_cap(kind) if max_p is None else max_p)
    if levels is None:
        levels = light_cone_levels(kind, p)

    table = configuration_table(configuration_length(kind, p))
    log.debug(f"{kind} p={p} D={D}: {table.shape[0]} configurations")
    gammas = gamma_vector(schedule)
    f = f_table(kind, schedule.beta, table=table)
    f_primed = f_table(kind, schedule.beta, primed=True, table=table)

    h = np.ones(table.shape[0], dtype=complex)
    for level in h_levels(table, gammas, f, D, levels, workers, method):
        h = level.values

    phase = table @ gammas / math.sqrt(D)
    sin_kernel = np.sin(phase)
    center = table[:, center_position(kind, p)]
    primed = f_primed * h
    plain = f * h

    def pair_sum(kernel, weights):
        spread = xor_convolve(kernel, weights, workers=workers, method=method)
        return np.sum(weights * spread)

    # cos = 1 + (cos - 1) splits off the square of sum f' H.
    xx = np.sum(primed) ** 2 + pair_sum(cos_minus_one(phase), primed)
    yy = 1j * pair_sum(sin_kernel, center * primed)
    zz = -1j * pair_sum(sin_kernel, center * plain)
    yy, zz = frame_channels(kind, yy, zz)
    tolerance = residue_tolerance(D)
    return (
        checked_real(xx, "<XX>", tolerance),
        checked_real(yy, "<YY>", tolerance),
        checked_real(zz, "<ZZ>", tolerance),
    )


def mc_edge_expectations(p, D, gamma, beta, **kwargs):
    schedule = AngleSchedule.mc(gamma, beta).require(AnsatzKind.MC, p)
    return edge_expectations(schedule, D, **kwargs)


def xy_edge_expectations(p, D, gamma_y, gamma_z, beta, **kwargs):
    schedule = AngleSchedule.xy(gamma_z, gamma_y, beta).require(AnsatzKind.XY, p)
    return edge_expectations(schedule, D, **kwargs)


def ansatz_energy(spec, p, D, schedule, kind=None, **kwargs):
    """
    Per-edge energy and normalized energy of the ansatz on the Hamiltonian.
    """
    if kind is not None:
        schedule.require(kind, p)
    elif schedule.p != p:
        raise ScheduleMismatchException(
            f"Schedule has depth {schedule.p}, requested p={p}"
        )
    expectations = edge_expectations(schedule, D, **kwargs)
    return EnergyReport.from_expectations(spec, expectations, D)


def closed_form_gamma(gamma, D):
    """
    Map an iteration gamma to the unscaled depth-one closed-form convention,
    whose phaser is exp(-i gamma/2 sum ZZ).
    """
    return -2.0 * gamma / math.sqrt(D)


def iteration_gamma(closed_gamma, D):
    """Inverse of closed_form_gamma."""
    return -closed_gamma * math.sqrt(D) / 2.0
