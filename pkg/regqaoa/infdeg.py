"""
Infinite-degree limits of the normalized energy.

As D grows, the D-th powers in the H recursion become Gaussian in the
configuration:

    H^(m)(a) = exp(-1/2 sum_jk Gamma_j Gamma_k a_j a_k G^(m-1)_jk),
    G^(m)_jk = sum_a f(a) H^(m)(a) a_j a_k,

seeded with H^(0) = 1, so that G^(0) is the plain second moment of f. At zero
mixer angles the seed is the all-ones matrix. G' is built the same way with
f'. The entries are complex in general, with G_jk = G_kj and
G_-j,-k = conj(G_jk). Conjugating f' also flips the center entry, so the
center row and column of G' change sign under the same mirror.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .finitedeg import (
    ansatz_energy,
    center_position,
    configuration_length,
    f_table,
    frame_channels,
    gamma_vector,
    light_cone_levels,
)
from .model import (
    AnsatzKind,
    DivergentChannelException,
    TableSizeExceededException,
    preset,
)
from .tools import checked_real, configuration_table, resolve_workers

INF_MC_MAX_P = 10
INF_XY_MAX_P = 4

CHUNK_ROWS = 1 << 15


@dataclass(frozen=True)
class GTable:
    """
    The matrices G and G' at one level, indexed by configuration position.
    """

    level: int
    G: np.ndarray
    G_primed: np.ndarray


def _chunks(n):
    return [(start, min(n, start + CHUNK_ROWS)) for start in range(0, n, CHUNK_ROWS)]


def _map_chunks(func, n, workers):
    chunks = _chunks(n)
    if workers == 1:
        return [func(start, stop) for start, stop in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: func(*c), chunks))


def second_moments(table, weights, workers=1):
    """
    sum_a w(a) a_j a_k for every pair of positions, accumulated over row
    chunks in a fixed order.
    """

    def partial(start, stop):
        rows = table[start:stop].astype(float)
        return rows.T @ (rows * weights[start:stop, None])

    total = np.zeros((table.shape[1], table.shape[1]), dtype=complex)
    for part in _map_chunks(partial, table.shape[0], workers):
        total += part
    return total


def gaussian_h(table, gammas, G, workers=1):
    """
    exp(-1/2 a^T (Gamma Gamma^T o G) a) for every configuration a.
    """
    weights = np.outer(gammas, gammas) * G
    out = np.empty(table.shape[0], dtype=complex)

    def partial(start, stop):
        rows = table[start:stop].astype(float)
        out[start:stop] = np.exp(-0.5 * np.einsum("ij,ij->i", rows @ weights, rows))

    _map_chunks(partial, table.shape[0], workers)
    return out


def _check_cap(kind, p, max_p):
    if max_p is None:
        max_p = INF_MC_MAX_P if kind is AnsatzKind.MC else INF_XY_MAX_P
    if p > max_p:
        raise TableSizeExceededException(
            f"Infinite-degree {kind} iteration at p={p} needs "
            f"2^{configuration_length(kind, p)} configurations; "
            f"the cap is p <= {max_p}"
        )


def g_levels(kind, p, schedule, levels=None, workers=1, max_p=None):
    """
    Yield the G tables from the seed (level 0) through the final level, which
    defaults to the light cone: p levels for MC and 2p for XY.
    """
    log = logging.getLogger("infdeg")
    kind = AnsatzKind.parse(kind)
    schedule.require(kind, p)
    _check_cap(kind, p, max_p)
    workers = resolve_workers(workers)
    if levels is None:
        levels = light_cone_levels(kind, p)

    table = configuration_table(configuration_length(kind, p))
    gammas = gamma_vector(schedule)
    f = f_table(kind, schedule.beta, table=table)
    f_primed = f_table(kind, schedule.beta, primed=True, table=table)

    G = second_moments(table, f, workers)
    yield GTable(0, G, second_moments(table, f_primed, workers))
    for level in range(1, levels + 1):
        h = gaussian_h(table, gammas, G, workers)
        G = second_moments(table, f * h, workers)
        log.debug(f"{kind} p={p}: G level {level} of {levels} done")
        yield GTable(level, G, second_moments(table, f_primed * h, workers))


def g_iterate(kind, p, schedule, levels=None, workers=1, max_p=None):
    """
    Return the G table at the final level.
    """
    final = None
    for final in g_levels(kind, p, schedule, levels, workers, max_p):
        pass
    return final


def _require_finite_limit(hamiltonian):
    if hamiltonian.c_X != 0:
        if hamiltonian.matches(preset("EPR")):
            reason = (
                "the EPR energy of the ansatz is bounded by that of the all-zeros "
                "state, so its normalized energy has no finite limit"
            )
        elif hamiltonian.matches(preset("QMC")):
            reason = (
                "the XX channel of QMC diverges like -sqrt(D); only "
                "nu_p(QMC) <= nu_p(XY) holds, so use the XY Hamiltonian instead"
            )
        else:
            reason = "its XX channel is not suppressed by 1/sqrt(D)"
        raise DivergentChannelException(
            f"No infinite-degree normalized energy for {hamiltonian.name}: {reason}"
        )


def nu_from_gtable(hamiltonian, gammas, center, gtable, kind=AnsatzKind.MC):
    """
    Normalized energy of a Hamiltonian without an XX term:
    i sum_j Gamma_j (c_Y G'_0j^2 - c_Z G_0j^2), with c_Y and c_Z taken in
    the frame of the iteration.
    """
    _require_finite_limit(hamiltonian)
    c_Y, c_Z = frame_channels(kind, hamiltonian.c_Y, hamiltonian.c_Z)
    g0 = gtable.G[center]
    g0_primed = gtable.G_primed[center]
    value = 1j * np.sum(
        gammas * (c_Y * g0_primed**2 - c_Z * g0**2)
    )
    return checked_real(value, f"nu({hamiltonian.name})")


def nu_infinite(kind, hamiltonian, p, schedule, workers=1, max_p=None):
    """
    The D -> infinity limit of the normalized energy of the ansatz.
    """
    kind = AnsatzKind.parse(kind)
    hamiltonian = preset(hamiltonian)
    _require_finite_limit(hamiltonian)
    gtable = g_iterate(kind, p, schedule, workers=workers, max_p=max_p)
    return nu_from_gtable(
        hamiltonian, gamma_vector(schedule), center_position(kind, p), gtable, kind
    )


def nu_finite_to_infinite_check(
    kind, p, schedule, D_sequence, hamiltonian="XY", workers=1, max_p=None
):
    """
    Return |nu_p(D) - nu_p(infinity)| for each D, the finite values coming
    from the finite-degree iteration.
    """
    log = logging.getLogger("infdeg")
    D_sequence = list(D_sequence)
    if any(b <= a for a, b in zip(D_sequence, D_sequence[1:])):
        raise ValueError(f"D sequence must be increasing: {D_sequence}")
    hamiltonian = preset(hamiltonian)
    limit = nu_infinite(kind, hamiltonian, p, schedule, workers=workers, max_p=max_p)
    gaps = []
    for D in D_sequence:
        finite = ansatz_energy(
            hamiltonian, p, D, schedule, kind=kind, workers=workers, max_p=max_p
        ).nu
        gaps.append(abs(finite - limit))
        log.debug(f"D={D}: nu={finite}, limit={limit}")
    return gaps


def mc_hamiltonian_p1_nu(gamma, beta):
    """
    Closed form of the MC-ansatz depth-one limit on the MC Hamiltonian:
    gamma sin(4 beta) exp(-2 gamma^2), maximal at gamma = 1/2, beta = pi/8.
    """
    return gamma * math.sin(4 * beta) * math.exp(-2 * gamma * gamma)
