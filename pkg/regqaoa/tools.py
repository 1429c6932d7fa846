"""
Configuration-space helpers shared by the energy iterations.

A configuration of length L is a vector of +1/-1 entries. Configurations are
enumerated by the integers [0, 2^L): bit i of the index gives entry i, with
bit value 0 meaning +1. Under this order the elementwise product of two
configurations is the XOR of their indices.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from itertools import tee

import numpy as np

from .model import ImaginaryResidueException, InvalidSettingException

THREADS_ENV = "REGQAOA_THREADS"
REAL_TOLERANCE = 1e-10

# Kernel entries materialized per block by the direct summation.
DIRECT_BLOCK_ENTRIES = 1 << 20


def pairwise(iterable):
    """
    iterable -> (s0,s1), (s1,s2), (s2, s3), ... (s_n-1, s_n).
    """
    a, b = tee(iterable)
    next(b, None)
    return zip(a, b)


def resolve_workers(workers=None):
    """
    Resolve a worker count: an integer, "max" for every CPU, or None for the
    value of REGQAOA_THREADS (default 1).
    """
    if workers is None:
        workers = os.environ.get(THREADS_ENV, "1")
    if isinstance(workers, str):
        if workers.strip().lower() == "max":
            return os.cpu_count() or 1
        try:
            workers = int(workers)
        except ValueError:
            raise InvalidSettingException(
                f"Worker count must be an integer or max, got {workers!r}"
            )
    if workers < 1:
        raise InvalidSettingException(f"Worker count must be positive, got {workers}")
    return workers


def configuration_table(length):
    """
    Return an int8 matrix whose row x is the configuration with index x.
    """
    index = np.arange(1 << length, dtype=np.int64)
    table = np.empty((1 << length, length), dtype=np.int8)
    for position in range(length):
        table[:, position] = 1 - 2 * ((index >> position) & 1)
    return table


def table_indices(table):
    """Map a +1/-1 table to 0/1 bracket indices."""
    return (1 - table.astype(np.int64)) // 2


def chain_product(table, transfers, left=None, right=None):
    """
    For every configuration a, return the product over consecutive positions
    of transfers[t][a_t, a_t+1], with 2x2 transfer matrices indexed by 0 for
    +1 and 1 for -1. Optional left and right vectors weight the first and last
    entries.
    """
    length = table.shape[1]
    if len(transfers) != length - 1:
        raise ValueError(
            f"Need {length - 1} transfer brackets for length {length}, "
            f"got {len(transfers)}"
        )
    bits = table_indices(table)
    out = np.ones(table.shape[0], dtype=complex)
    for (here, there), transfer in zip(pairwise(range(length)), transfers):
        out *= np.asarray(transfer, dtype=complex)[bits[:, here], bits[:, there]]
    if left is not None:
        out *= np.asarray(left, dtype=complex)[bits[:, 0]]
    if right is not None:
        out *= np.asarray(right, dtype=complex)[bits[:, -1]]
    return out


def walsh_hadamard(values):
    """
    Unnormalized fast Walsh-Hadamard transform of a vector whose length is a
    power of two. Applying it twice multiplies by the length.
    """
    out = np.array(values, dtype=complex)
    n = out.shape[0]
    if n & (n - 1):
        raise ValueError(f"Length {n} is not a power of two")
    h = 1
    while h < n:
        view = out.reshape(-1, 2, h)
        upper = view[:, 0, :].copy()
        lower = view[:, 1, :]
        view[:, 0, :] = upper + lower
        view[:, 1, :] = upper - lower
        h *= 2
    return out


def _direct_pair(kernel, weights, workers):
    n = kernel.shape[0]
    index = np.arange(n)
    rows_per_block = max(1, DIRECT_BLOCK_ENTRIES // n)
    starts = range(0, n, rows_per_block)

    def block(start):
        rows = index[start : start + rows_per_block]
        return kernel[rows[:, None] ^ index[None, :]] @ weights

    if workers == 1:
        parts = [block(start) for start in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, starts))
    return np.concatenate(parts)


def xor_convolve(kernel, *weights, workers=1, method="walsh"):
    """
    Return the vector a -> sum_b kernel(a XOR b) w(b), where w is the XOR
    convolution of all the weight vectors. This is the sum over b of
    kernel(a*b) w(b) in configuration terms.

    method "walsh" multiplies Walsh-Hadamard spectra; "direct" sums dense
    blocks of the kernel matrix in a pool of workers. Both are deterministic
    for a fixed input and worker count.
    """
    if not weights:
        raise ValueError("Need at least one weight vector")
    kernel = np.asarray(kernel, dtype=complex)
    if method == "walsh":
        spectrum = walsh_hadamard(kernel)
        for w in weights:
            spectrum *= walsh_hadamard(w)
        return walsh_hadamard(spectrum) / kernel.shape[0]
    if method == "direct":
        workers = resolve_workers(workers)
        combined = np.asarray(weights[0], dtype=complex)
        for w in weights[1:]:
            combined = _direct_pair(np.asarray(w, dtype=complex), combined, workers)
        return _direct_pair(kernel, combined, workers)
    raise ValueError(f"Unknown summation method {method}; use walsh or direct")


def checked_real(value, label, tolerance=REAL_TOLERANCE):
    """
    Drop the imaginary part of a quantity that must be real, refusing to do
    so if the residue exceeds the tolerance.
    """
    value = complex(value)
    if abs(value.imag) > tolerance:
        logging.getLogger("tools").error(f"{label} = {value} is not real")
        raise ImaginaryResidueException(
            f"{label} has imaginary part {value.imag:.3e}, above {tolerance:.0e}"
        )
    return value.real


def log1p_complex(z):
    """
    log(1 + z) for complex z, accurate when |z| is small: the modulus goes
    through the real log1p of 2 Re z + |z|^2.
    """
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    return 0.5 * np.log1p(2 * x + x * x + y * y) + 1j * np.arctan2(y, 1 + x)


def power_near_one(delta, D):
    """
    (1 + delta)^D for an integer D, through exp(D log1p(delta)) so that
    small deltas at large D keep their precision.
    """
    return np.exp(D * log1p_complex(delta))


def residue_tolerance(D):
    """Imaginary residues grow with the degree through the D-th powers."""
    return REAL_TOLERANCE * max(1.0, math.sqrt(D))
