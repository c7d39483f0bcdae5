"""Integer Walsh-Hadamard and Moebius transforms of truth tables."""

from __future__ import annotations

from typing import Dict

import numpy as np

from condenselab.fnrep import DenseTruthTable


def walsh_hadamard(table: DenseTruthTable) -> np.ndarray:
    """Unnormalized transform of the +-1 version of ``table`` (0 -> +1, 1 -> -1).

    Entry ``S`` equals ``2**arity`` times the Fourier coefficient on ``S``,
    so every entry is an exact integer.
    """
    signs = 1 - 2 * table.values.astype(np.int64)
    for i in range(table.arity):
        view = signs.reshape(-1, 2, 2 ** i)
        low = view[:, 0, :].copy()
        high = view[:, 1, :]
        view[:, 0, :] = low + high
        view[:, 1, :] = low - high
    return signs


def mobius(table: DenseTruthTable) -> np.ndarray:
    """Coefficients of the multilinear real polynomial agreeing with ``table``."""
    coeffs = table.values.astype(np.int64)
    for i in range(table.arity):
        view = coeffs.reshape(-1, 2, 2 ** i)
        view[:, 1, :] -= view[:, 0, :]
    return coeffs


def fourier_sparsity(table: DenseTruthTable) -> int:
    return int(np.count_nonzero(walsh_hadamard(table)))


def degree(table: DenseTruthTable) -> int:
    support = np.flatnonzero(mobius(table))
    if support.size == 0:
        return 0
    return max(bin(int(mask)).count("1") for mask in support)


def spectrum(table: DenseTruthTable) -> Dict[int, int]:
    """Nonzero scaled coefficients keyed by subset mask."""
    coeffs = walsh_hadamard(table)
    return {int(mask): int(coeffs[mask]) for mask in np.flatnonzero(coeffs)}
