"""Cross-check of the inverse-matrix, Schur-complement and stepwise partialisation routes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .partial import (invert_spectra, partial_coherency, partial_coherency_direct,
                      recursive_partial)
from .spectra import FrequencyGrid, SmoothingSpec, SpectralMatrixField, _box_average

TOLERANCE = 1e-8


def random_spectral_field(d: int, rng: np.random.Generator, grid: FrequencyGrid | None = None,
                          half_width: int = 2) -> SpectralMatrixField:
    """Box-smoothed outer products of correlated complex Gaussian vectors.

    Each frequency averages at least nine rank-one terms, so every matrix is
    positive definite for ``d <= 8`` with probability one.
    """
    grid = grid or FrequencyGrid(16)
    mix = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    z = rng.normal(size=grid.shape + (d,)) + 1j * rng.normal(size=grid.shape + (d,))
    F = z @ mix.T
    raw = F[..., :, None] * np.conj(F[..., None, :])
    values, counts = _box_average(raw, grid, half_width)
    values = 0.5 * (values + np.conj(np.swapaxes(values, -1, -2)))
    return SpectralMatrixField(grid, values, SmoothingSpec(half_width), counts)


def relative_deviation(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(scale > 0, np.abs(a - b) / scale, 0.0)


@dataclass
class OracleReport:
    max_inverse_direct: float
    max_direct_recursive: float
    max_order_swap: float
    worst: tuple
    tolerance: float = TOLERANCE

    @property
    def max_deviation(self) -> float:
        return max(self.max_inverse_direct, self.max_direct_recursive, self.max_order_swap)

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tolerance


def compare_routes(S: SpectralMatrixField):
    """Deviations between the three routes for every pair at retained frequencies.

    Returns ``(inverse_vs_direct, direct_vs_recursive, order_swap)``, each of
    shape ``(n_retained, d, d)`` with zeros on and below the diagonal.
    """
    d = S.d
    G = invert_spectra(S)
    keep = G.retained
    R_inv = partial_coherency(G)[keep]
    out = np.zeros((3, int(keep.sum()), d, d))
    for i, j in itertools.combinations(range(d), 2):
        rest = [k for k in range(d) if k not in (i, j)]
        direct = partial_coherency_direct(S, i, j).values[keep]

        def stepwise(order):
            fij = recursive_partial(S, i, j, order).values[keep]
            fii = recursive_partial(S, i, i, order).values[keep].real
            fjj = recursive_partial(S, j, j, order).values[keep].real
            return fij / np.sqrt(fii * fjj)

        forward = stepwise(rest)
        backward = stepwise(rest[::-1])
        out[0, :, i, j] = relative_deviation(R_inv[:, i, j], direct)
        out[1, :, i, j] = relative_deviation(direct, forward)
        out[2, :, i, j] = relative_deviation(forward, backward)
    return out, np.argwhere(keep)


def oracle_check(d: int, replicates: int, seed: int, grid_p: int = 16,
                 half_width: int = 2) -> OracleReport:
    if d < 3:
        raise ValueError("the oracle check needs d >= 3")
    rng = np.random.Generator(np.random.PCG64(seed))
    grid = FrequencyGrid(grid_p)
    maxima = np.zeros(3)
    worst = (0, (0, 0), (0, 1))
    worst_val = -1.0
    for r in range(replicates):
        S = random_spectral_field(d, rng, grid, half_width)
        dev, idx = compare_routes(S)
        maxima = np.maximum(maxima, dev.max(axis=(1, 2, 3)))
        total = dev.max(axis=0)
        k, i, j = np.unravel_index(np.argmax(total), total.shape)
        if total[k, i, j] > worst_val:
            worst_val = total[k, i, j]
            p, q = idx[k]
            worst = (r, (int(p), int(q) - grid.P), (int(i), int(j)))
    return OracleReport(*map(float, maxima), worst)
