"""Partial spectra from per-frequency spectral matrices.

Three independent routes to the partial coherence between components i and j
given all others:

* inverse matrix: ``g = f^-1`` and ``d_ij = g_ij / sqrt(g_ii g_jj)``;
* direct Schur complement, conditioning on the rest in one block solve;
* stepwise elimination, one conditioning component at a time.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .spectra import Field, FrequencyGrid, SpectralMatrixField

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
MAX_DROP_FRACTION = 0.10


class NumericalError(RuntimeError):
    """Too many frequencies could not be inverted."""


class InvariantError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class InverseSpectralField:
    """Inverse spectral matrices; NaN wherever a frequency is not retained.

    ``retained`` marks frequencies that were inverted, ``dropped`` those that
    should have been but could not be, ``ridge_used`` the ridge added at each.
    """

    grid: FrequencyGrid
    values: np.ndarray
    ridge_used: np.ndarray
    retained: np.ndarray
    dropped: np.ndarray

    @property
    def d(self) -> int:
        return self.values.shape[-1]

    @property
    def n_regularized(self) -> int:
        return int(np.count_nonzero(self.ridge_used > 0))

    @property
    def n_dropped(self) -> int:
        return int(np.count_nonzero(self.dropped))


@dataclass(frozen=True, eq=False)
class PartialCoherenceField:
    """|d_ij| per frequency, NaN off the retained set, unit diagonal."""

    grid: FrequencyGrid
    values: np.ndarray
    retained: np.ndarray

    @property
    def d(self) -> int:
        return self.values.shape[-1]

    def pair(self, i: int, j: int) -> Field:
        return Field(self.grid, self.values[..., i, j])


def _hermitian_inverse(m: np.ndarray):
    """Inverse of a stack of Hermitian matrices via eigendecomposition.

    Returns (inverse, condition number); the inverse is NaN where the matrix
    is not positive definite.
    """
    w, v = np.linalg.eigh(m)
    lo = w[..., 0]
    hi = w[..., -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(lo > 0, hi / lo, np.inf)
        inv = (v / w[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    inv[~(lo > 0)] = np.nan
    return inv, cond


def _regularized_inverse(m: np.ndarray, ridge_epsilon: float):
    inv, cond = _hermitian_inverse(m)
    ridge = np.zeros(m.shape[:-2])
    bad = ~(cond <= CONDITION_LIMIT)
    if np.any(bad):
        d = m.shape[-1]
        trace = np.real(np.trace(m[bad], axis1=-2, axis2=-1))
        ridge[bad] = ridge_epsilon * np.maximum(trace, 0.0) / d
        eye = np.eye(d)
        inv_bad, _ = _hermitian_inverse(m[bad] + ridge[bad][:, None, None] * eye)
        inv[bad] = inv_bad
    return inv, ridge


def invert_spectra(S: SpectralMatrixField, ridge_epsilon: float = 1e-8,
                   max_drop_fraction: float = MAX_DROP_FRACTION) -> InverseSpectralField:
    """Invert the spectral matrix at every retained frequency.

    Frequencies with condition number above 1e12 get a ridge of
    ``ridge_epsilon * trace / d`` on the diagonal. A frequency is dropped
    when its smoothing neighbourhood averaged fewer than d ordinates (the
    matrix is singular by construction) or when it stays indefinite after
    the ridge. Dropping more than ``max_drop_fraction`` of the candidate
    frequencies raises :class:`NumericalError`.
    """
    grid = S.grid
    d = S.d
    candidates = grid.target_mask()
    dropped = np.zeros(grid.shape, dtype=bool)
    if S.contributors is not None and S.smoothing is not None:
        dropped |= candidates & (S.contributors < d)

    todo = candidates & ~dropped
    values = np.full(S.values.shape, np.nan, dtype=complex)
    ridge = np.zeros(grid.shape)
    inv, r = _regularized_inverse(S.values[todo], ridge_epsilon)
    values[todo] = inv
    ridge[todo] = r
    failed = todo & np.isnan(values).any(axis=(-2, -1))
    dropped |= failed
    retained = candidates & ~dropped

    n_drop = int(dropped.sum())
    n_cand = int(candidates.sum())
    if n_drop:
        warnings.warn(f"{n_drop} of {n_cand} frequencies could not be inverted and are "
                      "excluded", RuntimeWarning, stacklevel=2)
    if n_cand == 0 or n_drop > max_drop_fraction * n_cand:
        bad = [(int(p), int(q) - grid.P) for p, q in zip(*np.nonzero(dropped))]
        raise NumericalError(f"{n_drop} of {n_cand} frequencies dropped "
                             f"(limit {max_drop_fraction:.0%}); first: {bad[:10]}")
    n_ridge = int(np.count_nonzero(ridge))
    if n_ridge:
        logger.info("ridge regularization applied at %d frequencies", n_ridge)
    return InverseSpectralField(grid, values, ridge, retained, dropped)


def _diag_scale(G: InverseSpectralField) -> np.ndarray:
    diag = np.real(np.diagonal(G.values, axis1=-2, axis2=-1))
    bad = G.retained & ~(diag > 0).all(axis=-1)
    if np.any(bad):
        p, q = np.argwhere(bad)[0]
        raise InvariantError(f"nonpositive inverse diagonal at (p, q) = ({p}, {q - G.grid.P})")
    return np.sqrt(diag)


def partial_coherency(G: InverseSpectralField) -> np.ndarray:
    """Complex partial coherency ``-g_ij / sqrt(g_ii g_jj)``; unit diagonal."""
    s = _diag_scale(G)
    with np.errstate(invalid="ignore"):
        R = -G.values / (s[..., :, None] * s[..., None, :])
    d = G.d
    R[..., np.arange(d), np.arange(d)] = 1.0
    R[~G.retained] = np.nan
    return R


def rescaled_inverse(G: InverseSpectralField) -> PartialCoherenceField:
    """Absolute rescaled inverse ``|g_ij| / sqrt(g_ii g_jj)``."""
    D = np.abs(partial_coherency(G))
    # |.| of a Hermitian matrix is symmetric up to rounding; make it exact
    D = np.maximum(D, np.swapaxes(D, -1, -2))
    return PartialCoherenceField(G.grid, D, G.retained.copy())


def _check_pair(S: SpectralMatrixField, i: int, j: int):
    d = S.d
    if d < 3:
        raise ValueError(f"partialisation needs d >= 3, got d = {d}")
    if not (0 <= i < d and 0 <= j < d):
        raise IndexError(f"indices ({i}, {j}) out of range for d = {d}")
    if i == j:
        raise ValueError("i and j must differ")


def _schur_entry(S: SpectralMatrixField, i: int, j: int, given: Sequence[int],
                 ridge_epsilon: float = 1e-8) -> np.ndarray:
    f = S.values
    given = list(given)
    if not given:
        return f[..., i, j].copy()
    block = f[..., given, :][..., :, given]
    inv, _ = _regularized_inverse(block, ridge_epsilon)
    left = f[..., i, given]
    right = f[..., given, j]
    return f[..., i, j] - np.einsum("...a,...ab,...b->...", left, inv, right)


def partial_cross_spectrum_direct(S: SpectralMatrixField, i: int, j: int,
                                  ridge_epsilon: float = 1e-8) -> Field:
    """f_ij given all other components, by a single Schur-complement solve."""
    _check_pair(S, i, j)
    rest = [k for k in range(S.d) if k not in (i, j)]
    return Field(S.grid, _schur_entry(S, i, j, rest, ridge_epsilon))


def partial_coherency_direct(S: SpectralMatrixField, i: int, j: int,
                             ridge_epsilon: float = 1e-8) -> Field:
    """R_ij given the rest, normalised by the partial auto-spectra on the same set."""
    _check_pair(S, i, j)
    rest = [k for k in range(S.d) if k not in (i, j)]
    fij = _schur_entry(S, i, j, rest, ridge_epsilon)
    fii = np.real(_schur_entry(S, i, i, rest, ridge_epsilon))
    fjj = np.real(_schur_entry(S, j, j, rest, ridge_epsilon))
    with np.errstate(invalid="ignore", divide="ignore"):
        return Field(S.grid, fij / np.sqrt(fii * fjj))


def recursive_partial(S: SpectralMatrixField, i: int, j: int,
                      conditioning: Sequence[int], zero_tol: float = 1e-12) -> Field:
    """Partial cross-spectrum by stepwise first-order elimination.

    ``f_ab|C,k = f_ab|C - f_ak|C f_kk|C^-1 f_kb|C``, with ``k`` running over
    ``conditioning`` in order. Frequencies where a partial auto-spectrum
    vanishes (below ``zero_tol`` times the raw auto-spectrum) come back NaN.
    """
    conditioning = tuple(int(k) for k in conditioning)
    if len(set(conditioning)) != len(conditioning) or {i, j} & set(conditioning):
        raise ValueError("conditioning indices must be distinct and exclude i and j")
    f = S.values
    flagged = np.zeros(S.grid.shape, dtype=bool)

    @lru_cache(maxsize=None)
    def entry(a: int, b: int, order: int) -> np.ndarray:
        if order == 0:
            return f[..., a, b]
        k = conditioning[order - 1]
        fkk = entry(k, k, order - 1)
        scale = np.abs(f[..., k, k])
        zero = np.abs(fkk) <= zero_tol * scale
        flagged[...] |= zero
        with np.errstate(invalid="ignore", divide="ignore"):
            step = entry(a, k, order - 1) * entry(k, b, order - 1) / np.where(zero, np.nan, fkk)
        return entry(a, b, order - 1) - step

    out = np.array(entry(i, j, len(conditioning)), dtype=complex)
    out[flagged] = np.nan
    return Field(S.grid, out)


def sup_rescaled_inverse(D: PartialCoherenceField) -> np.ndarray:
    """Per-pair maximum of |d_ij| over retained frequencies; unit diagonal."""
    if not np.any(D.retained):
        raise ValueError("no retained frequencies to take a supremum over")
    sup = D.values[D.retained].max(axis=0)
    sup = np.maximum(sup, sup.T)
    np.fill_diagonal(sup, 1.0)
    return sup


def argsup_rescaled_inverse(D: PartialCoherenceField) -> np.ndarray:
    """Frequency ``(p, q)`` attaining each pair's supremum, shape ``(d, d, 2)``."""
    idx = np.argwhere(D.retained)
    vals = D.values[D.retained]
    best = vals.argmax(axis=0)
    out = idx[best]
    out[..., 1] -= D.grid.P
    return out
