"""Periodogram estimation for multi-type point patterns on the unit square.

Fields live on a half-plane lattice of integer frequencies ``(p, q)`` with
``0 <= p <= P`` and ``-P <= q <= P - 1``. Values are stored as arrays of
shape ``(P + 1, 2P, ...)`` indexed by ``[p, q + P]``; trailing axes hold
matrix entries when present.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .pattern import MultiTypePointPattern

TWO_PI = 2.0 * np.pi
PHASE_TOLERANCE = 1e-12


class ConfigurationError(ValueError):
    """Estimator settings that cannot produce the requested output."""


@dataclass(frozen=True)
class FrequencyGrid:
    P: int = 16
    exclude_dc: bool = True

    def __post_init__(self):
        if int(self.P) != self.P or self.P < 1:
            raise ValueError(f"P must be a positive integer, got {self.P!r}")
        object.__setattr__(self, "P", int(self.P))

    @property
    def p(self) -> np.ndarray:
        return np.arange(self.P + 1)

    @property
    def q(self) -> np.ndarray:
        return np.arange(-self.P, self.P)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.P + 1, 2 * self.P)

    @property
    def size(self) -> int:
        return (self.P + 1) * 2 * self.P

    @property
    def dc_index(self) -> tuple[int, int]:
        return (0, self.P)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer ``(p, q)`` arrays of grid shape."""
        return np.meshgrid(self.p, self.q, indexing="ij")

    def omega(self) -> tuple[np.ndarray, np.ndarray]:
        """Angular frequencies ``(2 pi p, 2 pi q)`` for unit-square patterns."""
        pp, qq = self.mesh()
        return TWO_PI * pp, TWO_PI * qq

    def target_mask(self) -> np.ndarray:
        """True where a frequency takes part in smoothing targets and suprema."""
        mask = np.ones(self.shape, dtype=bool)
        if self.exclude_dc:
            mask[self.dc_index] = False
        return mask

    def indices(self):
        """Grid indices in output order: p ascending, then q ascending."""
        for p in self.p:
            for q in self.q:
                yield int(p), int(q)


@dataclass(frozen=True, eq=False)
class Field:
    """Values on a frequency grid; complex or real, optionally matrix valued."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape[:2] != self.grid.shape:
            raise ValueError(f"values of shape {v.shape} do not fit grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    def at(self, p: int, q: int):
        return self.values[p, q + self.grid.P]


@dataclass(frozen=True)
class SmoothingSpec:
    half_width: int = 1
    kernel: Literal["daniell_box"] = "daniell_box"

    def __post_init__(self):
        if int(self.half_width) != self.half_width or self.half_width < 0:
            raise ValueError(f"half_width must be a nonnegative integer, got {self.half_width!r}")
        if self.kernel != "daniell_box":
            raise ValueError(f"unsupported kernel {self.kernel!r}")

    @property
    def box_size(self) -> int:
        return (2 * self.half_width + 1) ** 2


def minimal_half_width(d: int) -> int:
    """Smallest h >= 1 with (2h + 1)^2 >= d + 1."""
    return max(1, math.ceil((math.sqrt(d + 1) - 1) / 2))


@dataclass(frozen=True, eq=False)
class SpectralMatrixField(Field):
    """Per-frequency ``d x d`` spectral matrices.

    ``smoothing`` is None for raw periodogram matrices. ``contributors``
    counts the periodogram ordinates averaged at each frequency.
    """

    smoothing: SmoothingSpec | None = None
    contributors: np.ndarray | None = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.values.shape[-1]


@dataclass(frozen=True, eq=False)
class CrossSpectrumDecomposition:
    grid: FrequencyGrid
    co: np.ndarray
    quad: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    valid: np.ndarray


def dft_at(x, y, p, q) -> np.ndarray:
    """Sum of exp(-2 pi i (p x_k + q y_k)) over events, at arbitrary integer frequencies.

    ``p`` and ``q`` broadcast against each other; the event axis is summed.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    p = np.asarray(p)
    q = np.asarray(q)
    phase = np.multiply.outer(p, x) + np.multiply.outer(q, y)
    return np.exp(-1j * TWO_PI * phase).sum(axis=-1)


def _require_unit(pattern: MultiTypePointPattern):
    if not pattern.window.is_unit_square:
        raise ValueError("pattern must be rescaled to the unit square first "
                         f"(window is {pattern.window})")


def _dft_points(x, y, grid: FrequencyGrid) -> np.ndarray:
    # separable: exp(-2 pi i (p x + q y)) = exp(-2 pi i p x) exp(-2 pi i q y)
    ex = np.exp(-1j * TWO_PI * np.multiply.outer(grid.p, x))
    ey = np.exp(-1j * TWO_PI * np.multiply.outer(grid.q, y))
    return ex @ ey.T


def dft(pattern: MultiTypePointPattern, type_index: int, grid: FrequencyGrid) -> Field:
    """DFT of the events of one type over the grid."""
    _require_unit(pattern)
    x, y = pattern.points(type_index)
    values = _dft_points(x, y, grid)
    # exp(0) summed: make the DC term exact
    values[grid.dc_index] = x.size
    return Field(grid, values)


def dft_all(pattern: MultiTypePointPattern, grid: FrequencyGrid) -> np.ndarray:
    """DFTs of every type stacked on a trailing axis, shape ``grid.shape + (d,)``."""
    return np.stack([dft(pattern, i, grid).values for i in range(pattern.d)], axis=-1)


def auto_periodogram(F: Field) -> Field:
    v = F.values
    return Field(F.grid, v.real ** 2 + v.imag ** 2)


def cross_periodogram(Fi: Field, Fj: Field) -> Field:
    if Fi.grid != Fj.grid:
        raise ValueError(f"grid mismatch: {Fi.grid} vs {Fj.grid}")
    return Field(Fi.grid, Fi.values * np.conj(Fj.values))


def decompose_cross(fij: Field) -> CrossSpectrumDecomposition:
    """Co-, quadrature-, amplitude and phase spectra of a cross-spectrum.

    Uses ``f = C - iQ = amplitude * exp(i phase)``. The phase is NaN (and
    ``valid`` False) where the amplitude is at most 1e-12 of its maximum.
    """
    v = np.asarray(fij.values, dtype=complex)
    co = v.real.copy()
    quad = -v.imag
    amplitude = np.hypot(co, quad)
    phase = np.arctan2(-quad, co)
    # atan2 returns -pi for (-0, negative); report the half-open (-pi, pi]
    phase = np.where(phase <= -np.pi, np.pi, phase)
    top = amplitude.max() if amplitude.size else 0.0
    valid = amplitude > PHASE_TOLERANCE * top
    phase = np.where(valid, phase, np.nan)
    return CrossSpectrumDecomposition(fij.grid, co, quad, amplitude, phase, valid)


def _full_plane(values: np.ndarray, grid: FrequencyGrid):
    """Embed a half-plane field in the lattice ``p, q in [-P, P]``.

    Returns the extended array and a mask of populated cells. Cells with
    ``p < 0`` are filled by conjugate symmetry where the mirror is on the grid.
    """
    P = grid.P
    ext_shape = (2 * P + 1, 2 * P + 1) + values.shape[2:]
    ext = np.zeros(ext_shape, dtype=values.dtype)
    mask = np.zeros((2 * P + 1, 2 * P + 1), dtype=bool)
    # rows p = 0..P at offset P, columns q = -P..P-1 at offset 0
    ext[P:, :2 * P] = values
    mask[P:, :2 * P] = True
    # p < 0 mirrors (-p, -q); -q in [-P, P-1] means q in [-P+1, P]
    for p in range(1, P + 1):
        src = values[p, ::-1]            # q = P-1 .. -P  -> mirrored q = -P+1 .. P
        ext[P - p, 1:] = np.conj(src)
        mask[P - p, 1:] = True
    if grid.exclude_dc:
        ext[P, P] = 0
        mask[P, P] = False
    return ext, mask


def _box_average(values: np.ndarray, grid: FrequencyGrid, h: int):
    """Daniell box mean over populated neighbours; returns (smoothed, counts)."""
    values = np.asarray(values)
    if h == 0:
        return values.copy(), np.ones(grid.shape, dtype=int)
    P = grid.P
    ext, mask = _full_plane(values, grid)
    pad = [(h, h), (h, h)] + [(0, 0)] * (ext.ndim - 2)
    ext = np.pad(ext, pad)
    mask = np.pad(mask, [(h, h), (h, h)])
    total = np.zeros(grid.shape + values.shape[2:], dtype=ext.dtype)
    counts = np.zeros(grid.shape, dtype=int)
    rows = slice(P + h, 2 * P + 1 + h)   # target p = 0..P
    cols = np.arange(2 * P) + h          # target q = -P..P-1
    for a in range(-h, h + 1):
        r = slice(rows.start + a, rows.stop + a)
        for b in range(-h, h + 1):
            c = slice(cols[0] + b, cols[-1] + b + 1)
            total += ext[r, c]
            counts += mask[r, c]
    tail = (slice(None),) * 2 + (None,) * (values.ndim - 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = total / counts[tail]
    keep = ~grid.target_mask()
    out[keep] = values[keep]
    counts = np.where(keep, 1, counts)
    return out, counts


def smooth_field(field: Field, spec: SmoothingSpec) -> Field:
    """Daniell box smoothing in index space; ``half_width=0`` is the identity."""
    out, _ = _box_average(field.values, field.grid, spec.half_width)
    return Field(field.grid, out)


def raw_spectral_matrix(pattern: MultiTypePointPattern, grid: FrequencyGrid) -> SpectralMatrixField:
    F = dft_all(pattern, grid)
    M = F[..., :, None] * np.conj(F[..., None, :])
    return SpectralMatrixField(grid, M, None, np.ones(grid.shape, dtype=int))


def spectral_matrix(pattern: MultiTypePointPattern, grid: FrequencyGrid,
                    spec: SmoothingSpec | None = None) -> SpectralMatrixField:
    """Smoothed cross-periodogram matrices at every grid frequency.

    ``spec=None`` picks :func:`minimal_half_width` for the pattern's d.
    ``half_width=0`` returns the raw rank-one matrices.
    """
    d = pattern.d
    if spec is None:
        spec = SmoothingSpec(minimal_half_width(d))
    if spec.half_width > 0 and spec.box_size < d + 1:
        raise ConfigurationError(
            f"half width {spec.half_width} averages {spec.box_size} ordinates, fewer than "
            f"d + 1 = {d + 1}; use half width >= {minimal_half_width(d)}")
    raw = raw_spectral_matrix(pattern, grid)
    values, counts = _box_average(raw.values, grid, spec.half_width)
    # enforce exact Hermitian symmetry against rounding in the sums
    values = 0.5 * (values + np.conj(np.swapaxes(values, -1, -2)))
    return SpectralMatrixField(grid, values, spec, counts)


def radial_spectrum(field: Field) -> list[tuple[int, float]]:
    """Means of a real field over unit-width rings ``[r - 1/2, r + 1/2)`` in ``|(p, q)|``.

    The DC cell is always left out. Only populated rings are returned.
    """
    grid = field.grid
    pp, qq = grid.mesh()
    ring = np.floor(np.hypot(pp, qq) + 0.5).astype(int)
    keep = np.ones(grid.shape, dtype=bool)
    keep[grid.dc_index] = False
    values = np.asarray(field.values, dtype=float)
    sums = np.bincount(ring[keep], weights=values[keep])
    counts = np.bincount(ring[keep])
    return [(r, float(sums[r] / counts[r])) for r in range(counts.size) if counts[r]]
