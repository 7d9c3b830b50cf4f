"""End-to-end estimation of a spatial dependence graph from a pattern."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields, replace
from typing import Union

import numpy as np

from .graph import DependenceGraph, build_sdgm
from .partial import (InverseSpectralField, PartialCoherenceField, argsup_rescaled_inverse,
                      invert_spectra, rescaled_inverse, sup_rescaled_inverse)
from .pattern import MultiTypePointPattern, rescale_to_unit_square
from .spectra import (ConfigurationError, FrequencyGrid, SmoothingSpec, SpectralMatrixField,
                      minimal_half_width, spectral_matrix)

NULL_EXCEEDANCE = 0.05
SMOOTH_RULES = ("auto", "minimal")


def auto_half_width(d: int, alpha: float, n_frequencies: int,
                    level: float = NULL_EXCEEDANCE, max_half_width: int | None = None) -> int:
    """Smallest box half width whose estimates can resolve ``alpha``.

    Under no dependence, a squared partial coherence averaged over K
    ordinates of a d-variate spectrum is Beta(1, K - d + 1), so a single
    frequency exceeds ``alpha`` with probability ``(1 - alpha^2)^(K - d + 1)``.
    The half width is increased from the rank minimum until that probability,
    summed over ``n_frequencies``, is at most ``level``.
    """
    h = minimal_half_width(d)
    tail = math.log1p(-alpha * alpha)
    while True:
        k = (2 * h + 1) ** 2
        if math.log(n_frequencies) + (k - d + 1) * tail <= math.log(level):
            return h
        if max_half_width is not None and h >= max_half_width:
            return h
        h += 1


@dataclass(frozen=True)
class AnalysisConfig:
    alpha: float = 0.4
    grid_p: int = 16
    smooth_h: Union[int, str] = "auto"
    ridge: float = 1e-8
    square_statistic: bool = False
    exclude_dc: bool = True
    allow_bivariate: bool = False

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.grid_p) != self.grid_p or self.grid_p < 1:
            raise ValueError(f"grid_p must be a positive integer, got {self.grid_p}")
        if self.smooth_h not in SMOOTH_RULES and (isinstance(self.smooth_h, str)
                                                  or int(self.smooth_h) != self.smooth_h
                                                  or self.smooth_h < 0):
            raise ValueError("smooth_h must be 'auto', 'minimal' or a nonnegative integer, "
                             f"got {self.smooth_h!r}")
        if not self.ridge > 0:
            raise ValueError(f"ridge must be positive, got {self.ridge}")

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(int(self.grid_p), self.exclude_dc)

    @property
    def statistic_threshold(self) -> float:
        """Threshold on |d| equivalent to ``alpha`` on the configured statistic."""
        return math.sqrt(self.alpha) if self.square_statistic else self.alpha

    def half_width(self, d: int) -> int:
        if self.smooth_h == "minimal":
            return minimal_half_width(d)
        if self.smooth_h != "auto":
            return int(self.smooth_h)
        grid = self.grid
        n = int(grid.target_mask().sum())
        return auto_half_width(d, self.statistic_threshold, n, max_half_width=grid.P)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True, eq=False)
class AnalysisResult:
    pattern: MultiTypePointPattern
    config: AnalysisConfig
    half_width: int
    spectra: SpectralMatrixField
    inverse: InverseSpectralField
    coherence: PartialCoherenceField
    sup: np.ndarray
    statistic: np.ndarray
    argsup: np.ndarray
    graph: DependenceGraph
    warnings: list[str] = field(default_factory=list)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.pattern.types

    def pairs(self):
        """Rows ``(label_i, label_j, statistic, p, q, edge)`` for i < j."""
        d = len(self.labels)
        for i in range(d):
            for j in range(i + 1, d):
                p, q = self.argsup[i, j]
                yield (self.labels[i], self.labels[j], float(self.statistic[i, j]),
                       int(p), int(q), (i, j) in self.graph.edges)


def analyze(pattern: MultiTypePointPattern, config: AnalysisConfig | None = None) -> AnalysisResult:
    """Estimate smoothed spectra on the unit square and threshold the sup statistic."""
    config = config or AnalysisConfig()
    d = pattern.d
    if d < 2 or (d == 2 and not config.allow_bivariate):
        raise ConfigurationError(
            f"partialisation requires d >= 3 types, got {d}"
            + ("; pass allow_bivariate for plain coherence" if d == 2 else ""))
    unit = rescale_to_unit_square(pattern)
    h = config.half_width(d)
    grid = config.grid
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        S = spectral_matrix(unit, grid, SmoothingSpec(h))
        G = invert_spectra(S, config.ridge)
    D = rescaled_inverse(G)
    sup = sup_rescaled_inverse(D)
    stat = sup ** 2 if config.square_statistic else sup
    graph = build_sdgm(stat, pattern.types, config.alpha)
    return AnalysisResult(pattern, config, h, S, G, D, sup, stat, argsup_rescaled_inverse(D),
                          graph, [str(w.message) for w in caught])


def with_overrides(config: AnalysisConfig, **kw) -> AnalysisConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
