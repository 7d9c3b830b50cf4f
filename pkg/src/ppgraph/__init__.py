"""Dependence graphs for multivariate spatial point patterns from partial spectral coherence."""
from .analysis import AnalysisConfig, AnalysisResult, analyze, auto_half_width
from .graph import (DependenceGraph, build_sdgm, components_and_neighbourhoods, edge_fact_diff,
                    export_graph, import_graph, separation_query)
from .partial import (InverseSpectralField, NumericalError, PartialCoherenceField,
                      invert_spectra, partial_cross_spectrum_direct, recursive_partial,
                      rescaled_inverse, sup_rescaled_inverse)
from .pattern import (MultiTypePointPattern, ObservationWindow, ParseError, ValidationError,
                      estimate_intensity, load_pattern, rescale_to_unit_square)
from .sim import ClusterType, PoissonType, SimSpec, simulate, structure_of
from .spectra import (ConfigurationError, Field, FrequencyGrid, SmoothingSpec,
                      SpectralMatrixField, auto_periodogram, cross_periodogram, decompose_cross,
                      dft, radial_spectrum, smooth_field, spectral_matrix)

__version__ = "0.1.0"
