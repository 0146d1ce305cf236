"""Affine-group (self-similar) wavelet representation of the 1D Schrodinger equation."""

__version__ = "0.1.0"

from .core import (MinimalPacketWavelet, PhysicalParams, ScalePositionGrid, SpatialGrid,
                   WaveFunction, WaveletField, inner_product, l2_norm)
from .errors import (BoundaryLeakError, CalibrationError, ConfigError, GridMismatchError,
                     PreconditionError, TruncationError, UnderResolutionError)
from .evolution import (EvolutionConfig, coefficient_distance, diagonal_norm_drift,
                        dispersion_phase, evolve_reference, evolve_wavelet_diagonal,
                        free_energy, kinetic_symbol_exact, wavelet_evolution_residual)
from .io import export_field, read_wvs1
from .potential import PotentialField, PotentialModel, evaluate_potential, potential_cwt
from .wavelet import (AdmissibilityReport, FrameCalibration, admissibility_constant,
                      admissibility_group_quadrature, apply_affine, calibrate_frame,
                      evaluate_wavelet, forward_cwt, inverse_cwt)
