"""Affine-group representation and the continuous wavelet transform.

The analysing atoms are ``U(a, b) v0 = a**-0.5 * v0((x - b) / a)``.  Analysis
conjugates the atom, ``C(a, b) = <U(a, b) v0 | psi>``; synthesis sums the
atoms against ``C * dmu`` and divides by an effective admissibility constant
obtained from ``calibrate_frame``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from . import _kernels
from .core import (MinimalPacketWavelet, PhysicalParams, ScalePositionGrid,
                   SpatialGrid, WaveFunction, WaveletField, inner_product)
from .errors import (CalibrationError, GridMismatchError, PreconditionError,
                     TruncationError, UnderResolutionError)

# atoms are cut off at this many dilated widths a*delta_x from their centre
WINDOW = 12.0
# half-width, in units of a*delta_x, that a packet must fit inside the grid
SUPPORT = 6.0
CALIBRATION_LEAKAGE = 1e-6


@dataclass(frozen=True)
class AdmissibilityReport:
    c_v_cutoff: float
    k_min: float
    k_max: float
    divergent: bool
    # |v^(0)|**2; the cutoff value grows by 2*pi*dc_density*ln 2 per halving of k_min
    dc_density: float


@dataclass(frozen=True)
class FrameCalibration:
    c_eff: float
    grid: ScalePositionGrid
    wavelet: MinimalPacketWavelet
    leakage: float = 0.0

    def __post_init__(self):
        if not self.c_eff > 0:
            raise CalibrationError(f"non-positive effective constant {self.c_eff}", self.leakage)


# ------------------------------------------------------------ representation

def _check_support(grid: SpatialGrid, center, half_width, what):
    if center - half_width < grid.x_min or center + half_width > grid.x_max:
        raise TruncationError(
            f"{what} support [{center - half_width:g}, {center + half_width:g}] "
            f"exceeds grid [{grid.x_min:g}, {grid.x_max:g}]; tail mass above 1e-9 would be cut")


def evaluate_wavelet(w: MinimalPacketWavelet, params: PhysicalParams,
                     grid: SpatialGrid) -> WaveFunction:
    _check_support(grid, w.x_bar, SUPPORT * w.delta_x, "wavelet")
    return WaveFunction(grid, w(grid.x, params))


def apply_affine(w: MinimalPacketWavelet, a: float, b: float, params: PhysicalParams,
                 grid: SpatialGrid) -> WaveFunction:
    """Sample U(a, b) v0 on ``grid``."""
    if not a > 0:
        raise PreconditionError(f"scale must be positive, got a={a}")
    _check_support(grid, b + a * w.x_bar, SUPPORT * a * w.delta_x, f"atom (a={a:g}, b={b:g})")
    return WaveFunction(grid, w((grid.x - b) / a, params) / np.sqrt(a))


# ------------------------------------------------------------------- lattice

def _lattice(x_grid: SpatialGrid, b_grid: SpatialGrid):
    """Integer description of x_i - b_l on a common lattice: (h0, rx, rb, s)."""
    ratio = x_grid.dx / b_grid.dx
    frac = Fraction(ratio).limit_denominator(64)
    if abs(float(frac) - ratio) > 1e-9 * ratio:
        raise GridMismatchError(
            f"sample spacing {x_grid.dx:g} and position spacing {b_grid.dx:g} are not commensurate")
    rx, rb = frac.numerator, frac.denominator
    h0 = x_grid.dx / rx
    s_real = (x_grid.x_min - b_grid.x_min) / h0
    s = int(round(s_real))
    if abs(s - s_real) > 1e-6:
        raise GridMismatchError("sample grid and position grid are offset off-lattice")
    return h0, rx, rb, s


def _check_resolution(w, params, scales, spacing):
    nyquist = np.pi / spacing
    k_lo, k_hi = w.spectral_support(params)
    top = max(abs(k_lo), abs(k_hi)) / np.min(scales)
    if top > nyquist:
        raise UnderResolutionError(
            f"scale a={np.min(scales):g} carries wavenumbers up to {top:g}, "
            f"above the Nyquist limit {nyquist:g} of spacing {spacing:g}")


def _atom_table(w, params, scales, h0, conjugate):
    """Dilated atoms sampled at lattice offsets inside the cut-off window."""
    lo = np.empty(len(scales), dtype=np.int64)
    length = np.empty(len(scales), dtype=np.int64)
    bounds = []
    for j, a in enumerate(scales):
        c, hw = a * w.x_bar, WINDOW * a * w.delta_x
        n0 = int(np.ceil((c - hw) / h0))
        n1 = int(np.floor((c + hw) / h0))
        lo[j], length[j] = n0, n1 - n0 + 1
        bounds.append((n0, n1))
    table = np.zeros((len(scales), int(length.max())), dtype=np.complex128)
    for j, (a, (n0, n1)) in enumerate(zip(scales, bounds)):
        vals = w(np.arange(n0, n1 + 1) * h0 / a, params) / np.sqrt(a)
        table[j, :n1 - n0 + 1] = np.conj(vals) if conjugate else vals
    return table, lo, length


def _analyse(values, x_grid: SpatialGrid, w, grid: ScalePositionGrid, params):
    scales = grid.scales
    _check_resolution(w, params, scales, max(x_grid.dx, grid.b.dx))
    h0, rx, rb, s = _lattice(x_grid, grid.b)
    table, lo, length = _atom_table(w, params, scales, h0, conjugate=True)
    f = np.ascontiguousarray(values * x_grid.weights, dtype=np.complex128)
    return _kernels.analysis_rows(table, lo, length, f, rx, rb, s, grid.b.n_points)


def _synthesise(field: WaveletField, w, params, out_grid: SpatialGrid):
    grid = field.grid
    scales = grid.scales
    _check_resolution(w, params, scales, max(out_grid.dx, grid.b.dx))
    h0, rx, rb, s = _lattice(out_grid, grid.b)
    table, lo, length = _atom_table(w, params, scales, h0, conjugate=False)
    g = np.ascontiguousarray(field.coefficients * grid.measure)
    rows = _kernels.synthesis_rows(table, lo, length, g, rx, rb, s, out_grid.n_points)
    out = rows[0].copy()
    for j in range(1, rows.shape[0]):
        out += rows[j]
    return out


# ---------------------------------------------------------------- transforms

def forward_cwt(psi: WaveFunction, w: MinimalPacketWavelet, grid: ScalePositionGrid,
                params: PhysicalParams) -> WaveletField:
    """C(a, b) = <U(a, b) v0 | psi> by trapezoid quadrature on psi's grid."""
    return WaveletField(grid, _analyse(psi.values, psi.grid, w, grid, params))


def inverse_cwt(field: WaveletField, w: MinimalPacketWavelet, c: FrameCalibration,
                params: PhysicalParams, out_grid: SpatialGrid) -> WaveFunction:
    if field.grid != c.grid:
        raise GridMismatchError("wavelet field and frame calibration use different grids")
    if w != c.wavelet:
        raise GridMismatchError("frame calibration was computed for a different wavelet")
    return WaveFunction(out_grid, _synthesise(field, w, params, out_grid) / c.c_eff)


def boundary_leakage(field: WaveletField) -> float:
    """Largest coefficient energy |C|**2 on the border of the (a, b) grid relative to the peak."""
    mag = np.abs(field.coefficients) ** 2
    peak = mag.max()
    if peak == 0:
        return 0.0
    edge = max(mag[0].max(), mag[-1].max(), mag[:, 0].max(), mag[:, -1].max())
    return float(edge / peak)


def calibrate_frame(w: MinimalPacketWavelet, grid: ScalePositionGrid, params: PhysicalParams,
                    probe: WaveFunction) -> FrameCalibration:
    """Effective admissibility constant that makes the probe round-trip unbiased."""
    field = forward_cwt(probe, w, grid, params)
    leakage = boundary_leakage(field)
    if leakage > CALIBRATION_LEAKAGE:
        raise CalibrationError(
            f"probe leaks off the (a, b) grid: boundary/peak coefficient energy ratio {leakage:.3e} "
            f"exceeds {CALIBRATION_LEAKAGE:g}", leakage)
    recon = WaveFunction(probe.grid, _synthesise(field, w, params, probe.grid))
    c_eff = inner_product(recon, probe).real / inner_product(probe, probe).real
    return FrameCalibration(c_eff, grid, w, leakage)


# ------------------------------------------------------------- admissibility

def admissibility_constant(w: MinimalPacketWavelet, params: PhysicalParams,
                           k_min: float | None = None,
                           k_max: float | None = None) -> AdmissibilityReport:
    """2*pi * int_{k_min}^{k_max} |v^(k)|**2 / k dk with an infrared cutoff.

    The integral is evaluated in ln k, where the integrand is smooth.
    """
    k0 = w.wavenumber(params)
    if k_min is None:
        k_min = 1e-6 / w.delta_x
    if k_max is None:
        k_max = abs(k0) + 10.0 / w.delta_x
    if not 0 < k_min < k_max:
        raise PreconditionError(f"need 0 < k_min < k_max, got {k_min}, {k_max}")
    if k_max < w.spectral_support(params)[1]:
        raise PreconditionError(
            f"k_max={k_max:g} below the packet's spectral support {w.spectral_support(params)[1]:g}")

    def integrand(u):
        return float(w.spectral_density(np.exp(u), params))

    lo, hi = np.log(k_min), np.log(k_max)
    # split at the spectral peak and its flanks so quad sees the narrow bump
    cuts = [lo]
    if k0 > 0:
        sig = 1.0 / (2.0 * w.delta_x)
        for kk in (k0 - 4 * sig, k0 - sig, k0, k0 + sig, k0 + 4 * sig):
            if kk > 0 and lo < np.log(kk) < hi:
                cuts.append(np.log(kk))
    cuts.append(hi)
    cuts = sorted(set(cuts))
    total = 0.0
    for u0, u1 in zip(cuts[:-1], cuts[1:]):
        val, _ = integrate.quad(integrand, u0, u1, epsabs=0.0, epsrel=1e-13, limit=400)
        total += val
    dc = float(w.spectral_density(0.0, params))
    return AdmissibilityReport(2.0 * np.pi * total, float(k_min), float(k_max), dc > 0.0, dc)


def effective_band(w: MinimalPacketWavelet, params: PhysicalParams, grid: ScalePositionGrid,
                   a0: float = 1.0) -> tuple[float, float]:
    """Wavenumber cutoffs equivalent to truncating scales to [a_min, a_max].

    For a signal whose spectrum sits at the centre frequency of the atom of
    scale ``a0``.
    """
    k0 = w.wavenumber(params)
    return k0 * grid.a_min / a0, k0 * grid.a_max / a0


def admissibility_group_quadrature(w: MinimalPacketWavelet, params: PhysicalParams,
                                   grid: ScalePositionGrid, x_grid: SpatialGrid) -> float:
    """sum |<v|U(a, b)|v>|**2 dmu over a truncated (a, b) box.

    Direct group-side counterpart of ``admissibility_constant``; overlaps are
    computed by spatial quadrature on ``x_grid``.
    """
    v = evaluate_wavelet(w, params, x_grid)
    return forward_cwt(v, w, grid, params).energy()
