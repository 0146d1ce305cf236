"""Reference x-space propagators and the diagonal wavelet-domain evolution."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (MinimalPacketWavelet, PhysicalParams, ScalePositionGrid, WaveFunction,
                   WaveletField)
from .errors import BoundaryLeakError, GridMismatchError, PreconditionError
from .potential import PotentialField, PotentialModel, evaluate_potential, potential_cwt
from .wavelet import FrameCalibration, forward_cwt

METHODS = ("split_step_spectral", "crank_nicolson")
# fraction of the box, on each side, watched for probability leaking to the boundary
BOUNDARY_STRIP = 1.0 / 16.0
LEAK_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    n_steps: int
    method: str = "split_step_spectral"

    def __post_init__(self):
        if not self.dt > 0:
            raise PreconditionError(f"dt must be positive, got {self.dt}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise PreconditionError(f"n_steps must be an integer >= 1, got {self.n_steps}")
        if self.method not in METHODS:
            raise PreconditionError(f"unknown method {self.method!r}; expected one of {METHODS}")

    @classmethod
    def for_time(cls, t, dt, method="split_step_spectral"):
        """Smallest number of steps of at most ``dt`` that lands exactly on ``t``."""
        n = max(1, int(np.ceil(t / dt - 1e-9)))
        return cls(t / n, n, method)


def boundary_mass(psi: WaveFunction) -> float:
    """Fraction of |psi|**2 lying in the outer strips of the box."""
    dens = np.abs(psi.values) ** 2 * psi.grid.weights
    m = max(1, int(psi.grid.n_points * BOUNDARY_STRIP))
    total = dens.sum()
    if total == 0:
        return 0.0
    return float((dens[:m].sum() + dens[-m:].sum()) / total)


def _check_leak(values, grid, stage):
    leaked = boundary_mass(WaveFunction(grid, values))
    if leaked > LEAK_TOLERANCE:
        raise BoundaryLeakError(
            f"{stage}: probability {leaked:.3e} reached the boundary strip "
            f"(tolerance {LEAK_TOLERANCE:g})", leaked)


def _split_step(psi, V, params, cfg, check_every):
    grid = psi.grid
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n_points, d=grid.dx)
    kinetic = np.exp(-1j * params.hbar * k**2 * cfg.dt / (2.0 * params.mass))
    half = np.exp(-0.5j * V * cfg.dt / params.hbar)
    out = psi.values.copy()
    for step in range(1, cfg.n_steps + 1):
        out = half * np.fft.ifft(kinetic * np.fft.fft(half * out))
        if step % check_every == 0:
            _check_leak(out, grid, f"split-step at step {step}")
    return out


def _crank_nicolson(psi, V, params, cfg, check_every):
    """Cayley propagator with a fourth-order compact (Numerov) Laplacian.

    Multiplying through by M = 1 + dx**2/12 d2 keeps both sides tridiagonal;
    psi vanishes outside the box.
    """
    grid = psi.grid
    n, dx = grid.n_points, grid.dx
    c = -params.hbar**2 / (2.0 * params.mass) / dx**2
    tau = 1j * cfg.dt / (2.0 * params.hbar)
    V = V.astype(np.complex128)
    off_v = np.zeros(n, dtype=np.complex128)
    lower_v, upper_v = off_v.copy(), off_v.copy()
    lower_v[1:] = V[:-1] / 12.0
    upper_v[:-1] = V[1:] / 12.0
    # H_M = c*d2 + M*V as tridiagonal bands
    h_lo = c + lower_v
    h_di = -2.0 * c + 10.0 * V / 12.0
    h_up = c + upper_v
    a_lo, a_di, a_up = 1.0 / 12.0 + tau * h_lo, 10.0 / 12.0 + tau * h_di, 1.0 / 12.0 + tau * h_up
    b_lo, b_di, b_up = 1.0 / 12.0 - tau * h_lo, 10.0 / 12.0 - tau * h_di, 1.0 / 12.0 - tau * h_up
    a_lo[0] = a_up[-1] = 0.0
    out = psi.values.copy()
    rhs = np.empty(n, dtype=np.complex128)
    for step in range(1, cfg.n_steps + 1):
        rhs[:] = b_di * out
        rhs[1:] += b_lo[1:] * out[:-1]
        rhs[:-1] += b_up[:-1] * out[1:]
        out = _kernels.tridiag_solve(a_lo, a_di, a_up, rhs)
        if step % check_every == 0:
            _check_leak(out, grid, f"Crank-Nicolson at step {step}")
    return out


def evolve_reference(psi: WaveFunction, model: PotentialModel, params: PhysicalParams,
                     cfg: EvolutionConfig) -> WaveFunction:
    """psi(t = n_steps * dt) under -hbar^2/2m d^2/dx^2 + W(x)."""
    _check_leak(psi.values, psi.grid, "initial state")
    V = evaluate_potential(model, psi.grid, params)
    check_every = max(1, cfg.n_steps // 16)
    if cfg.method == "split_step_spectral":
        out = _split_step(psi, V, params, cfg, check_every)
    else:
        out = _crank_nicolson(psi, V, params, cfg, check_every)
    _check_leak(out, psi.grid, "final state")
    return WaveFunction(psi.grid, out)


# ----------------------------------------------------------- wavelet domain

def kinetic_symbol_exact(xi, a, w: MinimalPacketWavelet, params: PhysicalParams):
    """(-hbar^2/2m d2/dx2 atom) / atom at xi = (x - b)/a for the atom U(a, b) v0."""
    hbar, m, dx = params.hbar, params.mass, w.delta_x
    brace = 1j * w.p / hbar - (np.asarray(xi) - w.x_bar) / (2.0 * dx**2)
    return hbar**2 / (2.0 * m * a**2) * (1.0 / (2.0 * dx**2) - brace**2)


def free_energy(a, w: MinimalPacketWavelet, params: PhysicalParams):
    """p^2/(2 m a^2) + hbar^2/(4 m a^2 dx^2), the kinetic part of E(a, b)."""
    a = np.asarray(a, dtype=float)
    return (w.p**2 / (2.0 * params.mass * a**2)
            + params.hbar**2 / (4.0 * params.mass * a**2 * w.delta_x**2))


def dispersion_energies(w: MinimalPacketWavelet, params: PhysicalParams,
                        wf: PotentialField) -> np.ndarray:
    """E(a, b) on every node of the potential field's grid."""
    return free_energy(wf.grid.scales, w, params)[:, None] + wf.values


def dispersion_phase(a, b, w: MinimalPacketWavelet, params: PhysicalParams,
                     wf: PotentialField) -> complex:
    j = wf.grid.scale_index(a)
    l = wf.grid.position_index(b)
    return complex(free_energy(wf.grid.scales[j], w, params) + wf.values[j, l])


def evolve_wavelet_diagonal(field: WaveletField, wf: PotentialField, w: MinimalPacketWavelet,
                            params: PhysicalParams, t: float) -> WaveletField:
    """C(a, b; t) = exp(-i E(a, b) t / hbar) C(a, b; 0), node by node."""
    if field.grid != wf.grid:
        raise GridMismatchError("wavelet field and potential field use different grids")
    if t < 0:
        raise PreconditionError(f"t must be non-negative, got {t}")
    phase = np.exp(-1j * dispersion_energies(w, params, wf) * (t / params.hbar))
    return WaveletField(field.grid, field.coefficients * phase)


def diagonal_norm_drift(field: WaveletField, wf: PotentialField, w: MinimalPacketWavelet,
                        params: PhysicalParams, t: float) -> float:
    """Relative change of coefficient energy caused by any imaginary part of W(a, b)."""
    e0 = field.energy()
    if e0 == 0:
        return 0.0
    return evolve_wavelet_diagonal(field, wf, w, params, t).energy() / e0 - 1.0


def coefficient_distance(f1: WaveletField, f2: WaveletField) -> float:
    """||f1 - f2|| / ||f1|| in the measure-weighted coefficient norm."""
    if f1.grid != f2.grid:
        raise GridMismatchError("fields use different grids")
    mu = f1.grid.measure
    num = np.sum(np.abs(f1.coefficients - f2.coefficients) ** 2 * mu)
    den = np.sum(np.abs(f1.coefficients) ** 2 * mu)
    return float(np.sqrt(num / den)) if den > 0 else float(np.sqrt(num))


def wavelet_evolution_residual(psi0: WaveFunction, model: PotentialModel,
                               w: MinimalPacketWavelet, grid: ScalePositionGrid,
                               params: PhysicalParams, calibration: FrameCalibration,
                               t: float, dt: float,
                               method: str = "split_step_spectral",
                               wf: PotentialField | None = None) -> float:
    """Distance between transform-then-diagonal-evolve and evolve-then-transform.

    The reference is advanced with steps of at most ``dt``.
    """
    if t < 0:
        raise PreconditionError(f"t must be non-negative, got {t}")
    if wf is None:
        wf = potential_cwt(model, w, grid, calibration, params)
    c0 = forward_cwt(psi0, w, grid, params)
    if t == 0:
        psi_t = psi0
    else:
        psi_t = evolve_reference(psi0, model, params, EvolutionConfig.for_time(t, dt, method))
    reference = forward_cwt(psi_t, w, grid, params)
    diagonal = evolve_wavelet_diagonal(c0, wf, w, params, t)
    return coefficient_distance(reference, diagonal)
