"""Domain types, grids, norms and inner products."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, PreconditionError


@dataclass(frozen=True)
class PhysicalParams:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise PreconditionError(f"hbar and mass must be positive, got {self}")


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid on [x_min, x_max], both endpoints included."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise PreconditionError(f"x_min must be below x_max, got {self.x_min}, {self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < 8:
            raise PreconditionError(f"n_points must be an integer >= 8, got {self.n_points}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights."""
        w = np.full(self.n_points, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


@dataclass(frozen=True)
class ScalePositionGrid:
    """Log-spaced scales times a uniform position grid.

    ``[a_min, a_max]`` is the truncated scale range; it is split into
    ``n_scales`` cells of equal width in ln a and the scale nodes sit at the
    geometric centre of each cell.  The cell measure is the exact integral of
    ``da/a**2`` over the cell, so the weights tile the rectangle exactly.
    """

    a_min: float
    a_max: float
    n_scales: int
    b: SpatialGrid

    def __post_init__(self):
        if not 0 < self.a_min < self.a_max:
            raise PreconditionError(f"need 0 < a_min < a_max, got {self.a_min}, {self.a_max}")
        if int(self.n_scales) != self.n_scales or self.n_scales < 1:
            raise PreconditionError(f"n_scales must be a positive integer, got {self.n_scales}")

    @property
    def log_step(self) -> float:
        return np.log(self.a_max / self.a_min) / self.n_scales

    @property
    def scale_edges(self) -> np.ndarray:
        return self.a_min * np.exp(self.log_step * np.arange(self.n_scales + 1))

    @property
    def scales(self) -> np.ndarray:
        return self.a_min * np.exp(self.log_step * (np.arange(self.n_scales) + 0.5))

    @property
    def positions(self) -> np.ndarray:
        return self.b.x

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_scales, self.b.n_points)

    @property
    def scale_weights(self) -> np.ndarray:
        """Integral of da/a**2 over each scale cell."""
        edges = self.scale_edges
        return 1.0 / edges[:-1] - 1.0 / edges[1:]

    @property
    def measure(self) -> np.ndarray:
        """Invariant-measure weight of every (a, b) node."""
        return np.outer(self.scale_weights, self.b.weights)

    def scale_index(self, a: float) -> int:
        idx = np.flatnonzero(np.isclose(self.scales, a, rtol=1e-12, atol=0.0))
        if idx.size != 1:
            raise PreconditionError(f"scale a={a} is not a node of the grid")
        return int(idx[0])

    def position_index(self, b: float) -> int:
        idx = np.flatnonzero(np.isclose(self.positions, b, rtol=0.0,
                                        atol=1e-9 * self.b.dx))
        if idx.size != 1:
            raise PreconditionError(f"position b={b} is not a node of the grid")
        return int(idx[0])


@dataclass(frozen=True)
class MinimalPacketWavelet:
    """Gaussian minimal-uncertainty packet used as the mother wavelet.

    ``p`` is a momentum; the carrier is ``exp(i p x / hbar)``.
    """

    delta_x: float = 1.0
    p: float = 0.0
    x_bar: float = 0.0

    def __post_init__(self):
        if not self.delta_x > 0:
            raise PreconditionError(f"delta_x must be positive, got {self.delta_x}")

    @property
    def prefactor(self) -> float:
        return (2.0 * np.pi * self.delta_x**2) ** -0.25

    def wavenumber(self, params: PhysicalParams) -> float:
        return self.p / params.hbar

    def __call__(self, x, params: PhysicalParams):
        """Evaluate v0 at arbitrary points."""
        x = np.asarray(x, dtype=float)
        arg = -((x - self.x_bar) ** 2) / (4.0 * self.delta_x**2) + 1j * self.wavenumber(params) * x
        return self.prefactor * np.exp(arg)

    def spectral_density(self, k, params: PhysicalParams):
        """|v0^(k)|**2 for the unitary Fourier transform."""
        k = np.asarray(k, dtype=float)
        dx = self.delta_x
        k0 = self.wavenumber(params)
        return dx * np.sqrt(2.0 / np.pi) * np.exp(-2.0 * dx**2 * (k - k0) ** 2)

    def spectral_support(self, params: PhysicalParams) -> tuple[float, float]:
        """Band outside which the amplitude spectrum is below exp(-16)."""
        k0 = self.wavenumber(params)
        half = 4.0 / self.delta_x
        return k0 - half, k0 + half


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: SpatialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (self.grid.n_points,):
            raise PreconditionError(
                f"values have shape {values.shape}, grid expects ({self.grid.n_points},)")
        object.__setattr__(self, "values", values)

    def __mul__(self, c):
        return WaveFunction(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class WaveletField:
    grid: ScalePositionGrid
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise PreconditionError(
                f"coefficients have shape {c.shape}, grid expects {self.grid.shape}")
        object.__setattr__(self, "coefficients", c)

    def energy(self) -> float:
        """Measure-weighted coefficient energy (no admissibility normalisation)."""
        return float(np.sum(np.abs(self.coefficients) ** 2 * self.grid.measure))


def l2_norm(psi: WaveFunction) -> float:
    return float(np.sqrt(np.sum(np.abs(psi.values) ** 2 * psi.grid.weights)))


def inner_product(phi: WaveFunction, psi: WaveFunction) -> complex:
    """<phi|psi>, conjugate-linear in phi."""
    if phi.grid != psi.grid:
        raise GridMismatchError(f"incompatible grids {phi.grid} and {psi.grid}")
    return complex(np.sum(np.conj(phi.values) * psi.values * phi.grid.weights))
