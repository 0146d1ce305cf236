"""Potentials W(x) and their wavelet transform W(a, b)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import MinimalPacketWavelet, PhysicalParams, ScalePositionGrid, SpatialGrid
from .errors import GridMismatchError, PreconditionError
from .wavelet import WINDOW, FrameCalibration, _analyse

KINDS = ("zero", "constant", "harmonic", "gaussian_barrier")


@dataclass(frozen=True)
class PotentialModel:
    kind: str = "zero"
    v0: float = 0.0
    omega: float = 0.0
    width: float = 1.0
    center: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown potential kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "gaussian_barrier" and not self.width > 0:
            raise PreconditionError(f"barrier width must be positive, got {self.width}")
        if self.kind == "harmonic" and self.omega < 0:
            raise PreconditionError(f"omega must be non-negative, got {self.omega}")

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def constant(cls, v0):
        return cls("constant", v0=v0)

    @classmethod
    def harmonic(cls, omega):
        return cls("harmonic", omega=omega)

    @classmethod
    def gaussian_barrier(cls, v0, width, center=0.0):
        return cls("gaussian_barrier", v0=v0, width=width, center=center)

    def __call__(self, x, params: PhysicalParams = PhysicalParams()):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "constant":
            return np.full_like(x, self.v0)
        if self.kind == "harmonic":
            return 0.5 * params.mass * self.omega**2 * x**2
        return self.v0 * np.exp(-((x - self.center) ** 2) / (2.0 * self.width**2))


@dataclass(frozen=True, eq=False)
class PotentialField:
    grid: ScalePositionGrid
    values: np.ndarray = field(repr=False)
    source: PotentialModel

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise PreconditionError(f"values have shape {v.shape}, grid expects {self.grid.shape}")
        object.__setattr__(self, "values", v)

    @property
    def coefficients(self):
        # lets export code treat potential and wavelet fields alike
        return self.values

    def imag_ratio(self) -> float:
        """max |Im W(a, b)| / max |W(a, b)|; 0 for a vanishing field."""
        peak = np.abs(self.values).max()
        if peak == 0:
            return 0.0
        return float(np.abs(self.values.imag).max() / peak)


def evaluate_potential(model: PotentialModel, grid: SpatialGrid,
                       params: PhysicalParams = PhysicalParams()) -> np.ndarray:
    return model(grid.x, params)


def potential_cwt(model: PotentialModel, w: MinimalPacketWavelet, grid: ScalePositionGrid,
                  c: FrameCalibration, params: PhysicalParams) -> PotentialField:
    """W(a, b) = c_eff**-1 * <U(a, b) v0 | W>.

    W(x) is sampled on an extension of the position grid wide enough that
    every atom's cut-off window lies inside it, so no node is truncated.
    """
    if c.grid != grid:
        raise GridMismatchError("frame calibration was computed on a different (a, b) grid")
    b = grid.b
    reach = WINDOW * grid.a_max * w.delta_x + grid.a_max * abs(w.x_bar)
    pad = int(np.ceil(reach / b.dx)) + 1
    ext = SpatialGrid(b.x_min - pad * b.dx, b.x_max + pad * b.dx, b.n_points + 2 * pad)
    vals = _analyse(evaluate_potential(model, ext, params), ext, w, grid, params)
    return PotentialField(grid, vals / c.c_eff, model)
