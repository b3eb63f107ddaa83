"""Wavelength grids, spectral power densities and filter transmission profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

FOUR_LN2 = 4.0 * math.log(2.0)


class IncompatibleSpectraError(ValueError):
    """Raised when two densities do not live on the same wavelength grid."""


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform wavelength axis in nm, both ends included."""

    lambda_min: float = 815.0
    lambda_max: float = 835.0
    step: float = 0.2

    def __post_init__(self):
        if not self.lambda_min < self.lambda_max:
            raise ValueError("lambda_min must be below lambda_max")
        if not self.step > 0:
            raise ValueError("step must be positive")
        n = (self.lambda_max - self.lambda_min) / self.step
        if abs(n - round(n)) > 1e-6:
            raise ValueError(
                f"range {self.lambda_min}-{self.lambda_max} nm is not a whole "
                f"number of {self.step} nm steps"
            )

    @property
    def size(self) -> int:
        return int(round((self.lambda_max - self.lambda_min) / self.step)) + 1

    @property
    def wavelengths(self) -> np.ndarray:
        return self.lambda_min + self.step * np.arange(self.size)

    def refined(self, factor: int = 2) -> "SpectralGrid":
        return SpectralGrid(self.lambda_min, self.lambda_max, self.step / factor)

    def compatible(self, other: "SpectralGrid") -> bool:
        return self.size == other.size and np.allclose(
            self.wavelengths, other.wavelengths, rtol=0, atol=1e-9
        )


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Non-negative power density sampled on a grid (power units per nm)."""

    grid: SpectralGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.size,):
            raise ValueError(
                f"expected {self.grid.size} values, got shape {values.shape}"
            )
        if np.any(np.isnan(values)) or np.any(values < 0):
            raise ValueError("spectral density must be finite and non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def wavelengths(self) -> np.ndarray:
        return self.grid.wavelengths

    def scaled(self, factor: float) -> "SpectralDensity":
        return SpectralDensity(self.grid, self.values * factor)

    def total(self) -> float:
        """Trapezoidal integral over the grid."""
        return float(np.trapezoid(self.values, dx=self.grid.step))

    def peak(self) -> float:
        return float(self.values.max())

    def at(self, wavelength: float) -> float:
        """Linear interpolation between grid points."""
        return float(np.interp(wavelength, self.wavelengths, self.values))


def require_same_grid(*densities: SpectralDensity) -> SpectralGrid:
    grid = densities[0].grid
    for d in densities[1:]:
        if not grid.compatible(d.grid):
            raise IncompatibleSpectraError(
                f"spectra sampled on different grids: {grid} vs {d.grid}"
            )
    return grid


@dataclass(frozen=True)
class FilterProfile:
    """Band-pass transmission window.

    ``shape`` is ``"gaussian"`` or ``"supergaussian"``; a supergaussian of
    order 1 is the gaussian.
    """

    center: float = 826.0
    fwhm: float = 3.0
    peak_transmission: float = 1.0
    shape: str = "gaussian"
    order: int = 1

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError("fwhm must be positive")
        # zero peak is allowed so a fully blocked arm can be expressed
        if not 0.0 <= self.peak_transmission <= 1.0:
            raise ValueError("peak_transmission must lie in [0, 1]")
        if self.shape not in ("gaussian", "supergaussian"):
            raise ValueError(f"unknown filter shape {self.shape!r}")
        if int(self.order) != self.order or self.order < 1:
            raise ValueError("supergaussian order must be a whole number >= 1")
        if self.shape == "gaussian" and self.order != 1:
            raise ValueError("gaussian shape implies order 1")


@dataclass(frozen=True)
class SourceSpectrum:
    center: float = 826.0
    fwhm: float = 10.0
    total_power: float = 1.0

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError("fwhm must be positive")
        if not self.total_power > 0:
            raise ValueError("total_power must be positive")

    def density(self, grid: SpectralGrid) -> SpectralDensity:
        """Gaussian density normalised so its integral over all λ is total_power."""
        x = (grid.wavelengths - self.center) / self.fwhm
        norm = self.total_power * math.sqrt(FOUR_LN2 / math.pi) / self.fwhm
        return SpectralDensity(grid, norm * np.exp(-FOUR_LN2 * x * x))


def transmission(profile: FilterProfile, wavelengths) -> np.ndarray:
    """Transmission of ``profile`` at arbitrary wavelengths."""
    u = (2.0 * (np.asarray(wavelengths, dtype=float) - profile.center) / profile.fwhm) ** 2
    return profile.peak_transmission * np.exp(-math.log(2.0) * u**profile.order)


def evaluate_filter(profile: FilterProfile, grid: SpectralGrid) -> np.ndarray:
    return transmission(profile, grid.wavelengths)


def shift_filter(profile: FilterProfile, delta_lambda: float) -> FilterProfile:
    """Blue-shift the transmission window by ``delta_lambda`` nm (tilting the filter)."""
    if delta_lambda < 0:
        raise ValueError("filter rotation only shifts towards shorter wavelengths")
    return replace(profile, center=profile.center - delta_lambda)


def arm_spectrum(
    source: SourceSpectrum, filt: FilterProfile, grid: SpectralGrid
) -> SpectralDensity:
    return SpectralDensity(grid, source.density(grid).values * evaluate_filter(filt, grid))


def balance_arms(
    arm1: SpectralDensity, arm2: SpectralDensity
) -> tuple[SpectralDensity, SpectralDensity]:
    """Attenuate the brighter arm so both carry the same integrated power.

    Stands in for the neutral-density filter used to equalise the arms.
    """
    require_same_grid(arm1, arm2)
    p1, p2 = arm1.total(), arm2.total()
    if p1 <= 0 or p2 <= 0:
        raise ValueError("cannot balance an arm that carries no power")
    if p1 > p2:
        return arm1.scaled(p2 / p1), arm2
    return arm1, arm2.scaled(p1 / p2)
