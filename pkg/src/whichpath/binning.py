"""Two-bin split of the destructive-port spectrum, mimicking a quad-cell detector."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .spectral import SpectralDensity, require_same_grid

EDGE_FRACTION = 1e-9


class TruncationWarning(UserWarning):
    """Densities are still non-negligible at the grid edges."""


@dataclass(frozen=True)
class BinnedPowers:
    delta_lambda: float
    lambda_s: float
    P_plus: float
    P_minus: float

    @property
    def delta_P(self) -> float:
        return self.P_plus - self.P_minus


def _check_edges(density: SpectralDensity, name: str) -> None:
    v = density.values
    top = v.max()
    if top > 0 and max(v[0], v[-1]) > EDGE_FRACTION * top:
        warnings.warn(
            f"{name} is {max(v[0], v[-1]) / top:.1e} of its peak at the grid edge; "
            "integrals are truncated",
            TruncationWarning,
            stacklevel=3,
        )


def split_integral(density: SpectralDensity, split: float) -> tuple[float, float]:
    """Integrals below and above ``split`` of the not-a-knot cubic interpolant.

    The split may fall between grid points.
    """
    wl = density.wavelengths
    if not wl[0] <= split <= wl[-1]:
        raise ValueError(f"split wavelength {split} outside the grid")
    spline = CubicSpline(wl, density.values)
    lower = float(spline.integrate(wl[0], split))
    upper = float(spline.integrate(split, wl[-1]))
    return lower, upper


def bin_powers(
    i_min: SpectralDensity,
    i_max: SpectralDensity,
    lambda_s: float,
    delta_lambda: float = float("nan"),
) -> BinnedPowers:
    """P+ integrates I_min below lambda_s, P- above it; both over the full
    integral of I_max."""
    require_same_grid(i_min, i_max)
    _check_edges(i_max, "I_max")
    lower, upper = split_integral(i_min, lambda_s)
    denom = sum(split_integral(i_max, lambda_s))
    if not denom > 0:
        raise ValueError("no constructive power to normalise by")
    return BinnedPowers(
        delta_lambda,
        float(lambda_s),
        max(lower, 0.0) / denom,
        max(upper, 0.0) / denom,
    )


@dataclass(frozen=True)
class SweepSummary:
    records: list[BinnedPowers]
    skipped: list[tuple[float, str]]

    @property
    def mean_P_plus(self) -> float:
        return float(np.mean([r.P_plus for r in self.records]))

    @property
    def mean_P_minus(self) -> float:
        return float(np.mean([r.P_minus for r in self.records]))

    @property
    def mean_delta_P(self) -> float:
        """Mean of the per-setting differences."""
        return float(np.mean([r.delta_P for r in self.records]))

    @property
    def difference_of_means(self) -> float:
        return self.mean_P_plus - self.mean_P_minus
