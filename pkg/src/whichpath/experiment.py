"""End-to-end chain for one filter shift: arms -> fringes -> extrema -> modes -> bins."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .binning import BinnedPowers, SweepSummary, bin_powers
from .interference import (
    FringeScan,
    ModeSelection,
    ModeSelectionError,
    distinguishability,
    egy_check,
    fringe_extrema,
    fringe_law,
    interpolate_arms,
    normalization_constant,
    phase_sweep,
    select_modes,
    simulate_fringes,
    theory_extrema,
    visibility,
)
from .spectral import (
    FilterProfile,
    SourceSpectrum,
    SpectralDensity,
    SpectralGrid,
    arm_spectrum,
    balance_arms,
    shift_filter,
)

log = logging.getLogger(__name__)

MODES = ("A", "B", "E")


@dataclass(frozen=True)
class Setup:
    source: SourceSpectrum = field(default_factory=SourceSpectrum)
    filter1: FilterProfile = field(default_factory=FilterProfile)
    filter2: FilterProfile = field(default_factory=FilterProfile)
    grid: SpectralGrid = field(default_factory=SpectralGrid)
    mode_overlap: float = 0.98
    phase_count: int = 64
    balance: bool = True
    selection_method: str = "auto"
    smoothing: int = 1

    def arms(self, delta_lambda: float) -> tuple[SpectralDensity, SpectralDensity]:
        arm1 = arm_spectrum(self.source, self.filter1, self.grid)
        arm2 = arm_spectrum(self.source, shift_filter(self.filter2, delta_lambda), self.grid)
        if self.balance:
            arm1, arm2 = balance_arms(arm1, arm2)
        return arm1, arm2


@dataclass(frozen=True, eq=False)
class AnalysedSpectra:
    """Everything derived from one pair of arm spectra, all normalised."""

    delta_lambda: float
    arm1: SpectralDensity
    arm2: SpectralDensity
    i_max: SpectralDensity
    i_min: SpectralDensity
    V: np.ndarray
    D: np.ndarray
    modes: ModeSelection
    bins: BinnedPowers
    mode_overlap: float
    scan: FringeScan | None = None

    def mode_row(self, mode: str) -> dict:
        lam = self.modes.wavelength(mode)
        V, D = self.modes.V(mode), self.modes.D(mode)
        i1, i2 = interpolate_arms(self.arm1, self.arm2, lam)
        root = math.sqrt(i1 * i2)
        i_max = i1 + i2 + 2.0 * self.mode_overlap * root
        i_min = (math.sqrt(i1) - math.sqrt(i2)) ** 2 + 2.0 * (1.0 - self.mode_overlap) * root
        return {
            "delta_lambda_nm": self.delta_lambda,
            "mode": mode,
            "lambda_nm": lam,
            "Imax": i_max,
            "Imin": i_min,
            "V": V,
            "D": D,
            "V2plusD2": egy_check(V, D).sum_of_squares,
        }

    def mode_rows(self) -> list[dict]:
        return [self.mode_row(m) for m in MODES]

    def fringe_at(self, wavelength: float, phases) -> np.ndarray:
        """Detected-port fringe at an arbitrary wavelength from interpolated arms."""
        i1, i2 = interpolate_arms(self.arm1, self.arm2, wavelength)
        return fringe_law([i1], [i2], self.mode_overlap, phases)[0]


def analyse(
    arm1: SpectralDensity,
    arm2: SpectralDensity,
    *,
    delta_lambda: float,
    mode_overlap: float | None,
    phase_count: int = 64,
    selection_method: str = "auto",
    smoothing: int = 1,
) -> AnalysedSpectra:
    """Normalise to four times the arm-1 peak and derive extrema, V, D, modes and bins.

    ``mode_overlap=None`` uses the perfect-interference closed forms, which is
    how measured arm spectra are turned into predictions.
    """
    n = normalization_constant(arm1)
    a1, a2 = arm1.scaled(1.0 / n), arm2.scaled(1.0 / n)
    scan = None
    if mode_overlap is None:
        i_max, i_min = theory_extrema(a1, a2)
        mu = 1.0
    else:
        scan = simulate_fringes(a1, a2, mode_overlap, phase_sweep(phase_count))
        i_max, i_min = fringe_extrema(scan)
        mu = mode_overlap
    V = visibility(i_max, i_min)
    D = distinguishability(a1, a2)
    modes = select_modes(V, a1, a2, smoothing=smoothing, method=selection_method)
    bins = bin_powers(i_min, i_max, modes.lambda_E, delta_lambda)
    return AnalysedSpectra(delta_lambda, a1, a2, i_max, i_min, V, D, modes, bins, mu, scan)


def run_setting(setup: Setup, delta_lambda: float) -> AnalysedSpectra:
    arm1, arm2 = setup.arms(delta_lambda)
    return analyse(
        arm1,
        arm2,
        delta_lambda=delta_lambda,
        mode_overlap=setup.mode_overlap,
        phase_count=setup.phase_count,
        selection_method=setup.selection_method,
        smoothing=setup.smoothing,
    )


def sweep_accumulate(settings, setup: Setup) -> tuple[list[AnalysedSpectra], SweepSummary]:
    """Run every filter shift in order; settings whose modes cannot be found
    are skipped and reported in the summary."""
    settings = list(settings)
    if not settings:
        raise ValueError("sweep needs at least one filter shift")
    results, skipped = [], []
    for dl in settings:
        try:
            results.append(run_setting(setup, dl))
        except ModeSelectionError as exc:
            log.warning("skipping delta_lambda=%g nm: %s", dl, exc)
            skipped.append((dl, str(exc)))
    if not results:
        raise ModeSelectionError("no setting in the sweep admits mode selection")
    return results, SweepSummary([r.bins for r in results], skipped)
