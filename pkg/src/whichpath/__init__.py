"""Spectrally resolved which-path analysis of a Mach-Zehnder interferometer,
with a vibrating-mirror quad-cell model for comparison."""

from .binning import BinnedPowers, bin_powers
from .experiment import Setup, analyse, run_setting, sweep_accumulate
from .interference import (
    DualityRecord,
    FringeScan,
    ModeSelection,
    ModeSelectionError,
    distinguishability,
    egy_check,
    fringe_extrema,
    normalize,
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
    evaluate_filter,
    shift_filter,
)

__version__ = "0.1.0"
