"""Time-domain model of the vibrating-mirror experiment with a split photodiode.

Each path reaches the detector as a unit-power transverse Gaussian (waist 1)
displaced by the summed vibrations of the mirrors on that path.  Port
amplitudes assume 50:50 splitters; the detected port of the inner
interferometer is dark at inner phase 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import erfc

TOPOLOGIES = ("full_nested", "inner_only_blocked_c")
DEFAULT_FREQUENCIES = {"A": 30.0, "B": 32.0, "E": 35.0, "C": 37.0, "F": 39.0}
PATH_MIRRORS = {"A": ("E", "A", "F"), "B": ("E", "B", "F"), "C": ("C",)}
MAX_TILT = 0.2
HALF_WIDTH = 6.0
TRANSVERSE_POINTS = 601


class TransverseTruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MirrorSpec:
    label: str
    frequency: float
    tilt_displacement: float = 0.05

    def __post_init__(self):
        if self.label not in DEFAULT_FREQUENCIES:
            raise ValueError(f"unknown mirror {self.label!r}")
        if not self.frequency > 0:
            raise ValueError("mirror frequency must be positive")
        if not 0.0 <= self.tilt_displacement <= MAX_TILT:
            raise ValueError(f"tilt displacement must lie in [0, {MAX_TILT}] waists")


@dataclass(frozen=True)
class InterferometerConfig:
    topology: str = "inner_only_blocked_c"
    inner_phase: float = 0.0
    outer_phase: float = 0.0
    mirrors: tuple[MirrorSpec, ...] = ()
    mode_overlap: float = 1.0
    blocked_paths: tuple[str, ...] = ()

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        if not (math.isfinite(self.inner_phase) and math.isfinite(self.outer_phase)):
            raise ValueError("phases must be finite")
        if not 0.0 <= self.mode_overlap <= 1.0:
            raise ValueError("mode overlap must lie in [0, 1]")
        labels = [m.label for m in self.mirrors]
        if len(set(labels)) != len(labels):
            raise ValueError("each mirror may appear once")
        freqs = [m.frequency for m in self.mirrors]
        if len(set(freqs)) != len(freqs):
            raise ValueError("mirror frequencies must be pairwise distinct")
        if self.topology == "inner_only_blocked_c" and set(labels) - {"A", "B", "E"}:
            raise ValueError("with path c blocked only mirrors A, B and E are modelled")
        object.__setattr__(self, "mirrors", tuple(self.mirrors))
        object.__setattr__(self, "blocked_paths", tuple(self.blocked_paths))
        if set(self.blocked_paths) - set(self.paths):
            raise ValueError(f"can only block paths among {self.paths}")

    @property
    def paths(self) -> tuple[str, ...]:
        return ("A", "B") if self.topology == "inner_only_blocked_c" else ("A", "B", "C")

    @property
    def ports(self) -> tuple[str, ...]:
        if self.topology == "inner_only_blocked_c":
            return ("detector", "bright")
        return ("detector", "outer_other", "inner_other")

    @property
    def max_frequency(self) -> float:
        return max((m.frequency for m in self.mirrors), default=0.0)

    def mirror(self, label: str) -> MirrorSpec | None:
        return next((m for m in self.mirrors if m.label == label), None)

    def port_amplitudes(self, port: str) -> np.ndarray:
        """Complex amplitude with which each path reaches ``port``."""
        ein = np.exp(1j * self.inner_phase)
        if self.topology == "inner_only_blocked_c":
            table = {"detector": [0.5, -0.5 * ein], "bright": [0.5, 0.5 * ein]}
        else:
            eout = np.exp(1j * self.outer_phase)
            s = 1.0 / (2.0 * math.sqrt(2.0))
            table = {
                "detector": [0.25, -0.25 * ein, 0.5 * eout],
                "outer_other": [0.25, -0.25 * ein, -0.5 * eout],
                "inner_other": [s, s * ein, 0.0],
            }
        if port not in table:
            raise ValueError(f"unknown port {port!r} for {self.topology}")
        amps = np.asarray(table[port], dtype=complex)
        for path in self.blocked_paths:
            amps[self.paths.index(path)] = 0.0
        return amps


def default_mirrors(labels="ABE", tilt: float = 0.05) -> tuple[MirrorSpec, ...]:
    return tuple(MirrorSpec(l, DEFAULT_FREQUENCIES[l], tilt) for l in labels)


def transverse_grid(half_width: float = HALF_WIDTH, points: int = TRANSVERSE_POINTS) -> np.ndarray:
    return np.linspace(-half_width, half_width, points)


def gaussian_mode(x):
    """Unit-power transverse mode, |g|^2 = sqrt(2/pi) exp(-2 x^2)."""
    return (2.0 / math.pi) ** 0.25 * np.exp(-np.asarray(x) ** 2)


def path_displacements(config: InterferometerConfig, t) -> np.ndarray:
    """Transverse offset of each path at times ``t``; shape (len(t), n_paths)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros((t.size, len(config.paths)))
    for j, path in enumerate(config.paths):
        for label in PATH_MIRRORS[path]:
            m = config.mirror(label)
            if m is not None and m.tilt_displacement:
                out[:, j] += m.tilt_displacement * np.sin(2.0 * math.pi * m.frequency * t)
    return out


def _check_truncation(displacements: np.ndarray, half_width: float) -> None:
    worst = np.max(np.abs(displacements)) if displacements.size else 0.0
    lost = 0.5 * erfc(math.sqrt(2.0) * (half_width - worst))
    lost += 0.5 * erfc(math.sqrt(2.0) * (half_width + worst))
    if lost > 1e-9:
        warnings.warn(
            f"transverse window loses {lost:.1e} of the beam power",
            TransverseTruncationWarning,
            stacklevel=3,
        )


def propagate_fields(config: InterferometerConfig, t, x=None, port: str = "detector") -> np.ndarray:
    """Per-path field contributions at ``port``; shape (len(t), n_paths, len(x))."""
    x = transverse_grid() if x is None else np.asarray(x, dtype=float)
    shifts = path_displacements(config, t)
    _check_truncation(shifts, float(np.max(np.abs(x))))
    amps = config.port_amplitudes(port)
    return amps[None, :, None] * gaussian_mode(x[None, None, :] - shifts[:, :, None])


def intensity(fields: np.ndarray, mode_overlap: float) -> np.ndarray:
    """Detector-plane intensity with cross terms weighted by the mode overlap."""
    incoherent = np.sum(np.abs(fields) ** 2, axis=-2)
    coherent = np.abs(np.sum(fields, axis=-2)) ** 2
    return incoherent + mode_overlap * (coherent - incoherent)


@dataclass(frozen=True, eq=False)
class TimeTrace:
    sample_rate: float
    duration: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.sample_rate * self.duration
        if abs(n - round(n)) > 1e-9 or len(self.values) != round(n):
            raise ValueError("trace length must equal sample_rate * duration")

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) / self.sample_rate


def sample_times(config: InterferometerConfig, sample_rate: float, duration: float) -> np.ndarray:
    if not sample_rate > 2.0 * config.max_frequency:
        raise ValueError(
            f"sample rate {sample_rate} Hz violates Nyquist for {config.max_frequency} Hz mirrors"
        )
    n = sample_rate * duration
    if abs(n - round(n)) > 1e-9 or round(n) < 2:
        raise ValueError("sample_rate * duration must be a whole number of samples")
    return np.arange(round(n)) / sample_rate


def coherent_window(config: InterferometerConfig, duration: float) -> bool:
    """True when ``duration`` holds a whole number of periods of every mirror."""
    return all(
        abs(m.frequency * duration - round(m.frequency * duration)) < 1e-9 for m in config.mirrors
    )


def quad_cell_signal(
    config: InterferometerConfig,
    sample_rate: float = 1000.0,
    duration: float = 1.0,
    *,
    kind: str = "difference",
    port: str = "detector",
    x=None,
) -> TimeTrace:
    """Right-half minus left-half photocurrent (``kind="difference"``) or the
    summed photocurrent (``kind="sum"``)."""
    x = transverse_grid() if x is None else np.asarray(x, dtype=float)
    t = sample_times(config, sample_rate, duration)
    if kind not in ("difference", "sum"):
        raise ValueError(f"unknown signal kind {kind!r}")
    I = intensity(propagate_fields(config, t, x, port), config.mode_overlap)
    values = split_photocurrent(I, x) if kind == "difference" else np.trapezoid(I, x, axis=-1)
    return TimeTrace(sample_rate, duration, values)


def split_photocurrent(I, x) -> np.ndarray:
    """Power on x > 0 minus power on x < 0 (trapezoid; the x = 0 sample counts for neither)."""
    return np.trapezoid(np.asarray(I) * np.sign(x), x, axis=-1)


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    """One-sided DFT magnitudes |X_k| / N of a mean-removed trace."""

    frequencies: np.ndarray
    magnitudes: np.ndarray
    n_samples: int

    def mean_square(self) -> float:
        """Signal mean square rebuilt from the magnitudes (Parseval)."""
        w = np.full(self.magnitudes.size, 2.0)
        w[0] = 1.0
        if self.n_samples % 2 == 0:
            w[-1] = 1.0
        return float(np.sum(w * self.magnitudes**2))

    def magnitude_at(self, frequency: float) -> float:
        return float(self.magnitudes[np.argmin(np.abs(self.frequencies - frequency))])

    def peaks(self, threshold: float) -> np.ndarray:
        """Frequencies whose magnitude exceeds ``threshold``."""
        return self.frequencies[self.magnitudes > threshold]


def power_spectrum(trace: TimeTrace) -> PowerSpectrum:
    s = np.asarray(trace.values, dtype=float)
    s = s - s.mean()
    mags = np.abs(np.fft.rfft(s)) / s.size
    freqs = np.fft.rfftfreq(s.size, d=1.0 / trace.sample_rate)
    return PowerSpectrum(freqs, mags, s.size)


@dataclass(frozen=True, eq=False)
class ModePowers:
    """Detected power split into the indistinguishable component and the two
    path-marked components, per inner phase.

    ``*_norm`` divide each component by four times what a single open arm
    puts into that component.
    """

    phases: np.ndarray
    symmetric: np.ndarray
    marked_A: np.ndarray
    marked_B: np.ndarray
    overlap: float  # time-averaged overlap of the two path modes
    symmetric_norm: np.ndarray
    marked_A_norm: np.ndarray
    marked_B_norm: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.symmetric + self.marked_A + self.marked_B


def path_overlap(config: InterferometerConfig, t, x=None) -> np.ndarray:
    """Overlap <g_A|g_B> of the two inner-path modes at each time."""
    x = transverse_grid() if x is None else np.asarray(x, dtype=float)
    shifts = path_displacements(config, t)
    ga = gaussian_mode(x[None, :] - shifts[:, 0:1])
    gb = gaussian_mode(x[None, :] - shifts[:, 1:2])
    cross = np.trapezoid(ga * gb, x, axis=-1)
    na = np.trapezoid(ga * ga, x, axis=-1)
    nb = np.trapezoid(gb * gb, x, axis=-1)
    return cross / np.sqrt(na * nb)


def spectral_detection_counterpart(
    config: InterferometerConfig,
    phases=None,
    sample_rate: float = 1000.0,
    duration: float = 1.0,
    x=None,
) -> ModePowers:
    """Powers a mode-resolving detector would see at the detected port.

    Each path mode is written as sqrt(gamma) e + sqrt(1 - gamma) m_path with
    e shared and m_A, m_B orthogonal marks; gamma is the path overlap.
    """
    if config.topology != "inner_only_blocked_c":
        raise ValueError("mode decomposition is defined for the blocked-c topology")
    phases = np.linspace(0.0, 2.0 * math.pi, 65) if phases is None else np.asarray(phases, float)
    t = sample_times(config, sample_rate, duration)
    gamma = float(np.mean(path_overlap(config, t, x)))
    mu = config.mode_overlap
    a_a = 0.5 * np.ones_like(phases, dtype=complex)
    a_b = -0.5 * np.exp(1j * phases)
    arm_a, arm_b = np.abs(a_a) ** 2, np.abs(a_b) ** 2
    symmetric = gamma * (arm_a + arm_b + 2.0 * mu * np.real(a_a * np.conj(a_b)))
    marked_a = arm_a * (1.0 - gamma)
    marked_b = arm_b * (1.0 - gamma)
    with np.errstate(divide="ignore", invalid="ignore"):
        sym_norm = symmetric / (4.0 * arm_a * gamma)
        ma_norm = marked_a / (4.0 * arm_a * (1.0 - gamma))
        mb_norm = marked_b / (4.0 * arm_b * (1.0 - gamma))
    return ModePowers(phases, symmetric, marked_a, marked_b, gamma, sym_norm, ma_norm, mb_norm)


def detected_power(config: InterferometerConfig, phases, sample_rate=1000.0, duration=1.0, x=None):
    """Time-averaged total power at the detected port for each inner phase,
    integrated directly from the fields."""
    x = transverse_grid() if x is None else np.asarray(x, dtype=float)
    out = []
    for phi in np.asarray(phases, dtype=float):
        cfg = replace(config, inner_phase=float(phi))
        out.append(np.mean(quad_cell_signal(cfg, sample_rate, duration, kind="sum", x=x).values))
    return np.asarray(out)
