"""Two-beam interference resolved per wavelength.

Port 1 follows I1 + I2 + 2 mu sqrt(I1 I2) cos(phi); port 2 carries the same
law with the cosine negated, so port 2 is dark at phi = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import SpectralDensity, SpectralGrid, require_same_grid

POWER_FLOOR = 1e-6
EGY_TOLERANCE = 1e-9
TWO_PI = 2.0 * math.pi


class ModeSelectionError(ValueError):
    """The visibility curve lacks the maximum-between-two-minima structure."""


def phase_sweep(count: int = 64) -> np.ndarray:
    """``count`` equally spaced phases over one period; includes 0 and pi for even counts."""
    if count < 2:
        raise ValueError("a phase sweep needs at least two samples")
    return TWO_PI * np.arange(count) / count


def _covers_period(phases: np.ndarray) -> bool:
    if phases.size < 2:
        return False
    p = np.sort(np.mod(phases, TWO_PI))
    gaps = np.diff(np.concatenate([p, [p[0] + TWO_PI]]))
    return gaps.max() <= math.pi / 2 + 1e-12


@dataclass(frozen=True, eq=False)
class FringeScan:
    grid: SpectralGrid
    phases: np.ndarray = field(repr=False)
    intensity: np.ndarray = field(repr=False)  # shape (n_lambda, n_phase)
    mode_overlap: float
    arm1: SpectralDensity | None = field(default=None, repr=False)
    arm2: SpectralDensity | None = field(default=None, repr=False)
    port: int = 1

    def __post_init__(self):
        if self.intensity.shape != (self.grid.size, len(self.phases)):
            raise ValueError("intensity matrix does not match grid x phases")
        if np.any(self.intensity < 0):
            raise ValueError("fringe intensities must be non-negative")


def fringe_law(i1, i2, mode_overlap, phases, port: int = 1) -> np.ndarray:
    """Intensity for every (wavelength, phase) pair; ``i1``/``i2`` are 1-d arrays."""
    sign = 1.0 if port == 1 else -1.0
    i1 = np.asarray(i1, dtype=float)[:, None]
    i2 = np.asarray(i2, dtype=float)[:, None]
    cross = 2.0 * mode_overlap * np.sqrt(i1 * i2)
    out = i1 + i2 + sign * cross * np.cos(np.asarray(phases, dtype=float))[None, :]
    # rounding can push exact zeros slightly negative
    return np.clip(out, 0.0, None)


def simulate_fringes(
    arm1: SpectralDensity,
    arm2: SpectralDensity,
    mode_overlap: float = 0.98,
    phases=None,
    port: int = 1,
) -> FringeScan:
    grid = require_same_grid(arm1, arm2)
    if not 0.0 <= mode_overlap <= 1.0:
        raise ValueError("mode overlap must lie in [0, 1]")
    if port not in (1, 2):
        raise ValueError("port must be 1 or 2")
    phases = phase_sweep() if phases is None else np.asarray(phases, dtype=float)
    if phases.size == 0:
        raise ValueError("phase list is empty")
    intensity = fringe_law(arm1.values, arm2.values, mode_overlap, phases, port)
    return FringeScan(grid, phases, intensity, mode_overlap, arm1, arm2, port)


def fringe_extrema(
    scan: FringeScan, refine: bool = True
) -> tuple[SpectralDensity, SpectralDensity]:
    """Per-wavelength maximum and minimum over the phase sweep.

    With ``refine`` and known arm spectra the extrema come from the closed
    forms, so the sampling of the sweep never limits accuracy.  The minimum
    is written as (sqrt I1 - sqrt I2)^2 + 2 (1 - mu) sqrt(I1 I2) to avoid
    cancellation.
    """
    if not _covers_period(scan.phases):
        raise ValueError("phase sweep does not cover a full period")
    if refine and scan.arm1 is not None and scan.arm2 is not None:
        i1, i2 = scan.arm1.values, scan.arm2.values
        root = np.sqrt(i1 * i2)
        hi = i1 + i2 + 2.0 * scan.mode_overlap * root
        lo = (np.sqrt(i1) - np.sqrt(i2)) ** 2 + 2.0 * (1.0 - scan.mode_overlap) * root
        return SpectralDensity(scan.grid, hi), SpectralDensity(scan.grid, lo)
    return (
        SpectralDensity(scan.grid, scan.intensity.max(axis=1)),
        SpectralDensity(scan.grid, scan.intensity.min(axis=1)),
    )


def theory_extrema(
    arm1: SpectralDensity, arm2: SpectralDensity
) -> tuple[SpectralDensity, SpectralDensity]:
    """Perfect constructive and destructive interference of two measured arms."""
    grid = require_same_grid(arm1, arm2)
    r1, r2 = np.sqrt(arm1.values), np.sqrt(arm2.values)
    return SpectralDensity(grid, (r1 + r2) ** 2), SpectralDensity(grid, (r1 - r2) ** 2)


def _values(x) -> np.ndarray:
    return np.asarray(x.values if isinstance(x, SpectralDensity) else x, dtype=float)


def _ratio_with_floor(num, den, floor):
    """num/den, NaN where den falls below ``floor`` times its maximum."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    top = np.max(den) if den.size else 0.0
    defined = den > floor * top if top > 0 else np.zeros(den.shape, dtype=bool)
    out = np.full(np.broadcast(num, den).shape, np.nan)
    np.divide(num, den, out=out, where=defined)
    return out


def visibility(i_max, i_min, floor: float = POWER_FLOOR):
    """Fringe contrast per wavelength; NaN marks wavelengths with no light.

    Accepts densities, arrays or scalars.  Scalars come back as floats.
    """
    hi, lo = _values(i_max), _values(i_min)
    if np.any(lo < 0) or np.any(hi < lo - 1e-12 * np.abs(hi)):
        raise ValueError("visibility needs I_max >= I_min >= 0")
    v = np.clip(_ratio_with_floor(hi - lo, hi + lo, floor), 0.0, 1.0)
    return float(v) if v.ndim == 0 else v


def distinguishability(arm1, arm2, floor: float = POWER_FLOOR):
    """|I1 - I2| / (I1 + I2) per wavelength; NaN where both arms are dark."""
    if isinstance(arm1, SpectralDensity) and isinstance(arm2, SpectralDensity):
        require_same_grid(arm1, arm2)
    a, b = _values(arm1), _values(arm2)
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("arm densities must be non-negative")
    d = np.clip(_ratio_with_floor(np.abs(a - b), a + b, floor), 0.0, 1.0)
    return float(d) if d.ndim == 0 else d


@dataclass(frozen=True)
class DualityRecord:
    V: float
    D: float
    sum_of_squares: float
    passed: bool


def egy_check(V: float, D: float, tolerance: float = EGY_TOLERANCE) -> DualityRecord:
    for name, x in (("V", V), ("D", D)):
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"{name}={x} outside [0, 1]")
    s = V * V + D * D
    return DualityRecord(float(V), float(D), s, s <= 1.0 + tolerance)


def normalization_constant(reference_arm: SpectralDensity) -> float:
    """Four times the peak single-arm density: one arm alone reaches the
    detected port with a quarter of the input."""
    peak = reference_arm.peak()
    if not peak > 0:
        raise ValueError("reference arm carries no power")
    return 4.0 * peak


def normalize(detected, reference_arm: SpectralDensity):
    n = normalization_constant(reference_arm)
    if isinstance(detected, SpectralDensity):
        return detected.scaled(1.0 / n)
    out = np.asarray(detected, dtype=float) / n
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ModeSelection:
    lambda_A: float
    lambda_B: float
    lambda_E: float
    V_A: float
    V_B: float
    V_E: float
    D_A: float
    D_B: float
    D_E: float
    method: str = "marked"

    def __post_init__(self):
        a, b, e = self.lambda_A, self.lambda_B, self.lambda_E
        if not (a < e < b or b < e < a):
            raise ValueError("modes A and B must straddle mode E")

    def wavelength(self, mode: str) -> float:
        return getattr(self, f"lambda_{mode}")

    def V(self, mode: str) -> float:
        return getattr(self, f"V_{mode}")

    def D(self, mode: str) -> float:
        return getattr(self, f"D_{mode}")


def interpolate_arms(arm1: SpectralDensity, arm2: SpectralDensity, wavelength: float):
    """Both arm densities at ``wavelength``, interpolated linearly in log space
    so their ratio is exact for gaussian arms of equal width."""
    wl = arm1.wavelengths
    out = []
    for arm in (arm1, arm2):
        vals = arm.values
        if np.all(vals > 0):
            out.append(float(np.exp(np.interp(wavelength, wl, np.log(vals)))))
        else:
            out.append(float(np.interp(wavelength, wl, vals)))
    return out[0], out[1]


def _smooth(v: np.ndarray, window: int) -> np.ndarray:
    if window <= 1:
        return v
    kernel = np.ones(window) / window
    return np.convolve(v, kernel, mode="same")


def _local_minima(v: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Indices in ``idx`` that sit strictly below one neighbour and not above the other."""
    found = []
    for i in idx:
        if i == 0 or i == v.size - 1:
            continue
        left, mid, right = v[i - 1], v[i], v[i + 1]
        if np.isnan(left) or np.isnan(right):
            continue
        if mid <= left and mid <= right and (mid < left or mid < right):
            found.append(i)
    return np.asarray(found, dtype=int)


def _pick(score: np.ndarray, idx: np.ndarray, centre: int, lowest: bool) -> int:
    """Best-scoring index; ties go to the one nearest ``centre``."""
    s = score[idx] if lowest else -score[idx]
    best = idx[s <= s.min() + 1e-15 * max(1.0, abs(s.min()))]
    return int(best[np.argmin(np.abs(best - centre))])


def _balance_point(wl, i1, i2, k) -> float:
    """Refine the visibility maximum to where ln(I1/I2) crosses zero."""
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.log(i1) - np.log(i2)
    for j in (k - 1, k):
        if j < 0 or j + 1 >= wl.size or not np.all(np.isfinite(r[j:j + 2])):
            continue
        if r[j] == 0.0:
            return float(wl[j])
        if r[j] * r[j + 1] < 0:
            return float(wl[j] - r[j] * (wl[j + 1] - wl[j]) / (r[j + 1] - r[j]))
    return float(wl[k])


def select_modes(
    V,
    arm1: SpectralDensity,
    arm2: SpectralDensity,
    *,
    floor: float = POWER_FLOOR,
    smoothing: int = 1,
    method: str = "auto",
) -> ModeSelection:
    """Pick mode E at the visibility maximum and modes A/B either side of it.

    ``method="minima"`` takes the deepest interior local minimum of V on each
    side.  ``method="marked"`` takes, on each side, the wavelength where the
    dominant arm exceeds the other by the most power.  ``"auto"`` uses minima
    when both sides have one and falls back to the marked-power rule
    otherwise, which is always the case for log-concave filter shapes where V
    decreases monotonically away from E.

    Mode A lies on the side where arm 1 dominates.
    """
    grid = require_same_grid(arm1, arm2)
    if method not in ("auto", "minima", "marked"):
        raise ValueError(f"unknown selection method {method!r}")
    wl = grid.wavelengths
    i1, i2 = arm1.values, arm2.values
    v = np.asarray(V, dtype=float)
    d = distinguishability(arm1, arm2, floor)
    total = i1 + i2
    defined = (total > floor * total.max()) & np.isfinite(v)
    idx = np.flatnonzero(defined)
    if idx.size < 3:
        raise ModeSelectionError("too few wavelengths above the power floor")
    vs = v.copy()
    vs[defined] = _smooth(v[defined], smoothing)
    spread = np.ptp(vs[idx])
    if spread <= 1e-12:
        raise ModeSelectionError("visibility is flat; the arms carry no which-path mark")

    k_e = _pick(vs, idx, idx[idx.size // 2], lowest=False)
    lam_e = _balance_point(wl, i1, i2, k_e)
    left, right = idx[idx < k_e], idx[idx > k_e]
    if left.size == 0 or right.size == 0:
        raise ModeSelectionError("visibility maximum sits at the edge of the lit band")

    chosen = None
    used = method
    if method in ("auto", "minima"):
        lmin, rmin = _local_minima(vs, left), _local_minima(vs, right)
        if lmin.size and rmin.size:
            chosen = (_pick(vs, lmin, k_e, True), _pick(vs, rmin, k_e, True))
            used = "minima"
        elif method == "minima":
            raise ModeSelectionError("fewer than two local visibility minima above the power floor")
    if chosen is None:
        excess = i1 - i2
        if excess[right].max() <= 0 and excess[left].max() <= 0:
            raise ModeSelectionError("neither arm dominates on either side of mode E")
        kl = _pick(np.abs(excess), left, k_e, lowest=False)
        kr = _pick(np.abs(excess), right, k_e, lowest=False)
        chosen = (kl, kr)
        used = "marked"

    kl, kr = chosen
    if i1[kr] - i2[kr] >= i1[kl] - i2[kl]:
        k_a, k_b = kr, kl
    else:
        k_a, k_b = kl, kr
    if not (i1[k_a] > i2[k_a] and i2[k_b] > i1[k_b]):
        raise ModeSelectionError("could not assign modes A and B to distinct dominant arms")

    def at(lam):
        # effective coherence carries any structure of V beyond the arm ratio
        a, b = interpolate_arms(arm1, arm2, lam)
        ideal = 2.0 * np.sqrt(i1 * i2) / np.where(total > 0, total, 1.0)
        mu_eff = np.divide(v, ideal, out=np.zeros_like(v), where=defined & (ideal > 0))
        v_lam = float(np.interp(lam, wl[defined], mu_eff[defined])) * 2.0 * math.sqrt(a * b) / (a + b)
        return min(max(v_lam, 0.0), 1.0), abs(a - b) / (a + b)

    v_e, d_e = at(lam_e)
    return ModeSelection(
        lambda_A=float(wl[k_a]),
        lambda_B=float(wl[k_b]),
        lambda_E=lam_e,
        V_A=float(v[k_a]),
        V_B=float(v[k_b]),
        V_E=v_e,
        D_A=float(d[k_a]),
        D_B=float(d[k_b]),
        D_E=d_e,
        method=used,
    )
