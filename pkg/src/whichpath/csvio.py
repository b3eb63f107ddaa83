"""Plain-text tables: fixed-notation numbers, one header line, comma separated."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .spectral import SpectralDensity, SpectralGrid

SIG_DIGITS = 9


class SpectrumFormatError(ValueError):
    """Malformed spectrum file; the message carries the offending line number."""


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return np.format_float_positional(
        x, precision=SIG_DIGITS, unique=False, fractional=False, trim="-"
    )


def write_table(path, header, rows) -> Path:
    """Write ``rows`` (sequences or dicts keyed by ``header``) to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if isinstance(row, dict):
                row = [row[h] for h in header]
            w.writerow([fmt(v) for v in row])
    return path


def read_table(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SpectrumFormatError(f"{path}: empty file")
    return rows[0], rows[1:]


def write_spectrum(path, density: SpectralDensity, name: str = "density") -> Path:
    return write_table(
        path, ["wavelength_nm", name], zip(density.wavelengths, density.values)
    )


def read_spectrum(path) -> tuple[np.ndarray, np.ndarray]:
    """Parse a two-column (wavelength_nm, density) file with one header line."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise SpectrumFormatError(f"{path}: {exc.strerror}") from exc
    if not lines:
        raise SpectrumFormatError(f"{path}: empty file")
    wl, vals = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.replace("\t", ",").split(",") if p.strip()]
        if len(parts) == 1:
            parts = parts[0].split()
        if len(parts) != 2:
            raise SpectrumFormatError(f"{path}:{lineno}: expected 2 columns, got {len(parts)}")
        try:
            a, b = float(parts[0]), float(parts[1])
        except ValueError:
            raise SpectrumFormatError(f"{path}:{lineno}: not a number: {line.strip()!r}") from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise SpectrumFormatError(f"{path}:{lineno}: non-finite value")
        if b < 0:
            raise SpectrumFormatError(f"{path}:{lineno}: negative density {b}")
        if wl and a <= wl[-1]:
            raise SpectrumFormatError(f"{path}:{lineno}: wavelengths must increase strictly")
        wl.append(a)
        vals.append(b)
    if len(wl) < 2:
        raise SpectrumFormatError(f"{path}: need at least two data rows")
    return np.asarray(wl), np.asarray(vals)


def resample(wavelengths, values, grid: SpectralGrid) -> SpectralDensity:
    """Linear interpolation onto ``grid``; zero outside the measured range."""
    out = np.interp(grid.wavelengths, wavelengths, values, left=0.0, right=0.0)
    return SpectralDensity(grid, out)
