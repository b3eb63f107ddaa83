"""Run configuration from flat ``section.key = value`` files.

Example::

    # filter2 starts on top of filter1 and is blue-shifted per run
    filter2.fwhm = 3.0
    delta_lambda = 1.4, 2.4, 4.9, 6.5
    mode_overlap = 0.98
    timesim.mirror.A = 30, 0.05
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .experiment import Setup
from .spectral import FilterProfile, SourceSpectrum, SpectralGrid
from .timesim import DEFAULT_FREQUENCIES, InterferometerConfig, MirrorSpec

DEFAULT_SHIFTS = (1.4, 2.4, 4.9, 6.5)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TimesimParams:
    interferometer: InterferometerConfig = field(
        default_factory=lambda: InterferometerConfig(
            mirrors=tuple(MirrorSpec(l, DEFAULT_FREQUENCIES[l], 0.05) for l in "ABE")
        )
    )
    sample_rate: float = 1000.0
    duration: float = 1.0
    phase_count: int = 65


@dataclass(frozen=True)
class RunConfig:
    setup: Setup = field(default_factory=Setup)
    delta_lambda: tuple[float, ...] = DEFAULT_SHIFTS
    timesim: TimesimParams = field(default_factory=TimesimParams)
    output_dir: Path = Path("out")


_FILTER_KEYS = {"center": float, "fwhm": float, "peak": float, "shape": str, "order": int}


def parse_lines(text: str, origin: str = "<config>") -> dict[str, tuple[int, str]]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{origin}:{lineno}: empty key")
        out[key] = (lineno, value)
    return out


def _as_bool(s: str) -> bool:
    low = s.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def load_config(path=None, text: str | None = None) -> RunConfig:
    """Build a RunConfig; keys not given keep their defaults."""
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from exc
    origin = str(path) if path is not None else "<config>"
    entries = parse_lines(text or "", origin)
    cfg = RunConfig()
    setup = cfg.setup
    source = {}
    filters = {"filter1": {}, "filter2": {}}
    grid = {}
    ts = {}
    mirrors = {}
    seen = set()

    def take(key, conv):
        lineno, value = entries[key]
        seen.add(key)
        try:
            return conv(value)
        except ValueError as exc:
            raise ConfigError(f"{origin}:{lineno}: {key}: {exc}") from None

    for key in entries:
        head, _, rest = key.partition(".")
        if head == "source" and rest in ("center", "fwhm", "power"):
            source[{"power": "total_power"}.get(rest, rest)] = take(key, float)
        elif head in filters and rest in _FILTER_KEYS:
            name = {"peak": "peak_transmission"}.get(rest, rest)
            filters[head][name] = take(key, _FILTER_KEYS[rest])
        elif head == "grid" and rest in ("min", "max", "step"):
            grid[{"min": "lambda_min", "max": "lambda_max"}.get(rest, rest)] = take(key, float)
        elif key == "delta_lambda":
            vals = take(key, lambda s: tuple(float(v) for v in s.replace(",", " ").split()))
            cfg = replace(cfg, delta_lambda=vals)
        elif key == "mode_overlap":
            setup = replace(setup, mode_overlap=take(key, float))
        elif key == "phase.count":
            setup = replace(setup, phase_count=take(key, int))
        elif key == "balance":
            setup = replace(setup, balance=take(key, _as_bool))
        elif key == "selection.method":
            setup = replace(setup, selection_method=take(key, str))
        elif key == "selection.smoothing":
            setup = replace(setup, smoothing=take(key, int))
        elif key == "output.dir":
            cfg = replace(cfg, output_dir=Path(take(key, str)))
        elif head == "timesim" and rest.startswith("mirror."):
            label = rest.split(".", 1)[1]
            mirrors[label] = take(key, lambda s: tuple(float(v) for v in s.replace(",", " ").split()))
        elif key == "timesim.blocked":
            blocked = take(key, lambda s: tuple(v for v in s.replace(",", " ").split()))
            ts["blocked_paths"] = blocked
        elif head == "timesim" and rest in (
            "topology", "inner_phase", "outer_phase", "mode_overlap",
            "sample_rate", "duration", "phase_count",
        ):
            conv = {"topology": str, "phase_count": int}.get(rest, float)
            ts[rest] = take(key, conv)
        else:
            lineno, _ = entries[key]
            raise ConfigError(f"{origin}:{lineno}: unknown key {key!r}")

    try:
        setup = replace(
            setup,
            source=replace(setup.source, **source),
            filter1=replace(setup.filter1, **filters["filter1"]),
            filter2=replace(setup.filter2, **filters["filter2"]),
            grid=replace(setup.grid, **grid),
        )
        if not 0.0 <= setup.mode_overlap <= 1.0:
            raise ValueError("mode_overlap must lie in [0, 1]")
        tparams = cfg.timesim
        icfg = tparams.interferometer
        if mirrors:
            specs = []
            for label, vals in sorted(mirrors.items()):
                if len(vals) != 2:
                    raise ValueError(f"mirror {label} needs 'frequency, displacement'")
                specs.append(MirrorSpec(label, vals[0], vals[1]))
            icfg = replace(icfg, mirrors=tuple(specs))
        icfg = replace(
            icfg,
            **{k: ts[k] for k in ("topology", "inner_phase", "outer_phase", "mode_overlap", "blocked_paths")
               if k in ts},
        )
        tparams = replace(
            tparams,
            interferometer=icfg,
            **{k: ts[k] for k in ("sample_rate", "duration", "phase_count") if k in ts},
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{origin}: {exc}") from None
    return replace(cfg, setup=setup, timesim=tparams)


def dump_config(cfg: RunConfig) -> str:
    """Inverse of :func:`load_config` for every key it understands."""
    s = cfg.setup
    lines = [
        f"source.center = {s.source.center!r}",
        f"source.fwhm = {s.source.fwhm!r}",
        f"source.power = {s.source.total_power!r}",
    ]
    for name, f in (("filter1", s.filter1), ("filter2", s.filter2)):
        lines += [
            f"{name}.center = {f.center!r}",
            f"{name}.fwhm = {f.fwhm!r}",
            f"{name}.peak = {f.peak_transmission!r}",
            f"{name}.shape = {f.shape}",
            f"{name}.order = {f.order}",
        ]
    lines += [
        f"grid.min = {s.grid.lambda_min!r}",
        f"grid.max = {s.grid.lambda_max!r}",
        f"grid.step = {s.grid.step!r}",
        "delta_lambda = " + ", ".join(repr(d) for d in cfg.delta_lambda),
        f"mode_overlap = {s.mode_overlap!r}",
        f"phase.count = {s.phase_count}",
        f"balance = {str(s.balance).lower()}",
        f"selection.method = {s.selection_method}",
        f"selection.smoothing = {s.smoothing}",
        f"output.dir = {cfg.output_dir}",
    ]
    t = cfg.timesim
    i = t.interferometer
    lines += [
        f"timesim.topology = {i.topology}",
        f"timesim.inner_phase = {i.inner_phase!r}",
        f"timesim.outer_phase = {i.outer_phase!r}",
        f"timesim.mode_overlap = {i.mode_overlap!r}",
        f"timesim.sample_rate = {t.sample_rate!r}",
        f"timesim.duration = {t.duration!r}",
        f"timesim.phase_count = {t.phase_count}",
    ]
    if i.blocked_paths:
        lines.append("timesim.blocked = " + ", ".join(i.blocked_paths))
    lines += [f"timesim.mirror.{m.label} = {m.frequency!r}, {m.tilt_displacement!r}" for m in i.mirrors]
    return "\n".join(lines) + "\n"
