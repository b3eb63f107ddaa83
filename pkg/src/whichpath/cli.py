"""Command-line front end: ``whichpath {scan,table,bins,danan,ingest}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import timesim
from .binning import SweepSummary
from .config import ConfigError, RunConfig, load_config
from .csvio import SpectrumFormatError, fmt, read_spectrum, resample, write_spectrum, write_table
from .experiment import MODES, AnalysedSpectra, analyse, run_setting, sweep_accumulate
from .interference import (
    ModeSelectionError,
    distinguishability,
    normalization_constant,
    phase_sweep,
    theory_extrema,
    visibility,
)

log = logging.getLogger("whichpath")

EXIT_OK, EXIT_PHYSICS, EXIT_INPUT = 0, 1, 2

MODE_COLUMNS = ["delta_lambda_nm", "mode", "lambda_nm", "Imax", "Imin", "V", "D", "V2plusD2"]
EXTREMA_COLUMNS = ["delta_lambda_nm", "mode", "Imax", "Imin"]
DUALITY_COLUMNS = ["delta_lambda_nm", "mode", "V", "D", "V2plusD2"]
BIN_COLUMNS = ["delta_lambda_nm", "lambda_s_nm", "P_plus", "P_minus", "delta_P"]


def _tag(delta_lambda: float) -> str:
    return fmt(delta_lambda).replace(".", "p")


def write_mode_tables(out: Path, results: list[AnalysedSpectra], prefix: str = "") -> None:
    rows = [row for r in results for row in r.mode_rows()]
    write_table(out / f"{prefix}modes.csv", MODE_COLUMNS, rows)
    write_table(out / f"{prefix}table_extrema.csv", EXTREMA_COLUMNS, rows)
    write_table(out / f"{prefix}table_duality.csv", DUALITY_COLUMNS, rows)


def write_bins(out: Path, summary: SweepSummary, prefix: str = "") -> None:
    rows = [[r.delta_lambda, r.lambda_s, r.P_plus, r.P_minus, r.delta_P] for r in summary.records]
    nan = float("nan")
    rows.append(["mean", nan, summary.mean_P_plus, summary.mean_P_minus, summary.mean_delta_P])
    rows.append(
        ["diff_of_means", nan, summary.mean_P_plus, summary.mean_P_minus, summary.difference_of_means]
    )
    write_table(out / f"{prefix}bins.csv", BIN_COLUMNS, rows)


def cmd_scan(cfg: RunConfig, shifts) -> int:
    setup = cfg.setup
    phases = phase_sweep(setup.phase_count)
    status = EXIT_OK
    for dl in shifts:
        try:
            res = run_setting(setup, dl)
        except ModeSelectionError as exc:
            log.error("delta_lambda=%g nm: %s", dl, exc)
            status = EXIT_PHYSICS
            continue
        out = cfg.output_dir / f"scan_{_tag(dl)}nm"
        write_spectrum(out / "arm1.csv", res.arm1)
        write_spectrum(out / "arm2.csv", res.arm2)
        write_table(
            out / "visibility.csv",
            ["lambda_nm", "V", "D"],
            zip(res.arm1.wavelengths, res.V, res.D),
        )
        fringe_rows = []
        for mode in MODES:
            lam = res.modes.wavelength(mode)
            fringe_rows += [[lam, p, i] for p, i in zip(phases, res.fringe_at(lam, phases))]
        write_table(out / "fringes.csv", ["lambda_nm", "phase_rad", "intensity"], fringe_rows)
        write_table(out / "modes.csv", MODE_COLUMNS, res.mode_rows())
        log.info("scan delta_lambda=%g nm -> %s", dl, out)
    return status


def cmd_table(cfg: RunConfig, shifts) -> int:
    results, status = [], EXIT_OK
    for dl in shifts:
        try:
            results.append(run_setting(cfg.setup, dl))
        except ModeSelectionError as exc:
            log.error("delta_lambda=%g nm: %s", dl, exc)
            status = EXIT_PHYSICS
    if results:
        write_mode_tables(cfg.output_dir, results)
    return status


def cmd_bins(cfg: RunConfig, shifts) -> int:
    try:
        _, summary = sweep_accumulate(shifts, cfg.setup)
    except ModeSelectionError as exc:
        log.error("%s", exc)
        return EXIT_PHYSICS
    write_bins(cfg.output_dir, summary)
    return EXIT_OK


def cmd_danan(cfg: RunConfig) -> int:
    p = cfg.timesim
    icfg = p.interferometer
    out = cfg.output_dir / "danan"
    if not timesim.coherent_window(icfg, p.duration):
        log.warning("duration %g s is not a whole number of every mirror period", p.duration)
    for kind, name in (("difference", "difference"), ("sum", "total")):
        trace = timesim.quad_cell_signal(icfg, p.sample_rate, p.duration, kind=kind)
        spec = timesim.power_spectrum(trace)
        write_table(out / f"{name}_trace.csv", ["t_s", "signal"], zip(trace.times, trace.values))
        write_table(
            out / f"{name}_spectrum.csv", ["f_Hz", "magnitude"], zip(spec.frequencies, spec.magnitudes)
        )
    if icfg.topology == "inner_only_blocked_c":
        phases = np.linspace(0.0, 2.0 * np.pi, p.phase_count)
        mp = timesim.spectral_detection_counterpart(icfg, phases, p.sample_rate, p.duration)
        write_table(
            out / "mode_powers.csv",
            ["phase_rad", "symmetric", "marked_A", "marked_B", "total",
             "symmetric_norm", "marked_A_norm", "marked_B_norm"],
            zip(mp.phases, mp.symmetric, mp.marked_A, mp.marked_B, mp.total,
                mp.symmetric_norm, mp.marked_A_norm, mp.marked_B_norm),
        )
    else:
        log.info("mode decomposition only applies with path c blocked; skipped")
    return EXIT_OK


def _centroid(d) -> float:
    total = d.total()
    if not total > 0:
        return float("nan")
    return float(np.trapezoid(d.values * d.wavelengths, dx=d.grid.step) / total)


def cmd_ingest(cfg: RunConfig, arm1_file, arm2_file, shifts) -> int:
    grid = cfg.setup.grid
    arm1 = resample(*read_spectrum(arm1_file), grid)
    arm2 = resample(*read_spectrum(arm2_file), grid)
    n = normalization_constant(arm1)
    a1, a2 = arm1.scaled(1.0 / n), arm2.scaled(1.0 / n)
    i_max, i_min = theory_extrema(a1, a2)
    V, D = visibility(i_max, i_min), distinguishability(a1, a2)
    out = cfg.output_dir
    write_table(
        out / "ingested_visibility.csv",
        ["lambda_nm", "Imax", "Imin", "V", "D", "V2plusD2"],
        zip(grid.wavelengths, i_max.values, i_min.values, V, D, V * V + D * D),
    )
    dl = shifts[0] if shifts else _centroid(arm1) - _centroid(arm2)
    try:
        res = analyse(
            arm1,
            arm2,
            delta_lambda=dl,
            mode_overlap=None,
            selection_method=cfg.setup.selection_method,
            smoothing=cfg.setup.smoothing,
        )
    except ModeSelectionError as exc:
        log.error("ingested spectra: %s", exc)
        return EXIT_PHYSICS
    write_mode_tables(out, [res], prefix="ingested_")
    write_bins(out, SweepSummary([res.bins], []), prefix="ingested_")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument(
        "--delta-lambda", type=float, action="append", dest="delta_lambda", metavar="NM",
        help="filter shift in nm (repeatable); defaults to the config list",
    )
    common.add_argument("--mu", type=float, help="mode overlap (interferometer imperfection)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="whichpath",
        description="Spectrally resolved which-path interferometry toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("scan", parents=[common], help="per-wavelength scan for each filter shift")
    sub.add_parser("table", parents=[common], help="extrema and duality tables for modes A, B, E")
    sub.add_parser("bins", parents=[common], help="two-bin split powers across the sweep")
    sub.add_parser("danan", parents=[common], help="vibrating-mirror quad-cell simulation")
    ing = sub.add_parser("ingest", parents=[common], help="analyse measured arm spectra")
    ing.add_argument("arm1", type=Path)
    ing.add_argument("arm2", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.captureWarnings(True)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        out = args.out or os.environ.get("WHICHPATH_OUT")
        if out:
            cfg = replace(cfg, output_dir=Path(out))
        if args.mu is not None:
            if not 0.0 <= args.mu <= 1.0:
                raise ConfigError("--mu must lie in [0, 1]")
            cfg = replace(
                cfg,
                setup=replace(cfg.setup, mode_overlap=args.mu),
                timesim=replace(
                    cfg.timesim,
                    interferometer=replace(cfg.timesim.interferometer, mode_overlap=args.mu),
                ),
            )
        shifts = tuple(args.delta_lambda) if args.delta_lambda else cfg.delta_lambda
        if args.command in ("scan", "table", "bins") and not shifts:
            raise ConfigError("no filter shifts given")
        if args.command == "scan":
            return cmd_scan(cfg, shifts)
        if args.command == "table":
            return cmd_table(cfg, shifts)
        if args.command == "bins":
            return cmd_bins(cfg, shifts)
        if args.command == "danan":
            return cmd_danan(cfg)
        return cmd_ingest(cfg, args.arm1, args.arm2, args.delta_lambda)
    except (ConfigError, SpectrumFormatError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INPUT
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
