"""Command line interface: detect / simulate / diagnose.

`detect` writes a JSON report plus plot-ready CSVs (series heat data,
per-segment mean curves, adjacent-mean difference curves with their sup
locations).  Every "auto" tuning value is resolved and recorded in the
report, and the report is byte-identical across reruns with the same seed,
config and input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .binseg import default_xi
from .diagnostics import variogram
from .fda import Curve, FunctionalSeries, sup_norm
from .io import ingest_csv, write_columns_csv, write_series_csv
from .relevance import BootstrapConfig, detect_relevant, empirical_quantile
from .simulate import gen_series, three_change_scenario, two_change_scenario
from .tuning import select_block_length, select_delta

__all__ = ["RunConfig", "run_detect", "run_simulate", "run_diagnose", "main"]


@dataclass
class RunConfig:
    input: str
    out: str
    alpha: float = 0.1
    delta: str = "auto"
    xi: str = "auto"
    L: str = "auto:fixed"
    R: int = 1000
    c: float = 0.1
    seed: int = 0
    min_seg: int | None = None
    grid_size: int = 100
    workers: int = 1


def _resolve(cfg: RunConfig, x: FunctionalSeries) -> dict:
    """Turn every "auto" field into a concrete value (full provenance)."""
    xi = default_xi(x) if cfg.xi == "auto" else float(cfg.xi)
    delta = select_delta(x) if cfg.delta == "auto" else float(cfg.delta)
    if cfg.L == "auto:fixed":
        L = select_block_length(x, "fixed")
    elif cfg.L == "auto:plugin":
        L = select_block_length(x, "plugin")
    else:
        L = int(cfg.L)
    min_seg = 2 * L + 2 if cfg.min_seg is None else cfg.min_seg
    return {"xi": xi, "delta": delta, "L": L, "min_seg": min_seg}


def run_detect(cfg: RunConfig) -> int:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    x = ingest_csv(cfg.input, grid_size=cfg.grid_size)
    resolved = _resolve(cfg, x)
    bcfg = BootstrapConfig(
        R=cfg.R, L=resolved["L"], alpha=cfg.alpha, c=cfg.c, seed=cfg.seed
    )
    report = detect_relevant(
        x,
        resolved["delta"],
        bcfg,
        xi=resolved["xi"],
        min_seg=resolved["min_seg"],
        workers=cfg.workers,
    )

    write_series_csv(out_dir / "heatmap.csv", x.values)
    padded = report.candidates.padded_indices
    segments = []
    for j, mean in enumerate(report.segment_means):
        name = f"segment_mean_{j + 1:02d}.csv"
        write_columns_csv(out_dir / name, ["t", "value"], [x.grid.points, mean.values])
        segments.append({"from": padded[j] + 1, "to": padded[j + 1], "mean_file": name})
    _write_differences(out_dir, x, report.segment_means)

    draws = report.bootstrap_draws
    summary = None
    if draws.size:
        summary = {
            "min": float(np.min(draws)),
            "q50": empirical_quantile(draws, 0.5),
            "q90": empirical_quantile(draws, 0.1),
            "max": float(np.max(draws)),
        }
    doc = {
        "config": {
            "alpha": cfg.alpha,
            "R": cfg.R,
            "c": cfg.c,
            "seed": cfg.seed,
            "grid_size": cfg.grid_size,
            "workers": cfg.workers,
            "input": str(cfg.input),
            "version": __version__,
            "min_seg": resolved["min_seg"],
        },
        "candidates": [
            {
                "index": k,
                "scaled": s,
                "detector": d.T,
                "relevant": bool(rel),
            }
            for k, s, d, rel in zip(
                report.candidates.indices,
                report.candidates.scaled,
                report.detectors,
                report.relevant,
            )
        ],
        "quantile": report.quantile,
        "draws_summary": summary,
        "segments": segments,
        "delta": resolved["delta"],
        "xi": resolved["xi"],
        "L": resolved["L"],
    }
    (out_dir / "report.json").write_bytes(
        json.dumps(doc, sort_keys=True, indent=2).encode() + b"\n"
    )
    return 0


def _write_differences(out_dir: Path, x: FunctionalSeries, means) -> None:
    if len(means) < 2:
        return
    headers = ["t"]
    cols = [x.grid.points]
    peaks_rows = []
    for j in range(len(means) - 1):
        diff = np.abs(means[j].values - means[j + 1].values)
        headers.append(f"abs_diff_{j + 1}_{j + 2}")
        cols.append(diff)
        arg = int(np.argmax(diff))
        peaks_rows.append(
            (float(j + 1), float(x.grid.points[arg]), sup_norm(Curve(x.grid, means[j].values - means[j + 1].values)))
        )
    write_columns_csv(out_dir / "differences.csv", headers, cols)
    write_columns_csv(
        out_dir / "difference_peaks.csv",
        ["pair", "t_at_sup", "sup_value"],
        [np.array(c) for c in zip(*peaks_rows)],
    )


def run_simulate(
    scenario: str,
    n: int,
    seed: int,
    out: str,
    noiseless: bool = False,
    grid_size: int = 100,
) -> int:
    if scenario == "two":
        scn = two_change_scenario(n, grid_size=grid_size, seed=seed)
    elif scenario == "three":
        scn = three_change_scenario(n, grid_size=grid_size, seed=seed)
    else:
        raise ValueError(f"unknown scenario {scenario!r} (use 'two' or 'three')")
    series = gen_series(scn, noiseless=noiseless)
    write_series_csv(out, series.values)
    return 0


def run_diagnose(input_path: str, max_lag: int, out: str, grid_size: int = 100) -> int:
    x = ingest_csv(input_path, grid_size=grid_size)
    vg = variogram(x, max_lag)
    write_columns_csv(
        out, ["lag", "value"], [np.array(vg.lags, dtype=float), np.array(vg.values)]
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relchange",
        description="Relevant change point detection for functional time series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("detect", help="two-step relevant change detection")
    det.add_argument("--input", required=True)
    det.add_argument("--out", required=True)
    det.add_argument("--config", default=None, help="JSON file with defaults")
    det.add_argument("--alpha", type=float, default=None)
    det.add_argument("--delta", default=None, help="number or 'auto'")
    det.add_argument("--xi", default=None, help="number or 'auto'")
    det.add_argument("--L", default=None, help="integer, 'auto:fixed' or 'auto:plugin'")
    det.add_argument("--R", type=int, default=None)
    det.add_argument("--c", type=float, default=None)
    det.add_argument("--seed", type=int, default=None)
    det.add_argument("--min-seg", type=int, default=None, dest="min_seg")
    det.add_argument("--grid-size", type=int, default=None, dest="grid_size")
    det.add_argument("--workers", type=int, default=None)

    sim = sub.add_parser("simulate", help="generate a synthetic cycle table")
    sim.add_argument("--scenario", required=True, choices=["two", "three"])
    sim.add_argument("--n", required=True, type=int)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.add_argument("--noiseless", action="store_true")
    sim.add_argument("--grid-size", type=int, default=100, dest="grid_size")

    dia = sub.add_parser("diagnose", help="lag autocorrelation variogram")
    dia.add_argument("--input", required=True)
    dia.add_argument("--max-lag", required=True, type=int, dest="max_lag")
    dia.add_argument("--out", required=True)
    dia.add_argument("--grid-size", type=int, default=100, dest="grid_size")
    return parser


def _detect_config(args: argparse.Namespace) -> RunConfig:
    layers: dict = {}
    if args.config:
        layers.update(json.loads(Path(args.config).read_text()))
    for key in (
        "alpha", "delta", "xi", "L", "R", "c", "seed",
        "min_seg", "grid_size", "workers",
    ):
        val = getattr(args, key)
        if val is not None:
            layers[key] = val
    return RunConfig(input=args.input, out=args.out, **layers)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "detect":
            return run_detect(_detect_config(args))
        if args.command == "simulate":
            return run_simulate(
                args.scenario, args.n, args.seed, args.out,
                noiseless=args.noiseless, grid_size=args.grid_size,
            )
        if args.command == "diagnose":
            return run_diagnose(args.input, args.max_lag, args.out, grid_size=args.grid_size)
        raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:  # machine-readable failure
        json.dump(
            {"error": {"type": type(exc).__name__, "message": str(exc)}},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
