"""Command line entry point: ``wavedens simulate|estimate|table|rates``.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import gmrf
from .errors import (DegenerateEstimateError, HypothesisError, InadmissibleEtaError,
                     SampleParseError, WaveDensError)
from .estimators import (linear_estimate, relative_hard_estimate, soft_threshold_estimate)
from .experiments import (ExperimentConfig, run_rates, run_table, simulate_replication,
                          table_replication)
from .io import read_json, read_sample_csv, write_grid_csv, write_json, write_sample_csv
from .postprocess import QuadratureGrid, VerReport, normalize
from .wavelets import tensor_basis

log = logging.getLogger("wavedens")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(WaveDensError, ValueError):
    pass


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _common(p):
    p.add_argument("--config", help="flat JSON file with experiment options")
    p.add_argument("--sizes", type=_ints, help="lattice side lengths, e.g. 20,35")
    p.add_argument("--reps", type=int)
    p.add_argument("--wavelet", choices=["haar", "d4"])
    p.add_argument("--j0", type=int)
    p.add_argument("--j1", type=int, help="finest level; table levels run 0..j1")
    p.add_argument("--mult", type=_floats, help="relative threshold multiples")
    p.add_argument("--eta", type=_floats, help="one value or five comma separated values")
    p.add_argument("--seed", type=int)
    p.add_argument("--iid", action="store_true", default=None,
                   help="independent reference samples instead of MCMC fields")
    p.add_argument("--iterations", type=int, help="MCMC sweeps (default 1000)")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavedens", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write one sample CSV per size and replication")
    _common(p)

    p = sub.add_parser("table", help="replicated validation criterion table")
    _common(p)
    p.add_argument("--raw", action="store_true",
                   help="score raw estimates instead of normalised ones")
    p.add_argument("--scope", choices=["level", "global"],
                   help="maximum used by relative thresholds")
    p.add_argument("--samples", help="directory of sample CSVs written by simulate")
    p.add_argument("--from-replications", dest="from_replications",
                   help="re-aggregate a replications CSV without re-running")

    p = sub.add_parser("rates", help="mean ISE at theory levels across sizes")
    _common(p)
    p.add_argument("--target", choices=["tent", "uniform"], default="tent")

    p = sub.add_parser("estimate", help="estimate a density from one sample CSV")
    _common(p)
    p.add_argument("sample", nargs="?", help="sample CSV (omit with --truth)")
    p.add_argument("--kind", choices=["linear", "hard", "soft"], default="hard")
    p.add_argument("--delta", type=float, default=0.0, help="soft threshold")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--grid", type=int, default=101, help="grid nodes per axis")
    p.add_argument("--box", type=_floats, default=[-0.25, 1.25], help="lo,hi of the plot box")
    p.add_argument("--truth", action="store_true", help="grid of the mixture target density")
    return parser


def make_config(args) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            data = read_json(args.config)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    flags = {"sizes": args.sizes, "reps": args.reps, "wavelet": args.wavelet, "j0": args.j0,
             "multiples": args.mult, "seed": args.seed, "iid": args.iid,
             "iterations": args.iterations, "workers": args.workers, "out": args.out}
    data.update({k: v for k, v in flags.items() if v is not None})
    if args.eta is not None:
        if len(args.eta) not in (1, 5):
            raise ConfigError("--eta takes one value or five values")
        data["eta"] = args.eta * 5 if len(args.eta) == 1 else args.eta
    if args.j1 is not None:
        data["levels"] = list(range(0, args.j1 + 1))
    for key in ("raw", "scope"):
        if getattr(args, key, None):
            if key == "raw":
                data["normalized"] = False
            else:
                data["scope"] = args.scope
    try:
        cfg = ExperimentConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    cfg.check()
    return cfg


def _outdir(cfg) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def sample_path(out: Path, size: int, rep: int) -> Path:
    return out / f"n{size}_rep{rep:04d}.csv"


def cmd_simulate(cfg: ExperimentConfig, args) -> int:
    out = _outdir(cfg)
    for size in cfg.sizes:
        for rep in range(cfg.reps):
            write_sample_csv(sample_path(out, size, rep), simulate_replication(cfg, size, rep))
    write_json(out / "simulate_run.json",
               {"seed": cfg.seed, "eta": cfg.eta, "iterations": cfg.iterations, "iid": cfg.iid,
                "shapes": [[n, n] for n in cfg.sizes], "reps": cfg.reps,
                "copula": cfg.copula().tolist()})
    log.info("wrote %d samples to %s", len(cfg.sizes) * cfg.reps, out)
    return EXIT_OK


def _write_replications(path, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_size", "j", "estimator", "threshold", "rep", "ver_hat"])
        for key in sorted(values):
            for rep, v in enumerate(values[key]):
                w.writerow([key[0], key[1], key[2], f"{key[3]:g}", rep, repr(float(v))])


def _read_replications(path) -> dict:
    values = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (int(row["sample_size"]), int(row["j"]), row["estimator"], float(row["threshold"]))
            values.setdefault(key, []).append(float(row["ver_hat"]))
    return values


def cmd_table(cfg: ExperimentConfig, args) -> int:
    out = _outdir(cfg)
    if args.from_replications:
        values = _read_replications(args.from_replications)
        seconds = 0.0
    elif args.samples:
        values = {}
        for size in cfg.sizes:
            for rep in range(cfg.reps):
                sample = read_sample_csv(sample_path(Path(args.samples), size, rep))
                for cell, v in table_replication(cfg, size, rep, sample).items():
                    values.setdefault((size * size,) + cell, []).append(v)
        seconds = 0.0
    else:
        art = run_table(cfg)
        values, seconds = art.values, art.seconds
    report = VerReport()
    for key in sorted(values):
        report.add(*key, values[key])
    stem = f"table_{cfg.wavelet}{'_iid' if cfg.iid else ''}"
    report.write_csv(out / f"{stem}.csv")
    _write_replications(out / f"{stem}_replications.csv", values)
    write_json(out / f"{stem}_run.json", {"config": cfg.to_dict(), "seconds": round(seconds, 3)})
    log.info("wrote %s", out / f"{stem}.csv")
    return EXIT_OK


def cmd_rates(cfg: ExperimentConfig, args) -> int:
    out = _outdir(cfg)
    res = run_rates(cfg, args.target)
    with open(out / f"rates_{args.target}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_size", "j", "mean_ise", "se"])
        for row in zip(res["n"], res["j"], res["mean_ise"], res["se"]):
            w.writerow([row[0], row[1], f"{row[2]:.8g}", f"{row[3]:.8g}"])
    print(f"slope {res['slope']:.4f} (theory {res['predicted_slope']:.4f})")
    return EXIT_OK


def cmd_estimate(cfg: ExperimentConfig, args) -> int:
    out = _outdir(cfg)
    lo, hi = args.box
    axes = [np.linspace(lo, hi, args.grid)] * 2
    if args.truth:
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 2)
        write_grid_csv(out / "truth_grid.csv", axes,
                       gmrf.target_pdf(mesh, cfg.rho12).reshape(args.grid, args.grid))
        return EXIT_OK
    if not args.sample:
        raise ConfigError("estimate needs a sample CSV or --truth")
    sample = read_sample_csv(args.sample)
    basis = tensor_basis(cfg.wavelet, 2)
    j1 = max(cfg.levels)
    mult = cfg.multiples[0] if cfg.multiples else 0.0
    if args.kind == "linear":
        est = linear_estimate(sample, basis, j1)
    elif args.kind == "hard":
        est = relative_hard_estimate(sample, basis, cfg.j0, j1, mult, cfg.scope)
    else:
        est = soft_threshold_estimate(sample, basis, cfg.j0, j1, args.delta)
    write_json(out / "estimate.json", est.to_dict())
    shown = normalize(est, QuadratureGrid.default(2)) if args.normalize else est
    write_grid_csv(out / "grid.csv", axes, shown.evaluate_grid(axes))
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "table": cmd_table, "rates": cmd_rates,
            "estimate": cmd_estimate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](cfg, args)
    except InadmissibleEtaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, SampleParseError, HypothesisError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateEstimateError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
