"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical or
physical-constraint error. Relative output paths are resolved against
``--out-dir``, then the config's ``output_dir``, then ``$PENNING_TOMO_OUTDIR``,
then the working directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import formats
from .analysis import compare, oracle_wigner
from .config import ConfigError, RunConfig, build_state, evaluation_grid, load_config, resolve_pnt_grid
from .errors import TomographyError
from .grids import grid_from_dict
from .pipelines import figure1_config, figure2_config, reconstruct, run_pipeline, simulate, write_pipeline

OUTDIR_ENV = "PENNING_TOMO_OUTDIR"

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    """Bad command-line input not caught by argparse."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def _state_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("state")
    g.add_argument("--state", dest="state_file", help="state JSON file (overrides the flags below)")
    g.add_argument("--kind", choices=["coherent", "odd_cat", "even_cat", "fock", "thermal"])
    g.add_argument("--alpha", type=float, help="real part of the coherent amplitude")
    g.add_argument("--alpha-im", type=float, help="imaginary part of the coherent amplitude")
    g.add_argument("--n", type=int, help="Fock level")
    g.add_argument("--nbar", type=float, help="thermal mean excitation")
    g.add_argument("--dim", type=int, help="Fock cutoff")


def _recon_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("reconstruction")
    g.add_argument("--s", type=float, help="smoothing parameter s")
    g.add_argument("--n-bins", type=int)
    g.add_argument("--x-range", type=float, nargs=2)
    g.add_argument("--r-max", type=float)
    g.add_argument("--n-r", type=int)
    g.add_argument("--n-max", type=int)
    g.add_argument("--extent", type=float, help="half-width of the square evaluation grid")
    g.add_argument("--n-grid", type=int, help="points per axis of the evaluation grid")


def _grid_outputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", default="grid.json")
    p.add_argument("--csv", help="also write CSV (re, im, value[, stderr])")
    p.add_argument("--matrix", help="also write a gnuplot nonuniform-matrix text file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="penning-tomo", description="Cyclotron-state tomography simulations")
    parser.add_argument("--config", help="YAML run configuration")
    parser.add_argument("--out-dir", help="directory for relative output paths")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("state", help="write a state spec as state JSON")
    _state_flags(p)
    p.add_argument("-o", "--output", default="state.json")

    p = sub.add_parser("simulate", help="simulate OHT or PNT measurement records")
    _state_flags(p)
    p.add_argument("--protocol", choices=["oht", "pnt"])
    p.add_argument("--phases", type=_positive_int)
    p.add_argument("--grid", help="PNT grid: 'default255' or a grid JSON mapping")
    p.add_argument("--samples", type=_positive_int)
    p.add_argument("--seed", type=int)
    p.add_argument("--efficiency", type=float)
    p.add_argument("-o", "--output", default="measurement.json")

    p = sub.add_parser("reconstruct", help="reconstruct a Wigner grid from a measurement file")
    p.add_argument("input")
    _recon_flags(p)
    _grid_outputs(p)

    p = sub.add_parser("oracle", help="exact Wigner grid of a state")
    _state_flags(p)
    _recon_flags(p)
    p.add_argument("--grid", help="'default255' to use the PNT grid instead of the square grid")
    _grid_outputs(p)

    p = sub.add_parser("compare", help="compare two grid files (first is the reference)")
    p.add_argument("reference")
    p.add_argument("estimate")
    p.add_argument("-o", "--output", default="report.json")

    for name in ("figure1", "figure2"):
        p = sub.add_parser(name, help=f"reproduce the {name} pipeline end to end")
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--efficiency", type=float, default=1.0)
    return parser


def _base_config(args) -> RunConfig:
    return load_config(args.config) if args.config else RunConfig()


def _raw_config(path) -> dict:
    # validated, but without defaults filled in, so it only overrides what it names
    load_config(path)
    with open(path, encoding="utf-8") as fh:
        return yaml.safe_load(fh) or {}


def _out_dir(args, cfg: Optional[RunConfig]) -> Path:
    if args.out_dir:
        return Path(args.out_dir)
    if cfg is not None and cfg["output_dir"]:
        return Path(cfg["output_dir"])
    return Path(os.environ.get(OUTDIR_ENV, "."))


def _resolve(args, cfg, name: Optional[str]) -> Optional[Path]:
    if name is None:
        return None
    p = Path(name)
    return p if p.is_absolute() else _out_dir(args, cfg) / p


def _state_overrides(args) -> dict:
    st = {}
    if args.kind is not None:
        st["kind"] = args.kind
    if args.alpha is not None or args.alpha_im is not None:
        st["alpha"] = [args.alpha or 0.0, args.alpha_im or 0.0]
    for key in ("n", "nbar", "dim"):
        if getattr(args, key) is not None:
            st[key] = getattr(args, key)
    return {"state": st} if st else {}


def _recon_overrides(args) -> dict:
    rc = {}
    for key in ("s", "n_bins", "x_range", "r_max", "n_r", "n_max", "extent", "n_grid"):
        val = getattr(args, key)
        if val is not None:
            rc[key] = list(val) if key == "x_range" else val
    return {"reconstruction": rc} if rc else {}


def _load_state(args, cfg: RunConfig):
    if args.state_file:
        doc = formats.read_json(args.state_file, "penning-tomo/state")
        return formats.state_from_json(doc), {"file": str(args.state_file)}
    return build_state(cfg["state"]), cfg["state"]


def _write_grid(args, cfg, wg, echo: dict) -> None:
    formats.write_json(_resolve(args, cfg, args.output), formats.grid_to_json(wg, echo))
    if args.csv:
        formats.atomic_write(_resolve(args, cfg, args.csv), formats.grid_to_csv(wg))
    if args.matrix:
        formats.atomic_write(_resolve(args, cfg, args.matrix), formats.grid_to_matrix_text(wg))


def cmd_state(args) -> None:
    cfg = _base_config(args).updated(_state_overrides(args))
    state, prov = _load_state(args, cfg)
    path = formats.write_json(_resolve(args, cfg, args.output), formats.state_to_json(state, {"config": prov}))
    print(f"wrote {path} (dim={state.dim}, <n>={state.mean_number():.6g})")


def cmd_simulate(args) -> None:
    over = _state_overrides(args)
    pr = {}
    for key in ("phases", "samples"):
        if getattr(args, key) is not None:
            pr[key] = getattr(args, key)
    if args.protocol is not None:
        pr["kind"] = args.protocol
    if args.grid is not None:
        pr["grid"] = args.grid if args.grid == "default255" else json.loads(args.grid)
    if pr:
        over["protocol"] = pr
    if args.seed is not None:
        over["seed"] = args.seed
    if args.efficiency is not None:
        over["efficiency"] = args.efficiency
    cfg = _base_config(args).updated(over)
    state, _ = _load_state(args, cfg)
    state, records = simulate(cfg, state)
    grid = resolve_pnt_grid(cfg["protocol"].get("grid")).to_dict() if cfg["protocol"]["kind"] == "pnt" else None
    echo = cfg.to_dict()
    if args.state_file:
        echo["state"] = {"file": str(args.state_file)}
    path = formats.write_json(_resolve(args, cfg, args.output), formats.measurement_to_json(records, echo, grid))
    print(f"wrote {path} ({len(records)} records)")


def cmd_reconstruct(args) -> None:
    doc = formats.read_json(args.input, "penning-tomo/measurement")
    records = formats.measurement_from_json(doc)
    echoed = dict(doc.get("config") or {})
    echoed.pop("state", None)
    proto = dict(echoed.get("protocol") or {})
    proto["kind"] = doc["protocol"].lower()
    if "grid" in doc:
        proto["grid"] = doc["grid"]
    echoed["protocol"] = proto
    cfg = RunConfig.from_dict(echoed)
    if args.config:
        cfg = cfg.updated({"reconstruction": _raw_config(args.config).get("reconstruction", {})})
    cfg = cfg.updated(_recon_overrides(args))
    wg = reconstruct(cfg, records)
    echo = cfg.to_dict()
    echo["input"] = str(args.input)
    _write_grid(args, cfg, wg, echo)
    print(f"wrote {_resolve(args, cfg, args.output)} (method={wg.meta['method']}, s={wg.s:g})")


def cmd_oracle(args) -> None:
    cfg = _base_config(args).updated({**_state_overrides(args), **_recon_overrides(args)})
    state, prov = _load_state(args, cfg)
    rc = cfg["reconstruction"]
    if args.grid == "default255":
        grid = resolve_pnt_grid("default255")
    elif args.grid:
        grid = grid_from_dict(json.loads(args.grid))
    else:
        grid = evaluation_grid(rc)
    wg = oracle_wigner(state, grid, float(rc["s"]))
    echo = cfg.to_dict()
    echo["state"] = prov
    _write_grid(args, cfg, wg, echo)
    print(f"wrote {_resolve(args, cfg, args.output)}")


def cmd_compare(args) -> None:
    a = formats.grid_from_json(formats.read_json(args.reference, "penning-tomo/wigner-grid"))
    b = formats.grid_from_json(formats.read_json(args.estimate, "penning-tomo/wigner-grid"))
    report = compare(a, b)
    extra = {"reference": str(args.reference), "estimate": str(args.estimate),
             "smoothed": bool(b.meta.get("smoothed", False))}
    path = formats.write_json(_resolve(args, None, args.output), formats.report_to_json(report, extra))
    print(json.dumps(report.to_dict()))
    print(f"wrote {path}")


def cmd_figure(args) -> None:
    make = figure1_config if args.command == "figure1" else figure2_config
    cfg = make(args.seed, args.efficiency)
    if args.config:
        cfg = cfg.updated(_raw_config(args.config))
    result = run_pipeline(cfg)
    out = _out_dir(args, cfg) / args.command
    paths = write_pipeline(result, out)
    r = result.report
    print(
        f"{args.command}: rmse={r.rmse:.4g} relative_rmse={r.relative_rmse:.4g} "
        f"sign_agreement={r.sign_agreement:.3f} centre={result.reconstruction.value_at(0):.4g}"
        + (f" z_pass={r.pointwise_z_pass:.3f}" if r.pointwise_z_pass is not None else "")
    )
    print(f"outputs in {paths['report'].parent}")


COMMANDS = {
    "state": cmd_state,
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "figure1": cmd_figure,
    "figure2": cmd_figure,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except TomographyError as exc:
        print(f"penning-tomo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, OSError, ValueError) as exc:
        # ConfigError and JSON decoding errors are ValueErrors
        print(f"penning-tomo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
