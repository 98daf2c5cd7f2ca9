"""Command-line front end.

Exit codes: 0 success, 2 validation failure, 3 solver failure,
4 optimiser did not converge (result is still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

import faultloc
from faultloc import csvio
from faultloc.estimate import advise_bandwidth, localize, sweep_cost
from faultloc.model import ValidationError, load_config, table1_text
from faultloc.simulate import RecordLengthError, StabilityError, simulate_fault_pde, synthesize_output
from faultloc.spectrum import magnitude_spectrum
from faultloc.xferfn import FrequencyGrid, log_sweep, magnitude_response

log = logging.getLogger("faultloc")

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_NOT_CONVERGED = 0, 2, 3, 4
FLAT_SPREAD = 0.01


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="faultloc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=faultloc.__version__)
    p.add_argument("--seed-config", choices=["table1"], help="print a built-in case file and exit")
    p.add_argument("--replay", metavar="MANIFEST", help="re-run the command recorded in a manifest")
    sub = p.add_subparsers(dest="command")

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="case file (INI)")
        sp.add_argument("--out", required=True, help="output path")
        sp.add_argument("--threads", type=int, default=1, help="worker threads, 0 = auto")
        return sp

    sp = common(sub.add_parser("simulate", help="generate a sensor waveform"))
    sp.add_argument("--mode", choices=["pde", "synth"], default="pde")

    sp = common(sub.add_parser("spectrum", help="magnitude spectrum of a waveform"), config=False)
    sp.add_argument("--waveform", required=True)

    sp = common(sub.add_parser("tf", help="transfer function on a log grid"))
    sp.add_argument("--ell", type=_float_list, required=True, help="comma-separated distances (m)")
    sp.add_argument("--omega-min", type=float, default=1.0)
    sp.add_argument("--omega-max", type=float, help="default: Nyquist rate pi/T_s of the case")
    sp.add_argument("--points-per-decade", type=int, default=50)

    sp = common(sub.add_parser("sweep", help="cost J(ell) on a distance grid"))
    sp.add_argument("--waveform", required=True)
    sp.add_argument("--ell", type=_float_list, help="explicit distances; overrides the range flags")
    sp.add_argument("--ell-min", type=float, default=0.0)
    sp.add_argument("--ell-max", type=float, default=4000.0)
    sp.add_argument("--ell-step", type=float, default=10.0)
    sp.add_argument("--omega-cut", type=float)

    sp = common(sub.add_parser("locate", help="estimate the fault distance"))
    sp.add_argument("--waveform", required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--init-ell", type=float, help="single-start search from this distance (m)")
    g.add_argument("--auto", action="store_true", help="coarse sweep then refinement (default)")
    sp.add_argument("--omega-cut", type=float)
    sp.add_argument("--max-evals", type=int, default=10_000, help="cost evaluation budget")

    sp = common(sub.add_parser("advise", help="bandwidth recommendations"))
    sp.add_argument("--ell-min", type=float, required=True)
    return p


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _manifest(args, argv, inputs, outputs, params) -> None:
    out = Path(args.out)
    _write_json(
        out.with_name(out.name + ".manifest.json"),
        {
            "toolkit_version": faultloc.__version__,
            "subcommand": args.command,
            "argv": list(argv),
            "config_path": getattr(args, "config", None),
            "inputs": [str(x) for x in inputs],
            "outputs": [str(x) for x in outputs],
            "parameters": params,
        },
    )


def _case_params(cfg) -> dict:
    return {
        "line": vars(cfg.line),
        "bases": {"V0": cfg.bases.V0, "I0": cfg.bases.I0, "R0": cfg.bases.R0},
        "fault": vars(cfg.fault),
    }


def _load_measured(args, cfg):
    w, meta = csvio.read_waveform(args.waveform)
    if not math.isclose(w.T_s, cfg.sim.T_s, rel_tol=1e-9):
        raise ValidationError("T_s", f"waveform has T_s={w.T_s!r} but the case file says {cfg.sim.T_s!r}")
    # the ground-truth distance in the header is deliberately not read
    return magnitude_spectrum(w)


def cmd_simulate(args, argv):
    cfg = load_config(args.config)
    sys_, f, s = cfg.system, cfg.fault, cfg.sim
    if args.mode == "synth":
        w = synthesize_output(sys_, s.ell_true, f.t_f, f.sigma, s.T_s, s.n_samples)
    else:
        w = simulate_fault_pde(sys_, s.ell_true, f.t_f, f.sigma, s.T_s, s.n_samples, s.spatial_nodes, s.substeps)
    meta = {"ell_true": float(s.ell_true), "t_f": float(f.t_f), "sigma": float(f.sigma), "mode": args.mode}
    csvio.write_waveform(args.out, w, meta)
    params = _case_params(cfg) | {"sim": vars(s), "mode": args.mode}
    _manifest(args, argv, [args.config], [args.out], params)
    return EXIT_OK


def cmd_spectrum(args, argv):
    w, _ = csvio.read_waveform(args.waveform)
    spec = magnitude_spectrum(w)
    rows = np.column_stack([spec.grid.omegas, spec.mags.T])
    csvio.write_table(args.out, csvio.SPECTRUM_COLUMNS, rows, {"T_s": float(w.T_s), "N": len(spec.grid) - 1})
    _manifest(args, argv, [args.waveform], [args.out], {"T_s": w.T_s, "samples": len(w)})
    return EXIT_OK


def cmd_tf(args, argv):
    cfg = load_config(args.config)
    if not args.ell:
        raise ValidationError("ell", "no distances given")
    w_max = args.omega_max if args.omega_max is not None else math.pi / cfg.sim.T_s
    if not 0 < args.omega_min < w_max:
        raise ValidationError("omega_min", "must satisfy 0 < omega_min < omega_max")
    grid = FrequencyGrid(np.concatenate([[0.0], log_sweep(args.omega_min, w_max, args.points_per_decade)]))
    out = Path(args.out)
    outputs = []
    for ell in args.ell:
        resp = magnitude_response(grid, cfg.system, ell)
        mags = resp.magnitudes
        rows = np.column_stack(
            [grid.omegas, mags[0], mags[1], resp.h1.real, resp.h1.imag, resp.h2.real, resp.h2.imag]
        )
        path = out if len(args.ell) == 1 else out.with_name(f"{out.stem}_ell{ell:g}{out.suffix}")
        csvio.write_table(
            path,
            ["omega_rad_s", "mag_h1", "mag_h2", "re_h1", "im_h1", "re_h2", "im_h2"],
            rows,
            {"ell": float(ell)},
        )
        outputs.append(path)
    params = _case_params(cfg) | {"ell": args.ell, "omega_min": args.omega_min, "omega_max": w_max}
    _manifest(args, argv, [args.config], outputs, params)
    return EXIT_OK


def _ell_grid(args) -> np.ndarray:
    if args.ell is not None:
        return np.asarray(args.ell, dtype=float)
    if not args.ell_step > 0:
        raise ValidationError("ell_step", "must be > 0")
    n = int(math.floor((args.ell_max - args.ell_min) / args.ell_step + 1e-9)) + 1
    return args.ell_min + args.ell_step * np.arange(max(n, 0))


def cmd_sweep(args, argv):
    cfg = load_config(args.config)
    measured = _load_measured(args, cfg)
    ells = _ell_grid(args)
    curve = sweep_cost(ells, measured, cfg.system, cfg.fault.sigma, args.omega_cut, threads=args.threads)
    csvio.write_table(args.out, ["ell_m", "J"], np.column_stack([curve.ells, curve.costs]))
    params = _case_params(cfg) | {"omega_cut": args.omega_cut, "n_ell": int(ells.size)}
    _manifest(args, argv, [args.config, args.waveform], [args.out], params)
    return EXIT_OK


def cmd_locate(args, argv):
    cfg = load_config(args.config)
    measured = _load_measured(args, cfg)
    sys_, sigma = cfg.system, cfg.fault.sigma
    res = localize(measured, sys_, sigma, args.omega_cut, init_ell=args.init_ell, max_evals=args.max_evals)
    probe = sweep_cost(np.logspace(1, 5, 64), measured, sys_, sigma, args.omega_cut, threads=args.threads)
    spread = probe.spread
    payload = {
        "ell_hat_m": res.ell_hat,
        "cost_at_min": res.cost_at_min,
        "iterations": res.iterations,
        "evaluations": res.evaluations,
        "omega_cut_rad_s": res.band_used[1],
        "converged": res.converged,
        "curve_spread": spread,
        "flat_curve": bool(spread < FLAT_SPREAD),
    }
    if payload["flat_curve"]:
        log.warning("cost curve is nearly flat (spread %.3g); the estimate is unreliable", spread)
    _write_json(args.out, payload)
    params = _case_params(cfg) | {"init_ell": args.init_ell, "omega_cut": args.omega_cut}
    _manifest(args, argv, [args.config, args.waveform], [args.out], params)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_advise(args, argv):
    cfg = load_config(args.config)
    adv = advise_bandwidth(cfg.system, args.ell_min)
    _write_json(
        args.out,
        {
            "ell_min_m": args.ell_min,
            "omega_star_rad_s": adv.omega_star,
            "omega_f_rad_s": adv.omega_f_recommended,
            "omega_b_rad_s": adv.omega_b_recommended,
            "sigma_s": adv.sigma_recommended,
            "T_s_s": adv.T_s_recommended,
        },
    )
    _manifest(args, argv, [args.config], [args.out], _case_params(cfg) | {"ell_min": args.ell_min})
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "tf": cmd_tf,
    "sweep": cmd_sweep,
    "locate": cmd_locate,
    "advise": cmd_advise,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return EXIT_OK
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
        return EXIT_VALIDATION

    if args.seed_config:
        sys.stdout.write(table1_text())
        return EXIT_OK
    if args.replay:
        try:
            recorded = json.loads(Path(args.replay).read_text())["argv"]
        except (OSError, ValueError, KeyError) as exc:
            log.error("cannot read manifest %s: %s", args.replay, exc)
            return EXIT_VALIDATION
        return main(recorded)
    if args.command is None:
        build_parser().print_help(sys.stderr)
        return EXIT_VALIDATION

    try:
        return COMMANDS[args.command](args, argv)
    except (ValidationError, RecordLengthError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except StabilityError as exc:
        log.error("%s", exc)
        return EXIT_SOLVER
