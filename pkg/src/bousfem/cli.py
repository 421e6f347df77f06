"""Command-line front end.

Subcommands: ``run`` (one configured experiment), ``converge``
(manufactured-solution accuracy tables), ``solitary`` (travelling-wave
profiles), ``sweep`` (weak- vs strong-topography comparison), ``compare``
(gauge series against reference data) and ``list`` (shipped protocols).

Outputs land under ``--outdir`` (default from ``BOUSFEM_OUTDIR``, then
``./out``), one directory per job, each holding the echoed config, the
delimited files described in FORMATS.md, rendered figures and a
``metrics.txt`` summary.  Every file is written atomically; a run that
aborts leaves no partial outputs.  Exit status is 0 on success and 1 on
any diagnosed failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources

import numpy as np

from .analysis import crest_metrics, reflected_wave_metrics, reflection_estimate
from .bathymetry import profile_kinds
from .config import ConfigError, parse_config, render_config
from .experiments import (
    build_experiment,
    compare_reference,
    load_reference_series,
    mass_drift,
    run_convergence,
    run_steepness_sweep,
)
from .models import KINDS
from .output import (
    atomic_write,
    write_convergence,
    write_gauge,
    write_metrics,
    write_profile,
    write_snapshot,
)
from .solitary import amplitude_from_speed, solve_profile, speed_from_amplitude
from .timestep import integrate

SAMPLE_POINTS = 2001


def _outdir(args) -> str:
    return args.outdir or os.environ.get("BOUSFEM_OUTDIR", "out")


def _resolve_config(spec: str) -> str:
    """A filesystem path as given, else a shipped protocol by name."""
    if os.path.exists(spec):
        return spec
    name = spec if spec.endswith(".ini") else spec + ".ini"
    candidate = resources.files("bousfem").joinpath("protocols", name)
    if candidate.is_file():
        return str(candidate)
    raise FileNotFoundError(
        f"no such config file or shipped protocol: {spec!r} "
        "(see `bousfem list`)"
    )


def _protocol_descriptions():
    root = resources.files("bousfem").joinpath("protocols")
    entries = []
    for item in sorted(root.iterdir(), key=lambda p: p.name):
        if not item.name.endswith(".ini"):
            continue
        first = item.read_text().splitlines()[0].strip()
        desc = first.lstrip("# ").strip() if first.startswith("#") else ""
        entries.append((item.name[:-4], desc))
    return entries


def _sample_grid(space):
    part = space.partition
    return np.linspace(part.a, part.b, SAMPLE_POINTS)


# -- subcommand: run --------------------------------------------------------


def _cmd_run(args) -> int:
    cfg = parse_config(_resolve_config(args.config), args.override)
    sys_, state = build_experiment(cfg)
    record = integrate(sys_, state, cfg.run_config())
    if record.aborted:
        print(f"error: run aborted at step {record.abort_step}: "
              f"{record.aborted}", file=sys.stderr)
        return 1

    jobdir = os.path.join(_outdir(args), cfg.name)
    from . import figures

    xs = _sample_grid(sys_.space)
    eta_b = sys_.bathy.depth(xs)
    metrics = {
        "model": cfg.kind,
        "n_elements": cfg.n_elements,
        "k": record.k,
        "n_steps": record.n_steps,
        "T": cfg.T,
    }

    with atomic_write(os.path.join(jobdir, "config.ini")) as fh:
        fh.write(render_config(cfg))

    def dump_state(tag, t, zc, uc):
        write_snapshot(os.path.join(jobdir, f"{tag}.csv"), xs,
                       sys_.space.eval(zc, xs), sys_.space.eval(uc, xs), eta_b)
        figures.snapshot_figure(os.path.join(jobdir, f"{tag}.png"),
                                sys_.space, sys_.bathy, zc, uc, t=t)

    # Snapshots land on the first step at or past each requested time; the
    # files carry the requested label, the achieved times go into metrics.
    requested = tuple(cfg.snapshot_times)
    if len(requested) == len(record.snapshots):
        tags = [f"snapshot_t{rt:g}" for rt in requested]
    else:
        tags = [f"snapshot_t{t:g}" for t, _, _ in record.snapshots]
    for tag, (t, zc, uc) in zip(tags, record.snapshots):
        dump_state(tag, t, zc, uc)
    if record.snapshots:
        metrics["snapshot_times"] = tuple(float(t) for t, _, _ in record.snapshots)
    dump_state("final", record.final.t, record.final.zc, record.final.uc)

    for i, x in enumerate(record.gauge_x):
        series = record.gauge(x)
        stem = f"gauge_{i:02d}_x{x:g}"
        write_gauge(os.path.join(jobdir, f"{stem}.csv"), series.t, series.zeta)
        figures.gauge_figure(os.path.join(jobdir, f"{stem}.png"),
                             series, scaling=cfg.scaling)
        metrics[f"gauge_max_x{x:g}"] = float(series.zeta.max())

    if record.mass is not None and len(record.mass):
        metrics["mass_initial"] = float(record.mass[0])
        metrics["mass_drift"] = mass_drift(record)
    zeta_final = sys_.space.eval(record.final.zc, xs)
    metrics["zeta_max_final"] = float(np.max(np.abs(zeta_final)))
    amp, pos = crest_metrics(sys_.space, record.final.zc)
    metrics["crest_amplitude"] = amp
    metrics["crest_position"] = pos

    if cfg.measure_window is not None:
        m = reflected_wave_metrics(
            sys_.space, record.final.zc, window=tuple(cfg.measure_window),
            theta=cfg.measure_theta, width_theta=cfg.measure_width_theta,
        )
        metrics["reflected_amplitude"] = m.amplitude
        metrics["reflected_mean_height"] = m.mean_height
        metrics["reflected_wavelength"] = m.wavelength
        metrics["reflected_support"] = m.support
        alpha = cfg.bathymetry.get("alpha")
        a0 = cfg.initial.get("a0", cfg.initial.get("amplitude"))
        if alpha and a0:
            metrics["reflection_estimate"] = reflection_estimate(alpha, abs(a0))

    if record.stopped_early:
        metrics["stopped_early"] = "true"
    write_metrics(os.path.join(jobdir, "metrics.txt"), metrics)

    print(f"wrote {jobdir}")
    return 0


# -- subcommand: converge ---------------------------------------------------


def _model_name(text: str) -> str:
    table = {"cbw": "CBw", "cbs": "CBs"}
    try:
        return table[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown model {text!r} (choose CBw or CBs)") from None


def _cmd_converge(args) -> int:
    study = run_convergence(model=args.model, Ns=tuple(args.n))
    jobdir = os.path.join(_outdir(args), f"convergence_{args.model}")
    from . import figures

    for label, rows in (("zeta", study.zeta_rows), ("u", study.u_rows)):
        errors = [(r["L2"], r["Linf"], r["H1"]) for r in rows]
        rates = [(r["L2_rate"], r["Linf_rate"], r["H1_rate"]) for r in rows]
        write_convergence(os.path.join(jobdir, f"{label}.csv"),
                          [r["N"] for r in rows], errors, rates)
    figures.convergence_figure(os.path.join(jobdir, "convergence.png"), study)

    metrics = {"model": args.model, "N": tuple(study.Ns)}
    for label, rows in (("zeta", study.zeta_rows), ("u", study.u_rows)):
        logN = np.log([r["N"] for r in rows])
        for key in ("L2", "Linf", "H1"):
            slope = -np.polyfit(logN, np.log([r[key] for r in rows]), 1)[0]
            metrics[f"{label}_{key}_rate"] = float(slope)
            metrics[f"{label}_{key}_finest"] = rows[-1][key]
    write_metrics(os.path.join(jobdir, "metrics.txt"), metrics)
    for key, value in metrics.items():
        print(f"{key} = {value}")
    return 0


# -- subcommand: solitary ---------------------------------------------------


def _cmd_solitary(args) -> int:
    if (args.amplitude is None) == (args.cs is None):
        raise ValueError("give exactly one of --amplitude or --cs")
    if args.cs is not None:
        c_s = args.cs
        amplitude = amplitude_from_speed(args.eps, c_s)
    else:
        amplitude = args.amplitude
        c_s = speed_from_amplitude(args.eps, amplitude)
    wave = solve_profile(args.eps, args.mu, c_s)

    jobdir = os.path.join(_outdir(args),
                          f"solitary_eps{args.eps:g}_mu{args.mu:g}")
    from . import figures

    table = wave.table(stride=args.stride)
    xs = table[:, 0] + args.x0
    write_profile(os.path.join(jobdir, "profile.csv"),
                  xs, table[:, 2], table[:, 1])
    figures.profile_figure(
        os.path.join(jobdir, "profile.png"), xs, table[:, 2], table[:, 1],
        title=f"c_s = {c_s:.6g}",
    )
    metrics = {
        "eps": args.eps,
        "mu": args.mu,
        "speed": wave.c_s,
        "amplitude": wave.A,
        "first_integral_residual": wave.first_integral_residual,
    }
    write_metrics(os.path.join(jobdir, "metrics.txt"), metrics)
    for key, value in metrics.items():
        print(f"{key} = {value}")
    return 0


# -- subcommand: sweep ------------------------------------------------------


def _cmd_sweep(args) -> int:
    result = run_steepness_sweep(
        betas=tuple(args.betas),
        eps=args.eps,
        n_elements=args.n_elements,
        T=args.T,
        parallel=not args.serial,
    )
    jobdir = os.path.join(_outdir(args), f"sweep_eps{args.eps:g}")
    from . import figures
    from .bathymetry import sine_shelf

    xs = _sample_grid(result.space)
    metrics = {"eps": args.eps, "T": args.T}
    for beta in args.betas:
        eta_b = sine_shelf(70.0, beta).depth(xs)
        for kind in ("CBw", "CBs"):
            case = result.case(beta, kind)
            write_snapshot(
                os.path.join(jobdir, f"final_b{beta:g}_{kind}.csv"),
                xs, result.space.eval(case.zc, xs),
                result.space.eval(case.uc, xs), eta_b,
            )
            metrics[f"crests_b{beta:g}_{kind}"] = case.crest_count
        metrics[f"linf_gap_b{beta:g}"] = result.linf_gap[beta]
    figures.sweep_figure(os.path.join(jobdir, "sweep.png"), result)
    write_metrics(os.path.join(jobdir, "metrics.txt"), metrics)
    for key, value in metrics.items():
        print(f"{key} = {value}")
    return 0


# -- subcommand: compare ----------------------------------------------------


def _cmd_compare(args) -> int:
    series = load_reference_series(args.series)
    result = compare_reference(series, args.reference)
    metrics = {
        "amplitude_ratio": result.amplitude_ratio,
        "deviation": result.deviation,
        "time_shift": result.time_shift,
        "overlap": result.overlap,
    }
    if args.out:
        write_metrics(args.out, metrics)
    for key, value in metrics.items():
        print(f"{key} = {value}")
    return 0


# -- subcommand: list -------------------------------------------------------


def _cmd_list(args) -> int:
    print("protocols:")
    for name, desc in _protocol_descriptions():
        print(f"  {name:28s} {desc}")
    print("models:", " ".join(KINDS))
    print("bathymetries:", " ".join(profile_kinds()))
    return 0


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bousfem",
        description="Boussinesq wave propagation over variable bottoms.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--outdir", default=None,
                        help="output directory (default: $BOUSFEM_OUTDIR or ./out)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common],
                       help="run one configured experiment")
    p.add_argument("--config", required=True,
                   help="config file path or shipped protocol name")
    p.add_argument("override", nargs="*", metavar="key=value",
                   help="config overrides, optionally section-qualified")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("converge", parents=[common], help="manufactured-solution error table")
    p.add_argument("--model", default="CBw", type=_model_name,
                   help="CBw or CBs (case-insensitive)")
    p.add_argument("--n", type=int, nargs="+", default=[64, 128, 256, 512])
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("solitary", parents=[common], help="travelling-wave profile and residuals")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--amplitude", type=float, default=None)
    p.add_argument("--cs", type=float, default=None, help="wave speed")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--stride", type=int, default=4,
                   help="output every n-th collocation sample")
    p.set_defaults(func=_cmd_solitary)

    p = sub.add_parser("sweep", parents=[common], help="weak vs strong topography comparison")
    p.add_argument("--betas", type=float, nargs="+", default=[0.05, 0.4, 0.6])
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--n-elements", type=int, default=2000)
    p.add_argument("--T", type=float, default=89.0)
    p.add_argument("--serial", action="store_true",
                   help="disable the worker pool")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("compare", parents=[common], help="gauge series against a reference file")
    p.add_argument("series", help="gauge CSV (t,zeta)")
    p.add_argument("reference", help="reference CSV (t,zeta)")
    p.add_argument("--out", default=None, help="write metrics to this file")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("list", parents=[common], help="shipped protocols and registries")
    p.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
