"""Command-line front end.

Subcommands: state, rates, sweep, optimize, session, fig1.
Exit codes: 0 success, 1 usage error, 2 model/calibration failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .adversary import CalibrationError
from .fock import check_index
from .polarization import Basis
from .protocol import (Scenario, SessionConfig, run_session)
from .rates import (Protocol, SWEEP_COLUMNS, default_cutoff, evaluate_rates,
                    find_crossover, optimize_tau, sweep)
from .source import (PdcParams, SqueezeParams, pdc_state, singlet_state,
                     squeezed_pair_state, truncation_deficit)

EXIT_USAGE = 1
EXIT_MODEL = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if math.isnan(x) else format(x, ".12g")
    return str(x)


def _parse_range(text: str):
    """start:stop:step (stop inclusive up to float slack)."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected start:stop:step, got {text!r}")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(
            f"need start <= stop and step > 0 in {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _protocols(name: str):
    return [Protocol.STANDARD, Protocol.MULTI] if name == "both" \
        else [Protocol(name)]


def _write_text(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _maybe_report_deficit(args):
    if getattr(args, "cutoff", None) is not None and hasattr(args, "tau") \
            and args.tau is not None:
        deficit = truncation_deficit(PdcParams(tau=args.tau,
                                               cutoff=args.cutoff))
        print(f"truncation deficit at tau={args.tau}, "
              f"cutoff={args.cutoff}: {deficit:.3e}", file=sys.stderr)


def _cmd_state(args):
    if args.kind == "pdc":
        state = pdc_state(PdcParams(tau=args.tau, cutoff=args.cutoff))
    elif args.kind == "squeezed":
        state = squeezed_pair_state(SqueezeParams(lam=args.lam,
                                                  cutoff=args.cutoff))
    else:
        state = singlet_state(args.n, args.cutoff)
    _write_text(args.out, state.to_json() + "\n")
    return 0


def _cmd_rates(args):
    cutoff = args.cutoff if args.cutoff is not None else default_cutoff(args.tau)
    _maybe_report_deficit(args)
    report = evaluate_rates(args.eta, args.tau, Protocol(args.protocol),
                            cutoff)
    _write_text(args.out, json.dumps(report.to_dict(), indent=2) + "\n")
    return 0


def _rows_to_csv(rows) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for r in rows:
        lines.append(",".join(_fmt(r[c]) for c in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"


def _cmd_sweep(args):
    etas = args.eta
    taus = args.tau
    if any(e <= 0 or e > 1 for e in etas):
        print("eta range must lie in (0, 1]", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    rows = sweep(etas, taus, _protocols(args.protocol), cutoff=args.cutoff,
                 jobs=args.jobs)
    n_failed = sum(1 for r in rows if math.isnan(r["cs_min"]))
    if n_failed:
        print(f"{n_failed} grid points could not calibrate the attack "
              "(NaN rows)", file=sys.stderr)
    _write_text(args.out, _rows_to_csv(rows))
    if args.plot:
        from .plotting import render_sweep_heatmap
        try:
            render_sweep_heatmap(rows, args.plot)
        except OSError as exc:
            print(f"cannot write {args.plot}: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_IO)
    return 0


def _cmd_optimize(args):
    res = optimize_tau(args.eta, Protocol(args.protocol),
                       tau_lo=args.tau_min, tau_hi=args.tau_max,
                       cutoff=args.cutoff)
    out = {"eta": args.eta, "protocol": args.protocol,
           "tau_star": res.tau_star, "cs_at_star": res.cs_at_star}
    if not res.positive:
        out["note"] = "no positive rate"
    _write_text(args.out, json.dumps(out, indent=2) + "\n")
    return 0


def _cmd_session(args):
    config = SessionConfig(
        eta=args.eta, tau=args.tau, protocol=Protocol(args.protocol),
        pulses=args.pulses, seed=args.seed, scenario=Scenario(args.scenario),
        cutoff=args.cutoff)
    _maybe_report_deficit(args)
    report = run_session(config)
    _write_text(args.out, report.to_json() + "\n")
    return 0


def _cmd_fig1(args):
    protos = [Protocol.MULTI, Protocol.STANDARD]
    optima = {p.value: optimize_tau(1.0, p, cutoff=args.cutoff)
              for p in protos}
    curve_rows = []
    for p in protos:
        tau_star = optima[p.value].tau_star
        curve_rows.extend(sweep(args.eta, [tau_star], [p],
                                cutoff=args.cutoff, jobs=args.jobs))
    crossover = find_crossover(optima["multi"].tau_star,
                               optima["standard"].tau_star,
                               eta_lo=min(args.eta), eta_hi=max(args.eta),
                               cutoff=args.cutoff)
    surface_rows = sweep(args.eta, args.tau, protos, cutoff=args.cutoff,
                         jobs=args.jobs)
    if args.csv:
        _write_text(args.csv, _rows_to_csv(surface_rows + curve_rows))
    from .plotting import render_rate_figure, render_sweep_heatmap
    try:
        render_sweep_heatmap(surface_rows, args.surface_out)
        render_rate_figure(
            curve_rows,
            {k: (v.tau_star, v.cs_at_star) for k, v in optima.items()},
            crossover, args.out)
    except OSError as exc:
        print(f"cannot write figure: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)
    summary = {
        "tau_star_multi": optima["multi"].tau_star,
        "tau_star_standard": optima["standard"].tau_star,
        "cs_multi_at_star": optima["multi"].cs_at_star,
        "cs_standard_at_star": optima["standard"].cs_at_star,
        "rate_ratio": optima["multi"].cs_at_star
        / optima["standard"].cs_at_star,
        "crossover_eta": crossover,
        "figure": args.out, "surface_figure": args.surface_out,
    }
    print(json.dumps(summary, indent=2))
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="mpqkd",
                description="Multi-photon entangled-pair QKD rate calculator")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("state", help="dump a source state as JSON records")
    sp.add_argument("--kind", choices=("pdc", "squeezed", "singlet"),
                    default="pdc")
    sp.add_argument("--tau", type=float, default=0.5)
    sp.add_argument("--lam", type=float, default=0.3)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--cutoff", type=int, default=6)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_state)

    rp = sub.add_parser("rates", help="rate report at one (eta, tau) point")
    rp.add_argument("--eta", type=float, required=True)
    rp.add_argument("--tau", type=float, required=True)
    rp.add_argument("--protocol", choices=("standard", "multi"),
                    default="multi")
    rp.add_argument("--cutoff", type=int, default=None)
    rp.add_argument("--out", default=None)
    rp.set_defaults(func=_cmd_rates)

    wp = sub.add_parser("sweep", help="CSV over an (eta, tau) grid")
    wp.add_argument("--eta", type=_parse_range, required=True,
                    metavar="START:STOP:STEP")
    wp.add_argument("--tau", type=_parse_range, required=True,
                    metavar="START:STOP:STEP")
    wp.add_argument("--protocol", choices=("standard", "multi", "both"),
                    default="both")
    wp.add_argument("--cutoff", type=int, default=None)
    wp.add_argument("--jobs", type=int, default=1)
    wp.add_argument("--out", required=True)
    wp.add_argument("--plot", default=None,
                    help="also render a cs_min heatmap to this file")
    wp.set_defaults(func=_cmd_sweep)

    op = sub.add_parser("optimize", help="golden-section tau optimization")
    op.add_argument("--eta", type=float, required=True)
    op.add_argument("--protocol", choices=("standard", "multi"),
                    default="multi")
    op.add_argument("--tau-min", type=float, default=0.01)
    op.add_argument("--tau-max", type=float, default=1.5)
    op.add_argument("--cutoff", type=int, default=None)
    op.add_argument("--out", default=None)
    op.set_defaults(func=_cmd_optimize)

    cp = sub.add_parser("session", help="Monte Carlo key-distribution session")
    cp.add_argument("--eta", type=float, required=True)
    cp.add_argument("--tau", type=float, required=True)
    cp.add_argument("--protocol", choices=("standard", "multi"),
                    default="multi")
    cp.add_argument("--pulses", type=int, required=True)
    cp.add_argument("--seed", type=int, default=None)
    cp.add_argument("--scenario", choices=("natural", "eve"),
                    default="natural")
    cp.add_argument("--cutoff", type=int, default=None)
    cp.add_argument("--out", default=None)
    cp.set_defaults(func=_cmd_session)

    fp = sub.add_parser("fig1", help="secure-rate figures plus CSV data")
    fp.add_argument("--eta", type=_parse_range, default="0.5:1.0:0.02",
                    metavar="START:STOP:STEP")
    fp.add_argument("--tau", type=_parse_range, default="0.1:1.2:0.05",
                    metavar="START:STOP:STEP")
    fp.add_argument("--cutoff", type=int, default=None)
    fp.add_argument("--jobs", type=int, default=1)
    fp.add_argument("--out", default="fig1_rates.png")
    fp.add_argument("--surface-out", default="fig1_surfaces.png")
    fp.add_argument("--csv", default="fig1_data.csv")
    fp.set_defaults(func=_cmd_fig1)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if isinstance(getattr(args, "eta", None), str):
        args.eta = _parse_range(args.eta)
    if isinstance(getattr(args, "tau", None), str):
        args.tau = _parse_range(args.tau)
    try:
        return args.func(args)
    except CalibrationError as exc:
        print(f"calibration failure: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ValueError as exc:
        print(f"invalid model input: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
