"""Command-line interface.

Subcommands: thresholds (print the modcod table), optimize (schedule a given
receiver list), sweep (run the simulation study, write CSV and optionally
figures) and report (render figures from an existing sweep CSV).
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import config as cfgmod
from .channel import Receiver
from .config import ConfigError
from .lp import assemble, dump_problem, optimal_schedule
from .ratevectors import ModcodIndex
from .sim import sweep, summarize, unavailability, write_csv


def _add_common(parser):
    parser.add_argument("--config", type=Path, default=None,
                        help="configuration file (defaults are built in)")


def _load_config(args) -> cfgmod.Config:
    cfg = cfgmod.load(args.config) if args.config else cfgmod.default_config()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "receivers", None) is not None:
        overrides["receivers"] = args.receivers
    if getattr(args, "trials", None) is not None:
        overrides["trials"] = args.trials
    if getattr(args, "snr_max_grid", None) is not None:
        overrides["snr_max_grid"] = cfgmod._parse_grid(args.snr_max_grid)
    return replace(cfg, **overrides) if overrides else cfg


def _read_floats(path: Path) -> list[float]:
    values = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        values.extend(float(tok) for tok in line.replace(",", " ").split())
    return values


def cmd_thresholds(args) -> int:
    cfg = _load_config(args)
    table = cfg.build_table()
    lines = ["family,params,stream,code_rate,threshold_db,spectral_efficiency"]
    for mc in table:
        family, rest = mc.constellation_id.split("-", 1)
        stream = "whole" if mc.stream is None else str(mc.stream)
        lines.append(f"{family},{rest.replace('-', ',')},{stream},"
                     f"{mc.code_rate},{mc.threshold_db:.2f},"
                     f"{mc.spectral_efficiency:.4g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        args.out.write_text(text, encoding="utf-8")
        print(f"wrote {len(table)} modcods to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_optimize(args) -> int:
    cfg = _load_config(args)
    snrs = _read_floats(args.snr_file)
    if not snrs:
        print("error: receiver SNR list is empty", file=sys.stderr)
        return 1
    weights = None
    if args.weights:
        weights = _read_floats(args.weights)
        if len(weights) != len(snrs):
            print("error: weights list does not match the receiver list",
                  file=sys.stderr)
            return 1
    elif cfg.weights is not None:
        if len(cfg.weights) != len(snrs):
            print("error: [weights] values do not match the receiver list",
                  file=sys.stderr)
            return 1
        weights = list(cfg.weights)

    table = cfg.build_table()
    receivers = [Receiver(i, s, 0.0, 0.0) for i, s in enumerate(snrs)]
    unavail = unavailability(receivers, table)
    schedule = optimal_schedule(receivers, table, cfg.limits(), weights)

    if args.dump_lp:
        index = ModcodIndex(table)
        covered = [rx for rx in receivers
                   if index.best_whole(rx.snr_db) is not None]
        from .ratevectors import enumerate_all
        import dataclasses as _dc
        remap = {rx.id: row for row, rx in enumerate(covered)}
        vectors = enumerate_all(
            [_dc.replace(rx, id=remap[rx.id]) for rx in covered],
            table, cfg.limits())
        w = None if weights is None else [weights[rx.id] for rx in covered]
        with open(args.dump_lp, "w", encoding="utf-8") as fh:
            dump_problem(assemble(vectors, len(covered), w), fh)
        print(f"dumped LP to {args.dump_lp}")

    print(f"receivers: {len(receivers)}  covered: {len(schedule.covered_ids)}"
          f"  unavailability: {unavail:.4g}%")
    print(f"optimal common rate R = {schedule.rate:.9g} bits/symbol"
          f"  (columns: {schedule.columns}, iterations: {schedule.iterations})")
    if weights is not None:
        print("weighted mode: receiver i gets R * w_i")
    print("time shares:")
    for t, vec in schedule.shares:
        prov = "; ".join(f"rx{i} <- {key}" for i, key in vec.provenance)
        print(f"  t = {t:.9f}   {prov}")

    # internal consistency: every covered receiver's time-averaged rate
    per_rx = {i: 0.0 for i in schedule.covered_ids}
    for t, vec in schedule.shares:
        for i, r in vec.entries:
            per_rx[i] += t * r
    wmap = {i: 1.0 for i in schedule.covered_ids}
    if weights is not None:
        wmap = {i: weights[i] for i in schedule.covered_ids}
    worst = max(abs(per_rx[i] - schedule.rate * wmap[i])
                for i in schedule.covered_ids)
    print(f"schedule residual check: max |rate_i - R*w_i| = {worst:.3g}"
          f" {'OK' if worst < 1e-9 else 'FAIL'}")
    return 0 if worst < 1e-9 else 1


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    scenario = cfg.scenario()
    if args.scheme != "all":
        print(f"note: computing all schemes; reporting rows for {args.scheme}")
    results = sweep(scenario)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        if args.scheme == "all":
            write_csv(results, fh, timing=args.timing)
        else:
            _write_filtered(results, [args.scheme], fh, timing=args.timing)
    print(f"wrote {args.out}")
    for row in summarize(results):
        print(f"snr_max {row.snr_max_db:5.1f} dB  {row.scheme:9s} "
              f"rate {row.mean_rate:7.4f} +- {row.std_rate:6.4f}  "
              f"gain {row.mean_gain_pct:6.2f}%  "
              f"unavail {row.mean_unavailability_pct:5.2f}%")
    if args.figures:
        from .report import load_sweep_csv, render_sweep_figures
        written = render_sweep_figures(load_sweep_csv(args.out), args.figures)
        for p in written:
            print(f"wrote {p}")
    return 0


def _write_filtered(results, schemes, stream, *, timing):
    import csv as _csv
    from .sim import CSV_HEADER, _num
    writer = _csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for res in results:
        for scheme in schemes:
            st = res.schemes[scheme]
            writer.writerow([
                _num(res.snr_max_db), res.trial, scheme, _num(st.rate),
                _num(st.gain_pct), _num(res.unavailability_pct),
                st.columns, st.iterations,
                format(st.wall_ms, ".3f") if timing else "0",
            ])


def cmd_report(args) -> int:
    from .report import load_sweep_csv, render_sweep_figures
    rows = load_sweep_csv(args.csv)
    written = render_sweep_figures(rows, args.outdir)
    for p in written:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmshare",
        description="Time-shared broadcast optimisation with hierarchical "
                    "modulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="print the modcod threshold table")
    _add_common(p)
    p.add_argument("--out", type=Path, default=None, help="write CSV here")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("optimize", help="optimal schedule for a receiver list")
    _add_common(p)
    p.add_argument("snr_file", type=Path,
                   help="text file with one receiver SNR (dB) per line")
    p.add_argument("--weights", type=Path, default=None,
                   help="per-receiver rate weight file")
    p.add_argument("--dump-lp", type=Path, default=None,
                   help="dump the assembled LP in plain text")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="run the simulation sweep, write CSV")
    _add_common(p)
    p.add_argument("--out", type=Path, required=True, help="output CSV path")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--receivers", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--snr-max-grid", type=str, default=None,
                   metavar="A:B:STEP")
    p.add_argument("--scheme",
                   choices=("reference", "pairing", "optimal", "all"),
                   default="all")
    p.add_argument("--weights", type=Path, default=None,
                   help=argparse.SUPPRESS)  # sweep is unweighted
    p.add_argument("--figures", type=Path, default=None,
                   help="also render summary figures into this directory")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock times in the CSV (breaks "
                        "byte-reproducibility)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="render figures from a sweep CSV")
    p.add_argument("--csv", type=Path, required=True)
    p.add_argument("--outdir", type=Path, required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
