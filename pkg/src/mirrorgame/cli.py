"""Command-line interface: batch simulation, VP-vs-VP duets, model
comparison, metrics over saved logs, signature building/comparison and
the live-play server."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .metrics import compute_report, render_report_table, report_key_values
from .session import (
    SessionConfig,
    SessionLog,
    compare_models,
    read_trace,
    run_session,
    run_vp_vs_vp,
)
from .signature import emd, velocity_pdf


def _load_config(path):
    with open(path) as f:
        return SessionConfig.from_dict(json.load(f))


def _cmd_simulate(args):
    cfg = _load_config(args.config)
    log = run_session(cfg)
    log.save(args.out)
    print(f"wrote {len(log.records)} records to {args.out}")
    return 0


def _cmd_duet(args):
    leader = _load_config(args.leader_config)
    follower = _load_config(args.follower_config)
    log_l, log_f = run_vp_vs_vp(leader, follower)
    log_l.save(args.leader_out)
    log_f.save(args.follower_out)
    print(f"wrote {args.leader_out} and {args.follower_out}")
    return 0


def _cmd_compare(args):
    leader = read_trace(args.trace)
    _, table, extras = compare_models(leader, args.models)
    print(table)
    for mode, ex in extras.items():
        print(f"max|error|({mode}) = {ex['max_error']:.4f}")
    return 0


def _cmd_metrics(args):
    reports = {}
    for path in args.logs:
        log = SessionLog.load(path)
        reports[path] = compute_report(log.hp_trace(), log.vp_trace())
    print(render_report_table(reports))
    if args.key_values:
        print(report_key_values(reports))
    return 0


def _cmd_signature(args):
    sigs = {}
    for path in args.traces:
        tr = read_trace(path)
        v = tr.v if tr.v is not None else tr.velocities()
        sigs[path] = velocity_pdf(np.asarray(v))
    names = list(sigs)
    print("EMD matrix")
    width = max(len(n) for n in names) + 2
    print("".ljust(width) + "".join(n.rjust(width) for n in names))
    for a in names:
        row = [f"{emd(sigs[a], sigs[b]):.6f}".rjust(width) for b in names]
        print(a.ljust(width) + "".join(row))
    if args.out:
        with open(args.out, "w") as f:
            f.write(sigs[names[0]].to_json() + "\n")
        print(f"wrote signature of {names[0]} to {args.out}")
    return 0


def _cmd_serve(args):
    from .service import serve

    host, _, port = args.bind.rpartition(":")
    serve(host or "127.0.0.1", int(port), default_mode=args.mode,
          default_tick=args.tick, log_dir=args.log_dir)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="mirrorgame",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="run one batch session")
    sp.add_argument("--config", required=True, help="JSON session config")
    sp.add_argument("--out", default="session.log", help="output log path")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("duet", help="run two coupled virtual players")
    sp.add_argument("--leader-config", required=True)
    sp.add_argument("--follower-config", required=True)
    sp.add_argument("--leader-out", default="leader.log")
    sp.add_argument("--follower-out", default="follower.log")
    sp.set_defaults(func=_cmd_duet)

    sp = sub.add_parser("compare", help="compare follower models on a trace")
    sp.add_argument("trace", help="leader trace file (t,x CSV)")
    sp.add_argument("--models", nargs="+",
                    default=["opc-follower", "afc", "rpc", "hkb-fixed"])
    sp.set_defaults(func=_cmd_compare)

    sp = sub.add_parser("metrics", help="index report over session logs")
    sp.add_argument("logs", nargs="+")
    sp.add_argument("--key-values", action="store_true")
    sp.set_defaults(func=_cmd_metrics)

    sp = sub.add_parser("signature",
                        help="build/compare velocity signatures, print EMD matrix")
    sp.add_argument("traces", nargs="+")
    sp.add_argument("--out", help="write the first trace's signature here")
    sp.set_defaults(func=_cmd_signature)

    sp = sub.add_parser("serve", help="run the live-play WebSocket service")
    sp.add_argument("--bind", default="127.0.0.1:8710", help="HOST:PORT")
    sp.add_argument("--mode", default="opc-follower")
    sp.add_argument("--tick", type=float, default=0.03)
    sp.add_argument("--log-dir", default=".")
    sp.set_defaults(func=_cmd_serve)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
