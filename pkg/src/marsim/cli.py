"""Command line: ``marsim run --config FILE ...``."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, ScenarioConfig, channel_name, load_config, protocol_name
from .experiment import pdr, run_campaign
from .mobility import TraceError, load_trace
from .sim import Network

EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="marsim", description="Mobility-aware UAV swarm routing simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario or a seed-paired campaign")
    run.add_argument("--config", help="key = value scenario file (defaults: reference scenario)")
    run.add_argument("--seed", type=int, help="base seed (overrides the config)")
    run.add_argument("--runs", type=int, help="seeds per protocol/channel cell (overrides the config)")
    run.add_argument("--protocol", action="append", help="OLSR, MA-OLSR, BATMAN or BATMOBILE; repeatable")
    run.add_argument("--channel", action="append", help="friis or nakagami; repeatable")
    run.add_argument("--out", help="results CSV path (default: stdout)")
    run.add_argument("--dump-packets", help="write t,type,origin,from,to,seq per delivery (single run only)")
    run.add_argument("--trace", help="replay a t,node_id,x,y,z mobility trace instead of the swarm model")
    run.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    run.add_argument("--quiet", action="store_true", help="no progress on stderr")
    return parser


def _resolve(args) -> tuple:
    cfg = load_config(args.config) if args.config else ScenarioConfig().validate()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.runs is not None:
        if args.runs < 1:
            raise ConfigError("--runs must be >= 1")
        cfg = cfg.replace(runs=args.runs)
    protocols = [protocol_name(p) for p in args.protocol] if args.protocol else [cfg.protocol]
    channels = [channel_name(c) for c in args.channel] if args.channel else [cfg.channel]
    return cfg.validate(), protocols, channels


def _single_run(cfg, protocols, channels, args):
    """One run with optional packet dump and trace replay; returns a CampaignResult."""
    from .experiment import AggregateRow, CampaignResult, RunRow
    if len(protocols) != 1 or len(channels) != 1 or cfg.runs != 1:
        raise ConfigError("--dump-packets and --trace need exactly one protocol, channel and run")
    cfg = cfg.replace(protocol=protocols[0], channel=channels[0])
    trace = load_trace(args.trace) if args.trace else None
    dump = open(args.dump_packets, "w", encoding="utf-8") if args.dump_packets else None
    try:
        if dump is not None:
            dump.write("t,type,origin,from,to,seq\n")
        st = Network(cfg, cfg.seed, trace=trace, dump=dump).run()
    finally:
        if dump is not None:
            dump.close()
    value = pdr(st)
    row = RunRow(cfg.protocol, cfg.channel, cfg.seed, st.sent, st.delivered, value)
    return CampaignResult([row], [AggregateRow(cfg.protocol, cfg.channel, 1, value, None)])


def cmd_run(args) -> int:
    try:
        cfg, protocols, channels = _resolve(args)
        if args.dump_packets or args.trace:
            result = _single_run(cfg, protocols, channels, args)
        else:
            progress = None
            if not args.quiet:
                def progress(row):
                    print(f"{row.protocol} {row.channel} seed={row.seed} pdr={row.pdr:.4f}",
                          file=sys.stderr)
            result = run_campaign(cfg, protocols, channels, cfg.runs, base_seed=cfg.seed,
                                  workers=args.workers, progress=progress)
    except (ConfigError, TraceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        result.write_csv(args.out)
    else:
        sys.stdout.write(result.to_csv())
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return 1


if __name__ == "__main__":
    sys.exit(main())
