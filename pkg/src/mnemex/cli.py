"""Operator entry point: simulate, serve, decay, inspect, export-curves.

Exit codes are a stable contract: 0 success, 1 runtime failure (port in use,
store errors), 2 usage or input problems (bad flags, malformed scenario,
missing files).  Flags mirror the config field names (--theta-decay sets
``theta_decay``) so a run's report is self-describing, and every override is
validated by the config types before anything executes.
"""

import argparse
import dataclasses
import json
import os
import socket
import sys
from pathlib import Path
from typing import Optional, Sequence

from .scoring import DecayConfig
from .simulate import (
    Scenario,
    ScenarioError,
    SimConfig,
    canonical_scenario,
    compare_strategies,
    export_curves,
    export_reports_csv,
    export_reports_json,
    load_scenario,
)
from .strategies import BasicRAG, SlidingWindow

ENV_ADDR = "MNEMEX_ADDR"
ENV_DATA_DIR = "MNEMEX_DATA_DIR"
DEFAULT_ADDR = "127.0.0.1:8750"

_DECAY_FLAGS = (
    "alpha", "beta", "gamma", "decay_rate", "theta_decay", "n_max", "cadence_turns",
)


class _UsageError(Exception):
    """Bad input from the operator; maps to exit code 2."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mnemex",
        description="Agent memory engine: scored decay, consolidation, and the curation service.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="run the strategy-comparison scenario")
    sim.add_argument("--scenario", metavar="PATH", default=None,
                     help="scenario JSON file (default: the bundled canonical scenario)")
    sim.add_argument("--strategy", choices=["all", "window", "rag", "hybrid"], default="all")
    sim.add_argument("--out", metavar="DIR", default=None,
                     help="write reports.csv and reports.json into DIR")
    sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    for name in ("alpha", "beta", "gamma", "decay_rate", "theta_decay"):
        sim.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=None)
    for name in ("n_max", "cadence_turns", "k_episodic", "k_semantic", "window_turns"):
        sim.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int, default=None)
    sim.set_defaults(handler=_cmd_simulate)

    srv = sub.add_parser("serve", help="serve the curation API over HTTP")
    srv.add_argument("--address", default=None,
                     help=f"host:port to listen on (default: ${ENV_ADDR} or {DEFAULT_ADDR})")
    srv.add_argument("--data-dir", default=None,
                     help=f"event-log directory (default: ${ENV_DATA_DIR}; omit for in-memory)")
    srv.set_defaults(handler=_cmd_serve)

    dec = sub.add_parser("decay", help="run one decay pass against a persisted store")
    dec.add_argument("--data-dir", default=None)
    dec.set_defaults(handler=_cmd_decay)

    ins = sub.add_parser("inspect", help="print stored entries or facts as JSON")
    ins.add_argument("--data-dir", default=None)
    group = ins.add_mutually_exclusive_group()
    group.add_argument("--id", type=int, default=None, help="one entry, full content")
    group.add_argument("--all", action="store_true", help="every entry (default)")
    group.add_argument("--facts", action="store_true", help="semantic facts instead of entries")
    ins.set_defaults(handler=_cmd_inspect)

    cur = sub.add_parser("export-curves", help="write the closed-form benchmark curves as CSV")
    cur.add_argument("--turns", type=int, default=None)
    cur.add_argument("--avg-base-success", dest="avg_base_success", type=float, default=None)
    cur.add_argument("--decay-rate", dest="decay_rate", type=float, default=None)
    cur.add_argument("--hybrid-drift", dest="hybrid_drift", type=float, default=None)
    cur.add_argument("--out", metavar="DIR", default="curves")
    cur.set_defaults(handler=_cmd_export_curves)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help and bad flags itself
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # noqa: BLE001 — the CLI boundary reports, not raises
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _load(args: argparse.Namespace) -> Scenario:
    if args.scenario is None:
        scenario = canonical_scenario()
    else:
        path = Path(args.scenario)
        if not path.exists():
            raise _UsageError(f"scenario file not found: {path}")
        scenario = load_scenario(path)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    return scenario


def _pick_strategies(args: argparse.Namespace, scenario: Scenario) -> list:
    """Build the strategy objects up front so every override is validated
    before the first turn runs."""
    window_turns = args.window_turns if args.window_turns is not None else 10
    window = SlidingWindow(window_turns=window_turns)

    rag_kwargs = {"window_turns": window_turns}
    if args.k_episodic is not None:
        rag_kwargs["k"] = args.k_episodic
    rag = BasicRAG(**rag_kwargs)

    hybrid = scenario.hybrid_strategy(window_turns=window_turns)
    decay_overrides = {
        name: getattr(args, name)
        for name in _DECAY_FLAGS
        if getattr(args, name, None) is not None
    }
    if decay_overrides:
        hybrid = dataclasses.replace(
            hybrid, decay_config=dataclasses.replace(hybrid.decay_config, **decay_overrides)
        )
    hybrid_kwargs = {}
    if args.k_episodic is not None:
        hybrid_kwargs["k_episodic"] = args.k_episodic
    if args.k_semantic is not None:
        hybrid_kwargs["k_semantic"] = args.k_semantic
    if hybrid_kwargs:
        hybrid = dataclasses.replace(hybrid, **hybrid_kwargs)

    chosen = {"all": [window, rag, hybrid], "window": [window], "rag": [rag], "hybrid": [hybrid]}
    return chosen[args.strategy]


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = _load(args)
    strategies = _pick_strategies(args, scenario)
    reports = compare_strategies(scenario, strategies)

    columns = [
        ("strategy", "strategy", "{}"),
        ("completion%", "task_completion_rate", "{:.1f}"),
        ("contradiction%", "contradiction_rate", "{:.1f}"),
        ("abstain%", "abstain_rate", "{:.1f}"),
        ("avg_tokens", "avg_token_cost", "{:.1f}"),
        ("probes", "probe_count", "{}"),
        ("decay_runs", "decay_runs", "{}"),
        ("final_size", "final_episodic_size", "{}"),
    ]
    rows = [
        [fmt.format(report.scalar_row()[key]) for _, key, fmt in columns]
        for report in reports
    ]
    widths = [
        max(len(header), *(len(row[i]) for row in rows))
        for i, (header, _, _) in enumerate(columns)
    ]
    print("  ".join(h.ljust(w) for (h, _, _), w in zip(columns, widths)))
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))

    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = export_reports_csv(reports, out / "reports.csv")
        json_path = export_reports_json(reports, out / "reports.json")
        print(f"wrote {csv_path}")
        print(f"wrote {json_path}")
    return 0


# ---------------------------------------------------------------------------
# serve / decay / inspect
# ---------------------------------------------------------------------------


def _parse_address(address: str) -> tuple:
    host, sep, port_text = address.rpartition(":")
    if not sep or not host or not port_text.isdigit():
        raise _UsageError(f"bad address {address!r}; expected host:port")
    port = int(port_text)
    if not 0 < port < 65536:
        raise _UsageError(f"port out of range: {port}")
    return host, port


def _cmd_serve(args: argparse.Namespace) -> int:
    address = args.address or os.environ.get(ENV_ADDR) or DEFAULT_ADDR
    host, port = _parse_address(address)
    data_dir = args.data_dir or os.environ.get(ENV_DATA_DIR)

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as exc:
        sock.close()
        print(f"error: cannot bind {host}:{port}: {exc}", file=sys.stderr)
        return 1

    import uvicorn

    from .service import MemoryService, create_app

    if data_dir is None:
        print("note: no --data-dir given; state will not survive shutdown", file=sys.stderr)
    service = MemoryService(data_dir=data_dir)
    app = create_app(service)
    server = uvicorn.Server(uvicorn.Config(app, log_level="info"))
    try:
        server.run(sockets=[sock])
    finally:
        sock.close()
    return 0


def _data_dir_or_die(args: argparse.Namespace) -> Path:
    data_dir = args.data_dir or os.environ.get(ENV_DATA_DIR)
    if data_dir is None:
        raise _UsageError(f"--data-dir is required (or set ${ENV_DATA_DIR})")
    return Path(data_dir)


def _cmd_decay(args: argparse.Namespace) -> int:
    from .service import MemoryService

    service = MemoryService(data_dir=_data_dir_or_die(args))
    report = service.run_decay_once()
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    from .service import MemoryService

    data_dir = _data_dir_or_die(args)
    # Read-only: rebuild state from disk without creating files or appending
    # a genesis event the way a live service would.
    service = MemoryService()
    if data_dir.exists():
        service._recover(data_dir)

    if args.id is not None:
        try:
            print(json.dumps(service.entry_detail(args.id), indent=2))
        except KeyError:
            print(f"error: no entry with id {args.id}", file=sys.stderr)
            return 1
    elif args.facts:
        print(json.dumps(service.semantic_facts(), indent=2))
    else:
        print(json.dumps(service.timeline(), indent=2))
    return 0


# ---------------------------------------------------------------------------
# export-curves
# ---------------------------------------------------------------------------


def _cmd_export_curves(args: argparse.Namespace) -> int:
    overrides = {
        name: getattr(args, name)
        for name in ("turns", "avg_base_success", "decay_rate", "hybrid_drift")
        if getattr(args, name) is not None
    }
    config = dataclasses.replace(SimConfig(), **overrides) if overrides else SimConfig()
    for path in export_curves(config, args.out):
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
