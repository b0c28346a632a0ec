"""Command-line driver.

Exit codes: search gives 10 Sat, 20 Unsat, 30 Unknown; verify gives 0 when
every check passes and 1 otherwise; any usage, parse or internal error gives 2.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from .decoder import DecodeError, witness_from_document
from .dot import to_dot
from .encoder import EncodingError, encode_problem
from .model import (VARIANTS, DropSemantics, InhibitionReading, SearchConfig, VtsError,
                    default_molecules)
from .search import Outcome, VerificationError, min_connectivity, run_search
from .solver import Status, export_dimacs
from .verifier import verify_vts, verify_witness

EXIT_SAT, EXIT_UNSAT, EXIT_UNKNOWN, EXIT_ERROR = 10, 20, 30, 2
STATUS_EXIT = {Status.SAT: EXIT_SAT, Status.UNSAT: EXIT_UNSAT, Status.UNKNOWN: EXIT_UNKNOWN}


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


def _add_problem_flags(p):
    p.add_argument("--variant", required=True, choices=sorted(VARIANTS))
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--molecules", type=int, help="default 2*nodes (2*nodes+1 for two nodes)")
    p.add_argument("--max-parallel", type=int, default=2)
    p.add_argument("--drop-semantics", choices=[m.value for m in DropSemantics],
                   default=DropSemantics.UNDIRECTED.value)
    p.add_argument("--inhibition", choices=[m.value for m in InhibitionReading],
                   default=InhibitionReading.MUTUAL.value,
                   help="reading of the pairing-inhibition edge rule (variants E, F)")
    p.add_argument("--allow-disconnected", action="store_true",
                   help="do not require the graph itself to be connected")
    p.add_argument("--no-symmetry-breaking", action="store_true",
                   help="allow every node and molecule ordering (slower)")
    p.add_argument("--timeout", type=float, help="solver time limit per call, seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", help="pysat solver name, several joined by '+' to race them, "
                   "or 'cdcl' (default kissat404+glucose4)")
    p.add_argument("--format", choices=["text", "machine"], default="text")


def _config(args, drop: int, query: bool) -> SearchConfig:
    mu = args.molecules if args.molecules is not None else default_molecules(args.nodes)
    return SearchConfig(args.nodes, mu, args.max_parallel, drop, args.variant,
                        args.drop_semantics, query, args.timeout,
                        require_connected=not args.allow_disconnected,
                        inhibition=args.inhibition,
                        symmetry_breaking=not args.no_symmetry_breaking)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vtsearch", description="Search for vesicle traffic systems with SAT.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search", help="one search; exit 10 Sat, 20 Unsat, 30 Unknown")
    _add_problem_flags(p)
    p.add_argument("--drop", type=int, default=1, help="edges to drop (default 1)")
    p.add_argument("--no-connectivity-query", action="store_true",
                   help="only ask whether a valid VTS exists")
    p.add_argument("--out", type=Path, help="write the witness document here")
    p.add_argument("--dot", type=Path, help="write a Graphviz rendering here")
    p.add_argument("--dimacs", type=Path, help="write the CNF here")

    p = sub.add_parser("min-connectivity", help="sweep drop counts for the smallest that disconnects")
    _add_problem_flags(p)
    p.add_argument("--max-drop", type=int, help="default nodes^2 * max_parallel")
    p.add_argument("--out", type=Path, help="write the witness of the first Sat step here")
    p.add_argument("--dot", type=Path)

    p = sub.add_parser("verify", help="check a VTS or witness document; exit 0 iff all pass")
    p.add_argument("path", type=Path)
    p.add_argument("--variant", required=True, choices=sorted(VARIANTS))
    p.add_argument("--drop-semantics", choices=[m.value for m in DropSemantics],
                   default=DropSemantics.UNDIRECTED.value)
    p.add_argument("--inhibition", choices=[m.value for m in InhibitionReading],
                   default=InhibitionReading.MUTUAL.value)
    p.add_argument("--allow-disconnected", action="store_true")
    p.add_argument("--format", choices=["text", "machine"], default="text")

    p = sub.add_parser("dot", help="render a VTS or witness document as Graphviz")
    p.add_argument("path", type=Path)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("bench", help="run-time table as CSV")
    p.add_argument("--variants", default="A,C,D,F")
    p.add_argument("--sizes", default="2-6", help="range lo-hi or a single size")
    p.add_argument("--drop", action="append", default=[], metavar="V=N",
                   help="override the drop count for a variant, e.g. --drop D=1")
    p.add_argument("--timeout", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend")
    p.add_argument("--drop-semantics", choices=[m.value for m in DropSemantics],
                   default=DropSemantics.UNDIRECTED.value)
    p.add_argument("--out", type=Path)
    return parser


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _emit(args, doc: dict, text: str) -> None:
    if args.format == "machine":
        print(json.dumps(doc, sort_keys=True))
    else:
        sys.stdout.write(text)


def cmd_search(args) -> int:
    query = not args.no_connectivity_query
    cfg = _config(args, args.drop if query else 0, query)
    out = run_search(cfg, seed=args.seed, backend=args.backend)
    if args.dimacs:
        # the whole query as one formula, not the per-cut pieces it was solved in
        enc = encode_problem(cfg)
        export_dimacs(enc.cnf, args.dimacs, enc.dimacs_header())
    doc = {"status": out.status.value, "seconds": round(out.seconds, 3),
           "variant": cfg.variant.name, "nodes": cfg.num_nodes, "molecules": cfg.num_molecules,
           "max_parallel": cfg.max_parallel, "drop": cfg.drop if query else None}
    text = f"{out.status.value} ({out.seconds:.2f} s)\n"
    if out.witness is not None:
        w = out.witness
        doc["connectivity"] = out.report.connectivity
        doc["dropped"] = [[s.src, s.dst, s.slot] for s in sorted(w.dropped)]
        if args.out:
            args.out.write_text(w.to_json())
        if args.dot:
            args.dot.write_text(to_dot(w.vts, w.dropped))
        text += f"edges: {len(w.vts.edges)}  edge connectivity: {out.report.connectivity}\n"
        if w.dropped:
            text += "dropped: " + " ".join(str(s) for s in sorted(w.dropped)) + "\n"
        if not args.out:
            text += w.to_json()
    _emit(args, doc, text)
    return STATUS_EXIT[out.status]


def cmd_min_connectivity(args) -> int:
    cfg = _config(args, 0, False)

    def show(step):
        if args.format == "text":
            label = "base" if step.drop == 0 else f"drop {step.drop}"
            print(f"{label}: {step.status.value} ({step.seconds:.2f} s)", flush=True)

    res = min_connectivity(cfg, args.max_drop, seed=args.seed, backend=args.backend, on_step=show)
    if res.witness is not None:
        if args.out:
            args.out.write_text(res.witness.to_json())
        if args.dot:
            args.dot.write_text(to_dot(res.witness.vts, res.witness.dropped))
    _emit(args, res.to_dict(), f"{res}{'  ' + res.reason if res.reason else ''}\n")
    return EXIT_UNKNOWN if res.outcome is Outcome.INCONCLUSIVE else 0


def cmd_verify(args) -> int:
    doc = json.loads(args.path.read_text())
    if not isinstance(doc, dict):
        raise VtsError("document must be a JSON object")
    w = witness_from_document(doc)
    if "witness" in doc:
        v = w.vts
        cfg = SearchConfig(v.num_nodes, v.num_molecules, max(v.max_slot + 1, 1), len(w.dropped),
                           args.variant, args.drop_semantics, True,
                           require_connected=not args.allow_disconnected,
                           inhibition=args.inhibition)
        report = verify_witness(w, cfg)
    else:
        report = verify_vts(w.vts, args.variant, not args.allow_disconnected, args.inhibition)
    _emit(args, report.to_dict(), report.render())
    return 0 if report.passed else 1


def cmd_dot(args) -> int:
    w = witness_from_document(json.loads(args.path.read_text()))
    _write(args.out, to_dot(w.vts, w.dropped))
    return 0


def _parse_sizes(text: str) -> range:
    lo, _, hi = text.partition("-")
    lo = int(lo)
    return range(lo, int(hi or lo) + 1)


def cmd_bench(args) -> int:
    drops = {}
    for item in args.drop:
        var, _, n = item.partition("=")
        drops[var] = int(n)
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if v not in VARIANTS:
            raise CliError(f"unknown variant {v!r}")

    def show(row):
        print(f"{row.variant} nodes={row.nodes} drop={row.drop}: {row.status} "
              f"({row.wall_seconds:.2f} s)", file=sys.stderr, flush=True)

    rows = bench_mod.bench(variants, _parse_sizes(args.sizes), drops, args.timeout, args.seed,
                           args.backend, on_row=show, drop_semantics=args.drop_semantics)
    _write(args.out, bench_mod.to_csv(rows, drops))
    return 0


COMMANDS = {"search": cmd_search, "min-connectivity": cmd_min_connectivity,
            "verify": cmd_verify, "dot": cmd_dot, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"vtsearch: error: {exc}", file=sys.stderr)
    except (VtsError, EncodingError, ValueError, OSError) as exc:
        print(f"vtsearch: error: {exc}", file=sys.stderr)
    except VerificationError as exc:
        print(f"vtsearch: internal error: {exc}\n{exc.report.render()}", file=sys.stderr)
    except DecodeError as exc:
        print(f"vtsearch: internal error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
