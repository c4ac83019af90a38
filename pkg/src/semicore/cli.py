"""Command-line entry point: ``semicore <subcommand> ...``.

Exit code 0 means success. Domain errors such as a missing edge or a failed
verification exit with 1; bad flags exit with 2.
"""

import argparse
import csv
import json
import logging
import sys
import tempfile
from pathlib import Path

from . import decomp, maintain, store, verify
from .errors import GraphError, NodeRangeError, StreamError

log = logging.getLogger("semicore")

BENCH_COLUMNS = (
    "graph", "algorithm", "n", "m", "k_max",
    "iterations", "node_computations", "read_ios", "write_ios", "elapsed_seconds",
)  # fmt: skip


class VerifyMismatch(GraphError):
    pass


def _block_size(text):
    try:
        b = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if b < 64 or b & (b - 1):
        raise argparse.ArgumentTypeError(f"block size must be a power of two >= 64, got {b}")
    return b


def _positive_int(text):
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {x}")
    return x


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_store_flags(p, capacity=True):
    p.add_argument("--block-size", type=_block_size, default=store.DEFAULT_BLOCK_SIZE, help="I/O block size in bytes")
    if capacity:
        p.add_argument(
            "--buffer-capacity",
            type=_positive_int,
            default=store.DEFAULT_BUFFER_CAPACITY,
            help="pending directed entries before the update buffer is flushed",
        )


def build_parser():
    parser = argparse.ArgumentParser(prog="semicore", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="edge-list text to a graph directory")
    p.add_argument("--input", required=True, help="edge list path, or - for stdin")
    p.add_argument("--out", required=True, help="graph directory to create")
    _add_store_flags(p)

    p = sub.add_parser("decompose", help="compute core numbers")
    p.add_argument("--graph", required=True)
    p.add_argument("--algo", choices=sorted(decomp.ALGORITHMS), default="semicore-star")
    p.add_argument("--cores", help="write 'id<TAB>core' lines here")
    p.add_argument("--report", help="write the run report (JSON) here")
    p.add_argument("--trace", help="write the per-iteration trace (TSV) here")
    p.add_argument("--trace-figure", help="plot per-iteration changed counts to this image")
    _add_store_flags(p, capacity=False)

    p = sub.add_parser("update", help="apply an edge update stream and maintain cores")
    p.add_argument("--graph", required=True)
    p.add_argument("--ops", required=True, help="file of '+ u v' / '- u v' lines, or - for stdin")
    p.add_argument("--insert-algo", choices=sorted(maintain.INSERT_ALGORITHMS), default="star")
    p.add_argument("--report", help="write per-update reports (JSON) here")
    p.add_argument("--cores", help="write the maintained cores here")
    p.add_argument("--dry-run", action="store_true", help="do not write the updated graph back")
    _add_store_flags(p)

    p = sub.add_parser("verify", help="check cores against the brute-force oracle")
    p.add_argument("--graph", required=True)
    p.add_argument("--cores", help="cores file to check (default: run semicore-star)")

    p = sub.add_parser("bench", help="run algorithms over generated graphs")
    p.add_argument("--out", required=True, help="TSV summary path")
    p.add_argument("--figures", help="directory for PNG figures")
    p.add_argument("--algos", default=",".join(decomp.ALGORITHMS), help="comma-separated algorithm names")
    p.add_argument("--sizes", type=_int_list, default=[200, 1000], help="comma-separated node counts")
    p.add_argument("--avg-degree", type=float, default=8.0, help="target average degree of the ER graphs")
    p.add_argument("--attach", type=_positive_int, default=4, help="edges per new node in preferential graphs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workdir", help="where generated graphs are written (default: a temp dir)")
    _add_store_flags(p, capacity=False)
    return parser


# -- id mapping ---------------------------------------------------------


def load_idmap(graph_dir, n):
    """Original ids in dense order; identity when no idmap.tsv exists."""
    path = Path(graph_dir) / store.IDMAP_FILE
    if not path.exists():
        return list(range(n))
    original = [None] * n
    with open(path) as fh:
        for line in fh:
            orig, dense = line.split("\t")
            original[int(dense)] = int(orig)
    return original


def _to_dense(index, x):
    try:
        return index[x]
    except KeyError:
        raise NodeRangeError(f"unknown node id {x}") from None


def write_cores(path, original, core):
    with open(path, "w", newline="") as fh:
        for ident, c in zip(original, core):
            fh.write(f"{ident}\t{c}\n")


def read_cores(path, original):
    index = {x: i for i, x in enumerate(original)}
    core = [None] * len(original)
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                ident, c = line.split("\t")
                core[_to_dense(index, int(ident))] = int(c)
            except ValueError:
                raise GraphError(f"{path}: line {lineno}: expected 'id<TAB>core'") from None
    missing = sum(1 for c in core if c is None)
    if missing:
        raise GraphError(f"{path}: {missing} nodes have no core value")
    return core


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _open_text(path):
    return sys.stdin if path == "-" else open(path)


# -- subcommands ----------------------------------------------------------


def cmd_convert(args):
    with _open_text(args.input) as fh:
        g = store.build_from_edge_list(fh, args.out, block_size=args.block_size, buffer_capacity=args.buffer_capacity)
    s = g.build_stats
    print(
        f"n={g.n} m={g.m} lines={s.lines} self_loops_skipped={s.skipped_self_loops} "
        f"duplicates_skipped={s.skipped_duplicates}",
        file=sys.stderr,
    )
    g.close()
    return 0


def cmd_decompose(args):
    with store.DiskGraph(args.graph, block_size=args.block_size) as g:
        run = decomp.ALGORITHMS[args.algo]
        wants_trace = (args.trace or args.trace_figure) and args.algo != "imcore"
        if wants_trace:
            (core, report), table = verify.record_trace(run, g)
        else:
            core, report = run(g)
            table = None
        original = load_idmap(args.graph, g.n)
    if args.cores:
        write_cores(args.cores, original, core)
    if args.report:
        _write_json(args.report, report.to_dict())
    if table is not None and args.trace:
        Path(args.trace).write_text(table.to_tsv())
    if table is not None and args.trace_figure:
        from .plotting import plot_changed_counts

        plot_changed_counts({args.algo: table.changed_counts}, args.trace_figure)
    log.info("%s: k_max=%d iterations=%d", args.algo, report.k_max, report.iterations)
    return 0


def cmd_update(args):
    with _open_text(args.ops) as fh:
        ops = maintain.parse_ops(fh)
    with store.DiskGraph(args.graph, block_size=args.block_size, buffer_capacity=args.buffer_capacity) as g:
        original = load_idmap(args.graph, g.n)
        index = {x: i for i, x in enumerate(original)}
        state, _ = decomp.decompose_star(g)
        reports = []
        failure = None
        insert = maintain.INSERT_ALGORITHMS[args.insert_algo]
        for i, (op, a, b) in enumerate(ops):
            try:
                u, v = _to_dense(index, a), _to_dense(index, b)
                if op == "+":
                    reports.append(insert(g, state, u, v))
                else:
                    reports.append(maintain.semi_delete_star(g, state, u, v))
            except GraphError as exc:
                failure = StreamError(i, exc)
                break
        before = g.io.snapshot().write_ios
        if not args.dry_run:
            g.flush()
        flush_writes = g.io.snapshot().write_ios - before
        core = list(state.core)
    if args.report:
        _write_json(
            args.report,
            {
                "insert_algorithm": args.insert_algo,
                "applied": len(reports),
                "updates": [r.to_dict() for r in reports],
                "final_flush_write_ios": flush_writes,
            },
        )
    if args.cores:
        write_cores(args.cores, original, core)
    if failure is not None:
        raise failure
    return 0


def cmd_verify(args):
    with store.DiskGraph(args.graph) as g:
        n = g.n
        edges = list(g.edges())
        original = load_idmap(args.graph, n)
        if args.cores:
            core = read_cores(args.cores, original)
        else:
            core, _ = decomp.semi_core_star(g)
    expected = verify.brute_force_core(edges, n)
    diff = verify.compare_cores(core, expected)
    bad_locality = verify.locality_violations(verify.adjacency(edges, n), core)
    for v, got, want in diff[:20]:
        print(f"node {original[v]}: core {got}, expected {want}", file=sys.stderr)
    if diff or bad_locality:
        raise VerifyMismatch(f"{len(diff)} core mismatches, {len(bad_locality)} locality violations")
    print(f"ok: n={n} m={len(edges)} k_max={max(core, default=0)}", file=sys.stderr)
    return 0


def bench_rows(algos, sizes, avg_degree, attach, seed, workdir, block_size=store.DEFAULT_BLOCK_SIZE):
    """Run every algorithm over ER and preferential graphs of each size.

    Returns (rows, traces): bench rows in BENCH_COLUMNS order and, per
    graph, the per-iteration changed counts of each traceable algorithm.
    """
    rows, traces = [], {}
    for n in sizes:
        specs = [
            (f"er-n{n}", "er", min(1.0, avg_degree / max(n - 1, 1))),
            (f"pa-n{n}", "preferential", attach),
        ]
        for name, kind, param in specs:
            edges = verify.gen_random_graph(kind, n, param, seed)
            gdir = Path(workdir) / name
            with store.build_from_edges(edges, gdir, n=n, block_size=block_size) as g:
                for algo in algos:
                    run = decomp.ALGORITHMS[algo]
                    g.io.forget()
                    if algo == "imcore":
                        _, report = run(g)
                    else:
                        (_, report), table = verify.record_trace(run, g)
                        traces.setdefault(name, {})[algo] = table.changed_counts
                    row = {"graph": name, "n": g.n, "m": g.m, **report.to_dict()}
                    rows.append({k: row[k] for k in BENCH_COLUMNS})
    return rows, traces


def cmd_bench(args):
    algos = [a for a in args.algos.split(",") if a]
    unknown = [a for a in algos if a not in decomp.ALGORITHMS]
    if unknown:
        print(f"semicore bench: unknown algorithm(s): {', '.join(unknown)}", file=sys.stderr)
        return 2
    with tempfile.TemporaryDirectory() as tmp:
        workdir = args.workdir or tmp
        rows, traces = bench_rows(algos, args.sizes, args.avg_degree, args.attach, args.seed, workdir, args.block_size)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS, delimiter="\t", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({**r, "elapsed_seconds": f"{r['elapsed_seconds']:.6f}"})
    if args.figures:
        from .plotting import plot_changed_counts, plot_computations

        out = Path(args.figures)
        out.mkdir(parents=True, exist_ok=True)
        plot_computations(rows, out / "node_computations.png")
        for name, series in traces.items():
            plot_changed_counts(series, out / f"changed_{name}.png")
    return 0


COMMANDS = {
    "convert": cmd_convert,
    "decompose": cmd_decompose,
    "update": cmd_update,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (GraphError, OSError) as exc:
        print(f"semicore {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
