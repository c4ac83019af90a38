"""Incremental core maintenance under single-edge updates.

All functions take a :class:`~semicore.decomp.CoreState` holding converged
``core`` and ``cnt`` arrays for the current graph and leave it converged for
the updated graph. An update changes core numbers by at most one, and only
for nodes sharing the lower endpoint's core value.
"""

import time
from dataclasses import dataclass, field
from enum import IntEnum

from .decomp import NO_TRACE, compute_cnt, converge_star, update_range
from .errors import GraphError, InputError, StreamError


class NodeStatus(IntEnum):
    UNTOUCHED = 0
    PENDING = 1
    CONFIRMED = 2
    REJECTED = 3


@dataclass
class MaintainReport:
    operation: str
    algorithm: str
    u: int
    v: int
    iterations: int = 0
    node_computations: int = 0
    nodes_changed: int = 0
    read_ios: int = 0
    write_ios: int = 0
    elapsed_seconds: float = 0.0
    k_max: int = 0
    changed: list = field(default_factory=list, repr=False)
    candidates: list = field(default_factory=list, repr=False)
    confirmed: list = field(default_factory=list, repr=False)
    rejected: list = field(default_factory=list, repr=False)

    KEYS = (
        "operation",
        "algorithm",
        "iterations",
        "node_computations",
        "nodes_changed",
        "read_ios",
        "write_ios",
        "elapsed_seconds",
        "k_max",
    )

    def to_dict(self):
        return {k: getattr(self, k) for k in self.KEYS}


class _Maintenance:
    """Snapshots cores and I/O counters around one update."""

    def __init__(self, g, state, report):
        self.g, self.state, self.report = g, state, report

    def __enter__(self):
        self._before = self.state.core[:]
        self._io = self.g.io.snapshot()
        self._t0 = time.perf_counter()
        return self.report

    def __exit__(self, exc_type, *exc):
        if exc_type is not None:
            return
        r = self.report
        core = self.state.core
        r.changed = [w for w in range(len(core)) if core[w] != self._before[w]]
        r.nodes_changed = len(r.changed)
        r.k_max = max(core, default=0)
        io = self.g.io.snapshot()
        r.read_ios = io.read_ios - self._io.read_ios
        r.write_ios = io.write_ios - self._io.write_ios
        r.elapsed_seconds = time.perf_counter() - self._t0


def semi_delete_star(g, state, u, v, trace=NO_TRACE):
    """Delete edge (u, v) and restore converged cores and counts."""
    report = MaintainReport("delete", "semidelete-star", u, v)
    with _Maintenance(g, state, report):
        g.apply_edge_update("delete", u, v)
        core, cnt = state.core, state.cnt
        trace.start("old", core)
        if core[u] < core[v]:
            cnt[u] -= 1
            state.v_min = state.v_max = u
        elif core[v] < core[u]:
            cnt[v] -= 1
            state.v_min = state.v_max = v
        else:
            cnt[u] -= 1
            cnt[v] -= 1
            state.v_min, state.v_max = min(u, v), max(u, v)
        report.iterations, report.node_computations = converge_star(g, state, trace)
    return report


def _raise_endpoint_counts(g, state, u, v):
    """Insert (u, v) and bump counts; returns (lower endpoint, c_old)."""
    g.apply_edge_update("insert", u, v)
    core, cnt = state.core, state.cnt
    if core[u] > core[v]:
        u, v = v, u
    cnt[u] += 1
    if core[v] == core[u]:
        cnt[v] += 1
    return u, core[u]


def semi_insert(g, state, u, v, trace=NO_TRACE):
    """Two-phase insertion.

    Phase one raises every node reachable from the lower endpoint through
    nodes of core ``c_old`` to ``c_old + 1``; phase two lowers the
    over-estimates with the count-guarded convergence loop.
    """
    report = MaintainReport("insert", "semiinsert", u, v)
    with _Maintenance(g, state, report):
        u, c_old = _raise_endpoint_counts(g, state, u, v)
        core, cnt = state.core, state.cnt
        active = bytearray(state.n)
        active[u] = 1
        trace.start("old", core)
        state.v_min = state.v_max = u
        state.update = True
        passes = 0
        while state.update:
            state.begin_pass()
            passes += 1
            trace.begin_pass(f"1.{passes}")
            lo = x = state.v_min
            while x <= state.v_max:
                if active[x] and core[x] == c_old:
                    core[x] += 1
                    nbrs = g.neighbors(x)
                    report.node_computations += 1
                    trace.computed(x, c_old, c_old + 1)
                    cnt[x] = compute_cnt([core[w] for w in nbrs], c_old + 1)
                    for w in nbrs:
                        if core[w] == c_old + 1:
                            cnt[w] += 1
                    for w in nbrs:
                        if core[w] == c_old and not active[w]:
                            active[w] = 1
                            update_range(state, w, x)
                x += 1
            g.scan_node_table(lo, state.v_max)
            state.end_pass()
            trace.end_pass(core)

        report.candidates = [w for w in range(state.n) if active[w]]
        state.v_min = min(report.candidates)
        state.v_max = max(report.candidates)
        phase_two = _PhaseLabel(trace, "2.")
        iterations, computations = converge_star(g, state, phase_two)
        report.iterations = passes + iterations
        report.node_computations += computations
    return report


class _PhaseLabel:
    """Forwards trace events, prefixing pass labels (``2.1``, ``2.2`` ...)."""

    def __init__(self, inner, prefix):
        self.inner, self.prefix = inner, prefix

    def start(self, label, core):
        self.inner.start(label, core)

    def begin_pass(self, label):
        self.inner.begin_pass(f"{self.prefix}{label}")

    def computed(self, v, c_old, c_new):
        self.inner.computed(v, c_old, c_new)

    def end_pass(self, core):
        self.inner.end_pass(core)


def compute_cnt_star(state, statuses, neighbor_ids, c_old):
    """Optimistic count of neighbors that can support core ``c_old + 1``.

    A neighbor counts if its core already exceeds ``c_old``, or if it sits at
    ``c_old`` with count at least ``c_old + 1`` and has not been rejected.
    """
    core, cnt = state.core, state.cnt
    s = 0
    for w in neighbor_ids:
        cw = core[w]
        if cw > c_old or (cw == c_old and cnt[w] > c_old and statuses[w] != NodeStatus.REJECTED):
            s += 1
    return s


def semi_insert_star(g, state, u, v, trace=NO_TRACE):
    """One-phase insertion driven by per-node status.

    Candidates move Untouched -> Pending -> Confirmed, and a Confirmed node
    whose optimistic count falls below ``c_old + 1`` is Rejected and reverts.
    While a node is Confirmed its ``cnt`` holds the optimistic count, which
    already includes every non-rejected candidate neighbor; counts of
    Confirmed neighbors are therefore left alone when a node is confirmed,
    and lowered once when it is rejected.
    """
    report = MaintainReport("insert", "semiinsert-star", u, v)
    with _Maintenance(g, state, report):
        u, c_old = _raise_endpoint_counts(g, state, u, v)
        core, cnt = state.core, state.cnt
        target = c_old + 1
        status = bytearray(state.n)
        status[u] = NodeStatus.PENDING
        trace.start("old", core)
        trace_status = getattr(trace, "statuses", None)
        state.v_min = state.v_max = u
        state.update = True
        while state.update:
            state.begin_pass()
            report.iterations += 1
            trace.begin_pass(report.iterations)
            lo = x = state.v_min
            while x <= state.v_max:
                nbrs = None
                if status[x] == NodeStatus.PENDING:
                    nbrs = g.neighbors(x)
                    report.node_computations += 1
                    trace.computed(x, c_old, target)
                    cnt[x] = compute_cnt_star(state, status, nbrs, c_old)
                    status[x] = NodeStatus.CONFIRMED
                    core[x] = target
                    for w in nbrs:
                        if core[w] == target and status[w] != NodeStatus.CONFIRMED:
                            cnt[w] += 1
                    if cnt[x] >= target:
                        for w in nbrs:
                            if core[w] == c_old and cnt[w] >= target and status[w] == NodeStatus.UNTOUCHED:
                                status[w] = NodeStatus.PENDING
                                update_range(state, w, x)
                if status[x] == NodeStatus.CONFIRMED and cnt[x] < target:
                    if nbrs is None:
                        nbrs = g.neighbors(x)
                        report.node_computations += 1
                        trace.computed(x, target, c_old)
                    cnt[x] = compute_cnt([core[w] for w in nbrs], c_old)
                    status[x] = NodeStatus.REJECTED
                    core[x] = c_old
                    for w in nbrs:
                        if core[w] == target:
                            cnt[w] -= 1
                            if status[w] == NodeStatus.CONFIRMED and cnt[w] < target:
                                update_range(state, w, x)
                x += 1
            g.scan_node_table(lo, state.v_max)
            state.end_pass()
            if trace_status is not None:
                trace_status(status)
            trace.end_pass(core)
        report.confirmed = [w for w in range(state.n) if status[w] == NodeStatus.CONFIRMED]
        report.rejected = [w for w in range(state.n) if status[w] == NodeStatus.REJECTED]
        report.candidates = [w for w in range(state.n) if status[w] != NodeStatus.UNTOUCHED]
        assert NodeStatus.PENDING not in status
    return report


INSERT_ALGORITHMS = {
    "two-phase": semi_insert,
    "star": semi_insert_star,
}


def parse_ops(lines):
    """Parse "+ u v" / "- u v" lines into (op, u, v) tuples."""
    ops = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("+", "-"):
            raise InputError(f"expected '+ u v' or '- u v', got {line!r}", line=lineno)
        try:
            ops.append((parts[0], int(parts[1]), int(parts[2])))
        except ValueError:
            raise InputError(f"non-integer node id in {line!r}", line=lineno) from None
    return ops


def apply_stream(g, state, ops, algo="star"):
    """Apply (op, u, v) updates in order; returns one report per op.

    The first invalid op raises :class:`StreamError` carrying its index;
    the ops before it stay applied.
    """
    insert = INSERT_ALGORITHMS[algo] if isinstance(algo, str) else algo
    reports = []
    for i, (op, u, v) in enumerate(ops):
        try:
            if op in ("+", "insert"):
                reports.append(insert(g, state, u, v))
            elif op in ("-", "delete"):
                reports.append(semi_delete_star(g, state, u, v))
            else:
                raise InputError(f"unknown op {op!r}")
        except GraphError as exc:
            raise StreamError(i, exc) from exc
    return reports
