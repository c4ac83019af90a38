"""Semi-external core decomposition.

Every algorithm keeps a per-node upper bound ``core[v]`` (initially the degree)
and lowers it with :func:`local_core` until no bound changes. Only one
adjacency list is held in memory at a time; the rest of the state is a few
fixed-width arrays of length n.
"""

import time
from array import array
from dataclasses import dataclass, field

__all__ = [
    "CoreState",
    "RunReport",
    "local_core",
    "compute_cnt",
    "update_nbr_cnt",
    "update_range",
    "semi_core",
    "semi_core_plus",
    "semi_core_star",
    "decompose_star",
    "converge_star",
    "im_core",
    "ALGORITHMS",
]


@dataclass
class CoreState:
    """Per-node working state plus the scan window of the current pass.

    ``v_min``/``v_max`` bound the current scan (``v_max`` may grow during a
    pass); ``next_min``/``next_max`` collect nodes deferred to the next pass.
    """

    core: array
    cnt: array
    active: bytearray
    v_min: int = 0
    v_max: int = -1
    next_min: int = 0
    next_max: int = -1
    update: bool = False

    @classmethod
    def for_graph(cls, g):
        n = g.n
        return cls(core=g.degrees(), cnt=array("i", bytes(4 * n)), active=bytearray(n), v_max=n - 1)

    @property
    def n(self):
        return len(self.core)

    def begin_pass(self):
        self.update = False
        self.next_min = self.n - 1
        self.next_max = 0

    def end_pass(self):
        self.v_min, self.v_max = self.next_min, self.next_max


@dataclass
class RunReport:
    algorithm: str
    iterations: int = 0
    node_computations: int = 0
    read_ios: int = 0
    write_ios: int = 0
    elapsed_seconds: float = 0.0
    k_max: int = 0

    KEYS = ("algorithm", "iterations", "node_computations", "read_ios", "write_ios", "elapsed_seconds", "k_max")

    def to_dict(self):
        return {k: getattr(self, k) for k in self.KEYS}


class _NoTrace:
    def start(self, label, core):
        pass

    def begin_pass(self, label):
        pass

    def computed(self, v, c_old, c_new):
        pass

    def end_pass(self, core):
        pass


NO_TRACE = _NoTrace()


class _Run:
    """Times a run and records the I/O counter deltas into a report."""

    def __init__(self, g, report):
        self.g = g
        self.report = report

    def __enter__(self):
        self._io = self.g.io.snapshot()
        self._t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        io = self.g.io.snapshot()
        self.report.elapsed_seconds = time.perf_counter() - self._t0
        self.report.read_ios = io.read_ios - self._io.read_ios
        self.report.write_ios = io.write_ios - self._io.write_ios


def local_core(c_old, neighbor_cores):
    """Largest k <= c_old such that at least k neighbors have core >= k.

    Neighbor values are clamped to ``c_old`` and bucketed, then the buckets
    are summed from the top down. Linear in the number of neighbors plus
    ``c_old``.
    """
    if c_old <= 0:
        return 0
    num = [0] * (c_old + 1)
    for c in neighbor_cores:
        num[c if c < c_old else c_old] += 1
    s = 0
    for k in range(c_old, 0, -1):
        s += num[k]
        if s >= k:
            return k
    return 0


def compute_cnt(neighbor_cores, core_v):
    """Number of neighbors whose core is at least ``core_v``."""
    return sum(1 for c in neighbor_cores if c >= core_v)


def update_nbr_cnt(state, nbrs, c_old, c_new):
    """Fix neighbor counts after a node's core dropped from c_old to c_new."""
    core, cnt = state.core, state.cnt
    for u in nbrs:
        if c_new < core[u] <= c_old:
            cnt[u] -= 1


def update_range(state, u, v):
    """Schedule neighbor ``u`` of the node ``v`` being processed.

    Nodes after ``v`` are reachable in the current pass by stretching
    ``v_max``; nodes before ``v`` are deferred to the next pass.
    """
    if u > state.v_max:
        state.v_max = u
    if u < v:
        state.update = True
        if u < state.next_min:
            state.next_min = u
        if u > state.next_max:
            state.next_max = u


def _k_max(core):
    return max(core, default=0)


def semi_core(g, trace=NO_TRACE):
    """Full-scan iteration: recompute every node each pass until nothing changes."""
    report = RunReport("semicore")
    with _Run(g, report):
        core = g.degrees()
        n = len(core)
        trace.start("init", core)
        update = True
        while update:
            update = False
            report.iterations += 1
            trace.begin_pass(report.iterations)
            for v in range(n):
                nbrs = g.neighbors(v)
                c_old = core[v]
                c_new = core[v] = local_core(c_old, [core[u] for u in nbrs])
                report.node_computations += 1
                trace.computed(v, c_old, c_new)
                if c_new != c_old:
                    update = True
            g.scan_node_table(0, n - 1)
            trace.end_pass(core)
        report.k_max = _k_max(core)
    return list(core), report


def semi_core_plus(g, trace=NO_TRACE):
    """Recompute only nodes with a neighbor whose bound dropped."""
    report = RunReport("semicore-plus")
    with _Run(g, report):
        state = CoreState.for_graph(g)
        core, active = state.core, state.active
        active[:] = b"\x01" * state.n
        trace.start("init", core)
        state.update = True
        while state.update:
            state.begin_pass()
            report.iterations += 1
            trace.begin_pass(report.iterations)
            lo = v = state.v_min
            while v <= state.v_max:
                if active[v]:
                    active[v] = 0
                    nbrs = g.neighbors(v)
                    c_old = core[v]
                    c_new = core[v] = local_core(c_old, [core[u] for u in nbrs])
                    report.node_computations += 1
                    trace.computed(v, c_old, c_new)
                    if c_new != c_old:
                        for u in nbrs:
                            active[u] = 1
                            update_range(state, u, v)
                v += 1
            g.scan_node_table(lo, state.v_max)
            state.end_pass()
            trace.end_pass(core)
        report.k_max = _k_max(core)
    return list(core), report


def converge_star(g, state, trace=NO_TRACE):
    """The count-guarded convergence loop, starting from ``state``'s window.

    Requires ``core`` to be an upper bound of the true core numbers and every
    node outside the window to satisfy ``cnt >= core``. Returns
    (iterations, node_computations).
    """
    core, cnt = state.core, state.cnt
    iterations = computations = 0
    state.update = True
    while state.update:
        state.begin_pass()
        iterations += 1
        trace.begin_pass(iterations)
        lo = v = state.v_min
        while v <= state.v_max:
            if cnt[v] < core[v]:
                nbrs = g.neighbors(v)
                nbr_cores = [core[u] for u in nbrs]
                c_old = core[v]
                c_new = core[v] = local_core(c_old, nbr_cores)
                computations += 1
                trace.computed(v, c_old, c_new)
                cnt[v] = compute_cnt(nbr_cores, c_new)
                update_nbr_cnt(state, nbrs, c_old, c_new)
                for u in nbrs:
                    if cnt[u] < core[u]:
                        update_range(state, u, v)
            v += 1
        g.scan_node_table(lo, state.v_max)
        state.end_pass()
        trace.end_pass(core)
    return iterations, computations


def decompose_star(g, trace=NO_TRACE):
    """Run the count-guarded decomposition; returns (CoreState, RunReport).

    The returned state carries converged ``core`` and ``cnt`` arrays and is
    the starting point for incremental maintenance.
    """
    report = RunReport("semicore-star")
    with _Run(g, report):
        state = CoreState.for_graph(g)
        trace.start("init", state.core)
        state.v_min, state.v_max = 0, state.n - 1
        report.iterations, report.node_computations = converge_star(g, state, trace)
        report.k_max = _k_max(state.core)
    return state, report


def semi_core_star(g, trace=NO_TRACE):
    """Recompute a node only when its count shows the bound must drop."""
    state, report = decompose_star(g, trace)
    return list(state.core), report


def im_core(g):
    """In-memory peeling with bin sort (loads the whole effective graph).

    Reported ``node_computations`` is n: each node is peeled exactly once.
    """
    report = RunReport("imcore", iterations=1)
    with _Run(g, report):
        n = g.n
        adj = [g.neighbors(v) for v in range(n)]
        deg = [len(a) for a in adj]
        md = max(deg, default=0)
        bins = [0] * (md + 1)
        for d in deg:
            bins[d] += 1
        start = 0
        for d in range(md + 1):
            bins[d], start = start, start + bins[d]
        pos = [0] * n
        vert = [0] * n
        for v in range(n):
            pos[v] = bins[deg[v]]
            vert[pos[v]] = v
            bins[deg[v]] += 1
        for d in range(md, 0, -1):
            bins[d] = bins[d - 1]
        if md >= 0 and bins:
            bins[0] = 0
        for i in range(n):
            v = vert[i]
            for u in adj[v]:
                if deg[u] > deg[v]:
                    du, pu = deg[u], pos[u]
                    pw = bins[du]
                    w = vert[pw]
                    if u != w:
                        pos[u], pos[w] = pw, pu
                        vert[pu], vert[pw] = w, u
                    bins[du] += 1
                    deg[u] -= 1
        report.node_computations = n
        report.k_max = _k_max(deg)
    return deg, report


ALGORITHMS = {
    "semicore": semi_core,
    "semicore-plus": semi_core_plus,
    "semicore-star": semi_core_star,
    "imcore": im_core,
}
