"""Independent checks for core numbers, plus the seeded inputs that feed them.

Nothing here imports the decomposition code: the oracle peels k-cores
straight from the definition so it can be used to check every algorithm.
"""

import random
from dataclasses import dataclass, field

# Nine-node example graph: a 3-core {0,1,2,3}, a 2-core shell {4,5,6,7}, leaf 8.
G9_EDGES = (
    (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
    (2, 4), (3, 4), (3, 5), (3, 6), (4, 5), (5, 6),
    (5, 7), (5, 8), (6, 7),
)  # fmt: skip
G9_CORES = (3, 3, 3, 3, 2, 2, 2, 2, 1)


def sample_graph_g9():
    return list(G9_EDGES)


def g9_text():
    return "".join(f"{u} {v}\n" for u, v in G9_EDGES)


def adjacency(edges, n=None):
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def brute_force_core(edges, n=None):
    """Core numbers by computing the k-core for k = 1, 2, ... directly.

    For each k, nodes of degree < k inside the surviving set are deleted
    until none remain; survivors belong to the k-core.
    """
    adj = adjacency(edges, n)
    n = len(adj)
    core = [0] * n
    alive = set(range(n))
    k = 0
    while alive:
        k += 1
        deg = {v: sum(1 for u in adj[v] if u in alive) for v in alive}
        doomed = [v for v in alive if deg[v] < k]
        while doomed:
            v = doomed.pop()
            if v not in alive:
                continue
            alive.discard(v)
            for u in adj[v]:
                if u in alive:
                    deg[u] -= 1
                    if deg[u] == k - 1:
                        doomed.append(u)
        for v in alive:
            core[v] = k
    return core


def locality_violations(adj, core):
    """Nodes whose value is not the h-index of their neighbors' values."""
    bad = []
    for v, nbrs in enumerate(adj):
        vals = sorted((core[u] for u in nbrs), reverse=True)
        h = 0
        while h < len(vals) and vals[h] >= h + 1:
            h += 1
        if core[v] != h:
            bad.append(v)
    return bad


def cnt_mismatches(adj, core, cnt):
    return [
        v for v, nbrs in enumerate(adj)
        if cnt[v] != sum(1 for u in nbrs if core[u] >= core[v])
    ]  # fmt: skip


def compare_cores(a, b):
    """List of (node, a_value, b_value) where the sequences differ."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return [(i, x, y) for i, (x, y) in enumerate(zip(a, b)) if x != y]


GRAPH_KINDS = ("er", "preferential")


def gen_random_graph(kind, n, param, seed):
    """Deterministic simple random graph as a sorted list of (u, v), u < v.

    ``er``: each pair present independently with probability ``param``.
    ``preferential``: each new node attaches to ``param`` distinct earlier
    nodes chosen proportionally to degree.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    if kind == "er":
        p = float(param)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"edge probability {param} outside [0, 1]")
        return [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    if kind in ("preferential", "pa"):
        k = int(param)
        if k < 1 or k != param:
            raise ValueError(f"edges per node must be a positive integer, got {param}")
        edges = set()
        repeated = []
        targets = list(range(min(k, n)))
        for source in range(k, n):
            for t in targets:
                edges.add((t, source))
            repeated.extend(targets)
            repeated.extend([source] * len(targets))
            chosen = set()
            while len(chosen) < k:
                chosen.add(rng.choice(repeated))
            targets = sorted(chosen)
        return sorted(edges)
    raise ValueError(f"unknown graph kind {kind!r}")


@dataclass
class TraceTable:
    """Per-pass snapshots of the core bounds.

    Row 0 is the starting vector (degrees for a decomposition, the old
    cores for an update). ``recomputed[i]`` holds the nodes whose adjacency
    was loaded and recomputed in pass i (empty for row 0).
    """

    labels: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    recomputed: list = field(default_factory=list)
    computations: list = field(default_factory=list)
    statuses: list = field(default_factory=list)

    @property
    def changed_counts(self):
        return [
            sum(1 for a, b in zip(prev, cur) if a != b)
            for prev, cur in zip(self.rows, self.rows[1:])
        ]  # fmt: skip

    @property
    def node_computations(self):
        return sum(len(c) for c in self.computations)

    def to_tsv(self):
        lines = ["iteration\tnode\tcore\trecomputed"]
        for label, row, rec in zip(self.labels, self.rows, self.recomputed):
            for v, c in enumerate(row):
                lines.append(f"{label}\t{v}\t{c}\t{int(v in rec)}")
        return "\n".join(lines) + "\n"


class TraceRecorder:
    """Trace hook accepted by every decomposition and maintenance routine."""

    def __init__(self):
        self.table = TraceTable()

    def start(self, label, core):
        t = self.table
        t.labels.append(label)
        t.rows.append(list(core))
        t.recomputed.append(set())
        t.computations.append([])

    def begin_pass(self, label):
        t = self.table
        t.labels.append(str(label))
        t.recomputed.append(set())
        t.computations.append([])

    def computed(self, v, c_old, c_new):
        self.table.recomputed[-1].add(v)
        self.table.computations[-1].append((v, c_old, c_new))

    def statuses(self, status):
        self.table.statuses.append(list(status))

    def end_pass(self, core):
        self.table.rows.append(list(core))


def record_trace(run, *args, **kwargs):
    """Call ``run(*args, trace=recorder, **kwargs)``; returns (result, TraceTable)."""
    recorder = TraceRecorder()
    result = run(*args, trace=recorder, **kwargs)
    return result, recorder.table
