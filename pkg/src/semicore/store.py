"""On-disk graph storage with an edge-update buffer and block-level I/O accounting.

A graph directory holds four files, all little-endian:

    meta.bin    32-byte header: b"SCGR", version u32, n u64, m u64, id_width u8, 7 zero bytes
    nodes.bin   n records of (offset u64, degree u32), offset counted in neighbor slots
    edges.bin   2m u32 neighbor ids, each node's list sorted ascending
    idmap.tsv   "original_id<TAB>dense_id" per node (written by the converter only)

The node table is loaded into memory when a graph is opened (it is O(n));
adjacency lists are read from ``edges.bin`` one node at a time.
"""

import logging
import os
import struct
import sys
from array import array
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateEdgeError,
    InputError,
    MissingEdgeError,
    NodeRangeError,
    SelfLoopError,
    StorageError,
)

log = logging.getLogger(__name__)

MAGIC = b"SCGR"
VERSION = 1
ID_WIDTH = 4
HEADER = struct.Struct("<4sIQQB7x")
NODE_RECORD = np.dtype([("offset", "<u8"), ("degree", "<u4")])
SLOT_BYTES = ID_WIDTH

DEFAULT_BLOCK_SIZE = 4096
DEFAULT_BUFFER_CAPACITY = 1 << 20

META_FILE = "meta.bin"
NODES_FILE = "nodes.bin"
EDGES_FILE = "edges.bin"
IDMAP_FILE = "idmap.tsv"

_BIG_ENDIAN = sys.byteorder == "big"


@dataclass(frozen=True)
class IoStats:
    block_size: int
    read_ios: int
    write_ios: int
    bytes_read: int
    bytes_written: int


class IoAccountant:
    """Counts block transfers under the external-memory model.

    A read of ``nbytes`` at ``offset`` costs one I/O per block of size B that
    it touches. Each stream remembers the last block it touched, and a read
    starting inside that block does not pay for it again, so a forward scan
    split into many small reads costs the same as one large read.
    """

    def __init__(self, block_size=DEFAULT_BLOCK_SIZE):
        if block_size <= 0:
            raise ValueError("block size must be positive")
        self.block_size = block_size
        self.read_ios = 0
        self.write_ios = 0
        self.bytes_read = 0
        self.bytes_written = 0
        self._last_block = {}

    def charge_read(self, stream, offset, nbytes):
        """Charge a contiguous read; returns the number of I/Os charged."""
        if nbytes <= 0:
            return 0
        first = offset // self.block_size
        last = (offset + nbytes - 1) // self.block_size
        ios = last - first + 1
        if self._last_block.get(stream) == first:
            ios -= 1
        self._last_block[stream] = last
        self.read_ios += ios
        self.bytes_read += nbytes
        return ios

    def charge_write(self, nbytes):
        """Charge a contiguous write of a whole file starting at offset 0."""
        if nbytes <= 0:
            return 0
        ios = -(-nbytes // self.block_size)
        self.write_ios += ios
        self.bytes_written += nbytes
        return ios

    def forget(self, stream=None):
        """Drop the locality memo (all streams when ``stream`` is None)."""
        if stream is None:
            self._last_block.clear()
        else:
            self._last_block.pop(stream, None)

    def snapshot(self):
        return IoStats(
            self.block_size, self.read_ios, self.write_ios, self.bytes_read, self.bytes_written
        )


class UpdateBuffer:
    """Pending edge insertions and deletions, indexed by node.

    Entries are directed: an undirected update (u, v) is stored under both u
    and v, so ``pending_count`` grows by two per update.
    """

    def __init__(self, capacity=DEFAULT_BUFFER_CAPACITY):
        if capacity < 0:
            raise ValueError("buffer capacity must be non-negative")
        self.capacity = capacity
        self.inserted = {}
        self.deleted = {}
        self.pending_count = 0

    def __len__(self):
        return self.pending_count

    def touches(self, v):
        return v in self.inserted or v in self.deleted

    def delta(self, v):
        return len(self.inserted.get(v, ())) - len(self.deleted.get(v, ()))

    def _add(self, table, u, v):
        table.setdefault(u, set()).add(v)
        table.setdefault(v, set()).add(u)
        self.pending_count += 2

    def _discard(self, table, u, v):
        for a, b in ((u, v), (v, u)):
            entries = table[a]
            entries.remove(b)
            if not entries:
                del table[a]
        self.pending_count -= 2

    def record_insert(self, u, v):
        if v in self.deleted.get(u, ()):
            self._discard(self.deleted, u, v)
        else:
            self._add(self.inserted, u, v)

    def record_delete(self, u, v):
        if v in self.inserted.get(u, ()):
            self._discard(self.inserted, u, v)
        else:
            self._add(self.deleted, u, v)

    def clear(self):
        self.inserted.clear()
        self.deleted.clear()
        self.pending_count = 0


@dataclass
class BuildStats:
    lines: int = 0
    edges_read: int = 0
    skipped_self_loops: int = 0
    skipped_duplicates: int = 0


def _u32_from_bytes(data):
    out = array("I")
    out.frombytes(data)
    if _BIG_ENDIAN:
        out.byteswap()
    return out


class DiskGraph:
    """Handle over a graph directory.

    Not thread-safe; one handle has one owner. ``neighbors`` returns the
    effective adjacency (stored list merged with the update buffer).
    """

    def __init__(self, path, block_size=DEFAULT_BLOCK_SIZE, buffer_capacity=DEFAULT_BUFFER_CAPACITY):
        self.path = Path(path)
        self.io = IoAccountant(block_size)
        self.buffer = UpdateBuffer(buffer_capacity)
        self.build_stats = None
        self._fd = None
        self._load_tables()
        self._m_delta = 0

    @classmethod
    def open(cls, path, block_size=DEFAULT_BLOCK_SIZE, buffer_capacity=DEFAULT_BUFFER_CAPACITY):
        return cls(path, block_size=block_size, buffer_capacity=buffer_capacity)

    def _load_tables(self):
        try:
            raw = (self.path / META_FILE).read_bytes()
        except OSError as exc:
            raise StorageError(f"cannot read {self.path / META_FILE}: {exc}") from exc
        if len(raw) != HEADER.size:
            raise StorageError(f"{META_FILE}: expected {HEADER.size} bytes, got {len(raw)}")
        magic, version, n, m, id_width = HEADER.unpack(raw)
        if magic != MAGIC or version != VERSION or id_width != ID_WIDTH:
            raise StorageError(f"{META_FILE}: unsupported header {magic!r} v{version} id_width={id_width}")
        try:
            records = np.fromfile(self.path / NODES_FILE, dtype=NODE_RECORD)
            edge_bytes = os.path.getsize(self.path / EDGES_FILE)
        except OSError as exc:
            raise StorageError(str(exc)) from exc
        if len(records) != n:
            raise StorageError(f"{NODES_FILE}: header says n={n}, found {len(records)} records")
        if edge_bytes != 2 * m * SLOT_BYTES:
            raise StorageError(f"{EDGES_FILE}: header says m={m}, found {edge_bytes} bytes")
        degree = records["degree"].astype(np.int64)
        offset = records["offset"].astype(np.int64)
        expected = np.concatenate(([0], np.cumsum(degree)[:-1])) if n else degree
        if n and (not np.array_equal(offset, expected) or int(degree.sum()) != 2 * m):
            raise StorageError(f"{NODES_FILE}: offsets and degrees are inconsistent")
        self.n = int(n)
        self._stored_m = int(m)
        self._offset = array("Q", offset.astype(np.uint64).tobytes())
        self._degree = array("I", degree.astype(np.uint32).tobytes())
        if self._fd is not None:
            os.close(self._fd)
        self._fd = os.open(self.path / EDGES_FILE, os.O_RDONLY)

    def close(self):
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    @property
    def m(self):
        """Current (effective) undirected edge count."""
        return self._stored_m + self._m_delta

    @property
    def header(self):
        return {"magic": MAGIC, "version": VERSION, "n": self.n, "m": self._stored_m, "id_width": ID_WIDTH}

    def _check(self, v):
        if not 0 <= v < self.n:
            raise NodeRangeError(f"node {v} out of range [0, {self.n})")

    def stored_degree(self, v):
        self._check(v)
        return self._degree[v]

    def degree(self, v):
        """Effective degree; answered from memory, no I/O."""
        self._check(v)
        if self.buffer.pending_count and self.buffer.touches(v):
            return self._degree[v] + self.buffer.delta(v)
        return self._degree[v]

    def degrees(self):
        out = array("I", self._degree)
        if self.buffer.pending_count:
            for v in set(self.buffer.inserted) | set(self.buffer.deleted):
                out[v] += self.buffer.delta(v)
        return out

    def stored_neighbors(self, v):
        self._check(v)
        deg = self._degree[v]
        if deg == 0:
            return array("I")
        start = self._offset[v] * SLOT_BYTES
        nbytes = deg * SLOT_BYTES
        data = os.pread(self._fd, nbytes, start)
        if len(data) != nbytes:
            raise StorageError(f"short read for node {v} in {EDGES_FILE}")
        self.io.charge_read(EDGES_FILE, start, nbytes)
        return _u32_from_bytes(data)

    def neighbors(self, v):
        """Sorted effective adjacency of ``v`` as an ``array('I')``."""
        stored = self.stored_neighbors(v)
        buf = self.buffer
        if not buf.pending_count or not buf.touches(v):
            return stored
        merged = set(stored)
        merged.difference_update(buf.deleted.get(v, ()))
        merged.update(buf.inserted.get(v, ()))
        return array("I", sorted(merged))

    def has_edge(self, u, v):
        self._check(u)
        self._check(v)
        buf = self.buffer
        if v in buf.inserted.get(u, ()):
            return True
        if v in buf.deleted.get(u, ()):
            return False
        a, b = (u, v) if self._degree[u] <= self._degree[v] else (v, u)
        stored = self.stored_neighbors(a)
        lo, hi = 0, len(stored)
        while lo < hi:
            mid = (lo + hi) // 2
            if stored[mid] < b:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(stored) and stored[lo] == b

    def apply_edge_update(self, op, u, v):
        """Record ``op`` ("insert" / "delete", or "+" / "-") on edge (u, v)."""
        self._check(u)
        self._check(v)
        if u == v:
            raise SelfLoopError(f"self-loop ({u}, {v})")
        if op in ("insert", "+"):
            if self.has_edge(u, v):
                raise DuplicateEdgeError(f"edge ({u}, {v}) already present")
            self.buffer.record_insert(u, v)
            self._m_delta += 1
        elif op in ("delete", "-"):
            if not self.has_edge(u, v):
                raise MissingEdgeError(f"edge ({u}, {v}) not present")
            self.buffer.record_delete(u, v)
            self._m_delta -= 1
        else:
            raise ValueError(f"unknown edge op {op!r}")
        if self.buffer.pending_count > self.buffer.capacity:
            self.flush()

    def scan_node_table(self, lo, hi):
        """Charge a sequential read of node records lo..hi (inclusive)."""
        if hi >= lo:
            self.io.charge_read(NODES_FILE, lo * NODE_RECORD.itemsize, (hi - lo + 1) * NODE_RECORD.itemsize)

    def flush(self):
        """Rewrite the tables to encode the effective graph and empty the buffer.

        New files are written next to the old ones and renamed into place, so
        a failure while writing leaves the previous tables intact.
        """
        if not self.buffer.pending_count:
            return
        tmp = {name: self.path / (name + ".tmp") for name in (META_FILE, NODES_FILE, EDGES_FILE)}
        offsets = array("Q")
        degrees = array("I")
        slots = 0
        try:
            with open(tmp[EDGES_FILE], "wb") as out:
                for v in range(self.n):
                    nbrs = self.neighbors(v)
                    offsets.append(slots)
                    degrees.append(len(nbrs))
                    slots += len(nbrs)
                    if _BIG_ENDIAN:
                        nbrs.byteswap()
                    out.write(nbrs.tobytes())
            records = np.empty(self.n, dtype=NODE_RECORD)
            records["offset"] = np.frombuffer(offsets, dtype=np.uint64) if self.n else []
            records["degree"] = np.frombuffer(degrees, dtype=np.uint32) if self.n else []
            records.tofile(tmp[NODES_FILE])
            m = slots // 2
            tmp[META_FILE].write_bytes(HEADER.pack(MAGIC, VERSION, self.n, m, ID_WIDTH))
            for name in (EDGES_FILE, NODES_FILE, META_FILE):
                os.replace(tmp[name], self.path / name)
        except OSError as exc:
            for p in tmp.values():
                p.unlink(missing_ok=True)
            raise StorageError(f"flush failed: {exc}") from exc
        self.io.charge_write(slots * SLOT_BYTES)
        self.io.charge_write(self.n * NODE_RECORD.itemsize)
        self.io.charge_write(HEADER.size)
        self.io.forget()
        self.buffer.clear()
        self._m_delta = 0
        self._load_tables()
        log.debug("flushed %s: n=%d m=%d", self.path, self.n, self.m)

    def io_report(self):
        return self.io.snapshot()

    def edges(self):
        """Yield each effective undirected edge once as (u, v) with u < v."""
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    yield u, v


def io_report(g):
    return g.io_report()


def neighbors(g, v):
    return g.neighbors(v)


def apply_edge_update(g, op, u, v):
    g.apply_edge_update(op, u, v)


def flush(g):
    g.flush()


def _parse_edge_lines(lines, stats):
    us, vs = [], []
    for lineno, line in enumerate(lines, start=1):
        stats.lines = lineno
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"expected 'u v', got {line!r}", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"non-integer node id in {line!r}", line=lineno) from None
        if u < 0 or v < 0 or u >= 1 << 64 or v >= 1 << 64:
            raise InputError(f"node id out of unsigned 64-bit range in {line!r}", line=lineno)
        us.append(u)
        vs.append(v)
    return us, vs


def write_tables(out_dir, degree, adjacency):
    """Write meta/nodes/edges files from a degree vector and concatenated lists."""
    out_dir = Path(out_dir)
    n = len(degree)
    records = np.empty(n, dtype=NODE_RECORD)
    degree = np.asarray(degree, dtype=np.uint64)
    records["degree"] = degree
    records["offset"] = np.concatenate(([0], np.cumsum(degree)[:-1])).astype(np.uint64) if n else degree
    adjacency = np.asarray(adjacency, dtype="<u4")
    m = len(adjacency) // 2
    records.tofile(out_dir / NODES_FILE)
    adjacency.tofile(out_dir / EDGES_FILE)
    (out_dir / META_FILE).write_bytes(HEADER.pack(MAGIC, VERSION, n, m, ID_WIDTH))


def build_from_edge_list(lines, output_path, block_size=DEFAULT_BLOCK_SIZE, buffer_capacity=DEFAULT_BUFFER_CAPACITY):
    """Convert an edge-list text stream into a graph directory and open it.

    Node ids are remapped densely in ascending original-id order. Self-loops
    and repeated edges (in either orientation) are skipped and counted in the
    returned graph's ``build_stats``.
    """
    stats = BuildStats()
    us, vs = _parse_edge_lines(lines, stats)
    out = Path(output_path)
    out.mkdir(parents=True, exist_ok=True)

    src = np.array(us, dtype=np.uint64)
    dst = np.array(vs, dtype=np.uint64)
    stats.edges_read = len(src)
    ids = np.unique(np.concatenate((src, dst)))
    if len(ids) > 0xFFFFFFFF:
        raise InputError("more than 2^32 - 1 distinct nodes")
    n = len(ids)

    loops = src == dst
    stats.skipped_self_loops = int(loops.sum())
    lo = np.minimum(src, dst)[~loops]
    hi = np.maximum(src, dst)[~loops]
    pairs = np.unique(np.stack((lo, hi), axis=1), axis=0) if len(lo) else np.empty((0, 2), np.uint64)
    stats.skipped_duplicates = len(lo) - len(pairs)

    a = np.searchsorted(ids, pairs[:, 0]).astype(np.int64)
    b = np.searchsorted(ids, pairs[:, 1]).astype(np.int64)
    tails = np.concatenate((a, b))
    heads = np.concatenate((b, a))
    order = np.lexsort((heads, tails))
    degree = np.bincount(tails, minlength=n)
    write_tables(out, degree, heads[order])

    with open(out / IDMAP_FILE, "w") as fh:
        for dense, original in enumerate(ids.tolist()):
            fh.write(f"{original}\t{dense}\n")

    if stats.skipped_self_loops or stats.skipped_duplicates:
        log.warning(
            "skipped %d self-loops and %d duplicate edges", stats.skipped_self_loops, stats.skipped_duplicates
        )
    g = DiskGraph(out, block_size=block_size, buffer_capacity=buffer_capacity)
    g.build_stats = stats
    return g


def build_from_edges(edges, output_path, n=None, **kwargs):
    """Write an already-dense edge list (ids 0..n-1) without remapping.

    Used for generated graphs, where isolated nodes must keep their ids.
    """
    edges = [(int(u), int(v)) for u, v in edges]
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    out = Path(output_path)
    out.mkdir(parents=True, exist_ok=True)
    adj = [set() for _ in range(n)]
    for u, v in edges:
        if u == v:
            raise SelfLoopError(f"self-loop ({u}, {v})")
        if not (0 <= u < n and 0 <= v < n):
            raise NodeRangeError(f"edge ({u}, {v}) outside [0, {n})")
        adj[u].add(v)
        adj[v].add(u)
    degree = [len(s) for s in adj]
    flat = [w for s in adj for w in sorted(s)]
    write_tables(out, degree, flat)
    with open(out / IDMAP_FILE, "w") as fh:
        for v in range(n):
            fh.write(f"{v}\t{v}\n")
    return DiskGraph(out, **kwargs)
