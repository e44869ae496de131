"""Synchronous message-passing simulator for distributed Chebyshev filtering.

Each node only knows its own signal value, its row of the graph operator
(the Laplacian by default), the Chebyshev coefficients and the spectral
bound.  In every round a node transmits its most recent recurrence term to
its graph neighbors and then updates using only what it received.  All
communication goes through :meth:`SimState._exchange`, which records each
message in a :class:`RoundTrace`.

Two engines run the same per-node rule:

* ``"vectorized"`` evaluates all nodes of a round at once with numpy;
* ``"nodewise"`` loops over nodes in pure Python, optionally in a shuffled
  order, and is used to check that results do not depend on scheduling.

Within a node, neighbor contributions are summed in ascending neighbor-id
order, so both engines agree bit for bit with the centralized recurrence in
:mod:`graphcheb.chebyshev`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .chebyshev import ChebyshevApprox, GramCoefficients, gram_coefficients
from .graph import WeightedGraph, is_connected, laplacian

__all__ = [
    "NodeState",
    "RoundTrace",
    "SimState",
    "init_network",
    "run_forward",
    "run_adjoint",
    "run_gram",
    "message_summary",
    "export_trace",
]


@dataclass
class NodeState:
    """What node ``node`` knows.  Nothing in here refers to non-neighbors."""

    node: int
    neighbors: np.ndarray
    row_weights: np.ndarray  # operator entries P[node, m] for m in neighbors
    self_weight: float  # P[node, node]
    coefficients: np.ndarray
    lambda_max: float
    value: np.ndarray = field(default_factory=lambda: np.zeros(1))
    store: list = field(default_factory=list)

    @property
    def gram(self) -> np.ndarray:
        # computable locally from the coefficients the node already holds
        return gram_coefficients(ChebyshevApprox(self.coefficients, self.lambda_max)).d


class RoundTrace:
    """Message log.  Counts are always kept; full records only when ``audit``."""

    def __init__(self, audit: bool = False):
        self.audit = audit
        self.edge_messages = 0
        self.scalar_volume = 0
        self.rounds = 0
        self._records: list[np.ndarray] = []

    def record(self, rnd: int, src: np.ndarray, dst: np.ndarray, payload_len: int) -> None:
        self.rounds = max(self.rounds, rnd)
        self.edge_messages += len(src)
        self.scalar_volume += len(src) * payload_len
        if self.audit:
            block = np.empty((len(src), 4), dtype=np.int64)
            block[:, 0] = rnd
            block[:, 1] = src
            block[:, 2] = dst
            block[:, 3] = payload_len
            self._records.append(block)

    @property
    def records(self) -> np.ndarray:
        """``(M, 4)`` array of ``(round, sender, receiver, payload_len)`` rows."""
        if not self._records:
            return np.empty((0, 4), dtype=np.int64)
        return np.vstack(self._records)

    def extend(self, other: "RoundTrace", round_offset: int = 0) -> None:
        self.edge_messages += other.edge_messages
        self.scalar_volume += other.scalar_volume
        self.rounds += other.rounds
        if self.audit and other.audit:
            for block in other._records:
                shifted = block.copy()
                shifted[:, 0] += round_offset
                self._records.append(shifted)


class SimState:
    """A network of :class:`NodeState` objects plus the message log."""

    def __init__(self, graph: WeightedGraph, nodes: list[NodeState], approx: ChebyshevApprox,
                 audit: bool = False, engine: str = "vectorized",
                 node_order: Optional[np.ndarray] = None):
        if engine not in ("vectorized", "nodewise"):
            raise ValueError(f"unknown engine {engine!r}")
        self.graph = graph
        self.nodes = nodes
        self.approx = approx
        self.gram = GramCoefficients(nodes[0].gram, approx.lambda_max) if nodes else None
        self.audit = audit
        self.engine = engine
        self.node_order = np.arange(len(nodes)) if node_order is None else np.asarray(node_order)
        self.trace = RoundTrace(audit)  # cumulative over all runs
        self.round = 0
        self.total_rounds = 0
        self._compile()

    @property
    def n(self) -> int:
        return len(self.nodes)

    def _compile(self) -> None:
        # Canonical message order: by sender, then receiver.
        src, dst = [], []
        for st in self.nodes:
            src.append(np.full(len(st.neighbors), st.node))
            dst.append(st.neighbors)
        self._src = np.concatenate(src).astype(np.int64) if src else np.empty(0, np.int64)
        self._dst = np.concatenate(dst).astype(np.int64) if dst else np.empty(0, np.int64)
        n = self.n
        keys = self._src * n + self._dst

        # Per-node rows over N_n u {n}, ascending; assembled from node knowledge only.
        indptr, cols, weights, is_self, msg_idx = [0], [], [], [], []
        for st in self.nodes:
            c = np.concatenate([st.neighbors, [st.node]]).astype(np.int64)
            w = np.concatenate([st.row_weights, [st.self_weight]])
            order = np.argsort(c, kind="stable")
            c, w = c[order], w[order]
            cols.append(c)
            weights.append(w)
            self_mask = c == st.node
            is_self.append(self_mask)
            # which incoming message carries neighbor m's value
            idx = np.searchsorted(keys, c * n + st.node)
            idx[self_mask] = -1
            msg_idx.append(idx)
            indptr.append(indptr[-1] + len(c))
        self._indptr = np.asarray(indptr)
        self._cols = np.concatenate(cols)
        self._weights = np.concatenate(weights)
        self._is_self = np.concatenate(is_self)
        self._msg_idx = np.concatenate(msg_idx)
        self._row_of = np.repeat(np.arange(n), np.diff(self._indptr))
        self._pos = np.arange(len(self._cols)) - self._indptr[self._row_of]
        inv_alpha = np.array([1.0 / (st.lambda_max / 2.0) for st in self.nodes])
        self._w1 = inv_alpha[self._row_of] * self._weights
        self._w2 = 2.0 * self._w1
        maxlen = int(np.diff(self._indptr).max()) if n else 0
        self._groups = []
        for p in range(maxlen):
            entries = np.flatnonzero(self._pos == p)
            self._groups.append((self._row_of[entries], entries))

    # -- communication -------------------------------------------------------

    def _exchange(self, outgoing: np.ndarray, rnd: int, trace: RoundTrace) -> np.ndarray:
        """Every node sends ``outgoing[n]`` to each neighbor; returns per-message payloads."""
        payload_len = 1 if outgoing.ndim == 1 else outgoing.shape[1]
        payload = outgoing[self._src]
        trace.record(rnd, self._src, self._dst, payload_len)
        self.trace.record(self.total_rounds + rnd, self._src, self._dst, payload_len)
        return payload

    # -- per-node update rule --------------------------------------------------

    def _local_sum(self, weights: np.ndarray, own: np.ndarray, payload: np.ndarray) -> np.ndarray:
        """``sum_{m in N_n u n} weights[n, m] * x_m`` with x_m read from the inbox."""
        if self.engine == "nodewise":
            return self._local_sum_nodewise(weights, own, payload)
        gathered = np.where(
            self._is_self if own.ndim == 1 else self._is_self[:, None],
            own[self._cols],
            payload[np.maximum(self._msg_idx, 0)] if len(payload) else own[self._cols],
        )
        prod = gathered * (weights if own.ndim == 1 else weights[:, None])
        acc = np.zeros_like(own)
        for rows, entries in self._groups:
            acc[rows] += prod[entries]
        return acc

    def _local_sum_nodewise(self, weights, own, payload) -> np.ndarray:
        acc = np.zeros_like(own)
        for n in self.node_order:
            lo, hi = self._indptr[n], self._indptr[n + 1]
            inbox = {int(self._cols[e]): payload[self._msg_idx[e]]
                     for e in range(lo, hi) if not self._is_self[e]}
            s = np.zeros_like(own[n])
            for e in range(lo, hi):
                m = int(self._cols[e])
                x = own[n] if m == n else inbox[m]
                s = s + weights[e] * x
            acc[n] = s
        return acc

    def recurrence(self, x0: np.ndarray, K: int, trace: RoundTrace) -> list[np.ndarray]:
        """Run ``K`` rounds; returns ``[Tbar_1 x, ..., Tbar_K x]`` in node-column layout."""
        terms = []
        payload = self._exchange(x0, 1, trace)
        cur = self._local_sum(self._w1, x0, payload) - x0
        terms.append(cur)
        prev = x0
        for k in range(2, K + 1):
            payload = self._exchange(cur, k, trace)
            nxt = self._local_sum(self._w2, cur, payload) - 2.0 * cur - prev
            prev, cur = cur, nxt
            terms.append(cur)
        self.round += K
        self.total_rounds += K
        return terms


def init_network(g: WeightedGraph, f, approx: ChebyshevApprox, operator=None,
                 audit: bool = False, engine: str = "vectorized",
                 node_order=None) -> SimState:
    """Give every node its local knowledge and nothing else.

    Parameters
    ----------
    g : WeightedGraph
        Communication graph; must be connected.
    f : array_like or None
        Initial signal, one value per node.
    approx : ChebyshevApprox
        Coefficients and the spectral bound shared by all nodes.
    operator : sparse matrix, optional
        Matrix whose rows the nodes hold (defaults to the Laplacian of ``g``).
        Its off-diagonal support must lie on graph edges.
    """
    if not is_connected(g):
        raise ValueError("graph is disconnected")
    P = laplacian(g) if operator is None else sp.csr_matrix(operator, dtype=float)
    P.sort_indices()
    n = g.node_count
    if P.shape != (n, n):
        raise ValueError("operator does not match graph size")
    W = g.adjacency
    off = P - sp.diags(P.diagonal())
    off.eliminate_zeros()
    support = (off != 0).astype(np.int8)
    if (support - support.multiply(W != 0)).nnz:
        raise ValueError("operator couples nodes that are not graph neighbors")
    f = np.zeros(n) if f is None else np.asarray(f, dtype=float)
    if f.shape[0] != n:
        raise ValueError("signal length does not match node count")

    nodes = []
    for i in range(n):
        nbrs = W.indices[W.indptr[i]:W.indptr[i + 1]].astype(np.int64)
        row = P.getrow(i)
        lookup = dict(zip(row.indices.tolist(), row.data.tolist()))
        nodes.append(NodeState(
            node=i,
            neighbors=nbrs,
            row_weights=np.array([lookup.get(int(m), 0.0) for m in nbrs]),
            self_weight=float(lookup.get(i, 0.0)),
            coefficients=approx.coefficients.copy(),
            lambda_max=approx.lambda_max,
            value=np.array(f[i]),
        ))
    return SimState(g, nodes, approx, audit=audit, engine=engine, node_order=node_order)


def _load_values(sim: SimState, x) -> np.ndarray:
    if x is not None:
        x = np.asarray(x, dtype=float)
        for st in sim.nodes:
            st.value = np.array(x[st.node])
    return np.array([st.value for st in sim.nodes], dtype=float)


def run_forward(sim: SimState, f=None) -> tuple[np.ndarray, RoundTrace]:
    """Algorithm for ``Phi~ f``: ``K`` rounds of scalar messages.

    Returns the stacked ``eta * N`` output (block ``j`` holds every node's
    ``j``-th value) and the trace of this run.
    """
    trace = RoundTrace(sim.audit)
    sim.round = 0
    x0 = _load_values(sim, f)
    c = sim.approx.coefficients
    terms = sim.recurrence(x0, sim.approx.order, trace)
    out = np.outer(0.5 * c[:, 0], x0)
    for k, tk in enumerate(terms, start=1):
        out += np.outer(c[:, k], tk)
    for st in sim.nodes:
        st.store = [t[st.node] for t in terms]
    return out.reshape(-1), trace


def run_adjoint(sim: SimState, a) -> tuple[np.ndarray, RoundTrace]:
    """Algorithm for ``Phi~^* a``: ``K`` rounds of length-``eta`` messages."""
    trace = RoundTrace(sim.audit)
    sim.round = 0
    eta = sim.approx.eta
    a = np.asarray(a, dtype=float)
    if a.size != eta * sim.n:
        raise ValueError("size mismatch: expected eta * N coefficients")
    # node n holds row n of X; its scalar signal value is left untouched
    X = np.ascontiguousarray(a.reshape(eta, sim.n).T)
    c = sim.approx.coefficients
    terms = sim.recurrence(X, sim.approx.order, trace)
    acc = X * (0.5 * c[:, 0])
    for k, tk in enumerate(terms, start=1):
        acc += tk * c[:, k]
    out = acc[:, 0].copy()
    for j in range(1, eta):
        out += acc[:, j]
    return out, trace


def run_gram(sim: SimState, f=None) -> tuple[np.ndarray, RoundTrace]:
    """``Phi~^* Phi~ f`` as one order-``2K`` recurrence with scalar messages."""
    trace = RoundTrace(sim.audit)
    sim.round = 0
    x0 = _load_values(sim, f)
    d = sim.gram.d
    terms = sim.recurrence(x0, sim.gram.order, trace)
    out = 0.5 * d[0] * x0
    for k, tk in enumerate(terms, start=1):
        out = out + d[k] * tk
    return out, trace


def message_summary(trace: RoundTrace) -> dict:
    return {"edge_messages": int(trace.edge_messages), "scalar_volume": int(trace.scalar_volume)}


def export_trace(trace: RoundTrace, path) -> None:
    """Write ``round,sender,receiver,payload_len`` CSV (requires an audited trace)."""
    if not trace.audit:
        raise ValueError("trace was recorded without auditing")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "sender", "receiver", "payload_len"])
        w.writerows(trace.records.tolist())
