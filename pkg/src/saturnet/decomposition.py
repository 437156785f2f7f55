"""Graph structure of the routing matrix: trapping sets and the transient part.

The directed graph of P has an edge i -> j wherever P[i][j] > 0 (exact
comparison: routing fractions are data, a written zero means no edge). The
sink components of its strong-component condensation are the irreducible
trapping sets; every other node is transient. A trapping set is
"out-connected" when some of its rows lose mass (sum below 1), in which case
the induced block has spectral radius below one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .model import EPS_FEAS, Network, require_valid


def strongly_connected_components(adj: np.ndarray) -> list[list[int]]:
    """Tarjan's algorithm on a boolean adjacency matrix, iteratively.

    Returns components in reverse topological order (every edge leaving a
    component points to a component that appears *earlier* in the list).
    """
    n = adj.shape[0]
    succ = [np.nonzero(adj[i])[0].tolist() for i in range(n)]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        # explicit DFS stack of (node, iterator position)
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pos, len(succ[v])):
                u = succ[v][k]
                if index[u] == -1:
                    work.append((v, k + 1))
                    work.append((u, 0))
                    advanced = True
                    break
                if on_stack[u]:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp.append(u)
                    if u == v:
                        break
                comp.sort()
                components.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return components


@dataclass(frozen=True)
class SinkComponent:
    nodes: tuple[int, ...]
    out_connected: bool


@dataclass(frozen=True)
class Decomposition:
    """Partition of the node set into transient nodes and trapping sets."""

    transient: tuple[int, ...]
    sinks: tuple[SinkComponent, ...]

    def to_json_dict(self) -> dict:
        return {
            "transient": list(self.transient),
            "sinks": [
                {"nodes": list(s.nodes), "out_connected": s.out_connected}
                for s in self.sinks
            ],
        }


def decompose(net: Network) -> Decomposition:
    """Split the node set into the transient part and irreducible trapping sets.

    Trapping sets are the strong components with no edge leaving them; they
    are reported sorted by smallest member. A trapping set is out-connected
    exactly when one of its rows sums below 1 (its row support is internal,
    so deficiency plus internal strong connectivity is out-connectedness of
    the induced block).
    """
    require_valid(net)
    P = net.P
    adj = P > 0
    comps = strongly_connected_components(adj)

    sinks = []
    transient: list[int] = []
    for comp in comps:
        idx = np.array(comp)
        outside = np.ones(net.n, dtype=bool)
        outside[idx] = False
        if adj[np.ix_(idx, outside)].any():
            transient.extend(comp)
        else:
            deficient = bool(np.any(P[idx].sum(axis=1) < 1.0 - EPS_FEAS))
            sinks.append(SinkComponent(tuple(comp), deficient))
    sinks.sort(key=lambda s: s.nodes[0])
    transient.sort()
    return Decomposition(tuple(transient), tuple(sinks))


def deficiency_set(net: Network) -> tuple[int, ...]:
    """Indices of rows of P that sum to less than 1."""
    require_valid(net)
    row_sums = net.P.sum(axis=1)
    return tuple(int(i) for i in np.nonzero(row_sums < 1.0 - EPS_FEAS)[0])


def is_out_connected(net: Network, nodes) -> bool:
    """Whether the sub-matrix of P induced by ``nodes`` is out-connected.

    A block is out-connected when it has at least one row summing below 1
    and every node of the block can reach such a row inside the block. This
    is exactly the condition under which the block's spectral radius is
    strictly below one.
    """
    require_valid(net)
    idx = sorted({int(i) for i in nodes})
    if not idx:
        raise InputError("node set must be nonempty")
    if idx[0] < 0 or idx[-1] >= net.n:
        raise InputError(f"node indices must lie in [0, {net.n - 1}]")
    sub = net.P[np.ix_(idx, idx)]
    k = len(idx)
    deficient = sub.sum(axis=1) < 1.0 - EPS_FEAS
    if not deficient.any():
        return False
    # reverse reachability from the deficient rows inside the block
    adj = sub > 0
    reached = deficient.copy()
    frontier = list(np.nonzero(deficient)[0])
    while frontier:
        j = frontier.pop()
        for i in np.nonzero(adj[:, j])[0]:
            if not reached[i]:
                reached[i] = True
                frontier.append(int(i))
    return bool(reached.all())
