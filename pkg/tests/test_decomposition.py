from __future__ import annotations

import numpy as np
import pytest

from saturnet import (
    EPS_FEAS,
    InputError,
    Network,
    decompose,
    deficiency_set,
    is_out_connected,
    strongly_connected_components,
)

from conftest import random_network
from oracles import power_radius


def two_rings_network() -> Network:
    """A 4-node ring draining into a second 4-node ring (nodes 4..7)."""
    P = np.zeros((8, 8))
    for i in range(4):
        P[i, (i + 1) % 4] = 0.8
    P[1, 4] = 0.2
    for i in range(4, 8):
        P[i, 4 + (i - 4 + 1) % 4] = 1.0
    return Network(P, np.ones(8))


class TestDecompose:
    def test_strongly_connected_demo(self, triangle):
        dec = decompose(triangle)
        assert dec.transient == ()
        assert len(dec.sinks) == 1
        assert dec.sinks[0].nodes == (0, 1, 2)
        assert dec.sinks[0].out_connected is False

    def test_ring_feeding_ring(self):
        dec = decompose(two_rings_network())
        assert dec.transient == (0, 1, 2, 3)
        assert len(dec.sinks) == 1
        assert dec.sinks[0].nodes == (4, 5, 6, 7)
        assert dec.sinks[0].out_connected is False

    def test_single_node_no_edges(self):
        dec = decompose(Network([[0.0]], [1.0]))
        assert dec.transient == ()
        assert dec.sinks[0].nodes == (0,)
        assert dec.sinks[0].out_connected is True

    def test_json_shape(self, triangle):
        obj = decompose(triangle).to_json_dict()
        assert obj == {
            "transient": [],
            "sinks": [{"nodes": [0, 1, 2], "out_connected": False}],
        }

    def test_partition_invariants_random(self):
        rng = np.random.default_rng(3)
        for _ in range(150):
            net = random_network(rng)
            dec = decompose(net)
            all_nodes = sorted(dec.transient + sum((s.nodes for s in dec.sinks), ()))
            assert all_nodes == list(range(net.n))
            for sink in dec.sinks:
                idx = np.array(sink.nodes)
                outside = np.setdiff1d(np.arange(net.n), idx)
                # no edge leaves a trapping set
                if outside.size:
                    assert not np.any(net.P[np.ix_(idx, outside)] > 0)
                # irreducible: one strong component
                sub = net.P[np.ix_(idx, idx)]
                assert len(strongly_connected_components(sub > 0)) == 1
                if not sink.out_connected:
                    # non-out-connected sinks are row-stochastic blocks
                    assert np.all(np.abs(sub.sum(axis=1) - 1.0) <= EPS_FEAS)

    def test_components_match_reachability_closure(self):
        # oracle: i and j share a component iff each reaches the other
        rng = np.random.default_rng(13)
        for _ in range(120):
            n = int(rng.integers(1, 12))
            adj = rng.random((n, n)) < rng.uniform(0.05, 0.5)
            reach = adj | np.eye(n, dtype=bool)
            for _ in range(n):
                reach = reach | (reach @ reach)
            mutual = reach & reach.T
            oracle = sorted(
                sorted(set(np.nonzero(mutual[i])[0].tolist()))
                for i in range(n)
            )
            oracle = sorted({tuple(c) for c in oracle})
            got = sorted(tuple(c) for c in strongly_connected_components(adj))
            assert got == oracle

    def test_components_in_reverse_topological_order(self):
        rng = np.random.default_rng(19)
        for _ in range(60):
            n = int(rng.integers(2, 10))
            adj = rng.random((n, n)) < 0.3
            comps = strongly_connected_components(adj)
            position = {}
            for k, comp in enumerate(comps):
                for v in comp:
                    position[v] = k
            for i in range(n):
                for j in np.nonzero(adj[i])[0]:
                    if position[i] != position[j]:
                        # edges point to components listed earlier
                        assert position[j] < position[i]

    def test_label_equivariance(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            net = random_network(rng, n_max=7)
            perm = rng.permutation(net.n)
            Pp = net.P[np.ix_(perm, perm)]
            netp = Network(Pp, net.w[perm])
            dec = decompose(net)
            decp = decompose(netp)
            # relabel the original decomposition through the permutation
            inv = np.empty(net.n, dtype=int)
            inv[perm] = np.arange(net.n)
            relabeled_sinks = sorted(
                tuple(sorted(inv[list(s.nodes)])) for s in dec.sinks
            )
            assert relabeled_sinks == sorted(s.nodes for s in decp.sinks)
            assert sorted(inv[list(dec.transient)]) == list(decp.transient)


class TestDeficiencySet:
    def test_stochastic_matrix_has_none(self, triangle):
        assert deficiency_set(triangle) == ()

    def test_zero_matrix_all(self):
        assert deficiency_set(Network(np.zeros((3, 3)), np.ones(3))) == (0, 1, 2)

    def test_liability_example_row(self):
        net = Network([[0.0, 0.8], [1.0, 0.0]], [5.0, 4.0])
        assert deficiency_set(net) == (0,)


class TestIsOutConnected:
    def test_proper_subset_of_irreducible_stochastic(self, triangle):
        assert is_out_connected(triangle, [0, 1]) is True

    def test_whole_stochastic_graph(self, triangle):
        assert is_out_connected(triangle, [0, 1, 2]) is False

    def test_single_deficient_node(self):
        net = Network(np.zeros((2, 2)), np.ones(2))
        assert is_out_connected(net, [0]) is True

    def test_empty_set_rejected(self, triangle):
        with pytest.raises(InputError):
            is_out_connected(triangle, [])
        with pytest.raises(InputError):
            is_out_connected(triangle, [5])

    def test_unreachable_deficiency(self):
        # node 1 cannot reach the deficient node 0 inside {0, 1}
        net = Network([[0.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]], np.ones(3))
        assert is_out_connected(net, [0, 1]) is False

    def test_out_connected_blocks_have_radius_below_one(self):
        rng = np.random.default_rng(9)
        checked = 0
        for _ in range(300):
            net = random_network(rng, n_max=7)
            k = int(rng.integers(1, net.n + 1))
            nodes = sorted(rng.choice(net.n, size=k, replace=False).tolist())
            if is_out_connected(net, nodes):
                sub = net.P[np.ix_(nodes, nodes)]
                assert power_radius(sub) < 1.0 - 1e-9
                checked += 1
        assert checked > 50
