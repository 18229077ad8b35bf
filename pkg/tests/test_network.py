import random

import pytest

from conftest import planar_provider, planar_zone
from oracles import floyd_warshall
from fcaccess.costs import PROVIDER_TO_DEMAND
from fcaccess.errors import ContractError, SnapError
from fcaccess.ingest import GeoPoint, RoadNetwork
from fcaccess.network import build_cost_matrix, shortest_path_times, snap


def planar_net(coords, edges):
    return RoadNetwork({k: GeoPoint(x, y, "planar") for k, (x, y) in coords.items()}, tuple(edges))


LINE = planar_net({"A": (0, 0), "B": (1000, 0), "C": (2000, 0)},
                  [("A", "B", 120.0, False), ("B", "C", 180.0, False)])


def test_snap_within_tolerance():
    assert snap(GeoPoint(1000, 10, "planar"), LINE, 500) == ("B", 10.0)


def test_snap_failure_carries_distance():
    net = planar_net({"N": (0, 0), "M": (5000, 0)}, [("N", "M", 1.0, True)])
    with pytest.raises(SnapError) as err:
        snap(GeoPoint(0, 600, "planar"), net, 500)
    assert err.value.distance == 600.0


def test_snap_tie_goes_to_smallest_id():
    net = planar_net({"B": (10, 0), "A": (-10, 0)}, [("A", "B", 1.0, True)])
    assert snap(GeoPoint(0, 0, "planar"), net, 500)[0] == "A"


def test_snap_tolerance_positive():
    with pytest.raises(ContractError):
        snap(GeoPoint(0, 0, "planar"), LINE, 0)


def test_line_shortest_paths():
    assert shortest_path_times(LINE, "A", 600) == {"A": 0.0, "B": 120.0, "C": 300.0}
    assert shortest_path_times(LINE, "A", 200) == {"A": 0.0, "B": 120.0}


def test_unknown_origin():
    with pytest.raises(ContractError):
        shortest_path_times(LINE, "Z", 600)


def random_graph(rng, n):
    coords = {f"n{i:02d}": (rng.uniform(0, 1e4), rng.uniform(0, 1e4)) for i in range(n)}
    ids = sorted(coords)
    edges = []
    for _ in range(rng.randint(n, 4 * n)):
        a, b = rng.sample(ids, 2)
        # integer costs keep path sums exact in any association order
        edges.append((a, b, float(rng.randint(1, 100)), rng.random() < 0.3))
    return planar_net(coords, edges)


@pytest.mark.parametrize("seed", range(50))
def test_random_graphs_match_floyd_warshall(seed):
    rng = random.Random(seed)
    net = random_graph(rng, rng.randint(2, 60))
    fw = floyd_warshall(list(net.nodes), net.directed_edges())
    cutoff = float(rng.randint(20, 400))
    for origin in net.nodes:
        expected = {v: d for v, d in fw[origin].items() if d <= cutoff}
        assert shortest_path_times(net, origin, cutoff) == expected
        back = {v: fw[v][origin] for v in net.nodes if fw[v][origin] <= cutoff}
        assert shortest_path_times(net, origin, cutoff, reverse=True) == back


def test_adjacent_pair_and_cutoff():
    net = planar_net({"Z": (0, 0), "P": (1000, 0)}, [("Z", "P", 300.0, True)])
    zones, provs = [planar_zone("z", 1, 0, 5)], [planar_provider("p", 1, 1000, 5)]
    assert build_cost_matrix(net, zones, provs, 600).entries == {("z", "p"): 300.0}
    assert build_cost_matrix(net, zones, provs, 100).entries == {}


def all_path_costs(edges, src, dst):
    """Costs of every simple path from src to dst, by enumeration."""
    out = []

    def walk(node, seen, cost):
        if node == dst:
            out.append(cost)
            return
        for a, b, c in edges:
            if a == node and b not in seen:
                walk(b, seen | {b}, cost + c)

    walk(src, {src}, 0.0)
    return out


def test_oneway_makes_directions_differ():
    net = planar_net({"A": (0, 0), "B": (1000, 0), "C": (500, 800)},
                     [("A", "B", 100.0, False), ("B", "C", 100.0, True), ("C", "A", 500.0, True)])
    zones, provs = [planar_zone("z", 1, 0, 0)], [planar_provider("p", 1, 1000, 0)]
    edges = net.directed_edges()
    d2p = build_cost_matrix(net, zones, provs, 3600).entries[("z", "p")]
    p2d = build_cost_matrix(net, zones, provs, 3600, direction=PROVIDER_TO_DEMAND).entries[("z", "p")]
    assert d2p == min(all_path_costs(edges, "A", "B")) == 100.0
    assert p2d == min(all_path_costs(edges, "B", "A")) == 600.0


def _grid_instance(rng, oneway_share):
    coords = {f"g{i}_{j}": (i * 500.0, j * 500.0) for i in range(8) for j in range(8)}
    edges = []
    for i in range(8):
        for j in range(8):
            for di, dj in ((1, 0), (0, 1)):
                if i + di < 8 and j + dj < 8:
                    edges.append((f"g{i}_{j}", f"g{i + di}_{j + dj}", float(rng.randint(30, 90)),
                                  rng.random() >= oneway_share))
    net = planar_net(coords, edges)
    zones = [planar_zone(f"z{k:02d}", 1, rng.uniform(0, 3500), rng.uniform(0, 3500)) for k in range(25)]
    provs = [planar_provider(f"p{k}", 1, rng.uniform(0, 3500), rng.uniform(0, 3500)) for k in range(6)]
    return net, zones, provs


def test_bidirectional_directions_agree():
    net, zones, provs = _grid_instance(random.Random(3), 0.0)
    d2p = build_cost_matrix(net, zones, provs, 600)
    p2d = build_cost_matrix(net, zones, provs, 600, direction=PROVIDER_TO_DEMAND)
    assert d2p.entries == p2d.entries and len(d2p) > 0


def test_matrix_independent_of_order_and_threads():
    net, zones, provs = _grid_instance(random.Random(5), 0.3)
    base = build_cost_matrix(net, zones, provs, 500, threads=1)
    shuffled = build_cost_matrix(net, zones[::-1], provs[::-1], 500, threads=4)
    assert list(base.entries.items()) == list(shuffled.entries.items())


def test_matrix_entries_within_cutoff():
    net, zones, provs = _grid_instance(random.Random(9), 0.2)
    m = build_cost_matrix(net, zones, provs, 300)
    assert all(0 <= c <= 300 for c in m.entries.values())


def test_same_node_cost_zero_and_unreached_sites():
    zones = [planar_zone("near", 1, 1, 1), planar_zone("far", 1, 9000, 9000)]
    provs = [planar_provider("p", 1, 0, 0), planar_provider("gone", 1, -9000, 0)]
    m = build_cost_matrix(LINE, zones, provs, 600)
    assert m.entries == {("near", "p"): 0.0}
    assert m.unreached_zones == ("far",) and m.unreached_providers == ("gone",)
    with pytest.raises(SnapError):
        build_cost_matrix(LINE, zones, provs, 600, strict=True)


def test_empty_network_rejected():
    with pytest.raises(ContractError):
        build_cost_matrix(RoadNetwork({}, ()), [], [], 600)
