"""Travel-time catchments over a road graph.

Sites are snapped to their nearest graph node, then one cutoff Dijkstra
search per distinct zone node yields every provider reachable within the
cutoff. Off-network access legs are ignored, so the cost between two
sites is the node-to-node path cost.
"""

from __future__ import annotations

import heapq
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

from .costs import DEMAND_TO_PROVIDER, DIRECTIONS, CostMatrix
from .errors import ContractError, SnapError
from .geometry import representative_point
from .ingest import DemandZone, GeoPoint, ProviderSite, RoadNetwork

log = logging.getLogger(__name__)

DEFAULT_SNAP_TOLERANCE_M = 500.0
THREADS_ENV = "FCACCESS_THREADS"


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, threads)


def snap(point: GeoPoint, network: RoadNetwork,
         tolerance: float = DEFAULT_SNAP_TOLERANCE_M) -> tuple[str, float]:
    """Nearest node and its distance in meters; ties go to the smallest node id."""
    if not tolerance > 0:
        raise ContractError(f"snap tolerance must be positive, got {tolerance!r}")
    if not network.nodes:
        raise ContractError("network has no nodes")
    node, d = network.node_index.nearest(point)
    if d > tolerance:
        raise SnapError(f"nearest node {node!r} is {d:.1f} m away (tolerance {tolerance} m)", d)
    return node, d


def shortest_path_times(network: RoadNetwork, origin: str, cutoff: float,
                        reverse: bool = False) -> dict[str, float]:
    """Shortest travel time from ``origin`` to every node within ``cutoff``.

    With ``reverse=True`` edges are traversed backwards, giving the time
    from each node *to* ``origin``.
    """
    if origin not in network.nodes:
        raise ContractError(f"unknown origin node {origin!r}")
    if not cutoff > 0:
        raise ContractError(f"cutoff must be positive, got {cutoff!r}")
    adj = network.reverse_adjacency if reverse else network.adjacency
    best = {origin: 0.0}
    done = {}
    heap = [(0.0, origin)]
    while heap:
        t, u = heapq.heappop(heap)
        if u in done:
            continue
        done[u] = t
        for v, c in adj[u]:
            nt = t + c
            if nt <= cutoff and nt < best.get(v, float("inf")):
                best[v] = nt
                heapq.heappush(heap, (nt, v))
    return done


def _snap_all(sites, network, tolerance, strict):
    snapped, failed = {}, []
    for sid, pt in sites:
        try:
            snapped[sid] = snap(pt, network, tolerance)
        except SnapError as exc:
            if strict:
                raise SnapError(f"site {sid!r}: {exc}", exc.distance) from None
            failed.append(sid)
    return snapped, failed


def build_cost_matrix(network: RoadNetwork, zones: Iterable[DemandZone],
                      providers: Iterable[ProviderSite], cutoff: float,
                      direction: str = DEMAND_TO_PROVIDER,
                      tolerance: float = DEFAULT_SNAP_TOLERANCE_M,
                      strict: bool = False, threads: int | None = None) -> CostMatrix:
    """Sparse zone/provider travel-time matrix truncated at ``cutoff`` seconds.

    ``demand-to-provider`` measures trips from zones to providers,
    ``provider-to-demand`` the opposite trip. Sites that cannot be snapped
    are listed in ``unreached_zones`` / ``unreached_providers`` (or raise
    :class:`SnapError` when ``strict``).
    """
    if direction not in DIRECTIONS:
        raise ContractError(f"unknown direction {direction!r}")
    if not cutoff > 0:
        raise ContractError(f"cutoff must be positive, got {cutoff!r}")
    if not network.nodes or not network.edges:
        raise ContractError("network is empty")
    zones = sorted(zones, key=lambda z: z.id)
    providers = sorted(providers, key=lambda p: p.id)

    zone_snaps, zone_failed = _snap_all(((z.id, representative_point(z)) for z in zones),
                                        network, tolerance, strict)
    prov_snaps, prov_failed = _snap_all(((p.id, p.location) for p in providers),
                                        network, tolerance, strict)
    for sid in zone_failed + prov_failed:
        log.warning("site %r could not be snapped within %s m and is excluded", sid, tolerance)

    providers_at: dict[str, list[str]] = {}
    for pid, (node, _) in prov_snaps.items():
        providers_at.setdefault(node, []).append(pid)

    reverse = direction != DEMAND_TO_PROVIDER
    origins = sorted({node for node, _ in zone_snaps.values()})

    # build adjacency once, before any worker threads touch it
    network.reverse_adjacency if reverse else network.adjacency

    def search(node):
        return shortest_path_times(network, node, cutoff, reverse=reverse)

    n = thread_count(threads)
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            reached = dict(zip(origins, pool.map(search, origins)))
    else:
        reached = {node: search(node) for node in origins}

    entries = {}
    for zid in sorted(zone_snaps):
        times = reached[zone_snaps[zid][0]]
        for node in sorted(set(times) & providers_at.keys()):
            for pid in providers_at[node]:
                entries[(zid, pid)] = times[node]
    return CostMatrix(dict(sorted(entries.items())), cutoff=cutoff, unit="s", direction=direction,
                      unreached_zones=tuple(zone_failed), unreached_providers=tuple(prov_failed))
