"""
Travel-time catchments on a road network
========================================

Builds a small grid of streets, snaps zones and clinics to it, computes a
30 minute origin-destination table and scores zones with 10/20/30 minute
rings. The table can be written once and reused for many runs.
"""

import tempfile
from pathlib import Path

from fcaccess import DemandZone, GeoPoint, ProviderSite, RingScheme, RoadNetwork, ZoneGeometry, accessibility
from fcaccess.costs import read_cost_matrix, write_cost_matrix
from fcaccess.network import build_cost_matrix

# 8 x 8 street grid, 1 km blocks; the two middle avenues are faster
nodes = {f"{i},{j}": GeoPoint(1000.0 * i, 1000.0 * j, "planar") for i in range(8) for j in range(8)}
edges = []
for i in range(8):
    for j in range(8):
        if i < 7:
            edges.append((f"{i},{j}", f"{i + 1},{j}", 60.0 if j in (3, 4) else 150.0, True))
        if j < 7:
            edges.append((f"{i},{j}", f"{i},{j + 1}", 150.0, True))
roads = RoadNetwork(nodes, tuple(edges))

clinics = [ProviderSite("A", GeoPoint(3100, 3100, "planar"), 10), ProviderSite("B", GeoPoint(6900, 100, "planar"), 4)]
zones = [DemandZone(f"{i}-{j}", ZoneGeometry("Point", (1000.0 * i + 80, 1000.0 * j - 60), "planar"), 1000.0)
         for i in range(0, 8, 2) for j in range(1, 8, 2)]

matrix = build_cost_matrix(roads, zones, clinics, cutoff=1800.0, tolerance=500.0)
print(f"{len(matrix)} reachable pairs; unsnapped zones: {list(matrix.unreached_zones)}")

# cache to disk and read it back, as the catchment command does
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "od.csv"
    write_cost_matrix(matrix, path)
    cached = read_cost_matrix(path)
print("cache round trip identical:", cached.entries == matrix.entries)

result = accessibility(clinics, zones, cached, RingScheme.default_travel(), per_capita=100000)
for zid, acc in result.zones.items():
    minutes = sorted(round(c / 60, 1) for (z, _), c in matrix.entries.items() if z == zid)
    print(f"zone {zid:4s} minutes to clinics {minutes!s:14s} index {acc.final_index:7.2f}")
