"""
Provider-to-population ratios within a fixed buffer
===================================================

Three clinics and four neighbourhoods on a flat map (meters). Each clinic
divides its capacity by the population within 5 km, then every
neighbourhood adds up the ratios of the clinics it can reach.
"""

from fcaccess import DemandZone, GeoPoint, ProviderSite, ZoneGeometry, two_step_fca
from fcaccess.costs import buffer_cost_matrix


def site(pid, x, y, capacity):
    return ProviderSite(pid, GeoPoint(x, y, "planar"), capacity)


def hood(zid, x, y, population):
    return DemandZone(zid, ZoneGeometry("Point", (x, y), "planar"), population)


clinics = [site("north", 0, 4000, 12), site("centre", 0, 0, 30), site("east", 9000, 0, 6)]
hoods = [hood("old town", 500, 500, 40000), hood("harbour", -3000, 1000, 15000),
         hood("hillside", 1000, 7000, 8000), hood("far fields", 20000, 0, 3000)]

# only pairs within the catchment are kept; "east" has nobody within 5 km
# and is set aside with a warning
costs = buffer_cost_matrix(hoods, clinics, 5000.0, "euclidean")
print(f"{len(costs)} neighbourhood/clinic pairs within 5 km")

result = two_step_fca(clinics, hoods, costs, threshold=5000.0, per_capita=100000)

for pid, r in result.ratios.items():
    print(f"clinic {pid:7s} ratio {r.ratio:.6f}  (demand seen {r.weighted_demand:,.0f})")

# clinics per 100,000 residents
for zid, acc in result.zones.items():
    print(f"{zid:11s} {acc.final_index:8.2f}")
