"""
Weighting population by age
===========================

Older residents need more care. Band weights are each band's incidence
rate over the youngest band's rate, rounded to whole numbers, and zone
demand becomes the weighted head count.
"""

from fcaccess import DemandZone, ZoneGeometry, adjust_zones, age_adjusted_demand, derive_age_weights

labels = ["0-44", "45-54", "55-64", "65-74", "75+"]
rates = [11, 77, 561, 1171, 2080]  # new cases per million
weights = derive_age_weights(rates, labels)
for label, rate, w in weights.bands:
    print(f"{label:6s} rate {rate:6.0f}  weight {w}")

counts = [100, 200, 100, 50, 50]
print("plain head count:", sum(counts))
print("adjusted demand :", age_adjusted_demand(counts, weights))

# two tracts with the same population but different age mix
young = DemandZone("young", ZoneGeometry("Point", (0.0, 0.0), "planar"), None,
                   tuple(zip(labels, [3000, 600, 300, 80, 20])))
old = DemandZone("retired", ZoneGeometry("Point", (0.0, 0.0), "planar"), None,
                 tuple(zip(labels, [1000, 700, 900, 800, 600])))
for z in adjust_zones([young, old], weights):
    print(f"{z.id:8s} population {sum(n for _, n in z.age_counts)}  adjusted {z.demand:,.0f}")
