"""
Natural breaks for a choropleth
===============================

Scores from the bundled synthetic case study are grouped into five
classes that minimise within-class variance. The goodness of variance
fit shows how much of the spread the classes explain.
"""

from pathlib import Path

import numpy as np

from fcaccess import RingScheme, enhanced_two_step_fca, jenks_breaks, summary_stats
from fcaccess.costs import buffer_cost_matrix
from fcaccess.demand import adjust_zones, load_weights
from fcaccess.ingest import load_providers, load_zones

data = Path(__file__).resolve().parent.parent / "tests" / "data" / "case_study"
ages = ["age_0_44", "age_45_54", "age_55_64", "age_65_74", "age_75_up"]

providers = load_providers(data / "providers.geojson", "id", "capacity")
zones = adjust_zones(load_zones(data / "zones.geojson", "id", age_fields=ages), load_weights(data / "weights.csv"))

scheme = RingScheme.default_buffer()
costs = buffer_cost_matrix(zones, providers, scheme.cutoff, "haversine")
result = enhanced_two_step_fca(providers, zones, costs, scheme, per_capita=100000)

s = summary_stats(result)
print(f"{s.count} zones, index {s.min:.2f} to {s.max:.2f}, median {s.median:.2f}")
print(f"{s.zero_count} zones without access: {', '.join(s.zero_ids)}")

for k in (2, 3, 5):
    c = jenks_breaks(result.final_index(), k)
    sizes = np.bincount(list(c.assignment.values()))[1:]
    print(f"k={k}: breaks {np.round(c.breaks, 2)}  class sizes {sizes}  gvf {c.gvf:.3f}")
