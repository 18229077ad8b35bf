"""Spatial accessibility scoring with two-step floating catchment areas.

Supply points (providers with a capacity) and demand zones (with a
population) are linked either by straight-line distance buffers or by
road-network travel times, then scored with the classic (2SFCA) or
enhanced, distance-decayed (E2SFCA) method.
"""

from .classify import Classification, jenks_breaks, read_results, summary_stats, write_results
from .costs import CostMatrix, buffer_cost_matrix, read_cost_matrix, write_cost_matrix
from .demand import AgeWeights, adjust_zones, age_adjusted_demand, derive_age_weights
from .engine import (
    AccessResult,
    ProviderRatio,
    RingScheme,
    accessibility,
    assign_ring,
    enhanced_two_step_fca,
    gaussian_ring_weights,
    step1_ratios,
    two_step_fca,
)
from .errors import (
    AccessError,
    ContractError,
    GeometryError,
    SchemaError,
    SnapError,
    ValidationError,
)
from .geometry import SpatialIndex, distance, representative_point
from .ingest import (
    DemandZone,
    GeoPoint,
    ProviderSite,
    RoadNetwork,
    ZoneGeometry,
    load_providers,
    load_road_network,
    load_zones,
)
from .network import build_cost_matrix, shortest_path_times, snap

__version__ = "0.1.0"
