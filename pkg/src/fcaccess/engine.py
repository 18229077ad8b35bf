"""Two-step floating catchment area scoring (classic and enhanced).

Step 1 gives every provider a supply/demand ratio: its capacity divided
by the decay-weighted demand of the zones inside its catchment rings.
Step 2 gives every zone the decay-weighted sum of the ratios of providers
inside its rings. The classic method is the single-ring case with weight 1.

Both steps read the same cost table and ring scheme. Sums use
``math.fsum``; being correctly rounded, they do not depend on input order
or on how the work is split, so results are bit-reproducible.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .costs import CostMatrix
from .errors import ContractError
from .ingest import METERS_PER_MILE, DemandZone, ProviderSite

log = logging.getLogger(__name__)

DEFAULT_DECAY = (1.0, 0.68, 0.22)
DEFAULT_BUFFER_MILES = (5.0, 10.0, 15.0)
DEFAULT_TRAVEL_MINUTES = (10.0, 20.0, 30.0)


@dataclass(frozen=True)
class RingScheme:
    """Ascending ring upper bounds (meters or seconds) with decay weights."""

    thresholds: tuple[float, ...]
    weights: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        t = tuple(float(x) for x in self.thresholds)
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "weights", w)
        if not 1 <= len(t) <= 3:
            raise ContractError(f"need 1 to 3 rings, got {len(t)}")
        if len(w) != len(t):
            raise ContractError(f"{len(t)} thresholds but {len(w)} weights")
        if not all(math.isfinite(x) and x > 0 for x in t):
            raise ContractError(f"thresholds must be positive, got {t}")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ContractError(f"thresholds must be strictly ascending, got {t}")
        if not all(0 < x <= 1 for x in w):
            raise ContractError(f"weights must lie in (0, 1], got {w}")

    def __len__(self):
        return len(self.thresholds)

    @property
    def cutoff(self) -> float:
        return self.thresholds[-1]

    @classmethod
    def single(cls, threshold: float) -> "RingScheme":
        return cls((threshold,), (1.0,))

    @classmethod
    def default_buffer(cls) -> "RingScheme":
        """5, 10 and 15 miles (in meters) with weights 1, 0.68, 0.22."""
        return cls(tuple(m * METERS_PER_MILE for m in DEFAULT_BUFFER_MILES), DEFAULT_DECAY)

    @classmethod
    def default_travel(cls) -> "RingScheme":
        """10, 20 and 30 minutes (in seconds) with weights 1, 0.68, 0.22."""
        return cls(tuple(m * 60.0 for m in DEFAULT_TRAVEL_MINUTES), DEFAULT_DECAY)


@dataclass(frozen=True)
class ProviderRatio:
    provider_id: str
    ratio: float
    weighted_demand: float
    served: bool


@dataclass(frozen=True)
class ZoneAccess:
    final_index: float
    ring_values: tuple[float, ...]


@dataclass(frozen=True)
class AccessResult:
    """Scores per zone id plus the step-1 ratios that produced them.

    ``ring_values`` are unscaled; ``final_index`` is ``per_capita`` times
    their total.
    """

    zones: Mapping[str, ZoneAccess]
    ratios: Mapping[str, ProviderRatio]
    scheme: RingScheme
    per_capita: float
    enhanced: bool

    def final_index(self) -> dict[str, float]:
        return {z: a.final_index for z, a in self.zones.items()}


def assign_ring(cost: float, scheme: RingScheme) -> int | None:
    """1-based ring holding ``cost``, or None beyond the last threshold.

    Ring 1 is ``[0, t1]`` and ring r is ``(t_{r-1}, t_r]``.
    """
    if not cost >= 0:
        raise ContractError(f"cost must be non-negative, got {cost!r}")
    i = bisect_left(scheme.thresholds, cost)
    return i + 1 if i < len(scheme.thresholds) else None


def gaussian_ring_weights(thresholds: Sequence[float], bandwidth: float) -> tuple[float, ...]:
    """Gaussian decay evaluated at ring midpoints, normalised so ring 1 is 1."""
    if not (math.isfinite(bandwidth) and bandwidth > 0):
        raise ContractError(f"bandwidth must be positive, got {bandwidth!r}")
    bounds = [0.0] + [float(t) for t in thresholds]
    mids = [(a + b) / 2 for a, b in zip(bounds, bounds[1:])]
    two_b2 = 2 * bandwidth * bandwidth
    weights = tuple(math.exp(-(m * m - mids[0] * mids[0]) / two_b2) for m in mids)
    if any(w <= 0 for w in weights) or any(b >= a for a, b in zip(weights, weights[1:])):
        raise ContractError(f"bandwidth {bandwidth} gives degenerate weights {weights}")
    return weights


def _entries(costs) -> Mapping[tuple[str, str], float]:
    return costs.entries if isinstance(costs, CostMatrix) else costs


def _ringed_pairs(costs, scheme, zone_ids, provider_ids):
    """Yield ``(zone, provider, ring)`` for every pair inside some ring."""
    entries = _entries(costs)
    unknown = [k for k in entries if k[0] not in zone_ids or k[1] not in provider_ids]
    if unknown:
        raise ContractError(f"cost entries reference unknown ids, e.g. {sorted(unknown)[0]}")
    for (z, p), c in entries.items():
        r = assign_ring(c, scheme)
        if r is not None:
            yield z, p, r


def step1_ratios(providers: Iterable[ProviderSite], zones: Iterable[DemandZone],
                 costs: CostMatrix | Mapping[tuple[str, str], float],
                 scheme: RingScheme) -> dict[str, ProviderRatio]:
    """Supply/weighted-demand ratio for every provider, keyed by id."""
    providers = {p.id: p for p in providers}
    demand = {}
    for z in zones:
        if z.demand is None:
            raise ContractError(f"zone {z.id!r} has no demand value")
        demand[z.id] = z.demand
    for p in providers.values():
        if p.capacity is None:
            raise ContractError(f"provider {p.id!r} has no capacity value")

    terms = defaultdict(list)
    for z, p, r in _ringed_pairs(costs, scheme, demand, providers):
        terms[p].append(demand[z] * scheme.weights[r - 1])

    ratios = {}
    unserved = []
    for pid in sorted(providers):
        denom = math.fsum(terms.get(pid, ()))
        if denom > 0:
            ratios[pid] = ProviderRatio(pid, providers[pid].capacity / denom, denom, True)
        else:
            ratios[pid] = ProviderRatio(pid, 0.0, 0.0, False)
            unserved.append(pid)
    if unserved:
        log.warning("%d provider(s) have no demand in their catchment and are excluded: %s",
                    len(unserved), ", ".join(unserved[:10]) + (" ..." if len(unserved) > 10 else ""))
    return ratios


def accessibility(providers: Iterable[ProviderSite], zones: Iterable[DemandZone],
                  costs: CostMatrix | Mapping[tuple[str, str], float],
                  scheme: RingScheme, per_capita: float = 1.0,
                  enhanced: bool | None = None) -> AccessResult:
    """Run both steps and return per-zone accessibility.

    ``enhanced`` only controls whether per-ring values are reported as
    such; it defaults to True for multi-ring schemes.
    """
    if not (math.isfinite(per_capita) and per_capita > 0):
        raise ContractError(f"per_capita must be positive, got {per_capita!r}")
    providers, zones = list(providers), list(zones)
    ratios = step1_ratios(providers, zones, costs, scheme)
    zone_ids = {z.id for z in zones}

    rings = defaultdict(lambda: [[] for _ in scheme.thresholds])
    for z, p, r in _ringed_pairs(costs, scheme, zone_ids, ratios):
        rings[z][r - 1].append(ratios[p].ratio * scheme.weights[r - 1])

    out = {}
    for zid in sorted(zone_ids):
        per_ring = rings.get(zid)
        if per_ring is None:
            out[zid] = ZoneAccess(0.0, (0.0,) * len(scheme))
            continue
        total = math.fsum(t for ring in per_ring for t in ring)
        out[zid] = ZoneAccess(per_capita * total, tuple(math.fsum(ring) for ring in per_ring))
    if enhanced is None:
        enhanced = len(scheme) > 1
    return AccessResult(out, ratios, scheme, float(per_capita), enhanced)


def two_step_fca(providers, zones, costs, threshold: float, per_capita: float = 1.0) -> AccessResult:
    """Classic 2SFCA with a single catchment threshold."""
    return accessibility(providers, zones, costs, RingScheme.single(threshold), per_capita, enhanced=False)


def enhanced_two_step_fca(providers, zones, costs, scheme: RingScheme | None = None,
                          per_capita: float = 1.0) -> AccessResult:
    """E2SFCA; ``scheme`` defaults to 5/10/15 mile rings weighted 1/0.68/0.22."""
    scheme = scheme or RingScheme.default_buffer()
    return accessibility(providers, zones, costs, scheme, per_capita, enhanced=True)
