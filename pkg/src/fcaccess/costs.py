"""Sparse zone/provider cost tables shared by buffer and network modes."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ContractError, SchemaError, ValidationError
from .geometry import SpatialIndex, default_metric, representative_point
from .ingest import DemandZone, ProviderSite

DEMAND_TO_PROVIDER = "demand-to-provider"
PROVIDER_TO_DEMAND = "provider-to-demand"
DIRECTIONS = (DEMAND_TO_PROVIDER, PROVIDER_TO_DEMAND)

MATRIX_HEADER = ("zone_id", "provider_id", "cost_s")


@dataclass(frozen=True)
class CostMatrix:
    """Costs keyed by ``(zone_id, provider_id)``, only where cost <= cutoff.

    ``unit`` is ``"s"`` for travel times and ``"m"`` for buffer distances.
    ``cutoff`` is None when unknown (e.g. a matrix read from a cache file).
    """

    entries: Mapping[tuple[str, str], float]
    cutoff: float | None = None
    unit: str = "s"
    direction: str = DEMAND_TO_PROVIDER
    unreached_zones: tuple[str, ...] = ()
    unreached_providers: tuple[str, ...] = ()

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ContractError(f"unknown direction {self.direction!r}")
        bad = [k for k, c in self.entries.items()
               if not (c >= 0 and math.isfinite(c)) or (self.cutoff is not None and c > self.cutoff)]
        if bad:
            raise ContractError(f"{len(bad)} cost entries are negative or beyond the cutoff, e.g. {bad[0]}")

    def __len__(self):
        return len(self.entries)

    def check_ids(self, zone_ids: Iterable[str], provider_ids: Iterable[str]):
        zone_ids, provider_ids = set(zone_ids), set(provider_ids)
        problems = [f"unknown zone id {z!r}" for z in sorted({z for z, _ in self.entries} - zone_ids)]
        problems += [f"unknown provider id {p!r}" for p in sorted({p for _, p in self.entries} - provider_ids)]
        if problems:
            raise ValidationError("cost matrix references unknown ids", problems)


def buffer_cost_matrix(zones: Iterable[DemandZone], providers: Iterable[ProviderSite],
                       radius: float, metric: str | None = None) -> CostMatrix:
    """Straight-line costs (meters) from zone representative points to providers.

    Only pairs within ``radius`` are kept; the boundary is inclusive.
    """
    zones, providers = list(zones), list(providers)
    index = SpatialIndex((z.id, representative_point(z)) for z in zones)
    entries = {}
    for p in sorted(providers, key=lambda s: s.id):
        for zid, d in index.radius_query(p.location, radius, metric or default_metric(p.location.crs)):
            entries[(zid, p.id)] = d
    return CostMatrix(entries, cutoff=radius, unit="m")


def format_cost_matrix(matrix: CostMatrix) -> str:
    """CSV text with header ``zone_id,provider_id,cost_s``, rows sorted by key."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MATRIX_HEADER)
    for (z, p) in sorted(matrix.entries):
        writer.writerow([z, p, repr(float(matrix.entries[(z, p)]))])
    return buf.getvalue()


def write_cost_matrix(matrix: CostMatrix, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(format_cost_matrix(matrix))


def read_cost_matrix(path, direction: str = DEMAND_TO_PROVIDER) -> CostMatrix:
    with open(os.fspath(path), newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in MATRIX_HEADER if c not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(f"cost matrix is missing column {missing[0]!r}", field=missing[0])
        entries = {}
        problems = []
        for i, row in enumerate(reader):
            key = (row["zone_id"], row["provider_id"])
            try:
                cost = float(row["cost_s"])
            except ValueError:
                problems.append(f"row {i}: cost_s {row['cost_s']!r} is not a number")
                continue
            if not (cost >= 0 and math.isfinite(cost)):
                problems.append(f"row {i}: cost_s must be non-negative, got {cost!r}")
            if key in entries:
                problems.append(f"row {i}: duplicate pair {key}")
            entries[key] = cost
    if problems:
        raise ValidationError("invalid cost matrix", problems)
    return CostMatrix(entries, cutoff=None, unit="s", direction=direction)
