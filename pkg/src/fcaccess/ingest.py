"""Domain types and loaders for providers, demand zones and road networks.

Inputs are GeoJSON FeatureCollections or CSV files. Loading is strict:
every record is checked and the whole load fails with a single report
listing each offending id or row index. Nothing is silently dropped.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import ContractError, GeometryError, SchemaError, ValidationError

LONLAT = "lonlat"
PLANAR = "planar"
CRS_KINDS = (LONLAT, PLANAR)

METERS_PER_MILE = 1609.344

ROAD_COLUMNS = ("from_id", "to_id", "from_x", "from_y", "to_x", "to_y", "cost_s", "oneway")

WALK_SPEED_KMH = 5.0


@dataclass(frozen=True)
class GeoPoint:
    x: float
    y: float
    crs: str = LONLAT

    def __post_init__(self):
        if self.crs not in CRS_KINDS:
            raise ContractError(f"unknown crs {self.crs!r}; expected one of {CRS_KINDS}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ContractError(f"non-finite coordinate ({self.x}, {self.y})")
        if self.crs == LONLAT and not (-180.0 <= self.x <= 180.0 and -90.0 <= self.y <= 90.0):
            raise ContractError(f"lon/lat out of range: ({self.x}, {self.y})")


@dataclass(frozen=True)
class ProviderSite:
    id: str
    location: GeoPoint
    capacity: float | None


@dataclass(frozen=True)
class ZoneGeometry:
    """Point, Polygon or MultiPolygon with GeoJSON nesting stored as tuples."""

    kind: str
    coordinates: tuple
    crs: str = LONLAT

    def polygons(self) -> list[tuple]:
        """Polygons as lists of rings (exterior first). Empty for points."""
        if self.kind == "Polygon":
            return [self.coordinates]
        if self.kind == "MultiPolygon":
            return list(self.coordinates)
        return []

    def to_geojson(self) -> dict:
        return {"type": self.kind, "coordinates": _as_lists(self.coordinates)}


@dataclass(frozen=True)
class DemandZone:
    id: str
    geometry: ZoneGeometry
    demand: float | None
    age_counts: tuple[tuple[str, float], ...] | None = None
    # Source properties, kept so outputs can reproduce the input feature.
    properties: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def with_demand(self, demand: float) -> "DemandZone":
        return DemandZone(self.id, self.geometry, demand, self.age_counts, self.properties)


@dataclass(frozen=True)
class RoadNetwork:
    """Road graph. ``edges`` hold ``(from, to, cost_s, bidirectional)``."""

    nodes: Mapping[str, GeoPoint]
    edges: tuple[tuple[str, str, float, bool], ...]

    def __post_init__(self):
        problems = []
        for i, (a, b, cost, _) in enumerate(self.edges):
            if a not in self.nodes or b not in self.nodes:
                problems.append(f"edge {i}: endpoint {a if a not in self.nodes else b!r} is not a node")
            if not (math.isfinite(cost) and cost > 0):
                problems.append(f"edge {i}: cost_s must be positive and finite, got {cost!r}")
        if problems:
            raise ValidationError("invalid road network", problems)

    def directed_edges(self) -> list[tuple[str, str, float]]:
        out = []
        for a, b, cost, both in self.edges:
            out.append((a, b, cost))
            if both:
                out.append((b, a, cost))
        return out

    @cached_property
    def adjacency(self) -> dict[str, list[tuple[str, float]]]:
        adj: dict[str, list[tuple[str, float]]] = {n: [] for n in self.nodes}
        for a, b, cost in self.directed_edges():
            adj[a].append((b, cost))
        return adj

    @cached_property
    def reverse_adjacency(self) -> dict[str, list[tuple[str, float]]]:
        adj: dict[str, list[tuple[str, float]]] = {n: [] for n in self.nodes}
        for a, b, cost in self.directed_edges():
            adj[b].append((a, cost))
        return adj

    @cached_property
    def node_index(self):
        from .geometry import SpatialIndex

        return SpatialIndex(self.nodes.items())


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _as_lists(obj):
    if isinstance(obj, (tuple, list)):
        return [_as_lists(o) for o in obj]
    return obj


def _as_tuples(obj):
    if isinstance(obj, (tuple, list)):
        return tuple(_as_tuples(o) for o in obj)
    return obj


def _read_document(document) -> tuple[str, Any]:
    """Return ``("geojson", dict)`` or ``("csv", list_of_rows)``."""
    if isinstance(document, Mapping):
        return "geojson", document
    path = Path(os.fspath(document))
    if path.suffix.lower() == ".csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
            return "csv", (reader.fieldnames or [], rows)
    with open(path, encoding="utf-8") as fh:
        return "geojson", json.load(fh)


def _features(doc: Mapping) -> list[dict]:
    if doc.get("type") != "FeatureCollection" or not isinstance(doc.get("features"), list):
        raise SchemaError("expected a GeoJSON FeatureCollection")
    return doc["features"]


def _format_id(value) -> str | None:
    if value is None or isinstance(value, bool):
        return None
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    text = str(value).strip()
    return text or None


def _parse_number(value) -> float | None:
    if isinstance(value, bool) or value is None:
        return None
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(str(value).strip())
    except ValueError:
        return None


def _require_fields(available: Iterable[str], names: Iterable[str]):
    available = set(available)
    for name in names:
        if name not in available:
            raise SchemaError(f"missing field {name!r}", field=name)


def _check_duplicates(ids: Sequence[str]):
    dupes = sorted(i for i, n in Counter(ids).items() if n > 1)
    if dupes:
        raise ValidationError("duplicate ids", [f"id {d!r} appears more than once" for d in dupes])


def _make_point(x, y, crs, where) -> GeoPoint:
    try:
        return GeoPoint(float(x), float(y), crs)
    except (TypeError, ValueError) as exc:
        raise ValidationError("invalid coordinates", [f"{where}: {exc}"]) from None


# ---------------------------------------------------------------------------
# providers
# ---------------------------------------------------------------------------


def load_providers(document, id_field: str, capacity_field: str | None,
                   crs: str = LONLAT, x_field: str | None = None,
                   y_field: str | None = None) -> list[ProviderSite]:
    """Load provider sites from point GeoJSON or a CSV with coordinate columns.

    ``capacity_field`` may be None when only locations are needed (for
    example when building a cost matrix); capacities are then None.
    CSV coordinates default to ``lon``/``lat`` columns, or ``x``/``y``
    when ``crs="planar"``.
    """
    if crs not in CRS_KINDS:
        raise ContractError(f"unknown crs {crs!r}")
    kind, doc = _read_document(document)
    wanted = [id_field] + ([capacity_field] if capacity_field else [])
    records = []  # (where, id raw, capacity raw, x, y)
    if kind == "csv":
        header, rows = doc
        xf = x_field or ("lon" if crs == LONLAT else "x")
        yf = y_field or ("lat" if crs == LONLAT else "y")
        _require_fields(header, wanted + [xf, yf])
        for i, row in enumerate(rows):
            records.append((f"row {i}", row[id_field], row[capacity_field] if capacity_field else None,
                            row[xf], row[yf]))
    else:
        for i, feat in enumerate(_features(doc)):
            props = feat.get("properties") or {}
            _require_fields(props, wanted)
            geom = feat.get("geometry") or {}
            if geom.get("type") != "Point":
                raise ValidationError("provider features must be points",
                                      [f"feature {i}: geometry type {geom.get('type')!r}"])
            x, y = geom["coordinates"][:2]
            records.append((f"feature {i}", props[id_field],
                            props[capacity_field] if capacity_field else None, x, y))

    problems = []
    sites = []
    for where, raw_id, raw_cap, x, y in records:
        sid = _format_id(raw_id)
        if sid is None:
            problems.append(f"{where}: empty id")
            continue
        cap = None
        if capacity_field:
            cap = _parse_number(raw_cap)
            if cap is None or not math.isfinite(cap) or cap < 0:
                problems.append(f"{where} (id {sid!r}): capacity must be a non-negative number, got {raw_cap!r}")
                continue
        try:
            loc = GeoPoint(float(x), float(y), crs)
        except (TypeError, ValueError) as exc:
            problems.append(f"{where} (id {sid!r}): {exc}")
            continue
        sites.append(ProviderSite(sid, loc, cap))
    if problems:
        raise ValidationError("invalid provider records", problems)
    _check_duplicates([s.id for s in sites])
    return sites


def dump_providers(sites: Iterable[ProviderSite], id_field: str = "id",
                   capacity_field: str = "capacity") -> dict:
    features = []
    for s in sites:
        props = {id_field: s.id}
        if s.capacity is not None:
            props[capacity_field] = s.capacity
        features.append({"type": "Feature",
                         "geometry": {"type": "Point", "coordinates": [s.location.x, s.location.y]},
                         "properties": props})
    return {"type": "FeatureCollection", "features": features}


# ---------------------------------------------------------------------------
# zones
# ---------------------------------------------------------------------------


def _check_ring(ring, where) -> list[str]:
    if len(ring) < 4:
        return [f"{where}: ring has {len(ring)} vertices, need at least 4"]
    if tuple(ring[0][:2]) != tuple(ring[-1][:2]):
        return [f"{where}: ring is not closed"]
    return []


def _zone_geometry(geom: Mapping, crs: str, where: str) -> ZoneGeometry:
    gtype = geom.get("type")
    coords = geom.get("coordinates")
    if gtype not in ("Point", "Polygon", "MultiPolygon") or coords is None:
        raise ValidationError("unsupported zone geometry", [f"{where}: geometry type {gtype!r}"])
    coords = _as_tuples(coords)
    if gtype == "Point":
        coords = coords[:2]
        _make_point(*coords, crs, where)
        return ZoneGeometry(gtype, coords, crs)
    polys = [coords] if gtype == "Polygon" else list(coords)
    problems = []
    for p, poly in enumerate(polys):
        if not poly:
            problems.append(f"{where}: polygon {p} has no rings")
        for r, ring in enumerate(poly):
            problems += _check_ring(ring, f"{where} polygon {p} ring {r}")
            for vx, vy, *_ in ring:
                try:
                    GeoPoint(float(vx), float(vy), crs)
                except (TypeError, ValueError) as exc:
                    problems.append(f"{where}: {exc}")
                    break
    if problems:
        raise GeometryError("invalid polygon geometry:\n  " + "\n  ".join(problems))
    return ZoneGeometry(gtype, coords, crs)


def load_zones(document, id_field: str, demand_field: str | None = None,
               age_fields: Sequence[str] | None = None, crs: str = LONLAT,
               x_field: str | None = None, y_field: str | None = None) -> list[DemandZone]:
    """Load demand zones (polygons or points).

    Supply at most one of ``demand_field`` / ``age_fields``. With age fields
    the zone's ``age_counts`` are filled and ``demand`` stays None until an
    age weighting is applied (see :mod:`fcaccess.demand`). With neither,
    demand stays None, which is enough for cost-matrix building.
    """
    if demand_field and age_fields:
        raise ContractError("give either demand_field or age_fields, not both")
    if crs not in CRS_KINDS:
        raise ContractError(f"unknown crs {crs!r}")
    age_fields = list(age_fields or [])
    wanted = [id_field] + ([demand_field] if demand_field else []) + age_fields
    kind, doc = _read_document(document)
    records = []  # (where, props, geometry-or-exception)
    if kind == "csv":
        header, rows = doc
        xf = x_field or ("lon" if crs == LONLAT else "x")
        yf = y_field or ("lat" if crs == LONLAT else "y")
        _require_fields(header, wanted + [xf, yf])
        for i, row in enumerate(rows):
            records.append((f"row {i}", dict(row), {"type": "Point", "coordinates": [row[xf], row[yf]]}))
    else:
        for i, feat in enumerate(_features(doc)):
            props = feat.get("properties") or {}
            _require_fields(props, wanted)
            records.append((f"feature {i}", dict(props), feat.get("geometry") or {}))

    problems = []
    zones = []
    for where, props, geom in records:
        zid = _format_id(props.get(id_field))
        if zid is None:
            problems.append(f"{where}: empty id")
            continue
        tag = f"{where} (id {zid!r})"
        try:
            geometry = _zone_geometry(geom, crs, tag)
        except ValidationError as exc:
            problems += exc.problems
            continue
        demand = None
        if demand_field:
            demand = _parse_number(props.get(demand_field))
            if demand is None or not math.isfinite(demand) or demand < 0:
                problems.append(f"{tag}: demand must be a non-negative number, got {props.get(demand_field)!r}")
                continue
        ages = None
        if age_fields:
            counts = [(name, _parse_number(props.get(name))) for name in age_fields]
            bad = [name for name, n in counts if n is None or not math.isfinite(n) or n < 0]
            if bad:
                problems += [f"{tag}: age count {name!r} must be a non-negative number, "
                             f"got {props.get(name)!r}" for name in bad]
                continue
            ages = tuple(counts)
        zones.append(DemandZone(zid, geometry, demand, ages, props))
    if problems:
        raise ValidationError("invalid zone records", problems)
    _check_duplicates([z.id for z in zones])
    return zones


def dump_zones(zones: Iterable[DemandZone], id_field: str = "id",
               demand_field: str | None = "demand") -> dict:
    features = []
    for z in zones:
        props = dict(z.properties)
        props.setdefault(id_field, z.id)
        if demand_field and z.demand is not None:
            props[demand_field] = z.demand
        if z.age_counts:
            for name, n in z.age_counts:
                props.setdefault(name, n)
        features.append({"type": "Feature", "geometry": z.geometry.to_geojson(), "properties": props})
    return {"type": "FeatureCollection", "features": features}


# ---------------------------------------------------------------------------
# road network
# ---------------------------------------------------------------------------


def _parse_bool(value, where) -> bool:
    text = "" if value is None else str(value).strip().lower()
    if text in ("", "false", "0", "no"):
        return False
    if text in ("true", "1", "yes"):
        return True
    raise ValidationError("invalid oneway flag", [f"{where}: oneway must be true/false, got {value!r}"])


def load_road_network(document, crs: str = LONLAT, mode: str = "driving",
                      walk_speed_kmh: float = WALK_SPEED_KMH) -> RoadNetwork:
    """Load a road graph from an edge CSV or GeoJSON LineStrings.

    CSV rows may leave an endpoint's coordinates blank when another row
    defines that node. In ``mode="walking"`` edge costs are recomputed from
    edge length (``length_m`` column/property, else the straight-line
    endpoint distance) at ``walk_speed_kmh``.
    """
    if mode not in ("driving", "walking"):
        raise ContractError(f"unknown travel mode {mode!r}")
    if walk_speed_kmh <= 0:
        raise ContractError("walk_speed_kmh must be positive")
    kind, doc = _read_document(document)
    raw = []  # (where, from_id, to_id, from_xy, to_xy, cost, oneway, length)
    if kind == "csv":
        header, rows = doc
        _require_fields(header, ROAD_COLUMNS[:7])
        for i, row in enumerate(rows):
            where = f"edge {i}"
            raw.append((where, row["from_id"], row["to_id"], (row["from_x"], row["from_y"]),
                        (row["to_x"], row["to_y"]), row["cost_s"],
                        _parse_bool(row.get("oneway"), where), row.get("length_m")))
    else:
        for i, feat in enumerate(_features(doc)):
            where = f"edge {i}"
            props = feat.get("properties") or {}
            _require_fields(props, ["cost_s"])
            geom = feat.get("geometry") or {}
            if geom.get("type") != "LineString" or len(geom.get("coordinates") or []) < 2:
                raise ValidationError("road features must be LineStrings", [f"{where}: bad geometry"])
            first, last = geom["coordinates"][0][:2], geom["coordinates"][-1][:2]
            a = props.get("from_id", f"{first[0]},{first[1]}")
            b = props.get("to_id", f"{last[0]},{last[1]}")
            raw.append((where, a, b, tuple(first), tuple(last), props["cost_s"],
                        _parse_bool(props.get("oneway"), where), props.get("length_m")))

    problems = []
    nodes: dict[str, GeoPoint] = {}
    for where, a, b, axy, bxy, *_ in raw:
        for nid, (x, y) in ((a, axy), (b, bxy)):
            nid = _format_id(nid)
            if nid is None:
                problems.append(f"{where}: empty node id")
                continue
            if x in (None, "") and y in (None, ""):
                continue
            try:
                pt = GeoPoint(float(x), float(y), crs)
            except (TypeError, ValueError) as exc:
                problems.append(f"{where}: node {nid!r}: {exc}")
                continue
            if nid in nodes and nodes[nid] != pt:
                problems.append(f"{where}: node {nid!r} has conflicting coordinates")
            nodes.setdefault(nid, pt)
    if problems:
        raise ValidationError("invalid road network", problems)

    edges = []
    for where, a, b, _, _, cost, oneway, length in raw:
        a, b = _format_id(a), _format_id(b)
        for nid in (a, b):
            if nid not in nodes:
                problems.append(f"{where}: dangling endpoint {nid!r} has no coordinates")
        c = _parse_number(cost)
        if c is None or not math.isfinite(c) or c <= 0:
            problems.append(f"{where}: cost_s must be positive and finite, got {cost!r}")
            continue
        if mode == "walking" and a in nodes and b in nodes:
            meters = _parse_number(length)
            if meters is None:
                from .geometry import distance

                meters = distance(nodes[a], nodes[b])
            c = meters / (walk_speed_kmh / 3.6)
            if not c > 0:
                problems.append(f"{where}: zero-length edge in walking mode")
                continue
        edges.append((a, b, c, not oneway))
    if problems:
        raise ValidationError("invalid road network", problems)
    return RoadNetwork(nodes, tuple(edges))


def dump_road_network(network: RoadNetwork) -> str:
    """Serialize a network back to the edge-CSV format."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ROAD_COLUMNS)
    for a, b, cost, both in network.edges:
        pa, pb = network.nodes[a], network.nodes[b]
        writer.writerow([a, b, repr(pa.x), repr(pa.y), repr(pb.x), repr(pb.y), repr(cost),
                         "false" if both else "true"])
    return buf.getvalue()
