"""Distances, zone representative points and radius queries.

Two metrics are supported: ``"euclidean"`` for planar-meter coordinates
and ``"haversine"`` for lon/lat degrees on a sphere of mean Earth radius.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np
from scipy.spatial import cKDTree

from .errors import ContractError, GeometryError
from .ingest import LONLAT, PLANAR, DemandZone, GeoPoint, ZoneGeometry

EARTH_RADIUS_M = 6_371_000.0

EUCLIDEAN = "euclidean"
HAVERSINE = "haversine"
_METRIC_CRS = {EUCLIDEAN: PLANAR, HAVERSINE: LONLAT}

# Relative slack on tree pre-filter radii; membership is re-decided exactly.
_SLACK = 1e-9


def default_metric(crs: str) -> str:
    return HAVERSINE if crs == LONLAT else EUCLIDEAN


def _check_metric(metric: str, crs: str):
    if metric not in _METRIC_CRS:
        raise ContractError(f"unknown metric {metric!r}")
    if _METRIC_CRS[metric] != crs:
        raise ContractError(f"metric {metric!r} needs {_METRIC_CRS[metric]!r} coordinates, got {crs!r}")


def haversine(lon1: float, lat1: float, lon2: float, lat2: float) -> float:
    """Great-circle distance in meters between two lon/lat points."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlmb = math.radians(lon2 - lon1)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def distance(a: GeoPoint, b: GeoPoint, metric: str | None = None) -> float:
    """Distance in meters. ``metric`` defaults to the one matching the crs."""
    if a.crs != b.crs:
        raise ContractError(f"points have different crs ({a.crs!r} vs {b.crs!r})")
    metric = metric or default_metric(a.crs)
    _check_metric(metric, a.crs)
    if metric == HAVERSINE:
        return haversine(a.x, a.y, b.x, b.y)
    return math.hypot(a.x - b.x, a.y - b.y)


# ---------------------------------------------------------------------------
# polygons
# ---------------------------------------------------------------------------


def _ring_area_centroid(ring) -> tuple[float, float, float]:
    """Signed area and area-weighted centroid sums of a closed ring."""
    a = cx = cy = 0.0
    # shift to the first vertex to limit cancellation
    x0, y0 = ring[0][0], ring[0][1]
    for (x1, y1, *_), (x2, y2, *_) in zip(ring[:-1], ring[1:]):
        x1, y1, x2, y2 = x1 - x0, y1 - y0, x2 - x0, y2 - y0
        cross = x1 * y2 - x2 * y1
        a += cross
        cx += (x1 + x2) * cross
        cy += (y1 + y2) * cross
    a *= 0.5
    if a == 0:
        return 0.0, x0, y0
    return a, cx / (6 * a) + x0, cy / (6 * a) + y0


def polygon_area_centroid(rings) -> tuple[float, float, float]:
    """Area and centroid of one polygon given as (exterior, *holes)."""
    total = sx = sy = 0.0
    for i, ring in enumerate(rings):
        a, cx, cy = _ring_area_centroid(ring)
        a = abs(a) if i == 0 else -abs(a)
        total += a
        sx += a * cx
        sy += a * cy
    if total <= 0:
        return 0.0, float("nan"), float("nan")
    return total, sx / total, sy / total


def point_in_polygon(x: float, y: float, rings) -> bool:
    """Even-odd test; points exactly on an edge may fall either side."""
    inside = False
    for ring in rings:
        for (x1, y1, *_), (x2, y2, *_) in zip(ring[:-1], ring[1:]):
            if (y1 > y) != (y2 > y):
                xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
                if x < xi:
                    inside = not inside
    return inside


def point_in_geometry(x: float, y: float, geometry: ZoneGeometry) -> bool:
    return any(point_in_polygon(x, y, poly) for poly in geometry.polygons())


def _crossings(rings, y: float) -> list[float]:
    xs = []
    for ring in rings:
        for (x1, y1, *_), (x2, y2, *_) in zip(ring[:-1], ring[1:]):
            if (y1 > y) != (y2 > y):
                xs.append(x1 + (y - y1) * (x2 - x1) / (y2 - y1))
    return sorted(xs)


def interior_point(rings) -> tuple[float, float]:
    """Midpoint of the widest interior horizontal chord.

    The chord is taken through the vertical midpoint of the bounding box;
    if that line only grazes the polygon, lines half-way between
    consecutive vertex heights are tried instead.
    """
    ys = sorted({v[1] for ring in rings for v in ring})
    candidates = [(ys[0] + ys[-1]) / 2] + [(lo + hi) / 2 for lo, hi in zip(ys[:-1], ys[1:])]
    for y in candidates:
        xs = _crossings(rings, y)
        best = None
        for left, right in zip(xs[0::2], xs[1::2]):
            if right > left and (best is None or right - left > best[1] - best[0]):
                best = (left, right)
        if best is not None:
            x = (best[0] + best[1]) / 2
            if point_in_polygon(x, y, rings):
                return x, y
    raise GeometryError("could not find an interior point")


def representative_point(zone: DemandZone | ZoneGeometry) -> GeoPoint:
    """Point standing in for a zone when measuring distances.

    Polygons use their area-weighted centroid, or an interior chord
    midpoint when the centroid falls outside (concave shapes). For
    lon/lat input the centroid is taken in degree space.
    """
    geom = zone.geometry if isinstance(zone, DemandZone) else zone
    if geom.kind == "Point":
        return GeoPoint(float(geom.coordinates[0]), float(geom.coordinates[1]), geom.crs)
    parts = [(polygon_area_centroid(p), p) for p in geom.polygons()]
    total = sum(a for (a, _, _), _ in parts if a > 0)
    if total <= 0:
        raise GeometryError("zero-area polygon")
    cx = sum(a * x for (a, x, _), _ in parts if a > 0) / total
    cy = sum(a * y for (a, _, y), _ in parts if a > 0) / total
    if not point_in_geometry(cx, cy, geom):
        largest = max(parts, key=lambda item: item[0][0])[1]
        cx, cy = interior_point(largest)
    return GeoPoint(cx, cy, geom.crs)


# ---------------------------------------------------------------------------
# spatial index
# ---------------------------------------------------------------------------


def _unit_vectors(lon: np.ndarray, lat: np.ndarray) -> np.ndarray:
    lam, phi = np.radians(lon), np.radians(lat)
    return np.column_stack([np.cos(phi) * np.cos(lam), np.cos(phi) * np.sin(lam), np.sin(phi)])


class SpatialIndex:
    """Static point index answering radius and nearest-neighbour queries.

    Lon/lat points are indexed as unit vectors so that the straight-line
    chord bounds the great-circle distance; planar points are indexed
    directly. The tree only proposes candidates. Every returned distance is
    recomputed with :func:`distance`, so results equal a linear scan.
    """

    def __init__(self, entries: Iterable[tuple[str, GeoPoint]]):
        entries = list(entries)
        self.ids = [e[0] for e in entries]
        self.points = [e[1] for e in entries]
        crs = {p.crs for p in self.points}
        if len(crs) > 1:
            raise ContractError("all indexed points must share one crs")
        self.crs = crs.pop() if crs else PLANAR
        xy = np.array([(p.x, p.y) for p in self.points], dtype=float).reshape(-1, 2)
        coords = _unit_vectors(xy[:, 0], xy[:, 1]) if self.crs == LONLAT else xy
        self._tree = cKDTree(coords) if len(entries) else None

    def __len__(self):
        return len(self.ids)

    def _tree_radius(self, radius: float) -> float:
        if self.crs == LONLAT:
            angle = radius / EARTH_RADIUS_M
            if angle >= math.pi:
                return 2.0 + _SLACK
            return 2 * math.sin(angle / 2) * (1 + _SLACK) + 1e-15
        return radius * (1 + _SLACK) + 1e-9

    def _query_point(self, center: GeoPoint):
        if self.crs == LONLAT:
            return _unit_vectors(np.array([center.x]), np.array([center.y]))[0]
        return np.array([center.x, center.y])

    def radius_query(self, center: GeoPoint, radius: float,
                     metric: str | None = None) -> list[tuple[str, float]]:
        """All ``(id, distance)`` with distance <= radius, sorted by id."""
        if not radius >= 0:
            raise ContractError(f"radius must be non-negative, got {radius!r}")
        metric = metric or default_metric(center.crs)
        _check_metric(metric, center.crs)
        if self._tree is None:
            return []
        if center.crs != self.crs:
            raise ContractError("query point crs differs from the index crs")
        cand = self._tree.query_ball_point(self._query_point(center), self._tree_radius(radius))
        hits = []
        for i in cand:
            d = distance(center, self.points[i], metric)
            if d <= radius:
                hits.append((self.ids[i], d))
        hits.sort()
        return hits

    def nearest(self, center: GeoPoint, metric: str | None = None) -> tuple[str, float]:
        """Closest entry; exact ties go to the smallest id."""
        if self._tree is None:
            raise ContractError("index is empty")
        metric = metric or default_metric(center.crs)
        _check_metric(metric, center.crs)
        _, i = self._tree.query(self._query_point(center))
        d0 = distance(center, self.points[int(i)], metric)
        hits = self.radius_query(center, d0 * (1 + 1e-6) + 1e-6, metric)
        return min(hits, key=lambda h: (h[1], h[0]))

