import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import great_circle
from fcaccess.errors import ContractError, GeometryError
from fcaccess.geometry import (
    EARTH_RADIUS_M,
    SpatialIndex,
    distance,
    point_in_polygon,
    polygon_area_centroid,
    representative_point,
)
from fcaccess.ingest import GeoPoint, ZoneGeometry

lon = st.floats(-179.0, 179.0)
lat = st.floats(-89.0, 89.0)


def test_planar_345():
    assert distance(GeoPoint(0, 0, "planar"), GeoPoint(3, 4, "planar")) == 5.0


def test_haversine_one_degree():
    d = distance(GeoPoint(0, 0), GeoPoint(1, 0))
    assert abs(d - 111_194.93) <= 0.01
    assert d == pytest.approx(EARTH_RADIUS_M * math.pi / 180, rel=1e-14)


def test_metric_mismatch():
    with pytest.raises(ContractError):
        distance(GeoPoint(0, 0, "planar"), GeoPoint(1, 1, "planar"), "haversine")
    with pytest.raises(ContractError):
        distance(GeoPoint(0, 0), GeoPoint(0, 0, "planar"))


@given(lon, lat, lon, lat)
def test_haversine_symmetric_and_matches_law_of_cosines(x1, y1, x2, y2):
    a, b = GeoPoint(x1, y1), GeoPoint(x2, y2)
    d = distance(a, b)
    assert d == distance(b, a) and d >= 0
    # law of cosines loses precision for tiny separations
    assert d == pytest.approx(great_circle(x1, y1, x2, y2), abs=1.0)


@given(lon, lat)
def test_distance_to_self_is_zero(x, y):
    assert distance(GeoPoint(x, y), GeoPoint(x, y)) == 0.0


@given(lon, lat, lon, lat, lon, lat)
def test_haversine_triangle_inequality(x1, y1, x2, y2, x3, y3):
    a, b, c = GeoPoint(x1, y1), GeoPoint(x2, y2), GeoPoint(x3, y3)
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


@given(*[st.floats(-1e6, 1e6)] * 6)
def test_planar_triangle_inequality(x1, y1, x2, y2, x3, y3):
    a, b, c = (GeoPoint(x1, y1, "planar"), GeoPoint(x2, y2, "planar"), GeoPoint(x3, y3, "planar"))
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


def _polygon(ring, crs="planar"):
    return ZoneGeometry("Polygon", (tuple(map(tuple, ring)),), crs)


def test_unit_square_centroid():
    p = representative_point(_polygon([(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]))
    assert (p.x, p.y) == (0.5, 0.5)


L_SHAPE = [(0, 0), (10, 0), (10, 1), (1, 1), (1, 10), (0, 10), (0, 0)]
C_SHAPE = [(0, 0), (10, 0), (10, 1), (1, 1), (1, 9), (10, 9), (10, 10), (0, 10), (0, 0)]


@pytest.mark.parametrize("ring", [L_SHAPE, C_SHAPE])
def test_concave_polygon_gets_interior_point(ring):
    geom = _polygon(ring)
    _, cx, cy = polygon_area_centroid(geom.coordinates)
    assert not point_in_polygon(cx, cy, geom.coordinates)
    p = representative_point(geom)
    assert point_in_polygon(p.x, p.y, geom.coordinates)


def test_polygon_with_hole_and_multipolygon():
    outer = ((0, 0), (10, 0), (10, 10), (0, 10), (0, 0))
    hole = ((2, 2), (8, 2), (8, 8), (2, 8), (2, 2))
    donut = ZoneGeometry("Polygon", (outer, hole), "planar")
    p = representative_point(donut)
    assert point_in_polygon(p.x, p.y, donut.coordinates)
    multi = ZoneGeometry("MultiPolygon", (((outer),), (((20, 0), (21, 0), (21, 1), (20, 1), (20, 0)),)), "planar")
    q = representative_point(multi)
    assert any(point_in_polygon(q.x, q.y, poly) for poly in multi.polygons())


def test_point_zone_identity():
    p = representative_point(ZoneGeometry("Point", (2, 3), "planar"))
    assert (p.x, p.y) == (2, 3)


def test_zero_area_polygon():
    with pytest.raises(GeometryError):
        representative_point(_polygon([(0, 0), (1, 1), (2, 2), (0, 0)]))


def _random_star(rng):
    n = rng.randint(3, 12)
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
    ring = [(rng.uniform(0.2, 5) * math.cos(a), rng.uniform(0.2, 5) * math.sin(a)) for a in angles]
    return ring + [ring[0]]


def test_random_star_polygons_always_interior():
    rng = random.Random(7)
    for _ in range(300):
        geom = _polygon(_random_star(rng))
        try:
            p = representative_point(geom)
        except GeometryError:
            continue
        assert point_in_polygon(p.x, p.y, geom.coordinates)


def _scan(entries, center, radius):
    return sorted((i, d) for i, p in entries if (d := distance(center, p)) <= radius)


def test_radius_query_boundary_inclusive():
    pts = [(f"p{i}", GeoPoint(1000.0 * i, 0, "planar")) for i in (1, 2, 3)]
    idx = SpatialIndex(pts)
    hits = idx.radius_query(GeoPoint(0, 0, "planar"), 2000.0)
    assert hits == [("p1", 1000.0), ("p2", 2000.0)]


def test_radius_zero_coincident():
    idx = SpatialIndex([("a", GeoPoint(5, 5, "planar")), ("b", GeoPoint(6, 5, "planar"))])
    assert idx.radius_query(GeoPoint(5, 5, "planar"), 0.0) == [("a", 0.0)]


def test_negative_radius():
    idx = SpatialIndex([("a", GeoPoint(5, 5, "planar"))])
    with pytest.raises(ContractError):
        idx.radius_query(GeoPoint(0, 0, "planar"), -1)


@pytest.mark.parametrize("crs", ["planar", "lonlat"])
def test_radius_query_matches_linear_scan(crs):
    rng = np.random.default_rng(11)
    if crs == "planar":
        xy = rng.uniform(0, 50_000, size=(1000, 2))
    else:
        xy = np.column_stack([rng.uniform(-90.5, -81.5, 1000), rng.uniform(34.9, 36.7, 1000)])
    entries = [(f"e{i:04d}", GeoPoint(float(x), float(y), crs)) for i, (x, y) in enumerate(xy)]
    idx = SpatialIndex(entries)
    for q in range(100):
        j = rng.integers(len(entries))
        center = entries[j][1] if q % 4 == 0 else GeoPoint(float(xy[j, 0]) * 0.999 + 0.001 * float(xy[0, 0]),
                                                          float(xy[j, 1]), crs)
        # every fourth query uses an exact inter-point distance as radius
        radius = distance(center, entries[(j + 1) % len(entries)][1]) if q % 4 == 0 else float(rng.uniform(0, 30_000))
        assert idx.radius_query(center, radius) == _scan(entries, center, radius)


def test_radius_query_whole_globe():
    entries = [("a", GeoPoint(0, 0)), ("b", GeoPoint(180, 0)), ("c", GeoPoint(0, 90))]
    idx = SpatialIndex(entries)
    assert [h[0] for h in idx.radius_query(GeoPoint(0, 0), math.pi * EARTH_RADIUS_M)] == ["a", "b", "c"]


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=40),
       st.integers(-20, 20), st.integers(-20, 20), st.integers(0, 30))
def test_radius_query_property_integer_grid(points, cx, cy, r):
    # integer grids produce many exact-boundary hits
    entries = [(f"{i:03d}", GeoPoint(x, y, "planar")) for i, (x, y) in enumerate(points)]
    center = GeoPoint(cx, cy, "planar")
    assert SpatialIndex(entries).radius_query(center, r) == _scan(entries, center, r)


def test_nearest_tie_breaks_on_id():
    idx = SpatialIndex([("B", GeoPoint(1, 0, "planar")), ("A", GeoPoint(-1, 0, "planar"))])
    assert idx.nearest(GeoPoint(0, 0, "planar")) == ("A", 1.0)
