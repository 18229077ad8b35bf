import json

import pytest

from conftest import point_features, polygon_features, square
from fcaccess.errors import GeometryError, SchemaError, ValidationError
from fcaccess.ingest import (
    dump_providers,
    dump_road_network,
    dump_zones,
    load_providers,
    load_road_network,
    load_zones,
)

ROAD_HEADER = "from_id,to_id,from_x,from_y,to_x,to_y,cost_s,oneway\n"


def test_two_providers_loaded():
    doc = point_features([({"id": "A", "cap": 10}, -86.7, 36.1), ({"id": "B", "cap": 5}, -86.8, 36.2)])
    sites = load_providers(doc, "id", "cap")
    assert len(sites) == 2
    assert {s.id: s.capacity for s in sites} == {"A": 10, "B": 5}
    assert (sites[0].location.x, sites[0].location.y) == (-86.7, 36.1)


def test_duplicate_provider_id_is_reported():
    doc = point_features([({"id": "A", "cap": 1}, 0, 0), ({"id": "A", "cap": 2}, 1, 1)])
    with pytest.raises(ValidationError, match="'A'"):
        load_providers(doc, "id", "cap")


def test_missing_field_named():
    doc = point_features([({"id": "A"}, 0, 0)])
    with pytest.raises(SchemaError) as err:
        load_providers(doc, "id", "machines")
    assert err.value.field == "machines"


@pytest.mark.parametrize("bad", [-1, "ten", None, float("inf")])
def test_bad_capacity_gives_row_index(bad):
    doc = point_features([({"id": "A", "cap": 3}, 0, 0), ({"id": "B", "cap": bad}, 0, 0)])
    with pytest.raises(ValidationError, match="feature 1"):
        load_providers(doc, "id", "cap")


def test_providers_from_csv(write_text):
    path = write_text("p.csv", "id,cap,lon,lat\nA,10,-86.7,36.1\nB,5,-86.8,36.2\n")
    sites = load_providers(path, "id", "cap")
    assert [s.capacity for s in sites] == [10.0, 5.0]
    planar = write_text("q.csv", "id,cap,x,y\nA,1,500000,4000000\n")
    assert load_providers(planar, "id", "cap", crs="planar")[0].location.crs == "planar"


def test_192_provider_fixture():
    rows = [({"id": f"HD{i:03d}", "machines": 10 + i % 20}, -90 + i * 0.03, 35 + (i % 7) * 0.1)
            for i in range(192)]
    assert len(load_providers(point_features(rows), "id", "machines")) == 192


def test_lonlat_range_checked():
    with pytest.raises(ValidationError):
        load_providers(point_features([({"id": "A", "cap": 1}, 200, 0)]), "id", "cap")


def test_zones_with_population():
    doc = polygon_features([({"id": f"T{i}", "pop": p}, square(i, 0, 0.4))
                            for i, p in enumerate([1000, 2000, 3000])])
    zones = load_zones(doc, "id", "pop", crs="planar")
    assert [z.demand for z in zones] == [1000, 2000, 3000]


def test_negative_population_rejected():
    doc = polygon_features([({"id": "T", "pop": -5}, square(0, 0, 1))])
    with pytest.raises(ValidationError):
        load_zones(doc, "id", "pop", crs="planar")


def test_unclosed_ring_names_feature():
    ring = [[0, 0], [1, 0], [1, 1], [0, 1]]
    doc = polygon_features([({"id": "OPEN", "pop": 1}, [ring])])
    with pytest.raises(GeometryError, match="OPEN"):
        load_zones(doc, "id", "pop", crs="planar")


def test_age_fields_leave_demand_unset():
    doc = polygon_features([({"id": "T", "a": 1, "b": 2}, square(0, 0, 1))])
    (z,) = load_zones(doc, "id", age_fields=["a", "b"], crs="planar")
    assert z.demand is None
    assert z.age_counts == (("a", 1.0), ("b", 2.0))


def test_point_zones_and_csv_zones(write_text):
    doc = point_features([({"id": "Z", "pop": 7}, 2, 3)])
    assert load_zones(doc, "id", "pop", crs="planar")[0].geometry.coordinates == (2, 3)
    path = write_text("z.csv", "id,pop,lon,lat\nZ1,10,-86,36\n")
    assert load_zones(path, "id", "pop")[0].demand == 10.0


def test_1701_zone_fixture():
    rows = [({"GEOID": 47000000000 + i, "pop": 3981}, square(-90 + (i % 50) * 0.1, 35 + (i // 50) * 0.05, 0.02))
            for i in range(1701)]
    zones = load_zones(polygon_features(rows), "GEOID", "pop")
    assert len(zones) == 1701
    assert zones[0].id == "47000000000"


def test_road_line_bidirectional(write_text):
    path = write_text("r.csv", ROAD_HEADER + "A,B,0,0,1000,0,120,false\nB,C,1000,0,2000,0,180,\n")
    net = load_road_network(path, crs="planar")
    assert len(net.nodes) == 3
    assert len(net.directed_edges()) == 4


def test_road_zero_cost(write_text):
    path = write_text("r.csv", ROAD_HEADER + "A,B,0,0,1,0,120,false\nB,C,1,0,2,0,0,false\n")
    with pytest.raises(ValidationError, match="edge 1"):
        load_road_network(path, crs="planar")


def test_road_oneway(write_text):
    path = write_text("r.csv", ROAD_HEADER + "A,B,0,0,1,0,60,true\n")
    assert load_road_network(path, crs="planar").directed_edges() == [("A", "B", 60.0)]


def test_road_dangling_endpoint(write_text):
    path = write_text("r.csv", ROAD_HEADER + "A,B,0,0,1,0,60,false\nB,C,,,,,60,false\n")
    with pytest.raises(ValidationError, match="dangling"):
        load_road_network(path, crs="planar")
    ok = write_text("s.csv", ROAD_HEADER + "A,B,0,0,1,0,60,false\nB,A,,,,,60,true\n")
    assert len(load_road_network(ok, crs="planar").directed_edges()) == 3


def test_road_geojson_and_walking(write_json):
    doc = {"type": "FeatureCollection", "features": [
        {"type": "Feature", "geometry": {"type": "LineString", "coordinates": [[0, 0], [500, 0], [1000, 0]]},
         "properties": {"cost_s": 60}}]}
    net = load_road_network(write_json("r.geojson", doc), crs="planar")
    assert net.directed_edges()[0][2] == 60.0
    walk = load_road_network(doc, crs="planar", mode="walking")
    # 1 km at 5 km/h
    assert walk.directed_edges()[0][2] == pytest.approx(720.0)


def test_round_trip_stability(write_json, write_text):
    pdoc = point_features([({"id": "A", "cap": 10.5}, -86.7, 36.1), ({"id": "B", "cap": 0}, -86.8, 36.2)])
    sites = load_providers(pdoc, "id", "cap")
    again = load_providers(json.loads(json.dumps(dump_providers(sites, "id", "cap"))), "id", "cap")
    assert again == sites

    zdoc = polygon_features([({"id": "T1", "pop": 12.25, "name": "x"}, square(1, 1, 0.5))])
    zones = load_zones(zdoc, "id", "pop", crs="planar")
    again = load_zones(json.loads(json.dumps(dump_zones(zones, "id", "pop"))), "id", "pop", crs="planar")
    assert again == zones and again[0].properties == zones[0].properties

    net = load_road_network(write_text("r.csv", ROAD_HEADER + "A,B,0.1,0.2,1.5,0,12.5,true\nB,C,1.5,0,3,3,7,false\n"),
                            crs="planar")
    assert load_road_network(write_text("r2.csv", dump_road_network(net)), crs="planar") == net
