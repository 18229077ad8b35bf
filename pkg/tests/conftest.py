import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fcaccess.ingest import DemandZone, GeoPoint, ProviderSite, ZoneGeometry  # noqa: E402

DATA = Path(__file__).parent / "data"


def point_features(rows, crs_geom="Point"):
    """rows: (props, x, y) -> FeatureCollection dict."""
    return {"type": "FeatureCollection", "features": [
        {"type": "Feature", "geometry": {"type": crs_geom, "coordinates": [x, y]}, "properties": props}
        for props, x, y in rows]}


def square(x, y, half):
    return [[[x - half, y - half], [x + half, y - half], [x + half, y + half],
             [x - half, y + half], [x - half, y - half]]]


def polygon_features(rows):
    """rows: (props, rings) -> FeatureCollection dict."""
    return {"type": "FeatureCollection", "features": [
        {"type": "Feature", "geometry": {"type": "Polygon", "coordinates": rings}, "properties": props}
        for props, rings in rows]}


def planar_provider(pid, capacity, x=0.0, y=0.0):
    return ProviderSite(pid, GeoPoint(x, y, "planar"), capacity)


def planar_zone(zid, demand, x=0.0, y=0.0):
    return DemandZone(zid, ZoneGeometry("Point", (x, y), "planar"), demand)


@pytest.fixture
def write_json(tmp_path):
    def _write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return path
    return _write


@pytest.fixture
def write_text(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write


# one pass/fail line per acceptance criterion at the end of the run
_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and (report.when == "call" or report.failed):
        _CRITERIA.append((marker.args[0], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for name, status in _CRITERIA:
            terminalreporter.write_line(f"{status}  {name}")
