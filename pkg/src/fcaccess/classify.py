"""Natural-breaks classes, scored output files and summary statistics."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .engine import AccessResult
from .errors import ContractError
from .ingest import DemandZone

DEFAULT_CLASSES = 5


@dataclass(frozen=True)
class Classification:
    """``breaks`` are class upper bounds; classes are numbered from 1."""

    k: int
    breaks: tuple[float, ...]
    assignment: Mapping[object, int]
    gvf: float

    def classify(self, value: float) -> int:
        return min(bisect_left(self.breaks, value), self.k - 1) + 1


def _class_ssd(values: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    dev = values - values.mean()
    return float(np.dot(dev, dev))


def _optimal_class_ends(distinct: np.ndarray, counts: np.ndarray, k: int) -> list[int]:
    """Indices (into ``distinct``) of the last value of each class.

    Fisher's exact dynamic programme over the sorted distinct values,
    weighted by multiplicity. Among partitions whose total squared
    deviation is optimal to within rounding, the one with the smallest
    first break (then second, ...) is returned.
    """
    d = distinct.size
    shift = distinct - distinct.mean()
    w = np.concatenate([[0.0], np.cumsum(counts)])
    s1 = np.concatenate([[0.0], np.cumsum(counts * shift)])
    s2 = np.concatenate([[0.0], np.cumsum(counts * shift * shift)])

    def cost(i, j):
        # squared deviation of distinct[i..j] (j may be an array), clipped at 0
        n = w[j + 1] - w[i]
        a = s1[j + 1] - s1[i]
        return np.maximum(s2[j + 1] - s2[i] - a * a / n, 0.0)

    # suffix[m][i]: best cost of splitting distinct[i:] into m classes
    suffix = np.full((k + 1, d + 1), np.inf)
    suffix[1, :d] = cost(np.arange(d), np.full(d, d - 1))
    for m in range(2, k + 1):
        for i in range(d - m + 1):
            js = np.arange(i, d - m + 1)
            suffix[m, i] = np.min(cost(i, js) + suffix[m - 1, js + 1])

    tol = 1e-12 * max(float(cost(0, d - 1)), 1e-300)
    ends = []
    i = 0
    for m in range(k, 1, -1):
        js = np.arange(i, d - m + 1)
        cand = cost(i, js) + suffix[m - 1, js + 1]
        j = int(js[np.flatnonzero(cand <= suffix[m, i] + tol)[0]])
        ends.append(j)
        i = j + 1
    ends.append(d - 1)
    return ends


def jenks_breaks(values: Mapping[object, float] | Sequence[float], k: int = DEFAULT_CLASSES) -> Classification:
    """Optimal (Fisher-Jenks) partition of ``values`` into ``k`` classes.

    ``values`` is a mapping id -> value, or a sequence whose ids are the
    positions. Equal values always share a class.
    """
    items = dict(values) if isinstance(values, Mapping) else dict(enumerate(values))
    if not items:
        raise ContractError("no values to classify")
    arr = np.array(list(items.values()), dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ContractError("values must be finite")
    distinct, counts = np.unique(arr, return_counts=True)
    if not 1 <= k <= distinct.size:
        raise ContractError(f"k must be between 1 and {distinct.size} (distinct values), got {k}")

    ends = _optimal_class_ends(distinct, counts.astype(float), k)
    breaks = tuple(float(distinct[j]) for j in ends)
    assignment = {key: bisect_left(breaks, v) + 1 for key, v in items.items()}

    sdam = _class_ssd(arr)
    labels = np.array([assignment[key] for key in items])
    sdcm = sum(_class_ssd(arr[labels == c]) for c in range(1, k + 1))
    gvf = 1.0 if sdam == 0 else min(1.0, max(0.0, 1.0 - sdcm / sdam))
    return Classification(k, breaks, assignment, gvf)


# ---------------------------------------------------------------------------
# outputs
# ---------------------------------------------------------------------------


def _score_fields(zone_id, result: AccessResult, classification) -> dict:
    acc = result.zones[zone_id]
    fields = {"final_index": acc.final_index}
    if result.enhanced:
        for r, v in enumerate(acc.ring_values, start=1):
            fields[f"ring_{r}"] = v
    if classification is not None:
        fields["access_class"] = classification.assignment[zone_id]
    return fields


def write_results(zones: Iterable[DemandZone], result: AccessResult,
                  classification: Classification | None = None, fmt: str = "geojson") -> str:
    """Serialize scored zones as GeoJSON or CSV text.

    GeoJSON keeps each zone's geometry and source properties and adds
    ``final_index``, ``ring_1..ring_R`` (enhanced runs) and
    ``access_class`` (when classified). Floats are written with ``repr``
    precision so re-reading is exact.
    """
    zones = list(zones)
    zone_ids = [z.id for z in zones]
    missing = sorted(set(result.zones) ^ set(zone_ids))
    if missing:
        raise ContractError(f"result and zones disagree on ids, e.g. {missing[0]!r}")
    if fmt == "geojson":
        features = []
        for z in zones:
            props = dict(z.properties)
            props.update(_score_fields(z.id, result, classification))
            features.append({"type": "Feature", "id": z.id,
                             "geometry": z.geometry.to_geojson(), "properties": props})
        return json.dumps({"type": "FeatureCollection", "features": features}) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["zone_id", "final_index"]
        if result.enhanced:
            header += [f"ring_{r}" for r in range(1, len(result.scheme) + 1)]
        if classification is not None:
            header.append("access_class")
        writer.writerow(header)
        for zid in sorted(zone_ids):
            fields = _score_fields(zid, result, classification)
            writer.writerow([zid] + [repr(fields[h]) for h in header[1:]])
        return buf.getvalue()
    raise ContractError(f"unknown output format {fmt!r}")


def read_results(text: str, fmt: str = "geojson") -> dict[str, dict]:
    """Parse a document produced by :func:`write_results` into id -> fields."""
    score_keys = ("final_index", "access_class")
    if fmt == "geojson":
        out = {}
        for feat in json.loads(text)["features"]:
            props = feat["properties"]
            out[str(feat["id"])] = {k: v for k, v in props.items()
                                    if k in score_keys or k.startswith("ring_")}
        return out
    if fmt == "csv":
        out = {}
        for row in csv.DictReader(io.StringIO(text)):
            zid = row.pop("zone_id")
            out[zid] = {k: (int(v) if k == "access_class" else float(v)) for k, v in row.items()}
        return out
    raise ContractError(f"unknown output format {fmt!r}")


@dataclass(frozen=True)
class Summary:
    count: int
    min: float
    max: float
    mean: float
    median: float
    zero_count: int
    zero_ids: tuple[str, ...]


def summary_stats(result: AccessResult | Mapping[str, float]) -> Summary:
    values = result.final_index() if isinstance(result, AccessResult) else dict(result)
    if not values:
        raise ContractError("empty result")
    vals = list(values.values())
    zeros = tuple(sorted(z for z, v in values.items() if v == 0))
    return Summary(len(vals), min(vals), max(vals), math.fsum(vals) / len(vals),
                   float(statistics.median(vals)), len(zeros), zeros)
