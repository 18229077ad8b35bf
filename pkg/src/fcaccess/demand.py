"""Age-adjusted demand.

Each age band gets an integer weight equal to its incidence rate divided
by the baseline band's rate, rounded half away from zero. A zone's
adjusted demand is the weighted sum of its band counts.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ContractError, SchemaError, ValidationError
from .ingest import DemandZone

WEIGHTS_HEADER = ("band", "rate_per_million")


@dataclass(frozen=True)
class AgeWeights:
    """Ordered ``(label, rate_per_million, weight)`` bands; the first is the baseline."""

    bands: tuple[tuple[str, float, int], ...]

    @property
    def labels(self) -> list[str]:
        return [b[0] for b in self.bands]

    @property
    def weights(self) -> list[int]:
        return [b[2] for b in self.bands]

    def __len__(self):
        return len(self.bands)


def _round_half_away(q: Fraction) -> int:
    n = math.floor(abs(q) + Fraction(1, 2))
    return n if q >= 0 else -n


def derive_age_weights(rates: Sequence[float], labels: Sequence[str] | None = None) -> AgeWeights:
    """Weights relative to the first (baseline) rate.

    >>> derive_age_weights([11, 77, 561, 1171, 2080]).weights
    [1, 7, 51, 106, 189]
    """
    rates = list(rates)
    if not rates:
        raise ContractError("at least one rate is required")
    if any(not (math.isfinite(r) and r > 0) for r in rates):
        raise ContractError(f"rates must be positive and finite, got {rates}")
    labels = list(labels) if labels is not None else [f"band_{i}" for i in range(len(rates))]
    if len(labels) != len(rates):
        raise ContractError("labels and rates differ in length")
    base = Fraction(rates[0])
    # exact rational ratio so that x.5 cases round the documented way
    weights = [_round_half_away(Fraction(r) / base) for r in rates]
    return AgeWeights(tuple(zip(labels, (float(r) for r in rates), weights)))


def age_adjusted_demand(counts: Sequence[float], weights: AgeWeights | Sequence[float]) -> float:
    """Sum of band counts times band weights."""
    w = weights.weights if isinstance(weights, AgeWeights) else list(weights)
    counts = list(counts)
    if len(counts) != len(w):
        raise ContractError(f"{len(counts)} counts for {len(w)} weights")
    if any(c < 0 for c in counts):
        raise ContractError("age counts must be non-negative")
    return math.fsum(c * wi for c, wi in zip(counts, w))


def adjust_zones(zones: Iterable[DemandZone], weights: AgeWeights) -> list[DemandZone]:
    """Return copies of ``zones`` with demand set from their age counts."""
    out = []
    for z in zones:
        if z.age_counts is None:
            raise ContractError(f"zone {z.id!r} has no age counts")
        if len(z.age_counts) != len(weights):
            raise SchemaError(f"zone {z.id!r} has {len(z.age_counts)} age bands, weights have {len(weights)}")
        out.append(z.with_demand(age_adjusted_demand([n for _, n in z.age_counts], weights)))
    return out


def load_weights(path) -> AgeWeights:
    """Read a ``band,rate_per_million`` CSV and derive weights from it."""
    with open(os.fspath(path), newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for col in WEIGHTS_HEADER:
            if col not in (reader.fieldnames or []):
                raise SchemaError(f"weights file is missing column {col!r}", field=col)
        labels, rates, problems = [], [], []
        for i, row in enumerate(reader):
            try:
                rate = float(row["rate_per_million"])
            except ValueError:
                rate = float("nan")
            if not (math.isfinite(rate) and rate > 0):
                problems.append(f"row {i}: rate_per_million must be positive, got {row['rate_per_million']!r}")
            labels.append(row["band"])
            rates.append(rate)
    if problems:
        raise ValidationError("invalid weights file", problems)
    return derive_age_weights(rates, labels)
