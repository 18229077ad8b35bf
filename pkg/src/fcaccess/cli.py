"""Command line front end: ``catchment``, ``access``, ``demand`` and ``classify``.

Exit codes: 0 success, 1 validation or schema error, 2 I/O error,
3 usage error. Every run prints its fully resolved parameters as one
JSON line so the output can be reproduced.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import logging
import re
import sys
from pathlib import Path

from . import classify as cls
from . import costs as costs_mod
from .demand import adjust_zones, derive_age_weights, load_weights
from .engine import DEFAULT_DECAY, RingScheme, accessibility, gaussian_ring_weights
from .errors import AccessError
from .geometry import EUCLIDEAN, HAVERSINE, default_metric
from .ingest import METERS_PER_MILE, dump_zones, load_providers, load_road_network, load_zones
from .network import DEFAULT_SNAP_TOLERANCE_M, build_cost_matrix, thread_count

log = logging.getLogger("fcaccess")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_USAGE = 0, 1, 2, 3

LENGTH_UNITS = {"mi": METERS_PER_MILE, "km": 1000.0, "m": 1.0}
TIME_UNITS = {"min": 60.0, "s": 1.0, "h": 3600.0}

DEFAULTS = {
    ("2sfca", "buffer"): ("15mi",),
    ("e2sfca", "buffer"): ("5mi", "10mi", "15mi"),
    ("2sfca", "network"): ("30min",),
    ("e2sfca", "network"): ("10min", "20min", "30min"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_quantity(text: str, units: dict, default_unit: str | None = None) -> float:
    """``"15mi"`` -> meters, ``"30min"`` -> seconds (per ``units``)."""
    m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([a-z]*)\s*", text)
    if not m:
        raise UsageError(f"cannot parse quantity {text!r}")
    unit = m.group(2) or default_unit
    if unit not in units:
        raise UsageError(f"{text!r}: unit must be one of {sorted(units)}")
    return float(m.group(1)) * units[unit]


def _split(text) -> list[str]:
    if text is None:
        return []
    return [t.strip() for t in str(text).split(",") if t.strip()]


def _floats(text) -> list[float]:
    try:
        return [float(t) for t in _split(text)]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def read_config(path) -> dict:
    """Flat ``key = value`` file (TOML subset): strings, numbers, booleans, lists."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if line.startswith("#"):
                continue
            if "#" in line and '"' not in line and "'" not in line:
                line = line.split("#", 1)[0].strip()
            if not line or line.startswith("["):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, raw = (s.strip() for s in line.split("=", 1))
            low = raw.lower()
            if low in ("true", "false"):
                value = low == "true"
            else:
                try:
                    value = ast.literal_eval(raw)
                except (ValueError, SyntaxError):
                    value = raw
            if isinstance(value, (list, tuple)):
                value = ",".join(str(v) for v in value)
            out[key.replace("-", "_")] = value if isinstance(value, bool) else str(value)
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _site_args(p, capacity=True, demand=True):
    p.add_argument("--providers", help="provider GeoJSON or CSV")
    p.add_argument("--provider-id", default="id")
    if capacity:
        p.add_argument("--capacity-field", default="capacity")
    p.add_argument("--zones", help="zone GeoJSON or CSV")
    p.add_argument("--zone-id", default="id")
    if demand:
        p.add_argument("--demand-field", help="population / demand field")
        p.add_argument("--age-fields", help="comma-separated age-band count fields")
        p.add_argument("--rates", help="comma-separated incidence rates per million, baseline first")
        p.add_argument("--weights-file", help="CSV with band,rate_per_million")
    p.add_argument("--crs", choices=["lonlat", "planar"], default="lonlat")


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    """Build the argument parser; ``config`` values become flag defaults."""
    parser = _Parser(prog="fcaccess", description="Spatial accessibility scoring with 2SFCA and E2SFCA.")
    parser.add_argument("--config", help="key = value file supplying defaults for flags")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("catchment", help="precompute a zone/provider travel-time matrix")
    p.add_argument("--network", help="road edge CSV or GeoJSON")
    _site_args(p, capacity=False, demand=False)
    p.add_argument("--cutoff", default="10min", help="largest travel time to keep (e.g. 30min)")
    p.add_argument("--direction", choices=list(costs_mod.DIRECTIONS), default=costs_mod.DEMAND_TO_PROVIDER)
    p.add_argument("--tolerance", type=float, default=DEFAULT_SNAP_TOLERANCE_M, help="snap tolerance, meters")
    p.add_argument("--mode", choices=["driving", "walking"], default="driving")
    p.add_argument("--walk-speed", type=float, default=5.0, help="km/h in walking mode")
    p.add_argument("--strict", action="store_true", help="fail when a site cannot be snapped")
    p.add_argument("--out", help="output cost-matrix CSV")

    p = sub.add_parser("access", help="score zones with 2SFCA or E2SFCA")
    _site_args(p)
    p.add_argument("--model", choices=["2sfca", "e2sfca"], default="2sfca")
    p.add_argument("--buffer", help="distance thresholds with units, e.g. 15mi or 5mi,10mi,15mi")
    p.add_argument("--cost-matrix", help="travel-time matrix from the catchment command")
    p.add_argument("--times", help="travel-time thresholds, minutes unless suffixed (10,20,30)")
    p.add_argument("--decay", help="ring weights, e.g. 1,0.68,0.22")
    p.add_argument("--bandwidth", help="Gaussian decay bandwidth with units instead of --decay")
    p.add_argument("--per-capita", type=float, default=100_000.0)
    p.add_argument("--metric", choices=[EUCLIDEAN, HAVERSINE])
    p.add_argument("--classes", type=int, default=cls.DEFAULT_CLASSES, help="natural-breaks classes; 0 disables")
    p.add_argument("--emit-step1", help="write provider ratios CSV here")
    p.add_argument("--format", choices=["geojson", "csv"])
    p.add_argument("--out", help="scored output file")

    p = sub.add_parser("demand", help="age-adjust zone demand")
    p.add_argument("--zones")
    p.add_argument("--zone-id", default="id")
    p.add_argument("--age-fields")
    p.add_argument("--rates")
    p.add_argument("--weights-file")
    p.add_argument("--field", default="adjusted_demand", help="name of the new demand field")
    p.add_argument("--crs", choices=["lonlat", "planar"], default="lonlat")
    p.add_argument("--out")

    p = sub.add_parser("classify", help="add natural-breaks classes to a scored file")
    p.add_argument("--input")
    p.add_argument("--field", default="final_index")
    p.add_argument("--classes", type=int, default=cls.DEFAULT_CLASSES)
    p.add_argument("--out")

    for subparser in sub.choices.values():
        subparser.add_argument("--config", help=argparse.SUPPRESS)
    if config:
        for subparser in sub.choices.values():
            known = {a.dest for a in subparser._actions}
            subparser.set_defaults(**{k: v for k, v in config.items() if k in known})
    return parser


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_"), None) in (None, "")]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n for n in missing))


def _echo(command, args):
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("verbose", "command")}
    print(f"{command} parameters: {json.dumps(params, sort_keys=True)}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _age_weights(args):
    if args.weights_file and args.rates:
        raise UsageError("give --weights-file or --rates, not both")
    if args.weights_file:
        return load_weights(args.weights_file)
    if args.rates:
        rates = _floats(args.rates)
        labels = _split(args.age_fields)
        if len(labels) != len(rates):
            raise UsageError(f"{len(labels)} age fields but {len(rates)} rates")
        return derive_age_weights(rates, labels)
    raise UsageError("age fields need --rates or --weights-file")


def _load_demand_zones(args):
    if args.demand_field and args.age_fields:
        raise UsageError("give --demand-field or --age-fields, not both")
    if args.age_fields:
        weights = _age_weights(args)
        zones = load_zones(args.zones, args.zone_id, age_fields=_split(args.age_fields), crs=args.crs)
        return adjust_zones(zones, weights)
    _require(args, "demand-field")
    return load_zones(args.zones, args.zone_id, demand_field=args.demand_field, crs=args.crs)


def cmd_catchment(args) -> int:
    _require(args, "network", "providers", "zones", "out")
    cutoff = parse_quantity(args.cutoff, TIME_UNITS, "min")
    args.cutoff_s = cutoff
    args.threads = thread_count()
    _echo("catchment", args)
    network = load_road_network(args.network, crs=args.crs, mode=args.mode, walk_speed_kmh=args.walk_speed)
    providers = load_providers(args.providers, args.provider_id, None, crs=args.crs)
    zones = load_zones(args.zones, args.zone_id, crs=args.crs)
    matrix = build_cost_matrix(network, zones, providers, cutoff, direction=args.direction,
                               tolerance=args.tolerance, strict=args.strict, threads=args.threads)
    costs_mod.write_cost_matrix(matrix, args.out)
    print(f"wrote {len(matrix)} entries to {args.out}")
    if matrix.unreached_zones or matrix.unreached_providers:
        print(f"unsnapped zones ({len(matrix.unreached_zones)}): {', '.join(matrix.unreached_zones)}")
        print(f"unsnapped providers ({len(matrix.unreached_providers)}): {', '.join(matrix.unreached_providers)}")
    lone_z = sorted(set(z.id for z in zones) - {k[0] for k in matrix.entries} - set(matrix.unreached_zones))
    lone_p = sorted(set(p.id for p in providers) - {k[1] for k in matrix.entries} - set(matrix.unreached_providers))
    if lone_z or lone_p:
        print(f"unreached zones ({len(lone_z)}): {', '.join(lone_z)}")
        print(f"unreached providers ({len(lone_p)}): {', '.join(lone_p)}")
    if not len(matrix):
        log.warning("cost matrix is empty: no provider is reachable within %s", args.cutoff)
    return EXIT_OK


def _scheme(args, mode) -> RingScheme:
    raw = args.buffer if mode == "buffer" else args.times
    texts = _split(raw) or list(DEFAULTS[(args.model, mode)])
    if mode == "buffer":
        thresholds = [parse_quantity(t, LENGTH_UNITS) for t in texts]
    else:
        thresholds = [parse_quantity(t, TIME_UNITS, "min") for t in texts]
    if args.model == "2sfca":
        if len(thresholds) != 1:
            raise UsageError("2sfca takes exactly one threshold")
        if args.decay or args.bandwidth:
            raise UsageError("--decay/--bandwidth only apply to e2sfca")
        return RingScheme.single(thresholds[0])
    if args.decay and args.bandwidth:
        raise UsageError("give --decay or --bandwidth, not both")
    if args.bandwidth:
        units = LENGTH_UNITS if mode == "buffer" else TIME_UNITS
        weights = gaussian_ring_weights(thresholds, parse_quantity(args.bandwidth, units, None if mode == "buffer" else "min"))
    else:
        weights = _floats(args.decay) if args.decay else list(DEFAULT_DECAY)
    if len(weights) != len(thresholds):
        raise UsageError(f"{len(thresholds)} thresholds but {len(weights)} weights")
    return RingScheme(tuple(thresholds), tuple(weights))


def _format_for(path, explicit):
    if explicit:
        return explicit
    return "csv" if str(path).lower().endswith(".csv") else "geojson"


def cmd_access(args) -> int:
    _require(args, "providers", "zones", "out")
    if args.buffer and args.cost_matrix:
        raise UsageError("give --buffer or --cost-matrix, not both")
    if args.times and not args.cost_matrix:
        raise UsageError("--times needs --cost-matrix")
    mode = "network" if args.cost_matrix else "buffer"
    scheme = _scheme(args, mode)
    if mode == "buffer":
        args.metric = args.metric or default_metric(args.crs)
    args.thresholds = list(scheme.thresholds)
    args.weights = list(scheme.weights)
    args.format = _format_for(args.out, args.format)
    _echo("access", args)

    providers = load_providers(args.providers, args.provider_id, args.capacity_field, crs=args.crs)
    zones = _load_demand_zones(args)
    if mode == "buffer":
        matrix = costs_mod.buffer_cost_matrix(zones, providers, scheme.cutoff, args.metric)
    else:
        matrix = costs_mod.read_cost_matrix(args.cost_matrix)
        matrix.check_ids([z.id for z in zones], [p.id for p in providers])
    result = accessibility(providers, zones, matrix, scheme, args.per_capita,
                           enhanced=args.model == "e2sfca")
    classification = None
    if args.classes:
        values = result.final_index()
        k = min(args.classes, len(set(values.values())))
        classification = cls.jenks_breaks(values, k)
    Path(args.out).write_text(cls.write_results(zones, result, classification, args.format), encoding="utf-8")
    if args.emit_step1:
        _write_step1(result, args.emit_step1)

    s = cls.summary_stats(result)
    print(f"wrote {s.count} zones to {args.out}")
    print(f"final_index min={s.min!r} max={s.max!r} mean={s.mean!r} median={s.median!r} "
          f"zero-access zones={s.zero_count}")
    if classification is not None:
        print(f"natural breaks (k={classification.k}): {list(classification.breaks)} gvf={classification.gvf!r}")
    return EXIT_OK


def _write_step1(result, path):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["provider_id", "ratio", "weighted_demand", "served"])
    for pid in sorted(result.ratios):
        r = result.ratios[pid]
        writer.writerow([pid, repr(r.ratio), repr(r.weighted_demand), "true" if r.served else "false"])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def cmd_demand(args) -> int:
    _require(args, "zones", "age-fields", "out")
    weights = _age_weights(args)
    args.weights = weights.weights
    _echo("demand", args)
    zones = load_zones(args.zones, args.zone_id, age_fields=_split(args.age_fields), crs=args.crs)
    adjusted = adjust_zones(zones, weights)
    if str(args.out).lower().endswith(".csv"):
        rows = [{**z.properties, args.field: z.demand} for z in adjusted]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [args.zone_id, args.field],
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        doc = dump_zones(adjusted, args.zone_id, args.field)
        Path(args.out).write_text(json.dumps(doc) + "\n", encoding="utf-8")
    print(f"wrote {len(adjusted)} zones with field {args.field!r} to {args.out}")
    return EXIT_OK


def cmd_classify(args) -> int:
    _require(args, "input", "out")
    _echo("classify", args)
    path = Path(args.input)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        if rows and args.field not in rows[0]:
            raise AccessError(f"missing field {args.field!r}")
        values = {i: float(r[args.field]) for i, r in enumerate(rows)}
        c = cls.jenks_breaks(values, min(args.classes, len(set(values.values()))))
        buf = io.StringIO()
        fields = [f for f in (rows[0].keys() if rows else []) if f != "access_class"] + ["access_class"]
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for i, r in enumerate(rows):
            writer.writerow({**r, "access_class": c.assignment[i]})
        out = buf.getvalue()
    else:
        doc = json.loads(text)
        feats = doc.get("features", [])
        try:
            values = {i: float(f["properties"][args.field]) for i, f in enumerate(feats)}
        except KeyError:
            raise AccessError(f"missing field {args.field!r}") from None
        c = cls.jenks_breaks(values, min(args.classes, len(set(values.values()))))
        for i, f in enumerate(feats):
            f["properties"]["access_class"] = c.assignment[i]
        out = json.dumps(doc) + "\n"
    Path(args.out).write_text(out, encoding="utf-8")
    s = cls.summary_stats({str(i): v for i, v in values.items()})
    print(f"natural breaks (k={c.k}): {list(c.breaks)} gvf={c.gvf!r}")
    print(f"{args.field} min={s.min!r} max={s.max!r} mean={s.mean!r} median={s.median!r} zeros={s.zero_count}")
    return EXIT_OK


COMMANDS = {"catchment": cmd_catchment, "access": cmd_access, "demand": cmd_demand, "classify": cmd_classify}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        config_path = _config_path(argv)
        if config_path:
            parser = build_parser(read_config(config_path))
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return exc.code if isinstance(exc.code, int) else EXIT_USAGE
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s")
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fcaccess: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        name = getattr(exc, "filename", None)
        print(f"fcaccess: cannot access {name or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except (AccessError, json.JSONDecodeError, ValueError) as exc:
        print(f"fcaccess: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def _config_path(argv):
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


if __name__ == "__main__":
    sys.exit(main())
