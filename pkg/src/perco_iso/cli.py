"""Command-line front end: ``perco-iso <subcommand> ...``.

Every run writes ``<stem>.json`` (manifest plus records), ``<stem>.csv``
(a flat projection of the records, manifest in ``#`` comment lines) and
``manifest.json`` into the output directory (``--out``, else
``$PERCO_ISO_OUT``, else ``./perco_iso_out``).  ``reproduce`` reruns a
manifest and compares the numeric payload byte for byte.

CSV schema version 1: the columns are the record keys in insertion order;
list-valued fields are joined with ``;``.

Exit codes: 0 success, 2 usage error, 3 budget or padding error,
4 reproduction mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import shlex
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .analysis import (DEFAULT_RATIO, DecayCurve, bracket_compare, classify_decay,
                       fit_exponential, fit_polynomial)
from .contours import contour_distance_info, count_contours, enumerate_contours
from .errors import (BudgetExceeded, DomainError, InsufficientData, OracleError, PaddingError,
                     ParseError, PercoIsoError, UnsupportedError)
from .families import FAMILY_SPECS, interior_cap, make_family
from .graph import ball, parse_window, path_distance, resolve_vertex
from .isoperimetry import estimate_C, estimate_P, estimate_R
from .peierls import bundle as make_bundle
from .peierls import growth_check
from .percolation import ExactConnectivity, as_fraction, estimate_phi_pairs, estimate_theta

CSV_SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_MISMATCH = 0, 2, 3, 4

# options that never change the numeric payload
_VOLATILE = {"out", "workers"}


class UsageError(Exception):
    pass


# --- helpers -------------------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def _vertex_list(values) -> list[str]:
    out = []
    for v in values or ():
        out.extend(t for t in v.split(";") if t)
    return out


def _certified_window(oracle, centre, max_boundary: int, fallback_radius: int):
    """Ball large enough to certify enumeration up to ``max_boundary`` when possible."""
    caps = [interior_cap(oracle, n) for n in range(1, max_boundary + 1)]
    if all(c is not None for c in caps):
        return ball(oracle, centre, max(caps) + 1)
    return ball(oracle, centre, fallback_radius)


# --- subcommands ---------------------------------------------------------------

def cmd_families(args) -> tuple[list, list]:
    examples = {"zd:<d>": "zd:2", "line": "line", "tree:<k>": "tree:3", "wedge:ln": "wedge:ln",
                "strip:<h>": "strip:2", "dl:<q>,<r>": "dl:2,2"}
    recs = []
    for spec in FAMILY_SPECS:
        o = make_family(examples[spec])
        recs.append({
            "spec": spec,
            "example": examples[spec],
            "max_degree": o.max_degree,
            "transitive": o.transitive,
            "bi_geodesic": o.has_bigeodesic,
            "interior_cap": o.interior_cap_fn(4) is not None,
            "root_token": o.format_vertex(o.root),
        })
    return recs, []


def cmd_estimate_constants(args):
    oracle = make_family(args.family)
    fns = {"R": estimate_R, "C": estimate_C, "P": estimate_P}
    recs = []
    for name in args.constants.split(","):
        if name not in fns:
            raise UsageError(f"unknown constant {name!r}; choose from R, C, P")
        est = fns[name](oracle, args.max_size)
        if est.value is None:
            raise InsufficientData(f"no candidate set for {name} at max size {args.max_size}")
        rec = {"family": oracle.name, **est.as_record(oracle.format_vertex),
               "certified": False, "provenance": "windowed-enumeration"}
        recs.append(rec)
    return recs, []


def cmd_enumerate_contours(args):
    oracle = make_family(args.family)
    around = [resolve_vertex(oracle, t) for t in _vertex_list(args.around)] or [oracle.root]
    window = (parse_window(oracle, args.window) if args.window
              else _certified_window(oracle, around[0], args.max_boundary, args.radius))
    counts, certified = count_contours(window, around, args.max_boundary)
    recs = [{"family": oracle.name, "around": ";".join(oracle.format_vertex(v) for v in around),
             "n": n, "count": c, "window": window.descriptor, "certified": certified,
             "provenance": "exact-enumeration" if certified else "lower-bound"}
            for n, c in sorted(counts.items())]
    samples = []
    for c in enumerate_contours(window, around, args.max_boundary):
        if len(samples) >= args.samples:
            break
        samples.append({"size": c.size,
                        "interior": [oracle.format_vertex(v) for v in sorted(c.interior)]})
    return recs, [{"sample_contours": samples}]


def cmd_contour_distance(args):
    oracle = make_family(args.family)
    x, y = resolve_vertex(oracle, args.x), resolve_vertex(oracle, args.y)
    window = (parse_window(oracle, args.window) if args.window
              else _certified_window(oracle, x, args.max_boundary, args.radius))
    info = contour_distance_info(oracle, x, y, window, args.max_boundary)
    if info.value is None:
        raise BudgetExceeded(f"no contour of size <= {args.max_boundary} surrounds both vertices")
    rec = {"family": oracle.name, "x": oracle.format_vertex(x), "y": oracle.format_vertex(y),
           "f": info.value, "window": window.descriptor, "certified": info.certified,
           "provenance": "exact-enumeration" if info.certified else "window-upper-bound",
           "witness_interior": [oracle.format_vertex(v) for v in sorted(info.witness.interior)]}
    return [rec], []


def cmd_peierls_bound(args):
    oracle = make_family(args.family)
    R = estimate_R(oracle, args.max_size)
    P = estimate_P(oracle, args.max_size) if args.with_wedge else None
    b = make_bundle(oracle.max_degree, float(R.value), P.value if P else None,
                    scale=f"max_size={args.max_size}")
    rec = {"family": oracle.name, **b.as_record(), "R_exact": str(R.value),
           "certified": False, "provenance": "closed-form-from-windowed-estimates"}
    extra = []
    if args.check_growth:
        counts, certified = count_contours(
            _certified_window(oracle, oracle.root, args.check_growth, 8), [oracle.root],
            args.check_growth)
        g = growth_check(counts, b.r, certified)
        extra.append({"growth_check": {"status": g.status, "first_violation": g.first_violation,
                                       "note": g.note, "counts": counts}})
    return [rec], extra


def cmd_simulate(args):
    oracle = make_family(args.family)
    ps = _floats(args.p)
    x = resolve_vertex(oracle, args.x) if args.x else oracle.root
    fmt = oracle.format_vertex
    recs = []
    if args.quantity == "theta":
        radii = _ints(args.radius)
        for p in ps:
            for est in estimate_theta(oracle, x, p, radii, args.samples, args.seed, args.workers):
                recs.append({"family": oracle.name, "quantity": "theta", "p": p, "x": fmt(x),
                             "window": est.window, "value": est.value, "stderr": est.stderr,
                             "successes": est.successes, "samples": est.samples,
                             "seed": est.seed, "certified": False,
                             "provenance": "monte-carlo (rim-connection proxy, upper bound)"})
        return recs, []
    if args.window:
        window = parse_window(oracle, args.window)
    else:
        radii = _ints(args.radius)
        if len(radii) != 1:
            raise UsageError("simulate phi takes one --radius (or a --window)")
        window = ball(oracle, x, radii[0])
    ys = [resolve_vertex(oracle, t, window) for t in _vertex_list(args.y)]
    if not ys:
        raise UsageError("simulate phi needs at least one --y")
    pairs = [(x, y) for y in ys]
    res = estimate_phi_pairs(window, pairs, ps, args.samples, args.seed, args.reading, args.workers)
    for p in ps:
        for pair in pairs:
            est = res[(p, pair)]
            d = path_distance(oracle, pair[0], pair[1], cap=len(window.vertices))
            recs.append({"family": oracle.name, "quantity": "phi", "reading": args.reading, "p": p,
                         "x": fmt(pair[0]), "y": fmt(pair[1]), "d": d, "window": window.descriptor,
                         "value": est.value, "stderr": est.stderr, "successes": est.successes,
                         "samples": est.samples, "seed": est.seed, "certified": False,
                         "provenance": "monte-carlo"})
    return recs, []


def cmd_exact(args):
    oracle = make_family(args.family)
    window = parse_window(oracle, args.window)
    x, y = resolve_vertex(oracle, args.x, window), resolve_vertex(oracle, args.y, window)
    ec = ExactConnectivity(window, x, y, args.reading, workers=args.workers)
    check = args.reading == "rim-free" and ec.n_edges <= 24 and not args.no_contour_form
    d = path_distance(oracle, x, y, cap=len(window.vertices))
    recs = []
    for p in _floats(args.p):
        pf = as_fraction(p)
        phi = ec.phi(pf)
        rec = {"family": oracle.name, "p": p, "x": oracle.format_vertex(x),
               "y": oracle.format_vertex(y), "d": d, "window": window.descriptor,
               "reading": args.reading, "value": float(phi), "exact": str(phi),
               "stderr": 0.0, "normalization": ec.normalization(p)}
        if check and pf > 0:
            lam_form = ec.phi_lambda_form(pf)
            rec["closed_set_form"] = float(lam_form)
            rec["forms_agree"] = lam_form == phi
        if args.contour_sum and pf > 0:
            rec["contour_sum"] = float(ec.contour_sum(pf))
        rec.update({"n_edges": ec.n_edges, "certified": True, "provenance": "exact-enumeration"})
        recs.append(rec)
    return recs, []


def _read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def _curves(rows):
    groups: dict = {}
    for row in rows:
        d = row.get("d", row.get("distance", row.get("n")))
        if d in (None, ""):
            raise UsageError("input CSV needs a 'd' (or 'distance'/'n') column")
        key = row.get("p", "")
        groups.setdefault(key, []).append((float(d), float(row["value"]),
                                           float(row.get("stderr") or 0.0), row))
    out = []
    for key, pts in groups.items():
        pts.sort(key=lambda t: t[0])
        meta = {"p": float(key)} if key else {}
        out.append((DecayCurve.from_points([t[:3] for t in pts], **meta), [t[3] for t in pts]))
    return out


def cmd_fit_decay(args):
    recs = []
    for curve, _ in _curves(_read_csv(args.input)):
        fits = {}
        if args.model in ("auto", "exp"):
            fits["exponential"] = fit_exponential(curve)
        if args.model in ("auto", "poly"):
            fits["polynomial"] = fit_polynomial(curve)
        label = None
        if args.model == "auto":
            label = classify_decay(curve, args.threshold).label
        for name, f in fits.items():
            recs.append({"p": curve.meta.get("p"), "model": name, "slope": f.slope,
                         "intercept": f.intercept, "residual": f.residual, "points": f.n_points,
                         "dropped_zero": f.n_dropped, "classification": label,
                         "certified": False, "provenance": "least-squares-fit"})
    return recs, []


def cmd_compare_bracket(args):
    with open(args.bundle) as fh:
        data = json.load(fh)
    rec = data["records"][0] if "records" in data else data
    b = make_bundle(int(rec["max_degree"]), float(rec["R"]), rec.get("P"))
    recs = []
    for curve, rows in _curves(_read_csv(args.input)):
        if args.f:
            f_values = _ints(args.f)
        else:
            if "f" not in rows[0]:
                raise UsageError("give --f or an 'f' column in the input")
            f_values = [int(r["f"]) for r in rows]
        for r in bracket_compare(curve, b, f_values, n_se=args.n_se):
            recs.append({"p": curve.meta.get("p"), **r, "certified": False,
                         "provenance": "bracket-comparison"})
    return recs, []


COMMANDS = {
    "families": cmd_families,
    "estimate-constants": cmd_estimate_constants,
    "enumerate-contours": cmd_enumerate_contours,
    "contour-distance": cmd_contour_distance,
    "peierls-bound": cmd_peierls_bound,
    "simulate": cmd_simulate,
    "exact": cmd_exact,
    "fit-decay": cmd_fit_decay,
    "compare-bracket": cmd_compare_bracket,
}


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default $PERCO_ISO_OUT or ./perco_iso_out)")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--stem", help="output file stem (default: the subcommand name)")

    parser = argparse.ArgumentParser(prog="perco-iso", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"perco-iso {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("families", parents=[common], help="list graph families")

    p = sub.add_parser("estimate-constants", parents=[common], help="windowed R, C, P estimates")
    p.add_argument("--family", required=True)
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--constants", default="R,C,P")

    p = sub.add_parser("enumerate-contours", parents=[common], help="count contours by size")
    p.add_argument("--family", required=True)
    p.add_argument("--around", action="append", help="vertex token; repeat or separate with ';'")
    p.add_argument("--max-boundary", type=int, required=True)
    p.add_argument("--window")
    p.add_argument("--radius", type=int, default=8, help="ball radius when no certificate exists")
    p.add_argument("--samples", type=int, default=5, help="example contours to list")

    p = sub.add_parser("contour-distance", parents=[common], help="smallest contour around x and y")
    p.add_argument("--family", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--window")
    p.add_argument("--radius", type=int, default=10)
    p.add_argument("--max-boundary", type=int, default=32)

    p = sub.add_parser("peierls-bound", parents=[common], help="Peierls constants and p_c bounds")
    p.add_argument("--family", required=True)
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--with-wedge", action="store_true")
    p.add_argument("--check-growth", type=int, default=0, metavar="N",
                   help="also check contour counts up to size N against r^n")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo theta proxy or phi_f")
    p.add_argument("quantity", choices=["theta", "phi"])
    p.add_argument("--family", required=True)
    p.add_argument("--p", required=True, help="comma-separated p grid")
    p.add_argument("--radius", default="4", help="comma-separated radii (theta) or one radius")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--x")
    p.add_argument("--y", action="append", help="second vertex; repeat or separate with ';'")
    p.add_argument("--window")
    p.add_argument("--reading", choices=["rim-free", "free"], default="rim-free")

    p = sub.add_parser("exact", parents=[common], help="exhaustive phi_f on a small window")
    p.add_argument("quantity", choices=["phi"])
    p.add_argument("--family", required=True)
    p.add_argument("--window", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--reading", choices=["rim-free", "free"], default="rim-free")
    p.add_argument("--contour-sum", action="store_true", help="also report the contour-sum bound")
    p.add_argument("--no-contour-form", action="store_true", help="skip the closed-set cross-check")

    p = sub.add_parser("fit-decay", parents=[common], help="fit and classify a decay curve")
    p.add_argument("--input", required=True)
    p.add_argument("--model", choices=["auto", "exp", "poly"], default="auto")
    p.add_argument("--threshold", type=float, default=DEFAULT_RATIO)

    p = sub.add_parser("compare-bracket", parents=[common], help="check points against the bracket")
    p.add_argument("--input", required=True)
    p.add_argument("--bundle", required=True, help="JSON written by peierls-bound --with-wedge")
    p.add_argument("--f", help="comma-separated contour distances aligned with the curve")
    p.add_argument("--n-se", type=float, default=3.0)

    p = sub.add_parser("reproduce", parents=[common], help="rerun a manifest and compare payloads")
    p.add_argument("manifest")
    return parser


# --- output ----------------------------------------------------------------------

def _out_dir(args) -> Path:
    d = Path(args.out or os.environ.get("PERCO_ISO_OUT") or "perco_iso_out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (frozenset, set, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if hasattr(v, "item"):  # numpy scalars
        return v.item()
    return v


def _payload(records, extra) -> str:
    """Canonical serialisation of the numeric payload."""
    return json.dumps({"records": _jsonable(records), "extra": _jsonable(extra)},
                      sort_keys=True, indent=1)


def _csv_text(records) -> str:
    if not records:
        return ""
    cols = []
    for r in records:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow({k: ";".join(map(str, v)) if isinstance(v, (list, tuple)) else v
                    for k, v in _jsonable(r).items()})
    return buf.getvalue()


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in _VOLATILE and k != "command"}


def _argv_for(argv) -> list[str]:
    """The argv with volatile options removed, for reruns."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        name = a.split("=", 1)[0]
        if name in ("--out", "--workers"):
            skip = "=" not in a
            continue
        out.append(a)
    return out


def _execute(args, argv) -> int:
    started = time.time()
    records, extra = COMMANDS[args.command](args)
    elapsed = time.time() - started
    flags = sorted({str(r.get("certified")) + "/" + str(r.get("provenance"))
                    for r in records if "provenance" in r})
    manifest = {
        "command": args.command,
        "argv": _argv_for(argv),
        "family": getattr(args, "family", None),
        "parameters": _jsonable(_params(args)),
        "seed": getattr(args, "seed", None),
        "tool_version": __version__,
        "csv_schema": CSV_SCHEMA,
        "workers": args.workers,
        "wall_clock_seconds": round(elapsed, 3),
        "completeness": flags,
    }
    out = _out_dir(args)
    stem = args.stem or args.command
    payload = _payload(records, extra)
    manifest["payload_file"] = f"{stem}.json"
    doc = {"manifest": manifest, "records": _jsonable(records), "extra": _jsonable(extra)}
    (out / f"{stem}.json").write_text(json.dumps(doc, indent=1) + "\n")
    head = "".join(f"# {line}\n" for line in json.dumps(manifest, sort_keys=True).splitlines())
    (out / f"{stem}.csv").write_text(head + _csv_text(records))
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    if stem != "manifest":
        (out / f"{stem}.manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    (out / f"{stem}.payload").write_text(payload)
    print(_csv_text(records), end="")
    return EXIT_OK


def _reproduce(args) -> int:
    path = Path(args.manifest)
    manifest = json.loads(path.read_text())
    if "manifest" in manifest:
        manifest = manifest["manifest"]
    stem = Path(manifest["payload_file"]).stem
    original = path.parent / f"{stem}.payload"
    if not original.exists():
        doc = json.loads((path.parent / manifest["payload_file"]).read_text())
        expected = _payload(doc["records"], doc["extra"])
    else:
        expected = original.read_text()
    with tempfile.TemporaryDirectory() as tmp:
        argv = list(manifest["argv"]) + ["--out", tmp, "--workers", str(args.workers)]
        sub_args = build_parser().parse_args(argv)
        sub_args.stem = stem
        with _quiet():
            _execute(sub_args, argv)
        got = (Path(tmp) / f"{stem}.payload").read_text()
    if got != expected:
        print(f"MISMATCH: payload of {shlex.join(manifest['argv'])} differs", file=sys.stderr)
        return EXIT_MISMATCH
    print(f"reproduced {shlex.join(manifest['argv'])} with {args.workers} worker(s): identical")
    return EXIT_OK


class _quiet:
    def __enter__(self):
        self._old = sys.stdout
        sys.stdout = io.StringIO()

    def __exit__(self, *exc):
        sys.stdout = self._old
        return False


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "reproduce":
            return _reproduce(args)
        return _execute(args, argv)
    except (UsageError, ParseError, DomainError, InsufficientData, UnsupportedError,
            ValueError) as exc:
        print(f"perco-iso: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, PaddingError, OracleError) as exc:
        print(f"perco-iso: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PercoIsoError as exc:
        print(f"perco-iso: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
