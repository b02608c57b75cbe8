"""Command-line interface.

Commands: report, sweep, orchard, certify, flecnodal.  Every command prints one
JSON Report (sorted keys, newline-terminated) to stdout or to --out.

Exit codes: 0 success, 2 parse/input error, 3 embedding error, 4 anything else
(including a violated theorem bound).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from .bounds import (
    certify_eq18,
    certify_q5,
    double_line_conic,
    double_line_hessian_pencil,
    lines_on_quotient,
    q5_curve,
    residual_cubic_pencil,
    to_double_line_form,
)
from .enumeration import (
    flecnodal_test,
    incidence_graph,
    lines_meeting_curve,
    lines_on_surface,
    lines_through_point,
)
from .errors import (
    DegenerateCurve,
    EmbeddingFailure,
    LineMissing,
    NotNormalizable,
    ParseFailure,
    TheoremViolation,
    WrongShape,
)
from .families import FAMILIES, random_surface
from .field import FieldSpec, field_make
from .geom import ProjLine, ProjPoint, collinear_triplets
from .poly import parse_polynomial
from .surface import (
    QuarticSurface,
    classify_family,
    corpus_dir,
    detect_singular_curves,
    load_surface,
    singular_point_set,
    singular_points,
)

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_PARSE, EXIT_EMBED, EXIT_INTERNAL = 0, 2, 3, 4
PACKAGE_DIR = Path(__file__).resolve().parent
PROTOCOL_NOTE = "reconstructed field-sweep protocol; counts are finite-field evidence"

MAX_LINES = 64
MAX_Q4 = 20
MAX_TRIPLE = 31
MAX_THROUGH_TRIPLE = 12
MAX_DOUBLE_LINE = 35
MAX_DOUBLE_LINE_VALENCE = 16
CONJECTURE_THRESHOLD = 31


class ConfigError(ParseFailure):
    """Invalid command-line or configuration value."""


# ---------------------------------------------------------------------------
# configuration


def load_config() -> dict:
    return json.loads((PACKAGE_DIR / "fields.json").read_text(encoding="utf-8"))


def load_schema() -> dict:
    return json.loads((PACKAGE_DIR / "report.schema.json").read_text(encoding="utf-8"))


def parse_field(text: str) -> FieldSpec:
    """"13" -> F_13, "13^2" -> F_169."""
    text = str(text).strip()
    base, sep, exp = text.partition("^")
    try:
        p = int(base)
        k = int(exp) if sep else 1
    except ValueError:
        raise ConfigError(f"bad field {text!r}; expected p or p^2") from None
    if k not in (1, 2):
        raise ConfigError(f"bad field {text!r}; only prime fields and quadratic extensions")
    try:
        return field_make(p, k)
    except ValueError as exc:
        raise ConfigError(f"bad field {text!r}: {exc}") from None


def field_label(F: FieldSpec) -> str:
    return str(F.p) if F.k == 1 else f"{F.p}^2"


def parse_fields(text: str | None) -> list[FieldSpec] | None:
    if text is None:
        return None
    out = [parse_field(t) for t in text.split(",") if t.strip()]
    if not out:
        raise ConfigError("empty field list")
    return out


def fields_for(name: str, override: list[FieldSpec] | None) -> list[FieldSpec]:
    if override is not None:
        return override
    cfg = load_config()
    return [parse_field(t) for t in cfg["pinned"].get(name, cfg["default"])]


def stable_count(per_field: dict) -> dict:
    """The largest count reached by at least two fields, or None."""
    tally = Counter(per_field.values())
    agreed = [c for c, n in tally.items() if n >= 2]
    value = max(agreed) if agreed else None
    return {"per_field": per_field, "stable_count": value,
            "agreeing_fields": sorted(k for k, v in per_field.items() if v == value) if value is not None else [],
            "protocol": PROTOCOL_NOTE}


def make_report(command: str, inputs: dict, results: dict, timings: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
            "results": results, "timings": {k: round(v, 6) for k, v in timings.items()}}


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def validate_report(report: dict) -> None:
    jsonschema.validate(report, load_schema())


def _violation(msg: str):
    raise TheoremViolation(msg)


# ---------------------------------------------------------------------------
# report


def surface_field_report(S: QuarticSurface, F: FieldSpec, workers: int = 1) -> dict:
    """Singular locus, family tag, lines and incidence data of S over F."""
    P = S.over(F)
    locus = singular_points(P, F)
    try:
        tag = classify_family(P, F, locus)
        family = tag.to_json()
    except NotNormalizable as exc:
        tag, family = None, {"tag": "NotNormalizable", "reason": str(exc)}
    L = lines_on_surface(P, F, workers=workers)
    G = incidence_graph(L)
    disjoint, exact = G.max_disjoint_set()
    through = []
    for rec in locus:
        if rec.multiplicity >= 2 and not locus.on_curve(rec.point):
            pts = lines_through_point(P, rec.point, F)
            through.append({"point": rec.point.to_json(), "count": len(pts),
                            "lines": [G.index_of(l) for l in pts]})
    singular_lines = []
    for c in locus.curves:
        if c.kind == "line":
            ln = ProjLine(c.points[0], c.points[1])
            idx = G.index_of(ln)
            singular_lines.append({"line": idx, "valence": G.valence(idx)})
    out = {
        "field": dict(F.descriptor(), label=field_label(F)),
        "line_count": len(L),
        "lines": L.to_json(),
        "valences": G.valences,
        "valence_histogram": {str(k): v for k, v in G.valence_histogram().items()},
        "components": G.components(),
        "coplanar_quadruples": [list(t) for t in G.coplanar_quadruples],
        "max_disjoint": {"indices": disjoint, "size": len(disjoint), "exact": exact},
        "singular_points": [r.to_json() for r in locus],
        "singular_curves": [c.to_json() for c in locus.curves],
        "family": family,
        "lines_through_singular": through,
        "singular_lines": singular_lines,
    }
    out["guardrails"] = check_guardrails(out)
    return out


def check_guardrails(res: dict) -> list[str]:
    """Apply the proven bounds to one field result; raise on violation."""
    n = res["line_count"]
    checked = []
    if n > MAX_LINES:
        _violation(f"{n} lines > {MAX_LINES} over {res['field']['label']}")
    checked.append(f"total<={MAX_LINES}")
    if res["family"].get("tag") == "Q4":
        if n > MAX_Q4:
            _violation(f"Q4 surface with {n} lines > {MAX_Q4}")
        checked.append(f"Q4<={MAX_Q4}")
    triple = [r for r in res["singular_points"] if r["multiplicity"] == 3]
    if triple and not res["singular_curves"]:
        if n > MAX_TRIPLE:
            _violation(f"isolated triple point with {n} lines > {MAX_TRIPLE}")
        for t in res["lines_through_singular"]:
            if t["point"] in [r["point"] for r in triple] and t["count"] > MAX_THROUGH_TRIPLE:
                _violation(f"{t['count']} lines through a triple point > {MAX_THROUGH_TRIPLE}")
        checked.append(f"triple<={MAX_TRIPLE}")
    for sl in res["singular_lines"]:
        if sl["valence"] > MAX_DOUBLE_LINE_VALENCE:
            _violation(f"singular line met by {sl['valence']} lines > {MAX_DOUBLE_LINE_VALENCE}")
        checked.append(f"double_line_valence<={MAX_DOUBLE_LINE_VALENCE}")
    return checked


def cmd_report(path: str, fields: list[FieldSpec] | None = None, workers: int = 1) -> dict:
    S = load_surface(path)
    fl = fields_for(S.name, fields)
    results, timings, counts = {}, {}, {}
    for F in fl:
        t0 = time.perf_counter()
        res = surface_field_report(S, F, workers)
        label = field_label(F)
        timings[label] = time.perf_counter() - t0
        results[label] = res
        counts[label] = res["line_count"]
    inputs = {"surface": S.name, "equation": S.poly.to_str(), "domain": S.domain,
              "fields": [field_label(F) for F in fl]}
    return make_report("report", inputs, {"fields": results, "summary": stable_count(counts)}, timings)


# ---------------------------------------------------------------------------
# sweep


O_POINT = (0, 0, 0, 1)


def isolated_at_origin(P, F: FieldSpec) -> bool:
    """O is singular and lies on no detected curve of singular points."""
    O = ProjPoint(O_POINT, F)
    pts = singular_point_set(P, F)
    if O not in pts:
        return False
    return not any(O in c.points for c in detect_singular_curves(P, F, pts))


def sweep_trial(args) -> dict:
    family, field_text, seed, trial = args
    F = parse_field(field_text)
    rng = np.random.default_rng([seed, trial])
    rejected = 0
    while True:
        P = random_surface(family, F, rng)
        if family == "Eq18" or isolated_at_origin(P, F):
            break
        rejected += 1
    L = lines_on_surface(P, F)
    return {"trial": trial, "rejected": rejected, "line_count": len(L),
            "polynomial": P.to_str(), "lines": L.to_json()}


def _sweep_guard(family: str, n: int, trial: int):
    if n > MAX_LINES:
        _violation(f"trial {trial}: {n} lines > {MAX_LINES}")
    if family == "Q4" and n > MAX_Q4:
        _violation(f"trial {trial}: Q4 instance with {n} lines > {MAX_Q4}")
    if family == "Eq18" and n > MAX_DOUBLE_LINE:
        _violation(f"trial {trial}: double-line instance with {n} lines > {MAX_DOUBLE_LINE}")


def cmd_sweep(family: str = "Q6", trials: int = 100, seed: int = 0, field: FieldSpec | None = None,
              archive_dir: str | Path = "sweep_archive", workers: int = 1) -> dict:
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; choose from {FAMILIES}")
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    F = field if field is not None else field_make(13)
    label = field_label(F)
    jobs = [(family, label, seed, t) for t in range(trials)]
    t0 = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            outcomes = list(ex.map(sweep_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        outcomes = [sweep_trial(j) for j in jobs]
    elapsed = time.perf_counter() - t0
    archived = []
    for o in outcomes:
        _sweep_guard(family, o["line_count"], o["trial"])
        if o["line_count"] > CONJECTURE_THRESHOLD:
            archived.append(archive_instance(Path(archive_dir), family, label, seed, o))
    counts = [o["line_count"] for o in outcomes]
    hist = Counter(counts)
    results = {
        "histogram": {str(k): hist[k] for k in sorted(hist)},
        "max": max(counts),
        "counts": counts,
        "rejected": sum(o["rejected"] for o in outcomes),
        "archived": archived,
        "threshold": CONJECTURE_THRESHOLD,
    }
    inputs = {"family": family, "trials": trials, "seed": seed, "field": label}
    return make_report("sweep", inputs, results, {"total": elapsed})


def archive_instance(directory: Path, family: str, label: str, seed: int, outcome: dict) -> dict:
    """Write one over-threshold instance with everything needed to rerun it."""
    directory.mkdir(parents=True, exist_ok=True)
    name = f"{family}_F{label.replace('^', 'sq')}_seed{seed}_trial{outcome['trial']}.json"
    record = {"family": family, "field": label, "seed": seed, "trial": outcome["trial"],
              "rng": f"numpy.random.default_rng([{seed}, {outcome['trial']}])",
              "rejected_before": outcome["rejected"], "polynomial": outcome["polynomial"],
              "line_count": outcome["line_count"], "lines": outcome["lines"]}
    (directory / name).write_text(json.dumps(record, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return {"trial": outcome["trial"], "line_count": outcome["line_count"], "file": name}


# ---------------------------------------------------------------------------
# orchard


def parse_point_file(text: str) -> tuple[str, list[list]]:
    """Header lines ``key: value`` then one point per line, coordinates split by ':'."""
    name, rows = "points", []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("name:"):
            name = line[5:].strip()
            continue
        parts = [s.strip() for s in line.split(":")]
        if len(parts) != 3 or not all(parts):
            raise ParseFailure(f"expected three coordinates a : b : c, got {line!r}")
        rows.append(parts)
    if not rows:
        raise ParseFailure("point file contains no points")
    return name, rows


def embed_points(rows, F: FieldSpec) -> list[ProjPoint]:
    pts = []
    for row in rows:
        coords = []
        for text in row:
            c = parse_polynomial(text, domain=F)
            if c.degree > 0:
                raise ParseFailure(f"coordinate {text!r} is not a constant")
            coords.append(c.coefficient((0, 0, 0, 0)))
        if not any(coords):
            raise EmbeddingFailure(f"point {':'.join(row)} vanishes in {F}")
        pts.append(ProjPoint(coords))
    return pts


def cmd_orchard(path: str, fields: list[FieldSpec] | None = None) -> dict:
    p = Path(path)
    if not p.exists() and (corpus_dir() / p.name).exists():
        p = corpus_dir() / p.name
    name, rows = parse_point_file(p.read_text(encoding="utf-8"))
    fl = fields if fields is not None else fields_for(name, None)
    per, triples, timings = {}, {}, {}
    for F in fl:
        t0 = time.perf_counter()
        n, tr = collinear_triplets(embed_points(rows, F))
        label = field_label(F)
        timings[label] = time.perf_counter() - t0
        per[label] = n
        triples[label] = [list(t) for t in tr]
    summary = stable_count(per)
    results = {"per_field": per, "triplets": triples, "asserted": summary["stable_count"],
               "protocol": PROTOCOL_NOTE}
    inputs = {"points": name, "count": len(rows), "fields": [field_label(F) for F in fl]}
    return make_report("orchard", inputs, results, timings)


# ---------------------------------------------------------------------------
# certificates


def _cert_record(cert, lines=None, curve=None) -> dict:
    out = cert.to_json()
    if lines is not None:
        n, meet = lines_meeting_curve(lines, curve)
        chk = lines_on_quotient(cert, meet)
        out["cross_check"] = {"lines_meeting_curve": n, "on_quotient": sum(chk.values()),
                              "verdict": all(chk.values())}
    return out


def certify_random(family: str, trials: int, seed: int, F: FieldSpec) -> dict:
    """Certificates for random members of Q5 (half h220 = 1, half h220 = 0) or Eq18."""
    records, passed, degenerate = [], 0, 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        rec = {"trial": trial}
        if family == "Q5":
            variant = "one" if trial < (trials + 1) // 2 else "zero"
            N = random_surface("Q5", F, rng, h220=variant)
            rec["h220"] = variant
            run = certify_q5
        elif family == "Eq18":
            N = random_surface("Eq18", F, rng)
            run = certify_eq18
        else:
            raise ConfigError("random certificates exist for Q5 and Eq18")
        try:
            cert = run(N, F)
        except DegenerateCurve as exc:
            rec.update(status="DegenerateCurve", reason=str(exc))
            degenerate += 1
        else:
            rec.update(status="verified" if cert.verified else "failed", certificate=cert.to_json())
            passed += cert.verified
        records.append(rec)
    return {"instances": records, "passed": passed, "degenerate": degenerate,
            "failed": trials - passed - degenerate}


def certify_surface(S: QuarticSurface, F: FieldSpec) -> dict:
    """Applicable certificates for one surface over F."""
    P = S.over(F)
    out: dict = {}
    locus = singular_points(P, F)
    if locus.curves:
        try:
            out["hessian_pencil"] = double_line_hessian_pencil(P, F).to_json()
        except WrongShape as exc:
            out["hessian_pencil"] = {"status": "not applicable", "reason": str(exc)}
        try:
            N, _ = to_double_line_form(P, F)
            cert = certify_eq18(N, F)
            out["double_line_resultant"] = _cert_record(cert, lines_on_surface(N, F), double_line_conic(F))
        except (WrongShape, DegenerateCurve) as exc:
            out["double_line_resultant"] = {"status": "not applicable", "reason": str(exc)}
        return out
    try:
        tag = classify_family(P, F, locus)
    except NotNormalizable as exc:
        return {"family": "NotNormalizable", "reason": str(exc)}
    out["family"] = tag.tag
    if tag.tag == "Q4":
        N = tag.normal_form
        try:
            pc = residual_cubic_pencil(N, F)
            out["residual_cubic_pencil"] = dict(pc.to_json(), b4_roots=[str(r) for r in pc.b4_roots(F)])
        except (WrongShape, LineMissing) as exc:
            out["residual_cubic_pencil"] = {"status": "not applicable", "reason": str(exc)}
    elif tag.tag == "Q5":
        N = tag.normal_form
        try:
            cert = certify_q5(N, F)
            out["q5_resultant"] = _cert_record(cert, lines_on_surface(N, F), q5_curve(N, F))
        except (WrongShape, DegenerateCurve) as exc:
            out["q5_resultant"] = {"status": "not applicable", "reason": str(exc)}
    return out


def cmd_certify(path: str | None = None, family: str | None = None, trials: int = 50, seed: int = 0,
                fields: list[FieldSpec] | None = None) -> dict:
    t0 = time.perf_counter()
    if path is not None:
        S = load_surface(path)
        fl = fields_for(S.name, fields)
        results = {field_label(F): certify_surface(S, F) for F in fl}
        inputs = {"surface": S.name, "equation": S.poly.to_str(), "fields": [field_label(F) for F in fl]}
    else:
        if family is None:
            raise ConfigError("certify needs a surface path or --family")
        if trials < 1:
            raise ConfigError("trials must be at least 1")
        F = (fields or [field_make(13)])[0]
        results = certify_random(family, trials, seed, F)
        inputs = {"family": family, "trials": trials, "seed": seed, "field": field_label(F)}
    return make_report("certify", inputs, results, {"total": time.perf_counter() - t0})


# ---------------------------------------------------------------------------
# flecnodal


def flecnodal_scan(S: QuarticSurface, F: FieldSpec) -> dict:
    """flecnodal_test at every smooth F-point on every line of S."""
    P = S.over(F)
    L = lines_on_surface(P, F)
    grads = P.gradient()
    tested, failures, seen = 0, [], set()
    for ln in L:
        for pt in ln.points():
            if pt in seen:
                continue
            seen.add(pt)
            if not any(g.evaluate(pt.coords) for g in grads):
                continue
            ok, _ = flecnodal_test(P, pt, F)
            tested += 1
            if not ok:
                failures.append(pt.to_json())
    return {"line_count": len(L), "points_tested": tested, "failures": failures,
            "sound": not failures}


def cmd_flecnodal(path: str, fields: list[FieldSpec] | None = None) -> dict:
    S = load_surface(path)
    fl = fields if fields is not None else [field_make(13)]
    results, timings = {}, {}
    for F in fl:
        t0 = time.perf_counter()
        results[field_label(F)] = flecnodal_scan(S, F)
        timings[field_label(F)] = time.perf_counter() - t0
    inputs = {"surface": S.name, "equation": S.poly.to_str(), "fields": [field_label(F) for F in fl]}
    return make_report("flecnodal", inputs, results, timings)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quartlines", description="Lines on quartic surfaces over finite fields.")
    ap.add_argument("--json-schema", action="store_true", help="print the report JSON schema and exit")
    sub = ap.add_subparsers(dest="command")

    def common(p, fields_help="comma-separated fields, e.g. 13,29,13^2"):
        p.add_argument("--fields", help=fields_help)
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("report", help="singular points, family, lines and incidence per field")
    p.add_argument("surface")
    p.add_argument("--workers", type=int, default=1)
    common(p)

    p = sub.add_parser("sweep", help="random normal-form surfaces and their line counts")
    p.add_argument("--family", default="Q6", choices=FAMILIES)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--archive-dir", default=None, help="where instances above 31 lines are written")
    p.add_argument("--workers", type=int, default=1)
    common(p, "the field, e.g. 13")

    p = sub.add_parser("orchard", help="collinear triplets of a plane point configuration")
    p.add_argument("points")
    common(p, "comma-separated primes to embed the points")

    p = sub.add_parser("certify", help="resultant and pencil certificates")
    p.add_argument("surface", nargs="?")
    p.add_argument("--family", choices=("Q5", "Eq18"))
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("flecnodal", help="flecnodal test at smooth points on the lines")
    p.add_argument("surface")
    common(p)
    return ap


def run(argv=None) -> dict | None:
    args = build_parser().parse_args(argv)
    if args.json_schema:
        return load_schema()
    if args.command is None:
        raise ConfigError("no command given")
    fields = parse_fields(args.fields)
    if args.command == "report":
        return cmd_report(args.surface, fields, workers=args.workers)
    if args.command == "sweep":
        if fields is not None and len(fields) != 1:
            raise ConfigError("sweep takes a single field")
        archive = args.archive_dir
        if archive is None:
            archive = Path(args.out).parent / "sweep_archive" if args.out else Path("sweep_archive")
        return cmd_sweep(args.family, args.trials, args.seed, fields[0] if fields else None,
                         archive_dir=archive, workers=args.workers)
    if args.command == "orchard":
        return cmd_orchard(args.points, fields)
    if args.command == "certify":
        return cmd_certify(args.surface, args.family, args.trials, args.seed, fields)
    return cmd_flecnodal(args.surface, fields)


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, (ParseFailure, FileNotFoundError, IsADirectoryError)):
        return EXIT_PARSE
    if isinstance(exc, EmbeddingFailure):
        return EXIT_EMBED
    return EXIT_INTERNAL


def main(argv=None) -> int:
    out_path = None
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        report = run(argv)
        ns = build_parser().parse_args(argv)
        out_path = getattr(ns, "out", None)
        if not ns.json_schema:
            validate_report(report)
        text = dumps(report)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_PARSE if exc.code else EXIT_OK
    except Exception as exc:
        kind = "theorem violation" if isinstance(exc, TheoremViolation) else type(exc).__name__
        print(f"quartlines: {kind}: {exc}", file=sys.stderr)
        return exit_code(exc)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
