"""Command-line front end.

Every run prints a header recording its full configuration, then a report.
Text and JSON formats carry the same fields.  Exit codes: 0 success or pass,
1 mathematical failure (certificate or criterion fails, curve not good),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product
from typing import Sequence

from . import __version__
from .chabauty import (
    SelmerInput,
    assemble_rholog,
    criterion,
    parse_image,
)
from .curves import (
    LONG,
    SHORT,
    CurveModel,
    complete_square,
    enumerate_points,
    is_good,
    newton_polygon,
    parse_coeffs,
    parse_curve_line,
    sym2_classes,
    torsion_condition_ok,
)
from .density import density_report
from .dyadic import DEFAULT_PRECISION
from .errors import (
    CertificateFailure,
    InputFormatError,
    NotGood,
    SeedMissing,
    Sym2ChabError,
)
from .montecarlo import POONEN_RAINS, RANK_MODELS, SimConfig, run_trials
from .series import basis_change_matrix, default_truncation, expand_s_of_t, omega_at_infinity

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad flag value; the message names the flag."""


# -- output --------------------------------------------------------------------


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _render_text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, val in obj.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_render_text(val, indent + 1))
        elif isinstance(val, list) and val and all(isinstance(x, dict) for x in val):
            lines.append(f"{pad}{key}:")
            lines.extend(_render_table(val, indent + 1))
        elif isinstance(val, list):
            lines.append(f"{pad}{key}: " + (", ".join(_scalar(x) if not isinstance(x, list)
                                                    else "[" + ", ".join(map(_scalar, x)) + "]"
                                                    for x in val) or "(none)"))
        else:
            lines.append(f"{pad}{key}: {_scalar(val)}")
    return lines


def _render_table(rows: list[dict], indent: int) -> list[str]:
    pad = "  " * indent
    cols = list(rows[0])
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) for k, c in enumerate(cols)]
    out = [pad + "  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    for row in cells:
        out.append(pad + "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip())
    return out


def _cell(v) -> str:
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    if isinstance(v, list):
        return "[" + ",".join(_cell(x) for x in v) + "]"
    return _scalar(v)


def _emit(args, result: dict, out) -> None:
    doc = {"command": args.command, "version": __version__, "config": _config(args),
           "result": result}
    if args.format == "json":
        out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
        return
    out.write(f"# sym2chab {__version__} {args.command}\n")
    for k, v in doc["config"].items():
        out.write(f"# {k} = {_scalar(v)}\n")
    out.write("\n".join(_render_text(result)) + "\n")


def _config(args) -> dict:
    skip = {"command", "func", "format"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg["format"] = args.format
    return cfg


# -- argument helpers ------------------------------------------------------------


def _curve_from_args(args) -> CurveModel:
    if args.curve is None:
        raise UsageError("--curve is required for this subcommand")
    try:
        coeffs = parse_coeffs(args.curve)
    except InputFormatError as exc:
        raise UsageError(f"--curve: {exc}") from None
    n = len(coeffs)
    if n % 2 == 0:
        raise UsageError(f"--curve: need 2g+1 coefficients, got {n}")
    g = (n - 1) // 2
    if args.genus is not None and args.genus != g:
        raise UsageError(f"--genus {args.genus} does not match --curve with {n} coefficients")
    if g < 2:
        raise UsageError(f"--curve: genus {g} is below 2")
    return CurveModel(g, args.model, tuple(coeffs))


def _long_model(h: CurveModel) -> CurveModel:
    if h.kind == LONG:
        return h
    raise UsageError("--model short is only supported by check-good, points and polygon")


def _truncation(args, g: int) -> int:
    T = default_truncation(g) if args.truncation is None else args.truncation
    if T < 2 * g + 2:
        raise UsageError(f"--truncation must be at least 2g+2 = {2 * g + 2}")
    return T


def _read(path: str, flag: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"{flag}: cannot read {path!r}: {exc.strerror}") from None


# -- subcommands ---------------------------------------------------------------------


def cmd_check_good(args) -> tuple[dict, int]:
    h = _curve_from_args(args)
    if h.kind == SHORT:
        raise UsageError("--model short: goodness is defined for the long model y^2 + y = h(x)")
    rep = is_good(h)
    result = {"curve": str(h), "genus": h.genus, **rep.as_dict()}
    return result, EXIT_OK if rep.good else EXIT_FAIL


def cmd_points(args) -> tuple[dict, int]:
    h = _long_model(_curve_from_args(args))
    f2 = enumerate_points(h, "F2")
    f4 = enumerate_points(h, "F4")
    classes = sym2_classes(h, strict=False)
    result = {
        "curve": str(h), "genus": h.genus, "good": is_good(h).good,
        "points_F2": [str(p) for p in f2], "count_F2": len(f2),
        "points_F4": [str(p) for p in f4], "count_F4": len(f4),
        "sym2_classes": [str(c) for c in classes],
        "all_classes_are_fibers": all(c.is_hyperelliptic_fiber for c in classes),
    }
    return result, EXIT_OK


def cmd_polygon(args) -> tuple[dict, int]:
    h = _curve_from_args(args)
    f = complete_square(h) if h.kind == LONG else h
    poly = newton_polygon(f)
    result = {"curve": str(h), "polynomial": str(f), **poly.as_dict()}
    return result, EXIT_OK


def cmd_expand(args) -> tuple[dict, int]:
    h = _long_model(_curve_from_args(args))
    g = h.genus
    T = _truncation(args, g)
    s = expand_s_of_t(h, T)
    omegas = {f"omega_{j}": str(omega_at_infinity(h, j, T)) for j in range(1, g + 1)}
    bc = basis_change_matrix(h, T)
    result = {"curve": str(h), "truncation": T, "s_of_t": str(s), **omegas,
              "basis_change": bc.as_dict()}
    return result, EXIT_OK


def cmd_certify(args) -> tuple[dict, int]:
    h = _long_model(_curve_from_args(args))
    T = _truncation(args, h.genus)
    try:
        image = assemble_rholog(h, T, args.precision)
    except CertificateFailure as exc:
        return {"curve": str(h), "certified": False, "failure": str(exc)}, EXIT_FAIL
    doc = image.as_dict()
    doc = {"curve": str(h), "certified": True, **doc}
    return doc, EXIT_OK


def _image_for(args, g: int | None, h: CurveModel | None):
    if args.image is not None:
        pts = parse_image(_read(args.image, "--image"))
        if not pts:
            raise UsageError("--image: file lists no points")
        if g is not None and pts[0].genus != g:
            raise UsageError(f"--image: points have length {pts[0].genus}, expected {g}")
        return pts
    if h is None:
        raise UsageError("either --curve or --image is required")
    return list(assemble_rholog(h, _truncation(args, h.genus), args.precision).points)


def cmd_criterion(args) -> tuple[dict, int]:
    if args.selmer is None:
        raise UsageError("--selmer is required for criterion")
    sel = SelmerInput.parse(_read(args.selmer, "--selmer"))
    h = _long_model(_curve_from_args(args)) if args.curve is not None else None
    if h is not None and sel.genus != h.genus:
        raise UsageError(f"--selmer: genus {sel.genus} does not match the curve's genus {h.genus}")
    if h is not None and not is_good(h).good:
        raise NotGood("criterion needs a good curve")
    pts = _image_for(args, sel.genus, h)
    torsion = torsion_condition_ok(h) if h is not None else True
    verdict = criterion(pts, sel, torsion)
    result = {"curve": None if h is None else str(h), "image": [str(p) for p in pts],
              "selmer_rows": sel.dumps().split("\n")[1:-1], **verdict.as_dict()}
    return result, EXIT_OK if verdict.overall else EXIT_FAIL


def cmd_density(args) -> tuple[dict, int]:
    if args.genus is None:
        raise UsageError("--genus is required for density")
    return density_report(args.genus), EXIT_OK


def first_good_pattern(g: int) -> tuple[int, ...]:
    """Lexicographically first good mod-2 pattern; found after a few tries."""
    for p in product((0, 1), repeat=2 * g + 1):
        if is_good(CurveModel(g, LONG, p)).good:
            return p
    raise AssertionError("unreachable: good patterns have density 1/8")


def cmd_simulate(args) -> tuple[dict, int]:
    if args.genus is None:
        raise UsageError("--genus is required for simulate")
    if args.trials is None or args.trials <= 0:
        raise UsageError("--trials must be a positive integer")
    g = args.genus
    if args.image is not None:
        image = _image_for(args, g, None)
        source = args.image
    else:
        h = CurveModel(g, LONG, first_good_pattern(g))
        image = _image_for(args, g, h)
        source = str(h)
    cfg = SimConfig(genus=g, trials=args.trials, seed=args.seed, rank_model=args.rank_model,
                    strict=args.ci, workers=args.jobs)
    rep = run_trials(cfg, image)
    result = {"image_source": source, "image": [str(p) for p in image], **rep.as_dict()}
    return result, EXIT_OK


def _scan_row(task) -> dict:
    lineno, line, T_opt, precision, sel_text = task
    try:
        h = parse_curve_line(line, lineno)
    except InputFormatError as exc:
        return {"line": lineno, "error": str(exc)}
    row = {"line": lineno, "genus": h.genus, "coeffs": ",".join(map(str, h.coeffs))}
    good = is_good(h).good
    row["good"] = good
    row["F2"] = len(enumerate_points(h, "F2"))
    row["F4"] = len(enumerate_points(h, "F4"))
    row["image"] = None
    row["verdict"] = "not-good"
    if not good:
        return row
    T = default_truncation(h.genus) if T_opt is None else T_opt
    try:
        image = assemble_rholog(h, T, precision)
    except CertificateFailure:
        row["verdict"] = "certificate-failed"
        return row
    row["image"] = image.cardinality
    row["verdict"] = "certified"
    if sel_text is not None:
        sel = SelmerInput.parse(sel_text)
        if sel.genus == h.genus:
            v = criterion(image, sel, torsion_condition_ok(h))
            row["verdict"] = "pass" if v.overall else "fail"
    return row


def cmd_scan(args) -> tuple[dict, int]:
    text = _read(args.file, "file")
    sel_text = _read(args.selmer, "--selmer") if args.selmer is not None else None
    if sel_text is not None:
        SelmerInput.parse(sel_text)
    tasks = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tasks.append((n, line, args.truncation, args.precision, sel_text))
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_scan_row, tasks))
    else:
        rows = [_scan_row(t) for t in tasks]
    ok_rows = [r for r in rows if "error" not in r]
    errors = [{"line": r["line"], "error": r["error"]} for r in rows if "error" in r]
    n_good = sum(r["good"] for r in ok_rows)
    frac = Fraction(n_good, len(ok_rows)) if ok_rows else None
    result = {
        "rows": ok_rows,
        "errors": errors,
        "summary": {
            "curves": len(ok_rows), "good": n_good,
            "goodness_fraction": None if frac is None else str(frac),
            "failures": sum(r["verdict"] in ("fail", "certificate-failed") for r in ok_rows),
            "malformed_lines": len(errors),
        },
    }
    if errors:
        return result, EXIT_USAGE
    return result, EXIT_FAIL if result["summary"]["failures"] else EXIT_OK


COMMANDS = {
    "check-good": (cmd_check_good, "test whether h is good"),
    "points": (cmd_points, "points over F_2 and F_4 and degree-2 classes"),
    "polygon": (cmd_polygon, "Newton polygon of h + 1/4 (or of f for --model short)"),
    "expand": (cmd_expand, "power series at infinity and the basis change"),
    "certify": (cmd_certify, "certify the three residue disks and assemble the image"),
    "criterion": (cmd_criterion, "run the criterion against a Selmer file"),
    "density": (cmd_density, "exact densities for a genus"),
    "simulate": (cmd_simulate, "Monte Carlo run of the Selmer sampling model"),
    "scan": (cmd_scan, "batch report over a curve file"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=int, default=None)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="2-adic digits for disk computations")
    common.add_argument("--truncation", type=int, default=None,
                        help="series truncation order (default max(2g+6, 16))")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--curve", default=None, help="coefficients c1,...,c_{2g+1}")
    common.add_argument("--model", choices=(LONG, SHORT), default=LONG)
    common.add_argument("--selmer", default=None, help="Selmer file ('g r' then r rows)")
    common.add_argument("--image", default=None, help="file with one projective point per line")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--rank-model", choices=RANK_MODELS, default=POONEN_RAINS)
    common.add_argument("--ci", action="store_true", help="require an explicit --seed")
    common.add_argument("--jobs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="sym2chab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sym2chab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (func, helptext) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "scan":
            p.add_argument("file", help="curve file with lines 'g; c1,...,c_{2g+1}'")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.jobs < 1:
        err.write("sym2chab: error: --jobs must be at least 1\n")
        return EXIT_USAGE
    if args.precision < 4:
        err.write("sym2chab: error: --precision must be at least 4\n")
        return EXIT_USAGE
    if args.ci and args.seed is None and args.command == "simulate":
        err.write("sym2chab: error: --ci requires --seed\n")
        return EXIT_USAGE
    try:
        result, code = args.func(args)
    except (UsageError, InputFormatError, SeedMissing) as exc:
        err.write(f"sym2chab: error: {exc}\n")
        return EXIT_USAGE
    except NotGood as exc:
        err.write(f"sym2chab: error: {exc}\n")
        return EXIT_USAGE
    except Sym2ChabError as exc:
        err.write(f"sym2chab: failure: {exc}\n")
        return EXIT_FAIL
    _emit(args, result, out)
    if args.command == "scan":
        for e in result["errors"]:
            err.write(f"sym2chab: {e['error']}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
