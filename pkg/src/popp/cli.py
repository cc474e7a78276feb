"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 validation error,
3 singular or ill-conditioned point, 4 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import structfile
from .builtins import BUILTINS, builtin
from .errors import PoppError, ValidationError
from .flag import DEFAULT_TOL, check_equiregular, growth_vector, hausdorff_dimension
from .maps import check_volume_preserving, is_isometry
from .report import analyze_point
from .sublap import DEFAULT_FD_STEP

EXIT_OK, EXIT_FAIL, EXIT_VALIDATION, EXIT_SINGULAR, EXIT_INTERNAL = 0, 1, 2, 3, 4
VERIFY_SAMPLE = 20


def _parse_point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ValidationError(f"bad point {text!r}; use comma-separated numbers") from None


def _load(args) -> structfile.StructureFile:
    if args.builtin and args.file:
        raise ValidationError("give either a structure file or --builtin, not both")
    if args.builtin:
        return structfile.StructureFile(builtin(args.builtin))
    if not args.file:
        raise ValidationError("need a structure file or --builtin NAME")
    return structfile.load(args.file)


def _points(args, sf) -> list[tuple[float, ...]]:
    n = sf.structure.nvars
    pts = [_parse_point(p) for p in (args.point or [])]
    grid = getattr(args, "grid", None) or (None if pts else sf.grid)
    if grid:
        pts += [tuple(p) for p in structfile.parse_grid(grid, n)]
    if not pts:
        pts = list(sf.points)
    if not pts:
        raise ValidationError("no points given; use -p, --grid or a points entry in the file")
    for p in pts:
        if len(p) != n:
            raise ValidationError(f"point {p} has {len(p)} coordinates, need {n}")
    return pts


def _run_points(fn, points, jobs):
    """Apply ``fn`` per point, returning (result, error) pairs in input order."""
    def safe(q):
        try:
            return fn(q), None
        except PoppError as exc:
            return None, exc
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(safe, points))
    return [safe(q) for q in points]


def _fmt_point(q):
    return "(" + ", ".join(f"{v:g}" for v in q) + ")"


def _emit(args, obj, text):
    if args.json:
        print(json.dumps(obj))
    else:
        print(text)


def _error_obj(q, exc):
    return {"point": list(q), "error": str(exc), "exit_code": exc.exit_code}


def cmd_growth(args) -> int:
    sf = _load(args)
    s = sf.structure
    points = _points(args, sf)
    results = _run_points(lambda q: growth_vector(s, q, args.tol), points, args.jobs)
    code = EXIT_OK
    for q, (g, exc) in zip(points, results):
        if exc is not None:
            code = code or exc.exit_code
            _emit(args, _error_obj(q, exc), f"{_fmt_point(q)}: error: {exc}")
        else:
            _emit(args, {"point": list(q), "growth_vector": list(g),
                         "hausdorff_dimension": hausdorff_dimension(g)},
                  f"{_fmt_point(q)}: growth vector {g}")
    rep = check_equiregular(s, points, args.tol)
    strata = {str(g): len(p) for g, p in rep.strata.items()}
    _emit(args, {"equiregular": rep.equiregular,
                 "strata": [{"growth_vector": list(g), "count": len(p)}
                            for g, p in rep.strata.items()],
                 "failures": len(rep.failures)},
          f"equiregular: {'yes' if rep.equiregular else 'no'}; strata {strata}"
          + (f"; {len(rep.failures)} failed points" if rep.failures else ""))
    return code


def _point_reports(args, sublaplacian, oracle):
    sf = _load(args)
    s = sf.structure
    points = _points(args, sf)

    def one(q):
        return analyze_point(s, q, args.tol, completion=sf.completion, fd_step=args.fd_step,
                             sublaplacian=sublaplacian, oracle=oracle)

    return points, _run_points(one, points, args.jobs)


def cmd_volume(args) -> int:
    points, results = _point_reports(args, sublaplacian=True, oracle=args.oracle)
    code = EXIT_OK
    for q, (rep, exc) in zip(points, results):
        if exc is not None:
            code = code or exc.exit_code
            _emit(args, _error_obj(q, exc), f"{_fmt_point(q)}: error: {exc}")
            continue
        lines = [f"{_fmt_point(q)}: growth vector {tuple(rep.growth_vector)}, Q = {rep.hausdorff_dimension}",
                 f"  frame words: {', '.join(rep.frame_words)}",
                 "  det B_j: " + ", ".join(f"{d:.12g}" for d in rep.det_B),
                 f"  Popp density (adapted coframe): {rep.popp_density_adapted:.12g}",
                 f"  Popp density (dx^1...dx^n):     {rep.popp_density_coordinates:.12g}"]
        if rep.oracle_max_deviation is not None:
            lines.append(f"  oracle max deviation: {rep.oracle_max_deviation:.3g}")
        lines += [f"  warning: {w}" for w in rep.warnings]
        _emit(args, rep.to_dict(), "\n".join(lines))
    return code


def cmd_sublap(args) -> int:
    points, results = _point_reports(args, sublaplacian=True, oracle=False)
    code = EXIT_OK
    for q, (rep, exc) in zip(points, results):
        if exc is not None:
            code = code or exc.exit_code
            _emit(args, _error_obj(q, exc), f"{_fmt_point(q)}: error: {exc}")
            continue
        coeffs = ", ".join(f"{a:.10g}" for a in rep.sublaplacian_coefficients)
        text = f"{_fmt_point(q)}: first-order coefficients a_i = ({coeffs})"
        text += "".join(f"\n  warning: {w}" for w in rep.warnings)
        _emit(args, rep.to_dict(), text)
    return code


def cmd_verify(args) -> int:
    sf = structfile.load(args.file)
    s = sf.structure
    if not sf.maps:
        _emit(args, {"passed": True, "warning": "no maps to verify"},
              "PASS (warning: the file defines no maps)")
        return EXIT_OK
    if args.point or args.grid or sf.points or sf.grid:
        sample = _points(args, sf)
    else:
        sample = np.random.default_rng(args.seed).uniform(-1, 1, (VERIFY_SAMPLE, s.nvars))
    code = EXIT_OK
    for m in sf.maps:
        iso = is_isometry(m, s, sample, args.tol)
        vol = check_volume_preserving(m, s, sample, args.tol, rank_tol=DEFAULT_TOL)
        ok = iso.passed and vol.passed
        if not ok:
            code = EXIT_FAIL
        gram_scale = float(np.mean([np.trace(G) / len(G) for G in iso.gram_matrices]))
        ratios = [r for r in vol.ratios if np.isfinite(r)]
        obj = {"map": m.name, "passed": ok,
               "preserves_distribution": iso.preserves_distribution,
               "max_distribution_residual": max(iso.distribution_residuals),
               "preserves_metric": iso.preserves_metric,
               "max_gram_deviation": iso.gram_deviation,
               "mean_gram_scale": gram_scale,
               "volume_preserving": vol.passed,
               "max_volume_error": vol.max_error,
               "mean_volume_ratio": float(np.mean(ratios)) if ratios else None,
               "errors": vol.errors}
        text = (f"{m.name}: {'PASS' if ok else 'FAIL'}\n"
                f"  (i) distribution preserved: {iso.preserves_distribution} "
                f"(max residual {max(iso.distribution_residuals):.3g})\n"
                f"  (ii) metric preserved: {iso.preserves_metric} "
                f"(max |G - I| {iso.gram_deviation:.3g}, mean Gram scale {gram_scale:.6g})\n"
                f"  volume preserved: {vol.passed} (max relative error {vol.max_error:.3g}"
                + (f", mean ratio {np.mean(ratios):.6g})" if ratios else ")")
                + "".join(f"\n  error: {e}" for e in vol.errors[:3])
                + (f"\n  ... {len(vol.errors) - 3} more errors" if len(vol.errors) > 3 else ""))
        _emit(args, obj, text)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="popp",
        description="Popp's volume and canonical sub-Laplacian of polynomial sub-Riemannian structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_builtin=True):
        p.add_argument("file", nargs="?", help="TOML structure file")
        if with_builtin:
            p.add_argument("--builtin", choices=sorted(BUILTINS), help="use a builtin structure")
        p.add_argument("-p", "--point", action="append",
                       help="evaluation point x1,x2,...; repeatable")
        p.add_argument("--grid", help="start:stop:count per axis, comma separated")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative rank tolerance")
        p.add_argument("--json", action="store_true", help="one JSON object per line")
        p.add_argument("--jobs", type=int, default=1, help="worker threads")

    g = sub.add_parser("growth", help="growth vector and equiregularity")
    common(g)
    g.set_defaults(func=cmd_growth)

    v = sub.add_parser("volume", help="Popp volume density")
    common(v)
    v.add_argument("--fd-step", type=float, default=DEFAULT_FD_STEP)
    v.add_argument("--oracle", action="store_true",
                   help="cross-check B_j against the min-norm oracle")
    v.set_defaults(func=cmd_volume)

    s = sub.add_parser("sublap", help="canonical sub-Laplacian coefficients")
    common(s)
    s.add_argument("--fd-step", type=float, default=DEFAULT_FD_STEP)
    s.set_defaults(func=cmd_sublap)

    ver = sub.add_parser("verify", help="check the maps in a file are isometries preserving Popp volume")
    common(ver, with_builtin=False)
    ver.add_argument("--seed", type=int, default=0, help="seed for random sample points")
    ver.set_defaults(func=cmd_verify, tol=1e-8)
    return parser


def _glue_negative_values(argv):
    # "--grid -1:1:5" and "-p -1,2,3" would otherwise be read as options
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--grid", "-p", "--point"):
            val = next(it, None)
            if val is not None and val.startswith("-"):
                out.append(f"{tok}={val}" if tok.startswith("--") else f"{tok}{val}")
                continue
            out.append(tok)
            if val is not None:
                out.append(val)
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except PoppError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
