"""Command-line front end.

Every command prints a canonical JSON report (or writes it to ``--json``)
carrying a verdict.  Exit status: 0 when the verdict is ``pass``, 1 for a
mathematical violation, a nonzero obstruction or an indeterminate window,
2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

from . import catalog, cohomology, core, derivations, fileio
from .core import AlgebraError, NotPronilpotentError, TruncatedAlgebra
from .exactla import scalar_str

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- helpers ----------------------------------------------------------------


def _vec(v) -> list[list]:
    return [[k, scalar_str(Fraction(c))] for k, c in sorted(v.items())]


def _cochain(phi) -> list[list]:
    return [[a, b, _vec(img)] for (a, b), img in sorted(phi.items())]


def _parse_kv(items: Optional[Sequence[str]], flag: str) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        try:
            if not sep:
                raise ValueError
            k = int(key)
            v = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"{flag} expects k=v with an integer k and a rational v, got {item!r}") from None
        if k < 1:
            raise UsageError(f"{flag} index must be positive, got {k}")
        out[k] = out.get(k, Fraction(0)) + v
    return out


def _load(args) -> TruncatedAlgebra:
    """The algebra named by --name/--base (with parameters) or read from --input."""
    if getattr(args, "input", None):
        try:
            L = fileio.read_algebra(args.input)
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
        if args.truncate is not None and args.truncate != L.truncation:
            if args.truncate > L.truncation:
                raise UsageError(f"--truncate {args.truncate} exceeds the file's truncation {L.truncation}")
            L = core.restrict(L, args.truncate)
        return L
    name = getattr(args, "name", None) or getattr(args, "base", None)
    if not name:
        raise UsageError("give a fixture with --name (or --base) or a file with --input")
    if args.truncate is None:
        raise UsageError("--truncate N is required for catalog fixtures")
    alpha = _parse_kv(getattr(args, "alpha", None), "--alpha")
    beta = _parse_kv(getattr(args, "beta", None), "--beta")
    if alpha and name != "Rn1":
        raise UsageError("--alpha applies to Rn1 only")
    if beta and name != "Rn2":
        raise UsageError("--beta applies to Rn2 only")
    params = alpha or beta or None
    if name not in catalog.FIXTURES:
        raise UsageError(f"unknown fixture {name!r}; choose from {', '.join(catalog.FIXTURES)}")
    try:
        return catalog.build(name, args.truncate, params)
    except catalog.JacobiError:
        raise
    except AlgebraError as exc:
        raise UsageError(str(exc)) from None


def _meta(args, L: TruncatedAlgebra, **extra) -> dict[str, Any]:
    meta: dict[str, Any] = {"command": args.command_line, "algebra": L.name, "truncation": L.truncation}
    if getattr(args, "input", None):
        meta["input"] = args.input
    meta.update(extra)
    return meta


def _margin(args, L: TruncatedAlgebra) -> int:
    m = args.margin if args.margin is not None else L.period
    if m < L.period:
        raise UsageError(f"--margin must be at least the period {L.period}")
    return m


# -- commands ---------------------------------------------------------------


def cmd_catalog(args) -> dict:
    return {
        "command": args.command_line,
        "fixtures": [{"name": k, "description": v} for k, v in catalog.FIXTURE_INFO.items()],
        "verdict": "pass",
    }


def cmd_algebra(args) -> dict:
    L = _load(args)
    if args.action == "export":
        return {"_raw": fileio.emit_algebra(L), "verdict": "pass"}
    return {
        **_meta(args, L),
        "dimension": L.dim,
        "period": L.period,
        "graded": L.graded,
        "basis": [{"index": b.index, "degree": b.degree, "name": b.label} for b in L.basis],
        "brackets": [[i, j, _vec(dict(t))] for (i, j), t in sorted(L.table.items())],
        "verdict": "pass",
    }


def cmd_check(args) -> dict:
    L = _load(args)
    if args.what == "jacobi":
        viol = core.jacobi_check(L)
        return {
            **_meta(args, L),
            "violations": [{"triple": [L.label(i) for i in v.triple], "residual": _vec(v.residual)} for v in viol],
            "verdict": "fail" if viol else "pass",
        }
    issues = core.validate(L)
    report = {
        **_meta(args, L),
        "graded": L.graded,
        "issues": [{"kind": i.kind, "detail": i.detail} for i in issues],
    }
    if L.is_positive():
        try:
            report["natural_grading"] = core.associated_graded(L).identical
        except AlgebraError as exc:
            report["natural_grading"] = None
            report["natural_grading_note"] = str(exc)
    report["verdict"] = "fail" if issues else "pass"
    return report


def cmd_series(args) -> dict:
    L = _load(args)
    chain = core.lower_central_series(L) if args.kind == "lcs" else core.derived_series(L)
    return {
        **_meta(args, L),
        "series": chain.kind,
        "dims": chain.dims,
        "min_degrees": chain.min_degrees(L),
        "stabilized_nonzero": chain.stabilized_nonzero,
        "nested": core.series_nested(chain),
        "verdict": "pass",
    }


def cmd_signature(args) -> dict:
    L = _load(args)
    try:
        sig = core.grading_signature(L)
    except NotPronilpotentError as exc:
        return {**_meta(args, L), "signature": None, "message": f"not pro-nilpotent: {exc}", "verdict": "fail"}
    return {**_meta(args, L), "signature": sig, "verdict": "pass"}


def _op(op) -> dict:
    return fileio.operator_to_dict(op)


def cmd_derivations(args) -> dict:
    L = _load(args)
    margin = _margin(args, L)
    rep = derivations.derivation_space(L, margin)
    weights = [
        {"weight": w, "dimension": r.dim, "dimension_big": r.dim_big, "stable": r.stable,
         "basis": [_op(op) for op in r.basis] if args.basis else None}
        for w, r in sorted(rep.records.items())
    ]
    verdict = "pass" if rep.stable_weights() else "indeterminate"
    return {**_meta(args, L, margin=margin, cutoff=rep.cutoff), "weights": weights, "verdict": verdict}


def cmd_h1(args) -> dict:
    L = _load(args)
    margin = _margin(args, L)
    rep = derivations.h1(L, margin)
    stable = rep.stable_weights()
    weights = [
        {"weight": w, "der": r.der, "inner": r.inner, "h1": r.h1, "h1_big": r.h1_big, "stable": r.stable,
         "witnesses": [_op(op) for op in r.witnesses]}
        for w, r in sorted(rep.records.items())
    ]
    if len(stable) < args.min_stable:
        verdict = "indeterminate"
    else:
        verdict = "pass" if all(rep.records[w].h1 == 0 for w in stable) else "fail"
    return {**_meta(args, L, margin=margin, cutoff=rep.cutoff), "weights": weights,
            "stable_weights": len(stable), "verdict": verdict}


def cmd_h2(args) -> dict:
    L = _load(args)
    margin = _margin(args, L)
    rep = cohomology.h2(L, margin)
    stable = rep.stable_weights()
    weights = [
        {"weight": w, "z2": r.z2, "b2": r.b2, "h2": r.h2, "h2_big": r.h2_big, "stable": r.stable,
         "witnesses": [_cochain(phi) for phi in r.witnesses]}
        for w, r in sorted(rep.records.items())
    ]
    if len(stable) < args.min_stable:
        verdict = "indeterminate"
    else:
        verdict = "pass" if all(rep.records[w].h2 == 0 for w in stable) else "fail"
    return {**_meta(args, L, margin=margin, cutoff=rep.cutoff), "weights": weights,
            "stable_weights": len(stable), "verdict": verdict}


def cmd_complete(args) -> dict:
    L = _load(args)
    margin = _margin(args, L)
    rep = derivations.completeness_check(L, margin, args.min_stable)
    return {
        **_meta(args, L, margin=margin),
        "center": [_vec(v) for v in rep.center],
        "center_trivial": rep.center_trivial,
        "h1": [{"weight": w, "h1": v} for w, v in sorted(rep.h1_values.items())],
        "h1_trivial": rep.h1_trivial,
        "stable_weights": len(rep.stable_weights),
        "min_stable": rep.min_stable,
        "complete": rep.complete,
        "verdict": rep.verdict,
    }


def cmd_nilindep(args) -> dict:
    L = _load(args)
    margin = _margin(args, L)
    try:
        count = derivations.nil_independent_count(L, margin)
    except AlgebraError as exc:
        return {**_meta(args, L, margin=margin), "count": None, "message": str(exc), "verdict": "indeterminate"}
    return {**_meta(args, L, margin=margin), "count": count, "verdict": "pass"}


def cmd_extend(args) -> dict:
    base = _load(args)
    try:
        with open(args.derivations, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.derivations}: {exc.strerror}") from None
    ds, q, names = fileio.parse_extension_spec(base, text)
    meta = _meta(args, base, derivations=args.derivations)
    try:
        L = derivations.build_extension(base, ds, q, generator_names=names)
    except catalog.JacobiError as exc:
        return {**meta, "message": str(exc), "triple": list(exc.triple), "residual": _vec(exc.residual),
                "verdict": "fail"}
    except AlgebraError as exc:
        return {**meta, "message": str(exc), "verdict": "fail"}
    return {**meta, "extension": fileio.algebra_to_dict(L), "verdict": "pass"}


# -- parser -----------------------------------------------------------------


def _common(p: argparse.ArgumentParser, fixture_flag: str = "--name") -> None:
    p.add_argument(fixture_flag, dest=fixture_flag.lstrip("-"), help="catalog fixture identifier")
    p.add_argument("--input", help="read the algebra from an AlgebraFile instead of the catalog")
    p.add_argument("--truncate", type=int, help="truncation degree N")
    p.add_argument("--alpha", action="append", metavar="K=V", help="R_n1 parameter alpha_K (repeatable)")
    p.add_argument("--beta", action="append", metavar="K=V", help="R_n2 parameter beta_K (repeatable)")
    p.add_argument("--json", help="write the report to this path instead of stdout")


def _with_margin(p: argparse.ArgumentParser) -> None:
    p.add_argument("--margin", type=int, help="extra truncation for the stability check (default: period)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradlie", description="Exact computations in truncated graded Lie algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list the built-in fixtures")
    p.add_argument("action", choices=["list"])
    p.add_argument("--json")
    p.add_argument("--input", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("algebra", help="show or export an algebra")
    p.add_argument("action", choices=["show", "export"])
    _common(p)
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("check", help="Jacobi identity or grading checks")
    p.add_argument("what", choices=["jacobi", "grading"])
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("series", help="lower central or derived series")
    p.add_argument("kind", choices=["lcs", "derived"])
    _common(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("signature", help="dimensions of the lower central quotients")
    _common(p)
    p.set_defaults(func=cmd_signature)

    p = sub.add_parser("derivations", help="derivation dimensions per weight")
    _common(p)
    _with_margin(p)
    p.add_argument("--basis", action="store_true", help="include basis operators in the report")
    p.set_defaults(func=cmd_derivations)

    for name, func, help_ in (("h1", cmd_h1, "outer derivations per weight"),
                              ("h2", cmd_h2, "second adjoint cohomology per weight")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        _with_margin(p)
        p.add_argument("--min-stable", type=int, default=1, help="stable weights required for a verdict")
        p.set_defaults(func=func)

    p = sub.add_parser("complete", help="trivial centre and vanishing H^1")
    _common(p)
    _with_margin(p)
    p.add_argument("--min-stable", type=int, default=1, help="stable weights required for a verdict")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("nilindep", help="number of nil-independent derivations")
    _common(p)
    _with_margin(p)
    p.set_defaults(func=cmd_nilindep)

    p = sub.add_parser("extend", help="adjoin degree-0 derivations to a base algebra")
    _common(p, "--base")
    p.add_argument("--derivations", required=True, help="JSON file listing the derivations")
    p.set_defaults(func=cmd_extend)
    return parser


def _emit(report: dict, path: Optional[str], out) -> None:
    text = report.pop("_raw", None)
    if text is None:
        text = fileio.dumps(report)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"verdict: {report.get('verdict')}", file=out)
    else:
        out.write(text)


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    # the --json destination must not change the report body
    args.command_line = _canonical_command(argv)
    func: Callable[[Any], dict] = args.func
    try:
        report = func(args)
    except UsageError as exc:
        print(f"gradlie: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except fileio.AlgebraFileError as exc:
        print(f"gradlie: error: malformed input at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except catalog.JacobiError as exc:
        report = {"command": args.command_line, "message": str(exc), "triple": list(exc.triple),
                  "residual": _vec(exc.residual), "verdict": "fail"}
    verdict = report.get("verdict")
    _emit(report, getattr(args, "json", None), out)
    return EXIT_PASS if verdict == "pass" else EXIT_FAIL


def _canonical_command(argv: Sequence[str]) -> str:
    """The argument list without the --json destination."""
    kept = []
    skip = False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--json":
            skip = True
            continue
        if a.startswith("--json="):
            continue
        kept.append(a)
    return " ".join(kept)


if __name__ == "__main__":
    sys.exit(main())
