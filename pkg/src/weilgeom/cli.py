"""Command-line front end.

Reports are JSON on stdout, a short summary on stderr.  Exit status: 0 when
every requested check passes, 1 when a mathematical check fails, 2 for input
or format errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .expr import ParseError, parse
from .innerprod import NotPositiveDefinite
from .manifest import Manifest, ManifestError, load
from .morphism import NotSubmersionError, check_point
from .riemann import (harmonic_jet_basis, is_harmonic_jet, laplace_beltrami_oracle, laplacian)
from .scalars import DEFAULT_RTOL, EXACT, MODES, ExactModeError, format_scalar
from .suite import Suite
from .weil import DomainError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _fmt(x):
    return format_scalar(x)


def _point_json(p) -> list[str]:
    return [_fmt(c) for c in p]


def _agree(a, b, tol: float) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
    return a == b


def _settings(args, manifest: Manifest | None) -> tuple[str, float]:
    mode = args.mode or (manifest.mode if manifest else EXACT)
    tol = args.tol if args.tol is not None else (manifest.tol if manifest else DEFAULT_RTOL)
    return mode, tol


def _load(path: str) -> Manifest:
    try:
        return load(path)
    except ManifestError as exc:
        raise InputError(str(exc)) from None


def _header(command: str, manifest: Manifest | None, mode: str, tol: float) -> dict:
    out = {"tool": "weilgeom", "version": __version__, "command": command}
    if manifest is not None:
        out["manifest"] = {"path": manifest.path, "sha256": manifest.digest}
    out["mode"] = mode
    out["tol"] = repr(tol)
    return out


# -- subcommands -------------------------------------------------------------

def cmd_laplacian(args) -> tuple[dict, list[str], int]:
    m = _load(args.manifest)
    mode, tol = _settings(args, m)
    if args.function:
        functions = [(f"f{i + 1}", f) for i, f in enumerate(args.function)]
    else:
        functions = list(m.functions)
    if not functions:
        raise InputError("no function given: use --function or a [functions] section")
    for name, f in functions:
        try:
            parse(f, m.domain.coords)
        except ParseError as exc:
            raise InputError(f"function {name} {f!r}: {exc}") from None
    if not m.points:
        raise InputError("manifest has no [points]")
    results, summary, ok = [], [], True
    for name, f in functions:
        for pname, p in m.points_in(mode):
            try:
                lap = laplacian(f, m.domain.metric, p)
                oracle = laplace_beltrami_oracle(f, m.domain.metric, p)
            except ExactModeError as exc:
                raise InputError(f"{exc}; transcendental functions need --mode float64") from None
            except (NotPositiveDefinite, DomainError, ZeroDivisionError) as exc:
                raise InputError(f"function {name} at point {pname}: {exc}") from None
            agree = _agree(lap, oracle, tol)
            ok = ok and agree
            results.append({"function": name, "expression": f, "point": pname,
                            "coordinates": _point_json(p), "laplacian": _fmt(lap),
                            "oracle": _fmt(oracle), "oracle_agrees": agree})
            summary.append(f"{'PASS' if agree else 'FAIL'} {name} at {pname}: "
                           f"laplacian {_fmt(lap)} oracle {_fmt(oracle)}")
    report = _header("laplacian", m, mode, tol)
    report["results"] = results
    return report, summary, EXIT_OK if ok else EXIT_FAIL


def cmd_check_map(args) -> tuple[dict, list[str], int]:
    m = _load(args.manifest)
    if m.map is None:
        raise InputError("manifest needs [codomain] and [map] sections")
    if not m.points:
        raise InputError("manifest has no [points]")
    mode, tol = _settings(args, m)
    results, summary, ok = [], [], True
    for pname, p in m.points_in(mode):
        entry = {"point": pname}
        try:
            r = check_point(m.map, m.domain.metric, m.codomain.metric, p, fi=args.fi, rtol=tol)
        except NotSubmersionError as exc:
            entry.update({"coordinates": _point_json(p), "error": "not-a-submersion",
                          "detail": str(exc)})
            results.append(entry)
            summary.append(f"FAIL {pname}: not a submersion")
            ok = False
            continue
        except ExactModeError as exc:
            raise InputError(f"{exc}; transcendental maps need --mode float64") from None
        except (NotPositiveDefinite, DomainError, ZeroDivisionError) as exc:
            raise InputError(f"point {pname}: {exc}") from None
        data = r.to_json()
        entry["coordinates"] = data.pop("point")
        failed = []
        if not r.semiconformal.is_semiconformal:
            failed.append("semiconformal")
        if not r.harmonic:
            failed.append("harmonic")
        if r.semiconformal.probe_verdict is not None and \
                r.semiconformal.probe_verdict != r.semiconformal.is_semiconformal:
            failed.append("probe-route-disagreement")
        if r.fi is not None:
            failed += [f"pullback:{label}" for label in r.fi.failing]
            if not r.fi.agree:
                failed.append("fuglede-ishihara-disagreement")
        entry.update(data)
        entry["failed"] = failed
        results.append(entry)
        ok = ok and not failed
        verdict = "harmonic morphism" if r.harmonic_morphism else "not a harmonic morphism"
        lam = f", dilation {_fmt(r.semiconformal.dilation)}" if r.semiconformal.dilation is not None else ""
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        summary.append(f"{'PASS' if not failed else 'FAIL'} {pname}: {verdict}{lam}{tail}")
    report = _header("check-map", m, mode, tol)
    report["fuglede_ishihara"] = bool(args.fi)
    report["results"] = results
    return report, summary, EXIT_OK if ok else EXIT_FAIL


def cmd_check_jet(args) -> tuple[dict, list[str], int]:
    m = _load(args.manifest)
    if not m.points:
        raise InputError("manifest has no [points]")
    if m.jet is None and not args.basis:
        raise InputError("manifest has no [jet] section (or pass --basis)")
    mode, tol = _settings(args, m)
    results, summary, ok = [], [], True
    g = m.domain.metric
    for pname, p in m.points_in(mode):
        try:
            jets = harmonic_jet_basis(g, p) if args.basis else [m.jet_at(p, mode)]
            for j in jets:
                harmonic, c = is_harmonic_jet(j, g, rtol=tol)
                ok = ok and harmonic
                results.append({"point": pname, "coordinates": _point_json(p), "jet": j.label,
                                "value": _fmt(j.value), "covector": _point_json(j.covector),
                                "form": [_point_json(r) for r in j.form],
                                "certificate": _fmt(c), "harmonic": harmonic})
                summary.append(f"{'PASS' if harmonic else 'FAIL'} {j.label} at {pname}: "
                               f"certificate {_fmt(c)}")
        except ManifestError as exc:
            raise InputError(str(exc)) from None
        except (NotPositiveDefinite, ZeroDivisionError) as exc:
            raise InputError(f"point {pname}: {exc}") from None
    report = _header("check-jet", m, mode, tol)
    report["results"] = results
    return report, summary, EXIT_OK if ok else EXIT_FAIL


def cmd_verify_paper(args) -> tuple[dict, list[str], int]:
    mode, tol = _settings(args, None)
    suite = Suite(seed=args.seed, mode=mode, flip_gamma_sign=args.flip_gamma_sign)
    lines = suite.run(args.only or None)
    if args.only:
        unknown = set(args.only) - {line.name for line in lines}
        if unknown:
            raise InputError(f"unknown statement(s): {', '.join(sorted(unknown))}")
    report = _header("verify-paper", None, mode, tol)
    report["seed"] = args.seed
    report["lines"] = [line.to_json() for line in lines]
    summary = []
    for line in lines:
        s = f"{'PASS' if line.passed else 'FAIL'} {line.name} ({line.instances} instances)"
        if line.note:
            s += f" [{line.note}]"
        summary.append(s)
    ok = all(line.passed for line in lines)
    return report, summary, EXIT_OK if ok else EXIT_FAIL


# -- plumbing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, default=None,
                        help="scalar arithmetic (default: manifest option, else exact)")
    common.add_argument("--tol", type=float, default=None,
                        help="relative tolerance for float64 comparisons (default 1e-9)")
    common.add_argument("--output", choices=("json", "summary"), default="json",
                        help="json: report on stdout, summary on stderr; summary: summary on stdout")

    ap = argparse.ArgumentParser(prog="weilgeom", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"weilgeom {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laplacian", parents=[common], help="Laplacian at manifest points")
    p.add_argument("manifest")
    p.add_argument("--function", "-f", action="append",
                   help="expression in the domain coordinates (repeatable)")
    p.set_defaults(run=cmd_laplacian)

    p = sub.add_parser("check-map", parents=[common], help="semi-conformality, harmonicity")
    p.add_argument("manifest")
    p.add_argument("--fi", action="store_true", help="add the harmonic 2-jet pullback route")
    p.set_defaults(run=cmd_check_map)

    p = sub.add_parser("check-jet", parents=[common], help="harmonicity of a 2-jet")
    p.add_argument("manifest")
    p.add_argument("--basis", action="store_true",
                   help="check the standard harmonic 2-jets instead of [jet]")
    p.set_defaults(run=cmd_check_jet)

    p = sub.add_parser("verify-paper", parents=[common], help="replay every identity")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", action="append", help="run only the named statement (repeatable)")
    p.add_argument("--flip-gamma-sign", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(run=cmd_verify_paper)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        report, summary, code = args.run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report["passed"] = code == EXIT_OK
    report["exit_code"] = code
    text = "\n".join(summary + [f"{'OK' if code == EXIT_OK else 'FAILED'}"])
    if args.output == "json":
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
        sys.stderr.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
