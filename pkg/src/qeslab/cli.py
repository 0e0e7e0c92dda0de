"""Command-line frontend.

Thin client over the service handlers: each subcommand builds the same
request model the HTTP service accepts, runs it in-process (or against a
running service with --server), and formats the response.

Exit codes: 0 success, 2 argument/validation error, 3 scientific
infeasibility or domain error (non-confining parameters, branch ambiguity,
unmatched coupling, ...).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from pydantic import BaseModel, ValidationError

from .errors import QeslabError
from .service import handlers, schemas

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

_TABLE_FLOAT = "{:.6g}"


def _fmt_cell(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return _TABLE_FLOAT.format(value)
    if isinstance(value, str):
        try:
            return _TABLE_FLOAT.format(float(value)) if ("." in value or "e" in value) else value
        except ValueError:
            return value
    if value is None:
        return ""
    return str(value)


def _render_table(headers: list[str], rows: list[list]) -> str:
    cells = [[_fmt_cell(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells)
    return "\n".join(lines)


def _render_csv(headers: list[str], rows: list[list]) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(headers)
    for row in rows:
        writer.writerow(["" if c is None else c for c in row])
    return buf.getvalue().rstrip("\n")


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _post(server: str, endpoint: str, request: BaseModel, response_type):
    import httpx

    reply = httpx.post(
        server.rstrip("/") + endpoint, json=request.model_dump(by_alias=True), timeout=600.0
    )
    if reply.status_code != 200:
        raise QeslabError(f"server returned {reply.status_code}: {reply.text}")
    return response_type.model_validate(reply.json())


def _dispatch(args, endpoint: str, handler: Callable, request: BaseModel, response_type):
    if args.server:
        return _post(args.server, endpoint, request, response_type)
    return handler(request)


# -- subcommand runners --------------------------------------------------------


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("..")
    return int(lo), int(hi)


def _cmd_classify(args) -> None:
    lo, hi = _parse_range(args.range)
    req = schemas.ClassifyRequest(range_min=lo, range_max=hi)
    resp = _dispatch(args, "/classify", handlers.run_classify, req, schemas.ClassifyResponse)
    headers = ["alpha", "dual", "integer-dual", "sl2-admissible", "reason", "annotation"]
    rows = [
        [r.alpha, r.alpha_bar, r.integer_dual, r.admissible, r.reason, r.annotation]
        for r in resp.rows
    ]
    _write_result(args, resp, headers, rows)


def _coeff_dict(pairs: list[str] | None) -> dict[str, str] | None:
    if not pairs:
        return None
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--coeff expects KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _cmd_spectrum(args) -> None:
    req = schemas.SpectrumRequest(
        twice_j=args.twice_j, preset=args.preset, coefficients=_coeff_dict(args.coeff)
    )
    resp = _dispatch(args, "/spectrum", handlers.run_spectrum, req, schemas.SpectrumResponse)
    headers = ["index", "eigenvalue", "eigenvector (ansatz coefficients)"]
    rows = []
    for i, (value, vec) in enumerate(zip(resp.eigenvalues, resp.eigenvectors)):
        val = value if isinstance(value, str) else f"{value.re}+{value.im}i"
        comps = ", ".join(c if isinstance(c, str) else f"{c.re}+{c.im}i" for c in vec)
        rows.append([i, val, f"({comps})"])
    _write_result(args, resp, headers, rows)


def _cmd_dualize(args) -> None:
    req = schemas.DualizeRequest(
        alpha=args.alpha,
        lam=getattr(args, "lambda"),
        l=args.l,
        energy=args.energy,
        direction=args.direction,
    )
    resp = _dispatch(args, "/dualize", handlers.run_dualize, req, schemas.DualizeResponse)
    headers = ["field", "value"]
    rows = [
        ["alpha", resp.alpha],
        ["alpha_bar", resp.alpha_bar],
        ["integer_dual", resp.integer_dual],
        ["admissible", resp.admissible],
    ]
    if resp.reason:
        rows.append(["reason", resp.reason])
    if resp.annotation:
        rows.append(["annotation", resp.annotation])
    if resp.mapped:
        rows.extend(
            [
                ["mapped lambda", resp.mapped.lam],
                ["mapped l", resp.mapped.l],
                ["mapped energy", resp.mapped.energy],
            ]
        )
    _write_result(args, resp, headers, rows)


def _cmd_solve(args) -> None:
    req = schemas.SolveRequest(
        alpha=args.alpha,
        lam=getattr(args, "lambda"),
        l=args.l,
        r_min=args.r_min,
        r_max=args.r_max,
        points=args.points,
        levels=args.levels,
    )
    resp = _dispatch(args, "/solve", handlers.run_solve, req, schemas.SolveResponse)
    headers = ["level", "E", "error"]
    rows = [[lvl.level, lvl.energy, lvl.error] for lvl in resp.levels]
    _write_result(args, resp, headers, rows)


def _cmd_verify(args) -> None:
    req = schemas.VerifyRequest(
        coulomb_lambda=args.coulomb_lambda,
        l=args.l,
        levels=args.levels,
        tolerance=args.tolerance,
        r_min=args.r_min,
        r_max=args.r_max,
        points=args.points,
    )
    resp = _dispatch(args, "/verify", handlers.run_verify, req, schemas.VerifyResponse)
    headers = ["level", "E_coulomb", "lambda_bar", "l_bar", "target", "best match", "residual", "ok"]
    rows = [
        [c.level, c.coulomb_energy, c.lambda_bar, c.l_bar, c.target, c.best_match, c.residual, c.within_tolerance]
        for c in resp.levels
    ]
    _write_result(args, resp, headers, rows)
    if not resp.all_within:
        raise QeslabError(f"duality residuals exceed tolerance {resp.tolerance}")


def _cmd_crosscheck(args) -> None:
    req = schemas.CrosscheckRequest(
        which=args.which or None, proportionality=not args.skip_proportionality
    )
    resp = _dispatch(args, "/crosscheck", handlers.run_crosscheck, req, schemas.CrosscheckResponse)
    headers = ["claim", "agree", "printed", "computed"]
    rows = [[c.claim, c.agree, c.printed, c.computed] for c in resp.claims]
    if resp.proportionality is not None:
        rows.append(
            [
                f"operator proportionality (alpha={resp.proportionality.alpha})",
                resp.proportionality.residual < 1e-6,
                "identity",
                f"residual {resp.proportionality.residual:.3e}",
            ]
        )
    _write_result(args, resp, headers, rows)


def _write_result(args, resp: BaseModel, headers: list[str], rows: list[list]) -> None:
    if args.format == "json":
        text = json.dumps(resp.model_dump(by_alias=True), indent=2)
    elif args.format == "csv":
        text = _render_csv(headers, rows)
    else:
        text = _render_table(headers, rows)
    _emit(text, args.out)


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qeslab",
        description="Operator-algebra spectra, dual power-law potentials, and a radial eigensolver.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")
        p.add_argument("--out", default=None, help="write output to a file instead of stdout")
        p.add_argument("--server", default=None, help="base URL of a running qeslab service")

    p = sub.add_parser("classify", help="tabulate dual exponents and SL(2) admissibility")
    p.add_argument("--range", default="-8..4", help="integer range A..B (default -8..4)")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("spectrum", help="algebraic-sector spectrum of an operator")
    p.add_argument("--twice-j", dest="twice_j", type=int, default=None, help="2j (sector dimension - 1)")
    p.add_argument("--preset", default=None, help="named operator preset")
    p.add_argument(
        "--coeff",
        action="append",
        default=None,
        metavar="KEY=VALUE",
        help='generator coefficient, e.g. "+=1", "+,+=-1/2", "-0=1"; repeatable',
    )
    common(p)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("dualize", help="dual exponent and parameter transport")
    p.add_argument("--alpha", required=True, help="power-law exponent (rational)")
    p.add_argument("--lambda", dest="lambda", default=None, help="coupling of lambda*x**alpha")
    p.add_argument("--l", default=None, help="angular momentum (rational)")
    p.add_argument("--energy", default=None, help="energy of the level to transport")
    p.add_argument("--direction", choices=("forward", "backward"), default="forward")
    common(p)
    p.set_defaults(func=_cmd_dualize)

    p = sub.add_parser("solve", help="numerical radial spectrum")
    p.add_argument("--alpha", required=True)
    p.add_argument("--lambda", dest="lambda", type=float, required=True)
    p.add_argument("--l", default="0")
    p.add_argument("--r-min", dest="r_min", type=float, default=1e-4)
    p.add_argument("--r-max", dest="r_max", type=float, default=None)
    p.add_argument("--points", type=int, default=4000)
    p.add_argument("--levels", type=int, default=3)
    common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="numerically verify the Coulomb/oscillator duality")
    p.add_argument("--coulomb-lambda", dest="coulomb_lambda", type=float, default=-1.0)
    p.add_argument("--l", default="0")
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--tolerance", type=float, default=5e-3)
    p.add_argument("--r-min", dest="r_min", type=float, default=1e-4)
    p.add_argument("--r-max", dest="r_max", type=float, default=60.0)
    p.add_argument("--points", type=int, default=4000)
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("crosscheck", help="audit printed formulas and the operator proportionality")
    p.add_argument(
        "--which",
        action="append",
        default=None,
        choices=("coulomb_constants", "oscillator_constants", "oscillator_p4"),
        help="restrict to specific claim groups; repeatable (default: all)",
    )
    p.add_argument("--skip-proportionality", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_crosscheck)

    return parser


# flags whose values may start with "-" (negative rationals, ranges, coeffs)
_VALUE_FLAGS = {"--range", "--alpha", "--lambda", "--coulomb-lambda", "--l", "--energy", "--coeff"}


def _merge_flag_values(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_merge_flag_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        args.func(args)
    except QeslabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, KeyError, ValidationError) as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
