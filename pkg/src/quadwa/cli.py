"""Command-line front door.

Every subcommand reads and writes JSON documents (see ``--schema``).  Exit
status: 0 success, 1 mathematical failure (a diagnostic or the failing
certificate/report is still written), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction

from . import io
from .admissibility import certify_real, generate_admissible
from .engine import plant_instance, solve, verify
from .errors import MathFailure
from .forms import evaluate
from .isotropic import SearchStats, find_isotropic
from .local_solver import solve_sign_pattern, solve_values
from .nt import INF

log = logging.getLogger("quadwa")


class Failure(Exception):
    """Mathematical failure whose document has already been produced."""

    def __init__(self, doc: dict):
        super().__init__(doc.get("type"))
        self.doc = doc


def _read(path: str) -> dict:
    if path == "-":
        return io.loads(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return io.loads(fh.read())


def _places(text: str) -> list:
    out = []
    for s in text.split(","):
        s = s.strip()
        out.append(INF if s == INF else io.parse_place(s))
    return out


def _floats(text: str) -> list[float]:
    return [float(Fraction(s.strip())) for s in text.split(",") if s.strip()]


# ------------------------------------------------------------ subcommands

def cmd_gen(a) -> dict:
    W, cert = generate_admissible(a.n, a.m, a.seed)
    log.info("generated n=%d dim=%d, certificate %s", W.n, W.dim, cert.verdict)
    return io.instance_doc(W, cert)


def cmd_certify(a) -> dict:
    W = io.system_of(_read(a.system))
    cert = certify_real(W, a.m, grid_resolution=a.resolution)
    log.info("certificate at m=%d: %s", a.m, cert.verdict)
    doc = io.cert_doc(cert)
    if not cert.certified:
        raise Failure(doc)
    return doc


def cmd_local_solve(a) -> dict:
    W = io.system_of(_read(a.system))
    if (a.values is None) == (a.sign_pattern is None):
        raise ValueError("give exactly one of --values and --sign-pattern")
    if a.values is not None:
        sol = solve_values(W, _floats(a.values), tol=a.tol, seed=a.seed)
        return io.local_solution_doc(sol, "values")
    idx, _, sign = a.sign_pattern.partition(":")
    sol = solve_sign_pattern(W, int(idx), int(sign), tol=a.tol, seed=a.seed)
    return io.local_solution_doc(sol, "sign-pattern")


def cmd_isotropic(a) -> dict:
    w = io.form_from(_read(a.form))
    stats = SearchStats()
    v = find_isotropic(w, seed=a.seed, stats=stats)
    return io.witness_doc(v, evaluate(w, v), stats.as_dict())


def cmd_solve(a) -> dict:
    p = io.problem_from(_read(a.problem))
    if a.seed is not None:
        p.seed = a.seed
    if a.rounds is not None:
        p.rounds = a.rounds
    p.debug = p.debug or a.debug
    t = time.perf_counter()
    s = solve(p)
    log.info("solved in %.2fs, height %d bits", time.perf_counter() - t,
             max(abs(x) for x in s.x).bit_length())
    return io.solution_doc(s)


def cmd_verify(a) -> dict:
    p = io.problem_from(_read(a.problem))
    s = io.solution_from(_read(a.solution))
    r = verify(s, p)
    doc = io.report_doc(r)
    failed = [c["name"] for c in r["checks"] if not c["pass"]]
    log.info("%d checks, %d failed %s", len(r["checks"]), len(failed), failed[:5])
    if not r["ok"]:
        raise Failure(doc)
    return doc


def cmd_plant(a) -> dict:
    p = plant_instance(a.n, a.m, _places(a.places), seed=a.seed, k=a.k, eps=Fraction(a.eps))
    p.rounds = a.rounds if a.rounds is not None else p.rounds
    return io.problem_doc(p)


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quadwa", description=__doc__.splitlines()[0])
    ap.add_argument("--schema", action="store_true", help="print the document schemas and exit")
    ap.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = ap.add_subparsers(dest="command")

    def common(p, seed_required=False):
        p.add_argument("-o", "--out", default="-", help="output path (default stdout)")
        p.add_argument("--seed", type=int, required=seed_required)
        p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                       help="progress on stderr")
        p.add_argument("--threads", type=int, default=1,
                       help="accepted for scripting; all subroutines run sequentially")
        return p

    p = common(sub.add_parser("gen", help="admissible system with certificate"), True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_gen)

    p = common(sub.add_parser("certify", help="certify m-admissibility over R"))
    p.add_argument("--system", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--resolution", type=int, default=None)
    p.set_defaults(func=cmd_certify)

    p = common(sub.add_parser("local-solve", help="real point with prescribed values"))
    p.add_argument("--system", required=True)
    p.add_argument("--values", help="comma-separated target values, one per form")
    p.add_argument("--sign-pattern", help="INDEX:SIGN, other forms vanish")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_local_solve)

    p = common(sub.add_parser("isotropic", help="rational isotropic vector of one form"))
    p.add_argument("--form", required=True)
    p.set_defaults(func=cmd_isotropic)

    p = common(sub.add_parser("solve", help="weak approximation on a problem"))
    p.add_argument("--problem", required=True)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--debug", action="store_true", help="re-certify every restriction")
    p.set_defaults(func=cmd_solve)

    p = common(sub.add_parser("verify", help="re-check a solution"))
    p.add_argument("--problem", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("plant", help="problem with a known rational solution"), True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--places", default="inf,2,5")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--eps", default="1/1024")
    p.add_argument("--rounds", type=int, default=None)
    p.set_defaults(func=cmd_plant)
    return ap


def _write(doc: dict, path: str):
    text = io.dumps(doc)
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if a.schema:
        sys.stdout.write(json.dumps(io.SCHEMAS, indent=1) + "\n")
        return 0
    if a.command is None:
        ap.print_usage(sys.stderr)
        return 2
    out = getattr(a, "out", "-")
    for name in ("system", "problem", "solution", "form"):
        src = getattr(a, name, None)
        if src is not None and src != "-" and out != "-" and os.path.abspath(src) == os.path.abspath(out):
            log.error("input and output paths must differ")
            return 2
    if a.seed is None and a.command != "solve":
        a.seed = 0  # solve keeps the problem's own seed unless overridden
    try:
        doc = a.func(a)
    except Failure as f:
        _write(f.doc, out)
        return 1
    except MathFailure as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        _write(io.diagnostic_doc(exc), out)
        return 1
    except (ValueError, KeyError, TypeError, IndexError, OSError, json.JSONDecodeError) as exc:
        log.error("malformed input: %s: %s", type(exc).__name__, exc)
        _write(io.diagnostic_doc(exc), out)
        return 2
    _write(doc, out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
