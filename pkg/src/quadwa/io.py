"""JSON documents with exact rationals.

Rationals are strings ``"num/den"`` (or ``"num"``), integers may also be
plain JSON integers, floats are JSON numbers (shortest round-trip repr, so
parsing gives back the same bits).  Places are ``"inf"`` or a prime.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .admissibility import AdmissCert
from .engine import Problem, Solution
from .forms import FormSystem, QForm
from .nt import INF, check_place
from .quadric_wa import LocalTarget

FORMAT_VERSION = 1
_RAT = re.compile(r"^-?\d+(/\d+)?$")


def rat_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool):
        raise ValueError("boolean is not a rational")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str) and _RAT.match(s.strip()):
        return Fraction(s.strip())
    raise ValueError(f"not an exact rational: {s!r}")


def parse_place(s):
    if s == INF:
        return INF
    if isinstance(s, str) and s.isdigit():
        s = int(s)
    return check_place(s)


def encode(obj):
    """Generic encoder for transcripts and diagnostics."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rat_str(obj)
    if isinstance(obj, float):
        return obj
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):  # numpy scalar
        return encode(obj.item())
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode(obj):
    """Inverse of ``encode``: rational-looking strings become Fractions."""
    if isinstance(obj, str):
        return Fraction(obj) if _RAT.match(obj) else obj
    if isinstance(obj, dict):
        return {k: decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"


def loads(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "type" not in doc:
        raise ValueError("not a typed document")
    return doc


def _expect(doc: dict, kind: str):
    if not isinstance(doc, dict) or doc.get("type") != kind:
        raise ValueError(f"expected a {kind} document")


# ---------------------------------------------------------------- system

def system_doc(W: FormSystem) -> dict:
    return {"type": "system", "version": FORMAT_VERSION, "n": W.n, "dim": W.dim,
            "forms": [[[rat_str(x) for x in row] for row in w.gram] for w in W]}


def system_from(doc: dict) -> FormSystem:
    _expect(doc, "system")
    forms = [QForm([[parse_rat(x) for x in row] for row in g]) for g in doc["forms"]]
    W = FormSystem(forms)
    if doc.get("n", W.n) != W.n or doc.get("dim", W.dim) != W.dim:
        raise ValueError("system header does not match its forms")
    return W


def form_doc(w: QForm) -> dict:
    return {"type": "form", "version": FORMAT_VERSION, "dim": w.dim,
            "gram": [[rat_str(x) for x in row] for row in w.gram]}


def form_from(doc: dict) -> QForm:
    """A form document, or a one-form system document."""
    if isinstance(doc, dict) and doc.get("type") == "system":
        W = system_from(doc)
        if W.n != 1:
            raise ValueError("expected a single form")
        return W[0]
    _expect(doc, "form")
    return QForm([[parse_rat(x) for x in row] for row in doc["gram"]])


def float_str(x: float) -> str:
    return f"{float(x):.17g}"


# ----------------------------------------------------------- certificate

def cert_doc(c: AdmissCert) -> dict:
    return {"type": "certificate", "version": FORMAT_VERSION, "m": c.m, "verdict": c.verdict,
            "delta": rat_str(c.delta), "covering_radius": rat_str(c.covering_radius),
            "lipschitz_bound": rat_str(c.lipschitz_bound), "samples": c.samples,
            "resolution": c.resolution,
            "witness": None if c.witness is None else [rat_str(x) for x in c.witness],
            "note": c.note, "margins": [float(x) for x in c.margins]}


def cert_from(doc: dict) -> AdmissCert:
    _expect(doc, "certificate")
    w = doc.get("witness")
    return AdmissCert(int(doc["m"]), str(doc["verdict"]), parse_rat(doc["delta"]),
                      parse_rat(doc["covering_radius"]), parse_rat(doc["lipschitz_bound"]),
                      int(doc["samples"]), int(doc["resolution"]),
                      None if w is None else tuple(parse_rat(x) for x in w),
                      str(doc.get("note", "")), tuple(float(x) for x in doc.get("margins", ())))


# ---------------------------------------------------------------- target

def target_doc(t: LocalTarget) -> dict:
    return {"place": t.place, "point": [rat_str(x) for x in t.point],
            "k": t.k, "eps": None if t.eps is None else rat_str(t.eps)}


def target_from(doc: dict) -> LocalTarget:
    place = parse_place(doc["place"])
    point = tuple(parse_rat(x) for x in doc["point"])
    if place == INF:
        return LocalTarget(INF, point, eps=parse_rat(doc["eps"]))
    return LocalTarget(place, point, k=int(doc["k"]))


# --------------------------------------------------------------- problem

def problem_doc(p: Problem) -> dict:
    return {"type": "problem", "version": FORMAT_VERSION, "system": system_doc(p.W),
            "certificate": cert_doc(p.cert), "targets": [target_doc(t) for t in p.targets],
            "seed": p.seed, "rounds": p.rounds, "debug": p.debug, "meta": encode(p.meta)}


def problem_from(doc: dict) -> Problem:
    _expect(doc, "problem")
    W = system_from(doc["system"])
    targets = [target_from(t) for t in doc["targets"]]
    for t in targets:
        if len(t.point) != W.dim:
            raise ValueError("target dimension does not match the system")
    return Problem(W, cert_from(doc["certificate"]), targets, seed=int(doc.get("seed", 0)),
                   rounds=int(doc.get("rounds", 5)), debug=bool(doc.get("debug", False)),
                   meta=decode(doc.get("meta", {})))


# -------------------------------------------------------------- solution

def _dist(d):
    return rat_str(d) if isinstance(d, Fraction) else float(d)


def solution_doc(s: Solution) -> dict:
    return {"type": "solution", "version": FORMAT_VERSION, "x": [int(v) for v in s.x],
            "distances": [{"place": p, "distance": _dist(d)} for p, d in s.distances.items()],
            "transcript": encode(s.transcript)}


def solution_from(doc: dict) -> Solution:
    _expect(doc, "solution")
    dists = {}
    for e in doc["distances"]:
        d = e["distance"]
        dists[parse_place(e["place"])] = d if isinstance(d, float) else parse_rat(d)
    return Solution(tuple(int(v) for v in doc["x"]), dists, decode(doc["transcript"]))


def instance_doc(W: FormSystem, c: AdmissCert) -> dict:
    return {"type": "instance", "version": FORMAT_VERSION, "system": system_doc(W),
            "certificate": cert_doc(c)}


def system_of(doc: dict) -> FormSystem:
    """The system inside a system, instance or problem document."""
    if isinstance(doc, dict) and doc.get("type") in ("instance", "problem"):
        return system_from(doc["system"])
    return system_from(doc)


def local_solution_doc(sol, kind: str) -> dict:
    return {"type": "local-solution", "version": FORMAT_VERSION, "kind": kind,
            "v": [float_str(x) for x in sol.v],
            "residuals": [float_str(x) for x in sol.residuals],
            "margin": None if sol.margin is None else float_str(sol.margin),
            "norm": float_str(sol.norm), "restarts": sol.restarts, "steps": sol.steps,
            "trivial": sol.trivial}


def witness_doc(v, value, stats: dict) -> dict:
    return {"type": "witness", "version": FORMAT_VERSION, "vector": [int(x) for x in v],
            "value": rat_str(value), "stats": encode(stats)}


def diagnostic_doc(exc: BaseException) -> dict:
    doc = {"type": "diagnostic", "version": FORMAT_VERSION, "error": type(exc).__name__,
           "message": str(exc)}
    trace = getattr(exc, "trace", None)
    if trace:
        doc["trace"] = encode(list(trace))
    return doc


def report_doc(r: dict) -> dict:
    return {"type": "report", "version": FORMAT_VERSION, "ok": bool(r["ok"]),
            "checks": encode(r["checks"])}


SCHEMAS = {
    "rational": 'string "num/den" or "num" (or a JSON integer); exact',
    "place": '"inf" or a prime (integer)',
    "system": {"type": "system", "version": "int", "n": "int", "dim": "int",
               "forms": "list of n symmetric dim x dim Gram matrices of rationals"},
    "form": {"type": "form", "dim": "int", "gram": "symmetric dim x dim matrix of rationals"},
    "instance": {"type": "instance", "system": "system", "certificate": "certificate"},
    "local-solution": {"type": "local-solution", "kind": "values | sign-pattern",
                       "v": "list of decimal strings (17 significant digits)",
                       "residuals": "list of decimal strings", "margin": "decimal string or null",
                       "norm": "decimal string", "restarts": "int", "steps": "int",
                       "trivial": "bool"},
    "witness": {"type": "witness", "vector": "list of integers (primitive)",
                "value": "rational, always 0", "stats": "object: search method and boxes"},
    "certificate": {"type": "certificate", "m": "int",
                    "verdict": "Certified | Refuted | Inconclusive", "delta": "rational",
                    "covering_radius": "rational", "lipschitz_bound": "rational",
                    "samples": "int", "resolution": "int",
                    "witness": "list of rationals (combination coefficients) or null",
                    "note": "string", "margins": "list of floats"},
    "target": {"place": "place", "point": "list of dim rationals",
               "k": "int (p-adic precision p^-k) or null",
               "eps": "rational (real precision) or null"},
    "problem": {"type": "problem", "system": "system", "certificate": "certificate",
                "targets": "list of target", "seed": "int", "rounds": "int",
                "debug": "bool", "meta": "object"},
    "solution": {"type": "solution", "x": "list of dim integers (primitive)",
                 "distances": 'list of {"place", "distance"}; p-adic distances are '
                              'rationals, real distances floats',
                 "transcript": "object: recursion tree (n, w0_index, v, d, v1, children, quadric)"},
    "report": {"type": "report", "ok": "bool",
               "checks": 'list of {"name", "pass", "detail"}'},
    "diagnostic": {"type": "diagnostic", "error": "exception name", "message": "string"},
}


__all__ = ["rat_str", "parse_rat", "float_str", "encode", "decode", "dumps", "loads",
           "form_doc", "form_from", "instance_doc", "system_of", "local_solution_doc",
           "witness_doc", "diagnostic_doc", "system_doc",
           "system_from", "cert_doc", "cert_from", "target_doc", "target_from", "problem_doc",
           "problem_from", "solution_doc", "solution_from", "report_doc", "SCHEMAS"]
