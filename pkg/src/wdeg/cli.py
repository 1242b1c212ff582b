"""Command-line interface: ``wdeg analyze | polytope | realize | wdeg-table``.

Exit codes: 0 success, 2 domain error, 3 parse error, 4 precision budget.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction

import mpmath

from .exactnum import QPoly, frac_str, is_squarefree
from .galoisdeg import ORBIT_LIMIT, OrbitError, PrecisionBudgetError, min_poly_report, wdeg_bound
from .invbirkhoff import (ENUMERATION_LIMIT, IotaAction, dim_formula, enumerate_vertices,
                          polytope_json, signatures)
from .realize import realize_vertex
from .rootcert import CertificationError, DEFAULT_PRECISION, refine
from .transport import DEFAULT_MAX_PRECISION, cost_matrix, solve_pair, vertex_cost

log = logging.getLogger("wdeg")

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE, EXIT_PRECISION = 0, 2, 3, 4


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        super().__init__("%s at position %d: %r" % (msg, pos, text))
        self.pos = pos


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# polynomial parsing
#   expr  := term (('+'|'-') term)*
#   term  := coeff? ('z' ('^' uint)?)?
#   coeff := int | int '/' uint
# A leading sign and an optional '*' between coefficient and z are accepted.

_MINUS = ("\u2212", "\u2013", "\u2014", "\ufe63", "\uff0d")


def parse_poly(text: str) -> QPoly:
    src = text
    for m in _MINUS:
        src = src.replace(m, "-")
    s = "".join(ch if not ch.isspace() else " " for ch in src)
    pos = 0
    n = len(s)

    def skip():
        nonlocal pos
        while pos < n and s[pos] == " ":
            pos += 1

    def uint():
        nonlocal pos
        skip()
        start = pos
        while pos < n and s[pos].isdigit():
            pos += 1
        if start == pos:
            raise ParseError("expected a digit", pos, text)
        return int(s[start:pos])

    coeffs: dict[int, Fraction] = {}
    skip()
    sign = 1
    if pos < n and s[pos] in "+-":
        sign = -1 if s[pos] == "-" else 1
        pos += 1
    while True:
        skip()
        start = pos
        coeff = None
        if pos < n and s[pos].isdigit():
            num = uint()
            skip()
            den = 1
            if pos < n and s[pos] == "/":
                pos += 1
                at = pos
                den = uint()
                if den == 0:
                    raise ParseError("zero denominator", at, text)
            coeff = Fraction(num, den)
            skip()
            if pos < n and s[pos] == "*":
                pos += 1
                skip()
                if pos >= n or s[pos] != "z":
                    raise ParseError("expected 'z' after '*'", pos, text)
        power = 0
        if pos < n and s[pos] == "z":
            pos += 1
            power = 1
            skip()
            if pos < n and s[pos] == "^":
                pos += 1
                power = uint()
        elif coeff is None:
            what = "end of input" if pos >= n else repr(s[pos])
            raise ParseError("expected a term, found %s" % what, start, text)
        c = sign * (coeff if coeff is not None else Fraction(1))
        coeffs[power] = coeffs.get(power, Fraction(0)) + c
        skip()
        if pos >= n:
            break
        if s[pos] in "+-":
            sign = -1 if s[pos] == "-" else 1
            pos += 1
            continue
        raise ParseError("unexpected character %r" % s[pos], pos, text)
    top = max(coeffs)
    return QPoly([coeffs.get(k, Fraction(0)) for k in range(top + 1)])


def format_poly(p: QPoly, var: str = "z") -> str:
    """Grammar-conformant rendering (re-parses to the same polynomial)."""
    return p.to_str(var).replace("*", " ")


def _parse_sig(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.strip("() ").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("signature must look like R,C (e.g. 2,1)")
    if a < 0 or b < 0:
        raise argparse.ArgumentTypeError("signature entries must be non-negative")
    return a, b


def _iota_for(d: int, p_sig, q_sig) -> IotaAction:
    for name, sig in (("p", p_sig), ("q", q_sig)):
        if sig[0] + 2 * sig[1] != d:
            raise DomainError("%s-signature %r does not describe degree %d" % (name, sig, d))
    return IotaAction.from_signatures(p_sig, q_sig)


# ---------------------------------------------------------------------------
# commands

def _decimal(lo: Fraction, hi: Fraction, digits: int) -> str:
    if lo == hi and lo.denominator == 1:
        return str(lo.numerator)
    mid = (lo + hi) / 2
    with mpmath.workprec(max(64, int(digits * 3.33) + 32)):
        return mpmath.nstr(mpmath.mpf(mid.numerator) / mid.denominator, digits, strip_zeros=False)


def run_analysis(p: QPoly, q: QPoly, precision: int = DEFAULT_PRECISION,
                 max_precision: int = DEFAULT_MAX_PRECISION, denominator_bound: int | None = None,
                 max_factor_degree: int = 6, digits: int = 10, timings: bool = False) -> dict:
    if p.degree < 1 or q.degree < 1:
        raise DomainError("polynomials must have degree >= 1")
    if p.degree != q.degree:
        raise DomainError("p and q must have equal degree (got %d and %d)" % (p.degree, q.degree))
    for name, f in (("p", p), ("q", q)):
        if not is_squarefree(f):
            raise DomainError("%s has a repeated root; roots must be simple" % name)
    d = p.degree
    if d > ORBIT_LIMIT:
        raise DomainError("analysis sweeps (d!)^2 group elements; degree %d exceeds %d" % (d, ORBIT_LIMIT))
    clock = {}
    t0 = time.perf_counter()
    pr, qr, iota, vertices, sol = solve_pair(p, q, precision, max_precision)
    clock["transport"] = time.perf_counter() - t0
    log.info("optimal vertex %s, unique=%s", sol.optimal_vertex.doubled, sol.unique)
    t1 = time.perf_counter()
    report = min_poly_report(sol.optimal_vertex, iota, pr, qr, sol.value, max_precision,
                             denominator_bound, max_factor_degree)
    clock["degree"] = time.perf_counter() - t1
    # tighten the displayed value if the enclosure is too wide for the digits asked
    lo, hi = sol.value
    bits = sol.precision_bits
    while (hi - lo) * 10 ** (digits + 2) > max(abs(lo), 1) and bits * 2 <= max(max_precision, 4 * digits):
        bits *= 2
        cm = cost_matrix(refine(pr, bits), refine(qr, bits))
        lo, hi = vertex_cost(cm, sol.optimal_vertex)
    v = sol.optimal_vertex
    out = {
        "command": "analyze",
        "p": format_poly(p), "q": format_poly(q), "d": d,
        "signatures": {"p": list(pr.signature), "q": list(qr.signature)},
        "phi": list(iota.phi.images), "psi": list(iota.psi.images),
        "polytope": {"dim": dim_formula(pr.signature, qr.signature), "vertex_count": len(vertices)},
        "optimal_vertex": v.to_json(),
        "unique": sol.unique,
        "w2": {"decimal": _decimal(lo, hi, digits), "digits": digits,
               "enclosure_width": mpmath.nstr(mpmath.mpf((hi - lo).numerator) / (hi - lo).denominator, 3)},
        "wdeg_bound": report.wdeg_bound,
        "h_specialized": report.h_specialized.to_json(),
        "minimal_factor": {"monic": report.minimal_factor.to_json(),
                           "primitive": [str(c) for c in report.minimal_factor.primitive()]},
        "wdeg": report.wdeg,
        "status": report.status,
        "precision": {"initial_bits": precision, "max_bits": max_precision,
                      "transport_bits": sol.precision_bits, "orbit_bits": report.precision_bits,
                      "denominator_bound": str(report.denominator_bound),
                      "max_factor_degree": max_factor_degree},
        "certificate": {"primes": report.primes, "surviving_degrees": report.surviving_degrees},
    }
    if timings:
        out["timings"] = {k: round(x, 4) for k, x in clock.items()}
    return out


def run_polytope(d: int, p_sig, q_sig) -> dict:
    if d > ENUMERATION_LIMIT:
        raise DomainError("vertex enumeration is limited to d <= %d" % ENUMERATION_LIMIT)
    iota = _iota_for(d, p_sig, q_sig)
    out = polytope_json(iota)
    if out["dim"] != out["affine_rank"]:
        raise AssertionError("dimension formula and affine rank disagree")
    return {"command": "polytope", **out}


def run_realize(d: int, p_sig, q_sig, index: int, precision: int = DEFAULT_PRECISION) -> dict:
    if d > ENUMERATION_LIMIT:
        raise DomainError("vertex enumeration is limited to d <= %d" % ENUMERATION_LIMIT)
    iota = _iota_for(d, p_sig, q_sig)
    vertices = enumerate_vertices(iota)
    if not 0 <= index < len(vertices):
        raise DomainError("vertex index %d out of range 0..%d" % (index, len(vertices) - 1))
    inst = realize_vertex(vertices[index], iota)
    _, _, _, _, sol = solve_pair(inst.p, inst.q, precision)
    ok = (sol.unique and sol.optimal_vertex.doubled == inst.relabelled_vertex.doubled
          and sol.value[0] <= 1 <= sol.value[1])
    out = {"command": "realize", **inst.to_json(),
           "p_expr": format_poly(inst.p), "q_expr": format_poly(inst.q),
           "self_check": {"unique_optimum": bool(ok), "w2_exact": inst.exact_cost_str()}}
    return out


def run_wdeg_table(d: int) -> dict:
    if d > ORBIT_LIMIT or d < 1:
        raise DomainError("wdeg-table needs 1 <= d <= %d" % ORBIT_LIMIT)
    sigs = signatures(d)
    rows = []
    for a in range(len(sigs)):
        for b in range(a, len(sigs)):
            iota = IotaAction.from_signatures(sigs[a], sigs[b])
            vals = sorted({wdeg_bound(v) for v in enumerate_vertices(iota)})
            rows.append({"p_sig": list(sigs[a]), "q_sig": list(sigs[b]), "values": vals})
    return {"command": "wdeg-table", "d": d, "rows": rows}


# ---------------------------------------------------------------------------
# output

def _human(res: dict) -> str:
    cmd = res["command"]
    if cmd == "analyze":
        lines = [
            "p = %s" % res["p"], "q = %s" % res["q"],
            "signatures  p %s  q %s" % (tuple(res["signatures"]["p"]), tuple(res["signatures"]["q"])),
            "polytope    dim %d, %d vertices" % (res["polytope"]["dim"], res["polytope"]["vertex_count"]),
            "optimum     %s (aut %d%s)" % (res["optimal_vertex"]["doubled"], res["optimal_vertex"]["aut_order"],
                                            "" if res["unique"] else ", tie"),
            "W2^2        %s" % res["w2"]["decimal"],
            "bound       %d" % res["wdeg_bound"],
            "minpoly     %s" % format_poly(QPoly.from_json(res["minimal_factor"]["monic"]), "t"),
            "primitive   %s" % format_poly(QPoly([int(c) for c in res["minimal_factor"]["primitive"]]), "t"),
            "wdeg        %d (%s)" % (res["wdeg"], res["status"]),
        ]
        return "\n".join(lines)
    if cmd == "polytope":
        lines = ["d=%d phi=%s psi=%s dim=%d vertices=%d" % (res["d"], res["phi"], res["psi"], res["dim"],
                                                            res["vertex_count"])]
        for k, v in enumerate(res["vertices"]):
            lines.append("%3d  %s  aut %d" % (k, v["doubled"], v["aut_order"]))
        return "\n".join(lines)
    if cmd == "realize":
        sc = res["self_check"]
        return "\n".join([
            "p = %s" % res["p_expr"], "q = %s" % res["q_expr"],
            "planted %s" % res["planted_doubled"],
            "self-check: %s, W2^2 = %s" % ("planted vertex is the unique optimum" if sc["unique_optimum"]
                                          else "FAILED", sc["w2_exact"]),
        ])
    lines = []
    for r in res["rows"]:
        lines.append("%-8s %-8s %s" % (tuple(r["p_sig"]), tuple(r["q_sig"]), ", ".join(map(str, r["values"]))))
    return "\n".join(lines)


def _emit(res: dict, args) -> None:
    if args.pretty:
        print(json.dumps(res, indent=2, sort_keys=True))
    elif args.json:
        print(json.dumps(res, sort_keys=True, separators=(",", ":")))
    else:
        print(_human(res))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wdeg", description="Wasserstein distance between root measures "
                                 "of rational polynomials and its algebraic degree.")
    ap.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--json", action="store_true", help="compact JSON on stdout")
    out.add_argument("--pretty", action="store_true", help="indented JSON on stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[out], help="full pipeline for a pair of polynomials")
    a.add_argument("p")
    a.add_argument("q")
    a.add_argument("--precision", type=int, default=DEFAULT_PRECISION, metavar="BITS")
    a.add_argument("--max-precision", type=int, default=DEFAULT_MAX_PRECISION, metavar="BITS")
    a.add_argument("--denominator-bound", type=int, default=None, metavar="H")
    a.add_argument("--max-factor-degree", type=int, default=6)
    a.add_argument("--digits", type=int, default=10)
    a.add_argument("--timings", action="store_true", help="include wall-clock timings (not reproducible)")

    p = sub.add_parser("polytope", parents=[out], help="vertices of the invariant Birkhoff polytope")
    p.add_argument("d", type=int)
    p.add_argument("p_sig", type=_parse_sig, help="R,C for p")
    p.add_argument("q_sig", type=_parse_sig, help="R,C for q")

    r = sub.add_parser("realize", parents=[out], help="plant a vertex as the unique optimum")
    r.add_argument("d", type=int)
    r.add_argument("p_sig", type=_parse_sig)
    r.add_argument("q_sig", type=_parse_sig)
    r.add_argument("index", type=int)

    t = sub.add_parser("wdeg-table", parents=[out], help="degree bounds per signature pair")
    t.add_argument("d", type=int)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="wdeg: %(message)s")
    try:
        if args.command == "analyze":
            if args.precision < 16 or args.max_precision < args.precision:
                raise DomainError("need 16 <= --precision <= --max-precision")
            res = run_analysis(parse_poly(args.p), parse_poly(args.q), args.precision, args.max_precision,
                               args.denominator_bound, args.max_factor_degree, args.digits, args.timings)
        elif args.command == "polytope":
            res = run_polytope(args.d, args.p_sig, args.q_sig)
        elif args.command == "realize":
            res = run_realize(args.d, args.p_sig, args.q_sig, args.index)
        else:
            res = run_wdeg_table(args.d)
    except ParseError as e:
        return _fail(args, EXIT_PARSE, "parse error: %s" % e)
    except (PrecisionBudgetError, CertificationError) as e:
        return _fail(args, EXIT_PRECISION, "precision budget exhausted: %s" % e)
    except (DomainError, ValueError) as e:
        return _fail(args, EXIT_DOMAIN, str(e))
    except OrbitError as e:  # internal consistency, should never happen
        return _fail(args, 1, "internal error: %s" % e)
    _emit(res, args)
    return EXIT_OK


def _fail(args, code: int, msg: str) -> int:
    print("wdeg: %s" % msg, file=sys.stderr)
    if getattr(args, "json", False) or getattr(args, "pretty", False):
        _emit({"error": msg, "exit_code": code}, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
