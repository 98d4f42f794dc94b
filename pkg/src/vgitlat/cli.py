"""Command-line front end: `vgitlat <subcommand> ... [--json]`.

Exit codes: 0 success, 1 a verification mismatch or a negative answer, 2 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import time
from pathlib import Path
from typing import Callable, Sequence

from . import hyperbolic, lattice, moduli, tables
from .monoform import Configuration, Monomial, VARS
from .rational import fmt
from .stability import (
    diagonal_interval,
    interval_for_configuration,
    lct_quasihomogeneous,
    stability_threshold,
)
from .walls import WallReport, candidate_walls


class UsageError(ValueError):
    """Bad input; reported with exit code 2."""


# ------------------------------------------------------------- form parser

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>[A-Za-z_]\w*)|(?P<op>[-+*^()]))")


def _tokens(text: str) -> list[tuple[str, str, int]]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise UsageError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return out


def parse_terms(text: str, names: dict[str, int]) -> dict[tuple[int, int, int], int]:
    """Coefficients of a polynomial given as +/- separated products of integers and
    variables (with ^ exponents); variables are mapped to coordinate slots by `names`."""
    toks = _tokens(text)
    if not toks:
        raise UsageError("empty form")
    coeffs: dict[tuple[int, int, int], int] = {}
    i, sign = 0, 1
    while i < len(toks):
        if toks[i][0] == "op" and toks[i][1] in "+-":
            sign = -1 if toks[i][1] == "-" else 1
            i += 1
        if i >= len(toks):
            raise UsageError("form ends with an operator")
        coef, exps, need_factor = 1, [0, 0, 0], True
        while i < len(toks) and not (toks[i][0] == "op" and toks[i][1] in "+-"):
            kind, val, col = toks[i]
            if kind == "op" and val == "*":
                if need_factor:
                    raise UsageError(f"misplaced '*' at column {col}")
                need_factor = True
                i += 1
                continue
            if not need_factor:
                raise UsageError(f"missing '*' before column {col}")
            if kind == "num":
                coef *= int(val)
                i += 1
            elif kind == "var":
                if val not in names:
                    raise UsageError(f"unknown symbol {val!r} at column {col}")
                e = 1
                if i + 1 < len(toks) and toks[i + 1][1] == "^":
                    if i + 2 >= len(toks) or toks[i + 2][0] != "num":
                        raise UsageError(f"exponent expected at column {toks[i + 1][2] + 1}")
                    e = int(toks[i + 2][1])
                    i += 2
                exps[names[val]] += e
                i += 1
            else:
                raise UsageError(f"unexpected {val!r} at column {col}")
            need_factor = False
        if need_factor:
            raise UsageError("dangling '*' at the end of a term")
        key = tuple(exps)
        coeffs[key] = coeffs.get(key, 0) + sign * coef
        sign = 1
    return coeffs


def parse_form(text: str, affine: dict[str, int] | None = None, degree: int | None = None) -> tuple[Monomial, ...]:
    """Monomials with non-zero coefficient of a polynomial written as +/- separated terms.

    Projective input uses x0, x1, x2 and must be homogeneous.  With `affine`, the
    variables are the keys (mapped to coordinate indices) and each term is
    homogenized to `degree` with the remaining coordinate.
    """
    names = dict(affine) if affine else {v: i for i, v in enumerate(VARS)}
    if affine and degree is None:
        raise UsageError("affine input needs a degree to homogenize to")
    if affine and len(set(names.values())) != len(names):
        raise UsageError("affine variables must map to distinct coordinates")
    coeffs = parse_terms(text, names)
    monos = [k for k, c in coeffs.items() if c != 0]
    if not monos:
        raise UsageError("the form is zero: empty configuration")
    if affine:
        free = [j for j in range(3) if j not in names.values()]
        if len(free) != 1:
            raise UsageError("affine mapping must leave exactly one coordinate free")
        out = []
        for e in monos:
            rest = degree - sum(e)
            if rest < 0:
                raise UsageError(f"term of degree {sum(e)} exceeds {degree}")
            e = list(e)
            e[free[0]] = rest
            out.append(Monomial(*e))
        monos = out
    else:
        degs = {sum(e) for e in monos}
        if len(degs) > 1:
            raise UsageError(f"inhomogeneous form (degrees {sorted(degs)}); use --affine")
        if degree is not None and degs != {degree}:
            raise UsageError(f"form has degree {degs.pop()}, expected {degree}")
        monos = [Monomial(*e) for e in monos]
    return tuple(sorted(set(monos), reverse=True))


def parse_affine_map(text: str | None) -> dict[str, int] | None:
    """"x=x2,y=x1" -> {"x": 2, "y": 1}."""
    if not text:
        return None
    out = {}
    for part in text.split(","):
        m = re.fullmatch(r"\s*([A-Za-z_]\w*)\s*=\s*x([012])\s*", part)
        if not m:
            raise UsageError(f"bad affine mapping {part!r}; expected e.g. x=x2,y=x1")
        out[m[1]] = int(m[2])
    return out


def _monomial_list(text: str, affine, degree) -> tuple[Monomial, ...]:
    return parse_form(text.replace(",", "+"), affine, degree)


def load_configuration(path: str) -> Configuration:
    """Configuration JSON; the curve may be exponent triples or a form string."""
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: bad JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if isinstance(obj.get("curve"), str):
        curve = parse_form(obj["curve"], degree=obj.get("d"))
        line = obj.get("line", "x0")
        obj = {"d": curve[0].degree, "curve": [list(m) for m in curve],
               "line": [line] if isinstance(line, str) else line}
    try:
        return Configuration.from_json(obj)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------- cache


class DiskCache:
    """JSON payloads under $VGITLAT_CACHE_DIR (default ~/.cache/vgitlat), keyed by a
    digest of (kind, key).  Entries are re-derivable; a miss only costs time."""

    def __init__(self, enabled: bool = True, root: str | None = None):
        self.enabled = enabled
        base = root or os.environ.get("VGITLAT_CACHE_DIR") or os.path.join(Path.home(), ".cache", "vgitlat")
        self.root = Path(base)

    def _path(self, kind: str, key) -> Path:
        digest = hashlib.sha256(json.dumps([kind, key], sort_keys=True).encode()).hexdigest()[:24]
        return self.root / f"{kind}-{digest}.json"

    def get_or_compute(self, kind: str, key, compute: Callable[[], dict]) -> dict:
        if not self.enabled:
            return compute()
        path = self._path(kind, key)
        try:
            entry = json.loads(path.read_text())
            if entry.get("kind") == kind and entry.get("key") == key:
                return entry["payload"]
        except (OSError, ValueError, KeyError):
            pass
        payload = compute()
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps({"kind": kind, "key": key, "created": time.time(),
                                       "payload": payload}, sort_keys=True))
            tmp.replace(path)
        except OSError:
            pass  # read-only location: behave as uncached
        return payload


# -------------------------------------------------------------- output


def _emit(args, payload: dict, text: Callable[[dict], str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text(payload))


def _lat(spec: str) -> lattice.GramLattice:
    try:
        return lattice.parse_lattice(spec)
    except lattice.LatticeSpecError as exc:
        raise UsageError(str(exc)) from exc


def _vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError as exc:
        raise UsageError(f"bad integer vector {text!r}") from exc


# ------------------------------------------------------------ commands


def cmd_walls(args, cache: DiskCache) -> int:
    if args.degree < 1:
        raise UsageError("degree must be positive")

    def compute():
        return candidate_walls(args.degree).to_json()

    start = time.perf_counter()
    payload = cache.get_or_compute("walls", args.degree, compute)
    if args.timing:
        payload = dict(payload, elapsed_s=round(time.perf_counter() - start, 3))
    report = WallReport.from_json(payload)

    def text(p):
        lines = [f"degree {p['d']}: {p['supports']} supports"]
        lines.append("realized walls: " + ", ".join(fmt(t) for t in report.realized_slopes))
        for w in report.realized:
            lines.append(f"  t = {fmt(w.t)}  r = {fmt(w.r)}  side {w.side}  {w.witness.text()}")
        if p["surplus"]:
            lines.append("surplus candidates: " + ", ".join(s["t"] for s in p["surplus"]))
        return "\n".join(lines)

    out = dict(payload)
    out["realized_slopes"] = [fmt(t) for t in report.realized_slopes]
    _emit(args, out, text)
    return 0


def cmd_interval(args, cache: DiskCache) -> int:
    path = args.config or args.pair
    conf = load_configuration(path)
    if args.diagonal or args.pair:
        iv = diagonal_interval(conf)
        kind = "diagonal"
    else:
        iv = interval_for_configuration(conf)
        kind = "configuration"
    payload = {"configuration": conf.to_json(), "kind": kind, "interval": iv.to_json()}
    _emit(args, payload, lambda p: f"{conf.text()}\n{kind} interval {iv}")
    return 0


def cmd_threshold(args, cache: DiskCache) -> int:
    affine = parse_affine_map(args.affine)
    monos = _monomial_list(args.monomials, affine, args.degree)
    t = stability_threshold(monos)
    payload = {"monomials": [m.text() for m in monos], "threshold": fmt(t)}
    _emit(args, payload, lambda p: f"t_p = {p['threshold']}")
    return 0


def cmd_lct(args, cache: DiskCache) -> int:
    try:
        w1, w2 = (int(x) for x in args.weights.split(","))
    except ValueError as exc:
        raise UsageError("--weights expects two integers W1,W2") from exc
    ij = [(e[0], e[1]) for e, c in parse_terms(args.form, {"x": 0, "y": 1}).items() if c]
    try:
        c = lct_quasihomogeneous(w1, w2, ij)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    bound = 3 / c - args.degree
    payload = {"weights": [w1, w2], "lct": fmt(c), "degree": args.degree, "threshold_bound": fmt(bound)}
    _emit(args, payload, lambda p: f"lct = {p['lct']}; 3/lct - d = {p['threshold_bound']}")
    return 0


def cmd_lattice(args, cache: DiskCache) -> int:
    lat = _lat(args.spec)
    if args.action == "disc":
        q = lattice.discriminant_form(lat)
        payload = {"lattice": lat.name, "rank": lat.rank, "det": lat.det, "signature": list(lat.signature),
                   "invariant_factors": list(q.orders), "length": q.length,
                   "isotropic_count": len(q.isotropic_elements()), "form": q.to_json()}
        _emit(args, payload, lambda p: (
            f"{p['lattice']}: rank {p['rank']}, det {p['det']}, signature {tuple(p['signature'])}\n"
            f"A_L orders {p['invariant_factors']}, length {p['length']}, "
            f"{p['isotropic_count']} non-zero isotropic elements"))
        return 0
    if args.action == "roots":
        key = [list(r) for r in lat.gram]
        payload = cache.get_or_compute("roots", key, lambda: lattice.roots(lat).to_json())
        payload = dict(payload, lattice=lat.name)
        _emit(args, payload, lambda p: f"{p['lattice']}: {p['count']} roots, type {p['type']}")
        return 0
    if args.action == "overlattices":
        overs = lattice.overlattices(lat)
        rows = []
        for o in overs:
            rts = lattice.roots(o.lattice) if o.lattice.signature[0] == 0 else None
            rows.append(dict(o.to_json(), det=o.lattice.det,
                             **({"root_type": rts.label} if rts is not None else {})))
        payload = {"lattice": lat.name, "overlattices": rows}
        _emit(args, payload, lambda p: "\n".join(
            f"|H| = {r['order']}: det {r['det']}" + (f", roots {r['root_type']}" if "root_type" in r else "")
            for r in p["overlattices"]))
        return 0
    if args.action == "genus":
        if not args.other:
            raise UsageError("genus needs --other SPEC")
        other = _lat(args.other)
        same = lattice.in_genus(lat, other)
        payload = {"first": lat.name, "second": other.name, "same_genus": same,
                   "signatures": [list(lat.signature), list(other.signature)]}
        _emit(args, payload, lambda p: f"{p['first']} and {p['second']}: "
              + ("same genus" if same else "different genera"))
        return 0
    if args.action == "embed":
        v = lattice.embeds_primitively_K3(lat)
        payload = dict(v.to_json(), lattice=lat.name)
        _emit(args, payload, lambda p: f"{p['lattice']}: {p['verdict']} ({p['reason']})")
        return 0 if v.verdict == "yes" else 1
    raise UsageError(f"unknown lattice action {args.action}")


def _default_h(lat: lattice.GramLattice) -> tuple[int, ...]:
    n, h, _ = hyperbolic.boundary_model()
    if lat.gram == n.gram:
        return tuple(h)
    raise UsageError("--h is required for this lattice")


def cmd_vinberg(args, cache: DiskCache) -> int:
    lat = _lat(args.spec)
    h = _vector(args.h) if args.h else _default_h(lat)
    if len(h) != lat.rank:
        raise UsageError(f"--h has {len(h)} entries, lattice rank is {lat.rank}")
    menu = _vector(args.norms)
    try:
        res = hyperbolic.vinberg(lat, h, menu, max_roots=args.budget, max_height=args.max_height)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.dot:
        print(res.diagram.to_dot(), end="")
        return 0 if res.stopped else 1
    payload = dict(res.to_json(), lattice=lat.name, h=list(h))
    _emit(args, payload, lambda p: (
        f"{len(res.diagram.roots)} roots, stopped: {res.stopped} ({res.reason})\n"
        + "\n".join(f"  {c.label}" for c in res.classes)))
    return 0 if res.stopped else 1


def cmd_boundary(args, cache: DiskCache) -> int:
    t = _lat(args.spec)
    r1 = hyperbolic.isotropic_rank1_classes(t)
    payload = {"lattice": t.name, "rank1": [c.to_json() for c in r1]}
    n, h, tmodel = hyperbolic.boundary_model()
    if lattice.in_genus(t, tmodel):
        r2, res = hyperbolic.isotropic_rank2_classes(n, h, tmodel, norm_menu=(2,))
        payload["rank2"] = [c.to_json() for c in r2]
        payload["vinberg_roots"] = len(res.diagram.roots)
    else:
        payload["rank2"] = None
        payload["note"] = "rank-2 classes are computed only for the D4+E8+U+U(2) model"

    def text(p):
        lines = ["rank 1: " + ", ".join(f"{c['label']} (div {c['divisibility']})" for c in p["rank1"])]
        if p["rank2"] is not None:
            lines.append("rank 2:")
            for c in p["rank2"]:
                lines.append(f"  {c['label']} (div {c['divisibility']}) contains {', '.join(c['contains'])}")
        return "\n".join(lines)

    _emit(args, payload, text)
    return 0


def cmd_occurs(args, cache: DiskCache) -> int:
    try:
        config = moduli.SingularityConfig.parse(args.roots)
    except (lattice.LatticeSpecError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    rep = moduli.config_occurs(config)
    payload = rep.to_json()

    def text(p):
        lines = [f"{p['config']}: {p['verdict']}"]
        if rep.certificate is not None:
            c = rep.certificate
            lines.append(f"  certificate: |H| = {c.order}, {c.reason}")
        else:
            reasons = sorted({c.reason for c in rep.trace})
            lines += [f"  {r}" for r in reasons]
        lines.append(f"  {len(rep.trace)} glue orbits tested, {len(rep.passing)} passing")
        return "\n".join(lines)

    _emit(args, payload, text)
    return 0 if rep.verdict == "yes" else 1


def _verify_tables() -> tuple[bool, dict]:
    rows = tables.verify_degree5_tables()
    th = tables.verify_thresholds()
    ok = all(r.ok for r in rows) and all(good for _, _, good in th)
    return ok, {"rows": [r.to_json() for r in rows],
                "thresholds": [{"label": nf.label, "expected": fmt(nf.threshold), "got": fmt(got), "ok": good}
                               for nf, got, good in th]}


def _verify_orbits() -> tuple[bool, dict]:
    checks = tables.verify_minimal_orbits()
    return all(c.status != "mismatch" for c in checks), {"orbits": [c.to_json() for c in checks]}


def _verify_strata() -> tuple[bool, dict]:
    checks = moduli.verify_strata()
    return all(c.ok for c in checks), {"strata": [c.to_json() for c in checks]}


def _verify_boundary() -> tuple[bool, dict]:
    n, h, t = hyperbolic.boundary_model()
    r1 = hyperbolic.isotropic_rank1_classes(t)
    r2, res = hyperbolic.isotropic_rank2_classes(n, h, t, norm_menu=(2,))
    labels1 = sorted(c.label for c in r1)
    labels2 = sorted(c.label for c in r2)
    incid = {c.label: sorted(c.contains) for c in r2}
    want_incid = {"D12": ["D8+D4+U", "E8+D4+U"], "E8+D4": ["D8+D4+U", "E8+D4+U"],
                  "D8+D4": ["D8+D4+U"], "E7+5A1 overlattice": ["D8+D4+U"]}
    ok = (labels1 == sorted(hyperbolic.RANK1_CATALOG) and labels2 == sorted(hyperbolic.RANK2_CATALOG)
          and incid == want_incid and res.stopped and len(res.classes) == 4
          and all(c.form_check for c in r1 + r2))
    return ok, {"rank1": [c.to_json() for c in r1], "rank2": [c.to_json() for c in r2],
                "parabolic_classes": [c.label for c in res.classes]}


VERIFIERS = {"tables": _verify_tables, "orbits": _verify_orbits,
             "strata": _verify_strata, "boundary": _verify_boundary}


def cmd_verify(args, cache: DiskCache) -> int:
    targets = list(VERIFIERS) if args.what == "all" else [args.what]
    payload, ok_all = {}, True
    for name in targets:
        ok, detail = VERIFIERS[name]()
        payload[name] = dict(detail, ok=ok)
        ok_all &= ok
    _emit(args, payload, lambda p: "\n".join(f"{k}: {'OK' if v['ok'] else 'MISMATCH'}" for k, v in p.items()))
    return 0 if ok_all else 1


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--no-cache", action="store_true", help="bypass the on-disk cache")

    p = _Parser(prog="vgitlat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("walls", parents=[common], help="critical slopes for degree-d pairs")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--timing", action="store_true", help="include elapsed time")
    s.set_defaults(func=cmd_walls)

    s = sub.add_parser("interval", parents=[common], help="stability interval of a configuration")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--config", metavar="FILE")
    g.add_argument("--pair", metavar="FILE")
    s.add_argument("--diagonal", action="store_true", help="intersect over coordinate orderings")
    s.set_defaults(func=cmd_interval)

    s = sub.add_parser("threshold", parents=[common], help="stability threshold of a germ")
    s.add_argument("--monomials", required=True, help='e.g. "x0^2*x2^3, x1^5"')
    s.add_argument("--affine", help="mapping of affine variables, e.g. x=x2,y=x1")
    s.add_argument("--degree", type=int)
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("lct", parents=[common], help="log canonical threshold, quasi-homogeneous case")
    s.add_argument("--weights", required=True, help="W1,W2 for x, y")
    s.add_argument("--form", required=True, help='affine form in x, y, e.g. "x^3 + y^5"')
    s.add_argument("--degree", type=int, default=5)
    s.set_defaults(func=cmd_lct)

    s = sub.add_parser("lattice", parents=[common], help="lattice invariants")
    s.add_argument("action", choices=["disc", "roots", "overlattices", "genus", "embed"])
    s.add_argument("--spec", required=True)
    s.add_argument("--other", help="second lattice for genus")
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("vinberg", parents=[common], help="Vinberg's algorithm")
    s.add_argument("--spec", required=True)
    s.add_argument("--h", help="comma-separated control vector")
    s.add_argument("--norms", default="2,4", help="root norms -k, as k values")
    s.add_argument("--budget", type=int, default=64, help="maximum number of roots")
    s.add_argument("--max-height", type=int, default=40)
    s.add_argument("--dot", action="store_true", help="print the diagram in DOT format")
    s.set_defaults(func=cmd_vinberg)

    s = sub.add_parser("boundary", parents=[common], help="isotropic sublattice classes")
    s.add_argument("--spec", default="D4+E8+U+U(2)")
    s.set_defaults(func=cmd_boundary)

    s = sub.add_parser("occurs", parents=[common], help="does an ADE configuration occur")
    s.add_argument("--roots", required=True, help='e.g. "A12", "10A1"')
    s.set_defaults(func=cmd_occurs)

    s = sub.add_parser("verify", parents=[common], help="built-in table checks")
    s.add_argument("what", choices=[*VERIFIERS, "all"])
    s.set_defaults(func=cmd_verify)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cache = DiskCache(enabled=not args.no_cache)
        return args.func(args, cache)
    except UsageError as exc:
        print(f"vgitlat: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
