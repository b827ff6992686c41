"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 domain error (degenerate or invalid
input), 3 internal assertion (a bug, or a falsified structural claim).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .core import Leaf, angle, fmt, height, parse_rational, validate_elamination
from .errors import DomainError, InternalAssertion


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: error: {message}\n\n{self.format_help()}")


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("BLAB_THREADS")
    return max(1, int(env)) if env else 1


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=False)
    (out or sys.stdout).write(text + "\n")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _leaf_arg(text: str) -> Leaf:
    """"angles=3/36,15/36;height=1" -> Leaf."""
    parts = dict(p.split("=", 1) for p in text.split(";") if p.strip())
    if "angles" not in parts or "height" not in parts:
        raise _Usage(f"--leaf needs angles=...;height=..., got {text!r}")
    tips = tuple(angle(parse_rational(x)) for x in parts["angles"].split(","))
    return Leaf(tips, height(parse_rational(parts["height"])))


def _load_leaves(path: str) -> list:
    with open(path, encoding="utf-8") if path != "-" else sys.stdin as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("leaves", [])
    return [Leaf.from_json(x) for x in data]


# subcommands

def cmd_validate(args) -> int:
    leaves = _load_leaves(args.input)
    problems = validate_elamination(leaves)
    fatal = [v for v in problems if not v.warning]
    _emit({"ok": not fatal, "leaves": len(leaves),
           "violations": [{"kind": v.kind, "detail": v.detail, "warning": v.warning} for v in problems]})
    return 0 if not fatal else 2


def cmd_dynlam(args) -> int:
    from .dynlam import CriticalSet, generate
    crit = CriticalSet([_leaf_arg(x) for x in args.leaf], args.degree)
    lam = generate(crit, args.depth)
    if args.json:
        _emit(lam.to_json())
    else:
        for k in range(args.depth + 1):
            print(f"depth {k}: {len(lam.at_depth(k))} leaves")
    return 0


def cmd_taut_leaves(args) -> int:
    from .taut import taut_leaves
    lam = taut_leaves(parse_rational(args.t), args.depth, workers=_threads(args))
    if args.json:
        _emit(lam.to_json())
    else:
        for leaf in lam.leaves:
            print(leaf.depth, " ".join(fmt(x) for x in sorted(leaf.chord)))
    return 0


def cmd_taut_census(args) -> int:
    from .taut import rains_check, taut_census
    rows = taut_census(parse_rational(args.t), args.depth, method=args.method, workers=_threads(args))
    if args.csv is not None:
        out, close = _open_out(args.csv)
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "ell", "count"])
        for row in rows:
            w.writerows(row.csv_rows())
        if close:
            out.close()
    if args.json:
        _emit({"t": args.t, "rows": [{"n": r.depth, "counts": {str(k): v for k, v in r.entries}}
                                      for r in rows], "checks": rains_check(rows).to_json()})
    elif args.csv is None:
        for r in rows:
            print(r.depth, *r.row())
    return 0


def cmd_taut_invariance(args) -> int:
    from .taut import t_invariance_check
    ts = [parse_rational(x) for x in args.ts.split(",")]
    rep = t_invariance_check(ts, args.depth)
    _emit(rep.to_json())
    return 0 if rep.ok else 3


def cmd_monodromy(args) -> int:
    from .monodromy import rotation_data, track
    t0 = parse_rational(args.t)
    deeper = args.rot if args.rot is not None else args.depth <= 4
    rep = track(t0, args.depth + 1 if deeper else args.depth)
    rot = rotation_data(rep, args.depth) if deeper else None
    rep = rep.at_depth(args.depth)
    data = rep.to_json(rot)
    if args.report == "json":
        _emit(data)
    else:
        print(f"depth {data['depth']}: {data['components']} components, {len(data['orbits'])} orbits")
        for o in data["orbits"]:
            print(f"  size {o['size']} rot {o['rot']} members {o['members']}")
    return 0


def cmd_sausage(args) -> int:
    from .sausage import level_orbits, parse_chain, tower_build, continue_loop
    chain = parse_chain(args.chain)
    depth = args.depth if args.depth is not None else len(chain) + 1
    if depth > 1 and not chain:
        raise _Usage("--chain must name at least one point")
    # a short chain is repeated to fill the requested depth
    full = tuple(chain[i % len(chain)] for i in range(depth - 1)) if chain else ()
    c0 = complex(args.c0.replace("i", "j"))
    tower = tower_build(full, c0, depth)
    perm = continue_loop(tower)
    levels = []
    for k in range(1, depth + 1):
        orb = level_orbits(tower, perm, k)
        levels.append({"level": k, "sizes": sorted(len(o) for o in orb),
                       "orbits": [sorted(o) for o in sorted(orb, key=min)]})
    data = {"chain": list(full), "c0": [c0.real, c0.imag], "depth": depth, "levels": levels}
    if args.json:
        _emit(data)
    else:
        for lv in levels:
            print(f"level {lv['level']}: {lv['sizes']}")
    return 0


def cmd_cat0(args) -> int:
    from .cat0 import cat0_report
    data = cat0_report(args.n)
    if args.json:
        print(json.dumps(data, separators=(",", ":")))
    else:
        print(f"n={data['n']} girth={data['girth_units_pi4']}·π/4 cat0={data['cat0']}")
    return 0


def cmd_poly(args) -> int:
    from .butcher import critical_data, normalize_poly, parse_coeffs, shift_member
    p = normalize_poly(parse_coeffs(args.coeffs))
    mem = shift_member(p, maxiter=args.maxiter)
    data = {"degree": p.d, "normal_form": [[c.real, c.imag] for c in p.coeffs()],
            "shift_locus": mem.member, "escape_times": mem.escape_times}
    if mem.member:
        data.update(critical_data(p).to_json())
    if args.json:
        _emit(data)
    else:
        print(f"degree {p.d}, shift locus: {mem.member}")
        for c in data.get("critical", []):
            print(f"  critical {c['re']:+.6f}{c['im']:+.6f}i h={c['height']:.6f} angles={c['angles']}")
    return 0


def cmd_render(args) -> int:
    from .render import RenderSpec, render_elamination, render_pinched_disk
    if args.input:
        leaves = _load_leaves(args.input)
    elif args.t:
        from .taut import taut_leaves
        leaves = taut_leaves(parse_rational(args.t), args.depth, workers=_threads(args)).as_leaves()
    else:
        raise _Usage("render needs --input or --t")
    spec = RenderSpec(size=args.size, depth=args.depth if args.input else None)
    svg = render_pinched_disk(leaves, spec) if args.kind == "pinched" else render_elamination(leaves, spec)
    out, close = _open_out(args.out)
    out.write(svg)
    if close:
        out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="blab", description="Shift-locus combinatorics and numerics.")
    p.add_argument("--threads", type=int, default=None, help="worker budget (default: $BLAB_THREADS or 1)")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    s = sub.add_parser("validate", help="check an elamination JSON file")
    s.add_argument("input", help="JSON list of leaves, or an object with a 'leaves' list; '-' for stdin")
    s.set_defaults(func=cmd_validate)

    dl = sub.add_parser("dynlam", help="dynamical elaminations").add_subparsers(dest="sub", parser_class=_Parser)
    s = dl.add_parser("gen", help="pull back a critical set")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--leaf", action="append", required=True, help='"angles=a,b;height=h", repeatable')
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_dynlam)

    tt = sub.add_parser("taut", help="tautological elamination").add_subparsers(dest="sub", parser_class=_Parser)
    s = tt.add_parser("leaves")
    s.add_argument("--t", required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_taut_leaves)
    s = tt.add_parser("census")
    s.add_argument("--t", required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--csv", default=None, help="CSV destination, '-' for stdout")
    s.add_argument("--json", action="store_true")
    s.add_argument("--method", choices=["auto", "exact", "kernel"], default="auto")
    s.set_defaults(func=cmd_taut_census)
    s = tt.add_parser("invariance")
    s.add_argument("--ts", default="1/12,1/7,3/17", help="comma-separated parameters")
    s.add_argument("--depth", type=int, required=True)
    s.set_defaults(func=cmd_taut_invariance)

    s = sub.add_parser("monodromy", help="orbits of φ on components")
    s.add_argument("--t", required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--report", choices=["json", "text"], default="text")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--rot", dest="rot", action="store_true", default=None,
                   help="track one level deeper to report rotation numbers (default for depth ≤ 4)")
    g.add_argument("--no-rot", dest="rot", action="store_false")
    s.set_defaults(func=cmd_monodromy)

    sa = sub.add_parser("sausage", help="quadratic tower monodromy").add_subparsers(dest="sub", parser_class=_Parser)
    s = sa.add_parser("orbits")
    s.add_argument("--chain", required=True, help="point ids c_1,...; repeated to fill --depth")
    s.add_argument("--c0", default="0.7+0.1i")
    s.add_argument("--depth", type=int, default=None)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_sausage)

    ct = sub.add_parser("cat0", help="link condition").add_subparsers(dest="sub", parser_class=_Parser)
    s = ct.add_parser("check")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_cat0)

    pl = sub.add_parser("poly", help="numeric polynomial dynamics").add_subparsers(dest="sub", parser_class=_Parser)
    s = pl.add_parser("analyze")
    s.add_argument("--coeffs", required=True, help="comma-separated, highest degree first")
    s.add_argument("--maxiter", type=int, default=10_000)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_poly)

    s = sub.add_parser("render", help="SVG output")
    s.add_argument("kind", choices=["elamination", "pinched"])
    s.add_argument("--input", help="leaf JSON file")
    s.add_argument("--t", help="draw Λ_T(t) instead of a file")
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--size", type=int, default=600)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            raise _Usage(parser.format_help())
        return args.func(args)
    except _Usage as e:
        sys.stderr.write(str(e).rstrip() + "\n")
        return 1
    except DomainError as e:
        sys.stderr.write(f"domain error: {type(e).__name__}: {e}\n")
        return 2
    except InternalAssertion as e:
        sys.stderr.write(f"internal assertion: {type(e).__name__}: {e}\n")
        return 3
    except (ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
