"""Command-line interface: ``coopdyn <command> ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import constructions as C
from .antichain import d_bounds_check, d_clt, d_exact, max_antichain_oracle, ratio_to_exact
from .dynamics import TotalMap, orbit_decompose
from .embedding import embed_system
from .errors import CoopDynError, MapFileError
from .irreducibility import Permutation, check_orbit_bounds, classify_irreducibility, edge_list, to_dot
from .mapfile import SampledMap, read_map_file, save_map_file
from .monotonicity import analyze_cooperativity
from .smale import PartialMap, approximation_error, discretize_map, smale_extend
from .state import StateSpace
from .verify import ORDER, Options, render, run_verify_suite

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2

GENERATORS = ["g-pi", "cycle-on-layer", "almost-coop-2d", "almostex", "nopsirshortex",
              "irlong", "germanex", "thermometer-g-pi"]


class UsageError(Exception):
    pass


def _kv(pairs) -> str:
    return "".join(f"{k}: {v}\n" for k, v in pairs)


def _fmt_state(x) -> str:
    return " ".join(str(int(c)) for c in x)


def _parse_pi(text: Optional[str], n: int) -> Permutation:
    """1-based images, e.g. '2 3 1'; default is the rotation i -> i+1."""
    if text is None:
        return Permutation.rotation(n)
    vals = [int(t) - 1 for t in text.replace(",", " ").split()]
    if len(vals) != n:
        raise UsageError(f"--pi needs {n} values")
    return Permutation(tuple(vals))


def _need(args, *names):
    for nm in names:
        if getattr(args, nm) is None:
            raise UsageError(f"--{nm} is required for {args.name}")


def cmd_gen(args, out) -> int:
    report = []
    name = args.name
    if name == "g-pi":
        _need(args, "n", "p")
        pi = _parse_pi(args.pi, args.n)
        m = C.make_g_pi(StateSpace.uniform(args.n, args.p), pi)
    elif name == "thermometer-g-pi":
        _need(args, "n", "p")
        pi = _parse_pi(args.pi, args.n)
        m = C.lifted_g_pi((args.p,) * args.n, pi.images)
    elif name == "cycle-on-layer":
        _need(args, "n", "p")
        m = C.make_cycle_on_layer(args.n, args.p)
    elif name == "almost-coop-2d":
        m = C.make_almost_coop_2d()
    elif name in ("almostex", "nopsirshortex", "irlong"):
        _need(args, "n")
        fn = {"almostex": C.make_almostex, "nopsirshortex": C.make_nopsirshortex,
              "irlong": C.make_irlong}[name]
        m, rep = fn(args.n, with_report=True)
        report += [("cycle_length", len(rep.cycle))] + sorted(rep.properties.items())
    elif name == "germanex":
        _need(args, "n")
        if args.p not in (None, 2):
            raise UsageError("germanex is implemented for p = 2 only")
        m, rep = C.make_germanex(args.n, seed=args.seed, max_retries=args.retries)
        report += [("seed", rep.seed), ("attempts", rep.attempts),
                   ("cycle_length", len(rep.cycle)),
                   ("union_covers_all_arcs", rep.union_covers_all_arcs),
                   ("weakly_irreducible_along_D", rep.weakly_irreducible_along),
                   ("irreducible_along_D", rep.irreducible_along),
                   ("pairs_with_disconnected_G_a", len(rep.disconnected_at))]
    else:
        raise UsageError(f"unknown generator {name!r}")
    save_map_file(m, args.output)
    if not args.quiet:
        out.write(_kv([("generator", name), ("levels", " ".join(map(str, m.space.levels))),
                       ("output", args.output)] + report))
    return EXIT_OK


def analysis_report(m: TotalMap, orbits=True, coop=True, irred=True) -> tuple[str, bool]:
    lines = [("levels", " ".join(map(str, m.space.levels))), ("states", m.space.size)]
    ok = True
    d = orbit_decompose(m)
    if orbits:
        lens = d.cycle_lengths
        lines += [("cycles", len(lens)), ("cycle_lengths", " ".join(map(str, sorted(lens, reverse=True)))),
                  ("transient_states", d.n_transient), ("max_transient", int(max(d.steps_to_cycle)))]
    if coop:
        rep = analyze_cooperativity(m)
        lines += [("cooperativity", rep.verdict.value), ("strongly_cooperative", rep.strongly_cooperative)]
        if rep.witness is not None:
            x, i, j = rep.witness
            lines.append(("coop_witness", f"x=({_fmt_state(x)}) i={i + 1} j={j + 1}"))
        if rep.exception_pair is not None:
            i, j = rep.exception_pair
            lines.append(("exception_pair", f"{i + 1} {j + 1}"))
    if irred:
        irr = classify_irreducibility(m, d)
        lines += [("strongly_irreducible", irr.strongly_irreducible),
                  ("strongly_semi_irreducible", irr.strongly_semi_irreducible),
                  ("irreducible", irr.irreducible), ("weakly_irreducible", irr.weakly_irreducible)]
        for k, a in enumerate(irr.attractors):
            if len(a.cycle) > 1 or len(irr.attractors) <= 16:
                lines.append((f"attractor_{k}",
                              f"length={len(a.cycle)} first=({_fmt_state(m.space.unrank(a.cycle[0]))}) "
                              f"strongly_irreducible_along={a.strongly_irreducible_along} "
                              f"irreducible_along={a.irreducible_along} "
                              f"weakly_irreducible_along={a.weakly_irreducible_along}"))
        bounds = check_orbit_bounds(m)
        for c in bounds.checks:
            if not c.holds:
                ok = False
        names = sorted(bounds.applied)
        lines += [("bounds_applied", " ".join(names) if names else "none"),
                  ("bounds_ok", bounds.ok),
                  ("reference_R(N)", bounds.reference["R(N)"]),
                  ("reference_R(n)", bounds.reference["R(n)"])]
    return _kv(lines), ok


def cmd_analyze(args, out) -> int:
    m = read_map_file(args.file)
    if isinstance(m, SampledMap):
        raise UsageError("sampled files must be discretized first")
    if isinstance(m, PartialMap):
        chk = m.is_cooperative()
        text = _kv([("kind", "partial"), ("levels", " ".join(map(str, m.space.levels))),
                    ("domain_size", len(m)), ("cooperative", chk.ok)])
        ok = True
    else:
        sel = args.orbits or args.coop or args.irred
        text, ok = analysis_report(m, orbits=args.orbits or not sel, coop=args.coop or not sel,
                                   irred=args.irred or not sel)
        for kind, fmt in ((args.edges, edge_list), (args.dot, to_dot)):
            if kind:
                g = classify_irreducibility(m).graphs[kind]
                text += fmt(g)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    if not args.quiet:
        out.write(text)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_embed(args, out) -> int:
    f = read_map_file(args.file)
    if not isinstance(f, TotalMap):
        raise UsageError("embed needs a total map")
    emb, g = embed_system(f, StateSpace.uniform(args.target_n, args.target_p))
    save_map_file(g, args.output)
    if not args.quiet:
        rows = [(f"phi({_fmt_state(x)})", _fmt_state(y)) for x, y in zip(f.space.states(), emb.image)]
        out.write(_kv([("source_states", f.space.size), ("target", f"n={args.target_n} p={args.target_p}"),
                       ("output", args.output)] + rows))
    return EXIT_OK


def cmd_smale(args, out) -> int:
    p = read_map_file(args.file)
    if not isinstance(p, PartialMap):
        raise UsageError("smale needs a partial map file")
    g = smale_extend(p)
    save_map_file(g, args.output)
    if not args.quiet:
        out.write(_kv([("domain_size", len(p)), ("output", args.output)]))
    return EXIT_OK


def cmd_discretize(args, out) -> int:
    s = read_map_file(args.file)
    if not isinstance(s, SampledMap):
        raise UsageError("discretize needs a 'kind sampled' file")
    g = discretize_map(s.space, s.values)
    save_map_file(g, args.output)
    if not args.quiet:
        out.write(_kv([("approximation_error", f"{approximation_error(s.values, g):.6g}"),
                       ("output", args.output)]))
    return EXIT_OK


def cmd_antichain(args, out) -> int:
    n, p = args.n, args.p
    modes = [k for k in ("exact", "clt", "oracle", "bounds") if getattr(args, k)] or ["exact"]
    lines = [("n", n), ("p", p)]
    ok = True
    for k in modes:
        if k == "exact":
            lines.append(("d_exact", d_exact(n, p)))
        elif k == "clt":
            lines += [("d_clt", f"{d_clt(n, p):.6g}"), ("ratio", f"{ratio_to_exact(n, p):.6f}")]
        elif k == "oracle":
            w = max_antichain_oracle(StateSpace.uniform(n, p))
            lines += [("oracle_width", w), ("oracle_matches", w == d_exact(n, p))]
            ok &= w == d_exact(n, p)
        else:
            rep = d_bounds_check(n, p)
            lines += [("lower_bound_ok", rep.lower_ok),
                      ("upper_bound_ok", "n/a" if rep.upper_ok is None else rep.upper_ok)]
            ok &= rep.ok
    if not args.quiet:
        out.write(_kv(lines))
    return EXIT_OK if ok else EXIT_CHECK


def cmd_verify(args, out) -> int:
    opt = Options(cap=args.cap, seed=args.seed)
    outcomes = run_verify_suite(args.suite, opt)
    text = render(outcomes, args.suite, opt)
    if not args.quiet:
        out.write(text)
    return EXIT_OK if all(o.ok for o in outcomes) else EXIT_CHECK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress the report on stdout")
    ap = _Parser(prog="coopdyn", parents=[common],
                 description="Cooperative finite discrete dynamical systems.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate a named system")
    g.add_argument("name", choices=GENERATORS)
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=int)
    g.add_argument("--pi", help="permutation as 1-based images, e.g. '2 3 1'")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--retries", type=int, default=1000)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", parents=[common], help="orbits, cooperativity, irreducibility")
    a.add_argument("file")
    a.add_argument("--orbits", action="store_true")
    a.add_argument("--coop", action="store_true")
    a.add_argument("--irred", action="store_true")
    a.add_argument("--edges", choices=["strong", "semi", "weak"],
                   help="append an aggregate influence graph as an edge list")
    a.add_argument("--dot", choices=["strong", "semi", "weak"],
                   help="append an aggregate influence graph in DOT")
    a.add_argument("--report")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("embed", parents=[common], help="embed into a cooperative system")
    e.add_argument("file")
    e.add_argument("--target-n", type=int, required=True)
    e.add_argument("--target-p", type=int, required=True)
    e.add_argument("-o", "--output", required=True)
    e.set_defaults(func=cmd_embed)

    s = sub.add_parser("smale", parents=[common], help="Smale extension of a partial map")
    s.add_argument("file")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_smale)

    dz = sub.add_parser("discretize", parents=[common], help="round sampled real values to a grid map")
    dz.add_argument("file")
    dz.add_argument("-o", "--output", required=True)
    dz.set_defaults(func=cmd_discretize)

    c = sub.add_parser("antichain", parents=[common], help="middle-layer size and checks")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    for k in ("exact", "clt", "oracle", "bounds"):
        c.add_argument(f"--{k}", action="store_true")
    c.set_defaults(func=cmd_antichain)

    v = sub.add_parser("verify", parents=[common], help="run theorem checks")
    v.add_argument("--suite", required=True, choices=ORDER + ["all"])
    v.add_argument("--cap", type=int, default=2048, help="largest p^n for the antichain oracle")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.quiet = getattr(args, "quiet", False)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except MapFileError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except CoopDynError as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
