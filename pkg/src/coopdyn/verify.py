"""Desk-scale checks of the theorems, bounds and examples.

Each suite returns a list of Outcome records; ``render`` turns them into a
deterministic ``key: value`` report (no timestamps, fixed key order).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .antichain import (
    d_bounds_check,
    d_exact,
    is_unordered,
    max_antichain_oracle,
    ratio_to_exact,
)
from .constructions import (
    all_cooperative_boolean,
    lifted_g_pi,
    make_almost_coop_2d,
    make_almostex,
    make_cycle_on_layer,
    make_g_pi,
    make_germanex,
    make_irlong,
    make_nopsirshortex,
    random_strongly_cooperative,
)
from .dynamics import orbit_decompose
from .errors import CoopDynError
from .irreducibility import (
    Permutation,
    check_orbit_bounds,
    classify_irreducibility,
    extract_cyclic_pi,
    landau_R,
)
from .monotonicity import (
    is_almost_cooperative,
    is_cooperative,
    is_strongly_cooperative,
    perturbation_contract,
)
from .smale import (
    hyperplane_smale,
    random_cooperative_partial_map,
    random_partial_on_level,
    smale_extend,
    smale_extend_naive,
)
from .state import StateSpace


@dataclass
class Outcome:
    check: str
    statement: str
    params: str
    ok: bool
    detail: str = ""


@dataclass
class Options:
    cap: int = 2048
    seed: int = 0
    scale: float = 1.0   # multiplies the random-sample counts

    def count(self, base: int) -> int:
        return max(1, int(round(base * self.scale)))


SUITES: dict[str, Callable[[Options], list[Outcome]]] = {}


def suite(name):
    def deco(fn):
        SUITES[name] = fn
        return fn
    return deco


def _spaces_upto(cap: int):
    for p in range(2, cap + 1):
        n = 1
        while p**n <= cap:
            yield n, p
            n += 1


@suite("sperner")
def sperner(opt: Options) -> list[Outcome]:
    bad = []
    count = 0
    for n, p in _spaces_upto(opt.cap):
        count += 1
        w = max_antichain_oracle(StateSpace.uniform(n, p), cap=max(opt.cap, 2048))
        if w != d_exact(n, p):
            bad.append((n, p, w, d_exact(n, p)))
    return [Outcome("sperner.oracle_equals_d", "width of {0..p-1}^n equals d_exact(n,p)",
                    f"p^n <= {opt.cap}, {count} spaces", not bad,
                    f"mismatches {bad[:5]}" if bad else "")]


def _brute_d(n: int, p: int) -> int:
    sums = np.arange(p)
    for _ in range(n - 1):
        sums = np.add.outer(sums, np.arange(p)).ravel()
    return int(np.count_nonzero(sums == n * (p - 1) // 2))


@suite("dnp")
def dnp(opt: Options) -> list[Outcome]:
    binom_bad = [n for n in range(1, 31) if d_exact(n, 2) != math.comb(n, n // 2)]
    out = [Outcome("dnp.binomial", "d_exact(n,2) = C(n, floor(n/2))", "1 <= n <= 30",
                   not binom_bad, f"fails at n = {binom_bad}" if binom_bad else "")]
    bad = []
    count = 0
    for p in range(2, 10**6 + 1):
        for n in itertools.count(1):
            if p**n > 10**6:
                break
            count += 1
            if n == 1 and p > 10**4:
                # the chain {0..p-1} has one state per level
                if d_exact(1, p) != 1:
                    bad.append((1, p))
            elif d_exact(n, p) != _brute_d(n, p):
                bad.append((n, p))
        if p**2 > 10**6 and p > 10**4:
            break
    out.append(Outcome("dnp.brute_force", "d_exact(n,p) equals a direct count of the middle level",
                       f"p^n <= 10^6 ({count} spaces); n = 1 counted directly for p <= 10^4",
                       not bad, f"mismatches {bad[:5]}" if bad else ""))
    return out


@suite("clt")
def clt(opt: Options) -> list[Outcome]:
    out = []
    for n, p, tol in ((20, 2, 0.02), (12, 3, 0.05)):
        r = ratio_to_exact(n, p)
        out.append(Outcome(f"clt.ratio_{n}_{p}",
                           "d_exact / (p^n / sqrt(2 pi n sigma^2)) is within tol of 1",
                           f"n={n} p={p} tol={tol}", abs(r - 1) <= tol, f"ratio={r:.6f}"))
    return out


@suite("bounds")
def bounds(opt: Options) -> list[Outcome]:
    bad = []
    for n in range(2, 13):
        for p in (2, 3, 4):
            rep = d_bounds_check(n, p)
            if not rep.ok:
                bad.append((n, p, rep.lower_ok, rep.upper_ok))
    out = [Outcome("bounds.dnp", "p^(n-1)/n <= d_{n,p} and d_{n+1,p} < p^n",
                   "2 <= n <= 12, p in {2,3,4}", not bad, f"fails {bad}" if bad else "")]
    g = make_cycle_on_layer(10, 2)
    lengths = sorted(orbit_decompose(g).cycle_lengths, reverse=True)
    ok = d_exact(10, 2) == 252 and 252 > 1.5**10 and lengths[0] == 252 and bool(is_cooperative(g))
    out.append(Outcome("bounds.long_cycle", "cooperative Boolean map with a cycle of length d_{10,2} = 252 > 1.5^10",
                       "n=10 p=2", ok, f"cycle lengths {lengths}"))
    return out


def _boolean3_stats():
    stats = dict(systems=0, max_len=0, four_cycles=0, ordered_cycles=0,
                 sm_disagree=0, irreducible=0, irreducible_not_gpi=0, irreducible_long=0,
                 sir_along=0, sir_along_long=0, wir_sc_along=0, wir_sc_along_long=0,
                 bound_failures=0)
    for m in all_cooperative_boolean(3):
        stats["systems"] += 1
        d = orbit_decompose(m)
        lens = d.cycle_lengths
        stats["max_len"] = max(stats["max_len"], max(lens))
        stats["four_cycles"] += sum(1 for k in lens if k >= 4)
        for k in range(len(d.cycles)):
            if not is_unordered(m.space, d.cycle_states(k)):
                stats["ordered_cycles"] += 1
        sc = is_strongly_cooperative(m, verify=False)
        try:
            is_strongly_cooperative(m, verify=True, pairs="all")
        except AssertionError:
            stats["sm_disagree"] += 1
        irr = classify_irreducibility(m, d)
        if irr.irreducible:
            stats["irreducible"] += 1
            try:
                extract_cyclic_pi(m, irr)
            except CoopDynError:
                stats["irreducible_not_gpi"] += 1
            stats["irreducible_long"] += sum(1 for k in lens if k > 3)
        for cyc, a in zip(d.cycles, irr.attractors):
            if a.strongly_irreducible_along:
                stats["sir_along"] += 1
                stats["sir_along_long"] += len(cyc) > 3
            if sc and a.weakly_irreducible_along:
                stats["wir_sc_along"] += 1
                stats["wir_sc_along_long"] += len(cyc) > 3
        if not check_orbit_bounds(m).ok:
            stats["bound_failures"] += 1
    return stats


_B3_CACHE: dict = {}


def boolean3_stats() -> dict:
    if "s" not in _B3_CACHE:
        _B3_CACHE["s"] = _boolean3_stats()
    return _B3_CACHE["s"]


@suite("boolean3-exhaustive")
def boolean3(opt: Options) -> list[Outcome]:
    s = boolean3_stats()
    return [
        Outcome("boolean3.count", "there are 20^3 cooperative maps on {0,1}^3", "n=3 p=2",
                s["systems"] == 8000, f"systems={s['systems']}"),
        Outcome("boolean3.max_cycle", "longest cycle has length d_{3,2} = 3, no 4-cycle", "8000 systems",
                s["max_len"] == 3 and s["four_cycles"] == 0,
                f"max_len={s['max_len']} four_cycles={s['four_cycles']}"),
        Outcome("boolean3.cycles_unordered", "every periodic orbit of a cooperative map is unordered",
                "8000 systems", s["ordered_cycles"] == 0, f"ordered_cycles={s['ordered_cycles']}"),
        Outcome("boolean3.sm_equivalence", "sum-preserving, gap-nondecreasing and strictly monotone agree",
                "8000 systems, all ordered pairs", s["sm_disagree"] == 0, f"disagreements={s['sm_disagree']}"),
        Outcome("boolean3.irreducible_is_gpi", "every cooperative irreducible map is g_pi with pi cyclic",
                "8000 systems", s["irreducible_not_gpi"] == 0 and s["irreducible_long"] == 0,
                f"irreducible={s['irreducible']} failures={s['irreducible_not_gpi']}"),
        Outcome("boolean3.strongly_irreducible_along", "|X| <= n when strongly irreducible along X",
                "8000 systems", s["sir_along_long"] == 0,
                f"attractors={s['sir_along']} violations={s['sir_along_long']}"),
        Outcome("boolean3.weakly_irreducible_along_sc",
                "|X| <= n for strongly cooperative maps weakly irreducible along X",
                "8000 systems", s["wir_sc_along_long"] == 0,
                f"attractors={s['wir_sc_along']} violations={s['wir_sc_along_long']}"),
        Outcome("boolean3.orbit_bounds", "every applicable cycle-length bound holds", "8000 systems",
                s["bound_failures"] == 0, f"failures={s['bound_failures']}"),
    ]


@suite("sm-equivalence")
def sm_equivalence(opt: Options) -> list[Outcome]:
    rng = np.random.default_rng(opt.seed)
    spaces = [StateSpace.uniform(2, 3), StateSpace.uniform(3, 3), StateSpace.boolean(4)]
    total = opt.count(10**4)
    disagree = 0
    sc_count = 0
    for k in range(total):
        sp = spaces[k % len(spaces)]
        g = smale_extend(random_cooperative_partial_map(sp, rng))
        try:
            sc_count += bool(is_strongly_cooperative(g, verify=True, pairs="all"))
        except AssertionError:
            disagree += 1
    out = boolean3(opt)[3:4]
    out.append(Outcome("sm.random", "the three strong-cooperativity conditions agree on cooperative maps",
                       f"{total} Smale extensions on (2,3),(3,3),(4,2), seed={opt.seed}",
                       disagree == 0, f"disagreements={disagree} strongly_cooperative={sc_count}"))
    # random Smale extensions are rarely strongly cooperative, so exercise the positive side too
    pos = opt.count(1000)
    bad = 0
    for k in range(pos):
        g = random_strongly_cooperative(spaces[k % len(spaces)], rng)
        res = is_strongly_cooperative(g, verify=True, pairs="all")
        bad += not (res.sum_preserving and res.gap_nondecreasing and res.strictly_monotone)
    out.append(Outcome("sm.positive", "all three conditions hold on strongly cooperative maps",
                       f"{pos} comparator/permutation maps, seed={opt.seed}", bad == 0, f"failures={bad}"))
    return out


@suite("smale")
def smale(opt: Options) -> list[Outcome]:
    rng = np.random.default_rng(opt.seed)
    per = opt.count(1000)
    out = []
    for n, p in ((3, 2), (4, 2), (2, 5), (3, 3)):
        sp = StateSpace.uniform(n, p)
        bad_coop = bad_restrict = bad_naive = 0
        for k in range(per):
            gamma = random_cooperative_partial_map(sp, rng)
            g = smale_extend(gamma)
            bad_coop += not is_cooperative(g)
            bad_restrict += not np.array_equal(g.table[gamma.domain_ranks], gamma.image_ranks)
            if k % 10 == 0:
                bad_naive += g != smale_extend_naive(gamma)
        bad_hyper = 0
        trials = 0
        for r in range(sp.max_sum + 1):
            for _ in range(max(1, per // 50)):
                gamma = random_partial_on_level(sp, r, rng)
                trials += 1
                bad_hyper += hyperplane_smale(gamma) != smale_extend(gamma)
        ok = bad_coop == bad_restrict == bad_naive == bad_hyper == 0
        out.append(Outcome(f"smale.n{n}_p{p}",
                           "Smale extension is cooperative, extends gamma, matches the definition and the hyperplane form",
                           f"{per} partial maps, {trials} level-set maps, seed={opt.seed}", ok,
                           f"noncoop={bad_coop} restrict={bad_restrict} naive={bad_naive} hyperplane={bad_hyper}"))
    return out


def _cyclic_perms(n: int):
    for rest in itertools.permutations(range(1, n)):
        cyc = (0,) + rest
        yield Permutation.from_cycles(n, [cyc])


@suite("itosc")
def itosc(opt: Options) -> list[Outcome]:
    bad = []
    long_cycles = 0
    count = 0
    for p in (2, 3):
        for n in range(1, 7):
            sp = StateSpace.uniform(n, p)
            for pi in _cyclic_perms(n):
                count += 1
                g = make_g_pi(sp, pi)
                try:
                    got = extract_cyclic_pi(g)
                    if got != pi:
                        bad.append((n, p, pi.images, got.images))
                except CoopDynError as exc:
                    bad.append((n, p, pi.images, type(exc).__name__))
                long_cycles += sum(1 for k in orbit_decompose(g).cycle_lengths if k > n)
    out = boolean3(opt)[4:5]
    out.append(Outcome("itosc.roundtrip", "extract_cyclic_pi recovers pi from g_pi; cycles have length <= n",
                       f"all cyclic pi, n <= 6, p in {{2,3}}; {count} maps", not bad and long_cycles == 0,
                       f"failures={bad[:3]} long_cycles={long_cycles}"))
    return out


def _landau_brute(k: int) -> int:
    best = 1
    for perm in itertools.permutations(range(k)):
        best = max(best, Permutation(perm).order())
    return best


def strongly_cooperative_family(rng: np.random.Generator, count: int, max_N: int = 12):
    """Yield (label, map): thermometer lifts of g_pi and random comparator/permutation maps."""
    level_choices = [(2,) * k for k in range(2, 13)] + [(3,) * k for k in range(2, 7)] + \
                    [(4,) * k for k in range(2, 5)] + [(3, 3, 2, 2), (4, 4, 2, 2), (5, 5), (3, 3, 3, 2, 2)]
    level_choices = [lv for lv in level_choices if sum(p - 1 for p in lv) <= max_N]
    for k in range(count):
        levels = level_choices[int(rng.integers(len(level_choices)))]
        if k % 2 == 0:
            # permute within equal-level groups so g_pi is well defined
            pi = np.arange(len(levels))
            for p in set(levels):
                idx = [i for i, q in enumerate(levels) if q == p]
                pi[idx] = rng.permutation(idx)
            yield f"lift{levels}", lifted_g_pi(levels, tuple(int(v) for v in pi))
        else:
            yield f"random{levels}", random_strongly_cooperative(StateSpace(levels), rng)


@suite("orbit-bounds")
def orbit_bounds(opt: Options) -> list[Outcome]:
    spot = {5: 6, 7: 12}
    brute = {k: _landau_brute(k) for k in spot}
    dp_ok = all(landau_R(k) == v == brute[k] for k, v in spot.items())
    small_ok = all(landau_R(k) == _landau_brute(k) for k in range(1, 8))
    out = [Outcome("landau.values", "R(5) = 6, R(7) = 12, DP equals brute force over S_k",
                   "k <= 7", dp_ok and small_ok, f"R={[landau_R(k) for k in range(1, 13)]}")]
    rng = np.random.default_rng(opt.seed)
    total = opt.count(1000)
    viol = []
    not_sc = 0
    longest = 0
    for label, m in strongly_cooperative_family(rng, total):
        if not is_strongly_cooperative(m):
            not_sc += 1
            continue
        N = m.space.max_sum
        R = landau_R(N)
        for c in orbit_decompose(m).cycle_lengths:
            longest = max(longest, c)
            if c > R:
                viol.append((label, c, R))
    out.append(Outcome("orbit.strongly_cooperative_R", "cycles of strongly cooperative maps have length <= R(N)",
                       f"{total} maps with N <= 12, seed={opt.seed}", not viol and not_sc == 0,
                       f"violations={viol[:3]} not_sc={not_sc} longest={longest}"))
    # Landau extremal case: pi = (0 1)(2 3 4) has order 6 = R(5)
    pi = Permutation.from_cycles(5, [(0, 1), (2, 3, 4)])
    m = lifted_g_pi((2,) * 5, pi.images)
    lens = orbit_decompose(m).cycle_lengths
    out.append(Outcome("orbit.landau_attained", "a strongly cooperative map with N = 5 has a cycle of length R(5) = 6",
                       "thermometer lift of g_pi, pi of cycle type 2+3", max(lens) == 6 == landau_R(5)
                       and bool(is_strongly_cooperative(m)), f"max_cycle={max(lens)}"))
    return out


@suite("examples")
def examples(opt: Options) -> list[Outcome]:
    out = []
    g = make_almost_coop_2d()
    table_ok = (g.apply((0, 0)) == (1, 0) and g.apply((1, 0)) == (1, 1)
                and g.apply((1, 1)) == (0, 1) and g.apply((0, 1)) == (0, 0))
    ac = is_almost_cooperative(g)
    out.append(Outcome("examples.almost_coop_2d", "g(x1,x2) = (1-x2, x1): one 4-cycle, almost cooperative at <2,1>",
                       "n=2", table_ok and orbit_decompose(g).cycle_lengths == [4] and bool(ac) and ac.witness == (1, 0),
                       f"table_ok={table_ok}"))

    def run(name, fn, desc, params):
        try:
            g, rep = fn()
            out.append(Outcome(f"examples.{name}", desc, params, True,
                               f"cycle_length={len(rep.cycle)}"))
        except CoopDynError as exc:
            out.append(Outcome(f"examples.{name}", desc, params, False, f"{type(exc).__name__}: {exc}"))

    run("almostex", lambda: make_almostex(6, with_report=True),
        "cooperative, strongly semi-irreducible, 20-cycle in M", "n=6 p=4")
    run("nopsirshortex", lambda: make_nopsirshortex(4, with_report=True),
        "cooperative, strongly irreducible along a 6-cycle", "n=4 p=6")
    run("irlong", lambda: make_irlong(5, with_report=True),
        "cooperative Boolean, irreducible along a 10-cycle", "n=5 p=2")
    try:
        g, rep = make_germanex(12, seed=opt.seed, max_retries=1000)
        ok = len(rep.cycle) == 924 and rep.union_covers_all_arcs and not rep.irreducible_along
        detail = (f"attempts={rep.attempts} union_covers_all_arcs={rep.union_covers_all_arcs} "
                  f"irreducible_along={rep.irreducible_along} "
                  f"disconnected_at_a={len(rep.disconnected_at)}")
    except CoopDynError as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    out.append(Outcome("examples.germanex", "weakly irreducible along D; Smale extension not irreducible along D",
                       f"n=12 seed={opt.seed} retries=1000", ok, detail))
    return out


@suite("perturbation")
def perturbation(opt: Options) -> list[Outcome]:
    rng = np.random.default_rng(opt.seed)
    total = opt.count(10**4)
    per_map = 100
    bad = []
    done = 0
    family = strongly_cooperative_family(rng, math.ceil(total / per_map), max_N=10)
    for label, m in family:
        sp = m.space
        for _ in range(min(per_map, total - done)):
            x0 = sp.unrank(int(rng.integers(sp.size)))
            y0 = sp.unrank(int(rng.integers(sp.size)))
            t = int(rng.integers(0, 50))
            if not perturbation_contract(m, x0, y0, t):
                bad.append((label, x0, y0, t))
            done += 1
    return [Outcome("perturbation.contract", "S(|y(t)-x(t)|) <= S(|y(0)-x(0)|) for strongly cooperative maps",
                    f"{done} triples, seed={opt.seed}", not bad, f"violations={bad[:3]}" if bad else "")]


ORDER = ["sperner", "dnp", "clt", "bounds", "boolean3-exhaustive", "sm-equivalence", "smale",
         "itosc", "orbit-bounds", "examples", "perturbation"]


def run_verify_suite(name: str, opt: Optional[Options] = None) -> list[Outcome]:
    opt = opt or Options()
    if name == "all":
        return [o for s in ORDER for o in SUITES[s](opt)]
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](opt)


def render(outcomes: list[Outcome], suite_name: str, opt: Options) -> str:
    lines = [f"suite: {suite_name}", f"seed: {opt.seed}", f"cap: {opt.cap}"]
    for o in outcomes:
        lines += ["", f"check: {o.check}", f"statement: {o.statement}", f"params: {o.params}",
                  f"outcome: {'pass' if o.ok else 'FAIL'}"]
        if o.detail:
            lines.append(f"detail: {o.detail}")
    passed = sum(o.ok for o in outcomes)
    lines += ["", f"passed: {passed}/{len(outcomes)}",
              f"result: {'pass' if passed == len(outcomes) else 'FAIL'}"]
    return "\n".join(lines) + "\n"
