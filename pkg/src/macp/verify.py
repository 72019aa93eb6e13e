"""Exhaustive property suites over the enumerated posets.

Each suite returns a deterministic report dict: {"suite", "n", "pass",
"checks": [...], "counterexamples": [...]}.  Reports carry no timestamps,
so identical configurations give byte-identical JSON.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from itertools import combinations

from . import flags as fl
from . import homology as hm
from . import macphersonian as mp
from . import omcore as om
from . import posets as ps
from .errors import Violation

SUITES = (
    "axioms",
    "covers",
    "rank",
    "thin",
    "semimodular",
    "rao",
    "spheres",
    "rp",
    "flags-all",
)


@lru_cache(maxsize=None)
def macp2(n: int) -> mp.MacP2Poset:
    return mp.enumerate_macp2(n)


@lru_cache(maxsize=None)
def macp12(n: int) -> fl.FlagPoset:
    return fl.enumerate_macp12(n, macp=macp2(n))


def _map(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _report(suite: str, n: int, checks, counterexamples) -> dict:
    return {
        "suite": suite,
        "n": n,
        "pass": not counterexamples,
        "checks": checks,
        "counterexamples": sorted(str(c) for c in counterexamples)[:20],
    }


# ---------------------------------------------------------------------------


def suite_axioms(n: int, seed: int = 0, threads: int = 1) -> dict:
    """Per-element structure: GP validity, covector axioms, covector count
    4p, cocircuit minimality, basis orientation, realization round trip,
    reorientation/relabeling laws, comparator equivalence (n <= 4), cell
    round trips and boundary recovery (n <= 4)."""
    poset = macp2(n)
    checks = []
    bad = []
    rng = random.Random(seed)

    def per_element(m):
        errs = []
        if om.validate_grassmann_plucker(m.chirotope()) is not None:
            errs.append(f"GP:{m.key}")
        covs = om.covectors(m)
        if om.validate_covector_axioms(covs) is not None:
            errs.append(f"axioms:{m.key}")
        if len(covs) != 4 * m.p + 1:
            errs.append(f"count:{m.key}")
        cocs = om.cocircuits(m)
        minimal = {
            c for c in covs if not c.is_zero()
            and not any(
                d != c and not d.is_zero() and d.dominated_by(c) for d in covs
            )
        }
        if cocs != minimal:
            errs.append(f"cocircuits:{m.key}")
        for c in cocs:
            zero_on = frozenset(m.non_loops()) - c.support()
            if not any(m.class_members(k) == zero_on for k in range(1, m.p + 1)):
                errs.append(f"cocircuit-zeroset:{m.key}")
                break
        if om.check_basis_orientation(m) is not None:
            errs.append(f"basis-orientation:{m.key}")
        if om.mu(om.realize_slots(m)) != m:
            errs.append(f"roundtrip:{m.key}")
        suba = frozenset(rng.sample(range(1, n + 1), k=rng.randint(0, n)))
        if om.reorient(om.reorient(m, suba), suba) != m:
            errs.append(f"reorient-involution:{m.key}")
        p1 = list(range(1, n + 1))
        rng.shuffle(p1)
        p2 = list(range(1, n + 1))
        rng.shuffle(p2)
        comp = {i: p2[p1[i - 1] - 1] for i in range(1, n + 1)}
        if om.relabel(om.relabel(m, p1), p2) != om.relabel(m, comp):
            errs.append(f"relabel-composition:{m.key}")
        if om.relabel(m, p1).h != m.h:
            errs.append(f"relabel-h:{m.key}")
        return errs

    for errs in _map(per_element, poset.elements, threads):
        bad.extend(errs)
    checks.append(f"structure on {len(poset)} elements")

    if n <= 4:
        mism = 0
        for a in poset.elements:
            for b in poset.elements:
                if mp.weak_leq(a, b) != mp.weak_leq_chirotope(a, b):
                    mism += 1
                    bad.append(f"comparator:{a.key}|{b.key}")
        checks.append(f"comparator equivalence on {len(poset)}^2 pairs")

        def cell_checks(m):
            errs = []
            for mat in mp.sample_cell(m, 25, seed):
                if om.mu(mat) != m:
                    errs.append(f"cell:{m.key}")
                    break
            if mp.sample_cell(m, 3, seed) != mp.sample_cell(m, 3, seed):
                errs.append(f"determinism:{m.key}")
            try:
                for face in mp.coatoms_CR(m):
                    mp.sample_boundary(m, face, 3, seed)
            except AssertionError:
                errs.append(f"boundary:{m.key}")
            return errs

        for errs in _map(cell_checks, poset.elements, threads):
            bad.extend(errs)
        checks.append("cell round trips (25 samples) and boundary recovery")

        iso = 0
        for m in poset.elements:
            suba = frozenset(rng.sample(range(1, n + 1), k=rng.randint(1, n)))
            m2 = om.reorient(m, suba)
            down1 = sorted(
                om.reorient(poset.elements[k], suba).key
                for k in poset.downset_idx(poset.idx(m))
            )
            down2 = sorted(
                poset.elements[k].key for k in poset.downset_idx(poset.idx(m2))
            )
            if down1 != down2:
                iso += 1
                bad.append(f"reorient-interval:{m.key}")
        checks.append("reorientation acts on lower intervals")
    return _report("axioms", n, checks, bad)


def suite_covers(n: int, threads: int = 1) -> dict:
    """coatoms_CR against brute-force covers from the order relation."""
    poset = macp2(n)
    bad = []

    def check(i):
        m = poset.elements[i]
        a = sorted(c.key for c in mp.coatoms_CR(m))
        b = sorted(poset.elements[k].key for k in poset.brute_covers_down(i))
        return None if a == b else m.key

    for r in _map(check, range(len(poset)), threads):
        if r:
            bad.append(r)
    checks = [f"CR moves == brute-force covers on {len(poset)} elements"]
    if n <= 4:
        slow = {}
        for i, a in enumerate(poset.elements):
            for j, b in enumerate(poset.elements):
                if i != j and mp.weak_leq(a, b):
                    slow.setdefault(j, set()).add(i)
        for j in range(len(poset)):
            below = slow.get(j, set())
            brute = {
                i for i in below
                if not any(i in slow.get(k, ()) for k in below)
            }
            if brute != set(poset.brute_covers_down(j)):
                bad.append(f"covector-covers:{poset.elements[j].key}")
        checks.append("covers recomputed from covector weak maps")
    return _report("covers", n, checks, bad)


def suite_rank(n: int, threads: int = 1) -> dict:
    """h(M) = l + p - 4 equals the graded height above the atoms."""
    poset = macp2(n)
    bad = []
    heights = [None] * len(poset)
    for i in sorted(range(len(poset)), key=lambda i: poset.h[i]):
        below = [heights[k] + 1 for k in poset.covers_down[i]]
        heights[i] = max(below, default=0)
    for i, m in enumerate(poset.elements):
        if heights[i] != m.h:
            bad.append(f"rank:{m.key}:{heights[i]}!={m.h}")
        for j in poset.covers_up[i]:
            if poset.h[j] != poset.h[i] + 1:
                bad.append(f"gap:{m.key}")
    checks = [f"rank formula and gradedness on {len(poset)} elements"]
    return _report("rank", n, checks, bad)


def suite_thin(n: int, threads: int = 1) -> dict:
    """Every length-2 interval of every lower interval (with bottom) has
    four elements.

    Equivalent flat form: comparable pairs at rank distance 2 have exactly
    two elements strictly between, and every rank-1 element has exactly
    two atoms below it.
    """
    poset = macp2(n)
    bad = []
    for i in range(len(poset)):
        dm = poset.down_mask(i)
        for j in range(len(poset)):
            if dm >> j & 1 and poset.h[i] - poset.h[j] == 2:
                between = poset.up[j] & dm & ~(1 << i) & ~(1 << j)
                if bin(between).count("1") != 2:
                    bad.append(
                        f"thin:{poset.elements[j].key}<{poset.elements[i].key}"
                    )
    for i, m in enumerate(poset.elements):
        if m.h == 1:
            atoms = [k for k in poset.downset_idx(i) if poset.h[k] == 0]
            if len(atoms) != 2:
                bad.append(f"thin-bottom:{m.key}")
    checks = [f"length-2 intervals over {len(poset)} elements"]
    return _report("thin", n, checks, bad)


def suite_semimodular(n: int, threads: int = 1) -> dict:
    """Total semimodularity of every interval [W, T] (flat form over pairs
    z <= y)."""
    poset = macp2(n)
    bad = []
    coverup_mask = [0] * len(poset)
    for i in range(len(poset)):
        for j in poset.covers_up[i]:
            coverup_mask[i] |= 1 << j
    for zi in range(len(poset)):
        ups = poset.up[zi] & ~(1 << zi)
        covers = poset.covers_up[zi]
        bits = ups
        while bits:
            low = bits & -bits
            yi = low.bit_length() - 1
            bits ^= low
            inside = [u for u in covers if poset.up[u] >> yi & 1]
            for a in range(len(inside)):
                for b in range(a + 1, len(inside)):
                    u, v = inside[a], inside[b]
                    if coverup_mask[u] & coverup_mask[v] & poset.down_mask(yi) == 0:
                        bad.append(
                            f"semimodular:{poset.elements[zi].key}"
                            f"|{poset.elements[yi].key}"
                        )
    checks = [f"all intervals of MacP(2,{n})"]
    return _report("semimodular", n, checks, bad)


def suite_rao(n: int, budget: int = 10**6, threads: int = 1) -> dict:
    """The affine-line atom ordering passes the definition checker on all
    lower intervals; flag orderings likewise on MacP(1,2,3)."""
    poset = macp2(n)
    bad = []

    def check(m):
        li = mp.lower_interval(poset, m)
        ordering = mp.rao_ordering(m, om.realize_slots(m))
        return None if ps.verify_recursive_atom_ordering(li, ordering, budget) else m.key

    for r in _map(check, poset.elements, threads):
        if r:
            bad.append(r)
    checks = [f"rank-2 lower intervals on {len(poset)} elements"]
    if n >= 3:
        fp = macp12(3)

        def fcheck(f):
            li = fp.lower_interval(f)
            ordering = fl.flag_rao_ordering(f, om.realize_slots(f.M))
            return None if ps.verify_recursive_atom_ordering(li, ordering, budget) else f.key

        for r in _map(fcheck, fp.flags, threads):
            if r:
                bad.append(r)
        checks.append(f"flag lower intervals on {len(fp)} flags of MacP(1,2,3)")
    return _report("rao", n, checks, bad)


def suite_spheres(n: int, threads: int = 1, flag_n: int | None = None) -> dict:
    """Proper parts of lower intervals have the GF(2) profile of spheres
    of dimension h(M)-1 (rank-2, 1 <= h <= 4) and h(M)+h_M(N)-1 (flags)."""
    poset = macp2(n)
    bad = []

    def check(i):
        m = poset.elements[i]
        if not 1 <= m.h <= 4:
            return None
        members = [k for k in poset.downset_idx(i) if k != i]
        sub = poset.to_poset().subposet(members)
        complex_ = ps.order_complex(sub)
        return None if hm.is_sphere_profile(complex_, m.h - 1) else m.key

    for r in _map(check, range(len(poset)), threads):
        if r:
            bad.append(r)
    checks = [f"rank-2 intervals with 1 <= h <= 4 over {len(poset)} elements"]

    if flag_n:
        fp = macp12(flag_n)
        fposet = fp.to_poset()

        def fcheck(i):
            f = fp.flags[i]
            d = fp.rank[i]
            if d < 1:
                return None
            members = [k for k in fp.downset_idx(i) if k != i]
            sub = fposet.subposet(members)
            complex_ = ps.order_complex(sub)
            return None if hm.is_sphere_profile(complex_, d - 1) else f.key

        for r in _map(fcheck, range(len(fp)), threads):
            if r:
                bad.append(r)
        checks.append(f"flag intervals over {len(fp)} flags of MacP(1,2,{flag_n})")
    return _report("spheres", n, checks, bad)


def suite_rp(n: int, threads: int = 1) -> dict:
    """Homology of the full complexes: ||MacP(1,n)|| matches RP^{n-1} over
    GF(2); ||MacP(2,n)|| matches the Schubert-cell oracle for n in {3, 4}."""
    bad = []
    checks = []
    poset1 = fl.macp1_poset(n)
    prof1 = hm.betti_gf2(ps.order_complex(poset1))
    want1 = tuple([1] * n)
    checks.append(f"macp1 betti {list(prof1.betti)}")
    if prof1.betti != want1:
        bad.append(f"rp:{prof1.betti}!={want1}")
    if n in (3, 4):
        poset2 = macp2(n).to_poset()
        prof2 = hm.betti_gf2(ps.order_complex(poset2))
        want2 = hm.schubert_gr2_betti(n)
        checks.append(f"macp2 betti {list(prof2.betti)} vs schubert {list(want2)}")
        if prof2.betti != want2:
            bad.append(f"grassmannian:{prof2.betti}!={want2}")
    return _report("rp", n, checks, bad)


def suite_flags_all(n: int, seed: int = 0, budget: int = 10**6, threads: int = 1) -> dict:
    """Flag poset properties: counts, graded ranks, thinness, total
    semimodularity (n <= 3), the anchored embedding biconditional and
    cover crosscheck (n = 3), nu round trips, and boundary paths (n = 3)."""
    fp = macp12(n)
    poset = macp2(n)
    bad = []
    checks = []

    want = sum(2 * m.p for m in poset.elements)
    checks.append(f"flag count {len(fp)}")
    if len(fp) != want:
        bad.append(f"count:{len(fp)}!={want}")

    heights = [None] * len(fp)
    for i in sorted(range(len(fp)), key=lambda i: fp.rank[i]):
        heights[i] = max([heights[k] + 1 for k in fp.covers_down[i]], default=0)
    for i, f in enumerate(fp.flags):
        if heights[i] != fp.rank[i]:
            bad.append(f"flag-rank:{f.key}")
    checks.append("flag rank h(M)+h_M(N) equals graded height")

    for i in range(len(fp)):
        for j in range(len(fp)):
            if fp.up[j] >> i & 1 and fp.rank[i] - fp.rank[j] == 2:
                between = sum(
                    1
                    for k in range(len(fp))
                    if k not in (i, j) and fp.up[j] >> k & 1 and fp.up[k] >> i & 1
                )
                if between != 2:
                    bad.append(f"flag-thin:{fp.flags[j].key}<{fp.flags[i].key}")
    for i, f in enumerate(fp.flags):
        if fp.rank[i] == 1:
            atoms = [k for k in fp.downset_idx(i) if fp.rank[k] == 0]
            if len(atoms) != 2:
                bad.append(f"flag-thin-bottom:{f.key}")
    checks.append("flag thinness (length-2 intervals)")

    if n <= 3:
        coverup_mask = [0] * len(fp)
        for i in range(len(fp)):
            for j in fp.covers_up[i]:
                coverup_mask[i] |= 1 << j
        down_masks = [0] * len(fp)
        for a in range(len(fp)):
            bits = fp.up[a]
            while bits:
                low = bits & -bits
                down_masks[low.bit_length() - 1] |= 1 << a
                bits ^= low
        for zi in range(len(fp)):
            bits = fp.up[zi] & ~(1 << zi)
            while bits:
                low = bits & -bits
                yi = low.bit_length() - 1
                bits ^= low
                inside = [u for u in fp.covers_up[zi] if fp.up[u] >> yi & 1]
                for a in range(len(inside)):
                    for b in range(a + 1, len(inside)):
                        u, v = inside[a], inside[b]
                        if coverup_mask[u] & coverup_mask[v] & down_masks[yi] == 0:
                            bad.append(f"flag-semimodular:{fp.flags[zi].key}")
        checks.append("flag interval total semimodularity")

    if n == 3:
        np1 = macp2(n + 1)
        tested = 0
        for f0 in fp.flags:
            if f0.M.chi(1, 2) == 0:
                continue
            i0 = fp.idx(f0)
            upper = [fp.flags[j] for j in range(len(fp)) if fp.up[i0] >> j & 1]
            sigs = {f.key: fl.iota_signed(f, f0) for f in upper}
            for f1 in upper:
                for f2 in upper:
                    tested += 1
                    if fp.leq(f1, f2) != fl.signed_dominates(
                        sigs[f1.key], sigs[f2.key]
                    ):
                        bad.append(f"subp:{f0.key}|{f1.key}|{f2.key}")
            img = fl.iota_embed(f0)
            side_a = {fl.iota_anchored_om(g, f0).key for g in fp.flag_covers(f0)}
            side_b = {
                np1.elements[j].key for j in np1.covers_up[np1.idx(img)]
            }
            if side_a != side_b:
                bad.append(f"subp-covers:{f0.key}")
        checks.append(f"embedding biconditional on {tested} upper-set pairs")

        imgs = {}
        for f in fp.flags:
            if f.M.chi(1, 2) == 0:
                continue
            k = fl.iota_embed(f).key
            if k in imgs:
                bad.append(f"iota-injective:{k}")
            imgs[k] = f.key
            if om.delete_element(fl.iota_embed(f), n + 1) != f.M:
                bad.append(f"iota-restriction:{f.key}")
        checks.append("embedding injectivity and restriction")

    def cell_check(f):
        errs = []
        for y, x in fl.sample_flag_cell(f, 25 if n <= 4 else 5, seed):
            if fl.nu(y, x) != f:
                errs.append(f"flag-cell:{f.key}")
                break
        want_dim = f.M.h + fl.rank1_images(f.M).height(f.N)
        if fl.flag_cell_dimension(f) != want_dim:
            errs.append(f"flag-dim:{f.key}")
        return errs

    for errs in _map(cell_check, fp.flags, threads):
        bad.extend(errs)
    checks.append("nu round trips and cell dimensions")

    if n == 3:
        cnt = 0
        for f in fp.flags:
            i = fp.idx(f)
            for j in fp.covers_down[i]:
                try:
                    fl.flag_boundary_paths(f, fp.flags[j], 2, seed)
                except AssertionError:
                    bad.append(f"flag-boundary:{f.key}|{fp.flags[j].key}")
                cnt += 1
        checks.append(f"boundary paths on {cnt} flag cover pairs")
    return _report("flags-all", n, checks, bad)


def run_suite(name: str, n: int, seed: int = 0, budget: int = 10**6, threads: int = 1) -> dict:
    if name == "axioms":
        return suite_axioms(n, seed=seed, threads=threads)
    if name == "covers":
        return suite_covers(n, threads=threads)
    if name == "rank":
        return suite_rank(n, threads=threads)
    if name == "thin":
        return suite_thin(n, threads=threads)
    if name == "semimodular":
        return suite_semimodular(n, threads=threads)
    if name == "rao":
        return suite_rao(n, budget=budget, threads=threads)
    if name == "spheres":
        return suite_spheres(n, threads=threads, flag_n=min(n, 4) if n >= 2 else None)
    if name == "rp":
        return suite_rp(n, threads=threads)
    if name == "flags-all":
        return suite_flags_all(n, seed=seed, budget=budget, threads=threads)
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
