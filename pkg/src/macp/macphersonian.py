"""MacP(2, n): enumeration, the weak-map order, covering relations, lower
intervals, recursive atom orderings, and exact cell samplers.

The poset is assembled with the chirotope comparator, which reduces the
all-pairs order computation to one integer Gram matrix: with S the matrix
of upper-triangle chirotope vectors, N <= M holds iff |<chi_N, chi_M>|
equals <chi_N, chi_N>.  The comparator is validated against the literal
covector definition exhaustively for n <= 4 (a tested property, not an
assumption).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import (
    ElementNotFound,
    LimitExceeded,
    NotACoatom,
    RealizationMismatch,
)
from .omcore import (
    NEG,
    POS,
    ZERO,
    Rank2OM,
    SignVector,
    as_columns,
    covectors,
    det2,
    mu,
    sign,
)
from .posets import Poset

ENUM_LIMIT = 6
FLAG_ENUM_LIMIT = 5
BOT = "0^"  # adjoined bottom element key


# ---------------------------------------------------------------------------
# Weak maps


def weak_leq(n_om: Rank2OM, m_om: Rank2OM) -> bool:
    """Literal weak-map test: every covector of N is below one of M's."""
    if n_om.n != m_om.n:
        raise ValueError("ground sets differ")
    mcovs = [c.masks() for c in covectors(m_om)]
    for x in covectors(n_om):
        xp, xn = x.masks()
        if not any(xp & ~yp == 0 and xn & ~yn == 0 for yp, yn in mcovs):
            return False
    return True


def weak_leq_chirotope(n_om: Rank2OM, m_om: Rank2OM) -> bool:
    """Fast comparator: some global sign eps makes chi_N agree with
    eps * chi_M wherever chi_N is nonzero."""
    if n_om.n != m_om.n:
        raise ValueError("ground sets differ")
    a = n_om.chi_vector()
    b = m_om.chi_vector()
    dot = sum(x * y for x, y in zip(a, b))
    return abs(dot) == sum(x * x for x in a)


# ---------------------------------------------------------------------------
# Enumeration


def _ordered_partitions(items):
    """All ordered partitions of ``items`` into nonempty blocks."""
    items = list(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in _ordered_partitions(rest):
        # first joins an existing block or forms a new one at any position
        for i, block in enumerate(sub):
            yield sub[:i] + (block + (first,),) + sub[i + 1:]
        for i in range(len(sub) + 1):
            yield sub[:i] + ((first,),) + sub[i:]


def _raw_configurations(n):
    """(loops, classes) presentations; the first non-loop is pinned to +
    (global sign flip is gauge)."""
    ground = list(range(1, n + 1))
    for r in range(0, n - 1):
        for loops in combinations(ground, r):
            loopset = frozenset(loops)
            non_loops = [e for e in ground if e not in loopset]
            first = non_loops[0]
            free = non_loops[1:]
            for part in _ordered_partitions(non_loops):
                if len(part) < 2:
                    continue
                for bits in range(1 << len(free)):
                    sig = {first: POS}
                    for k, e in enumerate(free):
                        sig[e] = POS if bits >> k & 1 else NEG
                    classes = tuple(
                        tuple(sorted((e, sig[e]) for e in block)) for block in part
                    )
                    yield loopset, classes


@dataclass
class MacP2Poset:
    """The weak-map poset of all rank-2 oriented matroids on [n]."""

    n: int
    elements: list
    index: dict
    up: list          # up-set bitmasks over element indices
    covers_up: list   # adjacency lists
    covers_down: list
    h: list

    def __len__(self):
        return len(self.elements)

    def idx(self, om) -> int:
        key = om.key if isinstance(om, Rank2OM) else str(om)
        try:
            return self.index[key]
        except KeyError as exc:
            raise ElementNotFound(key) from exc

    def leq(self, a, b) -> bool:
        return bool(self.up[self.idx(a)] >> self.idx(b) & 1)

    def downset_idx(self, i: int) -> list:
        return [k for k in range(len(self.elements)) if self.up[k] >> i & 1]

    def brute_covers_down(self, i: int) -> list:
        """Covers recomputed from the order relation (empty open interval)."""
        out = []
        for k in self.downset_idx(i):
            if k == i:
                continue
            between = (
                self.up[k]
                & self.down_mask(i)
                & ~(1 << k)
                & ~(1 << i)
            )
            if between == 0:
                out.append(k)
        return out

    def down_mask(self, i: int) -> int:
        cache = getattr(self, "_down_masks", None)
        if cache is None:
            m = len(self.elements)
            cache = [0] * m
            for a in range(m):
                bits = self.up[a]
                while bits:
                    low = bits & -bits
                    cache[low.bit_length() - 1] |= 1 << a
                    bits ^= low
            self._down_masks = cache
        return cache[i]

    def to_poset(self) -> Poset:
        return Poset([om.key for om in self.elements], list(self.up))

    def f_vector(self) -> list:
        top = max(self.h, default=0)
        out = [0] * (top + 1)
        for v in self.h:
            out[v] += 1
        return out


def enumerate_macp2(n: int, limit: int = ENUM_LIMIT) -> MacP2Poset:
    """Enumerate MacP(2, n) by canonical-key deduplication and build the
    weak-map poset."""
    if not 2 <= n <= limit:
        raise LimitExceeded(f"n={n} outside [2, {limit}]")
    seen = {}
    for loops, classes in _raw_configurations(n):
        om = Rank2OM.from_parts(n, loops, classes)
        seen.setdefault(om.key, om)
    elements = sorted(seen.values(), key=lambda om: (om.h, om.key))
    index = {om.key: i for i, om in enumerate(elements)}
    h = [om.h for om in elements]
    m = len(elements)

    s_mat = np.array([om.chi_vector() for om in elements], dtype=np.int64)
    gram = s_mat @ s_mat.T
    diag = np.diagonal(gram).copy()
    leq = np.abs(gram) == diag[:, None]
    anti = leq & leq.T
    if anti.sum() != m:  # antisymmetry: duplicates would show up here
        raise AssertionError("canonical deduplication failed: order not antisymmetric")

    up = []
    for i in range(m):
        row = 0
        for j in np.flatnonzero(leq[i]):
            row |= 1 << int(j)
        up.append(row)

    if m <= 4000:
        strict = leq & ~np.eye(m, dtype=bool)
        two = (strict.astype(np.float32) @ strict.astype(np.float32)) > 0
        cov = strict & ~two
        covers_up = [[int(j) for j in np.flatnonzero(cov[i])] for i in range(m)]
    else:
        # level-blocked covers; gradedness of the poset is certified at
        # small n by the rank suite
        by_h = {}
        for i, v in enumerate(h):
            by_h.setdefault(v, []).append(i)
        covers_up = [[] for _ in range(m)]
        for v, lows in sorted(by_h.items()):
            highs = by_h.get(v + 1, [])
            if not highs:
                continue
            sub = leq[np.ix_(lows, highs)]
            for a, i in enumerate(lows):
                covers_up[i] = [highs[b] for b in np.flatnonzero(sub[a])]
    covers_down = [[] for _ in range(m)]
    for i in range(m):
        for j in covers_up[i]:
            covers_down[j].append(i)
    return MacP2Poset(n, elements, index, up, covers_up, covers_down, h)


# ---------------------------------------------------------------------------
# Covering moves and the rank function


def rank_h(om: Rank2OM) -> int:
    """h(M) = (non-loop count) + (class count) - 4."""
    return om.h


def _cover_moves(om: Rank2OM):
    """Raw covering degenerations below om.

    CR1: turn one member of a class of size >= 2 into a loop.
    CR2: merge two cyclically adjacent classes (p >= 3); the wrap merge
    folds the last class onto the first through the antipode, flipping its
    signs.  Yields (kind, payload, raw_classes, raw_loops).
    """
    classes = om.classes
    p = om.p
    for k, cls in enumerate(classes):
        if len(cls) < 2:
            continue
        for e, _ in cls:
            new_classes = tuple(
                tuple(x for x in c if x[0] != e) if i == k else c
                for i, c in enumerate(classes)
            )
            yield ("CR1", e, new_classes, om.loops | {e})
    if p >= 3:
        for k in range(p - 1):
            merged = tuple(sorted(classes[k] + classes[k + 1]))
            raw = classes[:k] + (merged,) + classes[k + 2:]
            a_set = frozenset(e for e, _ in classes[k])
            b_set = frozenset(e for e, _ in classes[k + 1])
            yield ("CR2", (a_set, b_set), raw, om.loops)
        flipped = tuple((e, -s) for e, s in classes[-1])
        merged = tuple(sorted(classes[0] + flipped))
        raw = (merged,) + classes[1:-1]
        a_set = frozenset(e for e, _ in classes[0])
        b_set = frozenset(e for e, _ in classes[-1])
        yield ("CR2", (a_set, b_set), raw, om.loops)


def coatoms_CR(om: Rank2OM) -> list:
    """The oriented matroids covered by om, per the two covering moves."""
    out = {}
    for kind, _payload, classes, loops in _cover_moves(om):
        if len(classes) < 2:
            continue
        cov = Rank2OM.from_parts(om.n, loops, classes)
        out.setdefault(cov.key, cov)
    return [out[k] for k in sorted(out)]


def lower_interval(poset: MacP2Poset, om) -> Poset:
    """MacP(2,n)_{<= M} with an adjoined artificial bottom."""
    i = poset.idx(om)
    members = poset.downset_idx(i)
    keys = [BOT] + [poset.elements[k].key for k in members]
    pos = {k: t for t, k in enumerate(members)}
    ups = []
    full = (1 << len(keys)) - 1
    ups.append(full)  # bottom below everything
    for k in members:
        row = 0
        bits = poset.up[k]
        for j in members:
            if bits >> j & 1:
                row |= 1 << (pos[j] + 1)
        ups.append(row | 1 << (pos[k] + 1))
    return Poset(keys, ups)


# ---------------------------------------------------------------------------
# Affine-line labels and the recursive atom ordering


def _upper_normalize(col):
    x, y = col
    if y < 0 or (y == 0 and x < 0):
        return (-x, -y), NEG
    return (x, y), POS


def _class_geometry(om: Rank2OM, matrix):
    """Per-class upper-half directions and per-element signs, from an
    exact realization.  Raises RealizationMismatch."""
    cols = as_columns(matrix)
    if len(cols) != om.n or mu(matrix) != om:
        raise RealizationMismatch("matrix does not realize the oriented matroid")
    dirs = {}
    tau = {}
    for e in om.non_loops():
        d, t = _upper_normalize(cols[e - 1])
        k = om.class_of(e)
        if k in dirs:
            if det2(dirs[k], d) != 0:
                raise RealizationMismatch(f"class {k} not parallel in realization")
        else:
            dirs[k] = d
        tau[e] = t
    return cols, dirs, tau


def _label_order(om: Rank2OM, dirs) -> list:
    """Classes sorted by line angle in [0, pi), exactly."""
    import functools

    def cmp(a, b):
        d = det2(dirs[a], dirs[b])
        if d == 0:
            raise RealizationMismatch("distinct classes share a line")
        return -1 if d > 0 else 1

    return sorted(dirs, key=functools.cmp_to_key(cmp))


def affine_labels(om: Rank2OM, matrix):
    """Label non-loops 1..l by the order their lines meet an affine sweep
    line; same-class elements are consecutive, tie-broken by index.

    Returns (labels dict, class order list).
    """
    _cols, dirs, _tau = _class_geometry(om, matrix)
    order = _label_order(om, dirs)
    labels = {}
    nxt = 1
    for k in order:
        for e in sorted(om.class_members(k)):
            labels[e] = nxt
            nxt += 1
    return labels, order


def atom_om(om: Rank2OM, a: int, b: int) -> Rank2OM:
    """The atom below om supported on the basis pair {a, b}."""
    s = om.chi(a, b)
    if s == ZERO:
        raise ValueError(f"({a},{b}) is not a basis of the oriented matroid")
    loops = frozenset(range(1, om.n + 1)) - {a, b}
    return Rank2OM.from_parts(om.n, loops, (((a, POS),), ((b, s),)))


def rao_atom_pairs(om: Rank2OM, matrix) -> tuple:
    """Atoms of [0^, M] as element pairs (a, b), dictionary-ordered by
    their affine-line labels; labels are returned alongside."""
    labels, _ = affine_labels(om, matrix)
    pairs = []
    for a in om.non_loops():
        for b in om.non_loops():
            if a < b and om.chi(a, b) != ZERO:
                la, lb = labels[a], labels[b]
                if la > lb:
                    a2, b2, la, lb = b, a, lb, la
                else:
                    a2, b2 = a, b
                pairs.append(((la, lb), (a2, b2)))
    pairs.sort()
    return tuple(p for _, p in pairs), labels


def rao_ordering(om: Rank2OM, matrix) -> tuple:
    """Atom ordering of the lower interval from a fixed realization:
    dictionary order on label pairs (Prop.-style construction).

    Returns the atoms as canonical keys, matching lower_interval elements.
    """
    pairs, _labels = rao_atom_pairs(om, matrix)
    return tuple(atom_om(om, a, b).key for a, b in pairs)


# ---------------------------------------------------------------------------
# Cell charts and samplers


@dataclass(frozen=True)
class CellChart:
    """Chart data for the open cell of M: anchor basis pair pinned to the
    coordinate axes, remaining classes split into the two angle blocks."""

    om: "Rank2OM"
    anchor: tuple          # (a, b) element pair pinned to e1, e2 directions
    classes: tuple         # gauge-rotated presentation, a's class first
    split: int             # position (1-based) of b's class in `classes`
    n1: int                # classes strictly between angle 0 and pi/2
    n2: int                # classes strictly between pi/2 and pi

    @property
    def dimension(self) -> int:
        return self.om.h

    @property
    def free_angles(self) -> int:
        return self.n1 + self.n2

    @property
    def free_radii(self) -> int:
        return self.om.l - 2


def chart(om: Rank2OM) -> CellChart:
    """Chart with anchor (1, 2) when that is a basis, else the first basis
    pair in lexicographic order."""
    if om.chi(1, 2) != ZERO:
        a, b = 1, 2
    else:
        a, b = next(
            (i, j)
            for i in range(1, om.n + 1)
            for j in range(i + 1, om.n + 1)
            if om.chi(i, j) != ZERO
        )
    ka = om.class_of(a)
    seq = list(om.classes)
    seq = seq[ka - 1:] + [tuple((e, -s) for e, s in c) for c in seq[: ka - 1]]
    sig = {e: s for cls in seq for e, s in cls}
    if sig[a] == NEG:
        seq = [tuple((e, -s) for e, s in c) for c in seq]
    classes = tuple(tuple(sorted(c)) for c in seq)
    split = next(
        k for k, cls in enumerate(classes, start=1) if any(e == b for e, _ in cls)
    )
    return CellChart(
        om=om,
        anchor=(a, b),
        classes=classes,
        split=split,
        n1=split - 2,
        n2=len(classes) - split,
    )


def _sample_rng(seed: int, key: str, idx: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{key}|{idx}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _distinct_unit_fractions(rng: random.Random, k: int) -> list:
    out = set()
    while len(out) < k:
        out.add(Fraction(rng.randint(1, 2**24 - 1), 2**24))
    return sorted(out)


def _chart_columns(ch: CellChart, rng: random.Random):
    """One sampled point of the open cell: exact columns plus the class
    directions and per-element signs used."""
    om = ch.om
    p = len(ch.classes)
    dirs = {1: (Fraction(1), Fraction(0)), ch.split: (Fraction(0), Fraction(1))}
    block1 = [k for k in range(2, ch.split)]
    block2 = [k for k in range(ch.split + 1, p + 1)]
    for k, u in zip(block1, _distinct_unit_fractions(rng, len(block1))):
        t = u / (1 - u)
        dirs[k] = (Fraction(1), t)
    desc = list(reversed(_distinct_unit_fractions(rng, len(block2))))
    for k, u in zip(block2, desc):
        s = u / (1 - u)
        dirs[k] = (Fraction(-1), s)
    a, b = ch.anchor
    sig = {}
    pos = {}
    for k, cls in enumerate(ch.classes, start=1):
        for e, s in cls:
            sig[e] = s
            pos[e] = k
    cols = []
    for e in range(1, om.n + 1):
        if e in om.loops:
            cols.append((Fraction(0), Fraction(0)))
            continue
        if e in (a, b):
            r = Fraction(1)
        else:
            r = Fraction(rng.randint(1, 2**20 - 1), 2**18)  # in (0, 4)
        d = dirs[pos[e]]
        cols.append((sig[e] * r * d[0], sig[e] * r * d[1]))
    return cols, dirs, sig, pos


def _matrix_of(cols) -> tuple:
    return (tuple(c[0] for c in cols), tuple(c[1] for c in cols))


def sample_cell(om: Rank2OM, count: int, seed: int) -> list:
    """Deterministic exact samples of the open cell; mu of every returned
    matrix equals om."""
    ch = chart(om)
    out = []
    for idx in range(count):
        rng = _sample_rng(seed, om.key, idx)
        cols, _, _, _ = _chart_columns(ch, rng)
        out.append(_matrix_of(cols))
    return out


def _match_move(om: Rank2OM, face: Rank2OM):
    for kind, payload, classes, loops in _cover_moves(om):
        if len(classes) < 2:
            continue
        if Rank2OM.from_parts(om.n, loops, classes) == face:
            return kind, payload
    raise NotACoatom(f"{face.key} is not a covering face of {om.key}")


def _rotate(col, s: Fraction):
    """Multiply by [[1, -s], [s, 1]]: rotation by arctan(s) up to positive
    scale, so all determinant signs transform exactly."""
    x, y = col
    return (x - s * y, s * x + y)


def perturb_once(om: Rank2OM, face: Rank2OM, matrix, eps: Fraction):
    """One epsilon-perturbation of a face realization into om's open cell."""
    return boundary_perturbations(om, face, matrix, [eps])[0]


def boundary_perturbations(om: Rank2OM, face: Rank2OM, matrix, epsilons) -> list:
    """Perturb one exact realization of ``face`` back into om's open cell,
    one matrix per epsilon.

    CR1 faces re-inflate the collapsed column along its parallel partner;
    CR2 faces re-split the merged class by an exact shear-rotation scaled
    to stay inside the adjacent angular gaps.
    """
    kind, payload = _match_move(om, face)
    cols = list(as_columns(matrix))
    out = []
    if kind == "CR1":
        i = payload
        partner = min(om.class_members(om.class_of(i)) - {i})
        rel = om.sign_of(i) * om.sign_of(partner)
        for eps in epsilons:
            new = list(cols)
            new[i - 1] = (
                eps * rel * cols[partner - 1][0],
                eps * rel * cols[partner - 1][1],
            )
            out.append(_matrix_of(new))
        return out
    a_set, b_set = payload
    a_star, b_star = min(a_set), min(b_set)
    d = cols[a_star - 1]
    tau = {}
    for e in a_set | b_set:
        u = cols[e - 1]
        if det2(d, u) != 0:
            raise RealizationMismatch("merged class not aligned in face realization")
        tau[e] = sign(d[0] * u[0] + d[1] * u[1])
    outside = [
        e for e in face.non_loops() if e not in a_set and e not in b_set
    ]
    # global sign of the face realization relative to chi_M: the matrix
    # realizes eps * chi_M on every pair outside the merged classes
    witness = outside[0]
    eps_global = sign(det2(cols[a_star - 1], cols[witness - 1])) * om.chi(
        a_star, witness
    )
    s_dir = eps_global * om.chi(a_star, b_star) * tau[a_star] * tau[b_star]
    bound = Fraction(1)
    for bb in b_set:
        u = cols[bb - 1]
        for cc in outside:
            v = cols[cc - 1]
            dot = u[0] * v[0] + u[1] * v[1]
            det = det2(u, v)
            if dot != 0:
                bound = min(bound, abs(det) / abs(dot))
    safe = bound / 2
    for eps in epsilons:
        s = s_dir * safe * eps
        new = list(cols)
        for bb in b_set:
            new[bb - 1] = _rotate(cols[bb - 1], s)
        out.append(_matrix_of(new))
    return out


def cover_chain(top: Rank2OM, bottom: Rank2OM) -> list:
    """A saturated chain bottom = Z_0 < Z_1 < ... < Z_r = top of covering
    moves, found by descending through coatoms."""
    if top == bottom:
        return [top]
    if not weak_leq_chirotope(bottom, top):
        raise NotACoatom(f"{bottom.key} is not below {top.key}")
    for c in coatoms_CR(top):
        if weak_leq_chirotope(bottom, c):
            return cover_chain(c, bottom) + [top]
    raise NotACoatom(f"no covering chain from {bottom.key} to {top.key}")


def sample_boundary(om: Rank2OM, face: Rank2OM, count: int, seed: int) -> list:
    """Sample the face's own cell and certify each sample as a boundary
    limit of om's cell: the epsilon-perturbations at 2^-1 .. 2^-10 must all
    map back onto om under mu."""
    _match_move(om, face)
    epsilons = [Fraction(1, 2**k) for k in range(1, 11)]
    samples = sample_cell(face, count, seed)
    for mat in samples:
        for pert in boundary_perturbations(om, face, mat, epsilons):
            got = mu(pert)
            if got != om:
                raise AssertionError(
                    f"boundary perturbation left the cell: {got.key} != {om.key}"
                )
    return samples
