"""Finite poset machinery: Hasse diagrams, gradings, thinness, total
semimodularity, recursive atom orderings, and order complexes.

Posets store their order relation as per-element up-set bitmasks, so
interval extraction, cover computation (transitive reduction), and the
various checkers are word-parallel.  Element keys are arbitrary hashables.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BudgetExceeded,
    ElementNotFound,
    NotAPartialOrder,
    NotComparable,
    Violation,
)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Poset:
    """Finite poset over hashable element keys.

    ``up[i]`` is the bitmask of indices j with element_i <= element_j
    (including i itself).
    """

    def __init__(self, elements, up):
        self.elements = list(elements)
        self.up = list(up)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("duplicate elements")
        m = len(self.elements)
        self.down = [0] * m
        for i in range(m):
            for j in _bits(self.up[i]):
                self.down[j] |= 1 << i
        self._covers_up = None
        self._covers_down = None

    # -- basic queries ------------------------------------------------------
    def __len__(self):
        return len(self.elements)

    def __contains__(self, key):
        return key in self.index

    def idx(self, key) -> int:
        try:
            return self.index[key]
        except KeyError as exc:
            raise ElementNotFound(repr(key)) from exc

    def leq(self, a, b) -> bool:
        return bool(self.up[self.idx(a)] >> self.idx(b) & 1)

    def leq_idx(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def bottom(self):
        mins = [i for i in range(len(self)) if self.down[i] == 1 << i]
        return self.elements[mins[0]] if len(mins) == 1 else None

    def top(self):
        maxs = [i for i in range(len(self)) if self.up[i] == 1 << i]
        return self.elements[maxs[0]] if len(maxs) == 1 else None

    def minimal_idx(self):
        return [i for i in range(len(self)) if self.down[i] == 1 << i]

    # -- covers (transitive reduction) --------------------------------------
    def _compute_covers(self):
        m = len(self)
        cu = [[] for _ in range(m)]
        cd = [[] for _ in range(m)]
        for i in range(m):
            strict = self.up[i] & ~(1 << i)
            for j in _bits(strict):
                if strict & (self.down[j] & ~(1 << j)) == 0:
                    cu[i].append(j)
                    cd[j].append(i)
        self._covers_up = cu
        self._covers_down = cd

    def covers_up_idx(self, i: int):
        if self._covers_up is None:
            self._compute_covers()
        return self._covers_up[i]

    def covers_down_idx(self, i: int):
        if self._covers_down is None:
            self._compute_covers()
        return self._covers_down[i]

    def hasse(self):
        """Cover pairs (i, j) with element_i covered by element_j."""
        return [(i, j) for i in range(len(self)) for j in self.covers_up_idx(i)]

    def atoms(self):
        b = self.bottom()
        if b is None:
            raise ValueError("poset has no bottom")
        return [self.elements[j] for j in self.covers_up_idx(self.idx(b))]

    # -- subposets -----------------------------------------------------------
    def subposet(self, indices) -> "Poset":
        keep = list(indices)
        posmap = {old: new for new, old in enumerate(keep)}
        keepmask = 0
        for old in keep:
            keepmask |= 1 << old
        ups = []
        for old in keep:
            bits = self.up[old] & keepmask
            nb = 0
            for j in _bits(bits):
                nb |= 1 << posmap[j]
            ups.append(nb)
        return Poset([self.elements[i] for i in keep], ups)

    def to_json(self) -> dict:
        return {
            "elements": [str(e) for e in self.elements],
            "hasse": [[i, j] for i, j in self.hasse()],
            "bottom": self.index.get(self.bottom()),
            "top": self.index.get(self.top()),
        }


def build_poset(elements, leq) -> Poset:
    """Build and validate a poset from a decidable relation.

    Validation: reflexivity and antisymmetry on all pairs; transitivity
    exhaustively up to 500 elements, spot-checked on random triples beyond.
    Raises NotAPartialOrder with a witness.
    """
    elems = list(elements)
    m = len(elems)
    up = [0] * m
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            if leq(a, b):
                up[i] |= 1 << j
    for i in range(m):
        if not up[i] >> i & 1:
            raise NotAPartialOrder(f"not reflexive at {elems[i]!r}")
    for i in range(m):
        for j in _bits(up[i]):
            if j != i and up[j] >> i & 1:
                raise NotAPartialOrder(f"antisymmetry fails on ({elems[i]!r}, {elems[j]!r})")
    if m <= 500:
        for i in range(m):
            for j in _bits(up[i]):
                if up[j] & ~up[i]:
                    k = next(_bits(up[j] & ~up[i]))
                    raise NotAPartialOrder(
                        f"transitivity fails on ({elems[i]!r}, {elems[j]!r}, {elems[k]!r})"
                    )
    else:
        import random

        rng = random.Random(0)
        for _ in range(10000):
            i = rng.randrange(m)
            row = list(_bits(up[i]))
            j = rng.choice(row)
            if up[j] & ~up[i]:
                k = next(_bits(up[j] & ~up[i]))
                raise NotAPartialOrder(
                    f"transitivity fails on ({elems[i]!r}, {elems[j]!r}, {elems[k]!r})"
                )
    return Poset(elems, up)


def interval(P: Poset, x, y) -> Poset:
    """The induced subposet { z : x <= z <= y }, x as bottom, y as top."""
    i, j = P.idx(x), P.idx(y)
    if not P.leq_idx(i, j):
        raise NotComparable(f"{x!r} is not below {y!r}")
    members = [k for k in range(len(P)) if P.leq_idx(i, k) and P.leq_idx(k, j)]
    return P.subposet(members)


def height_ranks(P: Poset):
    """Longest-chain rank from the minimal elements.

    Returns {element: rank}. If some cover jumps more than one rank, the
    poset is not graded and a Violation("not-graded", (x, y)) is returned
    instead.
    """
    m = len(P)
    order = sorted(range(m), key=lambda i: bin(P.down[i]).count("1"))
    rank = [0] * m
    for i in order:
        below = [rank[k] + 1 for k in P.covers_down_idx(i)]
        rank[i] = max(below, default=0)
    for i in range(m):
        for j in P.covers_up_idx(i):
            if rank[j] != rank[i] + 1:
                return Violation(
                    "not-graded", (P.elements[i], P.elements[j]),
                    f"cover gap {rank[j] - rank[i]}",
                )
    return {P.elements[i]: rank[i] for i in range(m)}


def is_thin(P: Poset):
    """Every length-2 interval must have exactly four elements."""
    ranks = height_ranks(P)
    if isinstance(ranks, Violation):
        raise ValueError(f"thinness needs a graded poset: {ranks}")
    r = [ranks[e] for e in P.elements]
    for i in range(len(P)):
        strict = P.up[i] & ~(1 << i)
        for j in _bits(strict):
            if r[j] == r[i] + 2:
                between = P.up[i] & P.down[j] & ~(1 << i) & ~(1 << j)
                if bin(between).count("1") != 2:
                    return Violation(
                        "thin", (P.elements[i], P.elements[j]),
                        f"{bin(between).count('1')} elements strictly between",
                    )
    return None


def is_totally_semimodular(P: Poset):
    """Every interval semimodular: whenever u, v both cover z inside [x, y],
    some w <= y covers both.

    The quantification over x is redundant (only z <= y matters), so the
    check runs over pairs z <= y directly.
    """
    m = len(P)
    coverup_mask = []
    for i in range(m):
        mk = 0
        for j in P.covers_up_idx(i):
            mk |= 1 << j
        coverup_mask.append(mk)
    for zi in range(m):
        ups = P.up[zi] & ~(1 << zi)
        covers = P.covers_up_idx(zi)
        for yi in _bits(ups):
            inside = [u for u in covers if P.leq_idx(u, yi)]
            for a in range(len(inside)):
                for b in range(a + 1, len(inside)):
                    u, v = inside[a], inside[b]
                    common = coverup_mask[u] & coverup_mask[v] & P.down[yi]
                    if common == 0:
                        return Violation(
                            "totally-semimodular",
                            (P.elements[zi], P.elements[u], P.elements[v], P.elements[yi]),
                        )
    return None


# ---------------------------------------------------------------------------
# Recursive atom orderings


class _Budget:
    __slots__ = ("left",)

    def __init__(self, nodes: int):
        self.left = nodes

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("recursive atom ordering search budget exhausted")


class _RaoContext:
    """Shared state for a recursive-atom-ordering search inside a bounded
    graded poset: cover masks, the memo table, and the node budget."""

    def __init__(self, P: Poset, budget: int):
        self.P = P
        self.top = P.top()
        self.bottom = P.bottom()
        if self.top is None or self.bottom is None:
            raise ValueError("recursive atom ordering needs a bounded poset")
        self.ti = P.idx(self.top)
        self.budget = _Budget(budget)
        m = len(P)
        self.coverup = [P.covers_up_idx(i) for i in range(m)]
        self.coverdown_mask = []
        for i in range(m):
            mk = 0
            for j in P.covers_down_idx(i):
                mk |= 1 << j
            self.coverdown_mask.append(mk)
        self.memo = {}

    def exists(self, xi: int, forced: frozenset) -> bool:
        """Does [x, top] admit a recursive atom ordering whose first atoms
        are exactly the ``forced`` set (in some order)?"""
        key = (xi, forced)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.budget.spend()
        atoms = self.coverup[xi]
        if atoms == [self.ti]:
            self.memo[key] = True
            return True
        res = self._search(list(atoms), [], 0, forced)
        self.memo[key] = res
        return res

    def _cond2_ok(self, a: int, placed_mask: int, prefix_ups: int) -> bool:
        # for all placed a_i and all y >= a_i, a: exists z <= y covering a and
        # some placed atom
        P = self.P
        zmask = 0
        for z in self.coverup[a]:
            if self.coverdown_mask[z] & placed_mask:
                zmask |= P.up[z]
        common = P.up[a] & prefix_ups
        return common & ~zmask == 0

    def _forced_for(self, a: int, placed_mask: int) -> frozenset:
        return frozenset(
            z for z in self.coverup[a] if self.coverdown_mask[z] & placed_mask
        )

    def _search(self, atoms, order, placed_mask, forced) -> bool:
        if len(order) == len(atoms):
            return True
        remaining = [a for a in atoms if not placed_mask >> a & 1]
        pending = [a for a in remaining if a in forced]
        candidates = pending if pending else remaining
        prefix_ups = 0
        for a in order:
            prefix_ups |= self.P.up[a]
        for a in candidates:
            self.budget.spend()
            if order and not self._cond2_ok(a, placed_mask, prefix_ups):
                continue
            q = self._forced_for(a, placed_mask)
            if not self.exists(a, q):
                continue
            order.append(a)
            if self._search(atoms, order, placed_mask | 1 << a, forced):
                order.pop()
                return True
            order.pop()
        return False

    def verify_order(self, ordering) -> bool:
        """Check Definition conditions (i) and (ii) for a full given atom
        ordering of [bottom, top]."""
        P = self.P
        bi = P.idx(self.bottom)
        atoms = self.coverup[bi]
        idxs = [P.idx(a) for a in ordering]
        if sorted(idxs) != sorted(atoms):
            raise ValueError("ordering is not a permutation of the atoms")
        if atoms == [self.ti]:
            return True
        placed_mask = 0
        prefix_ups = 0
        for a in idxs:
            if placed_mask and not self._cond2_ok(a, placed_mask, prefix_ups):
                return False
            if not self.exists(a, self._forced_for(a, placed_mask)):
                return False
            placed_mask |= 1 << a
            prefix_ups |= P.up[a]
        return True

    def find_order(self):
        """Backtracking search at the root, returning the ordering found."""
        bi = self.P.idx(self.bottom)
        atoms = self.coverup[bi]
        if atoms == [self.ti]:
            return (self.top,)
        out = []
        if self._search_collect(atoms, out, 0):
            return tuple(self.P.elements[i] for i in out)
        return None

    def _search_collect(self, atoms, order, placed_mask) -> bool:
        if len(order) == len(atoms):
            return True
        remaining = [a for a in atoms if not placed_mask >> a & 1]
        prefix_ups = 0
        for a in order:
            prefix_ups |= self.P.up[a]
        for a in remaining:
            self.budget.spend()
            if order and not self._cond2_ok(a, placed_mask, prefix_ups):
                continue
            if not self.exists(a, self._forced_for(a, placed_mask)):
                continue
            order.append(a)
            if self._search_collect(atoms, order, placed_mask | 1 << a):
                return True
            order.pop()
        return False


def verify_recursive_atom_ordering(P: Poset, ordering, budget: int = 10**6) -> bool:
    """Definition check for a given atom ordering of a bounded graded poset.

    Condition (ii) is checked directly; condition (i) by backtracking
    search with memoization on (interval bottom, forced prefix set).
    Raises BudgetExceeded rather than answering False when the node budget
    runs out.
    """
    ranks = height_ranks(P)
    if isinstance(ranks, Violation):
        raise ValueError(f"not graded: {ranks}")
    return _RaoContext(P, budget).verify_order(list(ordering))


def find_recursive_atom_ordering(P: Poset, budget: int = 10**6):
    """Search for a recursive atom ordering; None if none exists.

    Totally semimodular posets short-circuit to the natural index order
    (every atom ordering works for them).
    """
    ranks = height_ranks(P)
    if isinstance(ranks, Violation):
        raise ValueError(f"not graded: {ranks}")
    if is_totally_semimodular(P) is None:
        b = P.bottom()
        if b is None or P.top() is None:
            raise ValueError("needs a bounded poset")
        return tuple(P.elements[j] for j in P.covers_up_idx(P.idx(b)))
    return _RaoContext(P, budget).find_order()


# ---------------------------------------------------------------------------
# Order complexes


@dataclass(frozen=True)
class SimplicialComplex:
    """Abstract simplicial complex given by its maximal faces.

    Faces are sorted tuples of vertex indices; the full face list per
    dimension is derived on demand.
    """

    vertices: tuple
    maximal: tuple

    @classmethod
    def from_faces(cls, vertices, faces) -> "SimplicialComplex":
        norm = {tuple(sorted(f)) for f in faces if f}
        maximal = [
            f for f in norm
            if not any(f != g and set(f) <= set(g) for g in norm)
        ]
        return cls(tuple(vertices), tuple(sorted(maximal)))

    @property
    def dim(self) -> int:
        return max((len(f) - 1 for f in self.maximal), default=-1)

    def faces_by_dim(self) -> dict:
        from itertools import combinations

        out = {}
        seen = set()
        for mf in self.maximal:
            for k in range(1, len(mf) + 1):
                for f in combinations(mf, k):
                    if f not in seen:
                        seen.add(f)
                        out.setdefault(k - 1, []).append(f)
        for k in out:
            out[k].sort()
        return out

    def f_vector(self) -> tuple:
        fb = self.faces_by_dim()
        return tuple(len(fb.get(d, ())) for d in range(self.dim + 1))

    def has_face(self, face) -> bool:
        fs = set(face)
        return any(fs <= set(mf) for mf in self.maximal)

    def to_json(self) -> list:
        return [list(f) for f in self.maximal]


def order_complex(P: Poset) -> SimplicialComplex:
    """Chains of P as simplices; maximal faces are the maximal chains."""
    m = len(P)
    chains = []
    stack = [(i, [i]) for i in P.minimal_idx()]
    while stack:
        i, chain = stack.pop()
        ups = P.covers_up_idx(i)
        if not ups:
            chains.append(tuple(sorted(chain)))
        else:
            for j in ups:
                stack.append((j, chain + [j]))
    if m and not chains:
        chains = [(i,) for i in range(m)]
    return SimplicialComplex.from_faces(tuple(P.elements), chains)
