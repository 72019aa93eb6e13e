"""Exact rank-1 and rank-2 oriented matroids on the labeled ground set [n].

Elements are labeled 1..n throughout.  A rank-2 oriented matroid is stored
as a loop set plus an angular sequence of signed parallel/anti-parallel
classes; the induced chirotope for i in class a and j in class b is

    chi(i, j) = sigma_i * sigma_j * sign(b - a)

and zero when a == b or either element is a loop.  Two class presentations
describe the same oriented matroid {+chi, -chi} exactly when they differ by
the dihedral gauge group generated by

  * cyclic shift: move the first class to the end and flip its signs
    (rotating the realization past the angle-pi boundary), and
  * reversal: reverse the class order keeping signs (chi -> -chi);

the group has order 4p (8 when p == 2, where it includes the one-sided
class flip).  Canonical keys minimize a fixed serialization over this
orbit, so equality of keys is equality of oriented matroids.

All arithmetic on realizations is exact (fractions.Fraction); no sign is
ever decided in floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import (
    InvalidChirotope,
    LoopElement,
    RankDeficient,
    Violation,
)

POS, ZERO, NEG = 1, 0, -1
_SIGN_CHAR = {POS: "+", NEG: "-", ZERO: "0"}
_CHAR_SIGN = {"+": POS, "-": NEG, "0": ZERO}


def sign(x) -> int:
    """Exact sign of a rational or integer."""
    if x > 0:
        return POS
    if x < 0:
        return NEG
    return ZERO


# ---------------------------------------------------------------------------
# Sign vectors


@dataclass(frozen=True)
class SignVector:
    """A length-n word over {-, 0, +}, indexed by elements 1..n."""

    entries: tuple

    def __post_init__(self):
        if any(e not in (POS, ZERO, NEG) for e in self.entries):
            raise ValueError("sign vector entries must be -1, 0, or 1")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __call__(self, i: int) -> int:
        return self.entries[i - 1]

    def support(self) -> frozenset:
        return frozenset(i + 1 for i, e in enumerate(self.entries) if e != ZERO)

    def is_zero(self) -> bool:
        return all(e == ZERO for e in self.entries)

    def __neg__(self) -> "SignVector":
        return SignVector(tuple(-e for e in self.entries))

    def compose(self, other: "SignVector") -> "SignVector":
        """X o Y: X(e) where nonzero, else Y(e)."""
        return SignVector(
            tuple(x if x != ZERO else y for x, y in zip(self.entries, other.entries))
        )

    def dominated_by(self, other: "SignVector") -> bool:
        """Componentwise 0 < +, 0 < - order: self <= other."""
        return all(x == ZERO or x == y for x, y in zip(self.entries, other.entries))

    def masks(self) -> tuple:
        """(positive bitmask, negative bitmask), bit i-1 for element i."""
        pos = neg = 0
        for i, e in enumerate(self.entries):
            if e == POS:
                pos |= 1 << i
            elif e == NEG:
                neg |= 1 << i
        return pos, neg

    @classmethod
    def zero(cls, n: int) -> "SignVector":
        return cls((ZERO,) * n)

    @classmethod
    def from_string(cls, word: str) -> "SignVector":
        try:
            return cls(tuple(_CHAR_SIGN[c] for c in word))
        except KeyError as exc:
            raise ValueError(f"bad sign character in {word!r}") from exc

    def __str__(self) -> str:
        return "".join(_SIGN_CHAR[e] for e in self.entries)


# ---------------------------------------------------------------------------
# Chirotopes


def _tri_index(n: int, i: int, j: int) -> int:
    # upper triangle, row-major, 1 <= i < j <= n
    return (i - 1) * (2 * n - i) // 2 + (j - i - 1)


@dataclass(frozen=True)
class Chirotope2:
    """Alternating sign assignment on ordered pairs, stored as the strict
    upper triangle in row-major order."""

    n: int
    signs: tuple

    def __post_init__(self):
        if len(self.signs) != self.n * (self.n - 1) // 2:
            raise ValueError("upper triangle has wrong length")
        if any(s not in (POS, ZERO, NEG) for s in self.signs):
            raise ValueError("chirotope values must be -1, 0, or 1")

    def chi(self, i: int, j: int) -> int:
        if i == j:
            return ZERO
        if i < j:
            return self.signs[_tri_index(self.n, i, j)]
        return -self.signs[_tri_index(self.n, j, i)]

    def is_zero(self) -> bool:
        return all(s == ZERO for s in self.signs)

    def negate(self) -> "Chirotope2":
        return Chirotope2(self.n, tuple(-s for s in self.signs))

    def to_string(self) -> str:
        word = "".join(_SIGN_CHAR[s] for s in self.signs)
        return f"n={self.n};chi={word}"

    @classmethod
    def from_string(cls, text: str) -> "Chirotope2":
        m = re.fullmatch(r"n=(\d+);chi=([+\-0]*)", text.strip())
        if not m:
            raise ValueError(f"bad chirotope format: {text!r}")
        n = int(m.group(1))
        return cls(n, tuple(_CHAR_SIGN[c] for c in m.group(2)))

    @classmethod
    def from_pairs(cls, n: int, values: dict) -> "Chirotope2":
        signs = [ZERO] * (n * (n - 1) // 2)
        for (i, j), s in values.items():
            if i < j:
                signs[_tri_index(n, i, j)] = s
            else:
                signs[_tri_index(n, j, i)] = -s
        return cls(n, tuple(signs))


def validate_grassmann_plucker(chi: Chirotope2):
    """Rank-2 Grassmann-Pluecker check over all tuples of [n]^4.

    For each (x2, y0, y1, y2) the three products

        chi(y0,x2)chi(y1,y2), -chi(y1,x2)chi(y0,y2), chi(y2,x2)chi(y0,y1)

    must be all zero or contain both signs.  Returns the first violating
    tuple as a Violation, or None.
    """
    n = chi.n
    c = chi.chi
    rng = range(1, n + 1)
    for x2 in rng:
        for y0 in rng:
            for y1 in rng:
                for y2 in rng:
                    t0 = c(y0, x2) * c(y1, y2)
                    t1 = -c(y1, x2) * c(y0, y2)
                    t2 = c(y2, x2) * c(y0, y1)
                    has_pos = t0 > 0 or t1 > 0 or t2 > 0
                    has_neg = t0 < 0 or t1 < 0 or t2 < 0
                    if has_pos != has_neg:
                        return Violation(
                            "grassmann-plucker",
                            (x2, y0, y1, y2),
                            f"terms ({t0},{t1},{t2})",
                        )
    return None


# ---------------------------------------------------------------------------
# Rank-2 oriented matroids


def _serialize_classes(classes) -> tuple:
    # comparison key: within a class, (sign-rank, element) with + before -,
    # so the canonical representative favors positive low elements
    return tuple(tuple((0 if s == POS else 1, e) for e, s in cls) for cls in classes)


def _flip(cls) -> tuple:
    return tuple((e, -s) for e, s in cls)


def _gauge_orbit(classes):
    """All 4p presentations of the same {+chi, -chi} pair."""
    p = len(classes)
    seq = list(classes)
    for _ in range(2 * p):  # shift p times = global sign flip
        yield tuple(seq)
        yield tuple(reversed(seq))
        seq = seq[1:] + [_flip(seq[0])]


@dataclass(frozen=True, eq=False)
class Rank2OM:
    """Canonical rank-2 oriented matroid: loops + signed angular classes.

    Instances must be built through ``from_parts`` (or the module
    constructors), which canonicalizes over the gauge orbit; ``key`` is the
    canonical text serialization and defines equality.
    """

    n: int
    loops: frozenset
    classes: tuple  # tuple of tuples of (element, sign), elements ascending
    key: str

    @classmethod
    def from_parts(cls, n: int, loops, classes) -> "Rank2OM":
        loops = frozenset(loops)
        norm = tuple(tuple(sorted(c)) for c in classes)
        if len(norm) < 2:
            raise RankDeficient("rank 2 needs at least two parallel classes")
        covered = set()
        for c in norm:
            if not c:
                raise ValueError("empty parallel class")
            for e, s in c:
                if s not in (POS, NEG) or e in covered or e in loops:
                    raise ValueError("bad class data")
                covered.add(e)
        if covered != set(range(1, n + 1)) - loops:
            raise ValueError("classes must cover the non-loops")
        best = min(_gauge_orbit(norm), key=_serialize_classes)
        key = _render_key(n, loops, best)
        return cls(n, loops, best, key)

    # -- identity ----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Rank2OM) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    # -- structure ---------------------------------------------------------
    @property
    def p(self) -> int:
        """Number of parallel/anti-parallel classes."""
        return len(self.classes)

    @property
    def l(self) -> int:
        """Number of non-loops."""
        return self.n - len(self.loops)

    @property
    def h(self) -> int:
        """Cell dimension / poset rank: l + p - 4."""
        return self.l + self.p - 4

    def non_loops(self) -> tuple:
        return tuple(sorted(set(range(1, self.n + 1)) - self.loops))

    def class_of(self, i: int) -> int:
        """1-based angular position of i's class; LoopElement for loops."""
        pos = self._positions().get(i)
        if pos is None:
            raise LoopElement(f"element {i} is a loop")
        return pos

    def sign_of(self, i: int) -> int:
        self.class_of(i)
        return self._sig()[i]

    def class_members(self, k: int) -> frozenset:
        return frozenset(e for e, _ in self.classes[k - 1])

    def _positions(self) -> dict:
        cache = self.__dict__.get("_pos_cache")
        if cache is None:
            cache = {}
            for k, cls in enumerate(self.classes, start=1):
                for e, _ in cls:
                    cache[e] = k
            object.__setattr__(self, "_pos_cache", cache)
        return cache

    def _sig(self) -> dict:
        cache = self.__dict__.get("_sig_cache")
        if cache is None:
            cache = {}
            for cls in self.classes:
                for e, s in cls:
                    cache[e] = s
            object.__setattr__(self, "_sig_cache", cache)
        return cache

    def chi(self, i: int, j: int) -> int:
        pos, sig = self._positions(), self._sig()
        if i == j or i in self.loops or j in self.loops:
            return ZERO
        a, b = pos[i], pos[j]
        if a == b:
            return ZERO
        return sig[i] * sig[j] * sign(b - a)

    def chirotope(self) -> Chirotope2:
        signs = [
            self.chi(i, j) for i in range(1, self.n + 1) for j in range(i + 1, self.n + 1)
        ]
        return Chirotope2(self.n, tuple(signs))

    def chi_vector(self) -> tuple:
        cache = self.__dict__.get("_chivec_cache")
        if cache is None:
            cache = self.chirotope().signs
            object.__setattr__(self, "_chivec_cache", cache)
        return cache

    def to_string(self) -> str:
        return self.key

    @classmethod
    def from_string(cls, text: str) -> "Rank2OM":
        m = re.fullmatch(r"n=(\d+);loops=([\d,]*);classes=((?:\[[^\]]+\])+)", text.strip())
        if not m:
            raise ValueError(f"bad OM format: {text!r}")
        n = int(m.group(1))
        loops = frozenset(int(t) for t in m.group(2).split(",") if t)
        classes = []
        for block in re.findall(r"\[([^\]]+)\]", m.group(3)):
            members = []
            for tok in block.split():
                s = POS if tok[0] == "+" else NEG
                members.append((int(tok[1:]), s))
            classes.append(tuple(members))
        return cls.from_parts(n, loops, classes)

    def __repr__(self):
        return f"Rank2OM({self.key!r})"


def _render_key(n: int, loops, classes) -> str:
    loop_part = ",".join(str(e) for e in sorted(loops))
    blocks = "".join(
        "[" + " ".join(f"{_SIGN_CHAR[s]}{e}" for e, s in cls) + "]" for cls in classes
    )
    return f"n={n};loops={loop_part};classes={blocks}"


# ---------------------------------------------------------------------------
# Realizations and the mu map


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"rational expected, got {type(x).__name__}: float inputs are refused")


def as_columns(matrix) -> tuple:
    """2 x n matrix (two rows) -> tuple of n exact column pairs."""
    r1, r2 = matrix
    if len(r1) != len(r2):
        raise ValueError("rows of unequal length")
    return tuple((_to_fraction(a), _to_fraction(b)) for a, b in zip(r1, r2))


def det2(u, v) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def chirotope_from_vectors(columns) -> Chirotope2:
    """chi(i, j) = sign det(v_i, v_j), exactly.  RankDeficient if all zero."""
    cols = tuple((_to_fraction(x), _to_fraction(y)) for x, y in columns)
    n = len(cols)
    if n < 2:
        raise RankDeficient("need at least two columns")
    signs = [sign(det2(cols[i], cols[j])) for i in range(n) for j in range(i + 1, n)]
    chi = Chirotope2(n, tuple(signs))
    if chi.is_zero():
        raise RankDeficient("all 2x2 determinants vanish")
    return chi


def canonical_form(chi: Chirotope2) -> Rank2OM:
    """Reconstruct loops, angular class order, and signs from a chirotope.

    The class containing the smallest non-loop is placed first; remaining
    classes are sorted by the exact angular comparison derived from chi.
    Canonicalization over the gauge orbit then removes the choice of cut.
    """
    if chi.is_zero():
        raise InvalidChirotope("chirotope is identically zero (rank < 2)")
    bad = validate_grassmann_plucker(chi)
    if bad is not None:
        raise InvalidChirotope(str(bad))
    n = chi.n
    elements = range(1, n + 1)
    loops = frozenset(
        i for i in elements if all(chi.chi(i, j) == ZERO for j in elements)
    )
    non_loops = [i for i in elements if i not in loops]
    # classes: non-loops i, j are parallel/anti-parallel iff chi(i, j) == 0
    rep_of = {}
    groups = {}
    for i in non_loops:
        for r in groups:
            if chi.chi(i, r) == ZERO:
                rep_of[i] = r
                groups[r].append(i)
                break
        else:
            rep_of[i] = i
            groups[i] = [i]
    e1 = non_loops[0]
    k1 = rep_of[e1]
    others = [r for r in groups if r != k1]

    def upper(x: int) -> int:
        return chi.chi(e1, x)

    import functools

    def cmp(ra: int, rb: int) -> int:
        t = upper(ra) * upper(rb) * chi.chi(ra, rb)
        if t == 0:
            raise InvalidChirotope(f"parallelism not transitive at ({ra},{rb})")
        return -1 if t > 0 else 1

    others.sort(key=functools.cmp_to_key(cmp))
    b0 = others[0] if others else None

    def sigma(x: int) -> int:
        if rep_of[x] == k1:
            if b0 is None:  # p == 1 cannot happen: chi nonzero needs 2 classes
                raise InvalidChirotope("single parallel class")
            return chi.chi(x, b0) * chi.chi(e1, b0)
        return upper(x)

    classes = []
    for r in [k1] + others:
        classes.append(tuple((e, sigma(e)) for e in sorted(groups[r])))
    om = Rank2OM.from_parts(n, loops, classes)
    return om


def mu(matrix) -> Rank2OM:
    """Oriented matroid of the plane spanned by the rows of a 2 x n matrix."""
    return canonical_form(chirotope_from_vectors(as_columns(matrix)))


def realize_slots(om: Rank2OM) -> tuple:
    """Deterministic exact realization: class k gets direction (p+1-k, k).

    Directions have strictly increasing angles inside (0, pi/2], so the
    induced chirotope equals om's.  Returns a 2 x n matrix (two row tuples).
    """
    p = om.p
    cols = []
    for i in range(1, om.n + 1):
        if i in om.loops:
            cols.append((Fraction(0), Fraction(0)))
        else:
            k = om.class_of(i)
            s = om.sign_of(i)
            cols.append((Fraction(s * (p + 1 - k)), Fraction(s * k)))
    return (tuple(c[0] for c in cols), tuple(c[1] for c in cols))


# ---------------------------------------------------------------------------
# Covectors


def covectors(om: Rank2OM) -> frozenset:
    """Full covector set: zero, 2p cocircuits, 2p topes (4p + 1 vectors).

    Cocircuit at class k reads sigma_i * sign(class(i) - k); the tope for
    the arc after class k reads sigma_i * (+ if class(i) > k else -).
    """
    n, p = om.n, om.p
    pos, sig = om._positions(), om._sig()
    out = {SignVector.zero(n)}

    def vec(f) -> SignVector:
        ent = []
        for i in range(1, n + 1):
            if i in om.loops:
                ent.append(ZERO)
            else:
                ent.append(f(pos[i], sig[i]))
        return SignVector(tuple(ent))

    for k in range(1, p + 1):
        d = vec(lambda c, s, k=k: s * sign(c - k))
        out.add(d)
        out.add(-d)
    for k in range(0, p):
        t = vec(lambda c, s, k=k: s * (POS if c > k else NEG))
        out.add(t)
        out.add(-t)
    return frozenset(out)


def cocircuits(om: Rank2OM) -> frozenset:
    """The 2p covectors of minimal nonzero support (one +/- pair per class)."""
    n, p = om.n, om.p
    pos, sig = om._positions(), om._sig()
    out = set()
    for k in range(1, p + 1):
        ent = tuple(
            ZERO if i in om.loops else sig[i] * sign(pos[i] - k)
            for i in range(1, n + 1)
        )
        d = SignVector(ent)
        out.add(d)
        out.add(-d)
    return frozenset(out)


def validate_covector_axioms(vectors):
    """Check the four covector axioms; returns the first Violation or None.

    Order of checks: zero vector, negation closure, composition closure,
    elimination.
    """
    vs = list(vectors)
    if not vs:
        return Violation("zero", (), "empty collection")
    n = vs[0].n
    if any(v.n != n for v in vs):
        return Violation("zero", (), "mixed lengths")
    vset = set(vs)
    if SignVector.zero(n) not in vset:
        return Violation("zero", (), "zero vector missing")
    for x in vs:
        if -x not in vset:
            return Violation("negation", (str(x),), f"{-x} missing")
    for x in vs:
        for y in vs:
            if x.compose(y) not in vset:
                return Violation(
                    "composition", (str(x), str(y)), f"{x.compose(y)} missing"
                )
    for x in vs:
        for y in vs:
            if x == -y:
                continue
            for e in range(1, n + 1):
                if x(e) != ZERO and x(e) == -y(e):
                    if not _eliminates(vset, x, y, e, n):
                        return Violation(
                            "elimination", (str(x), str(y), e), "no eliminating Z"
                        )
    return None


def _eliminates(vset, x, y, e, n) -> bool:
    for z in vset:
        if z(e) != ZERO:
            continue
        ok = True
        for f in range(1, n + 1):
            xf, yf = x(f), y(f)
            zf = z(f)
            if xf == ZERO and yf == ZERO:
                if zf != ZERO:
                    ok = False
                    break
            elif POS in (xf, yf) and NEG not in (xf, yf):
                if zf != POS:
                    ok = False
                    break
            elif NEG in (xf, yf) and POS not in (xf, yf):
                if zf != NEG:
                    ok = False
                    break
        if ok:
            return True
    return False


def check_basis_orientation(om: Rank2OM):
    """Cryptomorphism check: chi against cocircuit products.

    For each non-loop x and the cocircuit pair vanishing on class(x), some
    global eps makes chi(e, x) = eps * D(e) for every non-loop e outside
    class(x).  Returns the first Violation or None.
    """
    cocs = list(cocircuits(om))
    for x in om.non_loops():
        kx = om.class_of(x)
        want = frozenset(om.non_loops()) - om.class_members(kx)
        d = next(c for c in cocs if c.support() == want)
        outside = [e for e in om.non_loops() if om.class_of(e) != kx]
        for eps in (POS, NEG):
            if all(om.chi(e, x) == eps * d(e) for e in outside):
                break
        else:
            return Violation("basis-orientation", (x,), f"cocircuit {d}")
    return None


# ---------------------------------------------------------------------------
# Reorientation, relabeling, classes, convexity


def reorient(om: Rank2OM, subset) -> Rank2OM:
    """Flip the sign of every non-loop element of ``subset``; loops ignored."""
    flip = set(subset) - om.loops
    classes = tuple(
        tuple((e, -s if e in flip else s) for e, s in cls) for cls in om.classes
    )
    return Rank2OM.from_parts(om.n, om.loops, classes)


def relabel(om: Rank2OM, perm) -> Rank2OM:
    """Relabel elements: chi_new(perm(i), perm(j)) = chi(i, j).

    ``perm`` maps 1..n to 1..n (dict or sequence indexed from 1).
    """
    if not isinstance(perm, dict):
        perm = {i: perm[i - 1] for i in range(1, om.n + 1)}
    if sorted(perm.values()) != list(range(1, om.n + 1)):
        raise ValueError("not a permutation of [n]")
    loops = frozenset(perm[e] for e in om.loops)
    classes = tuple(
        tuple(sorted((perm[e], s) for e, s in cls)) for cls in om.classes
    )
    return Rank2OM.from_parts(om.n, loops, classes)


def parallel_class(om: Rank2OM, i: int) -> frozenset:
    """P_M(i): parallel and anti-parallel elements merged."""
    return om.class_members(om.class_of(i))


def convex_hull(om: Rank2OM, subset) -> frozenset:
    """Literal reading of the convex-hull definition.

    i lies in the hull of S when every nonzero covector that is negative at
    i is negative somewhere on S.  Loops are always in the hull.
    """
    s = set(subset)
    covs = [c for c in covectors(om) if not c.is_zero()]
    out = set()
    for i in range(1, om.n + 1):
        if all(any(c(t) == NEG for t in s) for c in covs if c(i) == NEG):
            out.add(i)
    return frozenset(out)


def delete_element(om: Rank2OM, e: int) -> Rank2OM:
    """Delete one element; labels above e shift down by one."""

    def newlab(x):
        return x if x < e else x - 1

    loops = frozenset(newlab(x) for x in om.loops if x != e)
    classes = []
    for cls in om.classes:
        rest = tuple((newlab(x), s) for x, s in cls if x != e)
        if rest:
            classes.append(rest)
    if len(classes) < 2:
        raise RankDeficient("deletion drops the rank below 2")
    return Rank2OM.from_parts(om.n - 1, loops, classes)


# ---------------------------------------------------------------------------
# Rank-1 oriented matroids


@dataclass(frozen=True, eq=False)
class Rank1OM:
    """Covector triple {0, z, -z}; z stored lex-positive."""

    n: int
    z: SignVector

    @classmethod
    def from_vector(cls, z: SignVector) -> "Rank1OM":
        if z.is_zero():
            raise RankDeficient("rank-1 covector must be nonzero")
        for e in z.entries:
            if e != ZERO:
                if e == NEG:
                    z = -z
                break
        return cls(z.n, z)

    def covectors(self) -> frozenset:
        return frozenset({SignVector.zero(self.n), self.z, -self.z})

    @property
    def word(self) -> str:
        return str(self.z)

    def __eq__(self, other):
        return isinstance(other, Rank1OM) and self.z == other.z

    def __hash__(self):
        return hash(("r1", self.z))

    def __repr__(self):
        return f"Rank1OM({self.word!r})"


def rank1_leq(a: Rank1OM, b: Rank1OM) -> bool:
    """Weak-map order on rank-1 oriented matroids (domination mod +/-)."""
    return a.z.dominated_by(b.z) or a.z.dominated_by(-b.z)
