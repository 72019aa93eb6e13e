"""Rank-1 strong map images, the flag poset MacP(1,2,n), the embedding of
flag upper intervals into MacP(2,n+1), the flag atom ordering, and exact
flag cell samplers.

A flag (N, M) pairs a rank-1 oriented matroid {0, +/-z} with a rank-2 one
whose covector set contains z.  The flag order is the product of the two
weak-map orders.  The embedding adjoins element n+1 carrying z as its row
of chirotope values; its +/- representative is pinned by the convention
that the added vector lies in the closed upper half plane (elements 1, 2
sitting at the coordinate axes), and order comparisons are anchored to a
base flag because no single representative choice is coherent around
covector cycles.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import (
    ElementNotFound,
    EmptyBelowSet,
    InvalidFlag,
    LimitExceeded,
    NonUniqueMax,
    NotContained,
    RankDeficient,
)
from .omcore import (
    NEG,
    POS,
    ZERO,
    Chirotope2,
    Rank1OM,
    Rank2OM,
    SignVector,
    as_columns,
    canonical_form,
    covectors,
    det2,
    mu,
    rank1_leq,
    sign,
    validate_grassmann_plucker,
)
from .macphersonian import (
    BOT,
    MacP2Poset,
    _chart_columns,
    _matrix_of,
    _sample_rng,
    _upper_normalize,
    chart,
    cover_chain,
    enumerate_macp2,
    perturb_once,
    rao_atom_pairs,
    weak_leq_chirotope,
)
from .posets import Poset, build_poset, height_ranks


# ---------------------------------------------------------------------------
# Strong map images


def is_strong_image(n_om: Rank1OM, m_om: Rank2OM) -> bool:
    """V*(N) is contained in V*(M), i.e. z is a covector of M."""
    if n_om.n != m_om.n:
        raise ValueError("ground sets differ")
    return n_om.z in covectors(m_om)


@dataclass(frozen=True, eq=False)
class FlagOM:
    """A combinatorial flag (N, M)."""

    N: Rank1OM
    M: Rank2OM
    key: str

    @classmethod
    def make(cls, n_om: Rank1OM, m_om: Rank2OM) -> "FlagOM":
        if not is_strong_image(n_om, m_om):
            raise InvalidFlag(f"{n_om.word} is not a covector of {m_om.key}")
        return cls(n_om, m_om, f"flag;z={n_om.word};M={m_om.key}")

    @classmethod
    def from_string(cls, text: str) -> "FlagOM":
        if not text.startswith("flag;z="):
            raise ValueError(f"bad flag format: {text!r}")
        zpart, mpart = text[7:].split(";M=", 1)
        return cls.make(
            Rank1OM.from_vector(SignVector.from_string(zpart)),
            Rank2OM.from_string(mpart),
        )

    @property
    def n(self) -> int:
        return self.M.n

    def __eq__(self, other):
        return isinstance(other, FlagOM) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"FlagOM({self.key!r})"


def flag_leq(f1: FlagOM, f2: FlagOM) -> bool:
    """Product order: both coordinates below."""
    return rank1_leq(f1.N, f2.N) and weak_leq_chirotope(f1.M, f2.M)


@dataclass
class G1Poset:
    """G(1, M): rank-1 strong map images of M under weak maps."""

    M: Rank2OM
    elements: list
    poset: Poset
    heights: dict  # Rank1OM key word -> h_M(N)

    def height(self, n_om: Rank1OM) -> int:
        return self.heights[n_om.word]


def rank1_images(m_om: Rank2OM) -> G1Poset:
    """One element per +/- covector pair of M, ordered by domination."""
    pairs = {}
    for c in covectors(m_om):
        if not c.is_zero():
            r1 = Rank1OM.from_vector(c)
            pairs[r1.word] = r1
    elements = [pairs[w] for w in sorted(pairs)]
    poset = build_poset(elements, rank1_leq)
    ranks = height_ranks(poset)
    if not isinstance(ranks, dict):
        raise AssertionError(f"G(1,M) not graded: {ranks}")
    heights = {e.word: ranks[e] for e in elements}
    return G1Poset(m_om, elements, poset, heights)


def max_covector_below(m1: Rank2OM, z2: SignVector) -> SignVector:
    """The unique maximal nonzero covector of M1 below z2.

    EmptyBelowSet when nothing nonzero fits; NonUniqueMax if maximality is
    not unique (signals corrupted inputs, the lemma guarantees a maximum).
    """
    below = [
        c for c in covectors(m1) if not c.is_zero() and c.dominated_by(z2)
    ]
    if not below:
        raise EmptyBelowSet(f"no nonzero covector of {m1.key} below {z2}")
    maximal = [
        c for c in below
        if not any(c != d and c.dominated_by(d) for d in below)
    ]
    if len(maximal) != 1:
        raise NonUniqueMax(f"{len(maximal)} maximal covectors below {z2}")
    return maximal[0]


def nu(y_row, x_matrix) -> FlagOM:
    """Flag of a (line, plane) pair given by a 1 x n row inside the row
    space of a 2 x n matrix; exact containment check."""
    cols = as_columns(x_matrix)
    n = len(cols)
    y = tuple(Fraction(v) if not isinstance(v, Fraction) else v for v in y_row)
    if len(y) != n:
        raise ValueError("row length mismatch")
    if all(v == 0 for v in y):
        raise RankDeficient("row is zero, rank-1 part missing")
    basis = next(
        (
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if det2(cols[i], cols[j]) != 0
        ),
        None,
    )
    if basis is None:
        raise RankDeficient("matrix has rank below 2")
    i, j = basis
    d = det2(cols[i], cols[j])
    a1 = (y[i] * cols[j][1] - y[j] * cols[i][1]) / d
    a2 = (cols[i][0] * y[j] - cols[j][0] * y[i]) / d
    for e in range(n):
        if a1 * cols[e][0] + a2 * cols[e][1] != y[e]:
            raise NotContained("row is not in the row space of the matrix")
    n_om = Rank1OM.from_vector(SignVector(tuple(sign(v) for v in y)))
    return FlagOM.make(n_om, mu(x_matrix))


# ---------------------------------------------------------------------------
# Embedding into MacP(2, n+1)


def _chi_pos12(m_om: Rank2OM) -> Chirotope2:
    """The chirotope representative with chi(1,2) = + ({1,2} must be a
    basis)."""
    chi = m_om.chirotope()
    v = chi.chi(1, 2)
    if v == ZERO:
        raise InvalidFlag("{1,2} is not a basis")
    return chi if v == POS else chi.negate()


def _conventional_z(flag: FlagOM) -> SignVector:
    """The +/- representative of z pinned by the upper-half-plane rule for
    the adjoined vector: z(1) negative, or z(1) zero and z(2) positive."""
    z = flag.N.z
    if z(1) == NEG or (z(1) == ZERO and z(2) == POS):
        return z
    if z(1) == POS or (z(1) == ZERO and z(2) == NEG):
        return -z
    raise InvalidFlag("covector vanishes on the basis {1,2}")


def _extend_chirotope(chi: Chirotope2, zrep: SignVector) -> Chirotope2:
    n = chi.n
    values = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            values[(i, j)] = chi.chi(i, j)
        values[(i, n + 1)] = -zrep(i)  # chi'(n+1, i) = z(i)
    return Chirotope2.from_pairs(n + 1, values)


def iota_embed(flag: FlagOM) -> Rank2OM:
    """Adjoin element n+1 carrying the rank-1 covector of the flag.

    Requires {1, 2} to be a basis of M.  The result restricts to M on [n]
    and is Grassmann-Pluecker valid by rank-2 realizability.
    """
    ext = _extend_chirotope(_chi_pos12(flag.M), _conventional_z(flag))
    bad = validate_grassmann_plucker(ext)
    if bad is not None:
        raise InvalidFlag(f"extension fails validation: {bad}")
    return canonical_form(ext)


def _align_eps(chi0: Chirotope2, chi: Chirotope2) -> int:
    """The unique global sign with chi0 below eps * chi componentwise."""
    for eps in (POS, NEG):
        if all(a == ZERO or a == eps * b for a, b in zip(chi0.signs, chi.signs)):
            return eps
    raise InvalidFlag("chirotopes are not weak-map comparable")


def iota_signed(flag: FlagOM, anchor: FlagOM) -> Chirotope2:
    """Signed extension of a flag above ``anchor``, with representatives
    aligned to the anchor's conventional ones.

    On the upper set of the anchor these signed chirotopes compare
    componentwise exactly as the flags do.
    """
    if not flag_leq(anchor, flag):
        raise InvalidFlag("flag is not above the anchor")
    chi0 = _chi_pos12(anchor.M)
    eps = _align_eps(chi0, flag.M.chirotope())
    chi = flag.M.chirotope() if eps == POS else flag.M.chirotope().negate()
    z0 = _conventional_z(anchor)
    z = flag.N.z
    if z0.dominated_by(z):
        zrep = z
    elif z0.dominated_by(-z):
        zrep = -z
    else:
        raise InvalidFlag("rank-1 parts are not comparable")
    return _extend_chirotope(chi, zrep)


def signed_dominates(c1: Chirotope2, c2: Chirotope2) -> bool:
    """Componentwise domination of signed chirotopes (on-the-nose)."""
    return all(a == ZERO or a == b for a, b in zip(c1.signs, c2.signs))


def iota_anchored_om(flag: FlagOM, anchor: FlagOM) -> Rank2OM:
    """Canonical oriented matroid of the anchored signed extension."""
    ext = iota_signed(flag, anchor)
    return canonical_form(ext)


# ---------------------------------------------------------------------------
# The flag poset


@dataclass
class FlagPoset:
    n: int
    flags: list
    index: dict
    up: list
    covers_up: list
    covers_down: list
    rank: list  # h(M) + h_M(N)
    macp: MacP2Poset

    def __len__(self):
        return len(self.flags)

    def idx(self, f) -> int:
        key = f.key if isinstance(f, FlagOM) else str(f)
        try:
            return self.index[key]
        except KeyError as exc:
            raise ElementNotFound(key) from exc

    def leq(self, f1, f2) -> bool:
        return bool(self.up[self.idx(f1)] >> self.idx(f2) & 1)

    def downset_idx(self, i: int) -> list:
        return [k for k in range(len(self.flags)) if self.up[k] >> i & 1]

    def lower_interval(self, f) -> Poset:
        i = self.idx(f)
        members = self.downset_idx(i)
        keys = [BOT] + [self.flags[k].key for k in members]
        pos = {k: t for t, k in enumerate(members)}
        ups = [(1 << len(keys)) - 1]
        for k in members:
            row = 0
            bits = self.up[k]
            for j in members:
                if bits >> j & 1:
                    row |= 1 << (pos[j] + 1)
            ups.append(row)
        return Poset(keys, ups)

    def flag_covers(self, f) -> list:
        """Flags covering f."""
        return [self.flags[j] for j in self.covers_up[self.idx(f)]]

    def to_poset(self) -> Poset:
        return Poset([f.key for f in self.flags], list(self.up))


def flag_rank(flag: FlagOM) -> int:
    """h(M) + h_M(N)."""
    return flag.M.h + rank1_images(flag.M).height(flag.N)


def enumerate_macp12(n: int, limit: int = 5, macp: MacP2Poset | None = None) -> FlagPoset:
    """All flags (N, M) with M in MacP(2,n) and N a rank-1 image of M,
    under the product order."""
    if not 2 <= n <= limit:
        raise LimitExceeded(f"n={n} outside [2, {limit}]")
    if macp is None:
        macp = enumerate_macp2(n)
    flags = []
    ranks = []
    for m_om in macp.elements:
        g1 = rank1_images(m_om)
        for n_om in g1.elements:
            flags.append(FlagOM.make(n_om, m_om))
            ranks.append(m_om.h + g1.heights[n_om.word])
    order = sorted(range(len(flags)), key=lambda i: (ranks[i], flags[i].key))
    flags = [flags[i] for i in order]
    ranks = [ranks[i] for i in order]
    index = {f.key: i for i, f in enumerate(flags)}
    m = len(flags)

    mi = np.array([macp.idx(f.M) for f in flags])
    zmat = np.array([f.N.z.entries for f in flags], dtype=np.int64)
    zgram = zmat @ zmat.T
    zdiag = np.diagonal(zgram).copy()
    zdom = np.abs(zgram) == zdiag[:, None]
    mleq = np.zeros((len(macp), len(macp)), dtype=bool)
    for a in range(len(macp)):
        bits = macp.up[a]
        while bits:
            low = bits & -bits
            mleq[a, low.bit_length() - 1] = True
            bits ^= low
    leq = mleq[mi[:, None], mi[None, :]] & zdom
    if (leq & leq.T).sum() != m:
        raise AssertionError("flag order not antisymmetric")

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
        by_r = {}
        for i, v in enumerate(ranks):
            by_r.setdefault(v, []).append(i)
        covers_up = [[] for _ in range(m)]
        for v, lows in sorted(by_r.items()):
            highs = by_r.get(v + 1, [])
            if not highs:
                continue
            sub = leq[np.ix_(lows, highs)]
            for a, i in enumerate(lows):
                covers_up[i] = [highs[b] for b in np.flatnonzero(sub[a])]
    covers_down = [[] for _ in range(m)]
    for i in range(m):
        for j in covers_up[i]:
            covers_down[j].append(i)
    return FlagPoset(n, flags, index, up, covers_up, covers_down, ranks, macp)


# ---------------------------------------------------------------------------
# MacP(1, n): all rank-1 oriented matroids under weak maps


def rank1_all(n: int) -> list:
    """All rank-1 oriented matroids on [n] (sign vector pairs, nonempty
    support)."""
    out = {}
    for entries in product((NEG, ZERO, POS), repeat=n):
        if any(e != ZERO for e in entries):
            r1 = Rank1OM.from_vector(SignVector(entries))
            out[r1.word] = r1
    return [out[w] for w in sorted(out)]


def macp1_poset(n: int) -> Poset:
    return build_poset(rank1_all(n), rank1_leq)


# ---------------------------------------------------------------------------
# z-position machinery: angular step pattern and dual cone rays


def _rot90(v):
    return (-v[1], v[0])


def _rot270(v):
    return (v[1], -v[0])


def _class_data(m_om: Rank2OM, cols):
    """Upper-half direction, membership, and relative signs per class of M
    in an exact realization given by columns."""
    dirs = {}
    tau = {}
    for k in range(1, m_om.p + 1):
        members = sorted(m_om.class_members(k))
        rep = None
        for e in members:
            c = cols[e - 1]
            if c == (0, 0):
                raise RankDeficient(f"non-loop {e} realized as zero")
            if rep is None:
                rep, _ = _upper_normalize(c)
                dirs[k] = rep
            if det2(rep, c) != 0:
                raise RankDeficient(f"class {k} not parallel in realization")
            tau[e] = sign(rep[0] * c[0] + rep[1] * c[1])
    import functools

    def cmp(a, b):
        d = det2(dirs[a], dirs[b])
        if d == 0:
            raise RankDeficient("distinct classes share a line")
        return -1 if d > 0 else 1

    order = sorted(dirs, key=functools.cmp_to_key(cmp))
    return dirs, tau, order


def _step_pattern(m_om: Rank2OM, z: SignVector, tau, order):
    """Classify z against the angular class order: ("cocircuit", pos) with
    the zero class position, or ("tope", m) with the sign step after
    position m (m = 0 for the wrap arc).  Positions are 1-based in
    ``order``."""
    s = []
    for k in order:
        vals = {z(e) * tau[e] for e in m_om.class_members(k)}
        if len(vals) != 1:
            raise InvalidFlag("sign vector is not class-constant")
        s.append(vals.pop())
    p = len(s)
    zeros = [i for i, v in enumerate(s) if v == ZERO]
    if len(zeros) > 1:
        raise InvalidFlag("sign vector vanishes on two classes")
    for eps in (POS, NEG):
        q = [eps * v for v in s]
        if zeros:
            m = zeros[0]
            if all(v == NEG for v in q[:m]) and all(v == POS for v in q[m + 1:]):
                return ("cocircuit", m + 1)
        else:
            m = sum(1 for v in q if v == NEG)
            if all(v == NEG for v in q[:m]) and all(v == POS for v in q[m:]):
                return ("tope", 0 if m == p else m)
    raise InvalidFlag("sign vector is not a covector pattern of the realization")


def _alpha_rays(m_om: Rank2OM, z: SignVector, cols):
    """Rays of the dual cone of z in the realization: (kind, u, w).

    For a cocircuit the cone is the single ray u (w is None); for a tope it
    is the open cone of positive combinations of u and w.
    """
    dirs, tau, order = _class_data(m_om, cols)
    kind, mpos = _step_pattern(m_om, z, tau, order)
    p = len(order)
    if kind == "cocircuit":
        u = _rot90(dirs[order[mpos - 1]])
        return ("cocircuit", u, None)
    if mpos == 0:
        u = _rot270(dirs[order[p - 1]])
        w = _rot90(dirs[order[0]])
    else:
        u = _rot90(dirs[order[mpos - 1]])
        w = _rot90(dirs[order[mpos]])
    return ("tope", u, w)


def _pattern_of(alpha, cols) -> SignVector:
    return SignVector(tuple(sign(alpha[0] * c[0] + alpha[1] * c[1]) for c in cols))


def _check_alpha(alpha, cols, z: SignVector):
    patt = _pattern_of(alpha, cols)
    if patt != z and patt != -z:
        raise AssertionError("alpha does not realize the rank-1 covector")


def _row_from_alpha(alpha, matrix) -> tuple:
    r1, r2 = matrix
    return tuple(alpha[0] * a + alpha[1] * b for a, b in zip(r1, r2))


# ---------------------------------------------------------------------------
# Flag cells


def flag_cell_dimension(flag: FlagOM) -> int:
    """h(M) plus one when z is a tope (the line direction is free)."""
    full = frozenset(flag.M.non_loops())
    return flag.M.h + (1 if flag.N.z.support() == full else 0)


def sample_flag_cell(flag: FlagOM, count: int, seed: int) -> list:
    """Deterministic exact samples (Y, X) with nu(Y, X) equal to the flag.

    X is drawn from M's chart; the line coefficient vector is the fixed
    dual ray for a cocircuit z, or a positive combination of the two cone
    rays with a sampled mixing ratio for a tope z.
    """
    m_om = flag.M
    ch = chart(m_om)
    z = flag.N.z
    out = []
    for idx in range(count):
        rng = _sample_rng(seed, flag.key, idx)
        cols, _, _, _ = _chart_columns(ch, rng)
        kind, u, w = _alpha_rays(m_om, z, cols)
        if kind == "cocircuit":
            alpha = u
        else:
            t = Fraction(rng.randint(1, 2**20 - 1), 2**18)
            alpha = (u[0] + t * w[0], u[1] + t * w[1])
        _check_alpha(alpha, cols, z)
        x = _matrix_of(cols)
        out.append((_row_from_alpha(alpha, x), x))
    return out


def _solve_cone_coords(alpha, u, w):
    d = det2(u, w)
    if d == 0:
        raise RankDeficient("degenerate cone rays")
    a = det2(alpha, w) / d
    b = det2(u, alpha) / d
    return a, b


def flag_boundary_paths(flag: FlagOM, face: FlagOM, count: int, seed: int) -> list:
    """Exact paths from samples of a covering face back into the open flag
    cell: for each face sample, ten (Y_k, X_k) pairs whose nu is the flag.

    Raises if any path point leaves the cell; returns the face samples.
    """
    m_om, z = flag.M, flag.N.z
    epsilons = [Fraction(1, 2**k) for k in range(1, 11)]
    samples = sample_flag_cell(face, count, seed)
    chain = cover_chain(m_om, face.M)
    for y_row, x_mat in samples:
        cols0 = as_columns(x_mat)
        if face.M == m_om:
            xs = [x_mat] * len(epsilons)
        else:
            # a flag cover may drop M by more than one covering move;
            # compose the per-move perturbations along a saturated chain
            xs = []
            for eps in epsilons:
                x = x_mat
                for lo, hi in zip(chain, chain[1:]):
                    x = perturb_once(hi, lo, x, eps)
                xs.append(x)
        for k, xk in enumerate(xs):
            colsk = as_columns(xk)
            kind, u, w = _alpha_rays(m_om, z, colsk)
            if kind == "cocircuit":
                alpha = u
            else:
                if face.M == m_om:
                    # face's alpha sits on one cone ray; walk inward from it
                    base, other = (u, w) if det2(_alpha_of(y_row, cols0), u) == 0 else (w, u)
                    e = epsilons[k]
                    alpha = (base[0] + e * other[0], base[1] + e * other[1])
                else:
                    a, b = _solve_cone_coords(_alpha_of(y_row, cols0), u, w)
                    floor = epsilons[k] * (abs(a) + abs(b) + 1) / 2
                    alpha = (
                        max(a, floor) * u[0] + max(b, floor) * w[0],
                        max(a, floor) * u[1] + max(b, floor) * w[1],
                    )
            _check_alpha(alpha, colsk, z)
            got = nu(_row_from_alpha(alpha, xk), xk)
            if got != flag:
                raise AssertionError(
                    f"flag boundary path left the cell: {got.key} != {flag.key}"
                )
    return samples


def _alpha_of(y_row, cols):
    """Recover the functional coefficients of a row built over ``cols``
    (exact; needs some basis pair)."""
    n = len(cols)
    y = tuple(y_row)
    for i in range(n):
        for j in range(i + 1, n):
            d = det2(cols[i], cols[j])
            if d != 0:
                a1 = (y[i] * cols[j][1] - y[j] * cols[i][1]) / d
                a2 = (cols[i][0] * y[j] - cols[j][0] * y[i]) / d
                return (a1, a2)
    raise RankDeficient("no basis pair in columns")


# ---------------------------------------------------------------------------
# Flag recursive atom ordering


def _lz_position(m_om: Rank2OM, z: SignVector, matrix, labels) -> Fraction:
    """Label-line position of the rank-1 direction: the first label of the
    parallel class for a cocircuit, the half-integer gap position for a
    tope, and 1/2 for the wrap arc."""
    cols = as_columns(matrix)
    _dirs, tau, order = _class_data(m_om, cols)
    kind, mpos = _step_pattern(m_om, z, tau, order)
    if kind == "cocircuit":
        k = order[mpos - 1]
        return Fraction(min(labels[e] for e in m_om.class_members(k)))
    if mpos == 0:
        return Fraction(1, 2)
    k = order[mpos - 1]
    return Fraction(max(labels[e] for e in m_om.class_members(k))) + Fraction(1, 2)


def _single_support(n: int, e: int, s: int) -> Rank1OM:
    entries = [ZERO] * n
    entries[e - 1] = s
    return Rank1OM.from_vector(SignVector(tuple(entries)))


def flag_rao_ordering(flag: FlagOM, matrix) -> tuple:
    """Atom ordering of the flag lower interval from a fixed realization.

    Follows the affine-line construction: per rank-2 atom (i, j) in
    dictionary label order, emit its compatible rank-1 cocircuit flags,
    the pair ordered by the position of the flag's line among the labels.
    Returns flag keys.
    """
    from .macphersonian import atom_om

    m_om, z = flag.M, flag.N.z
    pairs, labels = rao_atom_pairs(m_om, matrix)
    lz = _lz_position(m_om, z, matrix, labels)
    out = []
    for a, b in pairs:
        base = atom_om(m_om, a, b)
        za, zb = z(a), z(b)
        if za == ZERO and zb == ZERO:
            raise InvalidFlag("covector vanishes on a basis of M")
        if za != ZERO and zb != ZERO:
            zero_at_i = FlagOM.make(_single_support(m_om.n, b, zb), base)
            zero_at_j = FlagOM.make(_single_support(m_om.n, a, za), base)
            i = labels[a]
            if lz <= i:
                first, second = zero_at_i, zero_at_j
            else:
                first, second = zero_at_j, zero_at_i
            out.extend([first.key, second.key])
        else:
            e, s = (a, za) if za != ZERO else (b, zb)
            out.append(FlagOM.make(_single_support(m_om.n, e, s), base).key)
    return tuple(out)
