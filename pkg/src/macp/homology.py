"""GF(2) simplicial homology of finite complexes, plus the sphere and
Schubert-cell profiles used to certify the topological claims.

Boundary matrices are rows of Python-int bitsets; rank is Gaussian
elimination with XOR, which is fast at desk scale and exact by nature.
"""

from __future__ import annotations

from dataclasses import dataclass

from .posets import SimplicialComplex


@dataclass(frozen=True)
class BettiProfile:
    f_vector: tuple
    betti: tuple
    euler: int

    def __post_init__(self):
        # Euler-Poincare identity over a field, both sides computed
        chi_f = sum((-1) ** k * f for k, f in enumerate(self.f_vector))
        chi_b = sum((-1) ** k * b for k, b in enumerate(self.betti))
        if chi_f != self.euler or chi_b != self.euler:
            raise AssertionError(
                f"Euler identity broken: f gives {chi_f}, betti gives {chi_b}"
            )


def _gf2_rank(rows) -> int:
    pivots = {}
    rank = 0
    for row in rows:
        while row:
            low = row & -row
            piv = pivots.get(low)
            if piv is None:
                pivots[low] = row
                rank += 1
                break
            row ^= piv
    return rank


def betti_gf2(K: SimplicialComplex) -> BettiProfile:
    """GF(2) Betti numbers: b_k = f_k - rank d_k - rank d_{k+1}."""
    faces = K.faces_by_dim()
    dim = K.dim
    f_vector = tuple(len(faces.get(d, ())) for d in range(dim + 1))
    index = {d: {f: i for i, f in enumerate(faces.get(d, ()))} for d in range(dim + 1)}
    ranks = [0] * (dim + 2)  # ranks[k] = rank of boundary C_k -> C_{k-1}
    for k in range(1, dim + 1):
        rows = []
        for f in faces.get(k, ()):
            row = 0
            for drop in range(k + 1):
                facet = f[:drop] + f[drop + 1:]
                row ^= 1 << index[k - 1][facet]
            rows.append(row)
        ranks[k] = _gf2_rank(rows)
    betti = tuple(
        f_vector[k] - ranks[k] - ranks[k + 1] for k in range(dim + 1)
    )
    euler = sum((-1) ** k * f for k, f in enumerate(f_vector))
    return BettiProfile(f_vector, betti, euler)


def euler_characteristic(K: SimplicialComplex) -> int:
    return sum((-1) ** k * f for k, f in enumerate(K.f_vector()))


def is_sphere_profile(K: SimplicialComplex, d: int) -> bool:
    """Homology-sphere surrogate: GF(2) Betti profile of S^d, purity in
    dimension d, and the pseudomanifold condition (every (d-1)-face in
    exactly two d-faces).
    """
    if not K.maximal:
        return False
    faces = K.faces_by_dim()
    if K.dim != d:
        return False
    if any(len(mf) - 1 != d for mf in K.maximal):
        return False
    if d == 0:
        return len(faces.get(0, ())) == 2
    counts = {}
    for f in faces.get(d, ()):
        for drop in range(d + 1):
            facet = f[:drop] + f[drop + 1:]
            counts[facet] = counts.get(facet, 0) + 1
    if any(c != 2 for c in counts.values()):
        return False
    profile = betti_gf2(K).betti
    want = tuple(1 if k in (0, d) else 0 for k in range(d + 1))
    return profile == want


def schubert_gr2_betti(n: int) -> tuple:
    """Independent oracle: GF(2) Betti numbers of Gr(2, R^n) from its
    Schubert cell decomposition.

    Cells are partitions inside a 2 x (n-2) box; the cellular boundary
    coefficients of adjacent real Schubert cells are 0 or +/-2, hence the
    GF(2) chain complex has zero differential and b_k is the number of
    cells of dimension k.
    """
    box = n - 2
    counts = [0] * (2 * box + 1)
    for l1 in range(box + 1):
        for l2 in range(l1 + 1):
            counts[l1 + l2] += 1
    return tuple(counts)


def homology_report(K: SimplicialComplex, sphere_dim=None) -> dict:
    prof = betti_gf2(K)
    out = {
        "f_vector": list(prof.f_vector),
        "betti": list(prof.betti),
        "euler": prof.euler,
    }
    if sphere_dim is not None:
        out["sphere_check"] = is_sphere_profile(K, sphere_dim)
    return out
