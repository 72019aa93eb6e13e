from fractions import Fraction

import pytest

from macp.errors import (
    EmptyBelowSet,
    InvalidFlag,
    NotContained,
    RankDeficient,
)
from macp.flags import (
    FlagOM,
    enumerate_macp12,
    flag_boundary_paths,
    flag_cell_dimension,
    flag_leq,
    flag_rank,
    flag_rao_ordering,
    iota_anchored_om,
    iota_embed,
    iota_signed,
    is_strong_image,
    macp1_poset,
    max_covector_below,
    nu,
    rank1_all,
    rank1_images,
    sample_flag_cell,
    signed_dominates,
)
from macp.homology import betti_gf2
from macp.macphersonian import BOT, enumerate_macp2, weak_leq
from macp.omcore import (
    Rank1OM,
    Rank2OM,
    SignVector,
    delete_element,
    mu,
    realize_slots,
)
from macp.posets import order_complex, verify_recursive_atom_ordering

M3 = mu([[1, 0, 1], [0, 1, 1]])
F3 = enumerate_macp12(3)


def r1(word):
    return Rank1OM.from_vector(SignVector.from_string(word))


# ---------------------------------------------------------------------------
# strong map images


def test_rank1_images_of_m3():
    g1 = rank1_images(M3)
    assert len(g1.elements) == 6  # 12 nonzero covectors mod +-
    assert sorted(g1.heights.values()) == [0, 0, 0, 1, 1, 1]
    for e in g1.elements:
        full = e.z.support() == frozenset(M3.non_loops())
        assert g1.heights[e.word] == (1 if full else 0)


def test_is_strong_image():
    for c in ("0++", "+0+", "+-0"):
        assert is_strong_image(r1(c), M3)  # cocircuits are covectors
    assert is_strong_image(r1("+++"), M3)
    # (+,0,-) is not among the 13 covectors of M3
    assert not is_strong_image(r1("+0-"), M3)
    # note: (+,-,+) = -(-,+,-) IS a covector of M3, despite reading as a
    # scrambled pattern
    assert is_strong_image(r1("+-+"), M3)


def test_max_covector_below():
    z2 = SignVector.from_string("+++")
    assert str(max_covector_below(M3, z2)) == "+++"
    loopy = Rank2OM.from_string("n=3;loops=3;classes=[+1][+2]")
    assert str(max_covector_below(loopy, z2)) == "++0"
    with pytest.raises(EmptyBelowSet):
        max_covector_below(loopy, SignVector.from_string("00+"))


# ---------------------------------------------------------------------------
# nu


def test_nu_examples():
    f = nu([1, 0, 1], [[1, 0, 1], [0, 1, 1]])
    assert f.key == "flag;z=+0+;M=n=3;loops=;classes=[+1][+3][+2]"
    f2 = nu([1, 1, 2], [[1, 0, 1], [0, 1, 1]])
    assert f2.N.word == "+++"
    with pytest.raises(NotContained):
        nu([1, 0, 0], [[1, 0, 1], [0, 1, 1]])
    with pytest.raises(RankDeficient):
        nu([0, 0, 0], [[1, 0, 1], [0, 1, 1]])
    with pytest.raises(RankDeficient):
        nu([1, 2, 3], [[1, 2, 3], [2, 4, 6]])


def test_flag_string_round_trip():
    f = FlagOM.from_string("flag;z=+0+;M=n=3;loops=;classes=[+1][+3][+2]")
    assert f.M == M3 and f.N == r1("+0+")
    with pytest.raises(InvalidFlag):
        FlagOM.make(r1("+0-"), M3)


# ---------------------------------------------------------------------------
# iota


def test_iota_parallel_placement():
    f = FlagOM.make(r1("+0+"), M3)
    img = iota_embed(f)
    assert img.n == 4
    assert img.chi(4, 2) == 0  # element 4 joins the class of element 2
    assert delete_element(img, 4) == M3


def test_iota_new_singleton():
    f = FlagOM.make(r1("+++"), M3)
    img = iota_embed(f)
    assert all(img.chi(4, i) != 0 for i in (1, 2, 3))
    assert delete_element(img, 4) == M3


def test_iota_requires_basis_12():
    m = Rank2OM.from_string("n=3;loops=;classes=[+1 +2][+3]")
    f = FlagOM.make(r1("00+"), m)
    with pytest.raises(InvalidFlag):
        iota_embed(f)


def test_iota_injective_on_basis_flags():
    seen = {}
    for f in F3.flags:
        if f.M.chi(1, 2) == 0:
            continue
        k = iota_embed(f).key
        assert k not in seen
        seen[k] = f.key


def test_anchored_embedding_biconditional_sample():
    f0 = FlagOM.make(r1("0++"), M3)
    i0 = F3.idx(f0)
    upper = [F3.flags[j] for j in range(len(F3)) if F3.up[i0] >> j & 1]
    sigs = {f.key: iota_signed(f, f0) for f in upper}
    for f1 in upper:
        for f2 in upper:
            assert F3.leq(f1, f2) == signed_dominates(sigs[f1.key], sigs[f2.key])


def test_anchored_cover_crosscheck():
    p4 = enumerate_macp2(4)
    f0 = FlagOM.make(r1("0++"), M3)
    side_a = {iota_anchored_om(g, f0).key for g in F3.flag_covers(f0)}
    img = iota_embed(f0)
    side_b = {p4.elements[j].key for j in p4.covers_up[p4.idx(img)]}
    assert side_a == side_b


# ---------------------------------------------------------------------------
# the flag poset


def test_flag_counts():
    assert len(enumerate_macp12(2)) == 4
    macp3 = enumerate_macp2(3)
    assert len(F3) == sum(2 * m.p for m in macp3.elements) == 60


def test_flag_order_projects_to_m():
    for f1 in F3.flags[:20]:
        for f2 in F3.flags[:20]:
            if flag_leq(f1, f2):
                assert weak_leq(f1.M, f2.M)


def test_flag_rank_matches_graded_height():
    heights = [None] * len(F3)
    order = sorted(range(len(F3)), key=lambda i: F3.rank[i])
    for i in order:
        below = [heights[k] + 1 for k in F3.covers_down[i]]
        heights[i] = max(below, default=0)
    for i, f in enumerate(F3.flags):
        assert heights[i] == F3.rank[i] == flag_rank(f)


# ---------------------------------------------------------------------------
# flag atom ordering


def test_flag_rao_all_n3():
    for f in F3.flags:
        li = F3.lower_interval(f)
        ordering = flag_rao_ordering(f, realize_slots(f.M))
        atoms = {
            li.elements[j]
            for j in li.covers_up_idx(li.idx(BOT))
        }
        assert set(ordering) == atoms
        assert verify_recursive_atom_ordering(li, ordering)


def test_flag_rao_cocircuit_branch_single_emission():
    # when z vanishes on one atom element, exactly one flag atom is emitted
    f = FlagOM.make(r1("+0+"), M3)
    ordering = flag_rao_ordering(f, realize_slots(f.M))
    li = F3.lower_interval(f)
    atom_count = len(li.covers_up_idx(li.idx(BOT)))
    assert len(ordering) == atom_count


def test_flag_atom_count_matches_compatible_cocircuit_pairs():
    from macp.macphersonian import rao_atom_pairs

    for f in F3.flags:
        pairs, _ = rao_atom_pairs(f.M, realize_slots(f.M))
        z = f.N.z
        want = sum(2 if z(a) != 0 and z(b) != 0 else 1 for a, b in pairs)
        assert len(flag_rao_ordering(f, realize_slots(f.M))) == want


# ---------------------------------------------------------------------------
# flag cells


def test_sample_flag_cell_round_trip():
    for f in F3.flags:
        for y, x in sample_flag_cell(f, 10, seed=0):
            assert nu(y, x) == f


def test_sample_flag_cell_determinism():
    f = FlagOM.make(r1("+++"), M3)
    assert sample_flag_cell(f, 4, seed=9) == sample_flag_cell(f, 4, seed=9)


def test_flag_cell_dimension():
    cocirc = FlagOM.make(r1("+0+"), M3)
    tope = FlagOM.make(r1("+++"), M3)
    assert flag_cell_dimension(cocirc) == M3.h
    assert flag_cell_dimension(tope) == M3.h + 1
    for f in F3.flags:
        assert flag_cell_dimension(f) == flag_rank(f)


def test_flag_boundary_paths_cover_pairs():
    f = FlagOM.make(r1("+++"), M3)
    i = F3.idx(f)
    assert F3.covers_down[i], "tope flag must cover something"
    for j in F3.covers_down[i]:
        flag_boundary_paths(f, F3.flags[j], 2, seed=3)


# ---------------------------------------------------------------------------
# MacP(1, n)


def test_rank1_all_counts():
    assert len(rank1_all(3)) == (3**3 - 1) // 2
    assert len(rank1_all(4)) == (3**4 - 1) // 2


def test_macp1_is_projective_space():
    for n in (2, 3, 4):
        prof = betti_gf2(order_complex(macp1_poset(n)))
        assert prof.betti == (1,) * n
