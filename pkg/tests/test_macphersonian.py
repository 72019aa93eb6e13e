from fractions import Fraction
from itertools import product

import pytest

from macp.errors import (
    ElementNotFound,
    LimitExceeded,
    NotACoatom,
    RealizationMismatch,
)
from macp.homology import betti_gf2
from macp.macphersonian import (
    BOT,
    affine_labels,
    atom_om,
    boundary_perturbations,
    chart,
    coatoms_CR,
    cover_chain,
    enumerate_macp2,
    lower_interval,
    rank_h,
    rao_ordering,
    sample_boundary,
    sample_cell,
    weak_leq,
    weak_leq_chirotope,
)
from macp.omcore import (
    Chirotope2,
    Rank2OM,
    canonical_form,
    mu,
    realize_slots,
    validate_covector_axioms,
    validate_grassmann_plucker,
    covectors,
)
from macp.posets import order_complex, verify_recursive_atom_ordering

M3 = mu([[1, 0, 1], [0, 1, 1]])
P3 = enumerate_macp2(3)
P4 = enumerate_macp2(4)


# ---------------------------------------------------------------------------
# enumeration


def test_counts_small():
    assert len(enumerate_macp2(2)) == 1
    assert len(P3) == 13
    assert len(P4) == 146


def test_enumeration_matches_chirotope_oracle_n3():
    keys = set()
    passing = 0
    for signs in product((-1, 0, 1), repeat=3):
        chi = Chirotope2(3, signs)
        if chi.is_zero() or validate_grassmann_plucker(chi) is not None:
            continue
        passing += 1
        keys.add(canonical_form(chi).key)
    assert len(keys) == len(P3)
    assert passing == 2 * len(P3)  # chi and -chi per oriented matroid


def test_every_element_valid():
    for om in P3.elements:
        assert validate_grassmann_plucker(om.chirotope()) is None
        assert validate_covector_axioms(covectors(om)) is None
        assert len(covectors(om)) == 4 * om.p + 1


def test_limit():
    with pytest.raises(LimitExceeded):
        enumerate_macp2(9)
    with pytest.raises(LimitExceeded):
        enumerate_macp2(1)


# ---------------------------------------------------------------------------
# weak maps


def test_weak_leq_examples():
    n = Rank2OM.from_string("n=3;loops=3;classes=[+1][+2]")
    assert weak_leq(n, n)
    assert weak_leq(n, M3) and weak_leq_chirotope(n, M3)
    m3p = Rank2OM.from_string("n=3;loops=;classes=[+1 ][-3][+2]".replace(" ]", "]"))
    assert not weak_leq(M3, m3p) and not weak_leq(m3p, M3)
    assert not weak_leq_chirotope(M3, m3p) and not weak_leq_chirotope(m3p, M3)


def test_comparator_equivalence_n3():
    for a in P3.elements:
        for b in P3.elements:
            assert weak_leq(a, b) == weak_leq_chirotope(a, b)


def test_reorient_pair_incomparable():
    om = Rank2OM.from_string("n=3;loops=;classes=[+1 +3][+2]")
    re = Rank2OM.from_string("n=3;loops=;classes=[+1 -3][+2]")
    assert not weak_leq(om, re) and not weak_leq(re, om)


# ---------------------------------------------------------------------------
# covering moves


def test_coatoms_of_m3():
    got = sorted(c.key for c in coatoms_CR(M3))
    assert got == [
        "n=3;loops=;classes=[+1 +3][+2]",
        "n=3;loops=;classes=[+1 -2][+3]",
        "n=3;loops=;classes=[+1][+2 +3]",
    ]


def test_coatoms_cr1_only():
    om = Rank2OM.from_string("n=3;loops=;classes=[+1 +3][+2]")
    got = sorted(c.key for c in coatoms_CR(om))
    # loop-ify 1 or 3; element 2 has a singleton class, and p = 2 bars CR2
    assert got == [
        "n=3;loops=1;classes=[+2][+3]",
        "n=3;loops=3;classes=[+1][+2]",
    ]


def test_atom_has_no_coatoms():
    atom = Rank2OM.from_string("n=3;loops=3;classes=[+1][+2]")
    assert rank_h(atom) == 0
    assert coatoms_CR(atom) == []


def test_covers_match_brute_force():
    for poset in (P3, P4):
        for i, m in enumerate(poset.elements):
            direct = sorted(c.key for c in coatoms_CR(m))
            brute = sorted(poset.elements[k].key for k in poset.brute_covers_down(i))
            assert direct == brute


def test_rank_examples():
    assert rank_h(M3) == 2
    four = mu([[1, 0, 1, 1], [0, 1, 1, 2]])
    assert four.p == 4 and rank_h(four) == 4


def test_hasse_matches_brute_force_covers_n3():
    for i in range(len(P3)):
        assert sorted(P3.covers_down[i]) == sorted(P3.brute_covers_down(i))


# ---------------------------------------------------------------------------
# lower intervals


def test_lower_interval_atom():
    atom = Rank2OM.from_string("n=3;loops=3;classes=[+1][+2]")
    li = lower_interval(P3, atom)
    assert len(li) == 2 and li.bottom() == BOT and li.top() == atom.key


def test_lower_interval_hexagon():
    li = lower_interval(P3, M3)
    assert len(li) == 8
    proper = li.subposet(
        [i for i, k in enumerate(li.elements) if k not in (BOT, M3.key)]
    )
    k = order_complex(proper)
    assert betti_gf2(k).betti == (1, 1)
    assert k.f_vector() == (6, 6)


def test_lower_interval_coatom_has_four_elements():
    co = Rank2OM.from_string("n=3;loops=;classes=[+1 +3][+2]")
    assert len(lower_interval(P3, co)) == 4


def test_lower_interval_missing_element():
    with pytest.raises(ElementNotFound):
        lower_interval(P3, Rank2OM.from_string("n=4;loops=;classes=[+1][+2][+3][+4]"))


def test_reorientation_is_interval_isomorphism():
    import random

    from macp.omcore import reorient

    rng = random.Random(3)
    for m in P4.elements[:40]:
        sub = frozenset(rng.sample(range(1, 5), rng.randint(1, 4)))
        m2 = reorient(m, sub)
        down1 = sorted(
            reorient(P4.elements[k], sub).key for k in P4.downset_idx(P4.idx(m))
        )
        down2 = sorted(P4.elements[k].key for k in P4.downset_idx(P4.idx(m2)))
        assert down1 == down2


# ---------------------------------------------------------------------------
# recursive atom ordering


def test_affine_labels_example():
    mat = ((1, 0, 1), (0, 1, 1))  # columns e1, e2, (1,1): angles 0, 90, 45
    labels, _order = affine_labels(M3, mat)
    assert labels == {1: 1, 3: 2, 2: 3}
    # dictionary order on label pairs: {1,3} then {1,2} then {3,2}
    ordering = rao_ordering(M3, mat)
    assert ordering == (
        atom_om(M3, 1, 3).key,
        atom_om(M3, 1, 2).key,
        atom_om(M3, 2, 3).key,
    )


def test_rao_ordering_verifies_on_all_n3():
    for m in P3.elements:
        li = lower_interval(P3, m)
        assert verify_recursive_atom_ordering(li, rao_ordering(m, realize_slots(m)))


def test_rao_realization_mismatch():
    with pytest.raises(RealizationMismatch):
        rao_ordering(M3, ((1, 0, 0), (0, 1, 0)))


# ---------------------------------------------------------------------------
# charts and samplers


def test_chart_dimension_budget():
    for m in P4.elements:
        ch = chart(m)
        assert ch.free_angles == m.p - 2
        assert ch.free_radii == m.l - 2
        assert ch.free_angles + ch.free_radii == m.h == ch.dimension


def test_chart_prefers_basis_12():
    assert chart(M3).anchor == (1, 2)
    om = Rank2OM.from_string("n=3;loops=;classes=[+1 +2][+3]")
    assert chart(om).anchor == (1, 3)


def test_sample_cell_round_trip_and_determinism():
    for m in P3.elements:
        mats = sample_cell(m, 25, seed=0)
        assert all(mu(x) == m for x in mats)
        assert mats == sample_cell(m, 25, seed=0)
    assert sample_cell(M3, 3, seed=1) != sample_cell(M3, 3, seed=2)


def test_sample_boundary_all_faces_m3():
    for face in coatoms_CR(M3):
        mats = sample_boundary(M3, face, 5, seed=1)
        assert all(mu(x) == face for x in mats)


def test_sample_boundary_rejects_non_coatom():
    atom = Rank2OM.from_string("n=3;loops=3;classes=[+1][+2]")
    with pytest.raises(NotACoatom):
        sample_boundary(M3, atom, 1, seed=0)


def test_boundary_perturbations_cr1_any_epsilon():
    om = Rank2OM.from_string("n=3;loops=;classes=[+1 +3][+2]")
    face = Rank2OM.from_string("n=3;loops=3;classes=[+1][+2]")
    mat = sample_cell(face, 1, seed=4)[0]
    big = [Fraction(3), Fraction(1), Fraction(1, 1024)]
    for pert in boundary_perturbations(om, face, mat, big):
        assert mu(pert) == om  # CR1 re-inflation works at every scale


def test_cover_chain():
    atom = Rank2OM.from_string("n=3;loops=3;classes=[+1][+2]")
    chain = cover_chain(M3, atom)
    assert chain[0] == atom and chain[-1] == M3 and len(chain) == 3
    for lo, hi in zip(chain, chain[1:]):
        assert weak_leq(lo, hi)
