from __future__ import annotations

import itertools

import numpy as np
import pytest

from oracles import ends_brute, order
from dvbench.devries import DVMorphism, FinDeVries, ROFragment, plain_compose, preimage_morphism
from dvbench.duality import (Compactification, RoundFilter, alpha_star_atom, atoms_of,
                             check_C_morphism_finite, check_extension, compose_ext, cube_faces,
                             end_of_point, ends_of, eta, ext_iso_check, functor_C_obj,
                             functor_E_mor, functor_E_obj, infinity_end_audit, is_round_filter,
                             lemma53_audit, p_square, q_square, realize_atom, rho_star,
                             roundtrip_audit, sigma_plus, twohead_up, vartheta)
from dvbench.compactcat import example33
from dvbench.topology import ArithCompactification
from test_devries import relation_of

PARITY = ArithCompactification.parity()
Y_PRIME = ArithCompactification.from_partition(4, [{0, 3}, {1, 2}])
ONE_POINT = ArithCompactification.one_point()


# ends


def test_ends_match_exhaustive_round_filter_search():
    for bits in range(512):
        rel = relation_of(bits)
        A = FinDeVries.from_pairs(2, sorted(rel))
        got = {y.members for y in ends_of(A)}
        assert got == ends_brute(2, rel), sorted(rel)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ends_of_powerset_are_principal_ultrafilters(n):
    ends = ends_of(FinDeVries(n))
    assert [y.generator() for y in ends] == [1 << x for x in range(n)]
    assert {y.members for y in ends} == ends_brute(n, order(n))
    for y in ends:
        assert is_round_filter(FinDeVries(n), y.members)


def test_twohead_up_of_empty_set_is_empty():
    assert twohead_up(FinDeVries(2), []) == frozenset()


def test_end_of_point_on_fragment_is_a_round_filter():
    A = ROFragment(PARITY, 4, 2, 8)
    for label in range(PARITY.k):
        v = end_of_point(A, ("inf", label))
        assert is_round_filter(A, frozenset(int(i) for i in np.flatnonzero(v)))
    with pytest.raises(ValueError):
        end_of_point(A, ("n", 8))


# Tarski duality


def _cbh(m: int, n: int):
    """Every complete Boolean homomorphism P(m) -> P(n), as preimage maps."""
    for f in itertools.product(range(m), repeat=n):
        yield list(f), preimage_morphism(FinDeVries(m), FinDeVries(n), f)


def test_tarski_round_trip_and_contravariance():
    sizes = range(1, 4)
    for m, n in itertools.product(sizes, sizes):
        for f, sigma in _cbh(m, n):
            assert sigma_plus(sigma) == f
            for k in sizes:
                for h, tau in _cbh(n, k):
                    assert sigma_plus(plain_compose(tau, sigma)) == [f[h[z]] for z in range(k)]


def test_vartheta_and_eta_identify_atoms():
    B = FinDeVries(3)
    assert atoms_of(B) == eta(3)
    assert [vartheta(B, b) for b in range(B.size)] == list(range(B.size))


def test_sigma_plus_rejects_non_homomorphism():
    sigma = DVMorphism.from_masks(FinDeVries(2), FinDeVries(2), [0, 0, 0, 3])
    with pytest.raises(ValueError):
        sigma_plus(sigma)


def test_rho_star_of_preimage_map_is_the_map():
    for f, rho in _cbh(3, 2):
        assert rho_star(rho) == f


# extensions


@pytest.mark.parametrize("Y", [PARITY, Y_PRIME, ONE_POINT], ids=["parity", "Y'", "one-point"])
def test_inverse_of_embedding_is_an_extension(Y):
    ext = functor_E_obj(Compactification.arithmetic(Y), 8, 4, 16)
    rep = check_extension(ext.alpha)
    assert rep.ok, rep.text()
    assert rep.info["atoms checked"] == 16
    assert all(c.bounds == {"T": 8, "P": 4, "Tprime": 16} for c in rep.checks)
    assert set(rep.info["evidence"]) == {f"{{{n}}}" for n in range(16)}


def test_non_dense_map_fails_density_and_separation_together():
    alpha = preimage_morphism(FinDeVries(1), FinDeVries(2), [0, 0])
    rep = check_extension(alpha)
    assert not rep.get("atom-meet density").passed
    assert rep.get("atom-meet density").witness == ("{0}", "{0,1}")
    assert not rep.get("atoms separated").passed
    assert rep.get("density iff separation").passed
    assert rep.get("join-meet iff meet-join").passed
    with pytest.raises(ValueError):
        functor_C_obj(alpha)


def test_finite_extension_realizes_identity():
    C = functor_C_obj(functor_E_obj(Compactification.finite(3)))
    assert C.embed == [0, 1, 2] and C.is_bijective()


def test_arithmetic_realization_maps_points_to_their_ends():
    C = functor_C_obj(functor_E_obj(Compactification.arithmetic(PARITY), 6, 2, 13))
    assert C.report.ok
    assert [C.ends[i] for i in C.embed] == [("n", x) for x in range(13)]


def test_realization_beyond_threshold_uses_singletons():
    alpha = functor_E_obj(Compactification.arithmetic(Y_PRIME), 6, 4, 12).alpha
    assert [realize_atom(alpha, x) for x in (6, 10)] == [("n", 6), ("n", 10)]


def test_infinity_ends_are_distinct_round_filters():
    alpha = functor_E_obj(Compactification.arithmetic(Y_PRIME), 6, 4, 12).alpha
    checks = infinity_end_audit(alpha)
    assert [c.axiom for c in checks] == ["end at inf_1", "end at inf_2"]
    assert all(c.passed for c in checks)


# the three-way equivalence


def test_three_conditions_agree_on_parity():
    alpha = functor_E_obj(Compactification.arithmetic(PARITY), 6, 2, 13).alpha
    rep = lemma53_audit(alpha)
    assert rep.ok, rep.text()
    assert rep.info["atoms checked"] == 13


def test_three_conditions_disagree_after_mutation():
    alpha = functor_E_obj(Compactification.arithmetic(PARITY), 6, 2, 13).alpha
    masks = alpha.require_masks().copy()
    A, B = alpha.domain, alpha.codomain
    # drop the point 0 from the image of an element containing it
    target = [i for i in range(A.size) if A.fmt(i).startswith("{0}")][0]
    masks[target] &= ~1
    bad = DVMorphism.from_masks(A, B, [int(m) for m in masks], "mutant")
    rep = lemma53_audit(bad)
    assert not rep.get("conditions agree").passed
    assert rep.get("conditions agree").witness[1] == "{0}"


def test_three_conditions_on_finite_extensions():
    for n in range(1, 4):
        rep = lemma53_audit(functor_E_obj(Compactification.finite(n)).alpha)
        assert rep.ok


# round trips


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_finite_round_trip_squares(n):
    rep = roundtrip_audit(Compactification.finite(n))
    assert rep.ok, rep.text()


@pytest.mark.parametrize("n,n2", [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_naturality_cube_for_every_map(n, n2):
    e, e2 = Compactification.finite(n), Compactification.finite(n2)
    for f in itertools.product(range(n2), repeat=n):
        faces = cube_faces(e, e2, f)
        assert [c.axiom for c in faces] == ["front", "back", "top", "bottom", "left", "right"]
        assert all(c.passed for c in faces), f
        m = functor_E_mor(e, e2, f, f)
        assert m.check().ok
        assert check_C_morphism_finite(m).passed


def test_extension_morphisms_compose():
    e1, e2, e3 = (Compactification.finite(k) for k in (2, 3, 2))
    m1 = functor_E_mor(e1, e2, [0, 2], [0, 2])      # E(e2) -> E(e1)
    m2 = functor_E_mor(e2, e3, [1, 0, 1], [1, 0, 1])  # E(e3) -> E(e2)
    both = compose_ext(m1, m2)
    assert both.check().ok
    direct = functor_E_mor(e1, e3, [1, 1], [1, 1])
    assert both.rho.same_as(direct.rho) is None and both.sigma.same_as(direct.sigma) is None
    with pytest.raises(ValueError):
        compose_ext(m1, m1)


def test_arithmetic_squares_commute():
    e = Compactification.arithmetic(PARITY)
    assert p_square(e, 6, 4, 12).passed
    assert q_square(functor_E_obj(e, 6, 4, 12).alpha).passed
    assert roundtrip_audit(Compactification.arithmetic(Y_PRIME), T=6, P=4, Tprime=12).ok


def test_q_square_for_a_relabelled_extension():
    alpha = functor_E_obj(Compactification.finite(2)).alpha
    swap = DVMorphism.from_masks(alpha.domain, alpha.codomain, [0, 2, 1, 3], "swap")
    assert q_square(swap).passed
    assert alpha_star_atom(swap, 0) == RoundFilter(frozenset({2, 3}))


def test_example_morphism_goes_to_an_isomorphism():
    x = example33()
    m = functor_E_mor(x.e, x.e2, x.f, x.g)
    assert m.check().ok
    assert ext_iso_check(m).passed


def test_example_square_commutes_on_the_larger_fragment():
    x = example33()
    m = functor_E_mor(x.e, x.e2, x.f, x.g, 8, 4, 16)
    chk = m.square()
    assert chk.passed and chk.bounds == {"T": 8, "P": 4, "Tprime": 16}


def test_mixed_compactifications_are_rejected():
    with pytest.raises(ValueError):
        functor_E_mor(Compactification.finite(2), Compactification.arithmetic(PARITY), [0], None)
    with pytest.raises(ValueError):
        Compactification.finite(2).Y
