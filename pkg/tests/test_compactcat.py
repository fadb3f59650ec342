from __future__ import annotations

import itertools

import pytest

from dvbench.compactcat import (CMorphism, check_cmorphism, compatible, compose_c, example33,
                                is_equivalent, is_iso_in_c, is_maximal_relative, iso_search,
                                leq_classical, lemma62_audit, partition_family, shift_bijections,
                                theorem34_audit)
from dvbench.devries import (ArithPowerset, DVMorphism, FinDeVries, ROFragment, check_morphism,
                             complete_boolean_check, preimage_morphism)
from dvbench.duality import Compactification, check_extension, functor_E_obj
from dvbench.setalg import PiecewiseArithMap, check_bijection
from dvbench.topology import ArithCompactification, YMap, partition_compactifications

ONE = ArithCompactification.one_point()
PARITY = ArithCompactification.parity()
Y_PRIME = ArithCompactification.from_partition(4, [{0, 3}, {1, 2}])
arith = Compactification.arithmetic


def _ymap(Y, Y2, f, h, to_inf=()):
    return YMap(Y, Y2, f, tuple(("inf", j) for j in h), to_inf)


# morphisms of compactifications


def test_shift_is_continuous_but_does_not_commute_with_identity():
    e = arith(ONE)
    rep = check_cmorphism(e, e, PiecewiseArithMap.identity(), _ymap(ONE, ONE, PiecewiseArithMap.shift(1), [0]))
    assert rep.get("continuity at inf").passed
    assert rep.get("g.e = e2.f").witness == ("0",)
    shift = PiecewiseArithMap.shift(1)
    assert check_cmorphism(e, e, shift, _ymap(ONE, ONE, shift, [0])).ok


def test_parity_swap_is_a_morphism_and_wrong_infinity_is_not():
    e = arith(PARITY)
    shift = PiecewiseArithMap.shift(1)
    assert check_cmorphism(e, e, shift, _ymap(PARITY, PARITY, shift, [1, 0])).ok
    rep = check_cmorphism(e, e, shift, _ymap(PARITY, PARITY, shift, [0, 1]))
    assert not rep.get("continuity at inf_e").passed
    assert rep.get("continuity at inf_e").witness[0] == "inf_e"


def test_constant_class_is_not_continuous():
    e = arith(ONE)
    const = PiecewiseArithMap(1, (3,), scales=(0,))
    rep = check_cmorphism(e, e, const, _ymap(ONE, ONE, const, [0]))
    assert not rep.get("continuity at inf").passed


def test_finite_morphisms():
    e, e2 = Compactification.finite(2), Compactification.finite(3)
    assert check_cmorphism(e, e2, [0, 2], [0, 2]).ok
    assert not check_cmorphism(e, e2, [0, 2], [0, 1]).ok
    assert not check_cmorphism(e, e2, [0, 3], [0, 3]).ok
    assert not check_cmorphism(e, arith(ONE), [0], None).ok


def test_doubling_is_not_an_isomorphism():
    e = arith(ONE)
    double = PiecewiseArithMap.affine(2)
    res = is_iso_in_c(e, e, double, _ymap(ONE, ONE, double, [0]))
    assert res.report.get("is a morphism").passed
    assert not res.iso and res.inverse is None
    assert res.report.get("f bijective").witness == ("missed 1",)


def test_parity_swap_is_its_own_inverse():
    e = arith(PARITY)
    shift = PiecewiseArithMap(2, (1, -1))
    res = is_iso_in_c(e, e, shift, _ymap(PARITY, PARITY, shift, [1, 0]))
    assert res.iso
    assert [res.inverse.f(n) for n in range(8)] == [1, 0, 3, 2, 5, 4, 7, 6]


def test_finite_isomorphisms_are_permutations():
    e = Compactification.finite(3)
    for f in itertools.product(range(3), repeat=3):
        assert is_iso_in_c(e, e, list(f), list(f)).iso == (sorted(f) == [0, 1, 2])


def test_finite_composition():
    e = Compactification.finite(3)
    m = compose_c(e, CMorphism([1, 2, 0], [1, 2, 0]), CMorphism([2, 0, 1], [2, 0, 1]))
    assert m.f == [0, 1, 2] and m.g == [0, 1, 2]


# equivalence and the classical order


PARTITIONS = [arith(Y) for Y in partition_compactifications(4)]


def test_there_are_fifteen_partition_compactifications():
    assert len(PARTITIONS) == 15


def test_equivalence_is_equality_of_partitions():
    for a, b in itertools.product(PARTITIONS, repeat=2):
        assert is_equivalent(a, b).holds == (a.Y == b.Y)
    assert is_equivalent(arith(ONE), arith(ArithCompactification.from_partition(4, [range(4)]))).holds
    assert not is_equivalent(arith(ONE), arith(PARITY)).holds


def test_classical_order_is_a_partial_order_with_top():
    leq = {(i, j): leq_classical(a, b).holds
           for (i, a), (j, b) in itertools.product(enumerate(PARTITIONS), repeat=2)}
    n = len(PARTITIONS)
    assert all(leq[i, i] for i in range(n))
    for i, j, k in itertools.product(range(n), repeat=3):
        if leq[i, j] and leq[j, k]:
            assert leq[i, k]
    for i, j in itertools.product(range(n), repeat=2):
        if i != j:
            assert not (leq[i, j] and leq[j, i])
    top = [j for j in range(n) if all(leq[i, j] for i in range(n))]
    assert [PARTITIONS[j].Y.k for j in top] == [4]


def test_order_witnesses():
    v = leq_classical(arith(PARITY), arith(Y_PRIME))
    assert not v.holds and v.witness["split block"] in Y_PRIME.labels
    v = leq_classical(arith(ONE), arith(PARITY))
    assert v.holds and v.witness["collapse"] == {"inf_e": "inf", "inf_o": "inf"}


# the golden example: iso in C without equivalence


def test_example_bundle():
    x = example33()
    assert x.closures() == {"Y": "{} ++ period 4 residues {0,3} from 0 + {inf_e,inf_o}",
                            "Y'": "{} ++ period 4 residues {0,3} from 0 + {inf_1}"}
    assert x.verdicts() == {"checkCMorphism": "pass", "isIsoInC": True, "isEquivalent": False}
    assert x.equivalent.witness["separating residues"] == [0, 2]
    assert check_bijection(x.f).bijective


def test_example_iso_found_by_search_without_equivalence():
    x = example33()
    isos = iso_search(x.e, x.e2, 4)
    assert isos
    assert not is_equivalent(x.e, x.e2).holds


# the dual side: completeness, compatibility and maximality


def test_pullback_along_a_point_sent_to_infinity_is_not_complete():
    g = _ymap(ONE, ONE, PiecewiseArithMap.identity(), [0], ((0, 0),))
    A = ROFragment(ONE, 4, 4, 8)
    gstar = DVMorphism.from_rule(A, A, g.star, "g*")
    assert check_morphism(gstar).ok
    assert not complete_boolean_check(gstar).passed


def test_embedding_inverse_is_complete():
    alpha = functor_E_obj(arith(PARITY), 4, 4, 8).alpha
    assert complete_boolean_check(alpha).passed


def test_smaller_image_is_an_extension_but_not_compatible():
    B = ArithPowerset(4, 4, 8)
    small = DVMorphism.from_rule(ROFragment(PARITY, 4, 2, 8), B, lambda u: u.trace, "small")
    full = functor_E_obj(arith(PARITY), 4, 4, 8).alpha
    assert check_extension(small).ok
    v = compatible(full, small)
    assert not v.holds and v.witness["only in image of"] == full.name
    rep = lemma62_audit(full, small)
    assert not rep.get("equal bases").passed
    assert rep.get("bases agree with compatibility").passed


def test_example_pair_has_equal_bases():
    a = functor_E_obj(arith(PARITY), 4, 4, 8).alpha
    b = functor_E_obj(arith(Y_PRIME), 4, 4, 8).alpha
    assert compatible(a, b).holds
    assert lemma62_audit(a, b).ok


def test_all_partitions_share_one_image():
    # every compactification of a discrete space is compatible with every other
    fam = partition_family(4, 4, 4, 8)
    for (na, a), (nb, b) in itertools.combinations(fam[:6], 2):
        assert compatible(a, b).holds, (na, nb)
        assert lemma62_audit(a, b).ok


def test_singleton_partition_is_maximal_and_parity_is_not():
    fam = partition_family(4, 4, 4, 8)
    top = functor_E_obj(arith(ArithCompactification.singleton_partition(4)), 4, 4, 8).alpha
    rep = is_maximal_relative(top, fam)
    assert rep.ok and len(rep.checks) == 15
    assert all(c.witness and c.witness[0].startswith("pullback") for c in rep.checks)
    par = functor_E_obj(arith(PARITY), 4, 4, 8).alpha
    rep = is_maximal_relative(par, fam)
    assert not rep.ok
    assert sum(not c.passed for c in rep.checks) == 13


def test_finite_maximality_uses_preimages():
    alpha = functor_E_obj(Compactification.finite(2)).alpha
    swap = preimage_morphism(FinDeVries(2), FinDeVries(2), [1, 0], "swap")
    assert is_maximal_relative(alpha, [("swap", swap), ("identity", alpha)]).ok


# isomorphism search and the Stone-Cech analogue


def test_shift_bijections_are_bijections():
    maps = shift_bijections(2)
    assert all(check_bijection(f).bijective for f in maps)
    probe = [tuple(f(n) for n in range(12)) for f in maps]
    assert len(set(probe)) == len(probe)
    assert tuple(range(12)) in probe


@pytest.mark.parametrize("Y,expect", [(ArithCompactification.singleton_partition(4), True),
                                      (PARITY, False)], ids=["singletons", "parity"])
def test_iso_equivalence_and_maximality_coincide(Y, expect):
    rep = theorem34_audit(arith(Y), P=4)
    assert rep.ok, rep.text()
    assert rep.info["maximal"] is rep.info["iso found"] is rep.info["equivalent"] is expect


def test_finite_stone_cech_audit():
    rep = theorem34_audit(Compactification.finite(3))
    assert rep.ok and rep.info["maximal"] and rep.info["iso"]
