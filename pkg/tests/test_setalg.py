from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import WINDOW, arith_sets, brute, shift_maps
from dvbench.setalg import (ArithSet, FinSubset, PiecewiseArithMap, check_bijection, compose,
                            format_arith, format_map, frag_decode, frag_encode, frag_profiles,
                            frag_size, fragment, in_fragment, parse_arith, parse_map, preimage,
                            same_function)


@given(arith_sets(), arith_sets())
def test_boolean_ops_match_brute_force(a, b):
    assert brute(a | b) == brute(a) | brute(b)
    assert brute(a & b) == brute(a) & brute(b)
    assert brute(a - b) == brute(a) - brute(b)
    assert brute(~a) == frozenset(range(WINDOW)) - brute(a)


@given(arith_sets(), arith_sets())
def test_equality_is_set_equality(a, b):
    assert (a == b) == (brute(a) == brute(b))
    assert (a <= b) == (brute(a) <= brute(b))


@given(arith_sets())
def test_canonical_form_is_minimal(s):
    # no smaller period or threshold describes the same set
    for d in range(1, s.period):
        if s.period % d == 0:
            assert any((n in s) != (n + d in s) for n in range(s.threshold, s.threshold + 2 * s.period))
    if s.threshold:
        n = s.threshold - 1
        assert (n in s) != (n + s.period in s)


@given(arith_sets())
def test_literal_round_trip(s):
    assert parse_arith(format_arith(s)) == s


def test_literal_examples():
    s = parse_arith("{} ++ period 4 residues {0,3} from 0")
    assert s == ArithSet.progression(4, 0, 3)
    assert sorted(brute(s, 12)) == [0, 3, 4, 7, 8, 11]
    evens_from_2 = ArithSet.make(0, 2, {0}) - ArithSet.finite([0])
    assert parse_arith("{1} ++ period 2 residues {0} from 2") == evens_from_2 | ArithSet.finite([1])
    with pytest.raises(ValueError):
        parse_arith("{1,2} ++ period")
    with pytest.raises(ValueError):
        ArithSet.make(2, 3, [3])


def test_finite_and_cofinite():
    assert ArithSet.finite([1, 5]).is_finite()
    assert (~ArithSet.finite([1, 5])).is_cofinite()
    assert not ArithSet.progression(2, 0).is_finite()


def test_fin_subset_ops():
    a, b = FinSubset.of(4, [0, 1]), FinSubset.of(4, [1, 2])
    assert (a | b).members == {0, 1, 2}
    assert (a & b).members == {1}
    assert (~a).members == {2, 3}
    assert (a & b) <= a
    with pytest.raises(ValueError):
        FinSubset.of(2, [3])


# fragments


@pytest.mark.parametrize("T,P", [(0, 1), (2, 2), (3, 4), (4, 2)])
def test_fragment_codec_is_a_bijection(T, P):
    sets = fragment(T, P)
    assert len(sets) == frag_size(T, P)
    assert len(set(sets)) == len(sets)
    for m, s in enumerate(sets):
        assert frag_encode(T, P, s) == m
        assert in_fragment(s, T, P)


def test_fragment_profiles_match_decoding():
    T, P, W = 3, 4, 12
    prof = frag_profiles(T, P, W)
    for m in range(frag_size(T, P)):
        assert int(prof[m]) == frag_decode(T, P, m).window(W)


def test_encode_rejects_sets_outside():
    with pytest.raises(ValueError):
        frag_encode(2, 2, ArithSet.finite([5]))
    with pytest.raises(ValueError):
        frag_encode(4, 2, ArithSet.progression(3, 0))


# piecewise maps


EX33 = PiecewiseArithMap(4, (0, 0, 1, -1))


@given(shift_maps(), arith_sets())
def test_preimage_matches_brute_force(f, s):
    pre = preimage(f, s)
    assert brute(pre, 40) == frozenset(n for n in range(40) if f(n) in s)


@given(shift_maps(), shift_maps())
def test_compose_matches_pointwise(f, g):
    h = compose(g, f)
    assert all(h(n) == g(f(n)) for n in range(60))
    assert same_function(h, h) is None


def test_same_function_reports_least_disagreement():
    assert same_function(PiecewiseArithMap.shift(1), PiecewiseArithMap.identity()) == 0
    two = PiecewiseArithMap(2, (0, 0))
    assert same_function(two, PiecewiseArithMap.identity()) is None


def test_map_literal_round_trip():
    for f in (EX33, PiecewiseArithMap.affine(2), PiecewiseArithMap(2, (1, -1), 2, (1, 0))):
        assert parse_map(format_map(f)) == f


def test_example_map_is_an_involution():
    rep = check_bijection(EX33)
    assert rep.bijective
    assert all(rep.inverse(EX33(n)) == n for n in range(100))
    assert all(EX33(EX33(n)) == n for n in range(100))


def test_non_bijections_have_witnesses():
    assert check_bijection(PiecewiseArithMap.shift(1)).missed == 0
    assert check_bijection(PiecewiseArithMap.affine(2)).missed == 1
    coll = check_bijection(PiecewiseArithMap(2, (0, -1))).collision
    assert coll is not None and coll[0] != coll[1]


@settings(max_examples=50)
@given(st.permutations(range(4)), st.integers(0, 2))
def test_class_permutations_are_bijective(perm, k):
    offs = tuple(perm[r] - r + 4 * k for r in range(4))
    missed = sorted(set(range(4 * k)))
    f = PiecewiseArithMap(4, offs)
    rep = check_bijection(f)
    assert rep.bijective == (k == 0)
    if not rep.bijective:
        assert rep.missed in missed
