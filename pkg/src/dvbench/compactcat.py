"""The category of compactifications, equivalence and relative maximality.

Arithmetic compactifications of N are compared through their partitions of
residues at a common period.  Maximality of an extension is decided only
relative to an explicit family and an explicit space of candidate maps, and
every report says which.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

import numpy as np

from .devries import (DVMorphism, FinDeVries, ROFragment, check_morphism, preimage_morphism,
                      star_compose)
from .duality import Compactification, alpha_star_filter, functor_E_obj
from .report import Check, Report
from .setalg import (ArithSet, PiecewiseArithMap, check_bijection, compose, format_arith,
                     format_map, lcm, preimage, same_function)
from .topology import (ArithCompactification, YMap, YSubset, closure,
                       format_compactification, format_ysubset, partition_compactifications, ro)

EXTRAPOLATION = "relative Stone-Cech: singleton partition at the universe period (extrapolation)"


@dataclass(frozen=True)
class CMorphism:
    """``(f, g)``: a map of base spaces and a map of targets."""

    f: Any
    g: Any


# ---------------------------------------------------------------------------
# morphisms


def _continuity(e: Compactification, e2: Compactification, g: YMap) -> list[Check]:
    Y, Y2 = e.Y, e2.Y
    out = []
    for i, label in enumerate(Y.labels):
        p = g(("inf", i))
        Ni = Y.block_set(i)
        if p[0] == "inf":
            target = Y2.block_set(p[1])
            hit = preimage(g.nat, target)
            ovr = [n for n, j in g.to_infinity if j == p[1]]
            hit = hit | ArithSet.finite(ovr)
        else:
            hit = preimage(g.nat, ArithSet.finite([p[1]]))
        stray = Ni - hit
        ok = stray.is_finite()
        wit: tuple[str, ...] = ()
        if not ok:
            wit = (label, format_arith(stray))
        else:
            # the classes accumulating at inf_i must not collapse onto a natural
            for r in sorted(Y.blocks[i]):
                for s in range(lcm(Y.period, g.nat.modulus)):
                    if s % Y.period == r and g.nat.scales[s % g.nat.modulus] == 0:
                        ok, wit = False, (label, f"class {s} mod {lcm(Y.period, g.nat.modulus)} is constant")
                        break
                if not ok:
                    break
        out.append(Check(f"continuity at {label}", ok, wit))
    return out


def check_cmorphism(e: Compactification, e2: Compactification, f: Any, g: Any) -> Report:
    """Continuity of ``g`` and commutation ``g . e = e2 . f``."""
    rep = Report("compactification morphism")
    if e.is_finite != e2.is_finite:
        rep.add(Check("same universe", False, ("finite vs arithmetic",)))
        return rep
    if e.is_finite:
        n, n2 = e.target.size, e2.target.size  # type: ignore[union-attr]
        f, g = list(f), list(g)
        ok_shape = len(f) == n and len(g) == n and all(0 <= v < n2 for v in f + g)
        rep.add(Check("maps well defined", ok_shape))
        if ok_shape:
            bad = [x for x in range(n) if f[x] != g[x]]
            rep.add(Check("g.e = e2.f", not bad, tuple(str(x) for x in bad[:1])))
        return rep
    if g.source != e.Y or g.target != e2.Y:
        rep.add(Check("maps well defined", False, ("g does not go from Y to Y2",)))
        return rep
    rep.extend(_continuity(e, e2, g))
    bad = same_function(g.nat, f)
    over = [n for n, _ in g.to_infinity]
    if over and (bad is None or over[0] < bad):
        bad = over[0]
    rep.add(Check("g.e = e2.f", bad is None, () if bad is None else (str(bad),)))
    return rep


@dataclass
class IsoResult:
    iso: bool
    inverse: CMorphism | None
    report: Report


def _identity_check(e: Compactification, f: Any, g: Any) -> bool:
    if e.is_finite:
        return list(f) == list(range(len(f))) and list(g) == list(range(len(g)))
    ident = YMap.identity(e.Y)
    return (same_function(f, PiecewiseArithMap.identity()) is None
            and same_function(g.nat, ident.nat) is None and not g.to_infinity
            and g.at_infinity == ident.at_infinity)


def compose_c(e: Compactification, m2: CMorphism, m1: CMorphism) -> CMorphism:
    """``m2 . m1`` on ``e``'s universe."""
    if e.is_finite:
        return CMorphism([m2.f[v] for v in m1.f], [m2.g[v] for v in m1.g])
    g1, g2 = m1.g, m2.g
    if g1.to_infinity or g2.to_infinity:
        raise ValueError("composition with naturals sent to infinity is not supported")
    at_inf = tuple(g2(p) for p in g1.at_infinity)
    return CMorphism(compose(m2.f, m1.f), YMap(g1.source, g2.target, compose(g2.nat, g1.nat), at_inf))


def is_iso_in_c(e: Compactification, e2: Compactification, f: Any, g: Any) -> IsoResult:
    """Both maps are bijections and the inverse pair is again a morphism."""
    rep = Report("isomorphism in C")
    base = check_cmorphism(e, e2, f, g)
    rep.add(Check("is a morphism", base.ok, tuple(c.axiom for c in base.failures())[:1]))
    if not base.ok:
        return IsoResult(False, None, rep)
    if e.is_finite:
        n2 = e2.target.size  # type: ignore[union-attr]
        f = list(f)
        ok = sorted(f) == list(range(n2)) and len(f) == n2
        rep.add(Check("f bijective", ok))
        if not ok:
            return IsoResult(False, None, rep)
        inv = [f.index(y) for y in range(n2)]
        inverse = CMorphism(inv, list(inv))
    else:
        br = check_bijection(f)
        wit: tuple[str, ...] = ()
        if not br.bijective:
            wit = (f"collision {br.collision}",) if br.collision else (f"missed {br.missed}",)
        rep.add(Check("f bijective", br.bijective, wit))
        if not br.bijective:
            return IsoResult(False, None, rep)
        infs = [p for p in g.at_infinity]
        ok = (not g.to_infinity and all(p[0] == "inf" for p in infs)
              and sorted(p[1] for p in infs) == list(range(e2.Y.k)) and e.Y.k == e2.Y.k)
        rep.add(Check("g bijective on infinity", ok))
        if not ok:
            return IsoResult(False, None, rep)
        inv_inf = [None] * e.Y.k
        for i, p in enumerate(infs):
            inv_inf[p[1]] = ("inf", i)
        ginv = YMap(e2.Y, e.Y, br.inverse, tuple(inv_inf))  # type: ignore[arg-type]
        inverse = CMorphism(br.inverse, ginv)
    back = check_cmorphism(e2, e, inverse.f, inverse.g)
    rep.add(Check("inverse is a morphism", back.ok, tuple(c.axiom for c in back.failures())[:1]))
    if back.ok:
        there = compose_c(e, inverse, CMorphism(f, g))
        rep.add(Check("inverse composes to identity", _identity_check(e, there.f, there.g)))
    return IsoResult(rep.ok, inverse if rep.ok else None, rep)


# ---------------------------------------------------------------------------
# classical order and equivalence


def residue_labels(Y: ArithCompactification, q: int) -> list[int]:
    """Block index of each residue mod ``q`` (``q`` a multiple of the period)."""
    return [Y.block_of(r) for r in range(q)]


def _partition(labels: Sequence[int]) -> set[frozenset[int]]:
    blocks: dict[int, set[int]] = {}
    for r, b in enumerate(labels):
        blocks.setdefault(b, set()).add(r)
    return {frozenset(v) for v in blocks.values()}


def _fmt_partition(p: set[frozenset[int]]) -> str:
    return "/".join("{" + ",".join(map(str, sorted(b))) + "}" for b in sorted(p, key=min))


@dataclass
class Verdict:
    holds: bool
    witness: dict[str, Any] = field(default_factory=dict)


def is_equivalent(e: Compactification, e2: Compactification) -> Verdict:
    """Equal induced partitions of residues at the common period."""
    if e.is_finite != e2.is_finite:
        raise ValueError("compactifications of different base spaces")
    if e.is_finite:
        same = e.target.size == e2.target.size  # type: ignore[union-attr]
        return Verdict(same, {"homeomorphism": "identity"} if same else {"sizes": [
            e.target.size, e2.target.size]})  # type: ignore[union-attr]
    q = lcm(e.Y.period, e2.Y.period)
    a, b = residue_labels(e.Y, q), residue_labels(e2.Y, q)
    pa, pb = _partition(a), _partition(b)
    if pa == pb:
        h = {e2.Y.labels[b[r]]: e.Y.labels[a[r]] for r in range(q)}
        return Verdict(True, {"period": q, "homeomorphism": dict(sorted(h.items()))})
    for r, s in itertools.combinations(range(q), 2):
        if (a[r] == a[s]) != (b[r] == b[s]):
            return Verdict(False, {"period": q, "partitions": [_fmt_partition(pa), _fmt_partition(pb)],
                                   "separating residues": [r, s]})
    raise AssertionError("different partitions are separated by some pair")


def leq_classical(e: Compactification, e2: Compactification) -> Verdict:
    """``e <= e2``: ``e2``'s partition refines ``e``'s; the witness collapses ``e2`` onto ``e``."""
    if e.is_finite != e2.is_finite:
        raise ValueError("compactifications of different base spaces")
    if e.is_finite:
        return is_equivalent(e, e2)
    q = lcm(e.Y.period, e2.Y.period)
    a, b = residue_labels(e.Y, q), residue_labels(e2.Y, q)
    collapse: dict[str, str] = {}
    for r in range(q):
        src, dst = e2.Y.labels[b[r]], e.Y.labels[a[r]]
        if collapse.setdefault(src, dst) != dst:
            return Verdict(False, {"period": q, "split block": src,
                                   "targets": sorted({collapse[src], dst})})
    return Verdict(True, {"period": q, "collapse": dict(sorted(collapse.items()))})


# ---------------------------------------------------------------------------
# the golden example: iso in C without equivalence


@dataclass
class Example33:
    Y: ArithCompactification
    Y2: ArithCompactification
    e: Compactification
    e2: Compactification
    f: PiecewiseArithMap
    g: YMap
    A: ArithSet
    morphism: Report
    iso: IsoResult
    equivalent: Verdict

    def closures(self) -> dict[str, str]:
        s = YSubset(self.A)
        return {"Y": format_ysubset(self.Y, closure(self.Y, s)),
                "Y'": format_ysubset(self.Y2, closure(self.Y2, s))}

    def verdicts(self) -> dict[str, Any]:
        return {"checkCMorphism": "pass" if self.morphism.ok else "fail",
                "isIsoInC": self.iso.iso, "isEquivalent": self.equivalent.holds}

    def to_dict(self) -> dict[str, Any]:
        inv = self.iso.inverse
        return {
            "objects": {
                "X": "N",
                "Y": format_compactification(self.Y),
                "Y'": format_compactification(self.Y2),
                "f": format_map(self.f),
                "g": {"on N": format_map(self.g.nat),
                      "at infinity": {self.Y.labels[i]: self.Y2.labels[p[1]]
                                      for i, p in enumerate(self.g.at_infinity)}},
                "A": format_arith(self.A),
                "f inverse": format_map(inv.f) if inv else None,
            },
            "closures": self.closures(),
            "verdicts": self.verdicts(),
            "checks": [c.to_dict() for c in self.morphism.checks + self.iso.report.checks],
            "equivalence witness": self.equivalent.witness,
        }


def example33() -> Example33:
    Y = ArithCompactification.parity()
    Y2 = ArithCompactification.from_partition(4, [{0, 3}, {1, 2}])
    e, e2 = Compactification.arithmetic(Y, "e"), Compactification.arithmetic(Y2, "e'")
    f = PiecewiseArithMap(4, (0, 0, 1, -1))
    g = YMap.extend(Y, Y2, f, {"inf_e": "inf_1", "inf_o": "inf_2"})
    A = ArithSet.progression(4, 0, 3)
    return Example33(Y, Y2, e, e2, f, g, A, check_cmorphism(e, e2, f, g),
                     is_iso_in_c(e, e2, f, g), is_equivalent(e, e2))


# ---------------------------------------------------------------------------
# compatibility


def _image_masks(alpha: DVMorphism) -> np.ndarray:
    return np.unique(alpha.require_masks())


def compatible(alpha: DVMorphism, gamma: DVMorphism) -> Verdict:
    """Equal images on the checked fragment."""
    if alpha.codomain != gamma.codomain:
        raise ValueError("extensions with different codomains")
    a, c = _image_masks(alpha), _image_masks(gamma)
    only_a = np.setdiff1d(a, c)
    only_c = np.setdiff1d(c, a)
    if not len(only_a) and not len(only_c):
        return Verdict(True, {"image size": int(len(a))})
    B = alpha.codomain
    if len(only_a) and (not len(only_c) or only_a[0] < only_c[0]):
        return Verdict(False, {"only in image of": alpha.name, "element": B.fmt(int(only_a[0]))})
    return Verdict(False, {"only in image of": gamma.name, "element": B.fmt(int(only_c[0]))})


def induced_basis(alpha: DVMorphism) -> set[int]:
    """``alpha_*^-1(zeta(a))`` for every ``a``, as bitmasks over checked atoms."""
    B = alpha.codomain
    atoms = range(B.n if isinstance(B, FinDeVries) else B.Tprime)  # type: ignore[attr-defined]
    cols = np.stack([alpha_star_filter(alpha, x) for x in atoms], axis=1)
    weights = np.int64(1) << np.arange(cols.shape[1], dtype=np.int64)
    return set(int(v) for v in (cols.astype(np.int64) * weights).sum(axis=1))


def lemma62_audit(alpha: DVMorphism, gamma: DVMorphism) -> Report:
    """Equal induced topologies on the checked atoms iff compatible."""
    rep = Report(f"induced topologies of {alpha.name} and {gamma.name}")
    ba, bc = induced_basis(alpha), induced_basis(gamma)
    diff = sorted(ba ^ bc)
    wit: tuple[str, ...] = ()
    if diff:
        who = alpha.name if diff[0] in ba else gamma.name
        members = [str(x) for x in range(64) if diff[0] >> x & 1]
        wit = (who, "{" + ",".join(members) + "}")
    same = not diff
    comp = compatible(alpha, gamma)
    rep.add(Check("equal bases", same, wit, alpha.mode, alpha.bounds))
    rep.add(Check("bases agree with compatibility", same == comp.holds, (), alpha.mode, alpha.bounds))
    rep.info["compatible"] = comp.holds
    return rep


# ---------------------------------------------------------------------------
# relative maximality


@dataclass
class DeltaCandidate:
    label: str
    delta: DVMorphism


def _arith_candidates(A: ROFragment, C: ROFragment) -> Iterator[DeltaCandidate]:
    """Pullbacks ``g^*`` along continuous ``g : Y_A -> Y_C`` fixing N, then the
    regularized-trace map ``U -> ro_A(trace U)``."""
    YA, YC = A.Y, C.Y
    eA, eC = Compactification.arithmetic(YA), Compactification.arithmetic(YC)
    ident = PiecewiseArithMap.identity()
    for h in itertools.product(range(YC.k), repeat=YA.k):
        g = YMap(YA, YC, ident, tuple(("inf", j) for j in h))
        if not check_cmorphism(eA, eC, ident, g).ok:
            continue
        label = "pullback along " + ", ".join(f"{YA.labels[i]}->{YC.labels[j]}"
                                              for i, j in enumerate(h))
        yield DeltaCandidate(label, DVMorphism.from_rule(C, A, g.star, "delta"))
    yield DeltaCandidate("regularized trace",
                         DVMorphism.from_rule(C, A, lambda u: ro(YA, u.trace), "delta"))


def _finite_candidates(A: FinDeVries, C: FinDeVries) -> Iterator[DeltaCandidate]:
    for h in itertools.product(range(C.n), repeat=A.n):
        yield DeltaCandidate(f"preimage of {list(h)}", preimage_morphism(C, A, list(h), "delta"))


def _search_delta(alpha: DVMorphism, gamma: DVMorphism) -> tuple[str | None, int]:
    A, C = alpha.domain, gamma.domain
    if isinstance(A, FinDeVries) and isinstance(C, FinDeVries):
        cands: Iterator[DeltaCandidate] = _finite_candidates(A, C)
    elif isinstance(A, ROFragment) and isinstance(C, ROFragment):
        cands = _arith_candidates(A, C)
    else:
        return None, 0
    tried = 0
    for cand in cands:
        tried += 1
        if not check_morphism(cand.delta).ok:
            continue
        comp = star_compose(alpha, cand.delta)
        if comp.masks is not None and comp.same_as(gamma) is None:
            return cand.label, tried
    return None, tried


def is_maximal_relative(alpha: DVMorphism, family: Sequence[tuple[str, DVMorphism]]) -> Report:
    """For each compatible member ``gamma`` of ``family``, search a de Vries
    morphism ``delta`` with ``alpha * delta = gamma`` on the fragment."""
    rep = Report(f"maximality of {alpha.name} relative to {len(family)} extensions")
    mode, bounds = alpha.mode, alpha.bounds
    for name, gamma in family:
        if gamma.codomain != alpha.codomain:
            raise ValueError(f"{name} has a different codomain")
        comp = compatible(alpha, gamma)
        if not comp.holds:
            rep.add(Check(f"delta for {name}", True, (), mode, bounds, "not compatible, no delta needed"))
            continue
        found, searched = _search_delta(alpha, gamma)
        if found is not None:
            rep.add(Check(f"delta for {name}", True, (found,), mode, bounds))
        else:
            rep.add(Check(f"delta for {name}", False, (f"{searched} candidates exhausted",),
                          mode, bounds))
    rep.info["family size"] = len(family)
    rep.info["candidate space"] = ("pullbacks along continuous maps fixing N, plus the "
                                   "regularized trace" if isinstance(alpha.domain, ROFragment)
                                   else "preimages of all point maps")
    rep.info["claim"] = "relative to the listed family and candidate space only"
    return rep


def partition_family(period: int, T: int, P: int, Tprime: int) -> list[tuple[str, DVMorphism]]:
    out = []
    for Y in partition_compactifications(period):
        ext = functor_E_obj(Compactification.arithmetic(Y), T, P, Tprime)
        out.append((format_compactification(Y), ext.alpha))
    return out


# ---------------------------------------------------------------------------
# isomorphism search and the Stone-Cech analogue


def shift_bijections(P: int) -> list[PiecewiseArithMap]:
    """Distinct bijections of N among shift maps with modulus <= P, offsets in
    [-P, P] and threshold in {0, P, 2P}; the initial table is the increasing
    list of values the tail misses."""
    seen: dict[tuple[int, ...], PiecewiseArithMap] = {}
    probe = 2 * P + 2 * math_lcm_upto(P) + 1
    for m in range(1, P + 1):
        for offs in itertools.product(range(-P, P + 1), repeat=m):
            if sorted((r + o) % m for r, o in enumerate(offs)) != list(range(m)):
                continue
            for t in (0, P, 2 * P):
                starts = [t + (r - t) % m for r in range(m)]
                if any(s + offs[r] < 0 for r, s in enumerate(starts)):
                    continue
                missed = sorted(v for r in range(m)
                                for v in range((r + offs[r]) % m, starts[r] + offs[r], m))
                if len(missed) != t:
                    continue
                f = PiecewiseArithMap(m, offs, t, tuple(missed))
                if not check_bijection(f).bijective:
                    continue
                key = tuple(f(n) for n in range(probe))
                seen.setdefault(key, f)
    return [seen[k] for k in sorted(seen)]


def math_lcm_upto(P: int) -> int:
    out = 1
    for m in range(1, P + 1):
        out = lcm(out, m)
    return out


def _infinity_map(Y: ArithCompactification, Y2: ArithCompactification,
                  f: PiecewiseArithMap) -> tuple[int, ...] | None:
    """The unique continuous extension of ``f`` on infinity points, if any."""
    q = lcm(lcm(Y.period, Y2.period), f.modulus)
    h: list[int | None] = [None] * Y.k
    for r in range(q):
        n = f.threshold + (r - f.threshold) % q + q
        j = Y2.block_of(f(n))
        i = Y.block_of(n)
        if h[i] is None:
            h[i] = j
        elif h[i] != j:
            return None
    return tuple(h)  # type: ignore[arg-type]


def iso_search(e: Compactification, target: Compactification, P: int,
               maps: list[PiecewiseArithMap] | None = None) -> list[CMorphism]:
    """Isomorphisms ``(f, g) : e -> target`` in the bounded search space."""
    maps = shift_bijections(P) if maps is None else maps
    out = []
    if e.Y.k != target.Y.k:
        return out
    for f in maps:
        h = _infinity_map(e.Y, target.Y, f)
        if h is None or sorted(h) != list(range(target.Y.k)):
            continue
        g = YMap(e.Y, target.Y, f, tuple(("inf", j) for j in h))
        if is_iso_in_c(e, target, f, g).iso:
            out.append(CMorphism(f, g))
    return out


def theorem34_audit(e: Compactification, P: int = 4, target: Compactification | None = None,
                    maps: list[PiecewiseArithMap] | None = None,
                    with_maximality: bool = True, T: int = 4, Tprime: int = 8) -> Report:
    """Relate iso in C, equivalence and maximality of ``e`` against the relative
    Stone-Cech compactification (or ``target``)."""
    if e.is_finite:
        n = e.target.size  # type: ignore[union-attr]
        s = Compactification.finite(n, "beta")
        rep = Report(f"Stone-Cech audit for discrete {n}")
        ident = list(range(n))
        c2 = is_iso_in_c(e, s, ident, ident).iso
        c3 = is_equivalent(e, s).holds
        alpha = functor_E_obj(e).alpha
        c1 = is_maximal_relative(alpha, [("identity", alpha)]).ok
        rep.add(Check("beta X = X", True, (), note="finite discrete spaces are compact"))
        rep.add(Check("conditions coincide", c1 == c2 == c3, (f"maximal={c1}", f"iso={c2}",
                                                              f"equivalent={c3}")))
        rep.info.update({"maximal": c1, "iso": c2, "equivalent": c3})
        return rep
    relmax = target is None
    if target is None:
        target = Compactification.arithmetic(ArithCompactification.singleton_partition(P), "s_rel")
    maps = shift_bijections(P) if maps is None else maps
    isos = iso_search(e, target, P, maps)
    eq = is_equivalent(e, target).holds
    rep = Report(f"iso versus equivalence for {format_compactification(e.Y)}")
    bounds = {"P": P, "candidates": len(maps)}
    if relmax:
        rep.add(Check("iso implies equivalent", not isos or eq,
                      () if not isos or eq else (format_map(isos[0].f),), "bounded", bounds,
                      EXTRAPOLATION))
        if with_maximality:
            fam = partition_family(P, T, P, Tprime)
            alpha = functor_E_obj(e, T, P, Tprime).alpha
            mx = is_maximal_relative(alpha, fam).ok
            rep.add(Check("conditions coincide", mx == bool(isos) == eq,
                          (f"maximal={mx}", f"iso={bool(isos)}", f"equivalent={eq}"),
                          "bounded", {"T": T, "P": P, "Tprime": Tprime}))
            rep.info["maximal"] = mx
    rep.info["iso found"] = bool(isos)
    rep.info["equivalent"] = eq
    if isos:
        rep.info["first iso"] = format_map(isos[0].f)
    rep.info["search space"] = f"shift maps, modulus <= {P}, offsets in [-{P},{P}], threshold in {{0,{P},{2 * P}}}"
    return rep
