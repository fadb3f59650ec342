"""Dual constructions: ends, Tarski duality, the functors E and C, and audits.

Finite algebras get exact ends (maximal proper round filters).  For a
regular-open fragment the ends are the points of the registered
compactification, ``y -> {U : y in U}``; they are never searched for in the
infinite algebra, only realized and then audited on the fragment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .devries import (ArithPowerset, DVMorphism, FinDeVries, ProxAlgebra, ROFragment,
                      check_morphism, complete_boolean_check, membership,
                      order_matrix, plain_compose, preimage_morphism, prox_matrix, star_compose)
from .report import Check, Report
from .setalg import ArithSet, fmt_mask, format_arith, preimage
from .topology import ArithCompactification, FinDiscrete, YSubset

# ---------------------------------------------------------------------------
# compactifications as objects


@dataclass(frozen=True)
class Compactification:
    """``e : X -> Y``: a finite discrete space onto itself, or N into ``Y``."""

    target: FinDiscrete | ArithCompactification
    name: str = "e"

    @classmethod
    def finite(cls, n: int, name: str = "e") -> "Compactification":
        return cls(FinDiscrete(n), name)

    @classmethod
    def arithmetic(cls, Y: ArithCompactification, name: str = "e") -> "Compactification":
        return cls(Y, name)

    @property
    def is_finite(self) -> bool:
        return isinstance(self.target, FinDiscrete)

    @property
    def Y(self) -> ArithCompactification:
        if self.is_finite:
            raise ValueError("finite compactification has no points at infinity")
        return self.target  # type: ignore[return-value]

    def describe(self) -> str:
        if self.is_finite:
            return f"identity of discrete {self.target.size}"  # type: ignore[union-attr]
        return f"N -> {self.target}"


# ---------------------------------------------------------------------------
# round filters and ends


@dataclass(frozen=True)
class RoundFilter:
    """An end: explicit masks (finite) or realized by a point of ``Y``."""

    members: frozenset[int] | None = None
    point: tuple | None = None

    def __contains__(self, mask: int) -> bool:
        if self.members is None:
            raise TypeError("realized end: membership is decided through its point")
        return int(mask) in self.members

    def generator(self) -> int:
        """Least element (the meet of all members)."""
        if not self.members:
            raise ValueError("empty filter")
        out = -1
        for m in self.members:
            out &= m
        return out


def _vec(A: ProxAlgebra, members: Any) -> np.ndarray:
    v = np.zeros(A.size, dtype=bool)
    v[np.fromiter(members, dtype=np.int64)] = True
    return v


def twohead_up(A: ProxAlgebra, S: Sequence[int]) -> frozenset[int]:
    """``{a : b well inside a for some b in S}``."""
    if not len(S):
        return frozenset()
    P = prox_matrix(A)
    rows = P[np.asarray(list(S), dtype=np.int64)]
    return frozenset(int(a) for a in np.flatnonzero(rows.any(axis=0)))


def is_round_filter(A: ProxAlgebra, members: frozenset[int]) -> bool:
    if not members:
        return False
    v = _vec(A, members)
    L = order_matrix(A)
    if (L[v] & ~v[None, :]).any():
        return False
    idx = np.flatnonzero(v)
    if not v[idx[:, None] & idx[None, :]].all():
        return False
    return twohead_up(A, sorted(members)) == members


def ends_of(A: FinDeVries) -> list[RoundFilter]:
    """Maximal proper round filters, ordered by generator.

    A filter of a finite Boolean algebra is principal, so the candidates are
    the ``up(m)`` for ``m != 0``.
    """
    L = order_matrix(A)
    P = prox_matrix(A)
    round_ups = []
    for m in range(1, A.size):
        F = L[m]
        if (P[F].any(axis=0) == F).all():
            round_ups.append((m, F))
    ends = []
    for m, F in round_ups:
        if not any((G & ~F).any() and not (F & ~G).any() for _, G in round_ups):
            ends.append(RoundFilter(frozenset(int(x) for x in np.flatnonzero(F))))
    return ends


def zeta(A: ProxAlgebra, a: int) -> Any:
    """Ends containing ``a``: indices into :func:`ends_of` (finite) or a point predicate."""
    if isinstance(A, FinDeVries):
        return [i for i, y in enumerate(ends_of(A)) if a in y]
    if isinstance(A, ROFragment):
        u = A.obj_of(a)
        return u.contains_point
    raise ValueError(f"no ends for {A.describe()}")


def end_of_point(A: ROFragment, point: tuple) -> np.ndarray:
    """``xi(y)`` restricted to the fragment, as a boolean vector over masks."""
    codes = A.codes
    if point[0] == "n":
        n = point[1]
        if n >= A.Tprime:
            raise ValueError(f"point {n} beyond the witness bound")
        return ((codes >> n) & 1).astype(bool)
    return ((codes >> (A.inf_shift + point[1])) & 1).astype(bool)


def rho_star_point(rho: DVMorphism, y: RoundFilter) -> RoundFilter:
    """``rho_*(y) = twohead_up(rho^-1(y))`` for finite algebras, checked to be an end."""
    A = rho.domain
    if not isinstance(A, FinDeVries) or not isinstance(rho.codomain, FinDeVries):
        raise ValueError("rho_* is computed exactly only on finite algebras")
    img = rho.require_masks()
    yv = _vec(rho.codomain, y.members)
    pre = np.flatnonzero(yv[img])
    out = RoundFilter(twohead_up(A, pre))
    if out not in ends_of(A):
        raise ValueError(f"{rho.name}_* of an end is not an end")
    return out


def rho_star(rho: DVMorphism) -> list[int]:
    """``rho_*`` as an index map from ends of the codomain to ends of the domain."""
    src = ends_of(rho.codomain)  # type: ignore[arg-type]
    dst = ends_of(rho.domain)  # type: ignore[arg-type]
    return [dst.index(rho_star_point(rho, y)) for y in src]


# ---------------------------------------------------------------------------
# Tarski duality for finite CABAs


def atoms_of(B: FinDeVries) -> list[int]:
    """Atoms found from the order: nonzero elements with only 0 strictly below."""
    L = order_matrix(B)
    below = L.sum(axis=0)
    return [int(b) for b in np.flatnonzero(below == 2)]


def sigma_plus(sigma: DVMorphism) -> list[int]:
    """``x -> meet{b : x <= sigma(b)}`` on atoms, as atom indices."""
    chk = complete_boolean_check(sigma)
    if not chk.passed:
        raise ValueError(f"{sigma.name} is not a complete Boolean homomorphism")
    B1, B2 = sigma.domain, sigma.codomain
    if not isinstance(B1, FinDeVries) or not isinstance(B2, FinDeVries):
        raise ValueError("Tarski duals are computed for finite algebras")
    img = sigma.require_masks()
    at1, at2 = atoms_of(B1), atoms_of(B2)
    out = []
    for x in at2:
        meet = B1.full
        for b in range(B1.size):
            if img[b] & x == x:
                meet &= b
        if meet not in at1:
            raise ValueError(f"sigma_+ of atom {fmt_mask(x)} is {fmt_mask(meet)}, not an atom")
        out.append(at1.index(meet))
    return out


def tarski_dual(sigma: DVMorphism) -> list[int]:
    """The point map dual to a complete Boolean homomorphism of finite CABAs."""
    return sigma_plus(sigma)


def eta(n: int) -> list[int]:
    """``x -> {x}``: points of an n-element set to atoms of its powerset."""
    return [1 << x for x in range(n)]


def vartheta(B: FinDeVries, b: int) -> int:
    """``b -> {atoms below b}``, as a bitmask over atom indices."""
    out = 0
    for j, x in enumerate(atoms_of(B)):
        if x & ~b == 0:
            out |= 1 << j
    return out


def vartheta_morphism(B: FinDeVries) -> DVMorphism:
    C = FinDeVries(len(atoms_of(B)))
    return DVMorphism.from_masks(B, C, [vartheta(B, b) for b in range(B.size)], "vartheta")


def preimage_of_point_map(A: FinDeVries, B: FinDeVries, f: Sequence[int]) -> DVMorphism:
    return preimage_morphism(A, B, f)


# ---------------------------------------------------------------------------
# extensions


@dataclass
class Extension:
    alpha: DVMorphism
    source: Compactification | None = None

    @property
    def evidence(self) -> dict[str, list[str]]:
        """For each checked atom, images whose meet is that atom."""
        return check_extension(self.alpha).info["evidence"]

    @property
    def domain(self) -> ProxAlgebra:
        return self.alpha.domain

    @property
    def codomain(self) -> ProxAlgebra:
        return self.alpha.codomain


def _codomain_atoms(B: ProxAlgebra) -> list[int]:
    if isinstance(B, FinDeVries):
        return list(range(B.n))
    if isinstance(B, ArithPowerset):
        return list(range(B.Tprime))
    raise ValueError("extensions must land in a powerset-type algebra")


def _candidate_images(alpha: DVMorphism) -> tuple[list[Any], list[str]]:
    """Images of the singleton candidates outside the fragment, as exact sets."""
    A, B = alpha.domain, alpha.codomain
    objs, labels = [], []
    for c in A.extra_candidates():
        try:
            objs.append(_as_set(B, alpha.apply(c)))
        except ValueError:
            continue
        labels.append(A.fmt_obj(c))
    return objs, labels


def _as_set(B: ProxAlgebra, obj: Any) -> Any:
    if isinstance(B, FinDeVries):
        return obj.bits
    return obj.trace if isinstance(obj, YSubset) else obj


def check_extension(alpha: DVMorphism) -> Report:
    """M1-M4, injectivity, atom-meet density, atom separation and coatom joins."""
    A, B = alpha.domain, alpha.codomain
    atoms = _codomain_atoms(B)
    mode, bounds = alpha.mode, alpha.bounds
    rep = Report(f"extension audit for {alpha.name}")
    rep.extend(check_morphism(alpha).checks)

    img = alpha.require_masks()
    order = np.argsort(img, kind="stable")
    dup = np.flatnonzero(img[order][1:] == img[order][:-1])
    if len(dup):
        pairs = sorted((int(min(order[i], order[i + 1])), int(max(order[i], order[i + 1])))
                       for i in dup)
        a, b = pairs[0]
        rep.add(Check("injective", False, (A.fmt(a), A.fmt(b)), mode, bounds))
    else:
        rep.add(Check("injective", True, (), mode, bounds))

    exact_fin = isinstance(B, FinDeVries)
    codes = np.asarray(alpha.codes, dtype=np.int64)
    bits = np.asarray(B.point_bits)[atoms]
    M = membership(B, codes)[:, atoms]
    cands, cand_labels = _candidate_images(alpha)

    def contains(s: Any, x: int) -> bool:
        return bool(s >> x & 1) if exact_fin else x in s

    MC = np.array([[contains(s, x) for x in atoms] for s in cands], dtype=bool)
    MC = MC.reshape(len(cands), len(atoms))
    every = np.concatenate([M, MC])

    # atom-meet density: each atom is the meet of the images containing it
    density_fail: list[str] = []
    evidence: dict[str, list[str]] = {}
    for j, x in enumerate(atoms):
        single: Any = 1 << x if exact_fin else ArithSet.finite([x])
        code = B.window_mask
        for c in codes[M[:, j]]:
            code &= int(c)
        meet = _as_set(B, B.obj_of(int(B.mask_of_window(np.array([code]))[0])))
        for i in np.flatnonzero(MC[:, j]):
            meet = meet & cands[i]
        atom = B.point_labels[x]
        if meet == single:
            tight = [A.fmt(int(i)) for i in np.flatnonzero(codes == 1 << int(bits[j]))[:1]]
            tight = tight or [cand_labels[i] for i in np.flatnonzero(MC[:, j]) if cands[i] == single][:1]
            evidence[atom] = tight or [A.fmt(int(i)) for i in np.flatnonzero(M[:, j])[:3]]
        elif not density_fail:
            density_fail = [atom, fmt_mask(meet) if exact_fin else format_arith(meet)]
    rep.add(Check("atom-meet density", not density_fail, tuple(density_fail), mode, bounds,
                  "each checked atom is the meet of the images containing it"))

    # separation of atoms (injectivity of alpha_* on atoms)
    sep_fail: list[str] = []
    for i, x in enumerate(atoms):
        same = ~(every[:, i + 1:] != every[:, i:i + 1]).any(axis=0)
        if same.any():
            sep_fail = [B.point_labels[x], B.point_labels[atoms[i + 1 + int(np.argmax(same))]]]
            break
    rep.add(Check("atoms separated", not sep_fail, tuple(sep_fail), mode, bounds,
                  "alpha_* is 1-1 on the checked atoms"))
    rep.add(Check("density iff separation", (not density_fail) == (not sep_fail), (), mode, bounds))

    # coatom criterion: each coatom is the join of the images below it (pointwise on atoms)
    co_fail: list[str] = []
    for j, x in enumerate(atoms):
        covered = every[~every[:, j]].any(axis=0)
        want = np.ones(len(atoms), dtype=bool)
        want[j] = False
        if (covered != want).any():
            co_fail = [B.point_labels[x]]
            break
    rep.add(Check("coatom joins", not co_fail, tuple(co_fail), mode, bounds,
                  "joins evaluated pointwise on the checked atoms"))
    rep.add(Check("join-meet iff meet-join", (not density_fail) == (not co_fail), (), mode, bounds))
    rep.info["atoms checked"] = len(atoms)
    rep.info["evidence"] = {k: evidence[k] for k in sorted(evidence, key=_atom_order)}
    return rep


def _atom_order(label: str) -> tuple:
    digits = "".join(ch for ch in label if ch.isdigit())
    return (int(digits) if digits else -1, label)


def is_extension(alpha: DVMorphism) -> bool:
    return check_extension(alpha).ok


# ---------------------------------------------------------------------------
# functor E


def functor_E_obj(e: Compactification, T: int = 6, P: int = 4, Tprime: int = 12) -> Extension:
    """``e^-1 : RO(Y) -> P(X)``."""
    if e.is_finite:
        n = e.target.size  # type: ignore[union-attr]
        A, B = FinDeVries(n), FinDeVries(n)
        alpha = DVMorphism.from_masks(A, B, A.masks, f"{e.name}^-1", complete=True)
    else:
        A = ROFragment(e.Y, T, P, Tprime)
        B = ArithPowerset(T, P, Tprime)
        alpha = DVMorphism.from_rule(A, B, lambda u: u.trace, f"{e.name}^-1")
    return Extension(alpha, source=e)


@dataclass
class ExtMorphism:
    """``(rho, sigma)`` from ``alpha`` to ``alpha2`` with ``sigma . alpha = alpha2 * rho``."""

    rho: DVMorphism
    sigma: DVMorphism
    source: DVMorphism
    target: DVMorphism

    def square(self) -> Check:
        left = plain_compose(self.sigma, self.source)
        right = star_compose(self.target, self.rho)
        mode = right.mode
        if right.masks is None:
            diff = (left.codes & left.codomain.window_mask) != (right.codes & right.codomain.window_mask)
            bad = int(np.argmax(diff)) if diff.any() else None
        else:
            bad = left.same_as(right)
        wit = () if bad is None else (self.source.domain.fmt(bad),)
        return Check("sigma.alpha = alpha'*rho", bad is None, wit, mode, right.bounds)

    def check(self) -> Report:
        rep = Report(f"extension morphism ({self.rho.name}, {self.sigma.name})")
        rep.add(Check("rho is a de Vries morphism", check_morphism(self.rho).ok, (),
                      self.rho.mode, self.rho.bounds))
        rep.add(complete_boolean_check(self.sigma))
        rep.add(self.square())
        return rep


def functor_E_mor(e: Compactification, e2: Compactification, f: Any, g: Any,
                  T: int = 6, P: int = 4, Tprime: int = 12) -> ExtMorphism:
    """``E(f, g) = (g^*, f^-1)`` from ``E(e2)`` to ``E(e)``.

    Finite: ``f`` and ``g`` are lists (points to points).  Arithmetic: ``f``
    is a :class:`PiecewiseArithMap` and ``g`` a :class:`YMap`.
    """
    src = functor_E_obj(e2, T, P, Tprime).alpha
    dst = functor_E_obj(e, T, P, Tprime).alpha
    if e.is_finite != e2.is_finite:
        raise ValueError("cannot mix finite and arithmetic compactifications")
    if e.is_finite:
        rho = preimage_morphism(src.domain, dst.domain, list(g), "g*")  # type: ignore[arg-type]
        sigma = preimage_morphism(src.codomain, dst.codomain, list(f), "f^-1")  # type: ignore[arg-type]
    else:
        if g.source != e.Y or g.target != e2.Y:
            raise ValueError("g must map the target of e to the target of e2")
        rho = DVMorphism.from_rule(src.domain, dst.domain, g.star, "g*")
        sigma = DVMorphism.from_rule(src.codomain, dst.codomain, lambda s: preimage(f, s),
                                     "f^-1", complete=True)
    return ExtMorphism(rho, sigma, src, dst)


def compose_ext(m2: ExtMorphism, m1: ExtMorphism) -> ExtMorphism:
    """``(rho2 * rho1, sigma2 . sigma1)``."""
    if m1.target.domain != m2.source.domain:
        raise ValueError("extension morphisms are not composable")
    return ExtMorphism(star_compose(m2.rho, m1.rho), plain_compose(m2.sigma, m1.sigma),
                       m1.source, m2.target)


# ---------------------------------------------------------------------------
# functor C


@dataclass
class RealizedCompactification:
    """``alpha_* : X_B -> Y_A``: atoms of B, ends of A and the embedding."""

    atoms: list[str]
    ends: list[Any]
    embed: list[int]
    Y: ArithCompactification | None = None
    report: Report | None = None

    def is_bijective(self) -> bool:
        return sorted(self.embed) == list(range(len(self.ends)))


def alpha_star_atom(alpha: DVMorphism, x: int) -> RoundFilter:
    """``alpha_*(up x)`` for the atom with index ``x`` (finite)."""
    B = alpha.codomain
    up = frozenset(b for b in range(B.size) if b >> x & 1)
    return rho_star_point(alpha, RoundFilter(up))


def alpha_star_filter(alpha: DVMorphism, x: int) -> np.ndarray:
    """``twohead_up(alpha^-1(up x))`` on the domain fragment, with singleton witnesses."""
    return _alpha_star_parts(alpha, x)[0]


def _candidates(A: ProxAlgebra) -> tuple[list[Any], np.ndarray]:
    objs = A.extra_candidates()
    return objs, np.array([A.code_of(c) for c in objs], dtype=np.int64)


def _alpha_star_parts(alpha: DVMorphism, x: int) -> tuple[np.ndarray, np.ndarray]:
    """The filter on the fragment and on the singleton candidates outside it.

    The candidates are needed to tell apart the ends of naturals that the
    fragment cannot separate (``n`` and ``n + P`` beyond ``T``).
    """
    A, B = alpha.domain, alpha.codomain
    P = prox_matrix(A)
    bit = int(B.point_bits[x])
    hit = ((alpha.codes >> bit) & 1).astype(bool)
    out = P[hit].any(axis=0)
    objs, ccodes = _candidates(A)
    chit = np.zeros(len(objs), dtype=bool)
    for j, c in enumerate(objs):
        try:
            chit[j] = bool((B.code_of(alpha.apply(c)) >> bit) & 1)
        except ValueError:
            continue
    cout = np.zeros(len(objs), dtype=bool)
    for j in np.flatnonzero(chit):
        out |= A.prox_codes(ccodes[j], A.codes)
    for j in range(len(objs)):
        cout[j] = bool((A.prox_codes(A.codes, ccodes[j]) & hit).any()
                       or (A.prox_codes(ccodes, ccodes[j]) & chit).any())
    return out, cout


def _point_parts(A: ROFragment, point: tuple) -> tuple[np.ndarray, np.ndarray]:
    objs, _ = _candidates(A)
    return end_of_point(A, point), np.array([c.contains_point(point) for c in objs], dtype=bool)


def realize_end(A: ROFragment, filt: np.ndarray, cand: np.ndarray | None = None) -> tuple | None:
    """The point ``y`` of ``Y`` whose end agrees with ``filt`` on the fragment
    (and with ``cand`` on the singleton candidates, when given)."""
    for p in A.Y.points(A.Tprime):
        frag, cp = _point_parts(A, p)
        if (frag == filt).all() and (cand is None or (cp == cand).all()):
            return p
    return None


def realize_atom(alpha: DVMorphism, x: int) -> tuple | None:
    """The point realizing ``alpha_*(up x)``."""
    return realize_end(alpha.domain, *_alpha_star_parts(alpha, x))  # type: ignore[arg-type]


def functor_C_obj(ext: Extension | DVMorphism) -> RealizedCompactification:
    alpha = ext.alpha if isinstance(ext, Extension) else ext
    rep = check_extension(alpha)
    if not rep.ok:
        raise ValueError(f"{alpha.name} is not a de Vries extension: "
                         + ", ".join(c.axiom for c in rep.failures()))
    A, B = alpha.domain, alpha.codomain
    if isinstance(A, FinDeVries) and isinstance(B, FinDeVries):
        ends = ends_of(A)
        embed = [ends.index(alpha_star_atom(alpha, x)) for x in range(B.n)]
        return RealizedCompactification(list(B.point_labels), ends, embed, report=rep)
    if isinstance(A, ROFragment):
        pts = A.Y.points(A.Tprime)
        embed = []
        audit = Report("point-end identification")
        for x in range(B.Tprime):  # type: ignore[attr-defined]
            p = realize_atom(alpha, x)
            audit.add(Check(f"alpha_*({{{x}}})", p == ("n", x), () if p == ("n", x) else
                            (str(p),), alpha.mode, alpha.bounds))
            embed.append(pts.index(p) if p is not None else -1)
        return RealizedCompactification(list(B.point_labels), pts, embed, A.Y, audit)
    raise ValueError("not realizable in this universe: domain is not a registered "
                     "regular-open fragment")


def functor_C_mor(m: ExtMorphism) -> tuple[list[int], list[int]]:
    """``(sigma_+, rho_*)`` for finite extension morphisms."""
    return sigma_plus(m.sigma), rho_star(m.rho)


def check_C_morphism_finite(m: ExtMorphism) -> Check:
    """``alpha_* . sigma_+ = rho_* . alpha'_*`` on atoms of the second codomain."""
    sp, rs = functor_C_mor(m)
    a1 = functor_C_obj(m.source).embed
    a2 = functor_C_obj(m.target).embed
    bad = [x for x in range(len(a2)) if a1[sp[x]] != rs[a2[x]]]
    return Check("C(rho,sigma) commutes", not bad, tuple(str(x) for x in bad[:1]))


# ---------------------------------------------------------------------------
# audits


def lemma53_audit(alpha: DVMorphism) -> Report:
    """Conditions (1) ``b <= alpha(a)``, (2) ``a in alpha_*(up b)`` and
    (3) ``up b in alpha_*^-1 zeta(a)`` for every ``a`` and checked atom ``b``.

    (2) is computed as a filter; (3) goes through the realized end: the end of
    ``A`` that ``alpha_*(up b)`` is identified with, and the basic set
    ``zeta(a)`` of ends containing ``a``.
    """
    A, B = alpha.domain, alpha.codomain
    atoms = _codomain_atoms(B)
    mode, bounds = alpha.mode, alpha.bounds
    rep = Report(f"three-way audit for {alpha.name}")
    first_bad: list[str] = []
    unrealized: list[str] = []
    finite = isinstance(A, FinDeVries)
    ends = ends_of(A) if finite else None  # type: ignore[arg-type]
    for x in atoms:
        c1 = ((alpha.codes >> B.point_bits[x]) & 1).astype(bool)
        c2 = alpha_star_filter(alpha, x)
        if finite:
            end = RoundFilter(frozenset(int(a) for a in np.flatnonzero(c2)))
            if end not in ends:
                unrealized.append(B.point_labels[x])
                c3 = np.zeros(A.size, dtype=bool)
            else:
                k = ends.index(end)
                c3 = np.array([k in zeta(A, a) for a in range(A.size)])
        else:
            p = realize_atom(alpha, x)
            if p is None:
                unrealized.append(B.point_labels[x])
                c3 = np.zeros(A.size, dtype=bool)
            else:
                c3 = end_of_point(A, p)  # type: ignore[arg-type]
        bad = (c1 != c2) | (c2 != c3)
        if bad.any() and not first_bad:
            a = int(np.argmax(bad))
            first_bad = [A.fmt(a), B.point_labels[x],
                         f"(1)={bool(c1[a])} (2)={bool(c2[a])} (3)={bool(c3[a])}"]
    rep.add(Check("ends realized", not unrealized, tuple(unrealized[:1]), mode, bounds))
    rep.add(Check("conditions agree", not first_bad, tuple(first_bad), mode, bounds))
    if isinstance(A, ROFragment):
        rep.extend(infinity_end_audit(alpha))
    rep.info["atoms checked"] = len(atoms)
    rep.info["elements"] = A.size
    return rep


def infinity_end_audit(alpha: DVMorphism) -> list[Check]:
    """Point-ends at infinity: round filters on the fragment, missed by atoms."""
    A = alpha.domain
    assert isinstance(A, ROFragment)
    P = prox_matrix(A)
    L = order_matrix(A)
    out = []
    atom_ends = [np.concatenate(_point_parts(A, ("n", n))) for n in range(A.Tprime)]
    for i, label in enumerate(A.Y.labels):
        F = end_of_point(A, ("inf", i))
        idx = np.flatnonzero(F)
        up = not (L[F] & ~F[None, :]).any()
        meets = bool(F[idx[:, None] & idx[None, :]].all())
        proper = not F[0]
        rnd = bool((P[F].any(axis=0) == F).all())
        FE = np.concatenate(_point_parts(A, ("inf", i)))
        distinct = all((FE != E).any() for E in atom_ends)
        ok = up and meets and proper and rnd and distinct
        why = [k for k, v in (("up", up), ("meet", meets), ("proper", proper),
                              ("round", rnd), ("distinct", distinct)) if not v]
        out.append(Check(f"end at {label}", ok, tuple(why), alpha.mode, alpha.bounds,
                         "by realization; roundness audited on the fragment"))
    return out


def q_square(alpha: DVMorphism) -> Check:
    """``vartheta(alpha(b)) = alpha_*^-1(zeta(b))`` for every ``b``."""
    A, B = alpha.domain, alpha.codomain
    atoms = _codomain_atoms(B)
    left = membership(B, alpha.codes)[:, atoms]
    right = np.zeros_like(left)
    finite = isinstance(A, FinDeVries)
    if finite:
        ends = ends_of(A)  # type: ignore[arg-type]
        for j, x in enumerate(atoms):
            k = ends.index(alpha_star_atom(alpha, x))
            right[:, j] = [k in zeta(A, b) for b in range(A.size)]
    else:
        for j, x in enumerate(atoms):
            p = realize_atom(alpha, x)
            if p is not None:
                right[:, j] = end_of_point(A, p)  # type: ignore[arg-type]
    bad = left != right
    wit: tuple[str, ...] = ()
    if bad.any():
        b, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
        wit = (A.fmt(int(b)), B.point_labels[atoms[j]])
    return Check("q square", not bad.any(), wit, alpha.mode, alpha.bounds)


def p_square(e: Compactification, T: int = 6, P: int = 4, Tprime: int = 12) -> Check:
    """``(e^-1)_* . eta = xi . e`` on the points of X."""
    alpha = functor_E_obj(e, T, P, Tprime).alpha
    A = alpha.domain
    bad: list[str] = []
    if e.is_finite:
        n = e.target.size  # type: ignore[union-attr]
        for x in range(n):
            lhs = alpha_star_atom(alpha, x)
            xi = RoundFilter(frozenset(u for u in range(A.size) if u >> x & 1))
            if lhs != xi:
                bad = [str(x)]
                break
    else:
        for x in range(Tprime):
            lhs = np.concatenate(_alpha_star_parts(alpha, x))
            if not (lhs == np.concatenate(_point_parts(A, ("n", x)))).all():  # type: ignore[arg-type]
                bad = [str(x)]
                break
    return Check("p square", not bad, tuple(bad), alpha.mode, alpha.bounds)


def roundtrip_audit(e: Compactification, e2: Compactification | None = None,
                    f: Sequence[int] | None = None, T: int = 6, P: int = 4,
                    Tprime: int = 12) -> Report:
    """Both natural squares for ``e``; with a finite ``f : X -> X2`` also the
    six faces of the cube for ``(f, f)``."""
    rep = Report(f"round trip for {e.describe()}")
    rep.add(p_square(e, T, P, Tprime))
    ext = functor_E_obj(e, T, P, Tprime)
    rep.add(q_square(ext.alpha))
    if e.is_finite:
        C = functor_C_obj(ext)
        rep.add(Check("EC image is an extension", check_extension(ext.alpha).ok))
        rep.add(Check("CE target bijective onto ends", C.is_bijective()))
    if e2 is not None and f is not None:
        rep.extend(cube_faces(e, e2, f))
    return rep


def cube_faces(e: Compactification, e2: Compactification, f: Sequence[int]) -> list[Check]:
    """Faces of the naturality cube for a finite morphism ``(f, f)``."""
    if not (e.is_finite and e2.is_finite):
        raise ValueError("cube faces are audited on finite compactifications")
    n, n2 = e.target.size, e2.target.size  # type: ignore[union-attr]
    f = list(f)
    m = functor_E_mor(e, e2, f, f)   # E(f, f) goes from E(e2) to E(e)
    alpha, alpha2 = m.target, m.source
    fplus, gstar = functor_C_mor(m)
    ends = ends_of(alpha.domain)  # type: ignore[arg-type]
    ends2 = ends_of(alpha2.domain)  # type: ignore[arg-type]
    ae = [ends.index(alpha_star_atom(alpha, x)) for x in range(n)]
    ae2 = [ends2.index(alpha_star_atom(alpha2, x)) for x in range(n2)]
    xi = [ends.index(RoundFilter(frozenset(u for u in range(1 << n) if u >> x & 1)))
          for x in range(n)]
    xi2 = [ends2.index(RoundFilter(frozenset(u for u in range(1 << n2) if u >> x & 1)))
           for x in range(n2)]
    eta1, eta2 = list(range(n)), list(range(n2))   # atom {x} has index x

    def face(name: str, ok_points: list[bool]) -> Check:
        bad = [str(i) for i, ok in enumerate(ok_points) if not ok]
        return Check(name, not bad, tuple(bad[:1]))

    return [
        face("front", [f[x] == f[x] for x in range(n)]),
        face("back", [ae2[fplus[x]] == gstar[ae[x]] for x in range(n)]),
        face("top", [ae[eta1[x]] == xi[x] for x in range(n)]),
        face("bottom", [ae2[eta2[y]] == xi2[y] for y in range(n2)]),
        face("left", [fplus[eta1[x]] == eta2[f[x]] for x in range(n)]),
        face("right", [gstar[xi[x]] == xi2[f[x]] for x in range(n)]),
    ]


def ext_iso_check(m: ExtMorphism) -> Check:
    """Both components are bijections of the fragment."""
    ok = True
    for comp in (m.rho, m.sigma):
        img = comp.require_masks()
        ok &= comp.domain.size == comp.codomain.size and len(np.unique(img)) == len(img)
    return Check("E preserves isomorphism", bool(ok), (), m.rho.mode, m.rho.bounds)
