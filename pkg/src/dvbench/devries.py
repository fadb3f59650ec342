"""Proximity algebras, de Vries morphisms and their axiom audits.

Every algebra here is a finite Boolean algebra of bitmasks, indexed so that
``&``, ``|`` and ``^ full`` on indices are meet, join and negation:

* :class:`FinDeVries` -- the powerset of ``n`` atoms with an arbitrary
  relation (the order itself by default).
* :class:`ArithPowerset` -- the fragment ``Frag(T, P)`` of the powerset of N,
  ordered by inclusion.
* :class:`ROFragment` -- regular open subsets of an arithmetic
  compactification whose trace lies in ``Frag(T, P)``, with the canonical
  proximity.  A regular open set is determined by its trace, so the same
  masks index it.

Besides its mask, each element has a *code*: an int64 whose low bits record
membership of the checked points (atoms, or the naturals below the witness
bound ``T'``), followed for regular-open algebras by one bit per point at
infinity and one bit per point at infinity in the closure.  Codes make the
proximity, the order and point membership vectorizable, and they also exist
for elements outside the fragment (used as witness candidates).

The order on masks is the canonical total order used for minimal
counterexamples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .report import Check, Report
from .setalg import (ArithSet, FinSubset, fmt_mask, format_arith, frag_decode, frag_encode,
                     frag_profiles)
from .topology import (ArithCompactification, NotRegularOpen, YSubset, closure, format_ysubset,
                       is_regular_open, ro)

# widest element table the checkers will materialize as an N x N matrix
MAX_MATRIX_ELEMENTS = 1 << 13
# above this many elements DV3 minimality falls back to a stepwise search
DV3_MATMUL_LIMIT = 1 << 10
_CHUNK_CELLS = 1 << 22


class ProxAlgebra:
    """Common interface; subclasses fill in the representation."""

    kind = "abstract"
    exact = True
    nbits: int
    point_bits: np.ndarray
    point_labels: list[str]

    @property
    def size(self) -> int:
        return 1 << self.nbits

    @property
    def full(self) -> int:
        return (1 << self.nbits) - 1

    @property
    def masks(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    @property
    def codes(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def bounds(self) -> dict[str, int] | None:
        return None

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "bounded"

    def signature(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProxAlgebra) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())

    # element level ----------------------------------------------------

    def obj_of(self, mask: int) -> Any:
        raise NotImplementedError

    def mask_of_obj(self, obj: Any) -> int:
        raise NotImplementedError

    def code_of(self, obj: Any) -> int:
        raise NotImplementedError

    def in_fragment(self, obj: Any) -> bool:
        try:
            self.mask_of_obj(obj)
        except ValueError:
            return False
        return True

    def fmt(self, mask: int) -> str:
        return self.fmt_obj(self.obj_of(int(mask)))

    def fmt_obj(self, obj: Any) -> str:
        return str(obj)

    @property
    def join_points(self) -> np.ndarray:
        """Indices into ``point_bits`` at which joins are computed pointwise."""
        return np.arange(len(self.point_bits))

    def extra_candidates(self) -> list[Any]:
        """Elements outside the fragment tried as approximation witnesses."""
        return []

    # code level (vectorized) ------------------------------------------

    @property
    def window_mask(self) -> int:
        raise NotImplementedError

    @property
    def key_mask(self) -> int:
        return self.window_mask

    def prox_codes(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def le_codes(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return (u & ~v & self.key_mask) == 0

    def mask_of_window(self, win: np.ndarray) -> np.ndarray:
        """Fragment mask with the given membership window, or -1."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


class FinDeVries(ProxAlgebra):
    """The powerset of ``n`` atoms with a relation given as a truth table."""

    kind = "fin"
    exact = True

    def __init__(self, n: int, relation: np.ndarray | None = None, name: str = "") -> None:
        if n < 0 or n > 16:
            raise ValueError("finite algebras support 0..16 atoms")
        self.n = n
        self.nbits = n
        if relation is not None:
            relation = np.asarray(relation, dtype=bool)
            if relation.shape != (1 << n, 1 << n):
                raise ValueError(f"relation must be a {1 << n}x{1 << n} table")
            relation = relation.copy()
            relation.setflags(write=False)
        self.relation = relation
        self.name = name or (f"P({n}),<=" if relation is None else f"P({n}),rel")
        self.point_bits = np.arange(n, dtype=np.int64)
        self.point_labels = [fmt_mask(1 << i) for i in range(n)]

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[tuple[int, int]]) -> "FinDeVries":
        rel = np.zeros((1 << n, 1 << n), dtype=bool)
        for a, b in pairs:
            rel[a, b] = True
        return cls(n, rel)

    @classmethod
    def order(cls, n: int) -> "FinDeVries":
        return cls(n)

    @property
    def is_order(self) -> bool:
        return self.relation is None

    def order_relation(self) -> np.ndarray:
        m = self.masks
        return (m[:, None] & ~m[None, :]) == 0

    def relation_table(self) -> np.ndarray:
        return self.order_relation() if self.relation is None else self.relation

    def signature(self) -> tuple:
        rel = None if self.relation is None else self.relation.tobytes()
        return ("fin", self.n, rel)

    @property
    def codes(self) -> np.ndarray:
        return self.masks

    def obj_of(self, mask: int) -> FinSubset:
        return FinSubset(self.n, int(mask))

    def mask_of_obj(self, obj: Any) -> int:
        if isinstance(obj, FinSubset):
            if obj.size != self.n:
                raise ValueError("subset of a different universe")
            return obj.bits
        mask = int(obj)
        if not 0 <= mask <= self.full:
            raise ValueError(f"mask {mask} out of range")
        return mask

    def code_of(self, obj: Any) -> int:
        return self.mask_of_obj(obj)

    def fmt(self, mask: int) -> str:
        return fmt_mask(int(mask))

    @property
    def window_mask(self) -> int:
        return self.full

    def prox_codes(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self.relation is None:
            return (u & ~v) == 0
        return self.relation[u, v]

    def mask_of_window(self, win: np.ndarray) -> np.ndarray:
        return np.asarray(win, dtype=np.int64) & self.full

    def describe(self) -> str:
        if self.relation is None:
            return f"algebra atoms {self.n} relation le"
        return f"algebra atoms {self.n} relation custom"


class _ArithBase(ProxAlgebra):
    exact = False

    def __init__(self, T: int, P: int, Tprime: int) -> None:
        if T < 0 or P < 1:
            raise ValueError("fragment bounds need T >= 0 and P >= 1")
        if Tprime < T + P:
            raise ValueError(
                f"witness bound {Tprime} must be at least T+P={T + P} so that membership "
                "windows determine fragment elements")
        self.T, self.P, self.Tprime = T, P, Tprime
        self.nbits = T + P
        if self.nbits > 14:
            raise ValueError("fragments above 2^14 elements are not supported")
        self._codes: np.ndarray | None = None

    @property
    def bounds(self) -> dict[str, int]:
        return {"T": self.T, "P": self.P, "Tprime": self.Tprime}

    @property
    def window_mask(self) -> int:
        return (1 << self.Tprime) - 1

    def _profiles(self) -> np.ndarray:
        return frag_profiles(self.T, self.P, self.Tprime)

    def mask_of_window(self, win: np.ndarray) -> np.ndarray:
        win = np.asarray(win, dtype=np.int64) & self.window_mask
        T, P = self.T, self.P
        mask = win & ((1 << T) - 1)
        for r in range(P):
            n = T + (r - T) % P
            mask = mask | (((win >> n) & 1) << (T + r))
        ok = self._profiles()[mask] == win
        return np.where(ok, mask, -1)

    def extra_candidates(self) -> list[Any]:
        return [self._singleton(n) for n in range(self.T, self.Tprime)]

    def _singleton(self, n: int) -> Any:
        raise NotImplementedError


class ArithPowerset(_ArithBase):
    """``Frag(T, P)`` inside the powerset of N, with inclusion as proximity."""

    kind = "pow"

    def __init__(self, T: int, P: int, Tprime: int) -> None:
        super().__init__(T, P, Tprime)
        self.point_bits = np.arange(Tprime, dtype=np.int64)
        self.point_labels = [f"{{{n}}}" for n in range(Tprime)]

    def signature(self) -> tuple:
        return ("pow", self.T, self.P, self.Tprime)

    @property
    def codes(self) -> np.ndarray:
        if self._codes is None:
            self._codes = self._profiles()
        return self._codes

    def obj_of(self, mask: int) -> ArithSet:
        return frag_decode(self.T, self.P, int(mask))

    def mask_of_obj(self, obj: Any) -> int:
        if isinstance(obj, YSubset):
            obj = obj.trace
        return frag_encode(self.T, self.P, obj)

    def code_of(self, obj: Any) -> int:
        if isinstance(obj, YSubset):
            obj = obj.trace
        return obj.window(self.Tprime)

    def fmt_obj(self, obj: Any) -> str:
        return format_arith(obj)

    def prox_codes(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return (u & ~v & self.window_mask) == 0

    def _singleton(self, n: int) -> ArithSet:
        return ArithSet.finite([n])

    def describe(self) -> str:
        return f"discrete N fragment T={self.T} P={self.P}"


class ROFragment(_ArithBase):
    """Regular open sets of ``Y`` with trace in ``Frag(T, P)``."""

    kind = "ro"

    def __init__(self, Y: ArithCompactification, T: int, P: int, Tprime: int) -> None:
        if P % Y.period:
            raise ValueError(f"fragment period {P} must be a multiple of the period {Y.period} of Y")
        super().__init__(T, P, Tprime)
        if Tprime + 2 * Y.k > 62:
            raise ValueError("too many points for int64 codes")
        self.Y = Y
        self.k = Y.k
        self.point_bits = np.arange(Tprime + Y.k, dtype=np.int64)
        self.point_labels = [f"{{{n}}}" for n in range(Tprime)] + list(Y.labels)
        # residues mod P lying over each block of Y
        self._block_masks = []
        for i in range(Y.k):
            bm = 0
            for r in range(P):
                if r % Y.period in Y.blocks[i]:
                    bm |= 1 << r
            self._block_masks.append(bm)

    @property
    def join_points(self) -> np.ndarray:
        # naturals are isolated, so a join's trace is the union of traces; the
        # points at infinity of a regular open set are fixed by its trace
        return np.arange(self.Tprime)

    def signature(self) -> tuple:
        return ("ro", self.Y, self.T, self.P, self.Tprime)

    @property
    def inf_shift(self) -> int:
        return self.Tprime

    @property
    def clinf_shift(self) -> int:
        return self.Tprime + self.k

    @property
    def key_mask(self) -> int:
        return (1 << (self.Tprime + self.k)) - 1

    @property
    def codes(self) -> np.ndarray:
        if self._codes is None:
            masks = self.masks
            out = self._profiles().copy()
            tail = masks >> self.T
            for i, bm in enumerate(self._block_masks):
                hit = tail & bm
                out |= (hit == bm).astype(np.int64) << (self.inf_shift + i)
                out |= (hit != 0).astype(np.int64) << (self.clinf_shift + i)
            self._codes = out
        return self._codes

    def obj_of(self, mask: int) -> YSubset:
        return ro(self.Y, frag_decode(self.T, self.P, int(mask)))

    def _as_ro(self, obj: Any) -> YSubset:
        if isinstance(obj, ArithSet):
            return ro(self.Y, obj)
        if not is_regular_open(self.Y, obj):
            raise NotRegularOpen(obj, "not regular open", format_ysubset(self.Y, obj))
        return obj

    def mask_of_obj(self, obj: Any) -> int:
        return frag_encode(self.T, self.P, self._as_ro(obj).trace)

    def code_of(self, obj: Any) -> int:
        u = self._as_ro(obj)
        code = u.trace.window(self.Tprime)
        cl = closure(self.Y, u)
        for i in u.infinities:
            code |= 1 << (self.inf_shift + i)
        for i in cl.infinities:
            code |= 1 << (self.clinf_shift + i)
        return code

    def fmt_obj(self, obj: Any) -> str:
        return format_ysubset(self.Y, self._as_ro(obj))

    def prox_codes(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        kmask = (1 << self.k) - 1
        trace_ok = (u & ~v & self.window_mask) == 0
        inf_ok = ((u >> self.clinf_shift) & ~(v >> self.inf_shift) & kmask) == 0
        return trace_ok & inf_ok

    def _singleton(self, n: int) -> YSubset:
        return YSubset(ArithSet.finite([n]))

    def describe(self) -> str:
        return f"RO({self.Y}) fragment T={self.T} P={self.P}"


# ---------------------------------------------------------------------------
# matrices


_PROX_CACHE: dict[tuple, np.ndarray] = {}


def _check_size(A: ProxAlgebra) -> None:
    if A.size > MAX_MATRIX_ELEMENTS:
        raise ValueError(f"algebra with {A.size} elements is too large to tabulate")


def prox_matrix(A: ProxAlgebra) -> np.ndarray:
    """``M[a, b]`` iff ``a`` is well inside ``b`` (indices are masks)."""
    if isinstance(A, FinDeVries) and A.relation is not None:
        return A.relation
    key = A.signature()
    hit = _PROX_CACHE.get(key)
    if hit is not None:
        return hit
    _check_size(A)
    c = A.codes
    N = A.size
    out = np.empty((N, N), dtype=bool)
    step = max(1, _CHUNK_CELLS // N)
    for s in range(0, N, step):
        out[s:s + step] = A.prox_codes(c[s:s + step, None], c[None, :])
    out.setflags(write=False)
    if len(_PROX_CACHE) > 32:
        _PROX_CACHE.clear()
    _PROX_CACHE[key] = out
    return out


def order_matrix(A: ProxAlgebra) -> np.ndarray:
    m = A.masks
    return (m[:, None] & ~m[None, :]) == 0


def membership(A: ProxAlgebra, codes: np.ndarray) -> np.ndarray:
    """``M[i, x]``: point ``x`` of ``A`` lies in the element with code ``codes[i]``."""
    return ((np.asarray(codes)[:, None] >> A.point_bits[None, :]) & 1).astype(bool)


def _first(v: np.ndarray) -> tuple[int, ...] | None:
    if not v.any():
        return None
    return tuple(int(i) for i in np.unravel_index(int(np.argmax(v)), v.shape))


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0


def twohead_up(A: ProxAlgebra, S: Sequence[int]) -> list[int]:
    """Masks ``a`` with ``b`` well inside ``a`` for some ``b`` in ``S``."""
    P = prox_matrix(A)
    if not len(S):
        return []
    return [int(a) for a in np.flatnonzero(P[np.asarray(list(S), dtype=np.int64)].any(axis=0))]


# ---------------------------------------------------------------------------
# proximity axioms


def _dv3(A: ProxAlgebra, P: np.ndarray) -> tuple[tuple[int, ...] | None, bool]:
    """Least ``(a, b, c, d)`` with ``a<=b<c<=d`` but not ``a<d``; flag says minimal."""
    N = A.size
    m = A.masks
    # stepwise: left closure under removing a bit, right closure under adding one
    stepwise: tuple[int, ...] | None = None
    for j in range(A.nbits):
        has = m[(m >> j) & 1 == 1]
        low = has ^ (1 << j)
        bad = P[has] & ~P[low]
        hit = _first(bad)
        if hit is not None:
            b, c = int(has[hit[0]]), hit[1]
            stepwise = (int(low[hit[0]]), b, c, c)
            break
        bad = P[:, low] & ~P[:, has]
        hit = _first(bad)
        if hit is not None:
            b, c = hit[0], int(low[hit[1]])
            stepwise = (b, b, c, int(has[hit[1]]))
            break
    if stepwise is None:
        return None, True
    if N > DV3_MATMUL_LIMIT:
        return stepwise, False
    L = order_matrix(A)
    H = _bool_matmul(_bool_matmul(L, P), L)
    a = _first(H & ~P)[0]
    notd = ~P[a]
    G = (L & notd[None, :]).any(axis=1)          # c with some d >= c outside row a
    bs = np.flatnonzero(L[a] & (P & G[None, :]).any(axis=1))
    b = int(bs[0])
    c = int(np.flatnonzero(P[b] & G)[0])
    d = int(np.flatnonzero(L[c] & notd)[0])
    return (a, b, c, d), True


def _dv4(A: ProxAlgebra, P: np.ndarray) -> tuple[int, int, int] | None:
    m = A.masks
    N = A.size
    if N <= 64:
        S = P[:, :, None] & P[:, None, :]
        meet = m[:, None] & m[None, :]
        bad = S & ~P[:, meet]
        hit = _first(bad)
        return None if hit is None else (hit[0], hit[1], hit[2])
    for a in range(N):
        row = P[a]
        members = np.flatnonzero(row)
        if not len(members):
            continue
        up_closed = all(not (row & ~row[m | (1 << j)]).any() for j in range(A.nbits))
        if up_closed:
            meet_all = int(np.bitwise_and.reduce(members))
            if row[meet_all]:
                continue
        for b in members:
            bad = row & ~row[m & b]
            if bad.any():
                return a, int(b), int(np.argmax(bad))
    return None


def _dv7(A: ProxAlgebra, P: np.ndarray) -> tuple[tuple[int, int] | None, int]:
    """Least ``(b, x)`` with point ``x`` in ``b`` but in no ``a`` well inside ``b``."""
    codes = A.codes
    pts = A.join_points
    C = membership(A, codes)[:, pts]
    W = _bool_matmul(P.T, C)
    missing = C & ~W
    used_extra = 0
    if missing.any():
        extras = A.extra_candidates()
        if extras:
            ecodes = np.array([A.code_of(e) for e in extras], dtype=np.int64)
            EC = membership(A, ecodes)[:, pts]                # (E, points)
            for b, x in zip(*np.nonzero(missing)):
                inside = A.prox_codes(ecodes, codes[b])
                if (inside & EC[:, x]).any():
                    missing[b, x] = False
                    used_extra += 1
    hit = _first(missing)
    return hit, used_extra


def check_proximity(A: ProxAlgebra) -> Report:
    """Audit DV1-DV7; DV7 in its pointwise form on atoms and points."""
    _check_size(A)
    P = prox_matrix(A)
    m = A.masks
    full = A.full
    rep = Report(f"proximity axioms on {A.describe()}")
    bounds = A.bounds
    mode = A.mode
    fmt = A.fmt

    def add(name: str, wit: tuple[int, ...] | None, note: str = "", labels: list[str] | None = None):
        if wit is None:
            rep.add(Check(name, True, (), mode, bounds, note))
        else:
            rep.add(Check(name, False, tuple(labels or [fmt(w) for w in wit]), mode, bounds, note))

    add("DV1", None if P[full, full] else (full, full))
    add("DV2", _first(P & ~order_matrix(A)))
    w3, minimal = _dv3(A, P)
    add("DV3", w3, "" if minimal else "stepwise witness, not lexicographically least")
    add("DV4", _dv4(A, P))
    neg = full ^ m
    add("DV5", _first(P & ~P[np.ix_(neg, neg)].T))
    if A.size <= MAX_MATRIX_ELEMENTS:
        add("DV6", _first(P & ~_bool_matmul(P, P)))
    w7, extra = _dv7(A, P)
    note = "approximation checked pointwise"
    if not A.exact:
        note += f" on naturals below {A.Tprime}"  # type: ignore[attr-defined]
        if extra:
            note += f"; {extra} witnesses are singletons outside the fragment"
    if w7 is None:
        add("DV7", None, note)
    else:
        b, x = w7
        add("DV7", w7, note, [fmt(b), A.point_labels[int(A.join_points[x])]])
    rep.info["elements"] = A.size
    return rep


def is_de_vries(A: ProxAlgebra) -> bool:
    return check_proximity(A).ok


# ---------------------------------------------------------------------------
# morphisms


@dataclass(eq=False)
class DVMorphism:
    """A map between proximity algebras, tabulated on the domain fragment.

    ``masks[a]`` is the codomain mask of the image of domain mask ``a``.
    ``rule`` evaluates the map on domain elements outside the fragment
    (objects in, objects out); it backs the bounded witness searches.
    ``complete`` records a complete Boolean homomorphism known by
    construction (preimage maps).
    """

    domain: ProxAlgebra
    codomain: ProxAlgebra
    masks: np.ndarray | None
    codes: np.ndarray
    name: str = "rho"
    rule: Callable[[Any], Any] | None = None
    complete: bool | None = None
    note: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_masks(cls, A: ProxAlgebra, B: ProxAlgebra, masks: Sequence[int], name: str = "rho",
                   **kw: Any) -> "DVMorphism":
        arr = np.asarray(masks, dtype=np.int64)
        if arr.shape != (A.size,):
            raise ValueError(f"need {A.size} images, got {arr.shape}")
        if (arr < 0).any() or (arr > B.full).any():
            raise ValueError("image mask out of range")
        return cls(A, B, arr, B.codes[arr], name, **kw)

    @classmethod
    def from_rule(cls, A: ProxAlgebra, B: ProxAlgebra, fn: Callable[[Any], Any],
                  name: str = "rho", **kw: Any) -> "DVMorphism":
        out = np.empty(A.size, dtype=np.int64)
        for a in range(A.size):
            img = fn(A.obj_of(a))
            try:
                out[a] = B.mask_of_obj(img)
            except ValueError as exc:
                raise ValueError(
                    f"{name} maps {A.fmt(a)} outside the codomain fragment: {exc}") from None
        return cls(A, B, out, B.codes[out], name, rule=fn, **kw)

    @classmethod
    def identity(cls, A: ProxAlgebra) -> "DVMorphism":
        return cls(A, A, A.masks, A.codes, "id", rule=lambda x: x, complete=True)

    @property
    def mode(self) -> str:
        return "exact" if self.domain.exact and self.codomain.exact else "bounded"

    @property
    def bounds(self) -> dict[str, int] | None:
        return self.domain.bounds or self.codomain.bounds

    @property
    def tabulated(self) -> bool:
        return self.masks is not None

    def require_masks(self) -> np.ndarray:
        if self.masks is None:
            raise ValueError(f"{self.name} is known only as a membership profile")
        return self.masks

    def __call__(self, mask: int) -> int:
        return int(self.require_masks()[mask])

    def apply(self, obj: Any) -> Any:
        """Image of a domain element given as an object."""
        if self.domain.in_fragment(obj) and self.masks is not None:
            return self.codomain.obj_of(int(self.masks[self.domain.mask_of_obj(obj)]))
        if self.rule is None:
            raise ValueError(f"{self.name} cannot be evaluated outside its fragment")
        return self.rule(obj)

    def keys(self) -> np.ndarray:
        return self.codes & self.codomain.key_mask

    def same_as(self, other: "DVMorphism") -> int | None:
        """``None`` if extensionally equal on the fragment, else the least disagreeing mask."""
        if self.domain != other.domain or self.codomain != other.codomain:
            raise ValueError("morphisms between different algebras")
        diff = self.keys() != other.keys()
        return int(np.argmax(diff)) if diff.any() else None

    def table(self) -> list[tuple[str, str]]:
        return [(self.domain.fmt(a), self.codomain.fmt(int(b)))
                for a, b in enumerate(self.require_masks())]


def _pairs_chunks(N: int):
    step = max(1, _CHUNK_CELLS // max(N, 1))
    for s in range(0, N, step):
        yield s, min(N, s + step)


def check_morphism(rho: DVMorphism) -> Report:
    """Audit M1-M4; M4 pointwise on codomain points with a bounded witness search."""
    A, B = rho.domain, rho.codomain
    _check_size(A)
    img = rho.require_masks()
    P = prox_matrix(A)
    m = A.masks
    rep = Report(f"morphism axioms for {rho.name}: {A.describe()} -> {B.describe()}")
    mode, bounds = rho.mode, rho.bounds
    fa = A.fmt

    def add(name: str, wit: list[str] | None, note: str = "") -> None:
        rep.add(Check(name, wit is None, tuple(wit or ()), mode, bounds, note))

    add("M1", None if img[0] == 0 else [fa(0), B.fmt(int(img[0]))])

    w2 = None
    for s, e in _pairs_chunks(A.size):
        bad = img[m[s:e, None] & m[None, :]] != (img[s:e, None] & img[None, :])
        hit = _first(bad)
        if hit is not None:
            w2 = [fa(s + hit[0]), fa(hit[1])]
            break
    add("M2", w2)

    # a < b implies not rho(not a) < rho(b)
    Bcodes = B.codes
    lhs = Bcodes[B.full ^ img[A.full ^ m]]
    w3 = None
    for s, e in _pairs_chunks(A.size):
        bad = P[s:e] & ~B.prox_codes(lhs[s:e, None], rho.codes[None, :])
        hit = _first(bad)
        if hit is not None:
            w3 = [fa(s + hit[0]), fa(hit[1])]
            break
    add("M3", w3)

    # join over a < b: images of a below rho(b), and every point of rho(b) covered
    w4 = None
    for s, e in _pairs_chunks(A.size):
        bad = P[s:e] & ~((img[s:e, None] & ~img[None, :]) == 0)
        hit = _first(bad)
        if hit is not None:
            w4 = [fa(s + hit[0]), fa(hit[1]), "image not below"]
            break
    pts = B.join_points
    C = membership(B, rho.codes)[:, pts]
    missing = C & ~_bool_matmul(P.T, C)
    used = 0
    if missing.any():
        cands = []
        for obj in A.extra_candidates():
            try:
                cands.append((A.code_of(obj), B.code_of(rho.apply(obj))))
            except ValueError:
                continue
        if cands:
            acodes = np.array([c for c, _ in cands], dtype=np.int64)
            EC = membership(B, np.array([c for _, c in cands], dtype=np.int64))[:, pts]
            for b, x in zip(*np.nonzero(missing)):
                if (A.prox_codes(acodes, A.codes[b]) & EC[:, x]).any():
                    missing[b, x] = False
                    used += 1
    hit = _first(missing)
    if w4 is None and hit is not None:
        w4 = [fa(hit[0]), B.point_labels[int(pts[hit[1]])]]
    note = "join checked pointwise on codomain points"
    if used:
        note += f"; {used} witnesses are singletons outside the fragment"
    add("M4", w4, note)
    rep.info["elements"] = A.size
    return rep


def is_morphism(rho: DVMorphism) -> bool:
    return check_morphism(rho).ok


def derived_laws(rho: DVMorphism) -> Report:
    """Consequences of M1-M4; refuses to run on a morphism that fails them."""
    base = check_morphism(rho)
    if not base.ok:
        raise ValueError(f"{rho.name} is not a de Vries morphism: "
                         + ", ".join(c.axiom for c in base.failures()))
    A, B = rho.domain, rho.codomain
    img = rho.require_masks()
    P = prox_matrix(A)
    m = A.masks
    mode, bounds = rho.mode, rho.bounds
    fa = A.fmt
    rep = Report(f"derived morphism laws for {rho.name}")
    Bc = B.codes
    negimg = B.full ^ img

    def add(name: str, wit: list[str] | None) -> None:
        rep.add(Check(name, wit is None, tuple(wit or ()), mode, bounds))

    add("preserves top", None if img[A.full] == B.full else [fa(A.full)])
    bad = (img[A.full ^ m] & ~negimg) != 0
    add("neg below neg", None if not bad.any() else [fa(int(np.argmax(bad)))])
    bad = (img & ~(B.full ^ img[A.full ^ m])) != 0
    add("below dual", None if not bad.any() else [fa(int(np.argmax(bad)))])
    w = None
    for s, e in _pairs_chunks(A.size):
        hit = _first(P[s:e] & ~B.prox_codes(Bc[img[s:e], None], Bc[img][None, :]))
        if hit is not None:
            w = [fa(s + hit[0]), fa(hit[1])]
            break
    add("preserves proximity", w)
    # a1 < b1 and a2 < b2 imply rho(a1 v a2) < rho(b1) v rho(b2)
    pa, pb = np.nonzero(P)
    w = None
    for i in range(len(pa)):
        lhs = Bc[img[pa[i] | pa]]
        rhs = Bc[img[pb[i]] | img[pb]]
        bad = ~B.prox_codes(lhs, rhs)
        if bad.any():
            j = int(np.argmax(bad))
            w = [fa(pa[i]), fa(pb[i]), fa(pa[j]), fa(pb[j])]
            break
    add("two-pair law", w)
    return rep


# ---------------------------------------------------------------------------
# composition


def plain_compose(rho2: DVMorphism, rho1: DVMorphism) -> DVMorphism:
    if rho1.codomain != rho2.domain:
        raise ValueError("codomain of the first map is not the domain of the second")
    masks = rho2.require_masks()[rho1.require_masks()]
    return DVMorphism(rho1.domain, rho2.codomain, masks, rho2.codomain.codes[masks],
                      f"{rho2.name}.{rho1.name}")


def star_compose(rho2: DVMorphism, rho1: DVMorphism) -> DVMorphism:
    """``b -> join of rho2(rho1(a)) over a well inside b``.

    Exact on finite algebras.  On fragments the join is taken pointwise on
    the codomain's checked naturals, with singletons outside the fragment as
    extra ``a``; the result is re-encoded when its window names a fragment
    element and kept as a profile otherwise.
    """
    if rho1.codomain != rho2.domain:
        raise ValueError("codomain of the first map is not the domain of the second")
    A, C = rho1.domain, rho2.codomain
    P = prox_matrix(A)
    inner = rho2.codes[rho1.require_masks()]
    win = C.window_mask
    width = win.bit_length()
    bits = np.arange(width, dtype=np.int64)
    V = ((inner[:, None] >> bits[None, :]) & 1).astype(bool)
    R = _bool_matmul(P.T, V)
    used = 0
    for obj in A.extra_candidates():
        try:
            code = C.code_of(rho2.apply(rho1.apply(obj)))
        except ValueError:
            continue
        rows = A.prox_codes(np.int64(A.code_of(obj)), A.codes)
        cb = ((np.int64(code) >> bits) & 1).astype(bool)
        if rows.any() and cb.any():
            R[rows] |= cb[None, :]
            used += 1
    window = (R.astype(np.int64) << bits[None, :]).sum(axis=1)
    masks = C.mask_of_window(window)
    name = f"{rho2.name}*{rho1.name}"
    note = "" if A.exact and C.exact else "join evaluated pointwise within the witness bound"
    if (masks >= 0).all():
        return DVMorphism(A, C, masks, C.codes[masks], name, note=note)
    return DVMorphism(A, C, None, window, name,
                      note=(note + "; result kept as a membership profile").lstrip("; "))


# ---------------------------------------------------------------------------
# complete Boolean homomorphisms


def complete_boolean_check(sigma: DVMorphism) -> Check:
    """Does ``sigma`` preserve all joins, meets and complements?

    Preimage-type maps are complete by construction.  Otherwise finite maps
    are checked exhaustively and fragment maps on the fragment.
    """
    mode, bounds = sigma.mode, sigma.bounds
    if sigma.complete:
        return Check("complete Boolean homomorphism", True, (), mode, bounds, "by construction")
    A, B = sigma.domain, sigma.codomain
    img = sigma.require_masks()
    m = A.masks
    if img[0] != 0:
        return Check("complete Boolean homomorphism", False, (A.fmt(0), "bottom"), mode, bounds)
    bad = img[A.full ^ m] != (B.full ^ img)
    if bad.any():
        a = int(np.argmax(bad))
        return Check("complete Boolean homomorphism", False, (A.fmt(a), "complement"), mode, bounds)
    for s, e in _pairs_chunks(A.size):
        hit = _first(img[m[s:e, None] | m[None, :]] != (img[s:e, None] | img[None, :]))
        if hit is not None:
            return Check("complete Boolean homomorphism", False,
                         (A.fmt(s + hit[0]), A.fmt(hit[1]), "join"), mode, bounds)
    note = "finite, so complete" if A.exact else "checked on the fragment"
    return Check("complete Boolean homomorphism", True, (), mode, bounds, note)


def is_complete_boolean_hom(sigma: DVMorphism) -> bool:
    return complete_boolean_check(sigma).passed


def preimage_morphism(A: FinDeVries, B: FinDeVries, f: Sequence[int], name: str = "") -> DVMorphism:
    """``f^-1 : P(m) -> P(n)`` for ``f : n -> m`` given as a list of length n."""
    if len(f) != B.n or any(not 0 <= v < A.n for v in f):
        raise ValueError("f must map range(n) into range(m)")
    masks = []
    for a in range(A.size):
        out = 0
        for i, v in enumerate(f):
            if a >> v & 1:
                out |= 1 << i
        masks.append(out)
    return DVMorphism.from_masks(A, B, masks, name or f"pre{list(f)}", complete=True)
