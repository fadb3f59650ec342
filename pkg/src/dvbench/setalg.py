"""Decidable subsets of finite sets and of the natural numbers.

Three carriers live here:

* :class:`FinSubset` -- a subset of ``{0, ..., size-1}`` stored as a bitmask.
* :class:`ArithSet` -- an eventually periodic subset of N in canonical form.
* :class:`PiecewiseArithMap` -- a self-map of N that is affine on residue
  classes beyond a threshold and given by an explicit table below it.

The module also fixes the *fragment* encoding: ``Frag(T, P)`` is the set of
ArithSets with threshold at most ``T`` and period dividing ``P``.  Its
elements are in bijection with ``(T + P)``-bit masks (bit ``n`` for
``n < T`` records membership of ``n``; bit ``T + r`` records membership of
the residue class ``r`` mod ``P`` from ``T`` on).  Bitwise operations on
masks are the Boolean operations of the fragment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Callable, Iterable, Iterator

import numpy as np


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _bits(items: Iterable[int]) -> int:
    mask = 0
    for i in items:
        mask |= 1 << i
    return mask


def _members(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _fmt_set(items: Iterable[int]) -> str:
    return "{" + ",".join(str(i) for i in sorted(items)) + "}"


# ---------------------------------------------------------------------------
# finite powersets


@dataclass(frozen=True)
class FinSubset:
    """A subset of ``{0, ..., size-1}``."""

    size: int
    bits: int

    def __post_init__(self) -> None:
        if self.size < 0:
            raise ValueError("universe size must be non-negative")
        if self.bits < 0 or self.bits >> self.size:
            raise ValueError(f"members out of range for universe of size {self.size}")

    @classmethod
    def of(cls, size: int, members: Iterable[int]) -> "FinSubset":
        return cls(size, _bits(members))

    @property
    def members(self) -> frozenset[int]:
        return frozenset(_members(self.bits))

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.size and bool(self.bits >> i & 1)

    def __or__(self, other: "FinSubset") -> "FinSubset":
        self._same(other)
        return FinSubset(self.size, self.bits | other.bits)

    def __and__(self, other: "FinSubset") -> "FinSubset":
        self._same(other)
        return FinSubset(self.size, self.bits & other.bits)

    def __invert__(self) -> "FinSubset":
        return FinSubset(self.size, ~self.bits & ((1 << self.size) - 1))

    def __le__(self, other: "FinSubset") -> bool:
        self._same(other)
        return self.bits & ~other.bits == 0

    def _same(self, other: "FinSubset") -> None:
        if self.size != other.size:
            raise ValueError("subsets of different universes")

    def __str__(self) -> str:
        return _fmt_set(_members(self.bits))


def fmt_mask(mask: int) -> str:
    """Print a finite bitmask as a set literal ``{0,2}``."""
    return _fmt_set(_members(mask))


# ---------------------------------------------------------------------------
# eventually periodic subsets of N


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(d for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def _lift(rmask: int, p: int, q: int) -> int:
    # residues r mod q whose reduction mod p lies in rmask (p divides q)
    out = 0
    for r in range(q):
        if rmask >> (r % p) & 1:
            out |= 1 << r
    return out


def _has_period(rmask: int, p: int, d: int) -> bool:
    return all((rmask >> r & 1) == (rmask >> (r % d) & 1) for r in range(p))


class ArithSet:
    """An eventually periodic subset of N.

    ``n`` is a member iff ``n < threshold and n in initial`` or
    ``n >= threshold and n % period in residues``.  Instances are always in
    canonical form (minimal period, then minimal threshold), so ``==`` is
    set equality.
    """

    __slots__ = ("threshold", "period", "_emask", "_rmask", "_hash")

    def __init__(self, threshold: int, period: int, emask: int, rmask: int,
                 _canonical: bool = False) -> None:
        if not _canonical:
            threshold, period, emask, rmask = _canonicalize(threshold, period, emask, rmask)
        self.threshold = threshold
        self.period = period
        self._emask = emask
        self._rmask = rmask
        self._hash = hash((threshold, period, emask, rmask))

    # construction -----------------------------------------------------

    @classmethod
    def make(cls, threshold: int = 0, period: int = 1, residues: Iterable[int] = (),
             initial: Iterable[int] = ()) -> "ArithSet":
        residues = list(residues)
        initial = list(initial)
        if period < 1:
            raise ValueError("period must be at least 1")
        if threshold < 0:
            raise ValueError("threshold must be non-negative")
        bad = [r for r in residues if not 0 <= r < period]
        if bad:
            raise ValueError(f"residue {bad[0]} out of range for period {period}")
        bad = [n for n in initial if not 0 <= n < threshold]
        if bad:
            raise ValueError(f"initial element {bad[0]} not below threshold {threshold}")
        return cls(threshold, period, _bits(initial), _bits(residues))

    @classmethod
    def finite(cls, members: Iterable[int]) -> "ArithSet":
        members = list(members)
        if any(n < 0 for n in members):
            raise ValueError("natural numbers only")
        top = max(members, default=-1) + 1
        return cls(top, 1, _bits(members), 0)

    @classmethod
    def progression(cls, period: int, *residues: int) -> "ArithSet":
        """``period*N + r`` for each given residue, e.g. ``progression(4, 0, 3)``."""
        return cls.make(0, period, residues)

    @classmethod
    def from_rule(cls, threshold: int, period: int, pred: Callable[[int], bool]) -> "ArithSet":
        """Sample a predicate known to be ``period``-periodic from ``threshold`` on."""
        emask = 0
        for n in range(threshold):
            if pred(n):
                emask |= 1 << n
        rmask = 0
        for r in range(period):
            n = threshold + (r - threshold) % period
            if pred(n):
                rmask |= 1 << r
        return cls(threshold, period, emask, rmask)

    @classmethod
    def empty(cls) -> "ArithSet":
        return _EMPTY

    @classmethod
    def naturals(cls) -> "ArithSet":
        return _ALL

    # inspection -------------------------------------------------------

    @property
    def residues(self) -> frozenset[int]:
        return frozenset(_members(self._rmask))

    @property
    def initial(self) -> frozenset[int]:
        return frozenset(_members(self._emask))

    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        if n < self.threshold:
            return bool(self._emask >> n & 1)
        return bool(self._rmask >> (n % self.period) & 1)

    member = __contains__

    def is_finite(self) -> bool:
        return self._rmask == 0

    def is_cofinite(self) -> bool:
        return self._rmask == (1 << self.period) - 1

    def window(self, width: int) -> int:
        """Membership of ``0..width-1`` as a bitmask."""
        out = 0
        for n in range(width):
            if n in self:
                out |= 1 << n
        return out

    def elements_below(self, bound: int) -> Iterator[int]:
        return (n for n in range(bound) if n in self)

    def key(self) -> tuple[int, int, int, int]:
        return (self.threshold, self.period, self._emask, self._rmask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ArithSet):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "ArithSet") -> bool:
        return self.key() < other.key()

    def __repr__(self) -> str:
        return f"ArithSet({self})"

    def __str__(self) -> str:
        return format_arith(self)

    # boolean algebra --------------------------------------------------

    def _aligned(self, other: "ArithSet") -> tuple[int, int, int, int, int, int]:
        t = max(self.threshold, other.threshold)
        q = lcm(self.period, other.period)
        return (t, q, self.window(t), _lift(self._rmask, self.period, q),
                other.window(t), _lift(other._rmask, other.period, q))

    def __or__(self, other: "ArithSet") -> "ArithSet":
        t, q, e1, r1, e2, r2 = self._aligned(other)
        return ArithSet(t, q, e1 | e2, r1 | r2)

    def __and__(self, other: "ArithSet") -> "ArithSet":
        t, q, e1, r1, e2, r2 = self._aligned(other)
        return ArithSet(t, q, e1 & e2, r1 & r2)

    def __sub__(self, other: "ArithSet") -> "ArithSet":
        t, q, e1, r1, e2, r2 = self._aligned(other)
        return ArithSet(t, q, e1 & ~e2, r1 & ~r2)

    def __invert__(self) -> "ArithSet":
        full_e = (1 << self.threshold) - 1
        full_r = (1 << self.period) - 1
        return ArithSet(self.threshold, self.period, ~self._emask & full_e, ~self._rmask & full_r)

    def __le__(self, other: "ArithSet") -> bool:
        return (self - other) == _EMPTY

    def __ge__(self, other: "ArithSet") -> bool:
        return other <= self

    union = __or__
    intersection = __and__
    complement = __invert__
    issubset = __le__


def _canonicalize(t: int, p: int, emask: int, rmask: int) -> tuple[int, int, int, int]:
    for d in _divisors(p):
        if _has_period(rmask, p, d):
            rmask &= (1 << d) - 1
            p = d
            break
    emask &= (1 << t) - 1
    while t > 0 and (emask >> (t - 1) & 1) == (rmask >> ((t - 1) % p) & 1):
        t -= 1
        emask &= ~(1 << t)
    return t, p, emask, rmask


_EMPTY = ArithSet(0, 1, 0, 0, _canonical=True)
_ALL = ArithSet(0, 1, 0, 1, _canonical=True)


def canonicalize(s: ArithSet) -> ArithSet:
    return ArithSet(s.threshold, s.period, s._emask, s._rmask)


def boolean_op(kind: str, a: ArithSet, b: ArithSet | None = None) -> ArithSet:
    if kind == "complement":
        return ~a
    if b is None:
        raise ValueError(f"{kind} needs two operands")
    if kind == "union":
        return a | b
    if kind == "intersection":
        return a & b
    raise ValueError(f"unknown boolean operation {kind!r}")


def residue_class_set(period: int, residues: Iterable[int]) -> ArithSet:
    return ArithSet.make(0, period, residues)


# literal syntax: {e1,e2} ++ period P residues {r1,r2} from T

_ARITH_RE = re.compile(
    r"^\{(?P<init>[^{}]*)\}\s*\+\+\s*period\s+(?P<p>\d+)\s+residues\s+"
    r"\{(?P<res>[^{}]*)\}\s+from\s+(?P<t>\d+)$"
)


def format_arith(s: ArithSet) -> str:
    return (f"{_fmt_set(s.initial)} ++ period {s.period} "
            f"residues {_fmt_set(s.residues)} from {s.threshold}")


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(x) for x in text.split(",")]


def parse_arith(text: str) -> ArithSet:
    m = _ARITH_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not an ArithSet literal: {text.strip()!r}")
    try:
        init = _int_list(m["init"])
        res = _int_list(m["res"])
    except ValueError:
        raise ValueError(f"malformed integer list in {text.strip()!r}") from None
    return ArithSet.make(int(m["t"]), int(m["p"]), res, init)


# ---------------------------------------------------------------------------
# fragments Frag(T, P)


def frag_size(T: int, P: int) -> int:
    return 1 << (T + P)


def frag_decode(T: int, P: int, mask: int) -> ArithSet:
    return ArithSet(T, P, mask & ((1 << T) - 1), mask >> T)


def frag_encode(T: int, P: int, s: ArithSet) -> int:
    """Mask of ``s`` inside ``Frag(T, P)``; ``ValueError`` if it lies outside."""
    if s.threshold > T or P % s.period:
        raise ValueError(f"{s} is not in Frag({T},{P})")
    return s.window(T) | (_tail_bits(s, T, P) << T)


def _tail_bits(s: ArithSet, T: int, P: int) -> int:
    # bit r: membership of n >= T with n = r (mod P)
    out = 0
    for r in range(P):
        if T + (r - T) % P in s:
            out |= 1 << r
    return out


def in_fragment(s: ArithSet, T: int, P: int) -> bool:
    return s.threshold <= T and P % s.period == 0


def fragment(T: int, P: int) -> list[ArithSet]:
    """All of ``Frag(T, P)`` in mask order."""
    return [frag_decode(T, P, m) for m in range(frag_size(T, P))]


def frag_profiles(T: int, P: int, width: int) -> np.ndarray:
    """Membership of ``0..width-1`` for every fragment mask, as int64 bitmasks."""
    if width > 62:
        raise ValueError("profile width limited to 62 points")
    masks = np.arange(frag_size(T, P), dtype=np.int64)
    out = masks & ((1 << min(T, width)) - 1)
    for n in range(T, width):
        bit = (masks >> (T + n % P)) & 1
        out |= bit << n
    return out


# ---------------------------------------------------------------------------
# piecewise arithmetic maps


@dataclass(frozen=True)
class PiecewiseArithMap:
    """``n -> table[n]`` below ``threshold``; ``scale[r]*n + offset[r]`` above,
    where ``r = n % modulus``."""

    modulus: int
    offsets: tuple[int, ...]
    threshold: int = 0
    table: tuple[int, ...] = ()
    scales: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError("modulus must be at least 1")
        object.__setattr__(self, "offsets", tuple(self.offsets))
        object.__setattr__(self, "table", tuple(self.table))
        scales = tuple(self.scales) if self.scales is not None else (1,) * self.modulus
        object.__setattr__(self, "scales", scales)
        if len(self.offsets) != self.modulus or len(scales) != self.modulus:
            raise ValueError("need one offset and one scale per residue")
        if len(self.table) != self.threshold:
            raise ValueError("initial table must cover 0..threshold-1")
        if any(v < 0 for v in self.table) or any(a < 0 for a in scales):
            raise ValueError("outputs and scales must be natural")
        for r in range(self.modulus):
            n = self.threshold + (r - self.threshold) % self.modulus
            if scales[r] * n + self.offsets[r] < 0:
                raise ValueError(f"residue class {r} maps below 0 at n={n}")

    @classmethod
    def identity(cls) -> "PiecewiseArithMap":
        return cls(1, (0,))

    @classmethod
    def shift(cls, k: int) -> "PiecewiseArithMap":
        return cls(1, (k,))

    @classmethod
    def affine(cls, scale: int, offset: int = 0) -> "PiecewiseArithMap":
        return cls(1, (offset,), scales=(scale,))

    def __call__(self, n: int) -> int:
        if n < self.threshold:
            return self.table[n]
        r = n % self.modulus
        return self.scales[r] * n + self.offsets[r]

    def is_shift_only(self) -> bool:
        return all(a == 1 for a in self.scales)

    def __str__(self) -> str:
        return format_map(self)


def format_map(f: PiecewiseArithMap) -> str:
    lst = lambda xs: "[" + ",".join(str(x) for x in xs) + "]"  # noqa: E731
    out = f"piecewise modulus {f.modulus} offsets {lst(f.offsets)}"
    if not f.is_shift_only():
        out += f" scales {lst(f.scales)}"
    return out + f" from {f.threshold} table {lst(f.table)}"


_MAP_RE = re.compile(
    r"^piecewise\s+modulus\s+(?P<m>\d+)\s+offsets\s+\[(?P<off>[^\]]*)\]"
    r"(?:\s+scales\s+\[(?P<sc>[^\]]*)\])?\s+from\s+(?P<t>\d+)\s+table\s+\[(?P<tab>[^\]]*)\]$"
)


def parse_map(text: str) -> PiecewiseArithMap:
    m = _MAP_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a piecewise map literal: {text.strip()!r}")
    scales = _int_list(m["sc"]) if m["sc"] is not None else None
    return PiecewiseArithMap(int(m["m"]), tuple(_int_list(m["off"])), int(m["t"]),
                             tuple(_int_list(m["tab"])),
                             tuple(scales) if scales is not None else None)


def _tail_threshold(f: PiecewiseArithMap, floor: int) -> int:
    # least n0 >= f.threshold with f(n) >= floor for all n >= n0 on scaled classes
    n0 = f.threshold
    for r in range(f.modulus):
        a, b = f.scales[r], f.offsets[r]
        if a > 0 and floor - b > 0:
            n0 = max(n0, -(-(floor - b) // a))
    return n0


def preimage(f: PiecewiseArithMap, s: ArithSet) -> ArithSet:
    """``{n : f(n) in s}``."""
    n0 = _tail_threshold(f, s.threshold)
    return ArithSet.from_rule(n0, lcm(f.modulus, s.period), lambda n: f(n) in s)


def compose(g: PiecewiseArithMap, f: PiecewiseArithMap) -> PiecewiseArithMap:
    """``g . f`` as a piecewise map."""
    L = lcm(f.modulus, g.modulus)
    n0 = _tail_threshold(f, g.threshold)
    # align n0 so classes mod L keep their affine form from n0 on
    offsets, scales = [], []
    for r in range(L):
        a1, b1 = f.scales[r % f.modulus], f.offsets[r % f.modulus]
        if a1 == 0:
            v = g(b1)
            offsets.append(v)
            scales.append(0)
            continue
        # for n = r (mod L), f(n) = a1*n + b1 has fixed residue mod g.modulus
        s = (a1 * r + b1) % g.modulus
        a2, b2 = g.scales[s], g.offsets[s]
        scales.append(a2 * a1)
        offsets.append(a2 * b1 + b2)
    return PiecewiseArithMap(L, tuple(offsets), n0, tuple(g(f(n)) for n in range(n0)),
                             tuple(scales))


def same_function(f: PiecewiseArithMap, g: PiecewiseArithMap) -> int | None:
    """``None`` if ``f == g`` on all of N, else the least disagreement."""
    L = lcm(f.modulus, g.modulus)
    T = max(f.threshold, g.threshold)
    for n in range(T + 2 * L):
        if f(n) != g(n):
            return n
    # beyond T both are affine on each class mod L; two agreeing points fix the line
    return None


@dataclass(frozen=True)
class BijectionReport:
    bijective: bool
    inverse: PiecewiseArithMap | None = None
    collision: tuple[int, int] | None = None
    missed: int | None = None


def check_bijection(f: PiecewiseArithMap, search_limit: int = 4096) -> BijectionReport:
    """Decide whether ``f`` is a bijection of N and build its inverse."""
    m = f.modulus
    if f.is_shift_only():
        # tail class r goes onto class (r + b_r) mod m from start_r on
        targets = [(r + f.offsets[r]) % m for r in range(m)]
        starts = []
        for r in range(m):
            n = f.threshold + (r - f.threshold) % m
            starts.append(n + f.offsets[r])
        if sorted(targets) == list(range(m)):
            owner = {targets[r]: r for r in range(m)}
            missed = sorted(v for r in range(m) for v in range(targets[r], starts[r], m))
            if len(set(f.table)) == len(f.table) and sorted(f.table) == missed:
                top = max(starts, default=0)
                inv_table = []
                where = {v: i for i, v in enumerate(f.table)}
                for v in range(top):
                    inv_table.append(where[v] if v in where else v - f.offsets[owner[v % m]])
                inverse = PiecewiseArithMap(
                    m, tuple(-f.offsets[owner[s]] for s in range(m)), top, tuple(inv_table))
                return BijectionReport(True, inverse=inverse)
    return _bijection_witness(f, search_limit)


def _bijection_witness(f: PiecewiseArithMap, limit: int) -> BijectionReport:
    # for scale >= 1 classes f(n) >= n + min offset, so small values are only
    # reached from a bounded window
    lo = min(min(f.offsets), 0)
    width = max(2 * (f.threshold + f.modulus) + 4, 16)
    while width <= limit:
        seen: dict[int, int] = {}
        for n in range(width):
            v = f(n)
            if v in seen:
                return BijectionReport(False, collision=(seen[v], n))
            seen[v] = n
        if all(a >= 1 for a in f.scales):
            for v in range(width + lo):
                if v not in seen:
                    return BijectionReport(False, missed=v)
        width *= 2
    raise RuntimeError("no bijection witness found within the search limit")
