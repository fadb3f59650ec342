"""Arithmetic compactifications of N and finite discrete spaces.

An :class:`ArithCompactification` is ``Y = N + {inf_1, ..., inf_k}`` where the
residues mod ``period`` are partitioned into ``k`` blocks.  Every natural
number is isolated and the neighbourhoods of ``inf_i`` are the sets that
contain ``inf_i`` and all but finitely many ``n`` with ``n % period`` in
block ``i``.  Subsets of ``Y`` whose trace on N is eventually periodic are
:class:`YSubset` values; closure, interior and regular-openness are exact on
them.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .setalg import ArithSet, PiecewiseArithMap, format_arith, parse_arith, preimage


class NotRegularOpen(ValueError):
    """Raised when a regular-open operation receives another kind of set."""

    def __init__(self, subset: "YSubset", reason: str, witness: str) -> None:
        super().__init__(f"{reason}: witness {witness}")
        self.subset = subset
        self.witness = witness


@dataclass(frozen=True)
class ArithCompactification:
    period: int
    blocks: tuple[frozenset[int], ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        blocks = tuple(frozenset(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.period < 1:
            raise ValueError("period must be at least 1")
        if len(self.labels) != len(blocks):
            raise ValueError("need one label per block")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("infinity labels must be distinct")
        seen: dict[int, int] = {}
        for i, block in enumerate(blocks):
            if not block:
                raise ValueError(f"block {i} ({self.labels[i]}) is empty")
            for r in sorted(block):
                if not 0 <= r < self.period:
                    raise ValueError(f"residue {r} out of range for period {self.period}")
                if r in seen:
                    raise ValueError(
                        f"blocks {self.labels[seen[r]]} and {self.labels[i]} share residue {r}")
                seen[r] = i
        missing = sorted(set(range(self.period)) - set(seen))
        if missing:
            raise ValueError(f"residue {missing[0]} is in no block")

    # factories --------------------------------------------------------

    @classmethod
    def from_partition(cls, period: int, blocks: Sequence[Iterable[int]],
                       labels: Sequence[str] | None = None) -> "ArithCompactification":
        blocks = tuple(frozenset(b) for b in blocks)
        if labels is None:
            labels = tuple(f"inf_{i + 1}" for i in range(len(blocks)))
        return cls(period, blocks, tuple(labels))

    @classmethod
    def one_point(cls) -> "ArithCompactification":
        return cls(1, (frozenset({0}),), ("inf",))

    @classmethod
    def parity(cls) -> "ArithCompactification":
        return cls(2, (frozenset({0}), frozenset({1})), ("inf_e", "inf_o"))

    @classmethod
    def singleton_partition(cls, period: int) -> "ArithCompactification":
        return cls.from_partition(period, [{r} for r in range(period)])

    # structure --------------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.blocks)

    def block_set(self, i: int) -> ArithSet:
        """``N_i``: the naturals accumulating at ``inf_i``."""
        return _block_set(self.period, self.blocks[i])

    def block_of(self, n: int) -> int:
        r = n % self.period
        for i, b in enumerate(self.blocks):
            if r in b:
                return i
        raise AssertionError("blocks cover all residues")

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"no point at infinity named {label!r}") from None

    def whole(self) -> "YSubset":
        return YSubset(ArithSet.naturals(), frozenset(range(self.k)))

    def points(self, bound: int) -> list[tuple[str, int]]:
        """Naturals below ``bound`` followed by the points at infinity."""
        return [("n", n) for n in range(bound)] + [("inf", i) for i in range(self.k)]

    def __str__(self) -> str:
        return format_compactification(self)


@functools.lru_cache(maxsize=None)
def _block_set(period: int, block: frozenset[int]) -> ArithSet:
    return ArithSet.make(0, period, block)


@dataclass(frozen=True)
class FinDiscrete:
    """A finite discrete space; its only compactification is the identity."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 0:
            raise ValueError("size must be non-negative")


@dataclass(frozen=True)
class YSubset:
    trace: ArithSet
    infinities: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "infinities", frozenset(self.infinities))

    def contains_point(self, point: tuple[str, int]) -> bool:
        kind, v = point
        return v in self.trace if kind == "n" else v in self.infinities

    def __le__(self, other: "YSubset") -> bool:
        return self.trace <= other.trace and self.infinities <= other.infinities

    def key(self) -> tuple:
        return (self.trace.key(), tuple(sorted(self.infinities)))


def format_ysubset(Y: ArithCompactification, s: YSubset) -> str:
    names = ",".join(Y.labels[i] for i in sorted(s.infinities))
    return f"{format_arith(s.trace)} + {{{names}}}"


def parse_ysubset(Y: ArithCompactification, text: str) -> YSubset:
    m = re.match(r"^(?P<arith>.*\S)\s*\+\s*\{(?P<names>[^{}]*)\}\s*$", text.strip())
    if m is None or "++" not in m["arith"]:
        raise ValueError(f"not a YSubset literal: {text.strip()!r}")
    names = [x.strip() for x in m["names"].split(",") if x.strip()]
    return YSubset(parse_arith(m["arith"]), frozenset(Y.index(n) for n in names))


# ---------------------------------------------------------------------------
# closure and interior


def _meets_infinitely(Y: ArithCompactification, s: ArithSet, i: int) -> bool:
    return not (s & Y.block_set(i)).is_finite()


def _almost_contains(Y: ArithCompactification, s: ArithSet, i: int) -> bool:
    return (Y.block_set(i) - s).is_finite()


def closure(Y: ArithCompactification, s: YSubset) -> YSubset:
    extra = {i for i in range(Y.k) if _meets_infinitely(Y, s.trace, i)}
    return YSubset(s.trace, s.infinities | extra)


def interior(Y: ArithCompactification, s: YSubset) -> YSubset:
    keep = {i for i in s.infinities if _almost_contains(Y, s.trace, i)}
    return YSubset(s.trace, frozenset(keep))


def complement(Y: ArithCompactification, s: YSubset) -> YSubset:
    return YSubset(~s.trace, frozenset(range(Y.k)) - s.infinities)


def union(s: YSubset, t: YSubset) -> YSubset:
    return YSubset(s.trace | t.trace, s.infinities | t.infinities)


def intersection(s: YSubset, t: YSubset) -> YSubset:
    return YSubset(s.trace & t.trace, s.infinities & t.infinities)


def is_open(Y: ArithCompactification, s: YSubset) -> bool:
    return interior(Y, s) == s


def regularize(Y: ArithCompactification, s: YSubset) -> YSubset:
    return interior(Y, closure(Y, s))


def is_regular_open(Y: ArithCompactification, s: YSubset) -> bool:
    return is_open(Y, s) and regularize(Y, s) == s


def ro(Y: ArithCompactification, trace: ArithSet) -> YSubset:
    """The regular open set with the given trace on N."""
    return regularize(Y, YSubset(trace))


def require_regular_open(Y: ArithCompactification, s: YSubset) -> None:
    if not is_open(Y, s):
        bad = sorted(s.infinities - interior(Y, s).infinities)[0]
        raise NotRegularOpen(s, "not open", Y.labels[bad])
    reg = regularize(Y, s)
    if reg != s:
        extra = sorted(reg.infinities - s.infinities)[0]
        raise NotRegularOpen(s, "open but not regular open", Y.labels[extra])


def ro_op(kind: str, Y: ArithCompactification, u: YSubset, v: YSubset | None = None) -> YSubset:
    """Join, meet or negation in the regular-open algebra of ``Y``."""
    require_regular_open(Y, u)
    if kind == "neg":
        return interior(Y, complement(Y, u))
    if v is None:
        raise ValueError(f"{kind} needs two operands")
    require_regular_open(Y, v)
    if kind == "join":
        return regularize(Y, union(u, v))
    if kind == "meet":
        return intersection(u, v)
    raise ValueError(f"unknown regular-open operation {kind!r}")


def canonical_proximity(Y: ArithCompactification, u: YSubset, v: YSubset) -> bool:
    """``u`` is well inside ``v``: the closure of ``u`` is contained in ``v``."""
    require_regular_open(Y, u)
    require_regular_open(Y, v)
    return closure(Y, u) <= v


# ---------------------------------------------------------------------------
# maps between compactifications

Point = tuple  # ("n", n) or ("inf", i)


@dataclass(frozen=True)
class YMap:
    """A map ``Y -> Y'`` given by a map on N, images of the points at infinity,
    and finitely many naturals sent to points at infinity."""

    source: ArithCompactification
    target: ArithCompactification
    nat: PiecewiseArithMap
    at_infinity: tuple[Point, ...]
    to_infinity: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "at_infinity", tuple(tuple(p) for p in self.at_infinity))
        object.__setattr__(self, "to_infinity", tuple(sorted(tuple(p) for p in self.to_infinity)))
        if len(self.at_infinity) != self.source.k:
            raise ValueError("need an image for every point at infinity")
        for p in self.at_infinity + tuple(("inf", j) for _, j in self.to_infinity):
            if p[0] == "inf" and not 0 <= p[1] < self.target.k:
                raise ValueError(f"no point at infinity {p[1]} in the target")
            if p[0] not in ("n", "inf"):
                raise ValueError(f"bad point {p!r}")

    @classmethod
    def identity(cls, Y: ArithCompactification) -> "YMap":
        return cls(Y, Y, PiecewiseArithMap.identity(), tuple(("inf", i) for i in range(Y.k)))

    @classmethod
    def extend(cls, Y: ArithCompactification, Y2: ArithCompactification,
               f: PiecewiseArithMap, labels: dict[str, str]) -> "YMap":
        """``f`` on N with ``inf_i -> labels[inf_i]``."""
        return cls(Y, Y2, f, tuple(("inf", Y2.index(labels[name])) for name in Y.labels))

    def __call__(self, p: Point) -> Point:
        kind, v = p
        if kind == "inf":
            return self.at_infinity[v]
        for n, j in self.to_infinity:
            if n == v:
                return ("inf", j)
        return ("n", self.nat(v))

    def preimage(self, u: YSubset) -> YSubset:
        trace = preimage(self.nat, u.trace)
        if self.to_infinity:
            extra = [n for n, j in self.to_infinity if j in u.infinities]
            drop = [n for n, _ in self.to_infinity]
            trace = (trace - ArithSet.finite(drop)) | ArithSet.finite(extra)
        infs = {i for i, p in enumerate(self.at_infinity) if u.contains_point(p)}
        return YSubset(trace, frozenset(infs))

    def star(self, u: YSubset) -> YSubset:
        """``int cl`` of the preimage: the dual map on regular open sets."""
        return regularize(self.source, self.preimage(u))


# ---------------------------------------------------------------------------
# enumeration


def set_partitions(items: Sequence[int]) -> Iterator[list[frozenset[int]]]:
    """All set partitions of ``items`` (blocks ordered by least element)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for size in range(len(rest) + 1):
        for mates in combinations(rest, size):
            block = frozenset((first, *mates))
            remaining = [x for x in rest if x not in block]
            for tail in set_partitions(remaining):
                yield [block, *tail]


def partition_compactifications(period: int) -> list[ArithCompactification]:
    """Every arithmetic compactification whose partition lives on ``Z_period``."""
    return [ArithCompactification.from_partition(period, blocks)
            for blocks in set_partitions(range(period))]


# ---------------------------------------------------------------------------
# literal syntax: compactify N period P blocks [{r...} -> name, ...]

_COMPACT_RE = re.compile(r"^compactify\s+N\s+period\s+(?P<p>\d+)\s+blocks\s+\[(?P<body>.*)\]\s*$")
_BLOCK_RE = re.compile(r"\{(?P<res>[^{}]*)\}\s*->\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)")


def format_compactification(Y: ArithCompactification) -> str:
    parts = []
    for block, name in zip(Y.blocks, Y.labels):
        parts.append("{" + ",".join(str(r) for r in sorted(block)) + "} -> " + name)
    return f"compactify N period {Y.period} blocks [" + ", ".join(parts) + "]"


def parse_compactification(text: str) -> ArithCompactification:
    m = _COMPACT_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a compactification literal: {text.strip()!r}")
    body = m["body"].strip()
    blocks, labels = [], []
    pos = 0
    for bm in _BLOCK_RE.finditer(body):
        if body[pos:bm.start()].strip(" ,"):
            raise ValueError(f"unexpected text {body[pos:bm.start()].strip()!r} in block list")
        res = bm["res"].strip()
        blocks.append([int(x) for x in res.split(",")] if res else [])
        labels.append(bm["name"])
        pos = bm.end()
    if body[pos:].strip(" ,"):
        raise ValueError(f"unexpected text {body[pos:].strip()!r} in block list")
    if not blocks:
        raise ValueError("compactification needs at least one block")
    return ArithCompactification(int(m["p"]), tuple(frozenset(b) for b in blocks), tuple(labels))
