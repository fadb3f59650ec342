"""Structure files: one definition per line, optionally named.

    # comment
    Y  = compactify N period 2 blocks [{0} -> inf_e, {1} -> inf_o]
    Y2 = compactify N period 4 blocks [{0,3} -> inf_1, {1,2} -> inf_2]
    f  = piecewise modulus 4 offsets [0,0,1,-1] from 0 table []
    g  = extend f from Y to Y2 with inf_e -> inf_1, inf_o -> inf_2
    A  = {} ++ period 4 residues {0,3} from 0
    X  = discrete 3
    h  = map [0,1,1]
    B  = algebra atoms 2
         relation le minus ({0},{0})

A ``relation`` line refines the algebra defined just before it: ``le`` is
the order, ``le minus (a,b), ...`` drops pairs from it and ``pairs (a,b), ...``
lists the relation outright.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .devries import FinDeVries
from .setalg import (ArithSet, PiecewiseArithMap, fmt_mask, format_arith, format_map,
                     parse_arith, parse_map)
from .topology import (ArithCompactification, FinDiscrete, YMap, format_compactification,
                       parse_compactification)


class StructureError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0) -> None:
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)
        self.line, self.col = line, col


@dataclass(frozen=True)
class FiniteMap:
    values: tuple[int, ...]


@dataclass(frozen=True)
class MapExtension:
    """``extend f from Y to Y2 with ...``: keeps the names for printing."""

    ymap: YMap
    f_name: str
    source_name: str
    target_name: str


@dataclass
class Structure:
    items: list[tuple[str, Any]] = field(default_factory=list)

    def __getitem__(self, name: str) -> Any:
        for k, v in self.items:
            if k == name:
                return v
        raise KeyError(name)

    def of_type(self, *types: type) -> list[tuple[str, Any]]:
        return [(k, v) for k, v in self.items if isinstance(v, types)]


_NAME_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_']*)\s*=\s*")
_PAIR_RE = re.compile(r"\(\s*(\{[^{}]*\})\s*,\s*(\{[^{}]*\})\s*\)")
_EXTEND_RE = re.compile(
    r"^extend\s+(?P<f>\S+)\s+from\s+(?P<y>\S+)\s+to\s+(?P<y2>\S+)\s+with\s+(?P<body>.*)$")


def _set_literal(text: str, n: int) -> int:
    body = text.strip()[1:-1].strip()
    mask = 0
    for x in (body.split(",") if body else []):
        i = int(x)
        if not 0 <= i < n:
            raise ValueError(f"atom {i} out of range for {n} atoms")
        mask |= 1 << i
    return mask


def _pairs(text: str, n: int) -> list[tuple[int, int]]:
    out, pos = [], 0
    for m in _PAIR_RE.finditer(text):
        if text[pos:m.start()].strip(" ,"):
            raise ValueError(f"unexpected text {text[pos:m.start()].strip()!r} in pair list")
        out.append((_set_literal(m[1], n), _set_literal(m[2], n)))
        pos = m.end()
    if text[pos:].strip(" ,"):
        raise ValueError(f"unexpected text {text[pos:].strip()!r} in pair list")
    return out


def _parse_value(body: str, st: Structure) -> Any:
    if body.startswith("compactify"):
        return parse_compactification(body)
    if body.startswith("piecewise"):
        return parse_map(body)
    if body.startswith("{"):
        return parse_arith(body)
    m = re.match(r"^discrete\s+(\d+)$", body)
    if m:
        return FinDiscrete(int(m[1]))
    m = re.match(r"^algebra\s+atoms\s+(\d+)$", body)
    if m:
        n = int(m[1])
        if n > 12:
            raise ValueError("finite algebras are limited to 12 atoms")
        return FinDeVries(n)
    m = re.match(r"^map\s+\[([^\]]*)\]$", body)
    if m:
        vals = [int(x) for x in m[1].split(",")] if m[1].strip() else []
        return FiniteMap(tuple(vals))
    m = _EXTEND_RE.match(body)
    if m:
        try:
            f, Y, Y2 = st[m["f"]], st[m["y"]], st[m["y2"]]
        except KeyError as exc:
            raise ValueError(f"undefined name {exc.args[0]}") from None
        if not isinstance(f, PiecewiseArithMap):
            raise ValueError(f"{m['f']} is not a piecewise map")
        if not isinstance(Y, ArithCompactification) or not isinstance(Y2, ArithCompactification):
            raise ValueError("extend needs two compactifications")
        labels = {}
        for part in m["body"].split(","):
            a, arrow, b = part.partition("->")
            if not arrow:
                raise ValueError(f"expected 'inf -> inf', got {part.strip()!r}")
            labels[a.strip()] = b.strip()
        missing = [x for x in Y.labels if x not in labels]
        if missing:
            raise ValueError(f"no image given for {missing[0]}")
        return MapExtension(YMap.extend(Y, Y2, f, labels), m["f"], m["y"], m["y2"])
    raise ValueError("unrecognized definition")


def parse_structure(text: str) -> Structure:
    st = Structure()
    auto = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        m = _NAME_RE.match(line)
        if m:
            name = m[1]
            body = line[m.end():].strip()
            col = m.end() + 1
        else:
            body = line.strip()
            name = ""
        if body.startswith("relation"):
            if name:
                raise StructureError("a relation line takes no name", lineno, 1)
            if not st.items or not isinstance(st.items[-1][1], FinDeVries):
                raise StructureError("relation must follow an algebra definition", lineno, col)
            prev_name, A = st.items[-1]
            rest = body[len("relation"):].strip()
            try:
                if rest == "le":
                    rel = FinDeVries.order(A.n)
                elif rest.startswith("le minus"):
                    drop = set(_pairs(rest[len("le minus"):], A.n))
                    le = [(a, b) for a in range(A.size) for b in range(A.size) if a & ~b == 0]
                    rel = FinDeVries.from_pairs(A.n, [p for p in le if p not in drop])
                elif rest.startswith("pairs"):
                    rel = FinDeVries.from_pairs(A.n, _pairs(rest[len("pairs"):], A.n))
                else:
                    raise ValueError("expected 'le', 'le minus ...' or 'pairs ...'")
            except ValueError as exc:
                raise StructureError(str(exc), lineno, col) from None
            st.items[-1] = (prev_name, rel)
            continue
        try:
            value = _parse_value(body, st)
        except ValueError as exc:
            raise StructureError(str(exc), lineno, col) from None
        if not name:
            auto += 1
            name = f"_{auto}"
        if any(k == name for k, _ in st.items):
            raise StructureError(f"name {name} defined twice", lineno, 1)
        st.items.append((name, value))
    if not st.items:
        raise StructureError("no structure")
    return st


def format_value(value: Any) -> list[str]:
    if isinstance(value, ArithCompactification):
        return [format_compactification(value)]
    if isinstance(value, PiecewiseArithMap):
        return [format_map(value)]
    if isinstance(value, ArithSet):
        return [format_arith(value)]
    if isinstance(value, FinDiscrete):
        return [f"discrete {value.size}"]
    if isinstance(value, FiniteMap):
        return ["map [" + ",".join(map(str, value.values)) + "]"]
    if isinstance(value, MapExtension):
        g = value.ymap
        pairs = ", ".join(f"{g.source.labels[i]} -> {g.target.labels[p[1]]}"
                          for i, p in enumerate(g.at_infinity))
        return [f"extend {value.f_name} from {value.source_name} to {value.target_name} with {pairs}"]
    if isinstance(value, FinDeVries):
        head = f"algebra atoms {value.n}"
        rel, le = value.relation_table(), value.order_relation()
        if (rel == le).all():
            return [head, "relation le"]
        fmt = lambda ps: ", ".join(f"({fmt_mask(a)},{fmt_mask(b)})" for a, b in ps)  # noqa: E731
        if not (rel & ~le).any():
            dropped = [(int(a), int(b)) for a, b in zip(*(le & ~rel).nonzero())]
            return [head, f"relation le minus {fmt(dropped)}"]
        pairs = [(int(a), int(b)) for a, b in zip(*rel.nonzero())]
        return [head, f"relation pairs {fmt(pairs)}"]
    raise TypeError(f"cannot print {type(value).__name__}")


def format_structure(st: Structure) -> str:
    out = []
    for name, value in st.items:
        lines = format_value(value)
        prefix = "" if name.startswith("_") else f"{name} = "
        out.append(prefix + lines[0])
        out.extend(lines[1:])
    return "\n".join(out) + "\n"
