"""Command-line front end.

Exit codes: 0 when every check passes, 1 when some check fails (the report
carries witnesses), 2 for input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Any, Callable

from .compactcat import (check_cmorphism, example33, is_equivalent, is_maximal_relative,
                         leq_classical, partition_family)
from .devries import (DVMorphism, FinDeVries, ROFragment, check_morphism, check_proximity,
                      plain_compose, preimage_morphism, star_compose)
from .duality import (Compactification, check_extension, ends_of, functor_C_obj, functor_E_mor,
                      functor_E_obj, is_round_filter, lemma53_audit, roundtrip_audit)
from .report import SCHEMA_VERSION, Check, Report, dumps
from .setalg import compose, fmt_mask
from .syntax import FiniteMap, MapExtension, Structure, StructureError, parse_structure
from .topology import ArithCompactification, FinDiscrete, YMap, format_compactification

DEFAULT_BOUNDS = (6, 4, 12)


class InputError(ValueError):
    pass


def parse_bounds(text: str) -> tuple[int, int, int]:
    try:
        T, P, Tp = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"--bounds expects T,P,Tprime, got {text!r}") from None
    if T < 0 or P < 1 or Tp < 1:
        raise InputError("bounds must be positive")
    if Tp < T + P:
        raise InputError(f"witness bound {Tp} must be at least T+P = {T + P}")
    return T, P, Tp


def _compactifications(st: Structure) -> list[tuple[str, Compactification]]:
    out = []
    for name, v in st.of_type(ArithCompactification, FinDiscrete):
        if isinstance(v, FinDiscrete):
            out.append((name, Compactification.finite(v.size, name)))
        else:
            out.append((name, Compactification.arithmetic(v, name)))
    if not out:
        raise InputError("no compactification or discrete space in the input")
    return out


def _require_period(Y: ArithCompactification, P: int) -> None:
    if P % Y.period:
        raise InputError(f"fragment period {P} is not a multiple of the period {Y.period} of Y")


def _arith_bounds(e: Compactification, bounds: tuple[int, int, int]) -> None:
    if not e.is_finite:
        _require_period(e.Y, bounds[1])


# ---------------------------------------------------------------------------
# verbs


def cmd_check_proximity(st: Structure, bounds: tuple[int, int, int]) -> list[Report]:
    T, P, Tp = bounds
    out = []
    for name, v in st.items:
        if isinstance(v, FinDeVries):
            rep = check_proximity(v)
        elif isinstance(v, ArithCompactification):
            _require_period(v, P)
            rep = check_proximity(ROFragment(v, T, P, Tp))
        else:
            continue
        rep.title = f"{name}: {rep.title}"
        out.append(rep)
    if not out:
        raise InputError("no algebra or compactification in the input")
    return out


def _finite_pair(st: Structure) -> tuple[int, int]:
    spaces = st.of_type(FinDiscrete)
    if len(spaces) < 2:
        raise InputError("a finite map needs two discrete spaces (source, target)")
    return spaces[0][1].size, spaces[1][1].size


def cmd_check_morphism(st: Structure, bounds: tuple[int, int, int]) -> list[Report]:
    T, P, Tp = bounds
    out = []
    for name, v in st.items:
        if isinstance(v, FiniteMap):
            n, n2 = _finite_pair(st)
            if len(v.values) != n or any(not 0 <= x < n2 for x in v.values):
                raise InputError(f"{name} is not a map from {n} points to {n2} points")
            e, e2 = Compactification.finite(n), Compactification.finite(n2)
            rep = check_cmorphism(e, e2, v.values, v.values)
            rho = preimage_morphism(FinDeVries(n2), FinDeVries(n), list(v.values), f"{name}*")
            rep.extend(check_morphism(rho).checks)
        elif isinstance(v, MapExtension):
            g = v.ymap
            _require_period(g.source, P)
            _require_period(g.target, P)
            e, e2 = Compactification.arithmetic(g.source), Compactification.arithmetic(g.target)
            rep = check_cmorphism(e, e2, g.nat, g)
            rho = DVMorphism.from_rule(ROFragment(g.target, T, P, Tp), ROFragment(g.source, T, P, Tp),
                                       g.star, f"{name}*")
            rep.extend(check_morphism(rho).checks)
        else:
            continue
        rep.title = f"{name}: compactification morphism and its dual"
        out.append(rep)
    if not out:
        raise InputError("no map in the input")
    return out


def cmd_check_extension(st: Structure, bounds: tuple[int, int, int]) -> list[Report]:
    out = []
    for name, e in _compactifications(st):
        _arith_bounds(e, bounds)
        rep = check_extension(functor_E_obj(e, *bounds).alpha)
        rep.title = f"{name}: {rep.title}"
        out.append(rep)
    return out


def cmd_compose(st: Structure, bounds: tuple[int, int, int]) -> list[Report]:
    T, P, Tp = bounds
    maps = [(n, v.ymap) for n, v in st.of_type(MapExtension)]
    if not maps:
        raise InputError("compose needs at least one 'extend' map")
    out = []
    for name, g in maps:
        _require_period(g.source, P)
        _require_period(g.target, P)
        e, e2 = Compactification.arithmetic(g.source), Compactification.arithmetic(g.target)
        m = functor_E_mor(e, e2, g.nat, g, T, P, Tp)
        rep = m.check()
        rep.title = f"{name}: E({name}) = ({name}*, f^-1)"
        out.append(rep)
    for (n1, g1), (n2, g2) in zip(maps, maps[1:]):
        if g1.target != g2.source:
            continue
        rep = Report(f"{n2} after {n1}: dual of the composite against the star composite")
        A3, A2, A1 = (ROFragment(Y, T, P, Tp) for Y in (g2.target, g2.source, g1.source))
        r1 = DVMorphism.from_rule(A2, A1, g1.star, f"{n1}*")
        r2 = DVMorphism.from_rule(A3, A2, g2.star, f"{n2}*")
        g21 = YMap(g1.source, g2.target, compose(g2.nat, g1.nat),
                   tuple(g2(p) for p in g1.at_infinity))
        whole = DVMorphism.from_rule(A3, A1, g21.star, f"({n2}.{n1})*")
        star = star_compose(r1, r2)
        plain = plain_compose(r1, r2)
        for label, comp in (("star composite", star), ("plain composite", plain)):
            if comp.masks is None:
                rep.add(Check(f"{label} equals dual of composite", False,
                              ("kept as a membership profile",), comp.mode, comp.bounds))
                continue
            bad = comp.same_as(whole)
            rep.add(Check(f"{label} equals dual of composite", bad is None,
                          () if bad is None else (A3.fmt(bad),), comp.mode, comp.bounds))
        out.append(rep)
    return out


def cmd_ends(st: Structure, bounds: tuple[int, int, int]) -> list[Report]:
    out = []
    for name, v in st.items:
        if isinstance(v, (FinDeVries, FinDiscrete)):
            A = v if isinstance(v, FinDeVries) else FinDeVries(v.size)
            rep = Report(f"{name}: ends of {A.describe()}")
            ends = ends_of(A)
            ok = all(is_round_filter(A, y.members) for y in ends)  # type: ignore[arg-type]
            rep.add(Check("ends are round filters", ok))
            rep.info["ends"] = [fmt_mask(y.generator()) for y in ends]
            rep.info["count"] = len(ends)
        elif isinstance(v, ArithCompactification):
            e = Compactification.arithmetic(v, name)
            _arith_bounds(e, bounds)
            rep = lemma53_audit(functor_E_obj(e, *bounds).alpha)
            rep.title = f"{name}: realized ends of RO({format_compactification(v)})"
        else:
            continue
        out.append(rep)
    if not out:
        raise InputError("no algebra or compactification in the input")
    return out


def cmd_dualize(st: Structure, bounds: tuple[int, int, int]) -> list[Report]:
    out = []
    for name, e in _compactifications(st):
        _arith_bounds(e, bounds)
        C = functor_C_obj(functor_E_obj(e, *bounds))
        rep = C.report if C.report is not None else Report("")
        rep = Report(f"{name}: dual space of E({name})", list(rep.checks), dict(rep.info))
        rep.add(Check("embedding injective", len(set(C.embed)) == len(C.embed) and -1 not in C.embed))
        rep.info["points"] = len(C.ends)
        rep.info["embedding"] = {a: _end_label(C, j) for a, j in zip(C.atoms, C.embed)}
        out.append(rep)
    return out


def _end_label(C: Any, j: int) -> str:
    if j < 0:
        return "unrealized"
    end = C.ends[j]
    if C.Y is not None:
        kind, v = end
        return str(v) if kind == "n" else C.Y.labels[v]
    return "up " + fmt_mask(end.generator())


def cmd_roundtrip(st: Structure, bounds: tuple[int, int, int]) -> list[Report]:
    out = []
    for name, e in _compactifications(st):
        _arith_bounds(e, bounds)
        if e.is_finite:
            n = e.target.size  # type: ignore[union-attr]
            rep = roundtrip_audit(e, e, list(range(n)), *bounds)
        else:
            rep = roundtrip_audit(e, T=bounds[0], P=bounds[1], Tprime=bounds[2])
        rep.title = f"{name}: {rep.title}"
        out.append(rep)
    return out


def cmd_equivalence(st: Structure, bounds: tuple[int, int, int]) -> list[Report]:
    cs = _compactifications(st)
    if len(cs) < 2:
        raise InputError("equivalence needs two compactifications")
    (n1, e1), (n2, e2) = cs[:2]
    rep = Report(f"{n1} versus {n2}")
    eq = is_equivalent(e1, e2)
    rep.add(Check("equivalent", eq.holds))
    rep.info["equivalence"] = eq.witness
    rep.info[f"{n1} <= {n2}"] = leq_classical(e1, e2).holds
    rep.info[f"{n2} <= {n1}"] = leq_classical(e2, e1).holds
    return [rep]


def cmd_maximal(st: Structure, bounds: tuple[int, int, int]) -> list[Report]:
    T, P, Tp = bounds
    out = []
    for name, e in _compactifications(st):
        if e.is_finite:
            alpha = functor_E_obj(e).alpha
            rep = is_maximal_relative(alpha, [("identity", alpha)])
        else:
            _require_period(e.Y, P)
            alpha = functor_E_obj(e, T, P, Tp).alpha
            rep = is_maximal_relative(alpha, partition_family(P, T, P, Tp))
            rep.info["family"] = f"all partition compactifications of period {P}"
        rep.title = f"{name}: {rep.title}"
        out.append(rep)
    return out


def cmd_example33(st: Structure | None, bounds: tuple[int, int, int]) -> list[Report]:
    b = example33()
    rep = Report("golden example bundle", list(b.morphism.checks) + list(b.iso.report.checks))
    rep.info = {k: v for k, v in b.to_dict().items() if k != "checks"}
    return [rep]


VERBS: dict[str, Callable[..., list[Report]]] = {
    "check-proximity": cmd_check_proximity,
    "check-morphism": cmd_check_morphism,
    "check-extension": cmd_check_extension,
    "compose": cmd_compose,
    "ends": cmd_ends,
    "dualize": cmd_dualize,
    "roundtrip": cmd_roundtrip,
    "equivalence": cmd_equivalence,
    "maximal": cmd_maximal,
    "example-3-3": cmd_example33,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dvbench", description="de Vries duality workbench")
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("inputs", nargs="*",
                   help="structure files, or inline definitions separated by ';'")
    p.add_argument("--bounds", default=",".join(map(str, DEFAULT_BOUNDS)),
                   help="fragment T,P and witness bound Tprime (default 6,4,12)")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", help="write the report here instead of stdout")
    return p


def run(argv: list[str]) -> tuple[int, str]:
    """Run one command; returns the exit code and the rendered report."""
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        bounds = parse_bounds(args.bounds)
        if args.verb == "example-3-3":
            st = None
        else:
            if not args.inputs:
                raise InputError(f"{args.verb} needs a structure file")
            text = "\n".join(_read(path) for path in args.inputs)
            st = parse_structure(text)
        reports = VERBS[args.verb](st, bounds)
    except (InputError, StructureError, OSError) as exc:
        return 2, f"dvbench: error: {exc}\n"
    except ValueError as exc:
        return 2, f"dvbench: error: {exc}\n"
    ok = all(r.ok for r in reports)
    if args.format == "json":
        payload = {
            "schema": SCHEMA_VERSION,
            "command": {"verb": args.verb, "inputs": list(args.inputs),
                        "bounds": dict(zip(("T", "P", "Tprime"), bounds))},
            "ok": ok,
            "reports": [r.to_dict() for r in reports],
        }
        body = dumps(payload)
    else:
        head = f"dvbench {args.verb}  bounds T={bounds[0]} P={bounds[1]} Tprime={bounds[2]}"
        took = f"elapsed {time.perf_counter() - start:.2f}s"
        body = "\n".join([head] + [r.text() for r in reports] + [took]) + "\n"
    return (0 if ok else 1), body


def _read(arg: str) -> str:
    """A structure file, or inline structure text with ``;`` between lines."""
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    if not any(ch.isspace() for ch in arg):
        raise InputError(f"no such file: {arg}")
    return arg.replace(";", "\n")


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    code, body = run(args)
    if code == 2:
        sys.stderr.write(body)
        return code
    out = build_parser().parse_args(args).out
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return code


if __name__ == "__main__":
    sys.exit(main())
