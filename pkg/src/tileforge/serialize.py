"""Versioned JSON schemas for every pipeline stage.

Each document carries a ``schema`` field; loaders reject unknown fields and
wrong versions outright, and writers emit all collections in sorted order
so that reruns are byte-identical.
"""

from __future__ import annotations

import json
from typing import Any

from .domino import DominoFunction, DominoSet, Rect, WangTileSet
from .feq import (
    ComplementSet,
    ExplicitSet,
    FullSet,
    FunctionalEquation,
    GroupSpec,
    KernelSet,
    Property,
    SetExpr,
)
from .padic_sudoku import PAdicSolutionSpec
from .sudoku import SolutionWindow
from .tiling import PeriodicSet, TilingEquation, TilingSystem


class SchemaError(ValueError):
    """Malformed input: wrong schema tag, missing or unknown fields."""


def _expect(doc: dict, schema: str, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(doc, dict):
        raise SchemaError("document is not an object")
    if doc.get("schema") != schema:
        raise SchemaError(f"expected schema {schema!r}, got {doc.get('schema')!r}")
    keys = set(doc) - {"schema"}
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise SchemaError(f"{schema}: missing fields {sorted(missing)}")
    if unknown:
        raise SchemaError(f"{schema}: unknown fields {sorted(unknown)}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write(path, doc: dict) -> None:
    with open(path, "w") as f:
        f.write(dumps(doc))


def read(path) -> dict:
    with open(path) as f:
        return json.load(f)


# ---------------------------------------------------------------------------
# domino / wang


def domino_set_to_json(d: DominoSet) -> dict:
    return {
        "schema": "domino-set.v1",
        "pips": sorted(d.pips),
        "horiz": sorted([a, b] for a, b in d.horiz),
        "vert": sorted([a, b] for a, b in d.vert),
    }


def domino_set_from_json(doc: dict) -> DominoSet:
    _expect(doc, "domino-set.v1", {"pips", "horiz", "vert"})
    return DominoSet.of(doc["pips"],
                        {tuple(p) for p in doc["horiz"]},
                        {tuple(p) for p in doc["vert"]})


def wang_set_to_json(w: WangTileSet) -> dict:
    return {
        "schema": "wang-set.v1",
        "hColors": sorted(w.h_colors),
        "vColors": sorted(w.v_colors),
        "tiles": sorted(list(t) for t in w.tiles),
    }


def wang_set_from_json(doc: dict) -> WangTileSet:
    _expect(doc, "wang-set.v1", {"hColors", "vColors", "tiles"})
    return WangTileSet.of(doc["hColors"], doc["vColors"],
                          [tuple(t) for t in doc["tiles"]])


def domino_function_to_json(t: DominoFunction) -> dict:
    return {
        "schema": "domino-function.v1",
        "lo": list(t.rect.lo),
        "hi": list(t.rect.hi),
        "values": [[s1, s2, t.values[(s1, s2)]]
                   for (s1, s2) in sorted(t.values)],
    }


def domino_function_from_json(doc: dict) -> DominoFunction:
    _expect(doc, "domino-function.v1", {"lo", "hi", "values"})
    rect = Rect(tuple(doc["lo"]), tuple(doc["hi"]))
    values = {(s1, s2): pip for s1, s2, pip in doc["values"]}
    return DominoFunction(rect, values)


# ---------------------------------------------------------------------------
# sudoku windows and closed forms


def window_to_json(w: SolutionWindow, encoding: dict) -> dict:
    digits = []
    for m in range(w.m_lo, w.m_hi + 1):
        for n in range(w.width):
            v = w.values[(n, m)]
            digits.append(list(v) if isinstance(v, tuple) else v)
    return {
        "schema": "sudoku-window.v1",
        "width": w.width,
        "mLo": w.m_lo,
        "mHi": w.m_hi,
        "encoding": encoding,
        "digits": digits,
    }


def window_from_json(doc: dict) -> tuple[SolutionWindow, dict]:
    _expect(doc, "sudoku-window.v1", {"width", "mLo", "mHi", "digits", "encoding"})
    width, m_lo, m_hi = doc["width"], doc["mLo"], doc["mHi"]
    digits = doc["digits"]
    if len(digits) != width * (m_hi - m_lo + 1):
        raise SchemaError("digit array has wrong length")
    values = {}
    k = 0
    for m in range(m_lo, m_hi + 1):
        for n in range(width):
            v = digits[k]
            values[(n, m)] = tuple(v) if isinstance(v, list) else v
            k += 1
    return SolutionWindow(width, m_lo, m_hi, values), doc["encoding"]


def padic_solution_to_json(spec: PAdicSolutionSpec) -> dict:
    return {
        "schema": "padic-solution.v1",
        "p": spec.p,
        "precision": spec.precision,
        "A": spec.A,
        "B": spec.B,
        "C": spec.C,
    }


def padic_solution_from_json(doc: dict) -> PAdicSolutionSpec:
    _expect(doc, "padic-solution.v1", {"p", "precision", "A", "B", "C"})
    return PAdicSolutionSpec(doc["p"], doc["precision"], doc["A"], doc["B"], doc["C"])


def decorated_instance_to_json(p1, p2, domino_set, domino_fn, infinity_pip,
                               c, D, E) -> dict:
    return {
        "schema": "decorated-instance.v1",
        "p1": p1,
        "p2": p2,
        "dominoSet": domino_set_to_json(domino_set),
        "dominoFn": domino_function_to_json(domino_fn),
        "infinityPip": infinity_pip,
        "c": c,
        "D": D,
        "E": E,
    }


def decorated_instance_from_json(doc: dict) -> dict:
    _expect(doc, "decorated-instance.v1",
            {"p1", "p2", "dominoSet", "dominoFn", "infinityPip", "c", "D", "E"})
    return {
        "p1": doc["p1"],
        "p2": doc["p2"],
        "domino_set": domino_set_from_json(doc["dominoSet"]),
        "domino_fn": domino_function_from_json(doc["dominoFn"]),
        "infinity_pip": doc["infinityPip"],
        "c": doc["c"],
        "D": doc["D"],
        "E": doc["E"],
    }


# ---------------------------------------------------------------------------
# sudoku rules (pipeline stage payload)


def rule_to_json(kind: str, **kw) -> dict:
    doc = {"schema": "sudoku-rule.v1", "kind": kind}
    doc.update(kw)
    return doc


def rule_from_json(doc: dict) -> dict:
    _expect(doc, "sudoku-rule.v1", {"kind"},
            {"p", "p1", "p2", "dominoSet", "q", "width", "pips", "relation"})
    return doc


# ---------------------------------------------------------------------------
# set expressions and functional-equation systems


def set_to_json(e: SetExpr) -> dict:
    if isinstance(e, ExplicitSet):
        return {"kind": "explicit", "support": list(e.support),
                "sizes": list(e.sizes),
                "elements": sorted(list(x) for x in e.elements)}
    if isinstance(e, FullSet):
        return {"kind": "full", "support": list(e.support), "sizes": list(e.sizes)}
    if isinstance(e, ComplementSet):
        return {"kind": "complement", "support": list(e.support),
                "sizes": list(e.sizes),
                "excluded": sorted(list(x) for x in e.excluded)}
    if isinstance(e, KernelSet):
        return {"kind": "kernel", "support": list(e.support),
                "modulus": e.modulus, "coeffs": list(e.coeffs)}
    raise SchemaError(f"set expression {type(e).__name__} is not serializable")


def set_from_json(doc: dict) -> SetExpr:
    kind = doc.get("kind")
    support = tuple(doc["support"])
    if kind == "explicit":
        return ExplicitSet(support, tuple(doc["sizes"]),
                           frozenset(tuple(x) for x in doc["elements"]))
    if kind == "full":
        return FullSet(support, tuple(doc["sizes"]))
    if kind == "complement":
        return ComplementSet(support, tuple(doc["sizes"]),
                             frozenset(tuple(x) for x in doc["excluded"]))
    if kind == "kernel":
        return KernelSet(support, doc["modulus"], tuple(doc["coeffs"]))
    raise SchemaError(f"unknown set kind {kind!r}")


def _group_to_json(g: GroupSpec) -> dict:
    return {"freeRank": g.free_rank, "torsion": list(g.torsion)}


def _group_from_json(doc: dict) -> GroupSpec:
    return GroupSpec(doc["freeRank"], tuple(doc["torsion"]))


def feq_system_to_json(P: Property) -> dict:
    return {
        "schema": "feq-system.v1",
        "group": _group_to_json(P.group),
        "components": [{"name": u, "torsion": list(g.torsion)}
                       for u, g in P.components.items()],
        "equations": [
            {"terms": [{"shift": list(s), "set": set_to_json(e)}
                       for s, e in eq.terms],
             "target": set_to_json(eq.target)}
            for eq in P.equations],
        "existential": sorted(P.existential),
    }


def feq_system_from_json(doc: dict) -> Property:
    _expect(doc, "feq-system.v1", {"group", "components", "equations", "existential"})
    group = _group_from_json(doc["group"])
    comps = {c["name"]: GroupSpec(0, tuple(c["torsion"])) for c in doc["components"]}
    eqs = []
    for e in doc["equations"]:
        terms = tuple((tuple(t["shift"]), set_from_json(t["set"])) for t in e["terms"])
        eqs.append(FunctionalEquation(terms=terms, target=set_from_json(e["target"])))
    return Property(group, comps, eqs, frozenset(doc["existential"]))


# ---------------------------------------------------------------------------
# tiling systems and periodic sets


def tiling_system_to_json(sys: TilingSystem) -> dict:
    equations = []
    for eq in sys.equations:
        entry: dict[str, Any] = {
            "terms": [{"shift": list(s), "set": set_to_json(e)}
                      for s, e in eq.terms],
            "target": set_to_json(eq.target),
        }
        try:
            entry["tile"] = [[list(s), list(h)] for s, h in sys.tile_points(eq)]
        except Exception:
            pass  # beyond the cap: the structured terms stand alone
        equations.append(entry)
    return {
        "schema": "tiling-system.v1",
        "base": _group_to_json(sys.base),
        "fiberComponents": [{"name": u, "torsion": list(g.torsion)}
                            for u, g in sys.fiber_components.items()],
        "equations": equations,
    }


def tiling_system_from_json(doc: dict) -> TilingSystem:
    _expect(doc, "tiling-system.v1", {"base", "fiberComponents", "equations"})
    base = _group_from_json(doc["base"])
    comps = {c["name"]: GroupSpec(0, tuple(c["torsion"]))
             for c in doc["fiberComponents"]}
    eqs = []
    for e in doc["equations"]:
        if set(e) - {"terms", "target", "tile"}:
            raise SchemaError("unknown fields in tiling equation")
        terms = tuple((tuple(t["shift"]), set_from_json(t["set"])) for t in e["terms"])
        eqs.append(TilingEquation(terms=terms, target=set_from_json(e["target"])))
    return TilingSystem(base, comps, eqs)


def periodic_set_to_json(A: PeriodicSet) -> dict:
    return {
        "schema": "periodic-set.v1",
        "periods": list(A.periods),
        "cells": [[list(x), list(h)] for x, h in A.sorted_cells()],
    }


def periodic_set_from_json(doc: dict) -> PeriodicSet:
    _expect(doc, "periodic-set.v1", {"periods", "cells"})
    cells = frozenset((tuple(x), tuple(h)) for x, h in doc["cells"])
    return PeriodicSet(tuple(doc["periods"]), cells)
