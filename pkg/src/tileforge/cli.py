"""The ``tileforge`` pipeline driver.

Stages compile an input file into an output file deterministically; exit
codes distinguish success (0), malformed input (1), a proved negative at
the requested scale (2), and an exhausted search budget (3).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional

from . import decorated, domino, feq, render, serialize, tiling
from .padic_sudoku import PAdicRule
from .sudoku import InitialCondition, SolutionWindow, SudokuRuleOracle, verify_window

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_NEGATIVE = 2
EXIT_BUDGET = 3


@dataclass
class PipelineConfig:
    p1: int = 3
    p2: int = 5
    s0: int = 2
    L: int = 21
    periods: tuple[int, ...] = (2, 2)
    budget: int = 10 ** 7
    seed: int = 0
    toy: bool = False
    levels: tuple[int, int] = (1, 1)
    m_lo: Optional[int] = None
    m_hi: Optional[int] = None
    rule_path: Optional[str] = None

    def validate(self):
        from .padic import require_prime
        require_prime(self.p1)
        require_prime(self.p2)
        if self.p1 == self.p2:
            raise ValueError("p1 and p2 must be distinct")
        if self.budget <= 0:
            raise ValueError("budget must be positive")


def _stage_wang2domino(cfg: PipelineConfig, doc: dict):
    wset = serialize.wang_set_from_json(doc)
    return serialize.domino_set_to_json(domino.wang_to_domino(wset)), EXIT_OK


def _stage_domino_solve(cfg: PipelineConfig, doc: dict):
    d = serialize.domino_set_from_json(doc)
    n1, n2 = cfg.periods[0], cfg.periods[1] if len(cfg.periods) > 1 else cfg.periods[0]
    rect = domino.Rect((0, 0), (n1 - 1, n2 - 1))
    got = domino.solve_rectangle(d, rect, cfg.budget)
    if isinstance(got, domino.Solution):
        return serialize.domino_function_to_json(got.function), EXIT_OK
    if isinstance(got, domino.Unsolvable):
        return {"schema": "report.v1", "result": "unsolvable",
                "rect": [[0, 0], [n1 - 1, n2 - 1]]}, EXIT_NEGATIVE
    return {"schema": "report.v1", "result": "budget-exhausted",
            "nodes": got.nodes}, EXIT_BUDGET


def _stage_domino2sudoku(cfg: PipelineConfig, doc: dict):
    d = serialize.domino_set_from_json(doc)
    if cfg.toy:
        # width-2 stand-in: a line reading is permitted exactly when its two
        # pips form an allowed horizontal pair; keeps every later stage at
        # solver-friendly sizes
        out = serialize.rule_to_json(
            "toy-domino-row",
            width=2,
            pips=sorted(d.pips),
            relation=sorted([a, b] for a, b in d.horiz),
            q=1,
        )
        return out, EXIT_OK
    out = serialize.rule_to_json(
        "decorated",
        p1=cfg.p1,
        p2=cfg.p2,
        dominoSet=serialize.domino_set_to_json(d),
        q=cfg.p1 * cfg.p2,
        width=cfg.p1 ** 2 * cfg.p2 ** 2,
    )
    return out, EXIT_OK


def load_rule(doc: dict) -> tuple[SudokuRuleOracle, InitialCondition]:
    """Build the rule oracle and initial condition a stage payload describes."""
    doc = serialize.rule_from_json(doc)
    kind = doc["kind"]
    if kind == "decorated":
        d = serialize.domino_set_from_json(doc["dominoSet"])
        rule = decorated.build_rule(doc["p1"], doc["p2"], d)
        ic = decorated.build_initial_condition(doc["p1"], doc["p2"], d.pips)
        return rule.oracle(), ic.as_initial_condition()
    if kind == "toy-domino-row":
        pairs = {tuple(p) for p in doc["relation"]}
        oracle = SudokuRuleOracle(
            width=doc["width"],
            digits=frozenset(doc["pips"]),
            member=lambda g: all((g[i], g[i + 1]) in pairs
                                 for i in range(len(g) - 1)))
        ic = InitialCondition(doc.get("q", 1), lambda r, dgt: True)
        return oracle, ic
    if kind == "padic":
        rule = PAdicRule(doc["p"], doc["width"])
        ic = InitialCondition(1, lambda r, dgt: True)
        return rule.oracle(), ic
    raise serialize.SchemaError(f"unknown rule kind {kind!r}")


def _stage_sudoku_verify(cfg: PipelineConfig, doc: dict):
    if not cfg.rule_path:
        raise serialize.SchemaError("sudoku-verify needs --rule FILE")
    rule_doc = serialize.read(cfg.rule_path)
    oracle, _ = load_rule(rule_doc)
    window, _ = serialize.window_from_json(doc)
    report = verify_window(oracle, window)
    out = {
        "schema": "report.v1",
        "result": "ok" if report.ok else "failures",
        "checkedLines": report.checked_lines,
        "failures": sorted([f.slope, f.intercept] for f in report.failures),
    }
    return out, EXIT_OK if report.ok else EXIT_NEGATIVE


def _stage_sudoku2feq(cfg: PipelineConfig, doc: dict):
    oracle, ic = load_rule(doc)
    program = feq.program_sudoku(oracle, ic, cfg.s0, cfg.L)
    return serialize.feq_system_to_json(program.property), EXIT_OK


def _stage_feq2tiling(cfg: PipelineConfig, doc: dict):
    P = serialize.feq_system_from_json(doc)
    sys_ = tiling.feq_to_tiling(P)
    return serialize.tiling_system_to_json(sys_), EXIT_OK


def _stage_tile_solve(cfg: PipelineConfig, doc: dict):
    sys_ = serialize.tiling_system_from_json(doc)
    got = tiling.solve_tiling_periodic(sys_, cfg.periods, cfg.budget)
    if isinstance(got, tiling.TileWitness):
        return serialize.periodic_set_to_json(got.periodic_set), EXIT_OK
    if isinstance(got, tiling.NoPeriodicTiling):
        return {"schema": "report.v1", "result": "no-periodic-witness",
                "periods": list(cfg.periods), "nodes": got.nodes}, EXIT_NEGATIVE
    return {"schema": "report.v1", "result": "budget-exhausted",
            "nodes": got.nodes}, EXIT_BUDGET


def _stage_roundtrip(cfg: PipelineConfig, doc: dict):
    inst = serialize.decorated_instance_from_json(doc)
    rule = decorated.build_rule(inst["p1"], inst["p2"], inst["domino_set"])
    spec = decorated.DecoratedSolutionSpec(
        inst["domino_fn"], inst["infinity_pip"], inst["c"], inst["D"], inst["E"])
    r = cfg.levels
    height = decorated.required_height(rule, r)
    grids = decorated.encode_grids(spec, rule, 0, height - 1)
    got = decorated.extract(grids, rule, r)
    want = {(s1, s2): inst["domino_fn"].values[(s1, s2)]
            for s1 in range(r[0] + 1) for s2 in range(r[1] + 1)}
    equal = got.values == want
    out = {
        "schema": "report.v1",
        "result": "equal" if equal else "mismatch",
        "levels": list(r),
        "extracted": serialize.domino_function_to_json(got),
    }
    return out, EXIT_OK if equal else EXIT_NEGATIVE


def _stage_render(cfg: PipelineConfig, doc: dict, out_path: str):
    schema = doc.get("schema")
    if schema == "padic-solution.v1":
        spec = serialize.padic_solution_from_json(doc)
        N = spec.p ** 2
        m_lo = cfg.m_lo if cfg.m_lo is not None else 0
        m_hi = cfg.m_hi if cfg.m_hi is not None else 3 * N - 1
        render.render_padic(spec, N, m_lo, m_hi, out_path)
        return None, EXIT_OK
    if schema == "decorated-instance.v1":
        inst = serialize.decorated_instance_from_json(doc)
        rule = decorated.build_rule(inst["p1"], inst["p2"], inst["domino_set"])
        spec = decorated.DecoratedSolutionSpec(
            inst["domino_fn"], inst["infinity_pip"], inst["c"], inst["D"], inst["E"])
        m_lo = cfg.m_lo if cfg.m_lo is not None else 0
        m_hi = cfg.m_hi if cfg.m_hi is not None else inst["p1"] ** 2 * inst["p2"] ** 2 - 1
        render.render_decorated(spec, rule, m_lo, m_hi, out_path,
                                n_hi=min(rule.N, 60))
        return None, EXIT_OK
    if schema == "sudoku-window.v1":
        window, _ = serialize.window_from_json(doc)
        rows = [[window.values[(n, m)] for n in range(window.width)]
                for m in range(window.m_hi, window.m_lo - 1, -1)]
        render.render_window_values(rows, out_path)
        return None, EXIT_OK
    raise serialize.SchemaError(f"render cannot consume schema {schema!r}")


STAGES = {
    "wang2domino": _stage_wang2domino,
    "domino-solve": _stage_domino_solve,
    "domino2sudoku": _stage_domino2sudoku,
    "sudoku-verify": _stage_sudoku_verify,
    "sudoku2feq": _stage_sudoku2feq,
    "feq2tiling": _stage_feq2tiling,
    "tile-solve": _stage_tile_solve,
    "roundtrip": _stage_roundtrip,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tileforge",
        description="compiler pipeline from Wang/domino problems through "
                    "digit puzzles to tiling-equation systems")
    parser.add_argument("stage", choices=sorted(list(STAGES) + ["render"]))
    parser.add_argument("--in", dest="infile", required=True)
    parser.add_argument("--out", dest="outfile", required=True)
    parser.add_argument("--p1", type=int, default=3)
    parser.add_argument("--p2", type=int, default=5)
    parser.add_argument("--s0", type=int, default=2)
    parser.add_argument("--L", type=int, default=21)
    parser.add_argument("--periods", default="2,2",
                        help="quotient periods n1,n2 (also the rectangle "
                             "dimensions for domino-solve)")
    parser.add_argument("--budget", type=int, default=10 ** 7)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--toy", action="store_true",
                        help="domino2sudoku: emit the width-2 toy rule")
    parser.add_argument("--levels", default="1,1",
                        help="roundtrip: extraction levels r1,r2")
    parser.add_argument("--mlo", type=int, default=None)
    parser.add_argument("--mhi", type=int, default=None)
    parser.add_argument("--rule", dest="rule_path", default=None,
                        help="sudoku-verify: rule description file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        periods = tuple(int(x) for x in args.periods.split(","))
        levels = tuple(int(x) for x in args.levels.split(","))
        cfg = PipelineConfig(
            p1=args.p1, p2=args.p2, s0=args.s0, L=args.L,
            periods=periods, budget=args.budget, seed=args.seed,
            toy=args.toy, levels=(levels[0], levels[1]),
            m_lo=args.mlo, m_hi=args.mhi, rule_path=args.rule_path)
        cfg.validate()
        doc = serialize.read(args.infile)
        if args.stage == "render":
            _, code = _stage_render(cfg, doc, args.outfile)
            return code
        out, code = STAGES[args.stage](cfg, doc)
        if out is not None:
            serialize.write(args.outfile, out)
        return code
    except (serialize.SchemaError, ValueError, KeyError, OSError) as e:
        print(f"tileforge: {e}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
