"""Command-line front end.

    manyalign count --steps "{(1,1),(1,2),(2,1)}" --lengths 4,5
    manyalign table5 --max 20 --json

Exit codes: 0 success, 1 a ``verify`` mismatch, 2 usage error,
3 enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import dataclass, field

from . import engine, formulas, genfunc
from .core import AlignmentError, DSLError, StepSet, box, format_step_set, parse_step_set, unit_cube

__all__ = ["UsageError", "Command", "Report", "parse", "run", "main", "VERBS"]

VERBS = ("count", "parts", "enumerate", "sample", "diagonal", "formula",
         "approx", "verify", "table4", "table5", "gf")


# ``approx`` also reports the exact count when its DP table stays this small
EXACT_CELL_LIMIT = 2_000_000


class UsageError(AlignmentError):
    exit_code = 2


@dataclass
class Command:
    verb: str
    steps: StepSet | None = None
    lengths: tuple | None = None
    k: int | None = None
    max: int | None = None
    seed: int = 0
    count: int = 1
    formula: list | None = None
    param: int | None = None
    cap: int = engine.DEFAULT_CAP
    json: bool = False


@dataclass
class Report:
    """Result rows plus enough metadata to render them as text or JSON.

    ``columns`` maps each row key to a text format: ``"int"`` for exact
    counts (always printed and serialized as decimal strings), a format
    spec such as ``".2f"`` for floats, or ``"str"``.
    """
    command: str
    inputs: dict
    columns: dict
    rows: list = field(default_factory=list)
    header: bool = False

    def to_json(self) -> str:
        def enc(v):
            if isinstance(v, bool) or v is None:
                return v
            if isinstance(v, int):
                return str(v)
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            return v
        rows = [{k: enc(r[k]) for k in self.columns} for r in self.rows]
        return json.dumps({"command": self.command, "inputs": self.inputs, "rows": rows})

    def to_text(self) -> str:
        lines = []
        if self.header:
            lines.append("# " + "  ".join(self.columns))
        for r in self.rows:
            lines.append("  ".join(_fmt(r[k], f) for k, f in self.columns.items()))
        return "\n".join(lines)


def _fmt(value, fmt) -> str:
    if value is None:
        return "-"
    if fmt == "int":
        return str(value)
    if fmt == "matrix":
        return "[" + ",".join("[" + ",".join(map(str, row)) + "]" for row in value) + "]"
    if fmt == "str":
        return str(value)
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return format(value, fmt)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _lengths(text: str) -> tuple:
    try:
        values = tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --lengths {text!r}") from None
    if any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"negative entry in --lengths {text!r}")
    return values


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return v


def _build_parser() -> _Parser:
    p = _Parser(prog="manyalign", description="Count, enumerate and approximate S-alignments.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, help_, steps=False, lengths=False):
        sp = sub.add_parser(name, help=help_)
        if steps:
            sp.add_argument("--steps", required=steps == "required", help="step-set expression")
        if lengths:
            sp.add_argument("--lengths", type=_lengths, required=lengths == "required",
                            help="comma-separated sequence lengths")
        sp.add_argument("--json", action="store_true", help="emit one JSON object")
        return sp

    verb("count", "number of alignments", "required", "required")
    sp = verb("parts", "number of alignments by column count", "required", "required")
    sp.add_argument("--k", type=_nonneg)
    sp = verb("enumerate", "list all alignments", "required", "required")
    sp.add_argument("--cap", type=_nonneg, default=engine.DEFAULT_CAP)
    sp = verb("sample", "uniformly sampled alignments", "required", "required")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=_nonneg, default=1)
    sp = verb("diagonal", "a(l,...,l) for l = 1..max", "required")
    sp.add_argument("--max", type=_nonneg, required=True)
    sp = verb("formula", "evaluate an exact closed form", lengths="required")
    sp.add_argument("--id", required=True)
    sp = verb("approx", "evaluate an asymptotic approximation", lengths=True)
    sp.add_argument("--id", required=True)
    sp.add_argument("--param", type=_nonneg, help="extra parameter (M for comp_boundedM_asym)")
    sp = verb("verify", "cross-check closed forms and generating function against the DP", steps=True)
    sp.add_argument("--max", type=_nonneg, default=8)
    sp.add_argument("--id", action="append", help="restrict to these formula ids (repeatable)")
    sp = verb("table4", "diagonal counts for {1,2}^3 and {0,1}^3 - 0")
    sp.add_argument("--max", type=_nonneg, default=10)
    sp = verb("table5", "exact vs asymptotic diagonal of {1,2}^3")
    sp.add_argument("--max", type=_nonneg, default=20)
    sp = verb("gf", "generating-function coefficient", "required", "required")
    sp.add_argument("--k", type=_nonneg)
    return p


def parse(argv) -> Command:
    """Turn an argument list into a validated Command (or raise UsageError)."""
    ns = _build_parser().parse_args(list(argv))
    cmd = Command(verb=ns.verb, json=ns.json)
    for name in ("lengths", "k", "max", "seed", "count", "param", "cap"):
        if getattr(ns, name, None) is not None:
            setattr(cmd, name, getattr(ns, name))
    if getattr(ns, "steps", None) is not None:
        try:
            cmd.steps = parse_step_set(ns.steps)
        except DSLError as exc:
            raise UsageError(f"--steps: {exc} (token {exc.token!r})") from None
        if cmd.lengths is not None and len(cmd.lengths) != cmd.steps.dim:
            raise UsageError(f"--lengths has {len(cmd.lengths)} entries but the step set has dimension "
                             f"{cmd.steps.dim}")
    ids = getattr(ns, "id", None)
    if ids is not None:
        ids = [ids] if isinstance(ids, str) else ids
        for fid in ids:
            if fid not in formulas.FORMULAS:
                raise UsageError(f"--id: unknown formula {fid!r}")
        cmd.formula = ids
    if cmd.verb == "formula" and not formulas.FORMULAS[cmd.formula[0]].exact:
        raise UsageError(f"--id: {cmd.formula[0]!r} is an approximation; use 'approx'")
    if cmd.verb == "approx":
        info = formulas.FORMULAS[cmd.formula[0]]
        if info.exact:
            raise UsageError(f"--id: {info.id!r} is exact; use 'formula'")
        if info.dims != () and cmd.lengths is None:
            raise UsageError("--lengths is required for this formula")
        if info.param and cmd.param is None:
            raise UsageError(f"--param ({info.param}) is required for {info.id!r}")
    return cmd


def _steps_text(cmd):
    return format_step_set(cmd.steps) if cmd.steps is not None else None


def run(cmd: Command) -> tuple[Report, int]:
    """Execute a command.  Raises EnumerationCapExceeded and AlignmentError
    subclasses; :func:`main` maps those to exit codes."""
    handler = globals()["_run_" + cmd.verb]
    return handler(cmd)


def _inputs(cmd, **extra):
    out = {"steps": _steps_text(cmd)}
    if cmd.lengths is not None:
        out["lengths"] = list(cmd.lengths)
    out.update(extra)
    return {k: v for k, v in out.items() if v is not None}


def _run_count(cmd):
    value = engine.count(cmd.steps, cmd.lengths)
    return Report("count", _inputs(cmd), {"count": "int"}, [{"count": value}]), 0


def _run_parts(cmd):
    if cmd.k is not None:
        rows = [{"k": cmd.k, "count": engine.count_with_parts(cmd.steps, cmd.lengths, cmd.k)}]
        return Report("parts", _inputs(cmd, k=cmd.k), {"count": "int"}, rows), 0
    rows = [{"k": k, "count": c} for k, c in enumerate(engine.count_by_parts(cmd.steps, cmd.lengths)) if c]
    return Report("parts", _inputs(cmd), {"k": "int", "count": "int"}, rows), 0


def _run_enumerate(cmd):
    mats = engine.enumerate_alignments(cmd.steps, cmd.lengths, cap=cmd.cap)
    return Report("enumerate", _inputs(cmd), {"matrix": "matrix"}, [{"matrix": m} for m in mats]), 0


def _run_sample(cmd):
    import random
    rng = random.Random(cmd.seed)
    rows = [{"matrix": engine.sample_uniform(cmd.steps, cmd.lengths, rng)} for _ in range(cmd.count)]
    return Report("sample", _inputs(cmd, seed=cmd.seed, count=cmd.count), {"matrix": "matrix"}, rows), 0


def _run_diagonal(cmd):
    n = cmd.steps.dim
    rows = [{"l": l, "count": engine.count(cmd.steps, (l,) * n)} for l in range(1, cmd.max + 1)]
    return Report("diagonal", _inputs(cmd, max=cmd.max), {"l": "int", "count": "int"}, rows), 0


def _run_formula(cmd):
    info = formulas.FORMULAS[cmd.formula[0]]
    _check_dims(info, cmd.lengths)
    value = info.evaluate(cmd.lengths)
    return Report("formula", _inputs(cmd, id=info.id), {"value": "int"}, [{"value": value}]), 0


def _check_dims(info, lengths):
    if info.dims == ():
        if lengths:
            raise UsageError(f"{info.id!r} takes no lengths")
        return
    if info.dims is not None and len(lengths) not in info.dims:
        raise UsageError(f"{info.id!r} takes {' or '.join(map(str, info.dims))} lengths, got {len(lengths)}")


def _run_approx(cmd):
    info = formulas.FORMULAS[cmd.formula[0]]
    lengths = cmd.lengths or ()
    _check_dims(info, lengths)
    av = info.evaluate(lengths, cmd.param)
    row = {"approx": av.value, "scientific": f"{av.mantissa10:.9f}e{av.exponent10}",
           "log10": av.log_value / math.log(10), "exact": None, "rel_error": None}
    if info.step_set is not None and lengths and math.prod(l + 1 for l in lengths) <= EXACT_CELL_LIMIT:
        exact = engine.count(info.step_set(len(lengths), cmd.param), lengths)
        row["exact"] = exact
        if exact and math.isfinite(av.value):
            row["rel_error"] = av.relative_error(exact)
    cols = {"approx": ".12g", "scientific": "str", "log10": ".6f", "exact": "int", "rel_error": ".6f"}
    return Report("approx", _inputs(cmd, id=info.id, param=cmd.param), cols, [row]), 0


def _cases(info, n, top):
    if info.diagonal:
        return [(l,) * n for l in range(1, top + 1)]
    return list(itertools.product(range(top + 1), repeat=n))


def verify_rows(ids=None, top=8, steps=None):
    """Cross-check rows; each has ``ok`` set to whether all values agreed."""
    rows = []
    if steps is not None:
        n = steps.dim
        corner = (top,) * n
        table = engine.count_table(steps, corner)
        gf = genfunc.series_coefficients(steps, corner)
        cases = list(itertools.product(range(top + 1), repeat=n))
        bad = [c for c in cases if gf[c] != table[c] or engine.count_multinomial(steps, c) != table[c]]
        rows.append({"check": "gf=multinomial=dp", "id": format_step_set(steps), "N": n,
                     "cases": len(cases), "mismatches": len(bad), "ok": not bad})
        return rows
    seen = set()
    for info in formulas.FORMULAS.values():
        if not info.exact or (ids and info.id not in ids):
            continue
        for n in info.dims:
            s = info.step_set(n)
            cases = _cases(info, n, top)
            table = engine.count_table(s, (top,) * n)
            bad = [c for c in cases if info.evaluate(c) != table[c]]
            rows.append({"check": "formula=dp", "id": info.id, "N": n, "cases": len(cases),
                         "mismatches": len(bad), "ok": not bad})
            key = (s, n)
            if key in seen:
                continue
            seen.add(key)
            gf = genfunc.series_coefficients(s, (top,) * n)
            bad = [c for c in cases if gf[c] != table[c]]
            rows.append({"check": "gf=dp", "id": info.id, "N": n, "cases": len(cases),
                         "mismatches": len(bad), "ok": not bad})
    return rows


def _run_verify(cmd):
    rows = verify_rows(cmd.formula, cmd.max, cmd.steps)
    for r in rows:
        r["status"] = "PASS" if r["ok"] else "FAIL"
    cols = {"status": "str", "check": "str", "id": "str", "N": "int", "cases": "int", "mismatches": "int"}
    return Report("verify", _inputs(cmd, max=cmd.max), cols, rows), 0 if all(r["ok"] for r in rows) else 1


def table4_rows(top=10):
    s0, s1 = box(1, 2, 3), unit_cube(3)
    return [{"l": l, "box12": engine.count(s0, (l,) * 3), "unit": engine.count(s1, (l,) * 3)}
            for l in range(1, top + 1)]


def table5_rows(top=20):
    """Exact and asymptotic a(l,l,l) for S = {1,2}^3.

    The error column is |exact - approx| / approx, the convention that
    reproduces the reference error figures.
    """
    s0 = box(1, 2, 3)
    rows = []
    for l in range(1, top + 1):
        exact = engine.count(s0, (l,) * 3)
        approx = formulas.box12_asym(l, 3).value
        rows.append({"l": l, "exact": exact, "approx": approx, "error": abs(exact - approx) / approx})
    return rows


def _run_table4(cmd):
    cols = {"l": "int", "box12": "int", "unit": "int"}
    inputs = {"max": cmd.max, "steps": ["box(1..2,3)", "unit(3)"], "source": "dp"}
    return Report("table4", inputs, cols, table4_rows(cmd.max), header=True), 0


def _run_table5(cmd):
    cols = {"l": "int", "exact": "int", "approx": ".2f", "error": ".3f"}
    inputs = {"max": cmd.max, "steps": "box(1..2,3)", "exact_source": "dp", "approx_source": "box12_asym"}
    return Report("table5", inputs, cols, table5_rows(cmd.max), header=True), 0


def _run_gf(cmd):
    corner = cmd.lengths
    if cmd.k is None:
        value = genfunc.series_coefficients(cmd.steps, corner)[corner]
    else:
        value = genfunc.fixed_k_coefficients(cmd.steps, corner, cmd.k)[corner]
    return Report("gf", _inputs(cmd, k=cmd.k), {"coefficient": "int"}, [{"coefficient": value}]), 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse(argv)
        report, code = run(cmd)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except engine.EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except AlignmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(report.to_json() if cmd.json else report.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
