"""Command-line front end.

Every command reads JSON, either from a file path or given inline, and prints
JSON (or an indented text rendering of the same structure). Exit statuses:
0 success, 1 ``--assert`` mismatch, 2 input error, 3 undecided verdict.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from .fibre import (
    Answer,
    QuotientDatum,
    TwistMatrix,
    artin_check,
    cook_mu,
    corank1_existence,
    corank2_existence,
    fp_check,
    greatsph_existence,
    minus_id_check,
    plan_max_corank,
    untwisted_check,
)
from .grouplang import (
    graph_from_json,
    is_direct_product,
    minimal_separators,
    parse_presentation,
    presentation_from_json,
)
from .sigma import (
    DEGENERATE_MODES,
    SigmaResult,
    brown_sigma_complement,
    load_sigma,
    raag_sigma_complement,
    sigma_to_json,
)

EXIT_OK, EXIT_ASSERT, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2, 3

TASK_COMMANDS = {
    "fp-check": "fp_check",
    "untwisted": "untwisted",
    "minus-id": "minus_id",
    "corank1": "corank1",
    "corank2": "corank2",
    "greatsph": "greatsph",
    "cook": "cook",
    "plan": "plan",
}

ASSERTIONS = {"fp": Answer.FP, "not-fp": Answer.NOT_FP,
              "exists": Answer.EXISTS, "not-exists": Answer.NOT_EXISTS}


class InputError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")


def load_document(arg: str, base: Path | None = None) -> tuple[Any, Path | None]:
    """Parse ``arg`` as inline JSON if it looks like JSON, else as a path.

    Returns the document and the directory relative paths inside it refer to.
    """
    text = arg.lstrip()
    if text.startswith(("{", "[")):
        source, where, folder = arg, "<inline>", base
    else:
        path = Path(arg)
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            source = path.read_text()
        except OSError as exc:
            raise InputError(str(path), f"cannot read file ({exc.strerror})") from exc
        where, folder = str(path), path.parent
    try:
        return json.loads(source), folder
    except json.JSONDecodeError as exc:
        raise InputError(where, f"invalid JSON at line {exc.lineno} column {exc.colno}: "
                                f"{exc.msg}") from exc


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _int_rows(doc, path: str, width: int | None = None) -> list[tuple[int, ...]]:
    if not isinstance(doc, list):
        raise InputError(path, "expected a list of integer vectors")
    rows = []
    for i, row in enumerate(doc):
        if not isinstance(row, list) or not all(_is_int(x) for x in row):
            raise InputError(f"{path}[{i}]", "expected a list of integers")
        if width is not None and len(row) != width:
            raise InputError(f"{path}[{i}]", f"expected {width} entries, got {len(row)}")
        rows.append(tuple(row))
    return rows


def sigma_of(doc, path: str = "$", base: Path | None = None) -> SigmaResult:
    """Compute or load a complement from any of the accepted input kinds."""
    if isinstance(doc, str):
        doc, base = load_document(doc, base)
        path = "$"
    if not isinstance(doc, dict):
        raise InputError(path, "expected an object")
    kind = doc.get("kind")
    if kind == "one_relator" or (kind is None and ("relator" in doc or "presentation" in doc)):
        if "presentation" in doc:
            if not isinstance(doc["presentation"], str):
                raise InputError(f"{path}.presentation", "expected a string")
            return brown_sigma_complement(parse_presentation(doc["presentation"]))
        return brown_sigma_complement(presentation_from_json(doc, path))
    if kind == "graph" or (kind is None and "vertices" in doc):
        return raag_sigma_complement(graph_from_json(doc, path))
    if kind in (None, "sigma_complement"):
        body = {k: v for k, v in doc.items() if k != "kind"}
        return load_sigma(body, path)
    raise InputError(f"{path}.kind", f"cannot compute a complement from kind {kind!r}")


def _factor(task: dict, key: str, base: Path | None, mode: str):
    path = f"$.{key}"
    f = task.get(key)
    if not isinstance(f, dict):
        raise InputError(path, "expected an object with a 'sigma' entry")
    if "sigma" not in f:
        raise InputError(path, "missing 'sigma'")
    sigma = sigma_of(f["sigma"], f"{path}.sigma", base).with_mode(mode)
    n = sigma.rank
    gens = _int_rows(f.get("n_gens", []), f"{path}.n_gens", n)
    k_gens = _int_rows(f.get("k_gens", []), f"{path}.k_gens", n)
    # the group's own relations always lie in N
    q = QuotientDatum.of(n, list(sigma.relations) + gens)
    return sigma, q, list(sigma.relations) + gens + k_gens, "k_gens" in f


def _twist(task: dict, size: int) -> TwistMatrix:
    if "mu" in task and "mu_star" in task:
        raise InputError("$", "give either 'mu' or 'mu_star', not both")
    if "mu" not in task and "mu_star" not in task:
        return TwistMatrix.identity(size)
    key = "mu" if "mu" in task else "mu_star"
    rows = _int_rows(task[key], f"$.{key}", size)
    if len(rows) != size:
        raise InputError(f"$.{key}", f"expected a {size}×{size} matrix")
    try:
        return TwistMatrix(rows) if key == "mu" else TwistMatrix.from_mu_star(rows)
    except ValueError as exc:
        raise InputError(f"$.{key}", str(exc)) from exc


def _single(task: dict) -> str:
    if "factor" in task:
        return "factor"
    return "factor1"


def run_task(command: str, task, base: Path | None, mode: str) -> dict:
    if not isinstance(task, dict):
        raise InputError("$", "expected a task object")
    expected = TASK_COMMANDS[command]
    kind = task.get("kind")
    if kind is not None and kind != expected:
        raise InputError("$.kind", f"task kind {kind!r} does not match command {command!r}")

    if command in ("untwisted", "minus-id", "corank2"):
        c, q, _, _ = _factor(task, _single(task), base, mode)
        fn = {"untwisted": untwisted_check, "minus-id": minus_id_check,
              "corank2": corank2_existence}[command]
        return fn(c, q).to_json()
    if command == "greatsph":
        c, _, _, _ = _factor(task, _single(task), base, mode)
        return greatsph_existence(c).to_json()
    if command == "corank1":
        c1, _, _, _ = _factor(task, "factor1", base, mode)
        c2, _, _, _ = _factor(task, "factor2", base, mode)
        return corank1_existence(c1, c2).to_json()
    if command == "plan":
        c1, _, _, _ = _factor(task, "factor1", base, mode)
        c2, _, _, _ = _factor(task, "factor2", base, mode)
        n, plan = plan_max_corank(c1, c2)
        out = plan.to_json()
        out["answer"] = plan.verdict.answer.value
        return out

    c1, q1, k1, has_k1 = _factor(task, "factor1", base, mode)
    c2, q2, k2, has_k2 = _factor(task, "factor2", base, mode)
    if command == "fp-check":
        return fp_check(c1, q1, c2, q2, _twist(task, q1.corank)).to_json()
    # cook
    if not (has_k1 and has_k2):
        raise InputError("$", "cook needs 'k_gens' in both factors")
    mu = cook_mu(c1, q1, k1, c2, q2, k2)
    verdict = fp_check(c1, q1, c2, q2, mu)
    return {"answer": verdict.answer.value,
            "mu": [list(r) for r in mu.b],
            "mu_star": [list(r) for r in mu.mu_star],
            "verdict": verdict.to_json()}


def run_command(args) -> tuple[dict, list[str]]:
    """The report and the answers relevant to ``--assert``."""
    doc, base = load_document(args.input)
    if args.command == "sigma":
        s = sigma_of(doc, "$", base).with_mode(args.degenerate)
        return sigma_to_json(s), []
    if args.command in ("separators", "artin"):
        g = graph_from_json(doc)
        if args.command == "separators":
            return {"separators": [list(s) for s in minimal_separators(g)],
                    "direct_product": is_direct_product(g)}, []
        untwisted, twisted = artin_check(g)
        return {"untwisted": untwisted.to_json(), "twisted": twisted.to_json()}, \
            [untwisted.answer.value, twisted.answer.value]
    out = run_task(args.command, doc, base, args.degenerate)
    return out, [out["answer"]]


def render_text(value, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(value, list):
        return "\n".join(f"{pad}- {json.dumps(v)}" if _flat(v) else
                         f"{pad}-\n{render_text(v, indent + 1)}" for v in value)
    return f"{pad}{json.dumps(value)}"


def _flat(v) -> bool:
    if isinstance(v, dict):
        return not v
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _flat(x))
                   for x in v)
    return True


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigmafibre",
        description="Decide finite presentability of normal fibre products from "
                    "BNS invariant complements.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sigma": "compute or normalise a complement (one_relator, graph or sigma_complement)",
        "separators": "list the minimal separators of a graph",
        "artin": "untwisted and twisted verdicts for a right-angled Artin group",
        "fp-check": "is the twisted fibre product finitely presented?",
        "untwisted": "finite presentability of the untwisted fibre product",
        "minus-id": "finite presentability for the twist by -1",
        "corank1": "does a finitely presented normal fibre product of co-rank 1 exist?",
        "corank2": "co-rank 2 existence test for one factor",
        "greatsph": "existence test for complements made of great subspheres",
        "cook": "construct a twist making the fibre product finitely presented",
        "plan": "maximal co-rank with subgroups and a twist realising it",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("input", help="JSON file path or inline JSON document")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--degenerate", choices=DEGENERATE_MODES, default="warn",
                       help="how to treat undecided axis rays (default: warn)")
        p.add_argument("--assert", dest="expect", choices=sorted(ASSERTIONS),
                       help="exit 1 unless the verdict matches")
        p.add_argument("--seed-free", action="store_true",
                       help="accepted for compatibility; output is always deterministic")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, answers = run_command(args)
    except ValueError as exc:
        # InputError, PresentationError, GraphError, SphereSetError,
        # DimensionError and HypothesisError all derive from ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.format == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print(render_text(report))

    if Answer.UNKNOWN.value in answers:
        print("undecided: a degenerate warned ray is decisive", file=sys.stderr)
        return EXIT_UNKNOWN
    if args.expect is not None:
        want = ASSERTIONS[args.expect].value
        if not answers:
            print(f"error: --assert does not apply to '{args.command}'", file=sys.stderr)
            return EXIT_INPUT
        if want not in answers:
            print(f"assertion failed: expected {want}, got {', '.join(answers)}",
                  file=sys.stderr)
            return EXIT_ASSERT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
