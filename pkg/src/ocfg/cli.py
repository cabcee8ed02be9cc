"""Command-line front end: ``ocfg check|parse|forest|peg|compare|oracle``.

Exit codes: 0 ok, 1 not well-ordered, 2 usage or grammar error, 3 no parse,
4 no least tree, 5 PEG and least-tree parsing disagree, 6 left recursion,
7 oracle enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import GrammarError, InputAlphabetError, LeftRecursionError, OcfgError, ResourceLimitError
from .grammar import Grammar, analyze, parse_grammar_text
from .least import format_derivation, parse_least
from .peg import PegMatcher, compare_peg_ocfg
from .sppf import build_sppf, sppf_has_cycle, sppf_to_dot, sppf_to_json
from .trees import (
    DEFAULT_ENUMERATION_CAP,
    Outcome,
    dumps_tree,
    enumerate_parse_trees,
    height_bound,
    least_tree_oracle,
    rule_index_sequence,
    tree_to_json,
)

EXIT_OK = 0
EXIT_NOT_WELL_ORDERED = 1
EXIT_USAGE = 2
EXIT_NO_PARSE = 3
EXIT_NO_LEAST_TREE = 4
EXIT_DISAGREE = 5
EXIT_LEFT_RECURSION = 6
EXIT_CAP = 7

SCHEMA_VERSION = 1

_OUTCOME_EXIT = {
    Outcome.LEAST_TREE: EXIT_OK,
    Outcome.NO_PARSE: EXIT_NO_PARSE,
    Outcome.NO_LEAST_TREE: EXIT_NO_LEAST_TREE,
}


class _UsageError(Exception):
    pass


def _dump_json(obj) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2, ensure_ascii=False)


def _load_grammar(path: str) -> Grammar:
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read grammar {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise _UsageError(f"grammar {path} is not UTF-8") from exc
    return parse_grammar_text(text)


def _inputs(args) -> list[tuple[str, str]]:
    """(label, text) pairs; exactly one kind of input source is allowed."""
    given = args.input is not None
    files = args.input_file or []
    if given == bool(files):
        raise _UsageError("give exactly one of --input or --input-file")
    if given:
        return [("<input>", args.input)]
    out = []
    for name in files:
        try:
            out.append((name, Path(name).read_bytes().decode("utf-8")))
        except OSError as exc:
            raise _UsageError(f"cannot read input {name}: {exc.strerror or exc}") from exc
        except UnicodeDecodeError as exc:
            raise _UsageError(f"input {name} is not UTF-8") from exc
    return out


def _single_input(args) -> str:
    items = _inputs(args)
    if len(items) != 1:
        raise _UsageError(f"{args.command} takes a single input")
    return items[0][1]


def _rule_text(g: Grammar, lhs: str, index: int) -> str:
    return f"{g.rule(lhs, index)} (index {index} of {len(g.productions[lhs])})"


# ------------------------------------------------------------ commands


def cmd_check(args, out) -> int:
    g = _load_grammar(args.grammar)
    a = analyze(g)
    cyclic = sorted(a.cyclic_rules, key=lambda r: (g.nonterminals.index(r[0]), r[1]))
    offending = a.offending_rules(g)
    if args.format == "json":
        out.write(
            _dump_json(
                {
                    "useful": [n for n in g.nonterminals if n in a.useful],
                    "nullable": [n for n in g.nonterminals if n in a.nullable],
                    "cyclic_rules": [str(g.rule(*r)) for r in cyclic],
                    "offending_rules": [str(r) for r in offending],
                    "cyclic": a.is_cyclic,
                    "well_ordered": a.well_ordered,
                }
            )
            + "\n"
        )
    else:
        out.write(f"useful: {', '.join(n for n in g.nonterminals if n in a.useful) or '-'}\n")
        out.write(f"nullable: {', '.join(n for n in g.nonterminals if n in a.nullable) or '-'}\n")
        out.write("cyclic rules:" + ("" if cyclic else " -") + "\n")
        for r in cyclic:
            out.write(f"  {_rule_text(g, *r)}\n")
        out.write(f"well-ordered = {'true' if a.well_ordered else 'false'}\n")
        for r in offending:
            out.write(f"  not last: {_rule_text(g, r.lhs, r.index)}\n")
    return EXIT_OK if a.well_ordered else EXIT_NOT_WELL_ORDERED


def _parse_one(g: Grammar, w: str, mode: str):
    return parse_least(g, w, mode)


def _parse_report(label: str, w: str, result, annotate: bool) -> dict:
    rep = {"input": w, "outcome": result.outcome.value}
    if label != "<input>":
        rep["source"] = label
    if result.tree is not None:
        rep["tree"] = dumps_tree(result.tree)
        rep["tree_json"] = tree_to_json(result.tree)
        rep["sequence"] = list(rule_index_sequence(result.tree))
        rep["derivation"] = format_derivation(result.tree, annotate)
    if result.matched_prefix is not None:
        rep["matched_prefix"] = result.matched_prefix
    if result.witness:
        rep["witness"] = [str(v) for v in result.witness]
    return rep


def _write_parse_text(out, rep: dict, many: bool) -> None:
    if many:
        out.write(f"== {rep.get('source', '<input>')}\n")
    out.write(f"outcome: {rep['outcome']}\n")
    if "tree" in rep:
        out.write(f"tree: {rep['tree']}\n")
        out.write(f"n(t) = {' '.join(map(str, rep['sequence']))}\n")
        if "matched_prefix" in rep:
            out.write(f"matched prefix: {rep['matched_prefix'] or 'ε'}\n")
        derivation = rep["derivation"]
        sep = "\n" if "\n" in derivation else " "
        out.write(f"derivation:{sep}{derivation}\n")
    if "witness" in rep:
        out.write("decreasing cycle: " + " -> ".join(rep["witness"]) + "\n")


def cmd_parse(args, out) -> int:
    g = _load_grammar(args.grammar)
    items = _inputs(args)
    if len(items) > 1 and args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda it: _parse_one(g, it[1], args.mode), items))
    else:
        results = [_parse_one(g, w, args.mode) for _, w in items]
    reports = [_parse_report(label, w, r, args.annotate) for (label, w), r in zip(items, results)]
    if args.format == "json":
        body = reports[0] if len(reports) == 1 else {"results": reports}
        out.write(_dump_json(body) + "\n")
    else:
        for rep in reports:
            _write_parse_text(out, rep, len(reports) > 1)
    return max(_OUTCOME_EXIT[r.outcome] for r in results)


def cmd_forest(args, out) -> int:
    g = _load_grammar(args.grammar)
    f = build_sppf(g, _single_input(args))
    fmt = args.format or "dot"
    if fmt == "json":
        out.write(json.dumps(sppf_to_json(f), indent=2, ensure_ascii=False) + "\n")
    elif fmt == "dot":
        out.write(sppf_to_dot(f))
    else:
        if f.root is None:
            out.write("no parse\n")
            return EXIT_OK
        out.write(f"nodes: {f.node_count()}, edges: {f.edge_count()}, has_cycle: {str(sppf_has_cycle(f)).lower()}\n")
        for v, kids in f.packed.items():
            if kids:
                out.write(f"{v}: {' '.join(str(p) for p in kids)}\n")
    return EXIT_OK


def cmd_peg(args, out) -> int:
    g = _load_grammar(args.grammar)
    w = _single_input(args)
    m = PegMatcher(g, w)
    outcome = m.match()
    full = outcome.matched == w
    tree = m.tree() if outcome.ok else None
    if args.format == "json":
        out.write(
            _dump_json(
                {
                    "input": w,
                    "matched": outcome.matched,
                    "full_match": full,
                    "tree": None if tree is None else dumps_tree(tree),
                    "memo_entries": len(m.memo),
                }
            )
            + "\n"
        )
    else:
        if not outcome.ok:
            out.write("matched: FAIL\n")
        else:
            kind = "full" if full else "prefix"
            out.write(f"matched: {outcome} ({kind}; full match: {'yes' if full else 'no'})\n")
            out.write(f"tree: {dumps_tree(tree)}\n")
    return EXIT_OK if full else EXIT_NO_PARSE


def cmd_compare(args, out) -> int:
    g = _load_grammar(args.grammar)
    rep = compare_peg_ocfg(g, _single_input(args))
    show = lambda t: None if t is None else dumps_tree(t)  # noqa: E731
    if args.format == "json":
        out.write(
            _dump_json(
                {
                    "peg_full": rep.peg_full,
                    "ocfg_full": rep.ocfg_full,
                    "peg_tree": show(rep.peg_tree),
                    "ocfg_least_tree": show(rep.ocfg_least_tree),
                    "trees_equal": rep.trees_equal,
                    "agree": rep.agree,
                }
            )
            + "\n"
        )
    else:
        yes = lambda b: "yes" if b else "no"  # noqa: E731
        out.write(f"peg_full: {yes(rep.peg_full)}\n")
        out.write(f"ocfg_full: {yes(rep.ocfg_full)}\n")
        out.write(f"peg_tree: {show(rep.peg_tree) or '-'}\n")
        out.write(f"ocfg_least_tree: {show(rep.ocfg_least_tree) or '-'}\n")
        out.write(f"trees_equal: {yes(rep.trees_equal)}\n")
        out.write("agreement\n" if rep.agree else "disagreement\n")
    return EXIT_OK if rep.agree else EXIT_DISAGREE


def cmd_oracle(args, out) -> int:
    g = _load_grammar(args.grammar)
    w = _single_input(args)
    cap = args.limit if args.limit is not None else DEFAULT_ENUMERATION_CAP
    try:
        trees = enumerate_parse_trees(g, w, height_bound(g, w), cap=cap)
    except ResourceLimitError:
        msg = f"more than {cap} trees below the height bound; infinite family suspected"
        if args.format == "json":
            out.write(_dump_json({"input": w, "error": msg}) + "\n")
        else:
            out.write(msg + "\n")
        return EXIT_CAP
    verdict = least_tree_oracle(g, w)
    least = verdict.tree if verdict.outcome is Outcome.LEAST_TREE else None
    forest = build_sppf(g, w)
    truncated = forest.root is not None and sppf_has_cycle(forest)
    if args.format == "json":
        out.write(
            _dump_json(
                {
                    "input": w,
                    "outcome": verdict.outcome.value,
                    "truncated": truncated,
                    "trees": [
                        {"tree": dumps_tree(t), "sequence": list(rule_index_sequence(t)), "least": t == least}
                        for t in trees
                    ],
                }
            )
            + "\n"
        )
    else:
        out.write(f"{len(trees)} tree{'s' if len(trees) != 1 else ''} (height <= {height_bound(g, w)})\n")
        for t in trees:
            seq = " ".join(map(str, rule_index_sequence(t)))
            tag = "  <- least" if t == least else ""
            out.write(f"{seq}  {dumps_tree(t)}{tag}\n")
        if truncated:
            out.write("truncated at the height bound: infinite family suspected\n")
        out.write(f"outcome: {verdict.outcome.value}\n")
    return _OUTCOME_EXIT[verdict.outcome]


# ------------------------------------------------------------ wiring


def _add_input(p: argparse.ArgumentParser, many: bool = False) -> None:
    p.add_argument("--input", metavar="STR", help="input string")
    p.add_argument(
        "--input-file",
        metavar="PATH",
        action="append",
        help="read the input from a UTF-8 file" + (" (repeatable)" if many else ""),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ocfg", description="Ordered context-free grammar toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help_text, func, formats=("text", "json"), default_format="text"):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--grammar", required=True, metavar="PATH", help="grammar file")
        p.add_argument("--format", choices=formats, default=default_format)
        p.set_defaults(func=func)
        return p

    command("check", "analyse a grammar and decide whether it is well-ordered", cmd_check)

    p = command("parse", "least parse tree of the input", cmd_parse)
    _add_input(p, many=True)
    p.add_argument("--mode", choices=("full", "prefix"), default="full")
    p.add_argument("--annotate", action="store_true", help="one derivation step per line with carets")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="parse several input files concurrently")

    p = command("forest", "export the parse forest", cmd_forest, ("text", "json", "dot"), "dot")
    _add_input(p)

    p = command("peg", "match the input under PEG semantics", cmd_peg)
    _add_input(p)

    p = command("compare", "compare PEG matching with least-tree parsing", cmd_compare)
    _add_input(p)

    p = command("oracle", "enumerate parse trees by brute force", cmd_oracle)
    _add_input(p)
    p.add_argument("--limit", type=int, metavar="N", help=f"tree cap (default {DEFAULT_ENUMERATION_CAP})")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "jobs", 1) < 1:
        err.write("ocfg: --jobs must be at least 1\n")
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except LeftRecursionError as exc:
        err.write(f"ocfg: {exc}\n")
        return EXIT_LEFT_RECURSION
    except (_UsageError, GrammarError, InputAlphabetError) as exc:
        err.write(f"ocfg: {exc}\n")
        return EXIT_USAGE
    except OcfgError as exc:
        err.write(f"ocfg: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
