"""Parse trees over rule-indexed labels, their order, and a brute-force oracle.

A node labelled ``A.i`` records that rule i of A's production was used, so
the pre-order list of indices (``rule_index_sequence``) spells the leftmost
derivation of the tree.  Trees are compared by that list, lexicographically.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cache
from typing import NamedTuple

from .errors import InputAlphabetError, ResourceLimitError
from .grammar import Grammar, N

DEFAULT_ENUMERATION_CAP = 10_000


@dataclass(frozen=True, slots=True)
class ParseTree:
    """``symbol`` is a nonterminal name (index >= 1), a terminal character
    (index 0, no children) or ``""`` for the ε leaf."""

    symbol: str
    index: int = 0
    children: tuple[ParseTree, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.index == 0

    @property
    def is_epsilon(self) -> bool:
        return self.index == 0 and self.symbol == ""

    def __str__(self):
        return dumps_tree(self)


EPSILON = ParseTree("")


def leaf(char: str) -> ParseTree:
    return ParseTree(char)


def node(symbol: str, index: int, *children) -> ParseTree:
    """Convenience constructor; string children become terminal leaves, ``None`` the ε leaf."""
    kids = tuple(EPSILON if c is None else ParseTree(c) if isinstance(c, str) else c for c in children)
    return ParseTree(symbol, index, kids or (EPSILON,))


class Outcome(enum.Enum):
    LEAST_TREE = "least-tree"
    NO_PARSE = "no-parse"
    NO_LEAST_TREE = "no-least-tree"

    def __str__(self):
        return self.value


# ------------------------------------------------------------ basic queries


def tree_yield(t: ParseTree) -> str:
    out = []
    stack = [t]
    while stack:
        cur = stack.pop()
        if cur.is_leaf:
            out.append(cur.symbol)
        else:
            stack.extend(reversed(cur.children))
    return "".join(out)


def rule_index_sequence(t: ParseTree) -> tuple[int, ...]:
    """n(t): rule indices in pre-order.  Tuples compare lexicographically,
    so this doubles as the sort key for the tree order."""
    out = []
    stack = [t]
    while stack:
        cur = stack.pop()
        if not cur.is_leaf:
            out.append(cur.index)
            stack.extend(reversed(cur.children))
    return tuple(out)


def compare_trees(t1: ParseTree, t2: ParseTree) -> int:
    """-1, 0 or 1 as t1 is less than, equal to or greater than t2."""
    a, b = rule_index_sequence(t1), rule_index_sequence(t2)
    return (a > b) - (a < b)


def tree_height(t: ParseTree) -> int:
    if t.is_leaf:
        return 0
    return 1 + max(tree_height(c) for c in t.children)


def tree_size(t: ParseTree) -> int:
    """Number of rule-labelled nodes, i.e. the length of the leftmost derivation."""
    return len(rule_index_sequence(t))


def _check_node(g: Grammar, t: ParseTree) -> bool:
    if t.is_leaf:
        return True
    rules = g.productions.get(t.symbol)
    if rules is None or not 1 <= t.index <= len(rules):
        return False
    rhs = rules[t.index - 1].rhs
    if not rhs:
        return len(t.children) == 1 and t.children[0].is_epsilon
    if len(t.children) != len(rhs):
        return False
    for sym, child in zip(rhs, t.children):
        if sym.terminal:
            if not child.is_leaf or child.symbol != sym.name:
                return False
        elif child.is_leaf or child.symbol != sym.name:
            return False
        elif not _check_node(g, child):
            return False
    return True


def validate_parse_tree(g: Grammar, t: ParseTree, w: str) -> bool:
    """Root is some S_i, the yield is w, and every node's children spell its rule."""
    return (not t.is_leaf) and t.symbol == g.start and _check_node(g, t) and tree_yield(t) == w


def tree_spans(t: ParseTree, start: int = 0):
    """Yield (subtree, i, j, path) for every rule node; path is the tuple of
    (symbol, i, j) labels of its proper ancestors."""
    out = []

    def walk(cur, i, path):
        if cur.is_leaf:
            return i + (0 if cur.is_epsilon else 1)
        label = (cur.symbol, i, i + len(tree_yield(cur)))
        j = i
        for child in cur.children:
            j = walk(child, j, path + (label,))
        out.append((cur, i, j, path))
        return j

    walk(t, start, ())
    return out


def has_repeated_label(t: ParseTree) -> bool:
    """True when some (nonterminal, extent) occurs twice on a root-to-leaf path."""
    return any((s.symbol, i, j) in path for s, i, j, path in tree_spans(t))


# ------------------------------------------------------------ serialization

_PLAIN = set("+-*/^<>=!?:;[]{}|&%$#@")


def _dump_leaf(c: str) -> str:
    if c.isalnum() or c in _PLAIN:
        return c
    return "'\\" + c + "'" if c in "'\\" else "'" + c + "'"


def dumps_tree(t: ParseTree) -> str:
    """Canonical text: ``A.1(a, A.2(b), ~)``; ``~`` is the ε leaf."""
    if t.is_epsilon:
        return "~"
    if t.is_leaf:
        return _dump_leaf(t.symbol)
    return f"{t.symbol}.{t.index}(" + ", ".join(dumps_tree(c) for c in t.children) + ")"


def loads_tree(text: str) -> ParseTree:
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def peek():
        return text[pos] if pos < len(text) else ""

    def parse():
        nonlocal pos
        skip()
        if pos >= len(text):
            raise ValueError("unexpected end of tree text")
        c = text[pos]
        if c == "~":
            pos += 1
            return EPSILON
        if c == "'":
            escaped = text[pos + 1 : pos + 2] == "\\"
            ch = text[pos + 1 + escaped : pos + 2 + escaped]
            pos += 3 + escaped
            if not ch or text[pos - 1 : pos] != "'":
                raise ValueError(f"bad quoted leaf near offset {pos}")
            return ParseTree(ch)
        if c.isalnum() or c == "_":
            end = pos
            while end < len(text) and (text[end].isalnum() or text[end] == "_"):
                end += 1
            word = text[pos:end]
            if end < len(text) and text[end] == "." and end + 1 < len(text) and text[end + 1].isdigit():
                k = end + 1
                while k < len(text) and text[k].isdigit():
                    k += 1
                index = int(text[end + 1 : k])
                pos = k
                skip()
                if pos >= len(text) or text[pos] != "(":
                    raise ValueError(f"expected '(' at offset {pos}")
                pos += 1
                kids = [parse()]
                skip()
                while peek() == ",":
                    pos += 1
                    kids.append(parse())
                    skip()
                if peek() != ")":
                    raise ValueError(f"expected ')' at offset {pos}")
                pos += 1
                return ParseTree(word, index, tuple(kids))
            if len(word) != 1:
                raise ValueError(f"terminal leaf {word!r} is not one character")
            pos = end
            return ParseTree(word)
        if c in "(),":
            raise ValueError(f"unexpected {c!r} at offset {pos}")
        pos += 1
        return ParseTree(c)

    t = parse()
    skip()
    if pos != len(text):
        raise ValueError(f"trailing text at offset {pos}")
    return t


def tree_to_json(t: ParseTree):
    if t.is_epsilon:
        return {"eps": True}
    if t.is_leaf:
        return {"t": t.symbol}
    return {"nt": t.symbol, "i": t.index, "children": [tree_to_json(c) for c in t.children]}


def tree_from_json(obj) -> ParseTree:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("eps"):
        return EPSILON
    if "t" in obj:
        return ParseTree(obj["t"])
    return ParseTree(obj["nt"], obj["i"], tuple(tree_from_json(c) for c in obj["children"]))


# ------------------------------------------------------------ brute force


def height_bound(g: Grammar, w: str) -> int:
    """max{2|w||N|, |N|}: no parse tree without a repeated (A, extent) on a
    path is taller than this."""
    n = len(g.nonterminals)
    return max(2 * len(w) * n, n)


def enumerate_parse_trees(
    g: Grammar, w: str, height_bound: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[ParseTree]:
    """All parse trees of w with height <= height_bound, ascending in tree order."""
    if height_bound < 0:
        raise ValueError("height_bound must be >= 0")
    n = len(w)
    memo: dict[tuple, list[ParseTree]] = {}

    def guard(items):
        if len(items) > cap:
            raise ResourceLimitError(f"more than {cap} trees; raise the cap or shorten the input")

    def trees(a, i, j, h):
        if h < 1:
            return []
        key = (a, i, j, h)
        if key in memo:
            return memo[key]
        out = []
        for rule in g.productions[a]:
            if not rule.rhs:
                if i == j:
                    out.append(ParseTree(a, rule.index, (EPSILON,)))
                continue
            for kids in seqs(rule.rhs, 0, i, j, h - 1):
                out.append(ParseTree(a, rule.index, kids))
                guard(out)
        memo[key] = out
        return out

    def seqs(rhs, p, i, j, h):
        if p == len(rhs):
            return [()] if i == j else []
        sym = rhs[p]
        out = []
        if sym.terminal:
            if i < n and w[i] == sym.name and i < j:
                out = [(ParseTree(sym.name),) + rest for rest in seqs(rhs, p + 1, i + 1, j, h)]
            return out
        for k in range(i, j + 1):
            heads = trees(sym.name, i, k, h)
            if not heads:
                continue
            tails = seqs(rhs, p + 1, k, j, h)
            for head in heads:
                for rest in tails:
                    out.append((head,) + rest)
                    guard(out)
        return out

    result = trees(g.start, 0, n, height_bound)
    return sorted(result, key=rule_index_sequence)


class OracleResult(NamedTuple):
    outcome: Outcome
    tree: ParseTree | None


def _derivable_table(g: Grammar, w: str) -> set[tuple[str, int, int]]:
    """Naive fixpoint for {(A, i, j) : A =>* w[i:j]}."""
    n = len(w)
    table: set[tuple[str, int, int]] = set()

    def seq_ok(rhs, i, j):
        cur = {i}
        for sym in rhs:
            nxt = set()
            for a in cur:
                if sym.terminal:
                    if a < n and w[a] == sym.name:
                        nxt.add(a + 1)
                else:
                    nxt.update(b for b in range(a, n + 1) if (sym.name, a, b) in table)
            cur = nxt
        return j in cur

    changed = True
    while changed:
        changed = False
        for a in g.nonterminals:
            for i in range(n + 1):
                for j in range(i, n + 1):
                    if (a, i, j) not in table and any(seq_ok(r.rhs, i, j) for r in g.productions[a]):
                        table.add((a, i, j))
                        changed = True
    return table


def least_tree_oracle(g: Grammar, w: str) -> OracleResult:
    """Brute-force least tree, independent of the forest machinery.

    1. t* := the least tree among trees with no (A, extent) repeated on a
       path.  Every such tree fits under ``height_bound``; a least
       tree, when one exists, is of this kind.
    2. Replay n(t*) as a leftmost derivation.  At each step try every
       smaller rule index; if the resulting sentential form can still derive
       the rest of w, some tree is below t* and no least tree exists.
    """
    for c in set(w):
        if c not in g.terminals:
            raise InputAlphabetError(f"input character {c!r} is not a terminal of the grammar")
    n = len(w)
    table = _derivable_table(g, w)
    if (g.start, 0, n) not in table:
        return OracleResult(Outcome.NO_PARSE, None)

    def splits(rhs, p, i, j):
        if p == len(rhs):
            if i == j:
                yield ()
            return
        sym = rhs[p]
        if sym.terminal:
            if i < j and w[i] == sym.name:
                for rest in splits(rhs, p + 1, i + 1, j):
                    yield ((sym, i, i + 1),) + rest
            return
        for k in range(i, j + 1):
            if (sym.name, i, k) in table:
                for rest in splits(rhs, p + 1, k, j):
                    yield ((sym, i, k),) + rest

    @cache
    def best(a, i, j, banned):
        # banned: nonterminals already on the path with this same extent
        found = None
        inner = banned | {a}
        for rule in g.productions[a]:
            if not rule.rhs:
                if i == j:
                    cand = ((rule.index,), ParseTree(a, rule.index, (EPSILON,)))
                    if found is None or cand[0] < found[0]:
                        found = cand
                continue
            for parts in splits(rule.rhs, 0, i, j):
                seq = [rule.index]
                kids = []
                for sym, x, y in parts:
                    if sym.terminal:
                        kids.append(ParseTree(sym.name))
                        continue
                    ban = inner if (x, y) == (i, j) else frozenset()
                    if sym.name in ban:
                        break
                    sub = best(sym.name, x, y, ban)
                    if sub is None:
                        break
                    seq.extend(sub[0])
                    kids.append(sub[1])
                else:
                    cand = (tuple(seq), ParseTree(a, rule.index, tuple(kids)))
                    if found is None or cand[0] < found[0]:
                        found = cand
        return found

    top = best(g.start, 0, n, frozenset())
    if top is None:
        raise ResourceLimitError("derivable start symbol but no repetition-free tree")  # pragma: no cover
    seq, tree = top

    def completable(form, pos):
        cur = {pos}
        for sym in form:
            nxt = set()
            for a in cur:
                if sym.terminal:
                    if a < n and w[a] == sym.name:
                        nxt.add(a + 1)
                else:
                    nxt.update(b for b in range(a, n + 1) if (sym.name, a, b) in table)
            if not nxt:
                return False
            cur = nxt
        return n in cur

    stack = [N(g.start)]  # leftmost symbol at the end
    pos = 0
    for idx in seq:
        while stack[-1].terminal:
            stack.pop()
            pos += 1
        a = stack.pop().name
        rest = stack[::-1]
        for smaller in range(1, min(idx, len(g.productions[a]) + 1)):
            if completable(list(g.rule(a, smaller).rhs) + rest, pos):
                return OracleResult(Outcome.NO_LEAST_TREE, None)
        stack.extend(reversed(g.rule(a, idx).rhs))
    return OracleResult(Outcome.LEAST_TREE, tree)
