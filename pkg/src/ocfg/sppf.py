"""Right-binarised shared packed parse forests.

Node taxonomy:

* symbol node ``(X, i, j)`` for a terminal, nonterminal or ε (``X`` is None);
* intermediate node ``(α, i, j)`` for a proper suffix α, |α| >= 2, of some
  right-hand side.  A rule ``X -> x β`` is split as ``x`` (kept atomic) and
  ``β``, so binarisation happens from the right;
* packed nodes ``(X -> x β, i, k, j)`` and ``(x β, i, k, j)`` with left child
  ``(x, i, k)`` and right child ``(β, k, j)`` (absent when β is empty).

Construction is a bottom-up chart over spans: for every span (shortest first)
a small fixpoint decides which nonterminals and suffixes derive it, which is
O(|w|^3) for a fixed grammar.  The forest is then unfolded top-down from
``(S, 0, |w|)``, so it only holds nodes reachable from the root.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import islice

from ._graph import is_cyclic_component, strongly_connected_components
from .errors import CycleError, InputAlphabetError
from .grammar import Grammar, Rule, Symbol
from .trees import EPSILON, ParseTree


def _join(symbols) -> str:
    names = [s.name for s in symbols]
    return ("" if all(len(x) == 1 for x in names) else " ").join(names)


@dataclass(frozen=True, slots=True)
class SymbolNode:
    symbol: Symbol | None  # None is ε
    start: int
    end: int

    @property
    def is_epsilon(self):
        return self.symbol is None

    @property
    def is_terminal(self):
        return self.symbol is not None and self.symbol.terminal

    def __str__(self):
        name = "ε" if self.symbol is None else self.symbol.name
        return f"({name},{self.start},{self.end})"


@dataclass(frozen=True, slots=True)
class IntermediateNode:
    symbols: tuple[Symbol, ...]
    start: int
    end: int

    def __str__(self):
        return f"({_join(self.symbols)},{self.start},{self.end})"


@dataclass(frozen=True, slots=True)
class PackedNode:
    """Rule-packed when ``rule`` is set, otherwise intermediate-packed for ``symbols``."""

    rule: Rule | None
    symbols: tuple[Symbol, ...]
    start: int
    pivot: int
    end: int
    left: SymbolNode
    right: SymbolNode | IntermediateNode | None

    @property
    def is_rule(self):
        return self.rule is not None

    def __str__(self):
        if self.rule is not None:
            body = _join(self.rule.rhs) or "ε"
            head = f"{self.rule.lhs}->{body}"
        else:
            head = _join(self.symbols)
        return f"({head},{self.start},{self.pivot},{self.end})"


Node = SymbolNode | IntermediateNode


@dataclass(frozen=True)
class SPPF:
    grammar: Grammar
    input: str
    root: SymbolNode | None
    packed: dict  # Node -> tuple[PackedNode, ...]; insertion order is BFS from the root

    __hash__ = None

    @property
    def nodes(self) -> list[Node]:
        return list(self.packed)

    @property
    def symbol_nodes(self) -> list[SymbolNode]:
        return [v for v in self.packed if isinstance(v, SymbolNode)]

    @property
    def intermediate_nodes(self) -> list[IntermediateNode]:
        return [v for v in self.packed if isinstance(v, IntermediateNode)]

    @property
    def packed_nodes(self) -> list[PackedNode]:
        return [p for ps in self.packed.values() for p in ps]

    def children(self, v: Node) -> list[Node]:
        out = []
        for p in self.packed[v]:
            out.append(p.left)
            if p.right is not None:
                out.append(p.right)
        return out

    def node_count(self) -> int:
        """Symbol, intermediate and packed nodes together."""
        return len(self.packed) + sum(len(ps) for ps in self.packed.values())

    def edge_count(self) -> int:
        return sum(1 + (2 if p.right is not None else 1) for ps in self.packed.values() for p in ps)

    def components(self) -> list[list[Node]]:
        """SCCs over symbol/intermediate nodes, children before parents."""
        return strongly_connected_components(self.packed, self.children)


def build_sppf(g: Grammar, w: str) -> SPPF:
    bad = sorted(set(w) - set(g.terminals))
    if bad:
        raise InputAlphabetError(f"characters {bad} are not terminals of the grammar")
    n = len(w)

    # chart labels are symbol tuples: (A,) for nonterminals, suffixes of length >= 2
    labels: list[tuple[Symbol, ...]] = []
    seen = set()
    for name in g.nonterminals:
        labels.append((Symbol(name),))
        seen.add((Symbol(name),))
    for rule in g.rules:
        for p in range(1, len(rule.rhs) - 1):
            suffix = rule.rhs[p:]
            if suffix not in seen:
                seen.add(suffix)
                labels.append(suffix)
    splits = {}
    for lab in labels:
        if len(lab) == 1:
            splits[lab] = [(r.rhs[:1], r.rhs[1:]) if r.rhs else None for r in g.productions[lab[0].name]]
        else:
            splits[lab] = [(lab[:1], lab[1:])]

    chart: set = set()

    def holds(lab, i, j):
        if not lab:
            return i == j
        if len(lab) == 1 and lab[0].terminal:
            return j == i + 1 and w[i] == lab[0].name
        return (lab, i, j) in chart

    def derivable(lab, i, j):
        for split in splits[lab]:
            if split is None:
                if i == j:
                    return True
                continue
            head, tail = split
            for k in range(i, j + 1):
                if holds(head, i, k) and holds(tail, k, j):
                    return True
        return False

    for length in range(n + 1):
        for i in range(n - length + 1):
            j = i + length
            pending = labels
            changed = True
            while changed:
                changed = False
                still = []
                for lab in pending:
                    if derivable(lab, i, j):
                        chart.add((lab, i, j))
                        changed = True
                    else:
                        still.append(lab)
                pending = still

    start = (Symbol(g.start),)
    if not holds(start, 0, n):
        return SPPF(g, w, None, {})

    made: dict = {}

    def node_for(lab, i, j):
        key = (lab, i, j)
        v = made.get(key)
        if v is None:
            if not lab:
                v = SymbolNode(None, i, j)
            elif len(lab) == 1:
                v = SymbolNode(lab[0], i, j)
            else:
                v = IntermediateNode(lab, i, j)
            made[key] = v
        return v

    packed: dict = {}
    root = node_for(start, 0, n)
    queue = deque([(start, 0, n)])
    while queue:
        lab, i, j = queue.popleft()
        v = node_for(lab, i, j)
        if v in packed:
            continue
        kids = []
        if len(lab) == 1 and not lab[0].terminal:
            for rule in g.productions[lab[0].name]:
                if not rule.rhs:
                    if i == j:
                        kids.append(PackedNode(rule, (), i, i, i, node_for((), i, i), None))
                    continue
                head, tail = rule.rhs[:1], rule.rhs[1:]
                for k in range(i, j + 1):
                    if holds(head, i, k) and holds(tail, k, j):
                        right = node_for(tail, k, j) if tail else None
                        kids.append(PackedNode(rule, (), i, k, j, node_for(head, i, k), right))
        elif len(lab) >= 2:
            head, tail = lab[:1], lab[1:]
            for k in range(i, j + 1):
                if holds(head, i, k) and holds(tail, k, j):
                    kids.append(PackedNode(None, lab, i, k, j, node_for(head, i, k), node_for(tail, k, j)))
        packed[v] = tuple(kids)
        for p in kids:
            for child in (p.left, p.right):
                if child is not None and child not in packed:
                    clab = (child.symbol,) if isinstance(child, SymbolNode) and child.symbol else (
                        () if isinstance(child, SymbolNode) else child.symbols)
                    queue.append((clab, child.start, child.end))
    return SPPF(g, w, root, packed)


def validate_sppf(f: SPPF) -> list[str]:
    """Recheck every node against the forest conditions; returns problems found."""
    g, w = f.grammar, f.input
    problems = []

    def label_node(symbols, i, j):
        if len(symbols) == 1:
            return SymbolNode(symbols[0], i, j)
        return IntermediateNode(tuple(symbols), i, j)

    for v, kids in f.packed.items():
        if isinstance(v, SymbolNode):
            if v.is_epsilon:
                if v.start != v.end or kids:
                    problems.append(f"{v}: malformed ε node")
                continue
            if v.is_terminal:
                if v.end != v.start + 1 or w[v.start] != v.symbol.name or kids:
                    problems.append(f"{v}: terminal node does not match the input")
                continue
        if not kids:
            problems.append(f"{v}: inner node without packed children")
        for p in kids:
            i, k, j = p.start, p.pivot, p.end
            if (i, j) != (v.start, v.end) or not i <= k <= j:
                problems.append(f"{p}: extent does not match parent {v}")
                continue
            if isinstance(v, SymbolNode):
                rule = p.rule
                if rule is None or rule.lhs != v.symbol.name or g.productions[rule.lhs][rule.index - 1] != rule:
                    problems.append(f"{p}: not a rule of {v.symbol.name}")
                    continue
                rhs = rule.rhs
                if not rhs:
                    if not (i == k == j and p.left == SymbolNode(None, i, i) and p.right is None):
                        problems.append(f"{p}: malformed ε-rule packed node")
                    continue
            else:
                rhs = v.symbols
                if p.rule is not None or p.symbols != rhs:
                    problems.append(f"{p}: not an intermediate split of {v}")
                    continue
            if p.left != SymbolNode(rhs[0], i, k) or p.left not in f.packed:
                problems.append(f"{p}: missing left child ({rhs[0].name},{i},{k})")
            tail = rhs[1:]
            if tail:
                if p.right != label_node(tail, k, j) or p.right not in f.packed:
                    problems.append(f"{p}: missing right child ({_join(tail)},{k},{j})")
            elif k != j or p.right is not None:
                problems.append(f"{p}: rule ends at the pivot but k != j")
    return problems


def sppf_has_cycle(f: SPPF) -> bool:
    return any(is_cyclic_component(c, f.children) for c in f.components())


def extract_trees(f: SPPF, limit: int | None = None, max_depth: int | None = None) -> list[ParseTree]:
    """Up to ``limit`` distinct parse trees, one per packed-node selection.

    On a cyclic forest ``max_depth`` must bound how many symbol/intermediate
    nodes a root-to-leaf path may visit.
    """
    if f.root is None or limit == 0:
        return []
    if max_depth is None and sppf_has_cycle(f):
        raise CycleError("forest is cyclic; pass max_depth to bound the unrolling")
    cap = limit

    memo: dict = {}

    def parts(v, depth):
        # lists of child tuples: a symbol node gives 1-tuples, an intermediate node longer ones
        key = (v, depth)
        if key in memo:
            return memo[key]
        if isinstance(v, SymbolNode) and v.symbol is None:
            return [(EPSILON,)]
        if isinstance(v, SymbolNode) and v.symbol.terminal:
            return [(ParseTree(v.symbol.name),)]
        if depth == 0:
            return []
        nxt = None if depth is None else depth - 1
        out = []
        for p in f.packed[v]:
            lefts = parts(p.left, nxt)
            rights = parts(p.right, nxt) if p.right is not None else [()]
            for lp in lefts:
                for rp in rights:
                    kids = lp + rp
                    if p.rule is not None:
                        out.append((ParseTree(p.rule.lhs, p.rule.index, kids),))
                    else:
                        out.append(kids)
                    if cap is not None and len(out) >= cap:
                        break
                if cap is not None and len(out) >= cap:
                    break
            if cap is not None and len(out) >= cap:
                break
        memo[key] = out
        return out

    trees = [p[0] for p in parts(f.root, max_depth)]
    return list(islice(trees, limit)) if limit is not None else trees


# ------------------------------------------------------------ export


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def sppf_to_dot(f: SPPF) -> str:
    lines = ["digraph sppf {", f'  // input: "{_dot_escape(f.input)}"']
    if f.root is None:
        lines.append("  // no parse")
        lines.append("}")
        return "\n".join(lines) + "\n"
    lines.append(
        f"  // nodes: {f.node_count()}, edges: {f.edge_count()}, has_cycle: {str(sppf_has_cycle(f)).lower()}"
    )
    ids = {v: f"n{k}" for k, v in enumerate(f.packed)}
    for v, nid in ids.items():
        shape = "ellipse" if isinstance(v, SymbolNode) else "rectangle"
        lines.append(f'  {nid} [shape={shape}, label="{_dot_escape(str(v))}"];')
    edges = []
    pk = 0
    for v, kids in f.packed.items():
        for p in kids:
            pid = f"p{pk}"
            pk += 1
            lines.append(f'  {pid} [shape=point, xlabel="{_dot_escape(str(p))}"];')
            edges.append(f"  {ids[v]} -> {pid};")
            edges.append(f"  {pid} -> {ids[p.left]};")
            if p.right is not None:
                edges.append(f"  {pid} -> {ids[p.right]};")
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def sppf_to_json(f: SPPF) -> dict:
    symbol_nodes, intermediate_nodes, packed_nodes = [], [], []
    for v, kids in f.packed.items():
        entry = {"key": str(v), "extent": [v.start, v.end], "packed": [str(p) for p in kids]}
        if isinstance(v, SymbolNode):
            entry["label"] = None if v.symbol is None else v.symbol.name
            entry["kind"] = "epsilon" if v.symbol is None else "terminal" if v.symbol.terminal else "nonterminal"
            symbol_nodes.append(entry)
        else:
            entry["label"] = [s.name for s in v.symbols]
            intermediate_nodes.append(entry)
        for p in kids:
            packed_nodes.append(
                {
                    "key": str(p),
                    "kind": "rule" if p.rule is not None else "intermediate",
                    "label": str(p.rule) if p.rule is not None else [s.name for s in p.symbols],
                    "rule_index": p.rule.index if p.rule is not None else None,
                    "extent": [p.start, p.end],
                    "pivot": p.pivot,
                    "parent": str(v),
                    "left": str(p.left),
                    "right": None if p.right is None else str(p.right),
                }
            )
    return {
        "schema_version": 1,
        "input": f.input,
        "root": None if f.root is None else str(f.root),
        "has_cycle": f.root is not None and sppf_has_cycle(f),
        "node_count": f.node_count(),
        "edge_count": f.edge_count(),
        "symbol_nodes": symbol_nodes,
        "intermediate_nodes": intermediate_nodes,
        "packed_nodes": packed_nodes,
    }


def sppf_to_json_text(f: SPPF) -> str:
    return json.dumps(sppf_to_json(f), indent=2, ensure_ascii=False)
