"""Least parse tree selection over a shared packed parse forest.

Every symbol or intermediate node gets a label: the rule-index sequence of
the least tree below it found so far, together with the packed choices that
realise it.  Labels are settled one strongly connected component at a time,
children first.  Inside a cyclic component the labels are relaxed in place
for at most as many rounds as the component has nodes, which is enough to
reach every tree without a repeated node on a path.

The label at the root is then a real tree ``X`` and, if a least tree exists,
it is ``X``.  On a cyclic forest we still have to rule out trees that use a
cycle and come out smaller than ``X``.  That is an emptiness question for the
forest viewed as a grammar intersected with the automaton of sequences that
are lexicographically below ``X``; when it is non-empty, the smaller tree is
boiled down to a node path whose repetition keeps decreasing the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from ._graph import is_cyclic_component
from .errors import InconsistentForestError, InternalError
from .grammar import Grammar, prefix_mode_transform
from .sppf import SPPF, IntermediateNode, PackedNode, SymbolNode, build_sppf, validate_sppf
from .trees import EPSILON, Outcome, ParseTree, rule_index_sequence, tree_yield


@dataclass(frozen=True, slots=True, eq=False)
class _Choice:
    """A forest node with one packed child picked at every level below it."""

    node: SymbolNode | IntermediateNode
    packed: PackedNode | None = None
    left: _Choice | None = None
    right: _Choice | None = None

    def seq(self) -> tuple[int, ...]:
        out: list[int] = []
        stack = [self]
        while stack:
            c = stack.pop()
            if c.packed is None:
                continue
            if c.packed.rule is not None:
                out.append(c.packed.rule.index)
            if c.right is not None:
                stack.append(c.right)
            stack.append(c.left)
        return tuple(out)


def _leaf_choice(v: SymbolNode) -> _Choice:
    return _Choice(v)


def _materialize(c: _Choice) -> ParseTree:
    def parts(c: _Choice) -> list[ParseTree]:
        v = c.node
        if c.packed is None:
            return [EPSILON if v.symbol is None else ParseTree(v.symbol.name)]
        kids = parts(c.left) + (parts(c.right) if c.right is not None else [])
        if c.packed.rule is None:
            return kids
        return [ParseTree(c.packed.rule.lhs, c.packed.rule.index, tuple(kids))]

    (tree,) = parts(c)
    return tree


class DerivationStep(NamedTuple):
    lhs: str
    index: int
    position: int


@dataclass(frozen=True)
class LeastTreeResult:
    outcome: Outcome
    tree: ParseTree | None = None
    witness: tuple[SymbolNode, ...] = ()
    matched_prefix: str | None = None
    comparisons: int = 0
    cycle_free_candidate: ParseTree | None = field(default=None, compare=False)

    @property
    def sequence(self) -> tuple[int, ...] | None:
        return None if self.tree is None else rule_index_sequence(self.tree)


class _Counter:
    __slots__ = ("steps",)

    def __init__(self):
        self.steps = 0

    def compare(self, a: tuple, b: tuple) -> int:
        n = min(len(a), len(b))
        for k in range(n):
            self.steps += 1
            if a[k] != b[k]:
                return -1 if a[k] < b[k] else 1
        self.steps += 1
        return (len(a) > len(b)) - (len(a) < len(b))


def _cycle_free_labels(f: SPPF, counter: _Counter):
    """Label every node with the least tree among those reachable by bounded relaxation."""
    label: dict = {}  # node -> (seq, _Choice)
    comps = f.components()

    def candidate(v, p: PackedNode):
        left = label.get(p.left)
        if left is None:
            return None
        if p.right is None:
            right = ((), None)
        else:
            right = label.get(p.right)
            if right is None:
                return None
        head = (p.rule.index,) if p.rule is not None else ()
        return head + left[0] + right[0], _Choice(v, p, left[1], right[1])

    def relax(v) -> bool:
        current = label.get(v)
        best = current
        for p in f.packed[v]:
            cand = candidate(v, p)
            if cand is None:
                continue
            if best is None:
                best = cand
                continue
            c = counter.compare(cand[0], best[0])
            if c < 0:
                best = cand
            elif c == 0 and best[1].packed is not p:
                raise InternalError(f"packed nodes {best[1].packed} and {p} yield the same rule sequence")
        if best is not current:
            label[v] = best
            return True
        return False

    for comp in comps:
        if len(comp) == 1 and isinstance(comp[0], SymbolNode) and not f.packed[comp[0]]:
            label[comp[0]] = ((), _leaf_choice(comp[0]))
            continue
        if not is_cyclic_component(comp, f.children):
            relax(comp[0])
            continue
        for _ in range(len(comp)):
            changed = False
            for v in comp:
                changed |= relax(v)
            if not changed:
                break
    return label, comps


# -------------------------------------------------- trees below the candidate

_LT = -1  # absorbing state: the sequence read so far is already below the target


def _smaller_tree(f: SPPF, target: tuple[int, ...], label: dict, comps) -> _Choice | None:
    """A tree of the forest whose sequence is lexicographically below ``target``, if any.

    States 0..L track how much of ``target`` has been matched exactly; a
    larger index, or any index after all of ``target``, kills the run.  For
    each node we collect the state pairs (p, q) some tree of that node
    connects, remembering the first way each pair was found so the tree can
    be rebuilt without going round in circles.
    """
    L = len(target)

    def step(q: int, idx: int) -> int | None:
        if q == _LT:
            return _LT
        if q == L:
            return None
        if idx < target[q]:
            return _LT
        if idx == target[q]:
            return q + 1
        return None

    reach: dict = {v: {} for v in f.packed}  # node -> {(p, q): justification}
    for v, kids in f.packed.items():
        if not kids:
            reach[v] = {(q, q): None for q in range(L + 1)}

    def extend(v) -> bool:
        facts = reach[v]
        grew = False
        for p in f.packed[v]:
            left, right = reach[p.left], (reach[p.right] if p.right is not None else None)
            for q0 in range(L + 1):
                q1 = step(q0, p.rule.index) if p.rule is not None else q0
                if q1 is None:
                    continue
                if q1 == _LT:
                    if (q0, _LT) not in facts:
                        facts[(q0, _LT)] = (p, _LT, _LT)
                        grew = True
                    continue
                for (a, r) in list(left):
                    if a != q1:
                        continue
                    if r == _LT:
                        outs = [_LT]
                    elif right is None:
                        outs = [r]
                    else:
                        outs = [b for (s, b) in right if s == r]
                    for q in outs:
                        if (q0, q) not in facts:
                            facts[(q0, q)] = (p, q1, r)
                            grew = True
        return grew

    for comp in comps:
        if all(not f.packed[v] for v in comp):
            continue
        if not is_cyclic_component(comp, f.children):
            extend(comp[0])
            continue
        changed = True
        while changed:
            changed = False
            for v in comp:
                changed |= extend(v)

    root_facts = reach[f.root]
    goal = None
    for (p, q) in root_facts:
        if p == 0 and (q == _LT or q < L):
            goal = q
            break
    if goal is None:
        return None

    def build(v, q0: int, q: int) -> _Choice:
        if q0 == _LT:
            return label[v][1]
        if not f.packed[v]:
            return label[v][1]
        p, q1, r = reach[v][(q0, q)]
        if q1 == _LT:
            left = label[p.left][1]
            right = label[p.right][1] if p.right is not None else None
        else:
            left = build(p.left, q1, r)
            right = build(p.right, r, q) if p.right is not None else None
        return _Choice(v, p, left, right)

    return build(f.root, 0, goal)


def _find_repeat(c: _Choice):
    """Locate a symbol node repeated on a root-to-leaf path.

    Returns the position of the outer occurrence, the position of the inner
    one (both as tuples of 0/1 child moves from the root) and the symbol nodes
    on the way from the outer occurrence down to the inner one.
    """
    stack = [(c, (), ())]
    while stack:
        cur, moves, path = stack.pop()
        if cur.packed is None:
            continue
        if isinstance(cur.node, SymbolNode):
            for k, (anc, anc_moves) in enumerate(path):
                if anc.node == cur.node:
                    between = tuple(a.node for a, _ in path[k:] if isinstance(a.node, SymbolNode))
                    return anc_moves, moves, between + (cur.node,)
        path = path + ((cur, moves),)
        if cur.right is not None:
            stack.append((cur.right, moves + (1,), path))
        stack.append((cur.left, moves + (0,), path))
    return None


def _at(c: _Choice, moves) -> _Choice:
    for m in moves:
        c = c.right if m else c.left
    return c


def _put(c: _Choice, moves, new: _Choice) -> _Choice:
    if not moves:
        return new
    if moves[0]:
        return _Choice(c.node, c.packed, c.left, _put(c.right, moves[1:], new))
    return _Choice(c.node, c.packed, _put(c.left, moves[1:], new), c.right)


def _decreasing_witness(smaller: _Choice, counter: _Counter):
    """Shrink a tree that uses a cycle until repeating the cycle is what decreases it."""
    cur = smaller
    while True:
        found = _find_repeat(cur)
        if found is None:
            raise InternalError("tree below the cycle-free minimum has no repeated node")
        outer, inner, path = found
        cut = _put(cur, outer, _at(cur, inner))
        if counter.compare(cut.seq(), cur.seq()) < 0:
            cur = cut
            continue
        pumped = _put(cur, inner, _at(cur, outer))
        if counter.compare(pumped.seq(), cur.seq()) >= 0:
            raise InternalError("neither removing nor repeating the cycle decreases the tree")
        return path, cur


def select_least_tree(f: SPPF, g: Grammar | None = None) -> LeastTreeResult:
    if g is not None and g != f.grammar:
        raise InconsistentForestError("forest was built from a different grammar")
    if f.root is None:
        return LeastTreeResult(Outcome.NO_PARSE)
    problems = validate_sppf(f)
    if problems:
        raise InconsistentForestError("; ".join(problems[:5]))

    counter = _Counter()
    label, comps = _cycle_free_labels(f, counter)
    seq, best = label[f.root]
    cyclic = any(is_cyclic_component(c, f.children) for c in comps)
    if cyclic:
        smaller = _smaller_tree(f, seq, label, comps)
        if smaller is not None:
            witness, _ = _decreasing_witness(smaller, counter)
            return LeastTreeResult(
                Outcome.NO_LEAST_TREE,
                witness=witness,
                comparisons=counter.steps,
                cycle_free_candidate=_materialize(best),
            )
    return LeastTreeResult(Outcome.LEAST_TREE, _materialize(best), comparisons=counter.steps)


# ------------------------------------------------------------ derivations


def derivation_from_tree(t: ParseTree) -> list[DerivationStep]:
    """Leftmost derivation of ``t``; ``position`` is the offset of the rewritten
    nonterminal in the sentential form at that step."""
    steps = []
    form: list[ParseTree] = [t]
    while True:
        pos = next((k for k, s in enumerate(form) if not s.is_leaf), None)
        if pos is None:
            return steps
        s = form[pos]
        steps.append(DerivationStep(s.symbol, s.index, pos))
        kids = [c for c in s.children if not c.is_epsilon]
        form[pos : pos + 1] = kids


def _forms(t: ParseTree) -> list[tuple[list[str], int | None]]:
    form: list[ParseTree] = [t]
    out = []
    while True:
        pos = next((k for k, s in enumerate(form) if not s.is_leaf), None)
        out.append(([s.symbol for s in form], pos))
        if pos is None:
            return out
        form[pos : pos + 1] = [c for c in form[pos].children if not c.is_epsilon]


def format_derivation(t: ParseTree, annotate: bool = False) -> str:
    """``S => a S a => aaa``.  With ``annotate`` every form goes on its own
    line with a caret under the nonterminal rewritten next."""
    forms = _forms(t)
    rendered = []
    for k, (symbols, pos) in enumerate(forms):
        last = k == len(forms) - 1
        if last:
            text = "".join(symbols) or "ε"
        else:
            text = " ".join(symbols)
        rendered.append((text, symbols, pos))
    if not annotate:
        return " => ".join(text for text, _, _ in rendered)
    lines = []
    for k, (text, symbols, pos) in enumerate(rendered):
        prefix = "   " if k == 0 else "=> "
        lines.append(prefix + text)
        if pos is not None:
            offset = sum(len(s) + 1 for s in symbols[:pos])
            lines.append(" " * (3 + offset) + "^" * len(symbols[pos]))
    return "\n".join(lines)


def parse_least(g: Grammar, w: str, mode: str = "full") -> LeastTreeResult:
    if mode == "full":
        return select_least_tree(build_sppf(g, w), g)
    if mode != "prefix":
        raise ValueError(f"mode must be 'full' or 'prefix', not {mode!r}")
    wrapped = prefix_mode_transform(g)
    result = select_least_tree(build_sppf(wrapped, w), wrapped)
    if result.outcome is not Outcome.LEAST_TREE:
        return result
    inner = result.tree.children[0]
    return LeastTreeResult(
        Outcome.LEAST_TREE,
        result.tree,
        matched_prefix=tree_yield(inner),
        comparisons=result.comparisons,
    )
