"""PEG reading of a grammar: ordered choice, greedy and deterministic.

Each production ``A -> e1 / ... / en`` is a prioritised choice between plain
sequences.  Matching ``A`` at a position tries the alternatives in order and
commits to the first sequence that succeeds; results are memoised per
(nonterminal, position), so matching is linear in the input for a fixed
grammar.  Left-recursive grammars are rejected before matching starts.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._graph import is_cyclic_component, strongly_connected_components
from .errors import InputAlphabetError, InternalError, LeftRecursionError
from .grammar import Grammar, nullable_nonterminals
from .least import parse_least
from .trees import EPSILON, ParseTree

_IN_PROGRESS = object()
FAIL = None


def detect_left_recursion(g: Grammar) -> set[str]:
    """Nonterminals that may call themselves without consuming input.

    Nullability is taken from the context-free reading, which can only
    over-approximate what the PEG actually lets through.
    """
    nullable = nullable_nonterminals(g)
    edges: dict[str, set[str]] = {a: set() for a in g.nonterminals}
    for rule in g.rules:
        for s in rule.rhs:
            if s.terminal:
                break
            edges[rule.lhs].add(s.name)
            if s.name not in nullable:
                break
    succ = lambda a: edges[a]  # noqa: E731
    out: set[str] = set()
    for comp in strongly_connected_components(g.nonterminals, succ):
        if is_cyclic_component(comp, succ):
            out.update(comp)
    return out


@dataclass(frozen=True)
class PegOutcome:
    matched: str | None  # None means failure

    @property
    def ok(self) -> bool:
        return self.matched is not None

    def __str__(self):
        return "FAIL" if self.matched is None else (self.matched or "ε")


class PegMatcher:
    """One matching run; ``memo`` maps (A, pos) to (end, alternative) or FAIL."""

    def __init__(self, g: Grammar, w: str):
        bad = sorted(set(w) - set(g.terminals))
        if bad:
            raise InputAlphabetError(f"characters {bad} are not terminals of the grammar")
        rec = detect_left_recursion(g)
        if rec:
            raise LeftRecursionError(rec)
        self.grammar = g
        self.input = w
        self.memo: dict[tuple[str, int], object] = {}

    def match_at(self, start: str, pos: int):
        """(end, alternative) for ``start`` at ``pos``, or FAIL."""
        g, w, memo = self.grammar, self.input, self.memo
        if (start, pos) in memo:
            return self._final(start, pos)
        # frame: [A, origin, alternative, symbol offset, cursor]
        stack = [[start, pos, 0, 0, pos]]
        memo[(start, pos)] = _IN_PROGRESS
        result = FAIL
        while stack:
            frame = stack[-1]
            a, origin, alt, k, cur = frame
            rules = g.productions[a]
            if alt == len(rules):
                memo[(a, origin)] = FAIL
                stack.pop()
                result = FAIL
                self._resume(stack, result)
                continue
            rhs = rules[alt].rhs
            if k == len(rhs):
                memo[(a, origin)] = (cur, alt + 1)
                stack.pop()
                result = (cur, alt + 1)
                self._resume(stack, result)
                continue
            sym = rhs[k]
            if sym.terminal:
                if cur < len(w) and w[cur] == sym.name:
                    frame[3], frame[4] = k + 1, cur + 1
                else:
                    frame[2], frame[3], frame[4] = alt + 1, 0, origin
                continue
            key = (sym.name, cur)
            if key in memo:
                self._resume(stack, self._final(sym.name, cur))
                continue
            memo[key] = _IN_PROGRESS
            stack.append([sym.name, cur, 0, 0, cur])
        return result

    def _final(self, a, pos):
        value = self.memo[(a, pos)]
        if value is _IN_PROGRESS:
            raise InternalError(f"{a} re-entered at position {pos}; left recursion slipped past the screen")
        return value

    @staticmethod
    def _resume(stack, result):
        if not stack:
            return
        frame = stack[-1]
        if result is FAIL:
            frame[2], frame[3], frame[4] = frame[2] + 1, 0, frame[1]
        else:
            frame[3], frame[4] = frame[3] + 1, result[0]

    def match(self) -> PegOutcome:
        res = self.match_at(self.grammar.start, 0)
        return PegOutcome(None if res is FAIL else self.input[: res[0]])

    def tree(self, a: str | None = None, pos: int = 0) -> ParseTree | None:
        """Rebuild the parse tree of a successful match from the memo table."""
        a = a or self.grammar.start
        res = self.match_at(a, pos)
        if res is FAIL:
            return None

        def build(a, pos):
            end, alt = self.memo[(a, pos)]
            kids = []
            cur = pos
            for s in self.grammar.productions[a][alt - 1].rhs:
                if s.terminal:
                    kids.append(ParseTree(s.name))
                    cur += 1
                else:
                    kids.append(build(s.name, cur))
                    cur = self.memo[(s.name, cur)][0]
            assert cur == end
            return ParseTree(a, alt, tuple(kids) or (EPSILON,))

        return build(a, pos)


def peg_match(g: Grammar, w: str) -> PegOutcome:
    return PegMatcher(g, w).match()


def peg_full_match(g: Grammar, w: str) -> bool:
    return peg_match(g, w).matched == w


def peg_parse_tree(g: Grammar, w: str) -> ParseTree | None:
    """Tree for the prefix the PEG matches, None when matching fails."""
    return PegMatcher(g, w).tree()


@dataclass(frozen=True)
class ComparisonReport:
    peg_full: bool
    ocfg_full: bool
    peg_tree: ParseTree | None
    ocfg_least_tree: ParseTree | None
    trees_equal: bool
    peg_matched: str | None = None
    ocfg_outcome: str = ""

    @property
    def agree(self) -> bool:
        if self.peg_full != self.ocfg_full:
            return False
        return not self.peg_full or self.trees_equal


def compare_peg_ocfg(g: Grammar, w: str) -> ComparisonReport:
    m = PegMatcher(g, w)
    outcome = m.match()
    peg_tree = m.tree() if outcome.ok else None
    least = parse_least(g, w)
    ocfg_full = least.outcome.value != "no-parse"
    peg_full = outcome.matched == w
    shown_peg = peg_tree if peg_full else None
    return ComparisonReport(
        peg_full=peg_full,
        ocfg_full=ocfg_full,
        peg_tree=peg_tree,
        ocfg_least_tree=least.tree,
        trees_equal=shown_peg is not None and shown_peg == least.tree,
        peg_matched=outcome.matched,
        ocfg_outcome=least.outcome.value,
    )

