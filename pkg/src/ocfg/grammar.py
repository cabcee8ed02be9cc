"""Grammars: representation, text format, static analyses and the prefix wrapper.

The same grammar object serves both readings used in this package.  Read
as an ordered context-free grammar, the position of a rule inside its
production ranks parse trees; read as a PEG, the same order is the
prioritized choice.

Grammar files look like::

    # comments run to end of line
    %start S
    S -> 'a' S 'a' | 'a' ;
    E -> ;                      # an empty alternative is the epsilon rule

``/`` is accepted everywhere ``|`` is.
"""

from __future__ import annotations

import re
import warnings
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from ._graph import strongly_connected_components
from .errors import (
    DuplicateProductionError,
    GrammarError,
    GrammarSyntaxError,
    UndeclaredSymbolError,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class Symbol:
    name: str
    terminal: bool = False

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"T({self.name!r})" if self.terminal else f"N({self.name!r})"


def T(char: str) -> Symbol:
    return Symbol(char, True)


def N(name: str) -> Symbol:
    return Symbol(name, False)


@dataclass(frozen=True, slots=True)
class Rule:
    lhs: str
    rhs: tuple[Symbol, ...]
    index: int

    @property
    def id(self) -> tuple[str, int]:
        return (self.lhs, self.index)

    @property
    def is_epsilon(self) -> bool:
        return not self.rhs

    def nonterminals(self):
        return [s.name for s in self.rhs if not s.terminal]

    def __str__(self):
        body = " ".join(s.name for s in self.rhs) if self.rhs else "ε"
        return f"{self.lhs} -> {body}"


def _quote(char: str) -> str:
    if char in "'\\":
        return "'\\" + char + "'"
    return "'" + char + "'"


@dataclass(frozen=True)
class Grammar:
    """G = (N, Σ, P, S) with ordered productions.

    ``productions`` maps every nonterminal, in declaration order, to its
    rules r_1..r_n.  ``terminals`` may list characters that no rule uses;
    characters used in rules are always included.
    """

    start: str
    productions: Mapping[str, tuple[Rule, ...]]
    terminals: tuple[str, ...] = field(default=())

    def __post_init__(self):
        used = []
        for name, rules in self.productions.items():
            if not _IDENT.match(name):
                raise GrammarError(f"invalid nonterminal name {name!r}")
            if not rules:
                raise GrammarError(f"production for {name} has no rules")
            for pos, rule in enumerate(rules, 1):
                if rule.lhs != name or rule.index != pos:
                    raise GrammarError(f"rule {rule} is misplaced in production {name}")
                for sym in rule.rhs:
                    if sym.terminal:
                        if len(sym.name) != 1:
                            raise GrammarError(f"terminal {sym.name!r} is not a single character")
                        if sym.name not in used:
                            used.append(sym.name)
                    elif sym.name not in self.productions:
                        raise UndeclaredSymbolError(f"nonterminal {sym.name} used in '{rule}' has no production")
        if self.start not in self.productions:
            raise UndeclaredSymbolError(f"start symbol {self.start} has no production")
        terminals = list(self.terminals)
        for t in terminals:
            if len(t) != 1:
                raise GrammarError(f"terminal {t!r} is not a single character")
        terminals += [t for t in used if t not in terminals]
        clash = set(terminals) & set(self.productions)
        if clash:
            raise GrammarError(f"names used both as terminal and nonterminal: {sorted(clash)}")
        object.__setattr__(self, "terminals", tuple(terminals))
        object.__setattr__(self, "productions", dict(self.productions))

    __hash__ = None  # productions is a dict

    @classmethod
    def build(cls, start: str, productions: Mapping[str, Iterable[Sequence[Symbol]]], terminals=()):
        """Build a grammar from ``{lhs: [rhs, ...]}`` with Symbol sequences."""
        prods = {}
        for lhs, alternatives in productions.items():
            prods[lhs] = tuple(Rule(lhs, tuple(rhs), i) for i, rhs in enumerate(alternatives, 1))
        return cls(start, prods, tuple(terminals))

    @property
    def nonterminals(self) -> tuple[str, ...]:
        return tuple(self.productions)

    @property
    def rules(self) -> list[Rule]:
        return [r for rules in self.productions.values() for r in rules]

    def rule(self, lhs: str, index: int) -> Rule:
        return self.productions[lhs][index - 1]

    def size(self) -> int:
        """p: the summed length of all right-hand sides."""
        return sum(len(r.rhs) for r in self.rules)

    @cached_property
    def analysis(self) -> GrammarAnalysis:
        return analyze(self)

    def __str__(self):
        return format_grammar(self)


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<directive>%[A-Za-z_]+)
  | (?P<arrow>->)
  | (?P<bar>[|/])
  | (?P<semi>;)
  | (?P<char>'(?:\\.|[^\\'\n])')
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


def _tokenize(text):
    line, line_start, pos = 1, 0, 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            if text[pos] == "'":
                raise GrammarSyntaxError("bad character literal (terminals are single characters)", line, col)
            raise GrammarSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            value = m.group()
            if kind == "char":
                value = value[2] if value[1] == "\\" else value[1]
            tokens.append((kind, value, line, col))
        pos = m.end()
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


def parse_grammar_text(text: str) -> Grammar:
    """Read the grammar file format; rule order is kept exactly as written."""
    tokens = _tokenize(text)
    pos = 0

    def expect(kind):
        nonlocal pos
        tok = tokens[pos]
        if tok[0] != kind:
            shown = tok[1] or tok[0]
            raise GrammarSyntaxError(f"expected {kind}, found {shown!r}", tok[2], tok[3])
        pos += 1
        return tok

    tok = tokens[0]
    if tok[0] != "directive" or tok[1] != "%start":
        raise GrammarSyntaxError("the first line must be a '%start' directive", tok[2], tok[3])
    pos = 1
    start = expect("ident")[1]

    productions: dict[str, list[list[Symbol]]] = {}
    seen_at = {}
    while tokens[pos][0] != "eof":
        lhs_tok = expect("ident")
        lhs = lhs_tok[1]
        expect("arrow")
        if lhs in productions:
            raise DuplicateProductionError(
                f"line {lhs_tok[2]}: second production for {lhs} "
                f"(first at line {seen_at[lhs]}); a nonterminal's rules must form one production"
            )
        seen_at[lhs] = lhs_tok[2]
        alternatives: list[list[Symbol]] = [[]]
        while True:
            kind, value, line, col = tokens[pos]
            if kind == "semi":
                pos += 1
                break
            if kind == "eof":
                break
            if kind == "ident" and tokens[pos + 1][0] == "arrow":
                break  # next production begins; the ';' was left out
            if kind == "bar":
                alternatives.append([])
            elif kind == "char":
                alternatives[-1].append(T(value))
            elif kind == "ident":
                alternatives[-1].append(N(value))
            else:
                raise GrammarSyntaxError(f"unexpected {value!r} in alternative", line, col)
            pos += 1
        productions[lhs] = alternatives

    if start not in productions:
        raise UndeclaredSymbolError(f"start symbol {start} has no production")
    return Grammar.build(start, productions)


def format_grammar(g: Grammar) -> str:
    """Canonical text form; parse_grammar_text inverts it."""
    lines = [f"%start {g.start}"]
    for lhs, rules in g.productions.items():
        alts = [" ".join(_quote(s.name) if s.terminal else s.name for s in r.rhs) for r in rules]
        body = " | ".join(alts)
        lines.append(f"{lhs} -> {body} ;" if body.strip() else f"{lhs} -> ;")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------- analyses


@dataclass(frozen=True)
class GrammarAnalysis:
    useful: frozenset[str]
    nullable: frozenset[str]
    cyclic_rules: frozenset[tuple[str, int]]
    is_cyclic: bool
    has_unit_cycle: bool
    well_ordered: bool

    def offending_rules(self, g: Grammar) -> list[Rule]:
        """Cyclic rules that are not last among the usable rules of their production."""
        last = _last_active_index(g, _active_rules(g, self.useful))
        return sorted(
            (g.rule(*rid) for rid in self.cyclic_rules if rid[1] != last[rid[0]]),
            key=lambda r: (g.nonterminals.index(r.lhs), r.index),
        )


def _productive(rules: Sequence[Rule]) -> set[str]:
    remaining = []
    waiting: dict[str, list[int]] = {}
    queue = deque()
    done: set[str] = set()
    for k, rule in enumerate(rules):
        nts = rule.nonterminals()
        remaining.append(len(nts))
        for name in nts:
            waiting.setdefault(name, []).append(k)
        if not nts:
            queue.append(rule.lhs)
    while queue:
        name = queue.popleft()
        if name in done:
            continue
        done.add(name)
        for k in waiting.get(name, ()):
            remaining[k] -= 1
            if remaining[k] == 0:
                queue.append(rules[k].lhs)
    return done


def _nullable(rules: Sequence[Rule]) -> set[str]:
    remaining = []
    waiting: dict[str, list[int]] = {}
    queue = deque()
    done: set[str] = set()
    for k, rule in enumerate(rules):
        if any(s.terminal for s in rule.rhs):
            remaining.append(-1)
            continue
        remaining.append(len(rule.rhs))
        for s in rule.rhs:
            waiting.setdefault(s.name, []).append(k)
        if not rule.rhs:
            queue.append(rule.lhs)
    while queue:
        name = queue.popleft()
        if name in done:
            continue
        done.add(name)
        for k in waiting.get(name, ()):
            remaining[k] -= 1
            if remaining[k] == 0:
                queue.append(rules[k].lhs)
    return done


def _useful(g: Grammar) -> set[str]:
    productive = _productive(g.rules)
    if g.start not in productive:
        return set()
    reached = {g.start}
    queue = deque([g.start])
    while queue:
        name = queue.popleft()
        for rule in g.productions[name]:
            nts = rule.nonterminals()
            if all(n in productive for n in nts):
                for n in nts:
                    if n not in reached:
                        reached.add(n)
                        queue.append(n)
    return reached


def _active_rules(g: Grammar, keep) -> list[Rule]:
    return [r for r in g.rules if r.lhs in keep and all(n in keep for n in r.nonterminals())]


def _last_active_index(g: Grammar, rules: Sequence[Rule]) -> dict[str, int]:
    last: dict[str, int] = {}
    for r in rules:
        last[r.lhs] = max(last.get(r.lhs, 0), r.index)
    return last


def _nullable_context_edges(rule: Rule, nullable) -> list[str]:
    """Nonterminals B with rule = A -> r' B r'' and r', r'' both nullable."""
    blockers = [k for k, s in enumerate(rule.rhs) if s.terminal or s.name not in nullable]
    if not blockers:
        return [s.name for s in rule.rhs]
    if len(blockers) == 1 and not rule.rhs[blockers[0]].terminal:
        return [rule.rhs[blockers[0]].name]
    return []


def _cyclic_rules(rules: Sequence[Rule], nullable) -> set[tuple[str, int]]:
    edges: dict[str, list[tuple[str, Rule]]] = {}
    vertices: dict[str, None] = {}
    for rule in rules:
        vertices.setdefault(rule.lhs)
        for b in _nullable_context_edges(rule, nullable):
            edges.setdefault(rule.lhs, []).append((b, rule))
            vertices.setdefault(b)

    def succ(a):
        return [b for b, _ in edges.get(a, ())]

    comp_of = {}
    sizes = {}
    for cid, comp in enumerate(strongly_connected_components(vertices, succ)):
        sizes[cid] = len(comp)
        for v in comp:
            comp_of[v] = cid
    cyclic = set()
    for a, out in edges.items():
        for b, rule in out:
            if comp_of[a] == comp_of[b] and (sizes[comp_of[a]] > 1 or a == b):
                cyclic.add(rule.id)
    return cyclic


def _has_unit_cycle(rules: Sequence[Rule]) -> bool:
    edges: dict[str, list[str]] = {}
    for r in rules:
        if len(r.rhs) == 1 and not r.rhs[0].terminal:
            edges.setdefault(r.lhs, []).append(r.rhs[0].name)
    for comp in strongly_connected_components(list(edges), lambda a: edges.get(a, ())):
        if len(comp) > 1 or comp[0] in edges.get(comp[0], ()):
            return True
    return False


def useful_nonterminals(g: Grammar) -> set[str]:
    """Nonterminals reachable from the start symbol that also derive a terminal string."""
    return _useful(g)


def nullable_nonterminals(g: Grammar) -> set[str]:
    return _nullable(g.rules)


def cyclic_rules(g: Grammar, useful_only: bool = False) -> set[tuple[str, int]]:
    """Rule ids (lhs, index) of rules A -> r with A => r =>* A."""
    rules = _active_rules(g, _useful(g)) if useful_only else g.rules
    return _cyclic_rules(rules, _nullable(rules))


def analyze(g: Grammar) -> GrammarAnalysis:
    useful = _useful(g)
    rules = _active_rules(g, useful)
    nullable = _nullable(rules)
    cyclic = _cyclic_rules(rules, nullable)
    last = _last_active_index(g, rules)
    return GrammarAnalysis(
        useful=frozenset(useful),
        nullable=frozenset(nullable),
        cyclic_rules=frozenset(cyclic),
        is_cyclic=bool(cyclic),
        has_unit_cycle=_has_unit_cycle(rules),
        well_ordered=all(index == last[lhs] for lhs, index in cyclic),
    )


def is_well_ordered(g: Grammar) -> bool:
    """Decide well-orderedness: after dropping useless nonterminals, every
    cyclic rule must be the last rule of its production."""
    return analyze(g).well_ordered


def is_cyclic(g: Grammar) -> bool:
    return analyze(g).is_cyclic


# ------------------------------------------------------------- prefix wrapper


def _fresh(base: str, taken) -> str:
    name, k = base, 1
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def _looks_prefix_wrapped(g: Grammar) -> bool:
    rules = g.productions[g.start]
    if len(rules) != 1 or len(rules[0].rhs) != 2 or any(s.terminal for s in rules[0].rhs):
        return False
    tail = rules[0].rhs[1].name
    tail_rules = g.productions[tail]
    if not tail_rules[-1].is_epsilon:
        return False
    return all(len(r.rhs) == 2 and r.rhs[0].terminal and r.rhs[1].name == tail for r in tail_rules[:-1])


def prefix_mode_transform(g: Grammar) -> Grammar:
    """Wrap g so that parsing a whole input in full mode accepts any derivable prefix.

    Adds ``S' -> S Rest`` as the new start and ``Rest -> 'x' Rest | ... | ;``
    over the terminal alphabet, with the empty alternative last.
    """
    if _looks_prefix_wrapped(g):
        warnings.warn("grammar already looks prefix-wrapped; nesting another wrapper", stacklevel=2)
    taken = set(g.productions) | set(g.terminals)
    new_start = _fresh(f"{g.start}_prefix", taken)
    taken.add(new_start)
    rest = _fresh("Rest", taken)
    prods = {lhs: [r.rhs for r in rules] for lhs, rules in g.productions.items()}
    prods[new_start] = [(N(g.start), N(rest))]
    prods[rest] = [(T(c), N(rest)) for c in g.terminals] + [()]
    return Grammar.build(new_start, prods, g.terminals)
