"""Exception hierarchy shared by the toolkit."""


class OcfgError(Exception):
    """Base class for every error raised by this package."""


class GrammarError(OcfgError, ValueError):
    """A grammar is malformed or violates a structural invariant."""


class GrammarSyntaxError(GrammarError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateProductionError(GrammarError):
    """A nonterminal's rules were split across more than one production."""


class UndeclaredSymbolError(GrammarError):
    """The start symbol or a right-hand-side nonterminal has no production."""


class InputAlphabetError(OcfgError, ValueError):
    """The input string contains characters outside the terminal alphabet."""


class ResourceLimitError(OcfgError):
    """A brute-force enumeration exceeded its configured cap."""


class CycleError(OcfgError):
    """Unbounded enumeration was requested over a cyclic forest."""


class InconsistentForestError(OcfgError):
    """A forest violates the node conditions it is supposed to satisfy."""


class LeftRecursionError(OcfgError):
    """A grammar cannot be run as a PEG because it is left recursive."""

    def __init__(self, nonterminals):
        self.nonterminals = tuple(sorted(nonterminals))
        super().__init__("left-recursive nonterminals: " + ", ".join(self.nonterminals))


class InternalError(OcfgError, RuntimeError):
    """An invariant that should be impossible to violate was violated."""
