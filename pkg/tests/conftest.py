import pytest

from ocfg.grammar import parse_grammar_text

A5 = "%start S\nS -> 'a' S 'a' | 'a' ;"
SS_B = "%start S\nS -> S S | 'b' ;"
SS_B_EPS = "%start S\nS -> S S | 'b' | ;"
BAA = "%start S\nS -> B A 'a' | 'b' A 'a' ;\nA -> 'a' ;\nB -> 'b' ;"
ARITH = (
    "%start S\n"
    "S -> S P S | S T S | 'x' | '(' S ')' | S '^' S ;\n"
    "P -> '+' | '-' ;\n"
    "T -> '*' | '/' ;\n"
)
ARITH_INLINED = "%start S\nS -> S '+' S | S '-' S | S '*' S | S '/' S | 'x' | '(' S ')' | S '^' S ;\n"


def grammar(text):
    return parse_grammar_text(text)


@pytest.fixture
def a5():
    return grammar(A5)


@pytest.fixture
def ssb():
    return grammar(SS_B)


@pytest.fixture
def ssb_eps():
    return grammar(SS_B_EPS)


@pytest.fixture
def baa():
    return grammar(BAA)


@pytest.fixture
def arith():
    return grammar(ARITH)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
