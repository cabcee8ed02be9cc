"""Ordered context-free grammars: least parse trees, parse forests and PEG comparison."""

from .errors import (
    CycleError,
    GrammarError,
    GrammarSyntaxError,
    InconsistentForestError,
    InputAlphabetError,
    InternalError,
    LeftRecursionError,
    OcfgError,
    ResourceLimitError,
)
from .grammar import (
    Grammar,
    GrammarAnalysis,
    Rule,
    Symbol,
    analyze,
    cyclic_rules,
    format_grammar,
    is_cyclic,
    is_well_ordered,
    nullable_nonterminals,
    parse_grammar_text,
    prefix_mode_transform,
    useful_nonterminals,
)
from .least import LeastTreeResult, derivation_from_tree, format_derivation, parse_least, select_least_tree
from .peg import (
    PegMatcher,
    PegOutcome,
    compare_peg_ocfg,
    detect_left_recursion,
    peg_full_match,
    peg_match,
    peg_parse_tree,
)
from .sppf import SPPF, build_sppf, extract_trees, sppf_has_cycle, sppf_to_dot, sppf_to_json, validate_sppf
from .trees import (
    Outcome,
    ParseTree,
    compare_trees,
    dumps_tree,
    enumerate_parse_trees,
    height_bound,
    least_tree_oracle,
    loads_tree,
    rule_index_sequence,
    tree_yield,
    validate_parse_tree,
)

__version__ = "0.1.0"

__all__ = [
    "CycleError",
    "Grammar",
    "GrammarAnalysis",
    "GrammarError",
    "GrammarSyntaxError",
    "InconsistentForestError",
    "InputAlphabetError",
    "InternalError",
    "LeastTreeResult",
    "LeftRecursionError",
    "OcfgError",
    "Outcome",
    "ParseTree",
    "PegMatcher",
    "PegOutcome",
    "ResourceLimitError",
    "Rule",
    "SPPF",
    "Symbol",
    "analyze",
    "build_sppf",
    "compare_peg_ocfg",
    "compare_trees",
    "cyclic_rules",
    "derivation_from_tree",
    "detect_left_recursion",
    "dumps_tree",
    "enumerate_parse_trees",
    "extract_trees",
    "format_derivation",
    "format_grammar",
    "height_bound",
    "is_cyclic",
    "is_well_ordered",
    "least_tree_oracle",
    "loads_tree",
    "nullable_nonterminals",
    "parse_grammar_text",
    "parse_least",
    "peg_full_match",
    "peg_match",
    "peg_parse_tree",
    "prefix_mode_transform",
    "rule_index_sequence",
    "select_least_tree",
    "sppf_has_cycle",
    "sppf_to_dot",
    "sppf_to_json",
    "tree_yield",
    "useful_nonterminals",
    "validate_parse_tree",
    "validate_sppf",
]
