"""Reductions from ATLsc and Strategy Logic to QCTL*, with checkers and bounded search."""
from .formulas import FormulaError, parse, parse_document, to_text
from .games import Cgs, FiniteMemoryStrategy, Kripke, StrategyContext, load_cgs
from .verdict import Value, Verdict

__all__ = [
    "Cgs", "FiniteMemoryStrategy", "FormulaError", "Kripke", "StrategyContext", "Value", "Verdict",
    "load_cgs", "parse", "parse_document", "to_text",
]
__version__ = "0.1.0"
