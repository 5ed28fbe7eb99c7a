"""Problem files, builtin cases and the ``ebcheck`` command."""
from .builtins import BUILTIN_CASES
from .main import main
from .parser import ProblemFile, format_problem, parse
from .runner import Overrides, run

__all__ = ["BUILTIN_CASES", "Overrides", "ProblemFile", "format_problem", "main", "parse", "run"]
