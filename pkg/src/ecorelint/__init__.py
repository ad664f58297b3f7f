"""Quality linting, diffing and export for Ecore metamodels."""
from .diagnostics import Diagnostic, DiagnosticReport
from .metamodel import EcoreModel, ElementPath
from .rules import RuleConfig, run_rules
from .xmi import load_model, parse_xmi, serialize_xmi

__version__ = "0.1.0"

__all__ = [
    "Diagnostic", "DiagnosticReport", "EcoreModel", "ElementPath", "RuleConfig",
    "load_model", "parse_xmi", "run_rules", "serialize_xmi",
]
