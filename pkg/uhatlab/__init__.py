from .config import ConfigLoader, Settings, get_settings, use_settings
from .errors import UhatLabError
from .core_ir import (
    DIAGRAM_CLASSES, Recognizer, classify_program, diagram_class, diagram_classes, execute,
    recognize, run_program, validate,
)
from .programs import library, lookup_oracle
from .transforms import PASSES, run_pass
from .analysis import (
    Restriction, Verdict, audit_sbar, check_equivalence, check_fixability, circuit_metrics, diagram_matrix,
    default_encoding, encode_binary, eval_circuit, search_unfixable,
)
from .logic import eval_fo, eval_ltl, ltl_recognize
from .program_parser import format_program, parse_program
from .formula_parser import format_formula, parse_fo, parse_ltl
from .netlist import load_netlist, parse_netlist
from .report import RunReport, classification_table, diagram_table, pass_table, program_tree, trace_table

__all__ = [
    'ConfigLoader', 'Settings', 'get_settings', 'use_settings', 'UhatLabError',
    'DIAGRAM_CLASSES', 'diagram_class', 'diagram_classes', 'diagram_matrix', 'diagram_table',
    'Recognizer', 'classify_program', 'execute', 'recognize', 'run_program', 'validate',
    'library', 'lookup_oracle', 'PASSES', 'run_pass',
    'Restriction', 'Verdict', 'audit_sbar', 'check_equivalence', 'check_fixability',
    'circuit_metrics', 'default_encoding', 'encode_binary', 'eval_circuit', 'search_unfixable',
    'eval_fo', 'eval_ltl', 'ltl_recognize', 'format_program', 'parse_program',
    'format_formula', 'parse_fo', 'parse_ltl', 'load_netlist', 'parse_netlist',
    'RunReport', 'classification_table', 'pass_table', 'program_tree', 'trace_table',
]
