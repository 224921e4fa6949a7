import pytest
import sys
from pathlib import Path

from rich.console import Console

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from uhatlab.core_ir import classify_program, execute, recognize, words_up_to
from uhatlab.programs import build_dyck1, build_palindrome_guhat, library
from uhatlab.report import (
    RunReport, classification_table, diagram_table, pass_table, program_tree, trace_table,
)
from uhatlab.transforms import run_pass


def _render(renderable) -> str:
    console = Console(record=True, width=200)
    console.print(renderable)
    return console.export_text()


def test_run_report_for_empty_word():
    """The empty word has no positions but still reports depth + 1 layers."""
    rec = build_palindrome_guhat().rec
    report = RunReport.from_run(rec, '')
    assert report.verdict is True
    assert report.layers == [[], [], []]
    assert report.as_dict()['verdict'] == 'accept'


def test_run_report_values_are_printable():
    report = RunReport.from_run(build_palindrome_guhat().rec, 'ab')
    data = report.as_dict()
    assert data['layers'][0] == ['(a, 0, 2)', '(b, 1, 2)']
    assert data['selections'] == {'1': [1, 0], '2': [1, 1]}
    assert data['verdict'] == 'reject'


def test_trace_table_shows_selections():
    text = _render(trace_table(RunReport.from_run(build_dyck1(1).rec, '()')))
    assert 'accept' in text
    assert '↳ j' in text
    assert '0:(' in text


def test_program_tree_escapes_layer_references():
    """L0[i] must appear literally rather than being read as markup."""
    text = _render(program_tree(build_palindrome_guhat().rec, 'palindrome'))
    assert 'L0[i]' in text
    assert 'attend rightmost' in text
    assert 'accept at last' in text


def test_tables_render():
    rec = build_palindrome_guhat().rec
    assert 'finite type' in _render(classification_table(classify_program(rec)))
    _, report = run_pass('separable-to-bilinear', rec, verify_len=4)
    text = _render(pass_table(report))
    assert 'preserved' in text
    assert 'L2 terms' in text


@pytest.mark.parametrize('fixture', library(), ids=lambda f: f.name)
def test_run_report_selections_match_execution(fixture):
    """The trace reports exactly the positions the interpreter attended to."""
    rec = fixture.rec
    for word in words_up_to(rec.alphabet, 4, min_len=1):
        report = RunReport.from_run(rec, word)
        run = execute(rec, word)
        assert report.selections == run.selections
        assert set(report.selections) == {idx for idx, _ in rec.attention_lines()}
        assert report.as_dict()['selections'] == {str(k): v for k, v in run.selections.items()}
        assert report.verdict == recognize(rec, word)


def test_diagram_table_marks_own_and_containing_classes():
    text = _render(diagram_table({'dyck1(2)': ('F-MGUHAT', 'MGUHAT')}))
    assert 'inclusion diagram' in text
    assert text.count('●') == 1
    assert text.count('✓') == 1
