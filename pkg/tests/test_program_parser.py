import pytest
import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from uhatlab.analysis import check_equivalence
from uhatlab.core_ir import (
    Add, IfThenElse, Lt, Masking, Mul, Neg, Not, PosI, PosJ, RatLit, ReadPos, Side, Sub,
    TieBreak, Var,
)
from uhatlab.errors import DslSyntaxError, StaticCheckError
from uhatlab.program_parser import format_expr, format_program, parse_expression, parse_program
from uhatlab.programs import (
    build_contains_a_past, build_dyck1, build_palindrome_guhat, build_palindrome_masked,
    build_palindrome_separable, library,
)
from uhatlab.transforms import run_pass

FIXTURES = Path(__file__).parent.parent / 'fixtures'
PROGRAM_FILES = sorted(FIXTURES.glob('*.urasp'))


@pytest.mark.parametrize('path', PROGRAM_FILES, ids=lambda p: p.name)
def test_fixture_round_trip(path):
    """Printing a parsed fixture and parsing it again gives the same program."""
    rec = parse_program(path.read_text(encoding='utf-8'))
    assert parse_program(format_program(rec)) == rec


@pytest.mark.parametrize('fixture', library(), ids=lambda f: f.name)
def test_library_round_trip(fixture):
    assert parse_program(format_program(fixture.rec)) == fixture.rec


def test_transformed_programs_round_trip():
    """Bilinear scores, -inf and fractional constants all survive printing."""
    for name, rec in [
        ('separable-to-bilinear', build_palindrome_guhat().rec),
        ('eliminate-mask', build_palindrome_masked().rec),
        ('eliminate-ties', build_palindrome_guhat().rec),
    ]:
        after, _ = run_pass(name, rec, verify_len=4)
        assert parse_program(format_program(after)) == after, name


@pytest.mark.parametrize('filename, builder', [
    ('palindrome.urasp', build_palindrome_guhat),
    ('palindrome_masked.urasp', build_palindrome_masked),
    ('palindrome_separable.urasp', build_palindrome_separable),
    ('dyck2.urasp', lambda: build_dyck1(2)),
    ('contains_a_past.urasp', build_contains_a_past),
])
def test_fixture_files_match_builders(filename, builder):
    """Text fixtures recognize the same languages as the builders."""
    rec = parse_program((FIXTURES / filename).read_text(encoding='utf-8'))
    expected = builder().rec
    assert check_equivalence(rec, expected, expected.alphabet, 8) is None


def test_statement_details():
    rec = parse_program((FIXTURES / 'contains_a_past.urasp').read_text(encoding='utf-8'))
    assert rec.read_pos is ReadPos.FIRST
    assert not rec.empty_word_accepts
    line = rec.lines[0]
    assert line.mask is Masking.STRICT_PAST
    assert line.tie is TieBreak.LEFTMOST


def test_expression_precedence_and_sugar():
    """Products bind tighter than sums; comparisons desugar to < and not."""
    assert parse_expression('1 + 2 * i') == Add(RatLit(1), Mul(RatLit(2), PosI()))
    assert parse_expression('i <= j') == Not(Lt(PosJ(), PosI()))
    assert parse_expression('i > j') == Lt(PosJ(), PosI())
    assert parse_expression('-3/4') == RatLit(Fraction(-3, 4))
    assert parse_expression('-j') == Neg(PosJ())
    assert parse_expression('n - 1 - i') == Sub(Sub(parse_expression('n'), RatLit(1)), PosI())
    assert parse_expression('if(L1[i], 1, 0)') == IfThenElse(Var(Side.I, 1), RatLit(1), RatLit(0))


def test_format_expr_is_fully_parenthesized():
    e = parse_expression('not L1[j] and -pow(j, 2) < 1 + i')
    assert format_expr(e) == '(not (L1[j]) and (-(pow(j, 2)) < (1 + i)))'
    assert parse_expression(format_expr(e)) == e


@pytest.mark.parametrize('text', [
    '',
    '# only a comment\n',
    'init charonly alphabet=a,b\n',
    'accept at last when true\n',
    'init charonly alphabet=a,b\ninit charonly alphabet=a,b\naccept at last when true\n',
])
def test_incomplete_programs(text):
    with pytest.raises(DslSyntaxError):
        parse_program(text)


def test_error_positions():
    """Errors point at the offending line and column."""
    text = 'init charonly alphabet=a,b\nL1(i) = L0[i] ==\naccept at last when L1[i]\n'
    with pytest.raises(DslSyntaxError) as info:
        parse_program(text)
    assert (info.value.line, info.value.column) == (2, 17)

    text = 'init charonly alphabet=a,b\nL2(i) = true\naccept at last when true\n'
    with pytest.raises(DslSyntaxError) as info:
        parse_program(text)
    assert (info.value.line, info.value.column) == (2, 1)
    assert 'expected line L1' in str(info.value)

    with pytest.raises(DslSyntaxError) as info:
        parse_expression('1 $ 2')
    assert info.value.column == 3


@pytest.mark.parametrize('statement', ['accept at first when true', 'empty accept'])
def test_duplicate_statements(statement):
    """A repeated accept or empty statement is reported at its second occurrence."""
    text = f'init charonly alphabet=a,b\naccept at last when true\nempty reject\n{statement}\n'
    with pytest.raises(DslSyntaxError) as info:
        parse_program(text)
    assert (info.value.line, info.value.column) == (4, 1)
    assert 'duplicate' in str(info.value)


def test_static_checks_run_after_parsing():
    text = 'init charonly alphabet=a,b\nL1(i) = L1[i]\naccept at last when L1[i]\n'
    with pytest.raises(StaticCheckError):
        parse_program(text)


def test_zero_denominator():
    with pytest.raises(DslSyntaxError):
        parse_expression('1/0')
