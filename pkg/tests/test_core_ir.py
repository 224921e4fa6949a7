import pytest
import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from uhatlab.core_ir import (
    DIAGRAM_CLASSES, Add, Attention, BoolLit, Carrier, Eq, EvalContext, ExprScore, Initialization,
    InitKind, Masking, NEG_INF, Pointwise, PosI, Pow, RatLit, ReadPos, Recognizer, Side, SymLit,
    TableScore, TieBreak, Var, attention_step, canon, classify_program, count_words,
    diagram_classes, eval_expr, execute, has_tie, recognize, validate, value_key, values_equal,
    words_up_to,
)
from uhatlab.errors import (
    NegativeExponent, StaticCheckError, TypeMismatch, UnknownLetter, UnresolvedReference,
)
from uhatlab.programs import build_dyck1, build_palindrome_guhat, library


def test_canonical_rationals():
    """Integral fractions collapse to int and stay exact."""
    assert canon(Fraction(4, 2)) == 2
    assert type(canon(Fraction(4, 2))) is int
    total = eval_expr(Add(RatLit(Fraction(1, 3)), RatLit(Fraction(2, 3))), EvalContext(icol=()))
    assert total == 1 and type(total) is int


def test_bools_are_not_numbers_for_equality():
    """True and 1 compare unequal and hash to different keys."""
    assert not values_equal(True, 1)
    assert values_equal((1, 'a'), (1, 'a'))
    assert value_key(True) != value_key(1)
    assert eval_expr(Eq(BoolLit(True), RatLit(1)), EvalContext(icol=())) is False


def test_negative_infinity_orders_below_rationals():
    """-inf is below every rational and equal only to itself."""
    assert NEG_INF < -10 ** 9
    assert NEG_INF < Fraction(-7, 3)
    assert NEG_INF == NEG_INF
    assert max([NEG_INF, 0, NEG_INF]) == 0


def test_evaluation_errors():
    """Ill-typed operations raise the matching errors."""
    ctx = EvalContext(icol=('a',))
    with pytest.raises(TypeMismatch):
        eval_expr(Add(SymLit('a'), RatLit(1)), ctx)
    with pytest.raises(NegativeExponent):
        eval_expr(Pow(RatLit(2), RatLit(-1)), ctx)
    with pytest.raises(UnresolvedReference):
        eval_expr(Var(Side.J, 0), ctx)


def _constant_line(mask, tie):
    return Attention(mask, tie, ExprScore(RatLit(0)), Var(Side.J, 0), SymLit('z'))


def test_tie_break_and_masks():
    """Constant scores select the extreme admitted position, empty rows use the default."""
    layers = [['a', 'b', 'c']]
    assert attention_step(_constant_line(Masking.NO_MASK, TieBreak.RIGHTMOST), layers, 3) == ['c', 'c', 'c']
    assert attention_step(_constant_line(Masking.NO_MASK, TieBreak.LEFTMOST), layers, 3) == ['a', 'a', 'a']
    assert attention_step(_constant_line(Masking.STRICT_FUTURE, TieBreak.RIGHTMOST), layers, 3) == ['z', 'a', 'b']
    assert attention_step(_constant_line(Masking.STRICT_FUTURE, TieBreak.LEFTMOST), layers, 3) == ['z', 'a', 'a']
    assert attention_step(_constant_line(Masking.STRICT_PAST, TieBreak.RIGHTMOST), layers, 3) == ['c', 'c', 'z']
    assert attention_step(_constant_line(Masking.STRICT_PAST, TieBreak.LEFTMOST), layers, 3) == ['b', 'c', 'z']


def test_execute_shapes_and_selections():
    """A d-line program yields d+1 layers of n values and one selection list per attention line."""
    rec = build_palindrome_guhat().rec
    run = execute(rec, 'abba')
    assert len(run.layers) == rec.depth + 1
    assert all(len(layer) == 4 for layer in run.layers)
    # first line attends to the mirror position
    assert run.selections[1] == [3, 2, 1, 0]
    assert run.layers[0][1] == ('b', 1, 4)


def test_recognize_edge_cases():
    """Empty words use the flag and foreign letters are rejected."""
    rec = build_palindrome_guhat().rec
    assert recognize(rec, '') is True
    assert recognize(rec, 'a') is True
    assert recognize(rec, 'ab') is False
    with pytest.raises(UnknownLetter):
        recognize(rec, 'abc')


def test_validate_rejects_self_reference():
    """A line may only read layers computed before it."""
    rec = Recognizer(
        init=Initialization(InitKind.CHAR_ONLY, ('a', 'b')),
        lines=(Pointwise(Var(Side.I, 1)),),
        valid=BoolLit(True),
    )
    with pytest.raises(StaticCheckError):
        validate(rec)


def test_validate_rejects_future_mask_read_first():
    """Future-masked programs must be read at the last position."""
    rec = Recognizer(
        init=Initialization(InitKind.CHAR_ONLY, ('a', 'b')),
        lines=(_constant_line(Masking.STRICT_FUTURE, TieBreak.RIGHTMOST),),
        valid=Eq(Var(Side.I, 1), SymLit('a')),
        read_pos=ReadPos.FIRST,
    )
    with pytest.raises(StaticCheckError):
        validate(rec)


def test_shortlex_enumeration():
    """Words come by length, then in alphabet order."""
    assert list(words_up_to('ab', 2)) == ['', 'a', 'b', 'aa', 'ab', 'ba', 'bb']
    assert count_words('ab', 10) == 2 ** 11 - 1
    assert count_words('ab', 10, min_len=1) == 2046


def test_has_tie():
    assert has_tie([(0, 1), (1, 1)])
    assert not has_tie([(0, 1), (1, 2)])
    assert not has_tie([(0, NEG_INF)])


def test_classify_fixtures():
    """Palindromes read positions; the Dyck recognizer is finite-type and future-masked."""
    palindrome = classify_program(build_palindrome_guhat().rec)
    assert not palindrome.finite_type
    assert palindrome.separable_scores
    assert palindrome.maskings_used == frozenset({Masking.NO_MASK})
    assert palindrome.ties_possible_up_to

    dyck = classify_program(build_dyck1(2).rec)
    assert dyck.finite_type
    assert dyck.binary_scores
    assert dyck.maskings_used == frozenset({Masking.STRICT_FUTURE})


@pytest.mark.parametrize('fixture', library(), ids=lambda f: f.name)
def test_selections_follow_mask_argmax_and_tie_rule(fixture):
    """Every selection is the tie-broken argmax over the admitted positions, or None."""
    rec = fixture.rec
    max_len = 5 if len(rec.alphabet) > 2 else 6
    for word in words_up_to(rec.alphabet, max_len, min_len=1):
        run = execute(rec, word, record_scores='all')
        n = len(word)
        for idx, line in rec.attention_lines():
            for i, row in enumerate(run.scores[idx]):
                if line.mask is Masking.STRICT_FUTURE:
                    candidates = [(j, s) for j, s in row if j < i]
                elif line.mask is Masking.STRICT_PAST:
                    candidates = [(j, s) for j, s in row if j > i]
                else:
                    candidates = row
                selected = run.selections[idx][i]
                if not candidates:
                    assert selected is None, (word, idx, i)
                    ctx = EvalContext(icol=tuple(layer[i] for layer in run.layers[:idx]), i=i, n=n)
                    assert values_equal(run.layers[idx][i], eval_expr(line.default, ctx))
                    continue
                best = max(s for _, s in candidates)
                tied = [j for j, s in candidates if s == best]
                expected = max(tied) if line.tie is TieBreak.RIGHTMOST else min(tied)
                assert selected == expected, (word, idx, i)


@pytest.mark.parametrize('name, expected', [
    ('palindrome', 'GUHAT'),
    ('palindrome-masked', 'MGUHAT'),
    ('dyck1(2)', 'F-MGUHAT'),
    ('contains-a', 'F-GUHAT'),
    ('contains-a-past', 'F-MGUHAT'),
])
def test_diagram_class_of_fixtures(name, expected):
    fixture = next(f for f in library() if f.name == name)
    c = classify_program(fixture.rec, bound=3)
    assert c.diagram_class == expected
    assert diagram_classes(c)[0] == expected
    assert c.as_dict()['diagram_class'] == expected


def test_diagram_classes_are_upward_closed():
    """Dropping finiteness, adding masks or general scores only widens the class."""
    contains_a = next(f for f in library() if f.name == 'contains-a')
    c = classify_program(contains_a.rec, bound=3)
    assert diagram_classes(c) == ('F-GUHAT', 'F-MGUHAT', 'GUHAT', 'MGUHAT')
    assert set(diagram_classes(c)) <= set(DIAGRAM_CLASSES)
    dyck = classify_program(build_dyck1(2).rec, bound=3)
    assert diagram_classes(dyck) == ('F-MGUHAT', 'MGUHAT')


def test_table_keys_count_as_positional():
    """A score table keyed on i is not finite-type even with a character-only init."""
    line = Attention(Masking.NO_MASK, TieBreak.RIGHTMOST,
                     TableScore(Carrier(PosI(), (0,)), ((0,),)), BoolLit(True), BoolLit(False))
    rec = Recognizer(Initialization(InitKind.CHAR_ONLY, ('a',)), (line,), Var(Side.I, 1))
    c = classify_program(rec, bound=1, binary_len=1)
    assert not c.finite_type
    assert c.diagram_class == 'GUHAT'
