import pytest
import sys
from itertools import product
from pathlib import Path

from hypothesis import given, settings, strategies as st

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from uhatlab.errors import (
    EmptyWord, FreeVariable, ModeFormulaMismatch, PositionOutOfRange, UnknownMonPred,
)
from uhatlab.logic import (
    And, DEFAULT_REGISTRY, Exists, FalseF, LetterAt, Less, MonPred, MonPredRegistry, Next,
    Not, Or, Since, TrueF, Until, Yesterday, a_star_b_star_fltl, a_star_b_star_fo, dyck11_fo,
    dyck_fltl, eval_fo, eval_ltl, eventually, free_variables, globally, letter, ltl_recognize,
)
from uhatlab.programs import dyck_oracle, is_a_star_b_star


def _words(alphabet, max_len):
    for length in range(1, max_len + 1):
        for letters in product(alphabet, repeat=length):
            yield ''.join(letters)


def _future_formulas():
    atoms = st.sampled_from([TrueF(), FalseF(), letter('a'), letter('b'), MonPred('even')])
    return st.recursive(atoms, lambda inner: st.one_of(
        st.builds(Not, inner),
        st.builds(And, inner, inner),
        st.builds(Or, inner, inner),
        st.builds(Next, inner),
        st.builds(Until, inner, inner),
    ), max_leaves=8)


@settings(max_examples=20, deadline=None)
@given(_future_formulas())
def test_until_false_is_next(phi):
    """false U phi holds exactly where X phi holds."""
    for word in _words('ab', 8):
        for i in range(len(word)):
            assert eval_ltl(Until(FalseF(), phi), word, i) == eval_ltl(Next(phi), word, i)


def test_until_and_since_are_strict():
    """The witness must lie strictly after (before) the current position."""
    assert not eval_ltl(Until(TrueF(), letter('a')), 'ab', 0)
    assert eval_ltl(Until(TrueF(), letter('b')), 'ab', 0)
    assert not eval_ltl(Since(TrueF(), letter('b')), 'ab', 1)
    assert eval_ltl(Since(TrueF(), letter('a')), 'ab', 1)
    assert not eval_ltl(Next(TrueF()), 'ab', 1)
    assert not eval_ltl(Yesterday(TrueF()), 'ab', 0)


def test_derived_operators():
    assert eval_ltl(globally(letter('a')), 'baa', 1)
    assert not eval_ltl(globally(letter('a')), 'aab', 0)
    assert eval_ltl(eventually(letter('b')), 'aab', 0)
    assert eval_ltl(eventually(letter('b')), 'aab', 2)


def test_a_star_b_star_fixtures_match_oracle():
    """The LTL and FO sentences both define a*b* on non-empty words."""
    ltl, fo = a_star_b_star_fltl(), a_star_b_star_fo()
    for word in _words('ab', 8):
        expected = is_a_star_b_star(word)
        assert ltl_recognize(ltl, word) == expected, word
        assert eval_fo(fo, word) == expected, word


@pytest.mark.parametrize('depth', [1, 2])
def test_dyck_ltl_matches_oracle(depth):
    oracle = dyck_oracle(depth)
    phi = dyck_fltl(depth)
    for word in _words('()', 8):
        assert ltl_recognize(phi, word) == oracle(word), word


def test_dyck11_fo_matches_oracle():
    oracle, phi = dyck_oracle(1), dyck11_fo()
    for word in _words('()', 8):
        assert eval_fo(phi, word) == oracle(word), word


def test_modes():
    """Past LTL reads the last position and modes reject foreign operators."""
    ends_in_b = letter('b')
    assert ltl_recognize(ends_in_b, 'ab', mode='pltl')
    assert not ltl_recognize(ends_in_b, 'ab', mode='fltl')
    after_a = Yesterday(letter('a'))
    assert ltl_recognize(after_a, 'ab', mode='pltl')
    with pytest.raises(ModeFormulaMismatch):
        ltl_recognize(after_a, 'ab', mode='fltl')
    with pytest.raises(ModeFormulaMismatch):
        ltl_recognize(Next(ends_in_b), 'ab', mode='pltl')
    # mixed formulas are fine in plain LTL
    assert ltl_recognize(And(Next(ends_in_b), Not(Yesterday(TrueF()))), 'ab', mode='ltl')
    with pytest.raises(ValueError):
        ltl_recognize(ends_in_b, 'ab', mode='ctl')


def test_logic_errors():
    with pytest.raises(EmptyWord):
        ltl_recognize(TrueF(), '')
    with pytest.raises(PositionOutOfRange):
        eval_ltl(TrueF(), 'ab', 2)
    with pytest.raises(FreeVariable):
        eval_fo(LetterAt(frozenset('a'), 'x'), 'ab')
    with pytest.raises(EmptyWord):
        eval_fo(Exists('x', LetterAt(frozenset('a'), 'x')), '')
    with pytest.raises(UnknownMonPred):
        eval_ltl(MonPred('prime'), 'ab', 0)


def test_free_variables():
    body = And(Less('x', 'y'), LetterAt(frozenset('a'), 'y'))
    assert free_variables(body) == {'x', 'y'}
    assert free_variables(Exists('y', body)) == {'x'}


def test_monadic_predicates():
    """Built-in and parametric numerical predicates."""
    assert [DEFAULT_REGISTRY.lookup('middle')(5, i) for i in range(5)] == [False, False, True, False, False]
    assert DEFAULT_REGISTRY.lookup('mod_3_1')(9, 4)
    assert DEFAULT_REGISTRY.lookup('ge_2')(9, 2)
    assert not DEFAULT_REGISTRY.lookup('lt_2')(9, 2)
    with pytest.raises(UnknownMonPred):
        DEFAULT_REGISTRY.lookup('mod_0_0')

    registry = MonPredRegistry({'square': lambda n, i: int(i ** 0.5) ** 2 == i})
    assert eval_ltl(MonPred('square'), 'aaaaa', 4, registry)
    assert not eval_ltl(MonPred('square'), 'aaaaa', 3, registry)
