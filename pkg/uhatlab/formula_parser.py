"""Text syntax for LTL and first-order formulas.

LTL:  G('b' -> !(true U 'a'))      letters are quoted sets, #even is a numerical predicate
FO:   forall x. forall y. (x < y -> !('b'(x) & 'a'(y)))

Binding from loosest: quantifiers, ``->`` (right associative), ``|``, ``&``,
``U``/``S`` (right associative), then the prefix operators ``! X Y G F``.
"""
from typing import List
import logging

from .errors import DslSyntaxError
from .logic import (
    And, Exists, FalseF, ForAll, Formula, LetterAt, LetterPred, Less, MonPred, MonPredAt,
    Next, Not, Or, Since, TrueF, Until, Yesterday, eventually, globally, implies,
)
from .program_parser import Token, TokenStream, tokenize

logger = logging.getLogger(__name__)

_PREFIX = {'!': Not, 'X': Next, 'Y': Yesterday, 'G': globally, 'F': eventually}


def _tokens(text: str) -> List[Token]:
    tokens = []
    for number, raw in enumerate(text.splitlines() or [''], start=1):
        tokens.extend(tokenize(raw, number, comments=False)[:-1])
    last = tokens[-1] if tokens else None
    tokens.append(Token('EOF', '', last.line if last else 1, last.column + len(last.text) if last else 1))
    return tokens


class FormulaParser:
    def __init__(self, text: str, first_order: bool):
        self.s = TokenStream(_tokens(text))
        self.first_order = first_order

    def parse(self) -> Formula:
        if self.s.current.kind == 'EOF':
            raise DslSyntaxError("empty formula", 1, 1)
        phi = self.formula()
        self.s.expect_end()
        return phi

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.s.accept('->'):
            return implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.s.accept('|'):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.temporal()
        while self.s.accept('&'):
            left = And(left, self.temporal())
        return left

    def temporal(self) -> Formula:
        left = self.unary()
        if not self.first_order:
            op = self.s.accept('U', 'S')
            if op is not None:
                right = self.temporal()
                return Until(left, right) if op.text == 'U' else Since(left, right)
        return left

    def unary(self) -> Formula:
        s = self.s
        if s.accept('!'):
            return Not(self.unary())
        if self.first_order and s.at('exists', 'forall'):
            quantifier = Exists if s.advance().text == 'exists' else ForAll
            var = s.expect_kind('IDENT', 'a variable').text
            s.expect('.')
            return quantifier(var, self.formula())
        if not self.first_order and s.at(*_PREFIX):
            return _PREFIX[s.advance().text](self.unary())
        return self.atom()

    def atom(self) -> Formula:
        s = self.s
        tok = s.current
        if s.accept('true'):
            return TrueF()
        if s.accept('false'):
            return FalseF()
        if s.accept('('):
            inner = self.formula()
            s.expect(')')
            return inner
        if tok.kind == 'STR':
            s.advance()
            letters = frozenset(tok.text[1:-1])
            if not letters:
                raise DslSyntaxError("empty letter set", tok.line, tok.column)
            if self.first_order:
                return LetterAt(letters, self._variable())
            return LetterPred(letters)
        if s.accept('#'):
            name = s.expect_kind('IDENT', 'a predicate name').text
            if self.first_order:
                return MonPredAt(name, self._variable())
            return MonPred(name)
        if self.first_order and tok.kind == 'IDENT':
            s.advance()
            s.expect('<')
            return Less(tok.text, s.expect_kind('IDENT', 'a variable').text)
        s.fail("expected a formula")

    def _variable(self) -> str:
        self.s.expect('(')
        var = self.s.expect_kind('IDENT', 'a variable').text
        self.s.expect(')')
        return var


def parse_ltl(text: str) -> Formula:
    return FormulaParser(text, first_order=False).parse()


def parse_fo(text: str) -> Formula:
    return FormulaParser(text, first_order=True).parse()


def _letters(letters) -> str:
    return "'" + ''.join(sorted(letters)) + "'"


def format_formula(phi: Formula) -> str:
    """Fully parenthesized text that parses back to phi."""
    if isinstance(phi, TrueF):
        return 'true'
    if isinstance(phi, FalseF):
        return 'false'
    if isinstance(phi, LetterPred):
        return _letters(phi.letters)
    if isinstance(phi, MonPred):
        return f"#{phi.name}"
    if isinstance(phi, LetterAt):
        return f"{_letters(phi.letters)}({phi.var})"
    if isinstance(phi, MonPredAt):
        return f"#{phi.name}({phi.var})"
    if isinstance(phi, Less):
        return f"{phi.left} < {phi.right}"
    if isinstance(phi, Not):
        return f"!({format_formula(phi.operand)})"
    if isinstance(phi, Next):
        return f"X({format_formula(phi.operand)})"
    if isinstance(phi, Yesterday):
        return f"Y({format_formula(phi.operand)})"
    if isinstance(phi, (And, Or, Until, Since)):
        op = {And: '&', Or: '|', Until: 'U', Since: 'S'}[type(phi)]
        return f"({format_formula(phi.left)} {op} {format_formula(phi.right)})"
    if isinstance(phi, (Exists, ForAll)):
        word = 'exists' if isinstance(phi, Exists) else 'forall'
        return f"({word} {phi.var}. {format_formula(phi.body)})"
    raise TypeError(f"cannot print {type(phi).__name__}")
