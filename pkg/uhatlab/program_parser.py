"""Line-oriented text syntax for recognizers.

    init charposlen alphabet='a','b'
    L1(i) = attend rightmost j [mask=none, score=-((L0[i] - L0[j]) * (L0[i] - L0[j]))] value=L0[j] default=0
    L2(i) = (L1[i] == 1)
    accept at last when L2[i]
    empty accept

``format_program`` prints every compound expression parenthesized, so its
output parses back to the same recognizer.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple
import logging
import re

from .core_ir import (
    Add, And, Attention, BilinearScore, BoolLit, Carrier, Eq, Expr, ExprScore, IfThenElse,
    Initialization, InitKind, Len, Lt, Masking, Mul, Neg, NegInfLit, Not, Or, Pointwise, PosI,
    PosJ, Pow, RatLit, ReadPos, Recognizer, SeparableScore, Side, Sub, SymLit, TableScore,
    TieBreak, TupleGet, TupleMake, Var, canon, validate,
)
from .errors import DslSyntaxError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Token:
    kind: str   # NUM, STR, IDENT, OP, EOF
    text: str
    line: int
    column: int


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<NUM>\d+(?:/\d+)?)
  | (?P<STR>'[^']*')
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<OP>==|!=|<=|>=|->|[-+*<>()\[\],=.!&|:\#])
""", re.VERBOSE)


def tokenize(text: str, line: int = 1, comments: bool = True) -> List[Token]:
    """Split one source line into tokens, ending with an EOF token."""
    tokens, pos = [], 0
    while pos < len(text):
        if comments and text[pos] == '#':
            break
        match = _TOKEN.match(text, pos)
        if match is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if match.lastgroup != 'ws':
            tokens.append(Token(match.lastgroup, match.group(), line, pos + 1))
        pos = match.end()
    tokens.append(Token('EOF', '', line, len(text) + 1))
    return tokens


def parse_number(text: str):
    if '/' in text:
        num, den = text.split('/')
        if int(den) == 0:
            raise DslSyntaxError(f"zero denominator in {text}")
        return canon(Fraction(int(num), int(den)))
    return int(text)


class TokenStream:
    """Cursor over a token list with the usual peek/expect helpers."""

    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, *texts: str) -> bool:
        tok = self.current
        return tok.kind in ('OP', 'IDENT') and tok.text in texts

    def advance(self) -> Token:
        tok = self.current
        if tok.kind != 'EOF':
            self.pos += 1
        return tok

    def accept(self, *texts: str) -> Optional[Token]:
        if self.at(*texts):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.current.kind != kind:
            self.fail(f"expected {what}")
        return self.advance()

    def expect_end(self) -> None:
        if self.current.kind != 'EOF':
            self.fail("unexpected trailing input")

    def fail(self, message: str):
        tok = self.current
        found = 'end of line' if tok.kind == 'EOF' else repr(tok.text)
        raise DslSyntaxError(f"{message}, found {found}", tok.line, tok.column)


# ---------------------------------------------------------------- expressions

_LAYER = re.compile(r'L(\d+)$')


class ExpressionParser:
    def __init__(self, stream: TokenStream):
        self.s = stream

    def expr(self) -> Expr:
        left = self.conjunction()
        while self.s.accept('or'):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Expr:
        left = self.negation()
        while self.s.accept('and'):
            left = And(left, self.negation())
        return left

    def negation(self) -> Expr:
        if self.s.accept('not'):
            return Not(self.negation())
        return self.comparison()

    def comparison(self) -> Expr:
        left = self.sum()
        op = self.s.accept('==', '!=', '<', '<=', '>', '>=')
        if op is None:
            return left
        right = self.sum()
        return {
            '==': lambda: Eq(left, right),
            '!=': lambda: Not(Eq(left, right)),
            '<': lambda: Lt(left, right),
            '<=': lambda: Not(Lt(right, left)),
            '>': lambda: Lt(right, left),
            '>=': lambda: Not(Lt(left, right)),
        }[op.text]()

    def sum(self) -> Expr:
        left = self.product()
        while self.s.at('+', '-'):
            op = self.s.advance().text
            right = self.product()
            left = Add(left, right) if op == '+' else Sub(left, right)
        return left

    def product(self) -> Expr:
        left = self.unary()
        while self.s.accept('*'):
            left = Mul(left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.s.accept('-'):
            if self.s.current.kind == 'NUM':
                return RatLit(canon(-parse_number(self.s.advance().text)))
            return Neg(self.unary())
        return self.primary()

    def arguments(self, count: int) -> List[Expr]:
        self.s.expect('(')
        args = [self.expr()]
        for _ in range(count - 1):
            self.s.expect(',')
            args.append(self.expr())
        self.s.expect(')')
        return args

    def primary(self) -> Expr:
        s = self.s
        tok = s.current
        if tok.kind == 'NUM':
            s.advance()
            return RatLit(parse_number(tok.text))
        if tok.kind == 'STR':
            s.advance()
            return SymLit(tok.text[1:-1])
        if s.accept('('):
            inner = self.expr()
            s.expect(')')
            return inner
        if tok.kind != 'IDENT':
            s.fail("expected an expression")
        name = tok.text
        s.advance()
        constants = {'true': BoolLit(True), 'false': BoolLit(False), 'neginf': NegInfLit(),
                     'i': PosI(), 'j': PosJ(), 'n': Len()}
        if name in constants:
            return constants[name]
        layer = _LAYER.match(name)
        if layer:
            s.expect('[')
            side = s.expect_kind('IDENT', "'i' or 'j'")
            if side.text not in ('i', 'j'):
                raise DslSyntaxError("layer index must be i or j", side.line, side.column)
            s.expect(']')
            return Var(Side.I if side.text == 'i' else Side.J, int(layer.group(1)))
        if name == 'pow':
            return Pow(*self.arguments(2))
        if name == 'if':
            return IfThenElse(*self.arguments(3))
        if name == 'get':
            s.expect('(')
            item = self.expr()
            s.expect(',')
            index = int(s.expect_kind('NUM', 'a tuple index').text)
            s.expect(')')
            return TupleGet(item, index)
        if name == 'tuple':
            s.expect('(')
            items = []
            if not s.at(')'):
                items.append(self.expr())
                while s.accept(','):
                    items.append(self.expr())
            s.expect(')')
            return TupleMake(tuple(items))
        raise DslSyntaxError(f"unknown name {name!r}", tok.line, tok.column)


def parse_expression(text: str, line: int = 1) -> Expr:
    stream = TokenStream(tokenize(text, line))
    result = ExpressionParser(stream).expr()
    stream.expect_end()
    return result


# ---------------------------------------------------------------- statements

def _value(s: TokenStream):
    """Constant value: number, 'symbol', true, false, none or tuple(...)."""
    if s.accept('-'):
        return canon(-parse_number(s.expect_kind('NUM', 'a number').text))
    tok = s.current
    if tok.kind == 'NUM':
        return parse_number(s.advance().text)
    if tok.kind == 'STR':
        return s.advance().text[1:-1]
    if s.accept('true'):
        return True
    if s.accept('false'):
        return False
    if s.accept('none'):
        return None
    if s.accept('tuple'):
        s.expect('(')
        items = []
        if not s.at(')'):
            items.append(_value(s))
            while s.accept(','):
                items.append(_value(s))
        s.expect(')')
        return tuple(items)
    s.fail("expected a constant")


def _list(s: TokenStream, item) -> list:
    s.expect('[')
    items = []
    if not s.at(']'):
        items.append(item(s))
        while s.accept(','):
            items.append(item(s))
    s.expect(']')
    return items


def _keyword(s: TokenStream, name: str) -> None:
    s.expect(name)
    s.expect('=')


def _score(s: TokenStream):
    exprs = ExpressionParser(s)
    if s.current.kind == 'IDENT' and s.peek().text == '(':
        kind = s.current.text
        if kind == 'separable':
            s.advance()
            s.expect('(')
            terms, carrier = [], None
            while True:
                if s.at('carrier'):
                    carrier = _carrier(s)
                    break
                s.expect('(')
                f = exprs.expr()
                s.expect(',')
                g = exprs.expr()
                s.expect(')')
                terms.append((f, g))
                if not s.accept(','):
                    break
            s.expect(')')
            return SeparableScore(tuple(terms), carrier)
        if kind == 'table':
            s.advance()
            s.expect('(')
            carrier = _carrier(s)
            s.expect(',')
            _keyword(s, 'entries')
            rows = _list(s, lambda st: tuple(_list(st, _value)))
            s.expect(')')
            return TableScore(carrier, tuple(rows))
        if kind == 'bilinear':
            s.advance()
            s.expect('(')
            _keyword(s, 'layer')
            layer = int(s.expect_kind('NUM', 'a layer number').text)
            s.expect(',')
            _keyword(s, 'matrix')
            matrix = _list(s, lambda st: tuple(_list(st, _value)))
            s.expect(')')
            return BilinearScore(layer, tuple(matrix))
    return ExprScore(exprs.expr())


def _carrier(s: TokenStream) -> Carrier:
    """carrier=<key expr>:[values] ."""
    _keyword(s, 'carrier')
    key = ExpressionParser(s).expr()
    s.expect(':')
    return Carrier(key, tuple(_list(s, _value)))


def _enum(s: TokenStream, enum, what: str):
    tok = s.expect_kind('IDENT', what)
    for member in enum:
        if member.value == tok.text or member.name.lower() == tok.text:
            return member
    raise DslSyntaxError(f"unknown {what} {tok.text!r}", tok.line, tok.column)


def _attention(s: TokenStream) -> Attention:
    exprs = ExpressionParser(s)
    tie = _enum(s, TieBreak, 'tie-break')
    s.expect('j')
    s.expect('[')
    _keyword(s, 'mask')
    mask = _enum(s, Masking, 'masking')
    s.expect(',')
    _keyword(s, 'score')
    score = _score(s)
    s.expect(']')
    _keyword(s, 'value')
    value = exprs.expr()
    _keyword(s, 'default')
    default = exprs.expr()
    return Attention(mask, tie, score, value, default)


def _letters(s: TokenStream) -> Tuple[str, ...]:
    letters = []
    while True:
        tok = s.current
        if tok.kind == 'STR':
            letters.append(tok.text[1:-1])
        elif tok.kind in ('IDENT', 'NUM'):
            letters.append(tok.text)
        else:
            s.fail("expected a letter")
        s.advance()
        if not s.accept(','):
            return tuple(letters)


def _source_lines(text: str) -> Iterator[Tuple[int, str]]:
    """Numbered lines that hold more than whitespace and comments."""
    for number, raw in enumerate(text.splitlines(), start=1):
        if len(tokenize(raw, number)) > 1:
            yield number, raw


def parse_program(text: str) -> Recognizer:
    """Parse a recognizer and run the static checks on it."""
    init = valid = empty = None
    read_pos, vector_typed = ReadPos.LAST, False
    lines = []
    for number, raw in _source_lines(text):
        if raw.strip() == 'vector-typed':
            vector_typed = True
            continue
        s = TokenStream(tokenize(raw, number))
        head = s.current
        if s.accept('init'):
            if init is not None:
                raise DslSyntaxError("duplicate init statement", head.line, head.column)
            kind = _enum(s, InitKind, 'initialization kind')
            _keyword(s, 'alphabet')
            alphabet = _letters(s)
            expr = None
            if s.accept('expr'):
                s.expect('=')
                expr = ExpressionParser(s).expr()
            init = Initialization(kind, alphabet, expr)
        elif s.accept('accept'):
            if valid is not None:
                raise DslSyntaxError("duplicate accept statement", head.line, head.column)
            s.expect('at')
            read_pos = _enum(s, ReadPos, "read position ('last' or 'first')")
            s.expect('when')
            valid = ExpressionParser(s).expr()
        elif s.accept('empty'):
            if empty is not None:
                raise DslSyntaxError("duplicate empty statement", head.line, head.column)
            verdict = s.expect_kind('IDENT', "'accept' or 'reject'")
            if verdict.text not in ('accept', 'reject'):
                raise DslSyntaxError("expected 'accept' or 'reject'", verdict.line, verdict.column)
            empty = verdict.text == 'accept'
        elif head.kind == 'IDENT' and _LAYER.match(head.text):
            index = int(_LAYER.match(head.text).group(1))
            if index != len(lines) + 1:
                raise DslSyntaxError(f"expected line L{len(lines) + 1}, found L{index}",
                                     head.line, head.column)
            s.advance()
            s.expect('(')
            s.expect('i')
            s.expect(')')
            s.expect('=')
            if s.accept('attend'):
                lines.append(_attention(s))
            else:
                lines.append(Pointwise(ExpressionParser(s).expr()))
        else:
            s.fail("expected a statement")
        s.expect_end()

    if init is None and valid is None and not lines:
        raise DslSyntaxError("empty program", 1, 1)
    if init is None:
        raise DslSyntaxError("missing init statement", 1, 1)
    if valid is None:
        raise DslSyntaxError("missing accept statement", 1, 1)
    rec = Recognizer(init, tuple(lines), valid, read_pos, bool(empty), vector_typed)
    logger.debug("parsed program with %d lines over %s", len(lines), ''.join(init.alphabet))
    return validate(rec)


# ---------------------------------------------------------------- printing

def format_number(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def format_constant(v) -> str:
    if v is None:
        return 'none'
    if isinstance(v, bool):
        return 'true' if v else 'false'
    if isinstance(v, str):
        return f"'{v}'"
    if isinstance(v, tuple):
        return 'tuple(' + ', '.join(format_constant(x) for x in v) + ')'
    return format_number(v)


_INFIX = {Add: '+', Sub: '-', Mul: '*', Eq: '==', Lt: '<', And: 'and', Or: 'or'}


def _wrapped(e: Expr) -> str:
    text = format_expr(e)
    return text if type(e) in _INFIX else f"({text})"


def format_expr(e: Expr) -> str:
    if isinstance(e, RatLit):
        return format_number(e.value)
    if isinstance(e, (SymLit, BoolLit)):
        return format_constant(e.value)
    if isinstance(e, NegInfLit):
        return 'neginf'
    if isinstance(e, Var):
        return f"L{e.layer}[{e.side.value}]"
    if isinstance(e, PosI):
        return 'i'
    if isinstance(e, PosJ):
        return 'j'
    if isinstance(e, Len):
        return 'n'
    if type(e) in _INFIX:
        return f"({format_expr(e.left)} {_INFIX[type(e)]} {format_expr(e.right)})"
    if isinstance(e, Neg):
        return f"-{_wrapped(e.operand)}"
    if isinstance(e, Not):
        return f"not {_wrapped(e.operand)}"
    if isinstance(e, Pow):
        return f"pow({format_expr(e.base)}, {format_expr(e.exponent)})"
    if isinstance(e, IfThenElse):
        return f"if({format_expr(e.cond)}, {format_expr(e.then)}, {format_expr(e.orelse)})"
    if isinstance(e, TupleMake):
        return 'tuple(' + ', '.join(format_expr(x) for x in e.items) + ')'
    if isinstance(e, TupleGet):
        return f"get({format_expr(e.item)}, {e.index})"
    raise TypeError(f"cannot print {type(e).__name__}")


def _format_carrier(c: Carrier) -> str:
    return f"carrier={format_expr(c.key)}:[{', '.join(format_constant(v) for v in c.values)}]"


def _format_matrix(rows) -> str:
    return '[' + ', '.join('[' + ', '.join(format_constant(x) for x in row) + ']' for row in rows) + ']'


def format_score(score) -> str:
    if isinstance(score, ExprScore):
        return format_expr(score.expr)
    if isinstance(score, SeparableScore):
        parts = [f"({format_expr(f)}, {format_expr(g)})" for f, g in score.terms]
        if score.carrier is not None:
            parts.append(_format_carrier(score.carrier))
        return f"separable({', '.join(parts)})"
    if isinstance(score, TableScore):
        return f"table({_format_carrier(score.carrier)}, entries={_format_matrix(score.entries)})"
    if isinstance(score, BilinearScore):
        return f"bilinear(layer={score.layer}, matrix={_format_matrix(score.matrix)})"
    raise TypeError(f"cannot print {type(score).__name__}")


def format_program(rec: Recognizer) -> str:
    letters = ','.join(format_constant(c) for c in rec.alphabet)
    init = f"init {rec.init.kind.value} alphabet={letters}"
    if rec.init.expr is not None:
        init += f" expr={format_expr(rec.init.expr)}"
    out = [init]
    for idx, line in enumerate(rec.lines, start=1):
        if isinstance(line, Pointwise):
            out.append(f"L{idx}(i) = {format_expr(line.value)}")
        else:
            out.append(
                f"L{idx}(i) = attend {line.tie.value} j "
                f"[mask={line.mask.value}, score={format_score(line.score)}] "
                f"value={format_expr(line.value)} default={format_expr(line.default)}")
    out.append(f"accept at {rec.read_pos.value} when {format_expr(rec.valid)}")
    out.append(f"empty {'accept' if rec.empty_word_accepts else 'reject'}")
    if rec.vector_typed:
        out.append('vector-typed')
    return '\n'.join(out) + '\n'
