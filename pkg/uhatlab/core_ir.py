"""Program IR and exact evaluation semantics.

Values are plain Python objects: ``str`` for alphabet symbols, ``int`` or
``Fraction`` for rationals (always canonical, integral rationals are ``int``),
``bool`` and ``tuple``. Bools are distinct from numbers for equality but count
as 0/1 inside arithmetic and scores.
"""
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union
import functools
import logging

from .errors import (
    NegativeExponent,
    NonSeparableScorePresent,
    NonTotalTable,
    StaticCheckError,
    TypeMismatch,
    UnknownLetter,
    UnresolvedReference,
)

logger = logging.getLogger(__name__)

Rat = Union[int, Fraction]
Value = Union[str, int, Fraction, bool, tuple]


# ---------------------------------------------------------------- values

@functools.total_ordering
class NegInfinity:
    """Score below every finite rational."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self:
            return False
        if isinstance(other, (int, Fraction)):
            return True
        return NotImplemented

    def __hash__(self):
        return hash('-inf')

    def __repr__(self):
        return 'NEG_INF'


NEG_INF = NegInfinity()
ExtScore = Union[int, Fraction, NegInfinity]


def canon(x: Rat) -> Rat:
    """Canonical rational: integral Fractions collapse to int."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def value_tag(v) -> str:
    if isinstance(v, bool):
        return 'bool'
    if isinstance(v, (int, Fraction)):
        return 'rat'
    if isinstance(v, str):
        return 'sym'
    if isinstance(v, tuple):
        return 'tuple'
    if v is NEG_INF:
        return 'neginf'
    raise TypeMismatch(f"not a value: {v!r}")


def values_equal(a, b) -> bool:
    tag = value_tag(a)
    if tag != value_tag(b):
        return False
    if tag == 'tuple':
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    return a == b


def value_key(v) -> tuple:
    """Hashable key that keeps True and 1 apart."""
    tag = value_tag(v)
    if tag == 'tuple':
        return ('tuple', tuple(value_key(x) for x in v))
    if tag == 'neginf':
        return ('neginf',)
    return (tag, v)


def format_value(v) -> str:
    if isinstance(v, bool):
        return 'true' if v else 'false'
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, tuple):
        return '(' + ', '.join(format_value(x) for x in v) + ')'
    if v is NEG_INF:
        return '-inf'
    return str(v)


def as_number(v) -> Rat:
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, (int, Fraction)):
        return v
    raise TypeMismatch(f"expected a number, got {format_value(v)!r}")


def is_truthy(v) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, Fraction)):
        return v != 0
    raise TypeMismatch(f"expected a boolean condition, got {format_value(v)!r}")


def as_score(v) -> ExtScore:
    if v is NEG_INF:
        return v
    return canon(as_number(v))


# ---------------------------------------------------------------- enums

class Side(Enum):
    I = 'i'
    J = 'j'

    def flipped(self) -> 'Side':
        return Side.J if self is Side.I else Side.I


class Masking(Enum):
    NO_MASK = 'none'
    STRICT_FUTURE = 'future'
    STRICT_PAST = 'past'


class TieBreak(Enum):
    RIGHTMOST = 'rightmost'
    LEFTMOST = 'leftmost'


class ReadPos(Enum):
    LAST = 'last'
    FIRST = 'first'


class InitKind(Enum):
    CHAR_ONLY = 'charonly'
    CHAR_POS_LEN = 'charposlen'
    CUSTOM = 'custom'


def mask_admits(mask: Masking, i: int, j: int) -> bool:
    if mask is Masking.STRICT_FUTURE:
        return i > j
    if mask is Masking.STRICT_PAST:
        return i < j
    return True


def admitted(mask: Masking, i: int, n: int) -> range:
    if mask is Masking.STRICT_FUTURE:
        return range(0, i)
    if mask is Masking.STRICT_PAST:
        return range(i + 1, n)
    return range(0, n)


# ---------------------------------------------------------------- expressions

class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class RatLit(Expr):
    value: Rat


@dataclass(frozen=True)
class SymLit(Expr):
    value: str


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class NegInfLit(Expr):
    pass


@dataclass(frozen=True)
class Var(Expr):
    side: Side
    layer: int


@dataclass(frozen=True)
class PosI(Expr):
    pass


@dataclass(frozen=True)
class PosJ(Expr):
    pass


@dataclass(frozen=True)
class Len(Expr):
    pass


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Eq(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Lt(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class And(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Or(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not(Expr):
    operand: Expr


@dataclass(frozen=True)
class IfThenElse(Expr):
    cond: Expr
    then: Expr
    orelse: Expr


@dataclass(frozen=True)
class TupleMake(Expr):
    items: Tuple[Expr, ...]


@dataclass(frozen=True)
class TupleGet(Expr):
    item: Expr
    index: int


EXPR_NODES = (
    RatLit, SymLit, BoolLit, NegInfLit, Var, PosI, PosJ, Len, Add, Sub, Mul, Neg,
    Pow, Eq, Lt, And, Or, Not, IfThenElse, TupleMake, TupleGet,
)


def literal(v) -> Expr:
    """Expression that evaluates to the value v."""
    if isinstance(v, bool):
        return BoolLit(v)
    if isinstance(v, (int, Fraction)):
        return RatLit(canon(v))
    if isinstance(v, str):
        return SymLit(v)
    if isinstance(v, tuple):
        return TupleMake(tuple(literal(x) for x in v))
    if v is NEG_INF:
        return NegInfLit()
    raise TypeMismatch(f"cannot make a literal from {v!r}")


def children(e: Expr) -> Iterator[Expr]:
    for f in fields(e):
        v = getattr(e, f.name)
        if isinstance(v, Expr):
            yield v
        elif isinstance(v, tuple):
            yield from (x for x in v if isinstance(x, Expr))


def walk(e: Expr) -> Iterator[Expr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(children(node))


def rewrite(e: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Bottom-up rebuild of e, applying fn to every node after its children."""
    changes = {}
    for f in fields(e):
        v = getattr(e, f.name)
        if isinstance(v, Expr):
            changes[f.name] = rewrite(v, fn)
        elif isinstance(v, tuple) and any(isinstance(x, Expr) for x in v):
            changes[f.name] = tuple(rewrite(x, fn) if isinstance(x, Expr) else x for x in v)
    node = replace(e, **changes) if changes else e
    return fn(node)


def mirror(e: Expr) -> Expr:
    """Swap the I and J sides of an expression."""
    def flip(node):
        if isinstance(node, Var):
            return Var(node.side.flipped(), node.layer)
        if isinstance(node, PosI):
            return PosJ()
        if isinstance(node, PosJ):
            return PosI()
        return node
    return rewrite(e, flip)


def remap_layers(e: Expr, mapping: Callable[[int], int]) -> Expr:
    def remap(node):
        if isinstance(node, Var):
            return Var(node.side, mapping(node.layer))
        return node
    return rewrite(e, remap)


@dataclass(frozen=True)
class ExprRefs:
    layers_i: frozenset
    layers_j: frozenset
    pos_i: bool
    pos_j: bool
    length: bool
    neg_inf: bool

    @property
    def uses_i(self) -> bool:
        return bool(self.layers_i) or self.pos_i

    @property
    def uses_j(self) -> bool:
        return bool(self.layers_j) or self.pos_j

    @property
    def positional(self) -> bool:
        return self.pos_i or self.pos_j or self.length


def expr_refs(e: Expr) -> ExprRefs:
    li, lj = set(), set()
    pos_i = pos_j = length = neg_inf = False
    for node in walk(e):
        if isinstance(node, Var):
            (li if node.side is Side.I else lj).add(node.layer)
        elif isinstance(node, PosI):
            pos_i = True
        elif isinstance(node, PosJ):
            pos_j = True
        elif isinstance(node, Len):
            length = True
        elif isinstance(node, NegInfLit):
            neg_inf = True
    return ExprRefs(frozenset(li), frozenset(lj), pos_i, pos_j, length, neg_inf)


# ---------------------------------------------------------------- compilation

Compiled = Callable[[Sequence, Optional[Sequence], int, Optional[int], int], object]


@dataclass(frozen=True)
class EvalContext:
    icol: Sequence
    jcol: Optional[Sequence] = None
    i: int = 0
    j: Optional[int] = None
    n: int = 1


def _add(a, b):
    if a is NEG_INF or b is NEG_INF:
        as_score(a), as_score(b)
        return NEG_INF
    return canon(as_number(a) + as_number(b))


def _sub(a, b):
    if b is NEG_INF:
        raise TypeMismatch("cannot subtract -inf")
    if a is NEG_INF:
        as_number(b)
        return NEG_INF
    return canon(as_number(a) - as_number(b))


def _pow(base, exponent):
    base = as_number(base)
    exponent = as_number(exponent)
    if isinstance(exponent, Fraction):
        raise TypeMismatch(f"exponent must be an integer, got {format_value(exponent)}")
    if exponent < 0:
        raise NegativeExponent(f"negative exponent {exponent}")
    return canon(base ** exponent)


def _lt(a, b):
    if a is not NEG_INF:
        a = as_number(a)
    if b is not NEG_INF:
        b = as_number(b)
    return a < b


def _tuple_get(t, index):
    if not isinstance(t, tuple):
        raise TypeMismatch(f"get() on non-tuple {format_value(t)!r}")
    if not 0 <= index < len(t):
        raise TypeMismatch(f"tuple index {index} out of range for {format_value(t)}")
    return t[index]


_BINARY = {
    Add: _add,
    Sub: _sub,
    Mul: lambda a, b: canon(as_number(a) * as_number(b)),
    Pow: _pow,
    Eq: values_equal,
    Lt: _lt,
}


def _compile(e: Expr) -> Compiled:
    if isinstance(e, (RatLit, SymLit, BoolLit)):
        value = canon(e.value) if isinstance(e, RatLit) else e.value
        return lambda icol, jcol, i, j, n: value
    if isinstance(e, NegInfLit):
        return lambda icol, jcol, i, j, n: NEG_INF
    if isinstance(e, Var):
        layer = e.layer
        if e.side is Side.I:
            def read_i(icol, jcol, i, j, n):
                if not 0 <= layer < len(icol):
                    raise UnresolvedReference(f"layer {layer} is not available on the I side")
                return icol[layer]
            return read_i

        def read_j(icol, jcol, i, j, n):
            if jcol is None:
                raise UnresolvedReference(f"L{layer}[j] read outside an attention context")
            if not 0 <= layer < len(jcol):
                raise UnresolvedReference(f"layer {layer} is not available on the J side")
            return jcol[layer]
        return read_j
    if isinstance(e, PosI):
        return lambda icol, jcol, i, j, n: i
    if isinstance(e, PosJ):
        def pos_j(icol, jcol, i, j, n):
            if j is None:
                raise UnresolvedReference("j read outside an attention context")
            return j
        return pos_j
    if isinstance(e, Len):
        return lambda icol, jcol, i, j, n: n

    if type(e) in _BINARY:
        op = _BINARY[type(e)]
        if isinstance(e, Pow):
            left, right = _compile(e.base), _compile(e.exponent)
        else:
            left, right = _compile(e.left), _compile(e.right)
        return lambda icol, jcol, i, j, n: op(left(icol, jcol, i, j, n), right(icol, jcol, i, j, n))

    if isinstance(e, Neg):
        inner = _compile(e.operand)
        return lambda icol, jcol, i, j, n: canon(-as_number(inner(icol, jcol, i, j, n)))
    if isinstance(e, And):
        left, right = _compile(e.left), _compile(e.right)
        return lambda icol, jcol, i, j, n: (
            is_truthy(left(icol, jcol, i, j, n)) and is_truthy(right(icol, jcol, i, j, n)))
    if isinstance(e, Or):
        left, right = _compile(e.left), _compile(e.right)
        return lambda icol, jcol, i, j, n: (
            is_truthy(left(icol, jcol, i, j, n)) or is_truthy(right(icol, jcol, i, j, n)))
    if isinstance(e, Not):
        inner = _compile(e.operand)
        return lambda icol, jcol, i, j, n: not is_truthy(inner(icol, jcol, i, j, n))
    if isinstance(e, IfThenElse):
        cond, then, orelse = _compile(e.cond), _compile(e.then), _compile(e.orelse)

        def branch(icol, jcol, i, j, n):
            if is_truthy(cond(icol, jcol, i, j, n)):
                return then(icol, jcol, i, j, n)
            return orelse(icol, jcol, i, j, n)
        return branch
    if isinstance(e, TupleMake):
        items = [_compile(x) for x in e.items]
        return lambda icol, jcol, i, j, n: tuple(f(icol, jcol, i, j, n) for f in items)
    if isinstance(e, TupleGet):
        inner, index = _compile(e.item), e.index
        return lambda icol, jcol, i, j, n: _tuple_get(inner(icol, jcol, i, j, n), index)
    raise TypeMismatch(f"unknown expression node {type(e).__name__}")


@functools.lru_cache(maxsize=4096)
def compile_expr(e: Expr) -> Compiled:
    return _compile(e)


def eval_expr(e: Expr, ctx: EvalContext):
    return compile_expr(e)(ctx.icol, ctx.jcol, ctx.i, ctx.j, ctx.n)


# ---------------------------------------------------------------- scores

@dataclass(frozen=True)
class Carrier:
    """Finite value set read off a column through the I-side key expression."""
    key: Expr
    values: Tuple[Value, ...]


@dataclass(frozen=True)
class ExprScore:
    expr: Expr


@dataclass(frozen=True)
class TableScore:
    carrier: Carrier
    entries: Tuple[Tuple[Optional[Rat], ...], ...]


@dataclass(frozen=True)
class SeparableScore:
    terms: Tuple[Tuple[Expr, Expr], ...]
    carrier: Optional[Carrier] = None

    @property
    def k(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class BilinearScore:
    layer: int
    matrix: Tuple[Tuple[Rat, ...], ...]


ScoreSpec = Union[ExprScore, TableScore, SeparableScore, BilinearScore]


def _vector(v) -> Tuple[Rat, ...]:
    if isinstance(v, tuple):
        return tuple(as_number(x) for x in v)
    return (as_number(v),)


def _compile_score(spec: ScoreSpec) -> Compiled:
    if isinstance(spec, ExprScore):
        inner = compile_expr(spec.expr)
        return lambda icol, jcol, i, j, n: as_score(inner(icol, jcol, i, j, n))

    if isinstance(spec, TableScore):
        key_i = compile_expr(spec.carrier.key)
        key_j = compile_expr(mirror(spec.carrier.key))
        index = {value_key(v): pos for pos, v in enumerate(spec.carrier.values)}
        entries = spec.entries

        def lookup(icol, jcol, i, j, n):
            try:
                row = index[value_key(key_i(icol, jcol, i, j, n))]
                col = index[value_key(key_j(icol, jcol, i, j, n))]
                entry = entries[row][col]
            except (KeyError, IndexError):
                raise NonTotalTable("score table has no entry for this pair of columns")
            if entry is None:
                raise NonTotalTable(f"score table entry ({row}, {col}) is missing")
            return canon(entry)
        return lookup

    if isinstance(spec, SeparableScore):
        terms = [(compile_expr(f), compile_expr(g)) for f, g in spec.terms]

        def separable(icol, jcol, i, j, n):
            total = 0
            for f, g in terms:
                total += as_number(f(icol, jcol, i, j, n)) * as_number(g(icol, jcol, i, j, n))
            return canon(total)
        return separable

    if isinstance(spec, BilinearScore):
        layer = spec.layer
        rows = len(spec.matrix)
        nonzero = [(a, b, m) for a, row in enumerate(spec.matrix) for b, m in enumerate(row) if m]

        def bilinear(icol, jcol, i, j, n):
            if jcol is None:
                raise UnresolvedReference("bilinear score needs a J column")
            x, y = _vector(icol[layer]), _vector(jcol[layer])
            if len(x) != rows or len(y) != len(spec.matrix[0]):
                raise TypeMismatch(f"layer {layer} vectors do not match the {rows}-row score matrix")
            return canon(sum((x[a] * m * y[b] for a, b, m in nonzero), 0))
        return bilinear

    raise TypeMismatch(f"unknown score spec {type(spec).__name__}")


@functools.lru_cache(maxsize=1024)
def compile_score(spec: ScoreSpec) -> Compiled:
    return _compile_score(spec)


def score_value(spec: ScoreSpec, ctx: EvalContext) -> ExtScore:
    return compile_score(spec)(ctx.icol, ctx.jcol, ctx.i, ctx.j, ctx.n)


def split_separable(e: Expr) -> List[Tuple[Expr, Expr]]:
    """Expand an expression score into (I-side, J-side) product terms.

    Handles sums, differences, negation, products and small constant powers of
    one-sided subexpressions. Raises NonSeparableScorePresent otherwise.
    """
    refs = expr_refs(e)
    if not refs.uses_j:
        return [(e, RatLit(1))]
    if not refs.uses_i:
        return [(RatLit(1), e)]
    if isinstance(e, Add):
        return split_separable(e.left) + split_separable(e.right)
    if isinstance(e, Sub):
        return split_separable(e.left) + [(negate(f), g) for f, g in split_separable(e.right)]
    if isinstance(e, Neg):
        return [(negate(f), g) for f, g in split_separable(e.operand)]
    if isinstance(e, Mul):
        return _product(split_separable(e.left), split_separable(e.right))
    if isinstance(e, Pow) and isinstance(e.exponent, RatLit) and isinstance(e.exponent.value, int) \
            and 1 <= e.exponent.value <= 4:
        base = split_separable(e.base)
        terms = base
        for _ in range(e.exponent.value - 1):
            terms = _product(terms, base)
        return terms
    raise NonSeparableScorePresent(f"score mixes I and J sides inside a {type(e).__name__}")


def negate(e: Expr) -> Expr:
    if isinstance(e, RatLit):
        return RatLit(canon(-e.value))
    if isinstance(e, Neg):
        return e.operand
    return Neg(e)


def times(a: Expr, b: Expr) -> Expr:
    if a == RatLit(1):
        return b
    if b == RatLit(1):
        return a
    return Mul(a, b)


def _product(left, right):
    return [(times(f1, f2), times(g1, g2)) for f2, g2 in right for f1, g1 in left]


def is_separable(spec: ScoreSpec) -> bool:
    if isinstance(spec, (TableScore, SeparableScore, BilinearScore)):
        return True
    try:
        split_separable(spec.expr)
    except NonSeparableScorePresent:
        return False
    return True


# ---------------------------------------------------------------- program

@dataclass(frozen=True)
class Pointwise:
    value: Expr


@dataclass(frozen=True)
class Attention:
    mask: Masking
    tie: TieBreak
    score: ScoreSpec
    value: Expr
    default: Expr


Line = Union[Pointwise, Attention]


@dataclass(frozen=True)
class Initialization:
    kind: InitKind
    alphabet: Tuple[str, ...]
    expr: Optional[Expr] = None

    @property
    def positional(self) -> bool:
        """True when i and n are readable by the program."""
        if self.kind is InitKind.CHAR_POS_LEN:
            return True
        if self.kind is InitKind.CUSTOM:
            refs = expr_refs(self.expr)
            return refs.pos_i and refs.length
        return False

    @property
    def finite_type(self) -> bool:
        if self.kind is InitKind.CHAR_ONLY:
            return True
        if self.kind is InitKind.CUSTOM:
            return not expr_refs(self.expr).positional
        return False

    def encode(self, letter: str, i: int, n: int) -> Value:
        if self.kind is InitKind.CHAR_ONLY:
            return letter
        if self.kind is InitKind.CHAR_POS_LEN:
            return (letter, i, n)
        return compile_expr(self.expr)((letter,), None, i, None, n)


@dataclass(frozen=True)
class Recognizer:
    init: Initialization
    lines: Tuple[Line, ...]
    valid: Expr
    read_pos: ReadPos = ReadPos.LAST
    empty_word_accepts: bool = False
    vector_typed: bool = False

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return self.init.alphabet

    @property
    def depth(self) -> int:
        return len(self.lines)

    def attention_lines(self) -> List[Tuple[int, Attention]]:
        return [(idx, line) for idx, line in enumerate(self.lines, start=1)
                if isinstance(line, Attention)]


# ---------------------------------------------------------------- execution

@dataclass
class Execution:
    word: str
    layers: List[List[Value]]
    selections: Dict[int, List[Optional[int]]] = field(default_factory=dict)
    scores: Dict[int, List[List[Tuple[int, ExtScore]]]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.word)

    def column(self, p: int) -> tuple:
        return tuple(layer[p] for layer in self.layers)


def _columns(layers: List[List[Value]], n: int) -> List[tuple]:
    return [tuple(layer[p] for layer in layers) for p in range(n)]


def _attend(line: Attention, layers, n: int, record_scores: Optional[str] = None):
    columns = _columns(layers, n)
    score_fn = compile_score(line.score)
    value_fn = compile_expr(line.value)
    default_fn = compile_expr(line.default)
    rightmost = line.tie is TieBreak.RIGHTMOST

    values, selected, rows = [], [], []
    for i in range(n):
        icol = columns[i]
        best = best_j = None
        row = []
        for j in admitted(line.mask, i, n):
            s = score_fn(icol, columns[j], i, j, n)
            if record_scores == 'admitted':
                row.append((j, s))
            if best_j is None or s > best or (rightmost and s == best):
                best, best_j = s, j
        if record_scores == 'all':
            row = [(j, score_fn(icol, columns[j], i, j, n)) for j in range(n)]
        if best_j is None:
            values.append(default_fn(icol, None, i, None, n))
        else:
            values.append(value_fn(icol, columns[best_j], i, best_j, n))
        selected.append(best_j)
        rows.append(row)
    return values, selected, rows


def attention_step(line: Attention, layers: List[List[Value]], n: int) -> List[Value]:
    """New layer produced by one attention line over the layers computed so far."""
    return _attend(line, layers, n)[0]


def execute(rec: Recognizer, word: Sequence[str], record_scores: Optional[str] = None) -> Execution:
    """Run every line on word, keeping selected indices (and optionally score rows).

    record_scores is None, 'admitted' (mask-admitted pairs) or 'all' (every pair).
    """
    word = ''.join(word)
    n = len(word)
    alphabet = set(rec.alphabet)
    for letter in word:
        if letter not in alphabet:
            raise UnknownLetter(f"letter {letter!r} is not in the alphabet {''.join(rec.alphabet)!r}")

    layers = [[rec.init.encode(letter, p, n) for p, letter in enumerate(word)]]
    run = Execution(word=word, layers=layers)
    for idx, line in enumerate(rec.lines, start=1):
        if isinstance(line, Pointwise):
            fn = compile_expr(line.value)
            layers.append([fn(col, None, p, None, n) for p, col in enumerate(_columns(layers, n))])
            continue
        values, selected, rows = _attend(line, layers, n, record_scores)
        layers.append(values)
        run.selections[idx] = selected
        if record_scores:
            run.scores[idx] = rows
    return run


def run_program(rec: Recognizer, word: Sequence[str]) -> List[List[Value]]:
    return execute(rec, word).layers


def read_position(rec: Recognizer, n: int) -> int:
    return n - 1 if rec.read_pos is ReadPos.LAST else 0


def accepts_execution(rec: Recognizer, run: Execution) -> bool:
    if run.n == 0:
        return rec.empty_word_accepts
    pos = read_position(rec, run.n)
    return is_truthy(compile_expr(rec.valid)(run.column(pos), None, pos, None, run.n))


def recognize(rec: Recognizer, word: Sequence[str]) -> bool:
    if len(word) == 0:
        return rec.empty_word_accepts
    return accepts_execution(rec, execute(rec, word))


# ---------------------------------------------------------------- words

def words_of_length(alphabet: Sequence[str], length: int) -> Iterator[str]:
    for letters in product(alphabet, repeat=length):
        yield ''.join(letters)


def words_up_to(alphabet: Sequence[str], max_len: int, min_len: int = 0) -> Iterator[str]:
    """Shortlex enumeration (by length, then alphabet order)."""
    for length in range(min_len, max_len + 1):
        yield from words_of_length(alphabet, length)


def count_words(alphabet: Sequence[str], max_len: int, min_len: int = 0) -> int:
    k = len(alphabet)
    return sum(k ** length for length in range(min_len, max_len + 1))


# ---------------------------------------------------------------- static checks

def _check_layers(refs: ExprRefs, limit: int, where: str):
    for layer in refs.layers_i | refs.layers_j:
        if not 0 <= layer < limit:
            raise StaticCheckError(
                f"{where} reads layer {layer}, but only layers below {limit} exist at this point")


def _check_i_only(refs: ExprRefs, where: str):
    if refs.uses_j:
        raise StaticCheckError(f"{where} may not reference the attended column (j)")


def validate(rec: Recognizer) -> Recognizer:
    """Raise StaticCheckError on the first structural violation; return rec otherwise."""
    if not rec.alphabet:
        raise StaticCheckError("alphabet is empty")
    if len(set(rec.alphabet)) != len(rec.alphabet):
        raise StaticCheckError("alphabet lists a letter twice")

    if rec.init.kind is InitKind.CUSTOM:
        if rec.init.expr is None:
            raise StaticCheckError("custom initialization needs an expression")
        refs = expr_refs(rec.init.expr)
        _check_i_only(refs, "initialization")
        _check_layers(refs, 1, "initialization")

    positional = rec.init.positional

    def check(e: Expr, where: str, limit: int, i_only: bool, allow_neg_inf: bool = False):
        refs = expr_refs(e)
        _check_layers(refs, limit, where)
        if i_only:
            _check_i_only(refs, where)
        if refs.positional and not positional:
            raise StaticCheckError(f"{where} reads i, j or n but the initialization does not expose positions")
        if refs.neg_inf and not allow_neg_inf:
            raise StaticCheckError(f"{where} uses -inf outside an attention score")

    for idx, line in enumerate(rec.lines, start=1):
        where = f"L{idx}"
        if isinstance(line, Pointwise):
            check(line.value, where, idx, i_only=True)
            continue
        check(line.value, f"{where} value", idx, i_only=False)
        check(line.default, f"{where} default", idx, i_only=True)
        if line.mask is Masking.STRICT_FUTURE and rec.read_pos is ReadPos.FIRST:
            raise StaticCheckError(f"{where} is future-masked; such programs are read at the last position")
        score = line.score
        if isinstance(score, ExprScore):
            check(score.expr, f"{where} score", idx, i_only=False, allow_neg_inf=True)
        elif isinstance(score, TableScore):
            check(score.carrier.key, f"{where} table key", idx, i_only=True)
            size = len(score.carrier.values)
            if len(score.entries) != size or any(len(row) != size for row in score.entries):
                raise StaticCheckError(f"{where} score table is not {size}x{size}")
        elif isinstance(score, SeparableScore):
            for f, g in score.terms:
                check(f, f"{where} separable f", idx, i_only=True)
                g_refs = expr_refs(g)
                if g_refs.uses_i:
                    raise StaticCheckError(f"{where} separable g may not reference the current column (i)")
                check(g, f"{where} separable g", idx, i_only=False)
        elif isinstance(score, BilinearScore):
            if not rec.vector_typed:
                raise StaticCheckError(f"{where} has a bilinear score but the program is not vector-typed")
            if not 0 <= score.layer < idx:
                raise StaticCheckError(f"{where} bilinear score reads layer {score.layer}")
            width = len(score.matrix[0]) if score.matrix else 0
            if not score.matrix or any(len(row) != width for row in score.matrix):
                raise StaticCheckError(f"{where} bilinear matrix is not rectangular")

    check(rec.valid, "acceptance predicate", rec.depth + 1, i_only=True)
    return rec


# ---------------------------------------------------------------- classification

@dataclass(frozen=True)
class Classification:
    finite_type: bool
    separable_scores: bool
    bilinear_scores: bool
    binary_scores: bool
    maskings_used: frozenset
    ties_possible_up_to: bool
    tie_bound: int
    depth: int
    attention_lines: int

    @property
    def masked(self) -> bool:
        return any(m is not Masking.NO_MASK for m in self.maskings_used)

    @property
    def diagram_class(self) -> str:
        return diagram_class(self)

    def as_dict(self) -> dict:
        return {
            'finite_type': self.finite_type,
            'separable_scores': self.separable_scores,
            'bilinear_scores': self.bilinear_scores,
            'binary_scores': self.binary_scores,
            'maskings_used': sorted(m.value for m in self.maskings_used),
            'ties_possible_up_to': self.ties_possible_up_to,
            'tie_bound': self.tie_bound,
            'depth': self.depth,
            'attention_lines': self.attention_lines,
            'diagram_class': self.diagram_class,
            'diagram_classes': list(diagram_classes(self)),
        }


# F- finite-type initialization, M masks allowed, G scores beyond bilinear forms
DIAGRAM_CLASSES = ('F-UHAT', 'F-MUHAT', 'F-GUHAT', 'F-MGUHAT', 'UHAT', 'MUHAT', 'GUHAT', 'MGUHAT')


def _class_name(finite: bool, masked: bool, general: bool) -> str:
    return ('F-' if finite else '') + ('M' if masked else '') + ('G' if general else '') + 'UHAT'


def diagram_class(c: Classification) -> str:
    """Smallest class of the inclusion diagram the program is syntactically in."""
    return _class_name(c.finite_type, c.masked, not c.bilinear_scores)


def diagram_classes(c: Classification) -> Tuple[str, ...]:
    """Every diagram class containing the program, its own class first."""
    names = {
        _class_name(finite, masked, general)
        for finite in {c.finite_type, False}
        for masked in {c.masked, True}
        for general in {not c.bilinear_scores, True}
    }
    return tuple(name for name in DIAGRAM_CLASSES if name in names)


def _uses_positions(rec: Recognizer) -> bool:
    exprs = [rec.valid]
    for line in rec.lines:
        if isinstance(line, Pointwise):
            exprs.append(line.value)
        else:
            exprs += [line.value, line.default]
            if isinstance(line.score, ExprScore):
                exprs.append(line.score.expr)
            elif isinstance(line.score, TableScore):
                exprs.append(line.score.carrier.key)
            elif isinstance(line.score, SeparableScore):
                exprs += [x for term in line.score.terms for x in term]
                if line.score.carrier is not None:
                    exprs.append(line.score.carrier.key)
    return any(expr_refs(e).positional for e in exprs)


def observed_scores(rec: Recognizer, max_len: int, min_len: int = 1) -> Iterator[Tuple[int, str, int, List[Tuple[int, ExtScore]]]]:
    """Yield (line, word, i, admitted score row) for every word up to max_len."""
    for word in words_up_to(rec.alphabet, max_len, min_len=max(1, min_len)):
        run = execute(rec, word, record_scores='admitted')
        for idx, rows in run.scores.items():
            for i, row in enumerate(rows):
                yield idx, word, i, row


def has_tie(row: List[Tuple[int, ExtScore]]) -> bool:
    if len(row) < 2:
        return False
    best = max(s for _, s in row)
    return sum(1 for _, s in row if s == best) > 1


def classify_program(rec: Recognizer, bound: Optional[int] = None,
                     binary_len: Optional[int] = None) -> Classification:
    from .config import get_settings
    settings = get_settings()
    bound = settings.classify_bound if bound is None else bound
    binary_len = settings.binary_check_len if binary_len is None else binary_len

    attention = [line for _, line in rec.attention_lines()]
    scores = [line.score for line in attention]

    binary = all(
        all(entry in (0, 1) for row in s.entries for entry in row)
        for s in scores if isinstance(s, TableScore)
    )
    ties = False
    if attention:
        for idx, word, i, row in observed_scores(rec, max(bound, binary_len)):
            if binary and len(word) <= binary_len:
                binary = all(s in (0, 1) for _, s in row)
            if not ties and len(word) <= bound:
                ties = has_tie(row)

    result = Classification(
        finite_type=rec.init.finite_type and not _uses_positions(rec),
        separable_scores=all(is_separable(s) for s in scores),
        bilinear_scores=all(isinstance(s, BilinearScore) for s in scores),
        binary_scores=binary,
        maskings_used=frozenset(line.mask for line in attention),
        ties_possible_up_to=ties,
        tie_bound=bound,
        depth=rec.depth,
        attention_lines=len(attention),
    )
    logger.debug("classified program: %s", result.as_dict())
    return result
