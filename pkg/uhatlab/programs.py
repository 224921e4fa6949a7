"""Library of concrete recognizers paired with direct string oracles."""
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Sequence
import re

from .core_ir import (
    Add, And, Attention, BoolLit, Eq, Expr, ExprScore, IfThenElse, InitKind,
    Initialization, Len, Lt, Masking, Mul, Neg, Not, Or, Pointwise, PosI, PosJ,
    Pow, RatLit, ReadPos, Recognizer, SeparableScore, Side, Sub, SymLit,
    TieBreak, TupleGet, Var, validate,
)
from .errors import AlphabetTooSmall, InvalidDepth, UnknownOracle

WordPredicate = Callable[[str], bool]


@dataclass(frozen=True)
class NamedRecognizer:
    name: str
    rec: Recognizer
    oracle: WordPredicate


# ---------------------------------------------------------------- oracles

def is_palindrome(word: str) -> bool:
    return word == word[::-1]


def max_depth(word: str) -> int:
    """Deepest nesting reached while scanning; -1 if the counter ever goes negative."""
    depth = deepest = 0
    for letter in word:
        depth += 1 if letter == '(' else -1
        if depth < 0:
            return -1
        deepest = max(deepest, depth)
    return deepest


def dyck_oracle(depth_bound: int) -> WordPredicate:
    if depth_bound < 1:
        raise InvalidDepth(f"depth bound must be at least 1, got {depth_bound}")

    def accepts(word: str) -> bool:
        if word.count('(') != word.count(')'):
            return False
        deepest = max_depth(word)
        return 0 <= deepest <= depth_bound
    return accepts


def hamming_weight(word: str) -> int:
    return sum(1 for letter in word if letter == '1')


def is_majority(word: str) -> bool:
    return 2 * hamming_weight(word) >= len(word)


def is_a_star_b_star(word: str) -> bool:
    return 'ba' not in word


def builtin_language_oracles() -> Dict[str, WordPredicate]:
    oracles = {
        'palindromes': is_palindrome,
        'majority': is_majority,
        'all-strings': lambda word: True,
        'empty-language': lambda word: False,
        'a*b*': is_a_star_b_star,
        'contains-a': lambda word: 'a' in word,
    }
    for depth in range(1, 5):
        oracles[f'dyck1({depth})'] = dyck_oracle(depth)
    return oracles


_DYCK_NAME = re.compile(r'dyck1\((\d+)\)$')


def lookup_oracle(name: str) -> WordPredicate:
    oracles = builtin_language_oracles()
    if name in oracles:
        return oracles[name]
    match = _DYCK_NAME.match(name)
    if match:
        return dyck_oracle(int(match.group(1)))
    raise UnknownOracle(f"unknown language {name!r}; known: {', '.join(sorted(oracles))}, dyck1(D)")


# ---------------------------------------------------------------- palindromes

def _letter(side: Side) -> Expr:
    return TupleGet(Var(side, 0), 0)


def _bit(cond: Expr) -> Expr:
    return IfThenElse(cond, RatLit(1), RatLit(0))


def _check_alphabet(alphabet: Sequence[str]) -> tuple:
    alphabet = tuple(alphabet)
    if len(alphabet) < 2:
        raise AlphabetTooSmall(f"palindromes need at least 2 letters, got {len(alphabet)}")
    return alphabet


def _palindrome(name: str, alphabet: Sequence[str], line1: Attention, line2: Attention) -> NamedRecognizer:
    rec = Recognizer(
        init=Initialization(InitKind.CHAR_POS_LEN, _check_alphabet(alphabet)),
        lines=(line1, line2),
        valid=Eq(Var(Side.I, 2), RatLit(1)),
        empty_word_accepts=True,
    )
    return NamedRecognizer(name, validate(rec), is_palindrome)


# n - 1 - i
_MIRROR_OF_I = Sub(Sub(Len(), RatLit(1)), PosI())

_ALL_MATCHED = Attention(
    Masking.NO_MASK, TieBreak.RIGHTMOST,
    score=ExprScore(Neg(Var(Side.J, 1))),
    value=Var(Side.J, 1),
    default=RatLit(0),
)


def build_palindrome_guhat(alphabet: Sequence[str] = ('a', 'b')) -> NamedRecognizer:
    """Layer 1 compares each letter with its mirror image, layer 2 looks for a mismatch."""
    line1 = Attention(
        Masking.NO_MASK, TieBreak.RIGHTMOST,
        score=ExprScore(Neg(Pow(Sub(_MIRROR_OF_I, PosJ()), RatLit(2)))),
        value=_bit(Eq(_letter(Side.I), _letter(Side.J))),
        default=RatLit(0),
    )
    return _palindrome('palindrome', alphabet, line1, _ALL_MATCHED)


def build_palindrome_separable(alphabet: Sequence[str] = ('a', 'b')) -> NamedRecognizer:
    # -(n-1-i-j)^2 = -(n-1-i)^2 + 2(n-1-i)*j - j^2
    terms = (
        (Neg(Pow(_MIRROR_OF_I, RatLit(2))), RatLit(1)),
        (Mul(RatLit(2), _MIRROR_OF_I), PosJ()),
        (RatLit(1), Neg(Pow(PosJ(), RatLit(2)))),
    )
    line1 = Attention(
        Masking.NO_MASK, TieBreak.RIGHTMOST,
        score=SeparableScore(terms),
        value=_bit(Eq(_letter(Side.I), _letter(Side.J))),
        default=RatLit(0),
    )
    return _palindrome('palindrome-separable', alphabet, line1, _ALL_MATCHED)


def build_palindrome_masked(alphabet: Sequence[str] = ('a', 'b')) -> NamedRecognizer:
    """Future-masked palindromes: only the right half of the word checks its mirror.

    Positions with 2i <= n-1 have their mirror at or after themselves, so they
    report 1 unconditionally and the comparison happens at the mirror.
    """
    left_half = Not(Lt(Sub(Len(), RatLit(1)), Mul(RatLit(2), PosI())))
    line1 = Attention(
        Masking.STRICT_FUTURE, TieBreak.RIGHTMOST,
        score=ExprScore(Neg(Pow(Sub(_MIRROR_OF_I, PosJ()), RatLit(2)))),
        value=_bit(Or(Eq(_letter(Side.I), _letter(Side.J)), left_half)),
        default=RatLit(1),
    )
    line2 = Attention(
        Masking.STRICT_FUTURE, TieBreak.RIGHTMOST,
        score=ExprScore(Neg(Var(Side.J, 1))),
        value=_bit(And(Eq(Var(Side.I, 1), RatLit(1)), Eq(Var(Side.J, 1), RatLit(1)))),
        default=Var(Side.I, 1),
    )
    return _palindrome('palindrome-masked', alphabet, line1, line2)


# ---------------------------------------------------------------- Dyck-(1,D)

OPEN, CLOSE = '(', ')'


def _is_open(side: Side) -> Expr:
    return Eq(Var(side, 0), SymLit(OPEN))


def build_dyck1(depth_bound: int) -> NamedRecognizer:
    """Finite-type future-masked recognizer for balanced brackets of depth <= D.

    A position is a level-1 double when its letter repeats the previous letter;
    a level-k double repeats the letter of the previous level-(k-1) double.
    For a valid word the level-k doubles alternate between opening and closing,
    so the running depth is rebuilt top-down from the last double of every level.
    The word is accepted when that reconstruction is consistent with every step
    and ends at 0.

    This uses 2D attention lines and two pointwise lines (2D+2 in all). It does
    not follow the D+1-line scheme that carries a running depth saturated at
    D+1, so it is checked only extensionally against dyck_oracle(D).
    """
    oracle = dyck_oracle(depth_bound)
    D = depth_bound
    lines: List = []

    # isdbl_k at layer k, k = 1..D-1
    def doubled(k: int, side: Side) -> Expr:
        return BoolLit(True) if k == 0 else Var(side, k)

    for k in range(1, D):
        lines.append(Attention(
            Masking.STRICT_FUTURE, TieBreak.RIGHTMOST,
            score=ExprScore(doubled(k - 1, Side.J)),
            value=And(And(doubled(k - 1, Side.I), doubled(k - 1, Side.J)),
                      Eq(Var(Side.I, 0), Var(Side.J, 0))),
            default=BoolLit(False),
        ))

    # N_k for k = D-1 down to 1: height contributed by levels above k
    height_layer = {}

    def above(k: int, side: Side) -> Expr:
        return RatLit(0) if k >= D else Var(side, height_layer[k])

    def level_height(k: int, side: Side) -> Expr:
        return Add(above(k + 1, side), IfThenElse(_is_open(side), RatLit(1), RatLit(0)))

    for k in range(D - 1, 0, -1):
        lines.append(Attention(
            Masking.STRICT_FUTURE, TieBreak.RIGHTMOST,
            score=ExprScore(doubled(k, Side.J)),
            value=IfThenElse(doubled(k, Side.I), level_height(k, Side.I),
                             IfThenElse(doubled(k, Side.J), level_height(k, Side.J), RatLit(0))),
            default=IfThenElse(doubled(k, Side.I), level_height(k, Side.I), RatLit(0)),
        ))
        height_layer[k] = len(lines)

    lines.append(Pointwise(level_height(0, Side.I)))
    h = len(lines)
    step = IfThenElse(_is_open(Side.I), RatLit(1), RatLit(-1))

    lines.append(Attention(
        Masking.STRICT_FUTURE, TieBreak.RIGHTMOST,
        score=ExprScore(BoolLit(True)),
        value=Eq(Var(Side.I, h), Add(Var(Side.J, h), step)),
        default=Eq(Var(Side.I, h), step),
    ))
    ok = len(lines)
    lines.append(Attention(
        Masking.STRICT_FUTURE, TieBreak.RIGHTMOST,
        score=ExprScore(Not(Var(Side.J, ok))),
        value=And(Var(Side.I, ok), Var(Side.J, ok)),
        default=Var(Side.I, ok),
    ))
    all_ok = len(lines)
    lines.append(Pointwise(And(Var(Side.I, all_ok), Eq(Var(Side.I, h), RatLit(0)))))

    rec = Recognizer(
        init=Initialization(InitKind.CHAR_ONLY, (OPEN, CLOSE)),
        lines=tuple(lines),
        valid=Var(Side.I, len(lines)),
        empty_word_accepts=True,
    )
    return NamedRecognizer(f'dyck1({D})', validate(rec), oracle)


def strip_masks(rec: Recognizer) -> Recognizer:
    lines = tuple(replace(line, mask=Masking.NO_MASK) if isinstance(line, Attention) else line
                  for line in rec.lines)
    return replace(rec, lines=lines)


def needmask_candidates() -> List[NamedRecognizer]:
    """Unmasked finite-type attempts at Dyck languages, kept for differential tests."""
    candidates = []
    for depth in (1, 2):
        fixture = build_dyck1(depth)
        candidates.append(NamedRecognizer(f'{fixture.name}-unmasked', strip_masks(fixture.rec), fixture.oracle))
    return candidates


# ---------------------------------------------------------------- BRASP fixtures

def _column_only(name: str, alphabet: Sequence[str], tie: TieBreak, score: Expr, value: Expr,
                 oracle: WordPredicate) -> NamedRecognizer:
    rec = Recognizer(
        init=Initialization(InitKind.CHAR_ONLY, tuple(alphabet)),
        lines=(Attention(Masking.NO_MASK, tie, ExprScore(score), value, BoolLit(False)),),
        valid=Var(Side.I, 1),
    )
    return NamedRecognizer(name, validate(rec), oracle)


def _first_non_c(word: str):
    rest = [letter for letter in word if letter != 'c']
    return rest[0] if rest else None


def _last_non_c(word: str):
    rest = [letter for letter in word if letter != 'c']
    return rest[-1] if rest else None


def build_brasp_fixtures() -> List[NamedRecognizer]:
    """Unmasked boolean programs whose attention reads only the attended column."""
    letter_j = Var(Side.J, 0)
    return [
        _column_only('contains-a', ('a', 'b'), TieBreak.LEFTMOST,
                     Eq(letter_j, SymLit('a')), Eq(letter_j, SymLit('a')),
                     lambda word: 'a' in word),
        _column_only('first-non-c-is-a', ('a', 'b', 'c'), TieBreak.LEFTMOST,
                     Not(Eq(letter_j, SymLit('c'))), Eq(letter_j, SymLit('a')),
                     lambda word: _first_non_c(word) == 'a'),
        _column_only('last-non-c-is-b', ('a', 'b', 'c'), TieBreak.RIGHTMOST,
                     Not(Eq(letter_j, SymLit('c'))), Eq(letter_j, SymLit('b')),
                     lambda word: _last_non_c(word) == 'b'),
    ]


def build_contains_a_past() -> NamedRecognizer:
    """Past-masked 'contains a', read at the first position."""
    own_a = Eq(Var(Side.I, 0), SymLit('a'))
    seen_a = Eq(Var(Side.J, 0), SymLit('a'))
    rec = Recognizer(
        init=Initialization(InitKind.CHAR_ONLY, ('a', 'b')),
        lines=(Attention(Masking.STRICT_PAST, TieBreak.LEFTMOST, ExprScore(seen_a),
                         value=Or(own_a, seen_a), default=own_a),),
        valid=Var(Side.I, 1),
        read_pos=ReadPos.FIRST,
    )
    return NamedRecognizer('contains-a-past', validate(rec), lambda word: 'a' in word)


def library() -> List[NamedRecognizer]:
    """Every shipped recognizer fixture."""
    return [
        build_palindrome_guhat(),
        build_palindrome_masked(),
        build_palindrome_separable(),
        build_dyck1(1),
        build_dyck1(2),
        build_dyck1(3),
        *build_brasp_fixtures(),
        build_contains_a_past(),
    ]
