"""LTL and first-order logic over finite words.

Both logics share the boolean connectives. Until and Since are strict: the
witness lies strictly after (before) the current position and the left
operand must hold strictly in between.
"""
from dataclasses import dataclass, fields
from typing import Callable, Dict, FrozenSet, Iterator, List, Mapping, Optional
import re

from .errors import (
    EmptyWord, FreeVariable, LogicError, ModeFormulaMismatch, PositionOutOfRange,
    UnknownMonPred,
)


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class LetterPred(Formula):
    letters: FrozenSet[str]


@dataclass(frozen=True)
class MonPred(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Yesterday(Formula):
    operand: Formula


@dataclass(frozen=True)
class Since(Formula):
    left: Formula
    right: Formula


# first-order atoms and quantifiers

@dataclass(frozen=True)
class LetterAt(Formula):
    letters: FrozenSet[str]
    var: str


@dataclass(frozen=True)
class MonPredAt(Formula):
    name: str
    var: str


@dataclass(frozen=True)
class Less(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForAll(Formula):
    var: str
    body: Formula


def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    for f in fields(phi):
        child = getattr(phi, f.name)
        if isinstance(child, Formula):
            yield from subformulas(child)


def letter(letters: str) -> LetterPred:
    return LetterPred(frozenset(letters))


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def globally(phi: Formula) -> Formula:
    """phi here and at every later position."""
    return And(phi, Not(Until(TrueF(), Not(phi))))


def eventually(phi: Formula) -> Formula:
    return Or(phi, Until(TrueF(), phi))


def is_last() -> Formula:
    return Not(Next(TrueF()))


# ---------------------------------------------------------------- monadic predicates

@dataclass(frozen=True)
class MonadicPredicate:
    name: str
    family: Callable[[int, int], bool]  # (n, position) -> bool

    def __call__(self, n: int, position: int) -> bool:
        return bool(self.family(n, position))


_PARAMETRIC = [
    (re.compile(r'mod_(\d+)_(\d+)$'), lambda m, r: (lambda n, i: i % int(m) == int(r))),
    (re.compile(r'ge_(\d+)$'), lambda k: (lambda n, i: i >= int(k))),
    (re.compile(r'lt_(\d+)$'), lambda k: (lambda n, i: i < int(k))),
]


class MonPredRegistry:
    """Named numerical predicates; mod_<m>_<r>, ge_<k> and lt_<k> are built on demand."""

    def __init__(self, predicates: Optional[Mapping[str, Callable[[int, int], bool]]] = None):
        self.predicates: Dict[str, MonadicPredicate] = {
            'first': MonadicPredicate('first', lambda n, i: i == 0),
            'last': MonadicPredicate('last', lambda n, i: i == n - 1),
            'even': MonadicPredicate('even', lambda n, i: i % 2 == 0),
            'odd': MonadicPredicate('odd', lambda n, i: i % 2 == 1),
            'middle': MonadicPredicate('middle', lambda n, i: 2 * i == n - 1),
        }
        for name, family in (predicates or {}).items():
            self.register(name, family)

    def register(self, name: str, family: Callable[[int, int], bool]) -> None:
        self.predicates[name] = MonadicPredicate(name, family)

    def lookup(self, name: str) -> MonadicPredicate:
        if name in self.predicates:
            return self.predicates[name]
        for pattern, make in _PARAMETRIC:
            match = pattern.match(name)
            if match:
                if name.startswith('mod_') and int(match.group(1)) == 0:
                    break
                predicate = MonadicPredicate(name, make(*match.groups()))
                self.predicates[name] = predicate
                return predicate
        raise UnknownMonPred(f"unknown numerical predicate {name!r}")


DEFAULT_REGISTRY = MonPredRegistry()


# ---------------------------------------------------------------- LTL

def _truth_table(phi: Formula, word: str, env: MonPredRegistry) -> List[bool]:
    """Truth value of phi at every position of word."""
    n = len(word)
    if isinstance(phi, TrueF):
        return [True] * n
    if isinstance(phi, FalseF):
        return [False] * n
    if isinstance(phi, LetterPred):
        return [c in phi.letters for c in word]
    if isinstance(phi, MonPred):
        predicate = env.lookup(phi.name)
        return [predicate(n, i) for i in range(n)]
    if isinstance(phi, Not):
        return [not v for v in _truth_table(phi.operand, word, env)]
    if isinstance(phi, (And, Or)):
        left, right = _truth_table(phi.left, word, env), _truth_table(phi.right, word, env)
        if isinstance(phi, And):
            return [a and b for a, b in zip(left, right)]
        return [a or b for a, b in zip(left, right)]
    if isinstance(phi, Next):
        inner = _truth_table(phi.operand, word, env)
        return inner[1:] + [False]
    if isinstance(phi, Yesterday):
        inner = _truth_table(phi.operand, word, env)
        return [False] + inner[:-1]
    if isinstance(phi, Until):
        left, right = _truth_table(phi.left, word, env), _truth_table(phi.right, word, env)
        result = [False] * n
        for i in range(n - 2, -1, -1):
            result[i] = right[i + 1] or (left[i + 1] and result[i + 1])
        return result
    if isinstance(phi, Since):
        left, right = _truth_table(phi.left, word, env), _truth_table(phi.right, word, env)
        result = [False] * n
        for i in range(1, n):
            result[i] = right[i - 1] or (left[i - 1] and result[i - 1])
        return result
    raise LogicError(f"{type(phi).__name__} is not an LTL formula")


def eval_ltl(phi: Formula, word: str, i: int, env: Optional[MonPredRegistry] = None) -> bool:
    if not 0 <= i < len(word):
        raise PositionOutOfRange(f"position {i} is outside a word of length {len(word)}")
    return _truth_table(phi, word, env or DEFAULT_REGISTRY)[i]


LTL_MODES = ('fltl', 'pltl', 'ltl')


def ltl_recognize(phi: Formula, word: str, mode: str = 'fltl',
                  env: Optional[MonPredRegistry] = None) -> bool:
    """Accept word if phi holds at position 0 (fltl, ltl) or at the last position (pltl)."""
    if mode not in LTL_MODES:
        raise ValueError(f"unknown LTL mode {mode!r}")
    if not word:
        raise EmptyWord("LTL acceptance is undefined on the empty word")
    nodes = list(subformulas(phi))
    if mode == 'fltl' and any(isinstance(x, (Yesterday, Since)) for x in nodes):
        raise ModeFormulaMismatch("future LTL formulas may not use Y or S")
    if mode == 'pltl' and any(isinstance(x, (Next, Until)) for x in nodes):
        raise ModeFormulaMismatch("past LTL formulas may not use X or U")
    position = len(word) - 1 if mode == 'pltl' else 0
    return eval_ltl(phi, word, position, env)


# ---------------------------------------------------------------- FO

def free_variables(phi: Formula) -> FrozenSet[str]:
    if isinstance(phi, (LetterAt, MonPredAt)):
        return frozenset({phi.var})
    if isinstance(phi, Less):
        return frozenset({phi.left, phi.right})
    if isinstance(phi, (Exists, ForAll)):
        return free_variables(phi.body) - {phi.var}
    result = frozenset()
    for f in fields(phi):
        child = getattr(phi, f.name)
        if isinstance(child, Formula):
            result |= free_variables(child)
    return result


def _holds(phi: Formula, word: str, assignment: Dict[str, int], env: MonPredRegistry) -> bool:
    if isinstance(phi, TrueF):
        return True
    if isinstance(phi, FalseF):
        return False
    if isinstance(phi, LetterAt):
        return word[assignment[phi.var]] in phi.letters
    if isinstance(phi, MonPredAt):
        return env.lookup(phi.name)(len(word), assignment[phi.var])
    if isinstance(phi, Less):
        return assignment[phi.left] < assignment[phi.right]
    if isinstance(phi, Not):
        return not _holds(phi.operand, word, assignment, env)
    if isinstance(phi, And):
        return _holds(phi.left, word, assignment, env) and _holds(phi.right, word, assignment, env)
    if isinstance(phi, Or):
        return _holds(phi.left, word, assignment, env) or _holds(phi.right, word, assignment, env)
    if isinstance(phi, (Exists, ForAll)):
        quantifier = any if isinstance(phi, Exists) else all
        return quantifier(
            _holds(phi.body, word, {**assignment, phi.var: p}, env) for p in range(len(word)))
    raise LogicError(f"{type(phi).__name__} is not a first-order formula")


def eval_fo(phi: Formula, word: str, env: Optional[MonPredRegistry] = None) -> bool:
    free = free_variables(phi)
    if free:
        raise FreeVariable(f"formula has free variables: {', '.join(sorted(free))}")
    if not word:
        raise EmptyWord("first-order sentences are evaluated on non-empty words")
    return _holds(phi, word, {}, env or DEFAULT_REGISTRY)


# ---------------------------------------------------------------- fixtures

def a_star_b_star_fltl() -> Formula:
    return globally(implies(letter('b'), Not(Until(TrueF(), letter('a')))))


def a_star_b_star_fo() -> Formula:
    return ForAll('x', ForAll('y', implies(
        Less('x', 'y'), Not(And(LetterAt(frozenset('b'), 'x'), LetterAt(frozenset('a'), 'y'))))))


def dyck_fltl(depth_bound: int) -> Formula:
    """Future LTL for non-empty Dyck words of depth at most 1 or 2, read at position 0."""
    opened, closed = letter('('), letter(')')
    if depth_bound == 1:
        return And(opened, globally(And(
            implies(opened, Next(closed)),
            implies(closed, Or(is_last(), Next(opened))),
        )))
    if depth_bound == 2:
        # doubled letters must alternate "((" / "))", starting with "(("
        up, down = And(opened, Next(opened)), And(closed, Next(closed))
        neither = And(Not(up), Not(down))
        return And(And(And(And(
            opened,
            Or(up, Not(Until(neither, down)))),
            globally(implies(up, And(Not(Until(neither, up)), Until(TrueF(), down))))),
            globally(implies(down, Not(Until(neither, down))))),
            globally(implies(is_last(), closed)))
    raise LogicError(f"no LTL fixture for depth {depth_bound}")


def dyck11_fo() -> Formula:
    opened = lambda v: LetterAt(frozenset('('), v)
    closed = lambda v: LetterAt(frozenset(')'), v)
    first = ForAll('x', implies(Not(Exists('y', Less('y', 'x'))), opened('x')))
    last = ForAll('x', implies(Not(Exists('y', Less('x', 'y'))), closed('x')))
    successor = And(Less('x', 'y'), Not(Exists('z', And(Less('x', 'z'), Less('z', 'y')))))
    alternate = ForAll('x', ForAll('y', implies(successor, And(
        Not(And(opened('x'), opened('y'))), Not(And(closed('x'), closed('y')))))))
    return And(And(first, last), alternate)
