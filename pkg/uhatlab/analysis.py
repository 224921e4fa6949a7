"""Verification harness: brute-force language comparison, fixability, circuits."""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from itertools import combinations, product
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import functools
import logging
import math

from .config import get_settings
from .core_ir import Recognizer, classify_program, count_words, diagram_classes, recognize, words_up_to
from .errors import (
    AnalysisError, ArityViolation, BudgetExceeded, CycleDetected,
    NonInjectiveEncoding, UnknownLetter,
)

logger = logging.getLogger(__name__)

WordPredicate = Callable[[str], bool]


def as_predicate(language) -> WordPredicate:
    """Accept a Recognizer, a NamedRecognizer or a plain predicate."""
    if isinstance(language, Recognizer):
        return functools.partial(recognize, language)
    rec = getattr(language, 'rec', None)
    if isinstance(rec, Recognizer):
        return functools.partial(recognize, rec)
    if callable(language):
        return language
    raise TypeError(f"cannot use {language!r} as a language")


def check_equivalence(a, b, alphabet: Sequence[str], max_len: int,
                      budget: Optional[int] = None, min_len: int = 0) -> Optional[str]:
    """First word in shortlex order on which a and b disagree, or None."""
    budget = get_settings().max_enum if budget is None else budget
    total = count_words(alphabet, max_len, min_len)
    if total > budget:
        raise BudgetExceeded(f"{total} words up to length {max_len} exceed the budget of {budget}")
    logger.debug("comparing languages on %d words up to length %d", total, max_len)

    in_a, in_b = as_predicate(a), as_predicate(b)
    for word in words_up_to(alphabet, max_len, min_len):
        if in_a(word) != in_b(word):
            return word
    return None


def diagram_matrix(programs: Iterable[Tuple[str, Recognizer]],
                   bound: Optional[int] = None) -> Dict[str, Tuple[str, ...]]:
    """Diagram classes of each named program, its own class first."""
    return {name: diagram_classes(classify_program(rec, bound=bound)) for name, rec in programs}


# ---------------------------------------------------------------- fixability

WILDCARD = '?'


@dataclass(frozen=True)
class Restriction:
    """A word pattern over the alphabet plus '?' for unfixed positions."""
    pattern: str

    @property
    def n(self) -> int:
        return len(self.pattern)

    @property
    def fixed(self) -> int:
        return sum(1 for c in self.pattern if c != WILDCARD)

    @property
    def free_positions(self) -> List[int]:
        return [p for p, c in enumerate(self.pattern) if c == WILDCARD]

    def extend(self, assignment: Mapping[int, str]) -> 'Restriction':
        letters = list(self.pattern)
        for pos, letter in assignment.items():
            if letters[pos] != WILDCARD:
                raise ValueError(f"position {pos} is already fixed")
            letters[pos] = letter
        return Restriction(''.join(letters))

    def is_extension_of(self, other: 'Restriction') -> bool:
        return self.n == other.n and all(
            theirs == WILDCARD or mine == theirs for mine, theirs in zip(self.pattern, other.pattern))

    def evaluations(self, alphabet: Sequence[str]) -> Iterable[str]:
        free = self.free_positions
        letters = list(self.pattern)
        for choice in product(alphabet, repeat=len(free)):
            for pos, letter in zip(free, choice):
                letters[pos] = letter
            yield ''.join(letters)

    @classmethod
    def unrestricted(cls, n: int) -> 'Restriction':
        return cls(WILDCARD * n)


class Verdict(Enum):
    FIXED_IN = 'fixed-in'
    FIXED_OUT = 'fixed-out'
    UNFIXABLE = 'unfixable'


@dataclass(frozen=True)
class FixabilityWitness:
    epsilon: Fraction
    n: int
    restriction: Restriction
    verdict: Verdict
    extension: Optional[Restriction] = None
    budget: int = 0
    extensions_tried: int = 0

    def as_dict(self) -> dict:
        return {
            'epsilon': [self.epsilon.numerator, self.epsilon.denominator],
            'n': self.n,
            'restriction': self.restriction.pattern,
            'verdict': self.verdict.value,
            'extension': self.extension.pattern if self.extension is not None else None,
            'budget': self.budget,
            'extensions_tried': self.extensions_tried,
        }


def _outcome(predicate: WordPredicate, rho: Restriction, alphabet: Sequence[str]) -> Optional[bool]:
    """True/False if every evaluation is in/out of the language, None if mixed."""
    seen = set()
    for word in rho.evaluations(alphabet):
        seen.add(bool(predicate(word)))
        if len(seen) == 2:
            return None
    return seen.pop()


def check_fixability(language, rho: Restriction, epsilon, alphabet: Sequence[str],
                     max_extensions: Optional[int] = None) -> FixabilityWitness:
    """Search extensions of rho fixing at most floor(epsilon * n) more positions.

    Extensions are tried by increasing number of newly fixed positions, so the
    first hit is also a smallest one.
    """
    epsilon = Fraction(epsilon)
    max_extensions = get_settings().max_extensions if max_extensions is None else max_extensions
    predicate = functools.lru_cache(maxsize=None)(as_predicate(language))
    budget = math.floor(epsilon * rho.n)
    free = rho.free_positions

    tried = 0
    for m in range(0, min(budget, len(free)) + 1):
        for positions in combinations(free, m):
            for letters in product(alphabet, repeat=m):
                tried += 1
                if tried > max_extensions:
                    raise BudgetExceeded(f"more than {max_extensions} extensions of {rho.pattern!r}")
                extension = rho.extend(dict(zip(positions, letters)))
                outcome = _outcome(predicate, extension, alphabet)
                if outcome is not None:
                    verdict = Verdict.FIXED_IN if outcome else Verdict.FIXED_OUT
                    return FixabilityWitness(epsilon, rho.n, rho, verdict, extension, budget, tried)
    logger.debug("%r is unfixable within %d extra positions (%d extensions)", rho.pattern, budget, tried)
    return FixabilityWitness(epsilon, rho.n, rho, Verdict.UNFIXABLE, None, budget, tried)


def search_unfixable(language, epsilon, n_range: Iterable[int], alphabet: Sequence[str],
                     exhaustive: bool = False,
                     max_extensions: Optional[int] = None) -> Optional[FixabilityWitness]:
    """Look for a restriction that no in-budget extension decides.

    Tries the all-? restriction for every n, and with exhaustive=True also
    every restriction that fixes a single position.
    """
    for n in n_range:
        candidates = [Restriction.unrestricted(n)]
        if exhaustive:
            candidates += [Restriction.unrestricted(n).extend({p: letter})
                           for p in range(n) for letter in alphabet]
        for rho in candidates:
            witness = check_fixability(language, rho, epsilon, alphabet, max_extensions)
            if witness.verdict is Verdict.UNFIXABLE:
                return witness
    return None


# ---------------------------------------------------------------- s-bar audit

@dataclass
class SbarAudit:
    bound: int
    checks: int = 0
    violations: List[str] = field(default_factory=list)
    term_count: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            'bound': self.bound,
            'checks': self.checks,
            'violations': list(self.violations),
            'term_count': self.term_count,
        }


def audit_sbar(bound: int = 16, structural_bound: int = 5) -> SbarAudit:
    """Exhaustively check the ordering properties of the mask-simulating score.

    For all positions below n <= bound: scores at j >= i are negative; for j < i
    they lie in (0, 1/3) when s = 0 and above 1/2 when s = 1; and they grow
    strictly with j for equal s. The separable form built by the pass is also
    compared against the exact formula for n <= structural_bound.
    """
    from .core_ir import EvalContext, RatLit, SeparableScore, Side, Var, score_value
    from .transforms import masked_sbar_score, sbar_exact

    if bound > 20:
        raise ValueError("audit bound must be at most 20")
    audit = SbarAudit(bound)
    third, half = Fraction(1, 3), Fraction(1, 2)

    for n in range(1, bound + 1):
        table = {(s, i, j): sbar_exact(s, i, j, n) for s in (0, 1) for i in range(n) for j in range(n)}
        for (s, i, j), value in table.items():
            audit.checks += 1
            if j >= i and not value < 0:
                audit.violations.append(f"negative when j >= i: s={s} i={i} j={j} n={n} gives {value}")
            elif j < i and s == 0 and not 0 < value < third:
                audit.violations.append(f"in (0, 1/3) when s=0: i={i} j={j} n={n} gives {value}")
            elif j < i and s == 1 and not value > half:
                audit.violations.append(f"above 1/2 when s=1: i={i} j={j} n={n} gives {value}")
        for s in (0, 1):
            for i in range(n):
                for j, j2 in combinations(range(i), 2):
                    audit.checks += 1
                    if not table[(s, i, j2)] > table[(s, i, j)]:
                        audit.violations.append(f"increasing in j: s={s} i={i} j={j} j'={j2} n={n}")

    # s read from layer 0 of the attended column
    sbar = masked_sbar_score(SeparableScore(((RatLit(1), Var(Side.J, 0)),)))
    audit.term_count = sbar.k
    if sbar.k != 4:
        audit.violations.append(f"separable form has {sbar.k} terms, expected 4")
    for n in range(1, min(bound, structural_bound) + 1):
        scale = 8 * n * 8 ** n
        for s, i, j in product((0, 1), range(n), range(n)):
            audit.checks += 1
            got = score_value(sbar, EvalContext(icol=(0,), jcol=(s,), i=i, j=j, n=n))
            if got != scale * sbar_exact(s, i, j, n):
                audit.violations.append(f"separable form differs at s={s} i={i} j={j} n={n}")
    logger.info("s-bar audit: %d checks, %d violations", audit.checks, len(audit.violations))
    return audit


# ---------------------------------------------------------------- circuits

GATE_LABELS = ('0', '1', 'NOT', 'AND', 'OR')


@dataclass(frozen=True)
class Gate:
    id: str
    label: str
    inputs: Tuple[str, ...] = ()

    @property
    def input_index(self) -> Optional[int]:
        """k for an input vertex labelled x<k>, else None."""
        if self.label.startswith('x') and self.label[1:].isdigit():
            return int(self.label[1:])
        return None


@dataclass(frozen=True)
class Circuit:
    gates: Tuple[Gate, ...]
    outputs: Tuple[str, ...]

    @property
    def by_id(self) -> Dict[str, Gate]:
        return {g.id: g for g in self.gates}

    @property
    def n_inputs(self) -> int:
        return sum(1 for g in self.gates if g.input_index is not None)

    @property
    def wire_count(self) -> int:
        return sum(len(g.inputs) for g in self.gates)


@dataclass(frozen=True)
class CircuitMetrics:
    depth: int
    wire_count: int
    gate_count: int


def topological_order(c: Circuit) -> List[Gate]:
    """Check well-formedness and return the gates inputs-first."""
    gates = c.by_id
    if len(gates) != len(c.gates):
        raise AnalysisError("vertex ids must be unique")

    indices = []
    for g in c.gates:
        if g.input_index is not None:
            indices.append(g.input_index)
        elif g.label not in GATE_LABELS:
            raise AnalysisError(f"vertex {g.id}: unknown label {g.label!r}")
        if (g.input_index is not None or g.label in ('0', '1')) and g.inputs:
            raise ArityViolation(f"vertex {g.id}: {g.label} takes no inputs")
        if g.label == 'NOT' and len(g.inputs) != 1:
            raise ArityViolation(f"vertex {g.id}: NOT takes exactly one input, got {len(g.inputs)}")
        for src in g.inputs:
            if src not in gates:
                raise AnalysisError(f"vertex {g.id}: unknown input {src!r}")
    if sorted(indices) != list(range(1, len(indices) + 1)):
        raise AnalysisError("inputs must be labelled x1..xn, each exactly once")
    for out in c.outputs:
        if out not in gates:
            raise AnalysisError(f"unknown output vertex {out!r}")

    sorter = TopologicalSorter({g.id: g.inputs for g in c.gates})
    try:
        return [gates[v] for v in sorter.static_order()]
    except CycleError as e:
        raise CycleDetected(f"circuit has a cycle through {', '.join(map(str, e.args[1]))}")


def eval_circuit(c: Circuit, bits: Union[str, Sequence[int]]) -> Tuple[int, ...]:
    bits = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise AnalysisError("input bits must be 0 or 1")
    order = topological_order(c)
    if len(bits) != c.n_inputs:
        raise AnalysisError(f"circuit has {c.n_inputs} inputs, got {len(bits)} bits")

    value: Dict[str, int] = {}
    for g in order:
        args = [value[src] for src in g.inputs]
        if g.input_index is not None:
            value[g.id] = bits[g.input_index - 1]
        elif g.label in ('0', '1'):
            value[g.id] = int(g.label)
        elif g.label == 'NOT':
            value[g.id] = 1 - args[0]
        elif g.label == 'AND':
            value[g.id] = int(all(args))
        else:
            value[g.id] = int(any(args))
    return tuple(value[out] for out in c.outputs)


def circuit_metrics(c: Circuit) -> CircuitMetrics:
    depth: Dict[str, int] = {}
    for g in topological_order(c):
        depth[g.id] = 1 + max(depth[src] for src in g.inputs) if g.inputs else 0
    return CircuitMetrics(max(depth.values(), default=0), c.wire_count, len(c.gates))


def code_width(alphabet_size: int) -> int:
    return max(1, (alphabet_size - 1).bit_length())


def default_encoding(alphabet: Sequence[str]) -> Dict[str, str]:
    width = code_width(len(alphabet))
    return {letter: format(k, f'0{width}b') for k, letter in enumerate(alphabet)}


def encode_binary(word: str, h: Mapping[str, str]) -> str:
    widths = {len(code) for code in h.values()}
    if len(widths) > 1:
        raise NonInjectiveEncoding("letter codes must all have the same width")
    if len(set(h.values())) != len(h):
        raise NonInjectiveEncoding("two letters share a code")
    if widths and widths.pop() < code_width(len(h)) and len(h) > 1:
        raise NonInjectiveEncoding("codes are too short for the alphabet")
    try:
        return ''.join(h[letter] for letter in word)
    except KeyError as e:
        raise UnknownLetter(f"letter {e.args[0]!r} has no code")
