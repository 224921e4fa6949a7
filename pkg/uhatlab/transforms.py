"""Program-to-program passes.

Each pass takes a Recognizer and returns a new one that recognizes the same
language (checked extensionally by verify_pass). Passes that need global
facts about scores (tie gaps, lower bounds, binary ranges) obtain them by
enumerating every input up to a length bound.
"""
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple
import logging

from .analysis import check_equivalence
from .config import get_settings
from .core_ir import (
    Add, Attention, BilinearScore, Carrier, Classification, Eq, Expr,
    ExprScore, IfThenElse, InitKind, Initialization, Len, Lt, Masking, Mul,
    NEG_INF, NegInfLit, Pointwise, PosI, PosJ, Pow, RatLit, Recognizer,
    SeparableScore, Side, Sub, TableScore, TieBreak, TupleGet, TupleMake, Var,
    canon, classify_program, compile_expr, count_words, execute,
    expr_refs, literal, mirror, remap_layers, rewrite, split_separable,
    times, validate, words_of_length, words_up_to,
)
from .errors import (
    CarrierMismatch, EnumerationBudgetExceeded, InitializationLacksPosition,
    MissingPositionInInit, NonBinaryScore, NonBinaryValues,
    NonSeparableScorePresent, NonTotalTable, NotColumnOnlyForm, PassError,
    UnsupportedLine, ZeroGapDegenerate,
)

logger = logging.getLogger(__name__)


@dataclass
class PassReport:
    name: str
    before: Classification
    after: Classification
    equivalence_checked_up_to: int = 0
    counterexample: Optional[str] = None
    layer_delta: int = 0
    term_counts: Dict[int, int] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def as_dict(self) -> dict:
        return {
            'pass': self.name,
            'before': self.before.as_dict(),
            'after': self.after.as_dict(),
            'equivalence_checked_up_to': self.equivalence_checked_up_to,
            'counterexample': self.counterexample,
            'layer_delta': self.layer_delta,
            'term_counts': {str(k): v for k, v in self.term_counts.items()},
            'notes': list(self.notes),
        }


@dataclass(frozen=True)
class TieGap:
    """Smallest positive distance between scores of one line, per input length."""
    gaps: Dict[int, Fraction]


@dataclass(frozen=True)
class ScoreLowerBound:
    """Minimum score of one line over every pair and input of a given length."""
    bounds: Dict[int, Fraction]


# ---------------------------------------------------------------- separable algebra

def table_to_separable(t: TableScore) -> SeparableScore:
    """One term per carrier pair: f picks the row entry, g indicates the column."""
    values = t.carrier.values
    size = len(values)
    if len(t.entries) != size or any(len(row) != size for row in t.entries):
        raise NonTotalTable(f"score table must be {size}x{size}")
    if any(entry is None for row in t.entries for entry in row):
        raise NonTotalTable("score table has missing entries")

    if size == 1:
        return SeparableScore(((RatLit(canon(t.entries[0][0])), RatLit(1)),), t.carrier)

    key_i, key_j = t.carrier.key, mirror(t.carrier.key)
    terms = []
    for alpha in range(size):
        for beta in range(size):
            f = IfThenElse(Eq(key_i, literal(values[alpha])), RatLit(canon(t.entries[alpha][beta])), RatLit(0))
            g = IfThenElse(Eq(key_j, literal(values[beta])), RatLit(1), RatLit(0))
            terms.append((f, g))
    return SeparableScore(tuple(terms), t.carrier)


def _joint_carrier(a: SeparableScore, b: SeparableScore) -> Optional[Carrier]:
    if a.carrier is not None and b.carrier is not None and a.carrier != b.carrier:
        raise CarrierMismatch("separable scores are defined over different carriers")
    return a.carrier if a.carrier is not None else b.carrier


def sep_add(a: SeparableScore, b: SeparableScore) -> SeparableScore:
    return SeparableScore(a.terms + b.terms, _joint_carrier(a, b))


def sep_mul(a: SeparableScore, b: SeparableScore) -> SeparableScore:
    carrier = _joint_carrier(a, b)
    terms = tuple((times(fa, fb), times(ga, gb)) for fb, gb in b.terms for fa, ga in a.terms)
    return SeparableScore(terms, carrier)


def as_separable(score) -> SeparableScore:
    if isinstance(score, SeparableScore):
        return score
    if isinstance(score, TableScore):
        return table_to_separable(score)
    if isinstance(score, ExprScore):
        return SeparableScore(tuple(split_separable(score.expr)))
    raise NonSeparableScorePresent(f"{type(score).__name__} cannot be rewritten as a separable score")


def score_as_expr(score) -> Expr:
    if isinstance(score, ExprScore):
        return score.expr
    if isinstance(score, (SeparableScore, TableScore)):
        terms = [times(f, g) for f, g in as_separable(score).terms]
        if not terms:
            return RatLit(0)
        total = terms[0]
        for term in terms[1:]:
            total = Add(total, term)
        return total
    raise UnsupportedLine("bilinear scores have no single-expression form")


# ---------------------------------------------------------------- helpers

class _Builder:
    """Accumulates output lines and remembers where each input layer went."""

    def __init__(self):
        self.lines = []
        self.mapping = {0: 0}

    def remap(self, e: Expr) -> Expr:
        return remap_layers(e, self.mapping.__getitem__)

    def remap_line(self, line):
        if isinstance(line, Pointwise):
            return Pointwise(self.remap(line.value))
        score = line.score
        if isinstance(score, ExprScore):
            score = ExprScore(self.remap(score.expr))
        elif isinstance(score, TableScore):
            score = replace(score, carrier=replace(score.carrier, key=self.remap(score.carrier.key)))
        elif isinstance(score, SeparableScore):
            score = SeparableScore(tuple((self.remap(f), self.remap(g)) for f, g in score.terms),
                                   score.carrier)
        elif isinstance(score, BilinearScore):
            score = replace(score, layer=self.mapping[score.layer])
        return replace(line, score=score, value=self.remap(line.value), default=self.remap(line.default))

    def emit(self, line) -> int:
        self.lines.append(line)
        return len(self.lines)

    def keep(self, idx: int, line) -> None:
        self.mapping[idx] = self.emit(self.remap_line(line))

    def finish(self, rec: Recognizer, **changes) -> Recognizer:
        out = replace(rec, lines=tuple(self.lines), valid=self.remap(rec.valid), **changes)
        return validate(out)


def _map_exprs(rec: Recognizer, fn: Callable[[Expr], Expr]) -> Recognizer:
    """Apply fn to every expression of every line and the acceptance predicate."""
    def score_of(score):
        if isinstance(score, ExprScore):
            return ExprScore(fn(score.expr))
        if isinstance(score, TableScore):
            return replace(score, carrier=replace(score.carrier, key=fn(score.carrier.key)))
        if isinstance(score, SeparableScore):
            return SeparableScore(tuple((fn(f), fn(g)) for f, g in score.terms), score.carrier)
        return score

    lines = []
    for line in rec.lines:
        if isinstance(line, Pointwise):
            lines.append(Pointwise(fn(line.value)))
        else:
            lines.append(replace(line, score=score_of(line.score), value=fn(line.value), default=fn(line.default)))
    return replace(rec, lines=tuple(lines), valid=fn(rec.valid))


def with_positions(rec: Recognizer) -> Recognizer:
    """Extend a position-free initialization so that layer 0 also carries (i, n)."""
    if rec.init.positional:
        return rec
    if rec.init.kind is InitKind.CHAR_ONLY:
        init = Initialization(InitKind.CHAR_POS_LEN, rec.alphabet)
    else:
        init = Initialization(InitKind.CUSTOM, rec.alphabet, TupleMake((rec.init.expr, PosI(), Len())))

    def first_component(node):
        if isinstance(node, Var) and node.layer == 0:
            return TupleGet(node, 0)
        return node

    return replace(_map_exprs(rec, lambda e: rewrite(e, first_component)), init=init)


def length_table(values: Dict[int, Fraction], fallback: Expr) -> Expr:
    """Expression of n that looks up values[n], or fallback past the table."""
    e = fallback
    for n in sorted(values, reverse=True):
        e = IfThenElse(Eq(Len(), RatLit(n)), RatLit(canon(values[n])), e)
    return e


def _enumeration_budget(rec: Recognizer, n_max: int, budget: Optional[int]) -> None:
    budget = get_settings().max_enum if budget is None else budget
    total = count_words(rec.alphabet, n_max, min_len=1)
    if total > budget:
        raise EnumerationBudgetExceeded(
            f"{total} words up to length {n_max} exceed the enumeration budget of {budget}")


# ---------------------------------------------------------------- separable -> bilinear

def separable_to_bilinear(rec: Recognizer) -> Recognizer:
    """Replace every separable score by a bilinear form over an inserted feature layer."""
    b = _Builder()
    for idx, line in enumerate(rec.lines, start=1):
        if isinstance(line, Pointwise) or isinstance(line.score, BilinearScore):
            b.keep(idx, line)
            continue
        sep = as_separable(line.score)
        terms = sep.terms or ((RatLit(0), RatLit(0)),)
        k = len(terms)
        features = tuple(b.remap(f) for f, _ in terms) + tuple(mirror(b.remap(g)) for _, g in terms)
        feature_layer = b.emit(Pointwise(TupleMake(features)))
        matrix = tuple(
            tuple(1 if col == row + k else 0 for col in range(2 * k)) for row in range(2 * k)
        )
        b.mapping[idx] = b.emit(Attention(
            line.mask, line.tie, BilinearScore(feature_layer, matrix),
            b.remap(line.value), b.remap(line.default),
        ))
        logger.debug("L%d: %d separable terms -> bilinear over layer %d", idx, k, feature_layer)
    return b.finish(rec, vector_typed=True)


def tables_to_separable(rec: Recognizer) -> Recognizer:
    lines = tuple(
        replace(line, score=table_to_separable(line.score))
        if isinstance(line, Attention) and isinstance(line.score, TableScore) else line
        for line in rec.lines
    )
    return validate(replace(rec, lines=lines))


# ---------------------------------------------------------------- score statistics

def compute_score_lower_bounds(rec: Recognizer, n_max: int,
                               budget: Optional[int] = None) -> Dict[int, ScoreLowerBound]:
    """K_n per masked line: the least score over all pairs (i, j) of all length-n inputs."""
    _enumeration_budget(rec, n_max, budget)
    masked = [idx for idx, line in rec.attention_lines() if line.mask is not Masking.NO_MASK]
    lows: Dict[int, Dict[int, Fraction]] = {idx: {} for idx in masked}
    for n in range(1, n_max + 1):
        for word in words_of_length(rec.alphabet, n):
            run = execute(rec, word, record_scores='all')
            for idx in masked:
                for row in run.scores[idx]:
                    for _, s in row:
                        if s is NEG_INF:
                            continue
                        current = lows[idx].get(n)
                        if current is None or s < current:
                            lows[idx][n] = s
        for idx in masked:
            lows[idx].setdefault(n, 0)
    for idx in masked:
        logger.debug("L%d lower bounds: %s", idx, lows[idx])
    return {idx: ScoreLowerBound(lows[idx]) for idx in masked}


def compute_tie_gaps(rec: Recognizer, n_max: int, budget: Optional[int] = None,
                     strict: bool = False) -> Dict[int, TieGap]:
    """epsilon_n per attention line: the least distance between two distinct admitted scores.

    A length where a line sees fewer than two distinct scores gets gap 1, or
    raises ZeroGapDegenerate when strict is set.
    """
    _enumeration_budget(rec, n_max, budget)
    lines = [idx for idx, _ in rec.attention_lines()]
    gaps: Dict[int, Dict[int, Fraction]] = {idx: {} for idx in lines}
    for n in range(1, n_max + 1):
        seen = {idx: set() for idx in lines}
        for word in words_of_length(rec.alphabet, n):
            run = execute(rec, word, record_scores='admitted')
            for idx in lines:
                for row in run.scores[idx]:
                    seen[idx].update(s for _, s in row if s is not NEG_INF)
        for idx in lines:
            ordered = sorted(seen[idx])
            if len(ordered) < 2:
                if strict:
                    raise ZeroGapDegenerate(f"L{idx}: fewer than two distinct scores at length {n}")
                logger.warning("L%d: fewer than two distinct scores at length %d, using gap 1", idx, n)
                gaps[idx][n] = Fraction(1)
            else:
                gaps[idx][n] = Fraction(min(b - a for a, b in zip(ordered, ordered[1:])))
    for idx in lines:
        logger.debug("L%d tie gaps: %s", idx, gaps[idx])
    return {idx: TieGap(gaps[idx]) for idx in lines}


# ---------------------------------------------------------------- mask elimination

def _empty_admitted(mask: Masking) -> Expr:
    if mask is Masking.STRICT_FUTURE:
        return Eq(PosI(), RatLit(0))
    return Eq(PosI(), Sub(Len(), RatLit(1)))


def _admits(mask: Masking) -> Expr:
    if mask is Masking.STRICT_FUTURE:
        return Lt(PosJ(), PosI())
    return Lt(PosI(), PosJ())


def eliminate_mask_guhat(rec: Recognizer, mode: str = 'sentinel', n_max: Optional[int] = None) -> Recognizer:
    """Drop masks by pushing masked-out pairs below every admitted score.

    mode 'sentinel' gives masked-out pairs the score -inf; mode 'bound' gives them
    K_n - 1 for n <= n_max, where K_n is the enumerated lower bound, and -inf beyond.
    """
    if mode not in ('sentinel', 'bound'):
        raise ValueError(f"unknown mask elimination mode {mode!r}")
    masked = [(idx, line) for idx, line in rec.attention_lines() if line.mask is not Masking.NO_MASK]
    if not masked:
        return rec
    if not rec.init.positional:
        raise InitializationLacksPosition("mask elimination reads i and n; initialize with charposlen")

    bounds = {}
    if mode == 'bound':
        n_max = get_settings().verify_len if n_max is None else n_max
        bounds = compute_score_lower_bounds(rec, n_max)

    lines = list(rec.lines)
    for idx, line in masked:
        if mode == 'bound':
            below = {n: k - 1 for n, k in bounds[idx].bounds.items()}
            fallback = length_table(below, NegInfLit())
        else:
            fallback = NegInfLit()
        lines[idx - 1] = Attention(
            Masking.NO_MASK, line.tie,
            score=ExprScore(IfThenElse(_admits(line.mask), score_as_expr(line.score), fallback)),
            value=IfThenElse(_empty_admitted(line.mask), line.default, line.value),
            default=line.default,
        )
    logger.info("eliminated %d masks (%s mode)", len(masked), mode)
    return validate(replace(rec, lines=tuple(lines)))


# ---------------------------------------------------------------- tie elimination

def eliminate_ties(rec: Recognizer, n_max: Optional[int] = None, normalize_ties: bool = False) -> Recognizer:
    """Perturb every score by a j-dependent amount below half the least score gap.

    The perturbation at length n is j * eps_n / (2 * max(1, n - 1)). It orders
    tied candidates by position and never reorders distinct scores. Lengths
    beyond n_max get no perturbation and keep the original tie rule, unless
    normalize_ties rewrites leftmost lines to rightmost: the language is then
    only preserved up to n_max.
    """
    n_max = get_settings().tie_n_max if n_max is None else n_max
    gaps = compute_tie_gaps(rec, n_max)
    out = with_positions(rec)

    lines = list(out.lines)
    for idx, line in out.attention_lines():
        if isinstance(line.score, BilinearScore):
            raise UnsupportedLine(f"L{idx}: tie elimination does not rewrite bilinear scores")
        step = {n: eps / (2 * max(1, n - 1)) for n, eps in gaps[idx].gaps.items()}
        if line.tie is TieBreak.LEFTMOST:
            step = {n: -c for n, c in step.items()}
        table = length_table(step, RatLit(0))
        if isinstance(line.score, ExprScore):
            score = ExprScore(Add(line.score.expr, Mul(PosJ(), table)))
        else:
            score = sep_add(as_separable(line.score), SeparableScore(((table, PosJ()),)))
        if normalize_ties and line.tie is TieBreak.LEFTMOST:
            logger.warning("L%d: leftmost rule replaced; inputs longer than %d may change verdict", idx, n_max)
        tie = TieBreak.RIGHTMOST if normalize_ties else line.tie
        lines[idx - 1] = replace(line, score=score, tie=tie)
    logger.info("perturbed %d attention lines up to length %d", len(gaps), n_max)
    return validate(replace(out, lines=tuple(lines)))


# ---------------------------------------------------------------- mask simulation

def masked_sbar_score(score: SeparableScore) -> SeparableScore:
    """Separable unmasked score that reproduces future-masked rightmost attention.

    Computes (2i - 2j - 1) * 8^j * (4n * 8^n * s + 1), which is the exact
    (i - j - 1/2) * 8^j * (s + 1/(4n * 8^n)) scaled by the positive factor
    8n * 8^n. Needs s in {0, 1}.
    """
    scale = Mul(Mul(RatLit(4), Len()), Pow(RatLit(8), Len()))
    sign = SeparableScore(((Sub(Mul(RatLit(2), PosI()), RatLit(1)), RatLit(1)), (RatLit(-2), PosJ())))
    growth = SeparableScore(((RatLit(1), Pow(RatLit(8), PosJ())),))
    lifted = sep_add(sep_mul(SeparableScore(((scale, RatLit(1)),)), score),
                     SeparableScore(((RatLit(1), RatLit(1)),)))
    return sep_mul(sep_mul(sign, growth), lifted)


def sbar_exact(s: int, i: int, j: int, n: int) -> Fraction:
    """Unscaled form of masked_sbar_score for one score value."""
    return (Fraction(2 * i - 2 * j - 1, 2) * Fraction(8) ** j
            * (s + Fraction(1, 4 * n * 8 ** n)))


def _check_binary_scores(rec: Recognizer, lines: List[int], check_len: int) -> None:
    wanted = set(lines)
    for idx, line in rec.attention_lines():
        if idx in wanted and isinstance(line.score, TableScore):
            if any(entry not in (0, 1) for row in line.score.entries for entry in row):
                raise NonBinaryScore(f"L{idx}: score table has entries outside {{0, 1}}")
    for word in words_up_to(rec.alphabet, check_len, min_len=1):
        run = execute(rec, word, record_scores='admitted')
        for idx in lines:
            for row in run.scores[idx]:
                for j, s in row:
                    if s not in (0, 1):
                        raise NonBinaryScore(f"L{idx}: score {s} on {word!r} is not 0 or 1")


def simulate_mask_separable(rec: Recognizer, extend_init: bool = True,
                            check_len: Optional[int] = None) -> Recognizer:
    """Replace future-masked rightmost lines with binary scores by unmasked separable ones."""
    check_len = get_settings().binary_check_len if check_len is None else check_len
    future = []
    for idx, line in rec.attention_lines():
        if line.mask is Masking.NO_MASK:
            continue
        if line.mask is not Masking.STRICT_FUTURE or line.tie is not TieBreak.RIGHTMOST:
            raise UnsupportedLine(f"L{idx}: only future-masked rightmost lines can be simulated")
        future.append(idx)
    if not future:
        return rec

    _check_binary_scores(rec, future, check_len)
    if not rec.init.positional:
        if not extend_init:
            raise MissingPositionInInit("mask simulation reads i and n; extend the initialization")
        rec = with_positions(rec)

    lines = list(rec.lines)
    for idx in future:
        line = lines[idx - 1]
        lines[idx - 1] = Attention(
            Masking.NO_MASK, TieBreak.RIGHTMOST,
            score=masked_sbar_score(as_separable(line.score)),
            value=IfThenElse(Eq(PosI(), RatLit(0)), line.default, line.value),
            default=line.default,
        )
    logger.info("simulated %d future masks with separable scores", len(future))
    return validate(replace(rec, lines=tuple(lines)))


# ---------------------------------------------------------------- unmasked -> masked

def _column_only_parts(idx: int, line: Attention) -> Tuple[Expr, Expr]:
    score = score_as_expr(line.score)
    for part, e in (('score', score), ('value', line.value)):
        refs = expr_refs(e)
        if refs.uses_i or refs.positional:
            raise NotColumnOnlyForm(f"L{idx}: {part} must depend only on the attended column")
    return score, line.value


def _check_binary(rec: Recognizer, parts: Dict[int, Tuple[Expr, Expr]], check_len: int) -> None:
    """Raise unless every score and value column is 0 or 1 on words up to check_len."""
    compiled = {idx: (compile_expr(s), compile_expr(v)) for idx, (s, v) in parts.items()}
    for word in words_up_to(rec.alphabet, check_len, min_len=1):
        run = execute(rec, word)
        n = run.n
        for j in range(n):
            jcol = run.column(j)
            for idx, (score_fn, value_fn) in compiled.items():
                s = score_fn((), jcol, 0, j, n)
                v = value_fn((), jcol, 0, j, n)
                if s not in (0, 1):
                    raise NonBinaryScore(f"L{idx}: score {s!r} on {word!r} is not 0 or 1")
                if v not in (0, 1):
                    raise NonBinaryValues(f"L{idx}: value {v!r} on {word!r} is not 0 or 1")


def unmasked_brasp_to_masked(rec: Recognizer, check_len: Optional[int] = None) -> Recognizer:
    """Rewrite unmasked column-only lines into four masked lines.

    A leftmost line becomes: a BOS marker (1 only at position 0), a past-masked
    leftmost search, a pointwise merge with the current position, and a
    future-masked lookup of the merged value at position 0. The search reads
    the current value when it only finds zero scores, so an all-zero row
    resolves to position 0 as leftmost attention does. Rightmost lines use the
    mirrored gadget around the last position.
    """
    check_len = get_settings().binary_check_len if check_len is None else check_len
    parts = {
        idx: _column_only_parts(idx, line)
        for idx, line in rec.attention_lines() if line.mask is Masking.NO_MASK
    }
    if not parts:
        return rec
    _check_binary(rec, parts, check_len)

    b = _Builder()
    for idx, line in enumerate(rec.lines, start=1):
        if idx not in parts:
            b.keep(idx, line)
            continue
        score_j, value_j = (b.remap(e) for e in parts[idx])
        value_i = mirror(value_j)
        if line.tie is TieBreak.LEFTMOST:
            edge_mask, edge_tie = Masking.STRICT_FUTURE, TieBreak.RIGHTMOST
            search_mask, search_tie = Masking.STRICT_PAST, TieBreak.LEFTMOST
        else:
            edge_mask, edge_tie = Masking.STRICT_PAST, TieBreak.LEFTMOST
            search_mask, search_tie = Masking.STRICT_FUTURE, TieBreak.RIGHTMOST

        edge = b.emit(Attention(edge_mask, edge_tie, ExprScore(RatLit(0)), RatLit(0), RatLit(1)))
        search = b.emit(Attention(search_mask, search_tie, ExprScore(score_j),
                                  IfThenElse(score_j, value_j, value_i), value_i))
        merged = b.emit(Pointwise(IfThenElse(mirror(score_j), value_i, Var(Side.I, search))))
        b.mapping[idx] = b.emit(Attention(
            edge_mask, edge_tie, ExprScore(Var(Side.J, edge)),
            Var(Side.J, merged), Var(Side.I, merged),
        ))
    logger.info("rewrote %d unmasked lines into masked gadgets", len(parts))
    return b.finish(rec)


def fmuhat_to_uhat(rec: Recognizer) -> Recognizer:
    return separable_to_bilinear(simulate_mask_separable(rec))


# ---------------------------------------------------------------- verification

def verify_pass(before: Recognizer, after: Recognizer, max_len: Optional[int] = None,
                name: str = 'verify') -> PassReport:
    max_len = get_settings().verify_len if max_len is None else max_len
    counterexample = check_equivalence(before, after, before.alphabet, max_len)
    report = PassReport(
        name=name,
        before=classify_program(before),
        after=classify_program(after),
        equivalence_checked_up_to=max_len,
        counterexample=counterexample,
        layer_delta=after.depth - before.depth,
    )
    for idx, line in after.attention_lines():
        if isinstance(line.score, SeparableScore):
            report.term_counts[idx] = line.score.k
        elif isinstance(line.score, BilinearScore):
            report.term_counts[idx] = len(line.score.matrix) // 2
    if counterexample is not None:
        logger.warning("%s: languages differ on %r", name, counterexample)
    return report


PASSES = {
    'separable-to-bilinear': separable_to_bilinear,
    'tables-to-separable': tables_to_separable,
    'eliminate-mask': eliminate_mask_guhat,
    'eliminate-ties': eliminate_ties,
    'simulate-mask': simulate_mask_separable,
    'brasp-to-masked': unmasked_brasp_to_masked,
    'fmuhat-to-uhat': fmuhat_to_uhat,
}

_NOTES = {
    'simulate-mask': "scores are 8n*8^n times (i-j-1/2)*8^j*(s+1/(4n*8^n)); base 8 replaces e^3",
    'eliminate-ties': "perturbation j*eps_n/(2*max(1,n-1)) up to the enumerated bound",
    'eliminate-mask': "masked-out pairs score below every admitted pair; empty rows emit the default",
}


def run_pass(name: str, rec: Recognizer, verify_len: Optional[int] = None, **options) -> Tuple[Recognizer, PassReport]:
    """Apply a named pass and verify the result by enumeration."""
    if name not in PASSES:
        raise ValueError(f"unknown pass {name!r}; choose from {', '.join(sorted(PASSES))}")
    normalizing = name == 'eliminate-ties' and options.get('normalize_ties')
    if normalizing:
        settings = get_settings()
        verify_len = settings.verify_len if verify_len is None else verify_len
        n_max = options.get('n_max') or settings.tie_n_max
        if verify_len > n_max:
            raise PassError(f"normalized ties are only exact up to n_max={n_max}; verify_len={verify_len} exceeds it")
    logger.info("running pass %s on a %d-line program", name, rec.depth)
    after = PASSES[name](rec, **options)
    report = verify_pass(rec, after, verify_len, name=name)
    if name in _NOTES:
        report.notes.append(_NOTES[name])
    if normalizing:
        report.notes.append(f"tie rules normalized to rightmost; language preserved up to length {n_max} only")
    return after, report
