import pytest
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from hypothesis import given, settings, strategies as st

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from uhatlab.core_ir import (
    Attention, BilinearScore, Carrier, EvalContext, ExprScore, Masking, PosI, PosJ,
    RatLit, SeparableScore, Side, TableScore, TieBreak, Var, execute, has_tie, recognize, score_value,
    words_up_to,
)
from uhatlab.errors import (
    CarrierMismatch, InitializationLacksPosition, PassError, UnsupportedLine, ZeroGapDegenerate,
)
from uhatlab.program_parser import parse_program
from uhatlab.programs import (
    build_brasp_fixtures, build_dyck1, build_palindrome_guhat, build_palindrome_masked,
    build_palindrome_separable,
)
from uhatlab.transforms import (
    PASSES, compute_score_lower_bounds, compute_tie_gaps, eliminate_mask_guhat,
    eliminate_ties, masked_sbar_score, run_pass, sbar_exact, sep_add, sep_mul,
    simulate_mask_separable, table_to_separable,
)

CARRIER = Carrier(Var(Side.I, 0), ('a', 'b', 'c'))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_table_to_separable_reconstructs_entries(entries):
    """The separable form of a table reproduces every entry with l*l terms."""
    table = TableScore(CARRIER, tuple(tuple(row) for row in entries))
    sep = table_to_separable(table)
    assert sep.k == 9
    for a, x in enumerate(CARRIER.values):
        for b, y in enumerate(CARRIER.values):
            ctx = EvalContext(icol=(x,), jcol=(y,))
            assert score_value(sep, ctx) == entries[a][b]
            assert score_value(table, ctx) == entries[a][b]


def test_single_value_table_has_one_term():
    sep = table_to_separable(TableScore(Carrier(Var(Side.I, 0), ('a',)), ((Fraction(3, 2),),)))
    assert sep.k == 1
    assert score_value(sep, EvalContext(icol=('a',), jcol=('a',))) == Fraction(3, 2)


def test_separable_algebra():
    """Sums concatenate terms, products multiply term counts and values."""
    a = SeparableScore(((PosI(), RatLit(1)), (RatLit(2), PosJ())))
    b = SeparableScore(((RatLit(1), PosJ()),))
    ctx = EvalContext(icol=(), jcol=(), i=3, j=5, n=8)
    total, product = sep_add(a, b), sep_mul(a, b)
    assert total.k == 3
    assert product.k == 2
    assert score_value(total, ctx) == 3 + 10 + 5
    assert score_value(product, ctx) == (3 + 10) * 5


def test_separable_algebra_rejects_mixed_carriers():
    other = Carrier(Var(Side.I, 0), ('x', 'y'))
    with pytest.raises(CarrierMismatch):
        sep_add(SeparableScore((), CARRIER), SeparableScore((), other))


def test_masked_sbar_score_has_four_terms():
    """The scaled mask-simulating score matches the exact formula."""
    sbar = masked_sbar_score(SeparableScore(((RatLit(1), Var(Side.J, 0)),)))
    assert sbar.k == 4
    for n in range(1, 5):
        for s in (0, 1):
            for i in range(n):
                for j in range(n):
                    got = score_value(sbar, EvalContext(icol=(0,), jcol=(s,), i=i, j=j, n=n))
                    assert got == 8 * n * 8 ** n * sbar_exact(s, i, j, n)


@pytest.mark.parametrize('mode', ['sentinel', 'bound'])
def test_eliminate_mask_preserves_palindromes(mode):
    """Both mask elimination modes keep the language and remove every mask."""
    rec = build_palindrome_masked().rec
    after, report = run_pass('eliminate-mask', rec, verify_len=8, mode=mode, n_max=6)
    assert report.passed
    assert all(line.mask is Masking.NO_MASK for _, line in after.attention_lines())
    assert report.after.maskings_used == frozenset({Masking.NO_MASK})


def test_eliminate_mask_needs_positions():
    """A character-only program cannot express the admission test."""
    with pytest.raises(InitializationLacksPosition):
        eliminate_mask_guhat(build_dyck1(1).rec)


def test_score_lower_bounds_cover_every_length():
    bounds = compute_score_lower_bounds(build_palindrome_masked().rec, 4)
    assert set(bounds) == {1, 2}
    # -(n-1-i-j)^2 is smallest at i = j = n-1
    assert bounds[1].bounds[4] == -9


def test_tie_gaps_are_positive():
    gaps = compute_tie_gaps(build_palindrome_guhat().rec, 5)
    assert all(gap > 0 for gap in gaps[2].gaps.values())
    # scores are -(n-1-i-j)^2, adjacent squares differ by at least 1
    assert gaps[1].gaps[5] == 1


def test_constant_scores_have_degenerate_gaps():
    """A constant score falls back to gap 1, or raises in strict mode."""
    rec = parse_program(
        "init charposlen alphabet=a\n"
        "L1(i) = attend rightmost j [mask=none, score=0] value=get(L0[j], 0) == 'a' default=false\n"
        "accept at last when L1[i]\n"
    )
    assert compute_tie_gaps(rec, 3)[1].gaps == {1: 1, 2: 1, 3: 1}
    with pytest.raises(ZeroGapDegenerate):
        compute_tie_gaps(rec, 3, strict=True)


@pytest.mark.parametrize('builder', [build_palindrome_guhat, build_palindrome_separable])
def test_eliminate_ties_gives_unique_maxima(builder):
    """After perturbation every row has one best score and selections are unchanged."""
    rec = builder().rec
    after = eliminate_ties(rec, n_max=8)
    assert after.depth == rec.depth
    for word in words_up_to(rec.alphabet, 8, min_len=1):
        before_run = execute(rec, word)
        after_run = execute(after, word, record_scores='admitted')
        assert after_run.selections == before_run.selections
        for rows in after_run.scores.values():
            assert not any(has_tie(row) for row in rows)


def test_eliminate_ties_normalizes_leftmost():
    """Leftmost lines can be turned into rightmost ones without changing the language."""
    fixture = build_brasp_fixtures()[0]
    after, report = run_pass('eliminate-ties', fixture.rec, verify_len=7, n_max=7, normalize_ties=True)
    assert report.passed
    assert all(line.tie is TieBreak.RIGHTMOST for _, line in after.attention_lines())


def test_normalized_ties_are_limited_to_n_max():
    """Verification past n_max is refused once tie rules are normalized."""
    fixture = build_brasp_fixtures()[1]
    with pytest.raises(PassError):
        run_pass('eliminate-ties', fixture.rec, verify_len=5, n_max=3, normalize_ties=True)
    _, report = run_pass('eliminate-ties', fixture.rec, verify_len=3, n_max=3, normalize_ties=True)
    assert report.passed
    assert any('up to length 3' in note for note in report.notes)


def test_ties_keep_their_rule_past_n_max():
    """Without normalization the original tie rule covers longer inputs."""
    fixture = build_brasp_fixtures()[1]
    _, report = run_pass('eliminate-ties', fixture.rec, verify_len=6, n_max=3)
    assert report.passed


@pytest.mark.parametrize('depth', [1, 2])
def test_simulate_mask_on_dyck(depth):
    """Future masks become unmasked separable scores with four terms per line."""
    rec = build_dyck1(depth).rec
    after, report = run_pass('simulate-mask', rec, verify_len=8)
    assert report.passed
    assert all(line.mask is Masking.NO_MASK for _, line in after.attention_lines())
    assert set(report.term_counts.values()) == {4}


def test_simulate_mask_rejects_past_masks():
    rec = build_palindrome_masked().rec
    lines = tuple(
        Attention(Masking.STRICT_PAST, TieBreak.RIGHTMOST, ExprScore(RatLit(0)), line.value, line.default)
        if isinstance(line, Attention) else line
        for line in rec.lines
    )
    with pytest.raises(UnsupportedLine):
        simulate_mask_separable(replace(rec, lines=lines))


def test_fmuhat_to_uhat_on_dyck():
    """The full pipeline ends with bilinear scores and no masks."""
    after, report = run_pass('fmuhat-to-uhat', build_dyck1(2).rec, verify_len=8)
    assert report.passed
    assert after.vector_typed
    assert all(isinstance(line.score, BilinearScore) for _, line in after.attention_lines())
    assert report.after.bilinear_scores


@pytest.mark.parametrize('fixture', build_brasp_fixtures(), ids=lambda f: f.name)
def test_brasp_to_masked(fixture):
    """Unmasked column-only lines become four masked lines each."""
    after, report = run_pass('brasp-to-masked', fixture.rec, verify_len=7)
    assert report.passed
    assert report.layer_delta == 3
    assert Masking.NO_MASK not in report.after.maskings_used


@pytest.mark.parametrize('tie, value_letter', [('leftmost', 'a'), ('rightmost', 'b')])
def test_brasp_to_masked_accepts_values_outside_the_score(tie, value_letter):
    """The value may be 1 where the score is 0, including on an all-zero row."""
    rec = parse_program(
        "init charonly alphabet=a,b,c\n"
        f"L1(i) = attend {tie} j [mask=none, score=not (L0[j] == 'c')] "
        f"value=not (L0[j] == '{value_letter}') default=false\n"
        "accept at last when L1[i]\n"
    )
    after, report = run_pass('brasp-to-masked', rec, verify_len=6)
    assert report.passed
    assert recognize(after, 'ccc') is True
    assert recognize(after, 'c' + value_letter) is False


@pytest.mark.parametrize('builder, terms', [
    (build_palindrome_guhat, 4),
    (build_palindrome_separable, 3),
])
def test_separable_to_bilinear(builder, terms):
    """Each separable line gains a feature layer and a 2k x 2k bilinear score."""
    after, report = run_pass('separable-to-bilinear', builder().rec, verify_len=8)
    assert report.passed
    assert report.layer_delta == 2
    assert report.term_counts == {2: terms, 4: 1}
    assert after.vector_typed


def test_run_pass_rejects_unknown_name():
    with pytest.raises(ValueError):
        run_pass('inline-everything', build_palindrome_guhat().rec)
    assert 'eliminate-ties' in PASSES


def test_report_as_dict():
    _, report = run_pass('tables-to-separable', build_palindrome_guhat().rec, verify_len=4)
    data = report.as_dict()
    assert data['pass'] == 'tables-to-separable'
    assert data['counterexample'] is None
    assert data['before'] == data['after']
