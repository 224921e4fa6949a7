import pytest
import sys
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from uhatlab.analysis import circuit_metrics, eval_circuit
from uhatlab.errors import AnalysisError, CycleDetected, DslSyntaxError
from uhatlab.netlist import format_netlist, load_netlist, parse_netlist

FIXTURES = Path(__file__).parent.parent / 'fixtures'


def test_load_fixture():
    """The shipped netlist computes (x1 AND x2) OR (x3 AND x4)."""
    c = load_netlist(FIXTURES / 'or_of_ands.ckt')
    assert c.n_inputs == 4
    assert c.outputs == ('o',)
    for bits in ('1100', '0011', '1111'):
        assert eval_circuit(c, bits) == (1,)
    for bits in ('1010', '0101', '0000'):
        assert eval_circuit(c, bits) == (0,)


def test_format_round_trip(tmp_path):
    c = load_netlist(FIXTURES / 'or_of_ands.ckt')
    path = tmp_path / 'copy.ckt'
    path.write_text(format_netlist(c), encoding='utf-8')
    assert load_netlist(path) == c


def test_constants_and_negation():
    c = parse_netlist('x x1\nt 1\nn NOT x\ny AND n t\nout y x\n')
    assert eval_circuit(c, '0') == (1, 0)
    assert eval_circuit(c, '1') == (0, 1)
    assert circuit_metrics(c).depth == 2


@pytest.mark.parametrize('text', [
    'g1 x1\n',
    'g1 x1\nout\n',
    'g1 x1\nout g1\ng2 x2\n',
    'lonely\nout lonely\n',
])
def test_syntax_errors(text):
    with pytest.raises(DslSyntaxError):
        parse_netlist(text)


def test_structural_errors():
    """Cycles, unknown labels and gaps in input numbering are rejected while reading."""
    with pytest.raises(CycleDetected):
        parse_netlist('g1 x1\na AND g1 b\nb OR a\nout a\n')
    with pytest.raises(AnalysisError):
        parse_netlist('g1 x1\na XOR g1 g1\nout a\n')
    with pytest.raises(AnalysisError):
        parse_netlist('g1 x2\nout g1\n')
    with pytest.raises(AnalysisError):
        parse_netlist('g1 x1\nout g9\n')
