"""Reader for the ``.ckt`` netlist format.

One vertex per line, ``<id> <label> [<input id> ...]``, where the label is
x<k>, 0, 1, NOT, AND or OR. A final ``out <id> ...`` line names the outputs.
``#`` starts a comment.
"""
from pathlib import Path
from typing import List, Union
import logging

from .analysis import Circuit, Gate, topological_order
from .errors import DslSyntaxError

logger = logging.getLogger(__name__)


def parse_netlist(text: str) -> Circuit:
    gates: List[Gate] = []
    outputs = None
    for number, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split('#', 1)[0].split()
        if not fields:
            continue
        if outputs is not None:
            raise DslSyntaxError("nothing may follow the out line", number, 1)
        if fields[0] == 'out':
            if len(fields) == 1:
                raise DslSyntaxError("out line names no vertices", number, 1)
            outputs = tuple(fields[1:])
            continue
        if len(fields) < 2:
            raise DslSyntaxError("expected '<id> <label> [inputs...]'", number, 1)
        gates.append(Gate(fields[0], fields[1], tuple(fields[2:])))

    if outputs is None:
        raise DslSyntaxError("missing out line", max(1, len(text.splitlines())), 1)
    circuit = Circuit(tuple(gates), outputs)
    topological_order(circuit)
    logger.debug("read circuit with %d vertices and %d outputs", len(gates), len(outputs))
    return circuit


def load_netlist(path: Union[str, Path]) -> Circuit:
    return parse_netlist(Path(path).read_text(encoding='utf-8'))


def format_netlist(c: Circuit) -> str:
    lines = [' '.join((g.id, g.label) + g.inputs) for g in c.gates]
    lines.append(' '.join(('out',) + c.outputs))
    return '\n'.join(lines) + '\n'
