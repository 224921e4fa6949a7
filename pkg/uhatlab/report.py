from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from rich.markup import escape
from rich.table import Table
from rich.tree import Tree

from .core_ir import (
    DIAGRAM_CLASSES, Classification, Pointwise, Recognizer, accepts_execution, execute, format_value,
)
from .program_parser import format_expr, format_score
from .transforms import PassReport


@dataclass
class RunReport:
    """Per-layer values, selected attention indices and the verdict for one word."""
    word: str
    layers: List[List[object]]
    selections: Dict[int, List[Optional[int]]] = field(default_factory=dict)
    verdict: bool = False

    @classmethod
    def from_run(cls, rec: Recognizer, word: str) -> 'RunReport':
        if not word:
            return cls(word='', layers=[[] for _ in range(rec.depth + 1)], verdict=rec.empty_word_accepts)
        run = execute(rec, word)
        return cls(word=run.word, layers=run.layers, selections=run.selections,
                   verdict=accepts_execution(rec, run))

    def as_dict(self) -> dict:
        return {
            'word': self.word,
            'verdict': 'accept' if self.verdict else 'reject',
            'layers': [[format_value(v) for v in layer] for layer in self.layers],
            'selections': {str(k): v for k, v in self.selections.items()},
        }


def trace_table(report: RunReport) -> Table:
    """Layers as rows, positions as columns; attention rows are followed by their selections."""
    verdict = "[green]accept[/]" if report.verdict else "[red]reject[/]"
    table = Table(title=f"{report.word or 'ε'}: {verdict}")
    table.add_column("layer", style="bold")
    for p, letter in enumerate(report.word):
        table.add_column(f"{p}:{letter}", justify="right")
    for idx, layer in enumerate(report.layers):
        table.add_row(f"L{idx}", *(format_value(v) for v in layer))
        if idx in report.selections:
            table.add_row("  ↳ j", *('-' if j is None else str(j) for j in report.selections[idx]),
                          style="dim")
    return table


def classification_table(c: Classification, title: str = "classification") -> Table:
    table = Table(title=title, show_header=False)
    table.add_column("property", style="bold")
    table.add_column("value")
    for key, value in c.as_dict().items():
        if isinstance(value, list):
            value = ', '.join(value) or '-'
        table.add_row(key.replace('_', ' '), str(value))
    return table


def diagram_table(matrix: Dict[str, Tuple[str, ...]]) -> Table:
    """Programs against inclusion-diagram classes: ● own class, ✓ containing class."""
    table = Table(title="inclusion diagram")
    table.add_column("program", style="bold")
    for name in DIAGRAM_CLASSES:
        table.add_column(name, justify="center")
    for program, classes in matrix.items():
        cells = ['●' if classes[0] == name else '✓' if name in classes else '' for name in DIAGRAM_CLASSES]
        table.add_row(escape(program), *cells)
    return table


def pass_table(report: PassReport) -> Table:
    status = "[green]preserved[/]" if report.passed else f"[red]counterexample {report.counterexample!r}[/]"
    table = Table(title=f"{report.name}: {status}")
    table.add_column("property", style="bold")
    table.add_column("before")
    table.add_column("after")
    before, after = report.before.as_dict(), report.after.as_dict()
    for key in before:
        b, a = before[key], after[key]
        if isinstance(b, list):
            b, a = ', '.join(b) or '-', ', '.join(a) or '-'
        table.add_row(key.replace('_', ' '), str(b), str(a))
    table.add_row("checked up to", "", str(report.equivalence_checked_up_to))
    table.add_row("layer delta", "", f"{report.layer_delta:+d}")
    for line, terms in sorted(report.term_counts.items()):
        table.add_row(f"L{line} terms", "", str(terms))
    return table


def program_tree(rec: Recognizer, title: str = "program") -> Tree:
    """Rich tree of the program: initialization, lines, acceptance."""
    root = Tree(f"[bold blue]{title}[/] over {{{', '.join(rec.alphabet)}}}")
    root.add(f"L0: init {rec.init.kind.value}")
    for idx, line in enumerate(rec.lines, start=1):
        if isinstance(line, Pointwise):
            root.add(f"L{idx}: {escape(format_expr(line.value))}")
            continue
        branch = root.add(f"[bold]L{idx}[/]: attend {line.tie.value} (mask {line.mask.value})")
        branch.add(f"score: {escape(format_score(line.score))}")
        branch.add(f"value: {escape(format_expr(line.value))}")
        branch.add(f"default: {escape(format_expr(line.default))}")
    root.add(f"accept at {rec.read_pos.value} when {escape(format_expr(rec.valid))}")
    return root
