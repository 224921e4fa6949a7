from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence
import argparse
import logging
import sys

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from uhatlab import (
    ConfigLoader, PASSES, Recognizer, Restriction, RunReport, UhatLabError, Verdict,
    audit_sbar, check_equivalence, check_fixability, circuit_metrics, classification_table,
    classify_program, default_encoding, diagram_matrix, diagram_table, encode_binary,
    eval_circuit, eval_fo, format_program, library, load_netlist, lookup_oracle, ltl_recognize,
    parse_fo, parse_ltl, parse_program, pass_table, program_tree, run_pass, search_unfixable,
    trace_table, use_settings,
)
from uhatlab import serialization

console = Console()
err_console = Console(stderr=True)
logger = logging.getLogger('uhatlab')

EXIT_OK, EXIT_REJECT, EXIT_ERROR = 0, 1, 2


def add_arguments(parser):
    """Add global flags and one subparser per command."""
    parser.add_argument('--json', action='store_true',
                        help='Print machine-readable JSON instead of tables')
    parser.add_argument('--config', type=str,
                        help='Path to a config.yaml (default: the one next to main.py)')
    parser.add_argument('--show-config', action='store_true',
                        help='Print the effective settings and exit')
    parser.add_argument('--verbose', action='store_true',
                        help='Log debug output to stderr')
    sub = parser.add_subparsers(dest='command')

    run = sub.add_parser('run', help='Run a program on one word')
    run.add_argument('--program', required=True, help='.urasp, .json or builtin:<name>')
    run.add_argument('--word', required=True, help="Input word ('' for the empty word)")
    run.add_argument('--trace', action='store_true', help='Show every layer and the selected positions')

    equiv = sub.add_parser('equiv', help='Compare two languages on all short words')
    equiv.add_argument('--a', required=True, help='Program or oracle:<name>')
    equiv.add_argument('--b', required=True, help='Program or oracle:<name>')
    equiv.add_argument('--alphabet', help='Letters to enumerate (default: the first program\'s alphabet)')
    equiv.add_argument('--max-len', type=int, help='Longest word to compare')

    transform = sub.add_parser('transform', help='Apply a transformation pass and verify it')
    transform.add_argument('--program', required=True)
    transform.add_argument('--pass', dest='pass_name', required=True, choices=sorted(PASSES))
    transform.add_argument('--mode', choices=['sentinel', 'bound'], help='eliminate-mask: how masked pairs are scored')
    transform.add_argument('--n-max', type=int, help='Largest input length covered by enumerated tables')
    transform.add_argument('--normalize-ties', action='store_true',
                           help='eliminate-ties: rewrite leftmost lines to rightmost')
    transform.add_argument('--verify-len', type=int, help='Longest word used to verify the pass')
    transform.add_argument('--output', help='Write the transformed program (.urasp or .json)')

    fix = sub.add_parser('fixability', help='Search for restrictions no small extension decides')
    fix.add_argument('--language', required=True, help='Program or oracle:<name>')
    fix.add_argument('--epsilon', required=True, help='Fraction of positions an extension may fix, e.g. 1/5')
    fix.add_argument('--alphabet', help='Alphabet (default: the program\'s alphabet)')
    fix.add_argument('--n-min', type=int, default=1)
    fix.add_argument('--n-max', type=int, default=8)
    fix.add_argument('--restriction', help="Check one restriction such as 'a??b' instead of searching")
    fix.add_argument('--exhaustive', action='store_true', help='Also try every single-letter restriction')

    for name, help_text in (('ltl', 'Evaluate an LTL formula on a word'),
                            ('fo', 'Evaluate a first-order sentence on a word')):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument('--formula', required=True, help='Formula file or formula text')
        cmd.add_argument('--word', required=True)
        if name == 'ltl':
            cmd.add_argument('--mode', choices=['fltl', 'pltl', 'ltl'], default='fltl')

    circuit = sub.add_parser('circuit', help='Evaluate a boolean circuit')
    circuit.add_argument('--netlist', required=True)
    circuit.add_argument('--input', help='Input bits, e.g. 0110')
    circuit.add_argument('--word', help='Word to encode into input bits')
    circuit.add_argument('--alphabet', default='ab', help='Alphabet used to encode --word')

    classify = sub.add_parser('classify', help='Report structural properties of a program')
    classify.add_argument('--program')
    classify.add_argument('--library', action='store_true',
                          help='Tabulate every library program against the inclusion diagram')
    classify.add_argument('--bound', type=int, help='Longest word searched for ties')

    audit = sub.add_parser('audit-sbar', help='Check the mask-simulating score exhaustively')
    audit.add_argument('--bound', type=int, default=16)

    fmt = sub.add_parser('format', help='Print a program as DSL, JSON or a tree')
    fmt.add_argument('--program', required=True)
    fmt.add_argument('--to', choices=['dsl', 'json', 'tree'], default='dsl')


# ---------------------------------------------------------------- loading

def _read(path: str) -> str:
    return Path(path).read_text(encoding='utf-8')


def load_program(source: str) -> Recognizer:
    """A .urasp or .json file, or builtin:<name> from the fixture library."""
    if source.startswith('builtin:'):
        name = source.split(':', 1)[1]
        fixtures = {fixture.name: fixture.rec for fixture in library()}
        if name not in fixtures:
            raise UhatLabError(f"unknown builtin program {name!r}; known: {', '.join(sorted(fixtures))}")
        return fixtures[name]
    if source.endswith('.json'):
        rec = serialization.loads(_read(source))
        if not isinstance(rec, Recognizer):
            raise UhatLabError(f"{source} does not hold a program")
        return rec
    return parse_program(_read(source))


def load_language(source: str):
    """(predicate or program, alphabet or None) for oracle:<name> or a program."""
    if source.startswith('oracle:'):
        return lookup_oracle(source.split(':', 1)[1]), None
    rec = load_program(source)
    return rec, rec.alphabet


def _formula_text(value: str) -> str:
    path = Path(value)
    if path.suffix in ('.ltl', '.fo') or path.is_file():
        return _read(value)
    return value


def _alphabet(explicit: Optional[str], *fallbacks) -> Sequence[str]:
    if explicit:
        return tuple(explicit)
    for alphabet in fallbacks:
        if alphabet:
            return alphabet
    raise UhatLabError("no alphabet: pass --alphabet when comparing oracles")


def _spinner(description: str) -> Progress:
    progress = Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                        console=err_console, transient=True)
    progress.add_task(description, total=None)
    return progress


def _emit_text(text: str) -> None:
    console.print(text, markup=False, highlight=False, soft_wrap=True, end='')


# ---------------------------------------------------------------- commands

def cmd_run(args) -> int:
    rec = load_program(args.program)
    report = RunReport.from_run(rec, args.word)
    if args.json:
        console.print_json(data=report.as_dict())
    elif args.trace:
        console.print(trace_table(report))
    else:
        console.print("[green]accept[/]" if report.verdict else "[red]reject[/]")
    return EXIT_OK if report.verdict else EXIT_REJECT


def cmd_equiv(args) -> int:
    a, alphabet_a = load_language(args.a)
    b, alphabet_b = load_language(args.b)
    alphabet = _alphabet(args.alphabet, alphabet_a, alphabet_b)
    max_len = args.max_len if args.max_len is not None else args.settings.default_max_len
    with _spinner(f"Comparing on words up to length {max_len}..."):
        counterexample = check_equivalence(a, b, alphabet, max_len)
    if args.json:
        console.print_json(data={'equivalent': counterexample is None, 'max_len': max_len,
                                 'counterexample': counterexample})
    elif counterexample is None:
        console.print(f"[green]equivalent[/] on all words up to length {max_len}")
    else:
        console.print(f"[red]differ[/] on {counterexample!r}")
    return EXIT_OK if counterexample is None else EXIT_REJECT


def cmd_transform(args) -> int:
    rec = load_program(args.program)
    options = {}
    if args.mode and args.pass_name == 'eliminate-mask':
        options['mode'] = args.mode
    if args.n_max is not None and args.pass_name in ('eliminate-mask', 'eliminate-ties'):
        options['n_max'] = args.n_max
    if args.normalize_ties and args.pass_name == 'eliminate-ties':
        options['normalize_ties'] = True
    with _spinner(f"Running {args.pass_name}..."):
        after, report = run_pass(args.pass_name, rec, verify_len=args.verify_len, **options)

    if args.output:
        text = serialization.dumps(after) + '\n' if args.output.endswith('.json') else format_program(after)
        Path(args.output).write_text(text, encoding='utf-8')
        logger.info("wrote %s", args.output)
    if args.json:
        console.print_json(data=report.as_dict())
    else:
        console.print(pass_table(report))
        for note in report.notes:
            console.print(f"[dim]{escape(note)}[/]")
    return EXIT_OK if report.passed else EXIT_REJECT


def _epsilon(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UhatLabError(f"--epsilon expects a fraction such as 1/5, got {text!r}")


def cmd_fixability(args) -> int:
    language, alphabet = load_language(args.language)
    alphabet = _alphabet(args.alphabet, alphabet)
    epsilon = _epsilon(args.epsilon)
    with _spinner("Searching restrictions..."):
        if args.restriction:
            witness = check_fixability(language, Restriction(args.restriction), epsilon, alphabet)
        else:
            witness = search_unfixable(language, epsilon, range(args.n_min, args.n_max + 1), alphabet,
                                       exhaustive=args.exhaustive)
    unfixable = witness is not None and witness.verdict is Verdict.UNFIXABLE
    if args.json:
        console.print_json(data=witness.as_dict() if witness else {'verdict': None})
    elif witness is None:
        console.print(f"no unfixable restriction for n in {args.n_min}..{args.n_max} at ε={epsilon}")
    else:
        table = Table(show_header=False)
        for key, value in witness.as_dict().items():
            table.add_row(key, escape(str(value)))
        console.print(table)
    return EXIT_REJECT if unfixable else EXIT_OK


def _verdict(args, accepted: bool) -> int:
    if args.json:
        console.print_json(data={'word': args.word, 'verdict': 'accept' if accepted else 'reject'})
    else:
        console.print("[green]accept[/]" if accepted else "[red]reject[/]")
    return EXIT_OK if accepted else EXIT_REJECT


def cmd_ltl(args) -> int:
    phi = parse_ltl(_formula_text(args.formula))
    return _verdict(args, ltl_recognize(phi, args.word, args.mode))


def cmd_fo(args) -> int:
    phi = parse_fo(_formula_text(args.formula))
    return _verdict(args, eval_fo(phi, args.word))


def cmd_circuit(args) -> int:
    circuit = load_netlist(args.netlist)
    if args.input is not None:
        bits = args.input
    elif args.word is not None:
        bits = encode_binary(args.word, default_encoding(tuple(args.alphabet)))
    else:
        raise UhatLabError("pass --input or --word")
    outputs = eval_circuit(circuit, bits)
    metrics = circuit_metrics(circuit)
    if args.json:
        console.print_json(data={'input': bits, 'outputs': list(outputs), 'depth': metrics.depth,
                                 'wires': metrics.wire_count, 'gates': metrics.gate_count})
    else:
        console.print(f"outputs: {' '.join(map(str, outputs))}")
        console.print(f"[dim]depth {metrics.depth}, {metrics.wire_count} wires, {metrics.gate_count} vertices[/]")
    return EXIT_OK if outputs and outputs[0] == 1 else EXIT_REJECT


# Pass outputs shown next to the library so the matrix covers the rewritten classes too.
DIAGRAM_PASSES = (
    ('palindrome-separable', 'separable-to-bilinear'),
    ('palindrome-masked', 'eliminate-mask'),
    ('contains-a', 'brasp-to-masked'),
    ('dyck1(2)', 'simulate-mask'),
    ('dyck1(2)', 'fmuhat-to-uhat'),
)


def library_programs():
    """(name, program) for every library fixture, then for the DIAGRAM_PASSES outputs."""
    fixtures = {fixture.name: fixture.rec for fixture in library()}
    programs = list(fixtures.items())
    for name, pass_name in DIAGRAM_PASSES:
        programs.append((f"{name} | {pass_name}", PASSES[pass_name](fixtures[name])))
    return programs


def cmd_classify(args) -> int:
    if args.library:
        with _spinner("Classifying the library..."):
            matrix = diagram_matrix(library_programs(), bound=args.bound)
        if args.json:
            console.print_json(data={name: list(classes) for name, classes in matrix.items()})
        else:
            console.print(diagram_table(matrix))
        return EXIT_OK
    if args.program is None:
        raise UhatLabError("pass --program or --library")
    rec = load_program(args.program)
    with _spinner("Classifying..."):
        result = classify_program(rec, bound=args.bound)
    if args.json:
        console.print_json(data=result.as_dict())
    else:
        console.print(program_tree(rec, Path(args.program).stem))
        console.print(classification_table(result))
    return EXIT_OK


def cmd_audit_sbar(args) -> int:
    with _spinner(f"Auditing up to n={args.bound}..."):
        audit = audit_sbar(args.bound)
    if args.json:
        console.print_json(data=audit.as_dict())
    elif audit.passed:
        console.print(f"[green]{audit.checks} checks passed[/] ({audit.term_count} separable terms)")
    else:
        console.print(f"[red]{len(audit.violations)} violations[/] in {audit.checks} checks")
        for violation in audit.violations[:20]:
            console.print(f"  {escape(violation)}")
    return EXIT_OK if audit.passed else EXIT_REJECT


def cmd_format(args) -> int:
    rec = load_program(args.program)
    if args.to == 'json' or args.json:
        _emit_text(serialization.dumps(rec) + '\n')
    elif args.to == 'tree':
        console.print(program_tree(rec, Path(args.program).stem))
    else:
        _emit_text(format_program(rec))
    return EXIT_OK


COMMANDS = {
    'run': cmd_run,
    'equiv': cmd_equiv,
    'transform': cmd_transform,
    'fixability': cmd_fixability,
    'ltl': cmd_ltl,
    'fo': cmd_fo,
    'circuit': cmd_circuit,
    'classify': cmd_classify,
    'audit-sbar': cmd_audit_sbar,
    'format': cmd_format,
}


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code: 0 accept/pass, 1 reject/counterexample, 2 error."""
    parser = argparse.ArgumentParser(prog='uhatlab',
                                     description="Run, transform and verify unique-hard-attention programs")
    add_arguments(parser)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR

    try:
        settings = ConfigLoader(args.config).load()
    except (OSError, ValueError) as e:
        console.print(f"[bold red]Error loading config: {escape(str(e))}[/]")
        return EXIT_ERROR
    use_settings(settings)
    _configure_logging('DEBUG' if args.verbose else settings.log_level)
    args.settings = settings

    try:
        if args.show_config:
            if args.json:
                console.print_json(data=settings.as_dict())
            else:
                console.print(Panel.fit('\n'.join(f"{k}: {v}" for k, v in settings.as_dict().items()),
                                        title="[bold blue]uhatlab settings[/]", border_style="blue"))
            return EXIT_OK
        if args.command is None:
            parser.print_usage()
            return EXIT_ERROR
        return COMMANDS[args.command](args)
    except (UhatLabError, OSError, ValueError, ArithmeticError) as e:
        console.print(f"[bold red]Error: {escape(str(e))}[/]")
        logger.debug("command failed", exc_info=True)
        return EXIT_ERROR
    finally:
        use_settings(None)


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
