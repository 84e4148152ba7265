"""
Topocheck - Command-Line Verification Surface
Runs the constructions and cross-checks on files and prints a RunReport.

Payload goes to stdout; diagnostics and wall time go to stderr.
Exit codes: 0 pass, 1 verification failure, 2 bad input.
"""

import time
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple

import click

# Validate settings FIRST - fail fast if config is invalid
from topocheck.config import get_settings, validate_settings_on_startup, verbose_diagnostics
validate_settings_on_startup()

from topocheck.census import FROZEN_COUNTS, census_table, get_census, random_topology
from topocheck.closure import closure_from_topology, topology_from_closure, validate_kuratowski
from topocheck.errors import INPUT_ERRORS, ConstructionError, FormatError
from topocheck.formats import (
    decode_text,
    digest,
    emit_topology,
    family_from_record,
    load_function,
    load_topology,
    parse_operator_file,
    parse_subset_spec,
    parse_topology_file,
    table_from_record,
)
from topocheck.subspace import subspace_topology
from topocheck.topology import validate
from topocheck.verify import (
    CheckLine,
    RunReport,
    check_initial,
    check_subspace,
    classify_all_tables,
    default_max_n,
    fuzz,
    sweep_closure,
    sweep_formats,
    sweep_initial,
    sweep_lines,
    sweep_subspace,
)

Body = Callable[[Dict[str, str]], Tuple[Sequence[CheckLine], Sequence[str]]]

Count = click.IntRange(min=0)
Seed = click.IntRange(min=0)


def _load(files: Dict[str, str], inputs: Dict[str, str]) -> Dict[str, str]:
    """Read each input file, record its digest in `inputs` and return the decoded texts."""
    texts = {}
    for name, path in files.items():
        try:
            data = Path(path).read_bytes()
        except OSError as e:
            raise FormatError(f"cannot read {path}: {e.strerror}", name) from None
        inputs[name] = digest(data)
        texts[name] = decode_text(data, name)
    return texts


def _run(command: str, files: Dict[str, str], body: Body) -> None:
    """
    Read the input files, execute a command body and exit with the report's code.
    Input errors -> exit 2, a failing check or broken construction -> exit 1.
    """
    started = time.perf_counter()
    inputs: Dict[str, str] = {}
    try:
        texts = _load(files, inputs)
        checks, extra = body(texts)
        report = RunReport.from_checks(command, inputs, checks, extra)
    except INPUT_ERRORS as e:
        click.echo(f"[INPUT ERROR] {e}", err=True)
        report = RunReport.input_error(command, inputs, str(e))
    except ConstructionError as e:
        report = RunReport.from_checks(command, inputs, [CheckLine(name="construction", passed=False, detail=str(e))])

    click.echo(report.render())
    click.echo(f"[TIME] {command} wall time {time.perf_counter() - started:.3f}s", err=True)
    click.get_current_context().exit(report.exit_code)


# ============ CLI ============

@click.group()
@click.option("--verbose", is_flag=True, help="Write tagged diagnostics to stderr.")
@click.pass_context
def cli(ctx: click.Context, verbose: bool):
    """Finite-topology verification engine."""
    if verbose:
        ctx.with_resource(verbose_diagnostics())


@cli.command("validate")
@click.argument("topology_file", type=click.Path(exists=True, dir_okay=False))
def cmd_validate(topology_file: str):
    """Check the topology axioms of a family of open sets."""

    def body(texts):
        carrier, family = family_from_record(parse_topology_file(texts["topology"]))
        t, report = validate(carrier, family)
        if report:
            return [CheckLine(name=line.split(":")[0], passed=False, detail=line.split(": ", 1)[1])
                    for line in report.lines()], []
        return [CheckLine(name="topology axioms", passed=True, detail=f"{len(t)} opens")], [f"topology {emit_topology(t)}"]

    _run("validate", {"topology": topology_file}, body)


@cli.command("crosscheck")
@click.argument("topology_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("subset")
def cmd_crosscheck(topology_file: str, subset: str):
    """Build the subspace topology three ways and compare them."""

    def body(texts):
        t = load_topology(texts["topology"])
        y = parse_subset_spec(subset, t.carrier)
        checks, certificate = check_subspace(t, y)
        sub = subspace_topology(t, y).sub
        extra = [f"subset {y}", f"subspace {emit_topology(sub)}", "certificate:"] + certificate
        return checks, extra

    _run("crosscheck", {"topology": topology_file}, body)


@cli.command("initial")
@click.argument("topology_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("function_file", type=click.Path(exists=True, dir_okay=False))
def cmd_initial(topology_file: str, function_file: str):
    """Build the initial topology of a function three ways and verify minimality."""

    def body(texts):
        tX = load_topology(texts["topology"])
        f = load_function(texts["function"])
        census = get_census(f.dom.size).topologies if f.dom.size <= default_max_n() else None
        checks, direct = check_initial(tX, f, census)
        return checks, [f"initial {emit_topology(direct)}"]

    _run("initial", {"topology": topology_file, "function": function_file}, body)


@cli.command("closure-check")
@click.argument("operator_file", type=click.Path(exists=True, dir_okay=False))
def cmd_closure_check(operator_file: str):
    """Validate a Kuratowski closure table and convert it to its topology."""

    def body(texts):
        carrier, table = table_from_record(parse_operator_file(texts["operator"]))
        op, report = validate_kuratowski(carrier, table)
        if report:
            return [CheckLine(name="kuratowski axioms", passed=False, detail=line) for line in report.lines()], []
        t = topology_from_closure(op)
        checks = [
            CheckLine(name="kuratowski axioms", passed=True),
            CheckLine(name="round trip B", passed=closure_from_topology(t) == op),
        ]
        return checks, [f"topology {emit_topology(t)}"]

    _run("closure-check", {"operator": operator_file}, body)


@cli.command("roundtrip")
@click.option("--max-n", type=Count, default=None, help="Largest carrier of the sweep (default: SWEEP_MAX_N).")
@click.option("--slow", is_flag=True, help="Also classify all 8^8 raw tables on 3 points.")
def cmd_roundtrip(max_n, slow: bool):
    """Kuratowski round trips over the census, raw-table classification and file round trips."""
    max_n = default_max_n() if max_n is None else max_n

    def body(_):
        checks, extra = sweep_lines(*sweep_closure(max_n))
        checks += classify_all_tables(2)
        if slow:
            checks += classify_all_tables(3)
        checks += sweep_formats(max_n)
        return checks, extra

    _run("roundtrip", {}, body)


@cli.command("census")
@click.argument("n", type=int)
@click.option("--method", type=click.Choice(["brute", "preorder"]), default="brute", show_default=True)
@click.option("--dump", is_flag=True, help="Write every topology, one record per line.")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Processes for the brute census.")
def cmd_census(n: int, method: str, dump: bool, workers):
    """Enumerate every labeled topology on N points."""

    def body(_):
        census = get_census(n, method, workers)
        checks: List[CheckLine] = []
        if n in FROZEN_COUNTS:
            checks.append(CheckLine(
                name="frozen count",
                passed=census.count == FROZEN_COUNTS[n],
                detail=f"{census.count} (expected {FROZEN_COUNTS[n]})",
            ))
        extra = census_table([census]).to_string(index=False).splitlines()
        if dump:
            extra += [emit_topology(t) for t in census]
        return checks, extra

    _run("census", {}, body)


@cli.command("random")
@click.argument("n", type=int)
@click.option("--seed", type=Seed, default=None, help="Generator seed (default: DEFAULT_SEED).")
def cmd_random(n: int, seed):
    """Emit one seeded random topology on N points."""
    seed = get_settings().DEFAULT_SEED if seed is None else seed

    def body(_):
        t = random_topology(n, seed)
        line = emit_topology(t)
        check = CheckLine(name="record round trip", passed=load_topology(line) == t)
        return [check], [line]

    _run("random", {}, body)


@cli.command("sweep")
@click.option("--max-n", type=Count, default=None, help="Largest carrier of the sweep (default: SWEEP_MAX_N).")
def cmd_sweep(max_n):
    """Subspace, representative, inclusion and initial-topology checks over the census."""
    max_n = default_max_n() if max_n is None else max_n

    def body(_):
        checks, extra = sweep_lines(*sweep_subspace(max_n))
        more_checks, more_extra = sweep_lines(*sweep_initial(max_n))
        return checks + more_checks, extra + more_extra

    _run("sweep", {}, body)


@cli.command("fuzz")
@click.option("--cases", type=Count, default=None, help="Number of random cases (default: FUZZ_CASES).")
@click.option("--min-n", type=Count, default=None)
@click.option("--max-n", type=Count, default=None)
@click.option("--seed", type=Seed, default=None)
def cmd_fuzz(cases, min_n, max_n, seed):
    """Seeded random topologies beyond census range."""
    s = get_settings()
    cases = s.FUZZ_CASES if cases is None else cases
    min_n = s.FUZZ_MIN_N if min_n is None else min_n
    max_n = s.FUZZ_MAX_N if max_n is None else max_n
    seed = s.DEFAULT_SEED if seed is None else seed

    def body(_):
        return sweep_lines(*fuzz(cases, min_n, max_n, seed))

    _run("fuzz", {}, body)


# ============ Run CLI ============

if __name__ == "__main__":
    cli()
