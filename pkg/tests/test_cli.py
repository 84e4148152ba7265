import json

import pytest
from click.testing import CliRunner

from topocheck import config
from topocheck.config import get_settings
from topocheck.formats import load_topology
from topocheck.main import cli

SIERPINSKI = '{"n":2,"opens":[[],[0],[0,1]]}'
CHAIN = '{"n":3,"opens":[[],[0],[0,1],[0,1,2]]}'


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def payload(result):
    return result.stdout.splitlines()


class TestValidate:
    def test_sierpinski_passes(self, runner, write):
        result = runner.invoke(cli, ["validate", write("t.json", SIERPINSKI)])
        assert result.exit_code == 0
        lines = payload(result)
        assert lines[0] == "command: validate"
        assert lines[1].startswith("input topology sha256:")
        assert lines[-1] == "verdict: pass"

    def test_missing_union_fails(self, runner, write):
        result = runner.invoke(cli, ["validate", write("t.json", '{"n":2,"opens":[[],[0],[1]]}')])
        assert result.exit_code == 1
        assert "FAIL union closure: {0},{1} -> {0,1} missing" in payload(result)
        assert payload(result)[-1] == "verdict: fail"

    def test_truncated_file(self, runner, write):
        result = runner.invoke(cli, ["validate", write("t.json", '{"n":2,"opens":[[]')])
        assert result.exit_code == 2
        assert "[INPUT ERROR]" in result.stderr
        assert payload(result)[-1] == "verdict: fail"

    def test_output_is_deterministic(self, runner, write):
        path = write("t.json", SIERPINSKI)
        first = runner.invoke(cli, ["validate", path])
        second = runner.invoke(cli, ["validate", path])
        assert first.stdout == second.stdout
        assert "[TIME] validate" in first.stderr
        assert "[TIME]" not in first.stdout


class TestCrosscheck:
    def test_sierpinski_on_one_point(self, runner, write):
        result = runner.invoke(cli, ["crosscheck", write("t.json", SIERPINSKI), "{1}"])
        assert result.exit_code == 0
        out = result.stdout
        assert "PASS subspace agreement" in out
        assert "U*({})={0}" in out
        assert 'subspace {"n":1,"opens":[[],[0]]}' in out

    def test_full_carrier(self, runner, write):
        result = runner.invoke(cli, ["crosscheck", write("t.json", CHAIN), "111"])
        assert result.exit_code == 0

    def test_subset_out_of_range(self, runner, write):
        result = runner.invoke(cli, ["crosscheck", write("t.json", SIERPINSKI), "{5}"])
        assert result.exit_code == 2

    def test_invalid_topology_is_an_input_error(self, runner, write):
        result = runner.invoke(cli, ["crosscheck", write("t.json", '{"n":2,"opens":[[],[0],[1]]}'), "{0}"])
        assert result.exit_code == 2


class TestInitial:
    def test_chain_example(self, runner, write):
        f = write("f.json", '{"dom_n":2,"cod_n":3,"table":[0,2]}')
        result = runner.invoke(cli, ["initial", write("t.json", CHAIN), f])
        assert result.exit_code == 0
        assert 'initial {"n":2,"opens":[[],[0],[0,1]]}' in payload(result)
        assert "PASS weakest (census): 4 topologies" in payload(result)

    def test_constant_gives_indiscrete(self, runner, write):
        f = write("f.json", '{"dom_n":3,"cod_n":2,"table":[0,0,0]}')
        result = runner.invoke(cli, ["initial", write("t.json", SIERPINSKI), f])
        assert result.exit_code == 0
        assert 'initial {"n":3,"opens":[[],[0,1,2]]}' in payload(result)

    def test_value_outside_codomain(self, runner, write):
        f = write("f.json", '{"dom_n":2,"cod_n":3,"table":[0,3]}')
        result = runner.invoke(cli, ["initial", write("t.json", CHAIN), f])
        assert result.exit_code == 2

    def test_carrier_mismatch(self, runner, write):
        f = write("f.json", '{"dom_n":2,"cod_n":2,"table":[0,1]}')
        result = runner.invoke(cli, ["initial", write("t.json", CHAIN), f])
        assert result.exit_code == 2
        assert "function codomain n=2" in result.stderr


class TestClosureCheck:
    def test_sierpinski_operator(self, runner, write):
        op = write("op.json", '{"n":2,"table":[[],[0,1],[1],[0,1]]}')
        result = runner.invoke(cli, ["closure-check", op])
        assert result.exit_code == 0
        assert 'topology {"n":2,"opens":[[],[0],[0,1]]}' in payload(result)

    def test_extensivity_violation(self, runner, write):
        op = write("op.json", '{"n":2,"table":[[],[1],[1],[1]]}')
        result = runner.invoke(cli, ["closure-check", op])
        assert result.exit_code == 1
        assert "FAIL kuratowski axioms: K2 extensivity: {0}" in payload(result)

    def test_partial_table(self, runner, write):
        op = write("op.json", '{"n":2,"table":[[],[0]]}')
        result = runner.invoke(cli, ["closure-check", op])
        assert result.exit_code == 2


class TestCensus:
    def test_three_points(self, runner):
        result = runner.invoke(cli, ["census", "3"])
        assert result.exit_code == 0
        assert "PASS frozen count: 29 (expected 29)" in payload(result)

    def test_dump_round_trips(self, runner):
        result = runner.invoke(cli, ["census", "2", "--method", "preorder", "--dump"])
        assert result.exit_code == 0
        records = [line for line in payload(result) if line.startswith("{")]
        assert len(records) == 4
        assert all(json.loads(r)["n"] == 2 for r in records)
        assert len({load_topology(r) for r in records}) == 4

    def test_over_the_limit(self, runner):
        result = runner.invoke(cli, ["census", "9"])
        assert result.exit_code == 2
        assert "limited to n <= 4" in result.stderr

    def test_unknown_method_is_a_usage_error(self, runner):
        result = runner.invoke(cli, ["census", "2", "--method", "sideways"])
        assert result.exit_code == 2


class TestRandom:
    def test_seeded_output_is_stable(self, runner):
        first = runner.invoke(cli, ["random", "6", "--seed", "5"])
        second = runner.invoke(cli, ["random", "6", "--seed", "5"])
        assert first.exit_code == 0
        assert first.stdout == second.stdout
        record = [line for line in payload(first) if line.startswith("{")][0]
        assert load_topology(record).n == 6


class TestSweeps:
    def test_roundtrip(self, runner):
        result = runner.invoke(cli, ["roundtrip", "--max-n", "2"])
        assert result.exit_code == 0
        assert "PASS table classification n=2: 256 tables, 4 accepted, 4 realized" in payload(result)

    def test_sweep(self, runner):
        result = runner.invoke(cli, ["sweep", "--max-n", "1"])
        assert result.exit_code == 0
        assert "PASS subspace n=1: 2 cases, 0 failures" in payload(result)

    def test_fuzz(self, runner):
        result = runner.invoke(cli, ["fuzz", "--cases", "10", "--min-n", "5", "--max-n", "6", "--seed", "1"])
        assert result.exit_code == 0
        assert payload(result)[-1] == "verdict: pass"


def test_verbose_writes_diagnostics_to_stderr(runner):
    result = runner.invoke(cli, ["--verbose", "census", "1", "--method", "preorder"])
    assert result.exit_code == 0
    assert "[CENSUS]" not in result.stdout
    assert "[CENSUS]" in result.stderr or "[CACHE HIT]" in result.stderr


def test_verbose_ends_with_the_invocation(runner):
    runner.invoke(cli, ["--verbose", "census", "2", "--method", "preorder"])
    assert config._verbose_override is False
    assert get_settings().VERBOSE is False

    quiet = runner.invoke(cli, ["census", "2", "--method", "preorder"])
    assert quiet.exit_code == 0
    assert "[CENSUS]" not in quiet.stderr
    assert "[CACHE" not in quiet.stderr


class TestMalformedInput:
    """Every malformed input ends in exit 2 with a failing report, never a traceback."""

    def test_undecodable_file(self, runner, tmp_path):
        path = tmp_path / "t.json"
        path.write_bytes(b'{"n":1,"opens":[[],[0]]}\xff')
        result = runner.invoke(cli, ["validate", str(path)])
        assert result.exit_code == 2
        assert "not UTF-8 text" in result.stderr
        assert payload(result)[-1] == "verdict: fail"
        assert any(line.startswith("input topology sha256:") for line in payload(result))

    def test_superscript_digit_in_subset(self, runner, write):
        result = runner.invoke(cli, ["crosscheck", write("t.json", SIERPINSKI), "{²}"])
        assert result.exit_code == 2
        assert "[INPUT ERROR]" in result.stderr

    def test_negative_workers(self, runner):
        result = runner.invoke(cli, ["census", "2", "--workers", "-2"])
        assert result.exit_code == 2
        assert get_settings().CENSUS_WORKERS >= 1

    def test_workers_do_not_leak_into_settings(self, runner):
        before = get_settings().CENSUS_WORKERS
        result = runner.invoke(cli, ["census", "2", "--workers", "3"])
        assert result.exit_code == 0
        assert get_settings().CENSUS_WORKERS == before

    def test_inverted_fuzz_range(self, runner):
        result = runner.invoke(cli, ["fuzz", "--cases", "3", "--min-n", "9", "--max-n", "3"])
        assert result.exit_code == 2
        assert "min_n <= max_n" in result.stderr

    def test_fuzz_beyond_carrier_cap(self, runner):
        result = runner.invoke(cli, ["fuzz", "--cases", "1", "--min-n", "5", "--max-n", "40"])
        assert result.exit_code == 2

    def test_negative_seed(self, runner):
        result = runner.invoke(cli, ["random", "3", "--seed", "-5"])
        assert result.exit_code == 2

    def test_negative_sweep_size(self, runner):
        result = runner.invoke(cli, ["sweep", "--max-n", "-1"])
        assert result.exit_code == 2
