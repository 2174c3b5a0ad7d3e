"""Command-line behavior: artifacts on stdout, diagnostics on stderr,
exit codes 0 (success) / 1 (infeasible or invalid data) / 2 (usage)."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from qmcflow.checker import check_flow
from qmcflow.cli import main
from qmcflow.core import StorageMode, parse_flow, parse_instance, serialize_instance
from qmcflow.instances import CycleParams, cycle_instance


@pytest.fixture
def cycle4(tmp_path: Path) -> str:
    path = tmp_path / "cycle4.json"
    path.write_text(serialize_instance(cycle_instance(4)), encoding="utf-8")
    return str(path)


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGen:
    def test_cycle_to_stdout(self, capsys):
        code, out, _ = run(capsys, "gen", "cycle", "--k", "4")
        assert code == 0
        assert parse_instance(out) == cycle_instance(4)

    def test_cycle_with_d0(self, capsys, tmp_path):
        target = tmp_path / "inst.json"
        code, out, _ = run(capsys, "gen", "cycle", "--k", "5", "--d0", "3/2", "-o", str(target))
        assert code == 0
        assert out == ""
        parsed = parse_instance(target.read_text(encoding="utf-8"))
        assert parsed == cycle_instance(CycleParams(5, Fraction(3, 2)))

    def test_wait_schedule_checks_out(self, capsys):
        code, out, _ = run(capsys, "gen", "wait-schedule", "--k", "4")
        assert code == 0
        flow = parse_flow(out)
        assert check_flow(flow, cycle_instance(4), StorageMode.WITH_STORAGE).ok

    def test_wave_schedule_checks_out(self, capsys):
        code, out, _ = run(capsys, "gen", "wave-schedule", "--k", "4")
        assert code == 0
        flow = parse_flow(out)
        assert check_flow(flow, cycle_instance(4), StorageMode.NO_INTERMEDIATE_STORAGE).ok

    def test_random_is_reproducible(self, capsys):
        first = run(capsys, "gen", "random", "--seed", "11")
        second = run(capsys, "gen", "random", "--seed", "11")
        assert first == second
        assert first[0] == 0

    def test_bad_k_is_a_usage_error(self, capsys):
        code, _, err = run(capsys, "gen", "cycle", "--k", "2")
        assert code == 2
        assert "error" in err


class TestSolve:
    def test_with_storage_minimum(self, capsys, cycle4):
        code, out, _ = run(capsys, "solve", "--mode", "with-storage", "--max-T", "10", cycle4)
        assert code == 0
        assert out == "5\n"

    def test_no_storage_minimum(self, capsys, cycle4):
        code, out, _ = run(capsys, "solve", "--mode", "no-storage", "--max-T", "10", cycle4)
        assert code == 0
        assert out == "7\n"

    def test_bound_exhausted_is_exit_one(self, capsys, cycle4):
        code, out, err = run(capsys, "solve", "--mode", "no-storage", "--max-T", "6", cycle4)
        assert code == 1
        assert out == ""
        assert "no feasible horizon" in err

    def test_emitted_flow_is_a_witness(self, capsys, cycle4, tmp_path):
        target = tmp_path / "flow.json"
        code, out, err = run(
            capsys,
            "solve",
            "--mode",
            "no-storage",
            "--max-T",
            "10",
            "--emit-flow",
            str(target),
            cycle4,
        )
        assert code == 0
        assert out == "7\n"
        assert str(target) in err
        flow = parse_flow(target.read_text(encoding="utf-8"))
        assert flow.horizon == 7
        assert check_flow(flow, cycle_instance(4), StorageMode.NO_INTERMEDIATE_STORAGE).ok

    def test_float_mode_prints_the_same_minimum(self, capsys, cycle4):
        code, out, _ = run(capsys, "solve", "--mode", "with-storage", "--max-T", "10", "--float", cycle4)
        assert code == 0
        assert out == "5\n"

    def test_float_with_emit_flow_is_a_usage_error(self, capsys, cycle4):
        code, _, err = run(
            capsys,
            "solve",
            "--mode",
            "with-storage",
            "--max-T",
            "10",
            "--float",
            "--emit-flow",
            "x.json",
            cycle4,
        )
        assert code == 2
        assert "--float" in err

    def test_invalid_instance_is_exit_one(self, capsys, tmp_path):
        doc = json.loads(serialize_instance(cycle_instance(3)))
        doc["commodities"][0]["sink"] = doc["commodities"][0]["source"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        code, _, err = run(capsys, "solve", "--mode", "with-storage", "--max-T", "5", str(path))
        assert code == 1
        assert "invalid instance" in err

    def test_missing_file_is_exit_two(self, capsys):
        code, _, err = run(capsys, "solve", "--mode", "with-storage", "--max-T", "5", "nope.json")
        assert code == 2
        assert "error" in err

    def test_malformed_json_is_exit_two(self, capsys, tmp_path):
        path = tmp_path / "garbage.json"
        path.write_text("{", encoding="utf-8")
        code, _, err = run(capsys, "solve", "--mode", "with-storage", "--max-T", "5", str(path))
        assert code == 2
        assert "error" in err


class TestCheck:
    def test_feasible_flow(self, capsys, cycle4, tmp_path):
        flow_path = tmp_path / "wait.json"
        run(capsys, "gen", "wait-schedule", "--k", "4", "-o", str(flow_path))
        code, out, err = run(
            capsys, "check", "--mode", "with-storage", cycle4, str(flow_path)
        )
        assert code == 0
        assert out == ""
        assert "no violations" in err

    def test_violations_go_to_stdout_as_json_lines(self, capsys, cycle4, tmp_path):
        flow_path = tmp_path / "wait.json"
        run(capsys, "gen", "wait-schedule", "--k", "4", "-o", str(flow_path))
        code, out, err = run(capsys, "check", "--mode", "no-storage", cycle4, str(flow_path))
        assert code == 1
        records = [json.loads(line) for line in out.splitlines()]
        assert records
        assert {r["kind"] for r in records} == {"strict-conservation"}
        assert {r["location"] for r in records} == {"v0"}
        assert "violation(s)" in err

    def test_structurally_inconsistent_flow(self, capsys, cycle4, tmp_path):
        flow_path = tmp_path / "odd.json"
        flow_path.write_text(
            json.dumps(
                {
                    "horizon": 5,
                    "rates": [
                        {
                            "arc": "zz",
                            "commodity": 0,
                            "pieces": [{"from": 0, "to": 1, "rate": 1}],
                        }
                    ],
                }
            ),
            encoding="utf-8",
        )
        code, _, err = run(capsys, "check", "--mode", "with-storage", cycle4, str(flow_path))
        assert code == 1
        assert "invalid flow" in err


class TestExpand:
    def test_summary_shape(self, capsys, tmp_path):
        path = tmp_path / "cycle3.json"
        path.write_text(serialize_instance(cycle_instance(3)), encoding="utf-8")
        code, out, _ = run(capsys, "expand", "--T", "4", "--mode", "with-storage", str(path))
        assert code == 0
        assert "T=4" in out
        assert "movement copies: 9" in out
        assert "holdover arcs: 12" in out


class TestGap:
    def test_csv_on_stdout(self, capsys):
        code, out, _ = run(capsys, "gap", "--k-min", "3", "--k-max", "4")
        assert code == 0
        assert out == "k,minT_with,minT_without,ratio\n3,4,5,5/4\n4,5,7,7/5\n"

    def test_csv_to_file(self, capsys, tmp_path):
        target = tmp_path / "gap.csv"
        code, out, _ = run(
            capsys, "gap", "--k-min", "3", "--k-max", "3", "--csv", str(target)
        )
        assert code == 0
        assert out == ""
        assert target.read_text(encoding="utf-8") == "k,minT_with,minT_without,ratio\n3,4,5,5/4\n"

    def test_bad_range_is_exit_two(self, capsys):
        code, _, err = run(capsys, "gap", "--k-min", "5", "--k-max", "4")
        assert code == 2
        assert "error" in err

    def test_explicit_bound_too_small_is_exit_one(self, capsys):
        code, _, err = run(capsys, "gap", "--k-min", "4", "--k-max", "4", "--max-T", "6")
        assert code == 1
        assert "no feasible horizon" in err


class TestUsage:
    def test_no_arguments(self, capsys):
        assert run(capsys)[0] == 2

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2

    def test_missing_required_flag(self, capsys):
        assert run(capsys, "solve", "--max-T", "5", "x.json")[0] == 2

    def test_unknown_mode(self, capsys):
        assert run(capsys, "solve", "--mode", "maybe", "--max-T", "5", "x.json")[0] == 2

    def test_help_exits_zero(self, capsys):
        assert run(capsys, "--help")[0] == 0
