"""Command-line interface: files, schemas, exit codes, byte stability."""

import csv
import math

import pytest

from carrieralloc import cli, run, serialize_scenario, two_carrier_nine_user


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def run_cli(argv):
    return cli.main(argv)


class TestRunCommand:
    def test_symmetric_preset_prices_equal(self, tmp_path):
        out = tmp_path / "out"
        code = run_cli(["run", "--preset", "section5",
                        "--set-capacity", "1=100", "--out", str(out)])
        assert code == 0
        rows = read_rows(out / "prices.csv")
        assert rows[0] == ["carrier_id", "offered_price", "allocation_price"]
        p1 = float(rows[1][1])
        p2 = float(rows[2][1])
        assert abs(p1 - p2) / p2 <= 1e-3

    def test_aggregates_conserve_capacity(self, tmp_path):
        out = tmp_path / "out"
        code = run_cli(["run", "--preset", "section5",
                        "--set-capacity", "1=50", "--out", str(out)])
        assert code == 0
        rows = read_rows(out / "aggregates.csv")
        assert rows[0] == ["user_id", "r_agg"]
        assert len(rows) == 10  # header + nine users
        total = sum(float(r[1]) for r in rows[1:])
        assert total == pytest.approx(150.0, rel=1e-6)

    def test_allocation_rows_and_offsets(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli(["run", "--preset", "section5", "--out", str(out)]) == 0
        rows = read_rows(out / "allocations.csv")
        assert rows[0] == ["user_id", "carrier_id", "rate", "offset_used"]
        # six covered pairs per carrier
        assert len(rows) == 1 + 12

    def test_trace_files_written(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli(["run", "--preset", "section5", "--out", str(out)]) == 0
        for cid in (1, 2):
            for phase in ("offered", "allocation"):
                rows = read_rows(out / f"trace_{cid}_{phase}.csv")
                assert rows[0] == ["iteration", "price", "user_id", "w", "r"]
                assert len(rows) > 1

    def test_full_precision_round_trip(self, tmp_path):
        # CSV floats parse back to the exact in-memory report values
        out = tmp_path / "out"
        assert run_cli(["run", "--preset", "section5", "--out", str(out)]) == 0
        report = run(two_carrier_nine_user())
        rows = read_rows(out / "prices.csv")
        for row in rows[1:]:
            cid = int(row[0])
            assert float(row[1]) == report.offered_prices[cid]
            assert float(row[2]) == report.allocation_prices[cid]

    def test_scenario_file_input(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(serialize_scenario(two_carrier_nine_user(60.0, 100.0)))
        out = tmp_path / "out"
        assert run_cli(["run", "--scenario", str(path), "--out", str(out)]) == 0
        rows = read_rows(out / "aggregates.csv")
        total = sum(float(r[1]) for r in rows[1:])
        assert total == pytest.approx(160.0, rel=1e-6)

    def test_missing_scenario_file(self, tmp_path, capsys):
        code = run_cli(["run", "--scenario", str(tmp_path / "absent.json"),
                        "--out", str(tmp_path / "out")])
        assert code == cli.EXIT_INPUT
        err = capsys.readouterr().err
        assert "absent.json" in err

    def test_nonconvergence_exit_code(self, tmp_path, capsys):
        code = run_cli(["run", "--preset", "section5", "--max-iters", "2",
                        "--out", str(tmp_path / "out")])
        assert code == cli.EXIT_SOLVER
        assert "did not converge" in capsys.readouterr().err

    def test_bad_set_capacity_spec(self, tmp_path, capsys):
        code = run_cli(["run", "--preset", "section5",
                        "--set-capacity", "banana",
                        "--out", str(tmp_path / "out")])
        assert code == cli.EXIT_INPUT
        assert "ID=VALUE" in capsys.readouterr().err

    def test_byte_identical_reruns(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        for out in (out1, out2):
            assert run_cli(["run", "--preset", "section5",
                            "--set-capacity", "1=130", "--out", str(out)]) == 0
        names = sorted(p.name for p in out1.iterdir())
        assert names == sorted(p.name for p in out2.iterdir())
        for name in names:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestSweepCommand:
    def test_full_sweep_files(self, tmp_path):
        out = tmp_path / "out"
        code = run_cli(["sweep", "--preset", "section5",
                        "--sweep", "1=50:200:10", "--out", str(out)])
        assert code == 0
        rows = read_rows(out / "sweep_prices.csv")
        assert rows[0] == ["R_value", "p1_offered", "p2_offered", "status"]
        assert len(rows) == 17  # header + 16 points
        assert all(row[3] == "ok" for row in rows[1:])
        p1 = [float(row[1]) for row in rows[1:]]
        assert all(a > b for a, b in zip(p1, p1[1:]))

        agg_rows = read_rows(out / "sweep_aggregates.csv")
        assert agg_rows[0] == ["R_value", "user_id", "r_agg"]
        assert len(agg_rows) == 1 + 16 * 9

    def test_priority_under_scarcity(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli(["sweep", "--preset", "section5",
                        "--sweep", "1=50:50:10", "--out", str(out)]) == 0
        rows = read_rows(out / "sweep_aggregates.csv")
        by_user = {int(r[1]): float(r[2]) for r in rows[1:]}
        assert by_user[1] > by_user[3]

    def test_sweep_spec_validation(self, tmp_path, capsys):
        code = run_cli(["sweep", "--preset", "section5",
                        "--sweep", "1=200:50:10", "--out", str(tmp_path / "o")])
        assert code == cli.EXIT_INPUT
        assert "must not exceed" in capsys.readouterr().err

    def test_failed_points_recorded_with_status(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = run_cli(["sweep", "--preset", "section5",
                        "--sweep", "1=50:60:10", "--max-iters", "2",
                        "--out", str(out)])
        assert code == cli.EXIT_SOLVER
        rows = read_rows(out / "sweep_prices.csv")
        assert len(rows) == 3
        for row in rows[1:]:
            assert "did not converge" in row[3]

    def test_unknown_sweep_carrier(self, tmp_path, capsys):
        code = run_cli(["sweep", "--preset", "section5",
                        "--sweep", "9=50:60:10", "--out", str(tmp_path / "o")])
        assert code == cli.EXIT_INPUT
        assert "no carrier with id 9" in capsys.readouterr().err


class TestParsing:
    def test_requires_scenario_or_preset(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(["run", "--out", "x"])
        assert exc.value.code == 2

    def test_sweep_values_inclusive(self):
        cid, values = cli._parse_sweep_spec("1=50:200:10")
        assert cid == 1
        assert len(values) == 16
        assert values[0] == 50.0
        assert values[-1] == 200.0
        assert math.isclose(values[1] - values[0], 10.0)
