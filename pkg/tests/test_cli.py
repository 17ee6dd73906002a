"""CLI subcommands: outputs, exit codes, reproducibility."""

import json


from dcset.cli import main


def run(tmp_path, *argv, out_name="out.json"):
    out = tmp_path / out_name
    code = main([*argv, "--out", str(out)])
    return code, out.read_text() if out.exists() else None


class TestDuality:
    def test_sweep_3x3_all_zero(self, tmp_path):
        code, text = run(tmp_path, "duality", "--sweep", "3", "3")
        assert code == 0
        data = json.loads(text)
        assert data["masks"] == 512 and data["all_zero"]

    def test_sweep_with_jobs_matches_serial(self, tmp_path):
        _, serial = run(tmp_path, "duality", "--sweep", "2", "3", out_name="a.json")
        _, parallel = run(tmp_path, "duality", "--sweep", "2", "3", "--jobs", "3", out_name="b.json")
        assert json.loads(serial) == json.loads(parallel)

    def test_sweep_too_large(self, tmp_path):
        assert main(["duality", "--sweep", "5", "4"]) == 2

    def test_diagonal_mask_file(self, tmp_path):
        mask = tmp_path / "diag.txt"
        mask.write_text("2 2\n10\n01\n")
        code, text = run(tmp_path, "duality", str(mask))
        assert code == 0
        data = json.loads(text)
        assert data["coupling_value"] == "1" and data["cover_value"] == "1"
        assert data["gap"] == "0"

    def test_caps_files(self, tmp_path):
        mask = tmp_path / "m.txt"
        mask.write_text("2 2\n11\n11\n")
        (tmp_path / "rows.csv").write_text("0,1/4\n1,3/4\n")
        (tmp_path / "cols.csv").write_text("0,1/2\n1,1/2\n")
        code, text = run(
            tmp_path, "duality", str(mask),
            "--row-caps", str(tmp_path / "rows.csv"),
            "--col-caps", str(tmp_path / "cols.csv"),
        )
        assert code == 0 and json.loads(text)["coupling_value"] == "1"

    def test_malformed_mask_exits_2(self, tmp_path, capsys):
        mask = tmp_path / "bad.txt"
        mask.write_text("2 2\n1x\n01\n")
        assert main(["duality", str(mask)]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_no_mask_no_sweep(self, tmp_path):
        assert main(["duality"]) == 2


class TestSimulate:
    def test_sample_row_count(self, tmp_path):
        code, text = run(tmp_path, "simulate", "sample", "--depth", "100", "--seed", "7", out_name="s.csv")
        assert code == 0
        assert len(text.strip().splitlines()) == 101

    def test_minima_row_count_quarter_law(self, tmp_path):
        # Strict 3-point minima of a 10^4-step walk: ~(K-1)/4 = 2500 times.
        code, text = run(tmp_path, "simulate", "minima", "--steps", "10000", "--seed", "7", out_name="m.csv")
        assert code == 0
        rows = len(text.strip().splitlines()) - 1
        assert 2300 <= rows <= 2700

    def test_unknown_generator(self, tmp_path):
        assert main(["simulate", "bogus", "--seed", "1"]) == 2

    def test_seed_required(self, tmp_path):
        assert main(["simulate", "sample"]) == 2

    def test_reruns_byte_identical(self, tmp_path):
        _, a = run(tmp_path, "simulate", "counterexample", "--depth", "30", "--seed", "3", out_name="a.csv")
        _, b = run(tmp_path, "simulate", "counterexample", "--depth", "30", "--seed", "3", out_name="b.csv")
        assert a == b

    def test_revealing_csv(self, tmp_path):
        code, text = run(tmp_path, "simulate", "revealing", "--depth", "5", "--seed", "2", out_name="r.csv")
        assert code == 0 and text.startswith("k,low,mid,high,event,chosen")

    def test_poisson_members(self, tmp_path):
        code, text = run(tmp_path, "simulate", "poisson", "--seed", "8", out_name="p.csv")
        assert code == 0


class TestDistinguish:
    def test_rejects_and_exits_zero(self, tmp_path):
        code, text = run(
            tmp_path, "distinguish", "--seed", "5", "--depth", "100", "--replicas", "200"
        )
        assert code == 0
        data = json.loads(text)
        assert data["passed"] is False and data["expected_outcome"] == "reject"


class TestStationarity:
    def test_sample_passes(self, tmp_path):
        code, text = run(
            tmp_path, "stationarity", "--gen", "sample", "--seed", "5",
            "--depth", "80", "--replicas", "150",
        )
        assert code == 0 and json.loads(text)["passed"] is True

    def test_counterexample_expected_fail(self, tmp_path):
        code, text = run(
            tmp_path, "stationarity", "--gen", "counterexample", "--seed", "5",
            "--depth", "120", "--replicas", "150",
        )
        assert code == 0
        data = json.loads(text)
        assert data["passed"] is False and data["expected_outcome"] == "fail"

    def test_wrong_expectation_exits_one(self, tmp_path):
        code, _ = run(
            tmp_path, "stationarity", "--gen", "sample", "--seed", "5",
            "--depth", "80", "--replicas", "150", "--expect", "fail",
        )
        assert code == 1


class TestIndependence:
    def test_sample_passes(self, tmp_path):
        code, text = run(tmp_path, "independence", "--gen", "sample", "--seed", "5", "--replicas", "300")
        assert code == 0 and json.loads(text)["passed"] is True

    def test_minima_maps_to_walk(self, tmp_path):
        code, text = run(
            tmp_path, "independence", "--gen", "minima", "--seed", "5",
            "--replicas", "300", "--steps", "1024",
        )
        assert code == 0 and json.loads(text)["name"] == "fragment-independence-walk"


class TestShiftHit:
    def test_half_measure_curve(self, tmp_path):
        code, text = run(
            tmp_path, "shifthit", "--seed", "5", "--depths", "64,256", "--shifts", "100",
            "--csv", str(tmp_path / "curve.csv"),
        )
        assert code == 0
        data = json.loads(text)
        assert data["expected"] == [32.0, 128.0]
        assert (tmp_path / "curve.csv").read_text().startswith("depth,")


class TestSelector:
    def test_pass_with_csv(self, tmp_path):
        code, text = run(
            tmp_path, "selector", "--seed", "9", "--depth", "64", "--replicas", "800",
            "--csv", str(tmp_path / "table.csv"),
        )
        assert code == 0
        data = json.loads(text)
        assert data["outcome"] == "pass" and data["membership_exact"] is True
        assert (tmp_path / "table.csv").read_text().startswith("replica,")

    def test_obstruction_expected(self, tmp_path):
        code, text = run(
            tmp_path, "selector", "--gen", "sample-upper", "--seed", "9",
            "--depth", "16", "--replicas", "60", "--expect", "obstruction",
        )
        assert code == 0
        data = json.loads(text)
        assert data["outcome"] == "obstruction"
        assert 0 in data["thin_bins"]

    def test_obstruction_unexpected_exits_one(self, tmp_path):
        code, _ = run(
            tmp_path, "selector", "--gen", "sample-upper", "--seed", "9",
            "--depth", "16", "--replicas", "60",
        )
        assert code == 1


class TestEnumerate:
    def test_containment_and_steps(self, tmp_path):
        code, text = run(
            tmp_path, "enumerate", "--seed", "11", "--rounds", "3", "--replicas", "300"
        )
        assert code == 0
        data = json.loads(text)
        assert data["containment"] is True
        assert len(data["steps"]) == 3


class TestCantor:
    def test_json_schema(self, tmp_path):
        code, text = run(tmp_path, "cantor", "--gap", "1/2", "--cantor-depth", "1")
        assert code == 0
        assert json.loads(text) == {"depth": 1, "removed": [["3/8", "5/8"]]}


class TestConfig:
    def test_config_supplies_defaults_flags_win(self, tmp_path):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"seed": 123, "depth": 40}))
        code, text = run(
            tmp_path, "simulate", "sample", "--config", str(conf), out_name="c.csv"
        )
        assert code == 0 and len(text.strip().splitlines()) == 41
        code, text = run(
            tmp_path, "simulate", "sample", "--config", str(conf), "--depth", "10",
            out_name="d.csv",
        )
        assert code == 0 and len(text.strip().splitlines()) == 11

    def test_bad_config(self, tmp_path):
        conf = tmp_path / "broken.json"
        conf.write_text("{not json")
        assert main(["simulate", "sample", "--config", str(conf)]) == 2
