import json

import pytest

import minaxp.cli as cli
from minaxp import Explanation, ExplanationKind, load_model, read_explanation_report

from conftest import make_overlap_dataset, write_csv


@pytest.fixture
def pipeline_paths(tmp_path):
    X, y = make_overlap_dataset(seed=2024, n_rows=240, n_features=4)
    data = tmp_path / "data.csv"
    write_csv(data, X, y)
    return {
        "data": data,
        "train": tmp_path / "train.csv",
        "test": tmp_path / "test.csv",
        "model": tmp_path / "model.json",
        "calibrated": tmp_path / "calibrated.json",
        "report": tmp_path / "report.jsonl",
        "tmp": tmp_path,
    }


def run_train(p, seed=0, out=None):
    return cli.main(
        [
            "train",
            "--data", str(p["data"]),
            "--seed", str(seed),
            "--out-model", str(out or p["model"]),
            "--out-train", str(p["train"]),
            "--out-test", str(p["test"]),
        ]
    )


def run_calibrate(p, wr="0.24"):
    return cli.main(
        [
            "calibrate",
            "--model", str(p["model"]),
            "--data", str(p["train"]),
            "--wr", wr,
            "--out-model", str(p["calibrated"]),
        ]
    )


class TestPipeline:
    def test_full_pipeline(self, pipeline_paths, capsys):
        p = pipeline_paths
        assert run_train(p) == 0
        out = capsys.readouterr().out
        assert "accuracy (no reject option)" in out
        assert run_calibrate(p) == 0
        out = capsys.readouterr().out
        assert "rejection width" in out

        assert (
            cli.main(
                [
                    "explain",
                    "--model", str(p["calibrated"]),
                    "--data", str(p["test"]),
                    "--method", "both",
                    "--out-report", str(p["report"]),
                ]
            )
            == 0
        )
        records, aggregate = read_explanation_report(p["report"])
        assert records
        # domination: baseline never beats the exact method on any instance
        exact = {r.instance_id: r.size for r in records if r.method == "minabro"}
        for record in records:
            if record.method == "baseline":
                assert record.size >= exact[record.instance_id]
        assert all(r.certified_minimum for r in records if r.method == "minabro")

        bench = p["tmp"] / "bench.jsonl"
        assert (
            cli.main(
                [
                    "benchmark",
                    "--model", str(p["calibrated"]),
                    "--data", str(p["test"]),
                    "--repeats", "2",
                    "--limit", "10",
                    "--out-report", str(bench),
                ]
            )
            == 0
        )
        _, bench_aggregate = read_explanation_report(bench)
        assert bench_aggregate["by_group"]["minabro/classified"]["count"] > 0

    def test_train_is_deterministic_per_seed(self, pipeline_paths):
        p = pipeline_paths
        other = p["tmp"] / "model2.json"
        assert run_train(p, seed=7) == 0
        assert run_train(p, seed=7, out=other) == 0
        assert p["model"].read_bytes() == other.read_bytes()

    def test_report_is_stable_across_runs_modulo_timing(self, pipeline_paths):
        p = pipeline_paths
        assert run_train(p) == 0
        assert run_calibrate(p) == 0
        reports = []
        for name in ("r1.jsonl", "r2.jsonl"):
            out = p["tmp"] / name
            assert (
                cli.main(
                    [
                        "explain",
                        "--model", str(p["calibrated"]),
                        "--data", str(p["test"]),
                        "--method", "both",
                        "--out-report", str(out),
                    ]
                )
                == 0
            )
            lines = []
            for line in out.read_text().splitlines():
                payload = json.loads(line)
                payload.pop("time_ms", None)
                if "aggregate" in payload:
                    for group in payload["aggregate"]["by_group"].values():
                        group.pop("time_mean_ms", None)
                        group.pop("time_std_ms", None)
                lines.append(json.dumps(payload, sort_keys=True))
            reports.append(lines)
        assert reports[0] == reports[1]


class TestExplainInputs:
    def test_instance_json_literal_and_file(self, pipeline_paths, tmp_path):
        p = pipeline_paths
        assert run_train(p) == 0
        assert run_calibrate(p) == 0
        report = tmp_path / "single.jsonl"
        bundle = load_model(p["calibrated"])
        # a raw-space instance: mid-range values inside the training envelope
        mid = ((bundle.scaling.mins + bundle.scaling.maxs) / 2).tolist()
        assert (
            cli.main(
                [
                    "explain",
                    "--model", str(p["calibrated"]),
                    "--instance-json", json.dumps(mid),
                    "--out-report", str(report),
                ]
            )
            == 0
        )
        records, _ = read_explanation_report(report)
        assert len(records) == 1

        as_file = tmp_path / "instance.json"
        as_file.write_text(json.dumps({"values": mid}))
        assert (
            cli.main(
                [
                    "explain",
                    "--model", str(p["calibrated"]),
                    "--instance-json", str(as_file),
                    "--out-report", str(report),
                ]
            )
            == 0
        )

    def test_label_free_csv(self, pipeline_paths, tmp_path):
        p = pipeline_paths
        assert run_train(p) == 0
        assert run_calibrate(p) == 0
        plain = tmp_path / "plain.csv"
        rows = p["test"].read_text().splitlines()
        stripped = [",".join(line.split(",")[:-1]) for line in rows]
        plain.write_text("\n".join(stripped) + "\n")
        report = tmp_path / "plain.jsonl"
        assert (
            cli.main(
                [
                    "explain",
                    "--model", str(p["calibrated"]),
                    "--data", str(plain),
                    "--label-col", "none",
                    "--limit", "5",
                    "--out-report", str(report),
                ]
            )
            == 0
        )
        records, _ = read_explanation_report(report)
        assert len(records) == 5


class TestSpecFixtures:
    def test_separable_toy_prints_perfect_accuracy(self, tmp_path, capsys):
        X, y = make_overlap_dataset(seed=1, n_rows=80, n_features=3, shift=0.45)
        data = tmp_path / "sep.csv"
        write_csv(data, X, y)
        assert (
            cli.main(
                ["train", "--data", str(data), "--seed", "0", "--out-model", str(tmp_path / "m.json")]
            )
            == 0
        )
        out = capsys.readouterr().out
        assert "train accuracy (no reject option): 1.0000" in out

    def test_recalibration_is_reproducible(self, pipeline_paths):
        p = pipeline_paths
        assert run_train(p) == 0
        assert run_calibrate(p) == 0
        first = p["calibrated"].read_bytes()
        assert run_calibrate(p) == 0
        assert p["calibrated"].read_bytes() == first

    def test_band_model_fixture_yields_certified_rejection(self, tmp_path):
        model = tmp_path / "band.json"
        model.write_text(
            '{"weights": [2.0, -2.0], "bias": 0.0, "t_minus": -1.0, "t_plus": 1.0,'
            ' "domains": [[0.0, 1.0], [0.0, 1.0]], "scaling": null}'
        )
        report = tmp_path / "band.jsonl"
        assert (
            cli.main(
                [
                    "explain",
                    "--model", str(model),
                    "--instance-json", "[0.5, 0.5]",
                    "--out-report", str(report),
                ]
            )
            == 0
        )
        records, _ = read_explanation_report(report)
        (record,) = records
        assert record.kind == "REJECTION"
        assert record.size == 1
        assert record.certified_minimum
        assert record.nodes is not None


class TestEdgeFlags:
    def test_no_scale_uses_training_range_domains(self, pipeline_paths):
        p = pipeline_paths
        out = p["tmp"] / "raw.json"
        assert (
            cli.main(
                [
                    "train",
                    "--data", str(p["data"]),
                    "--seed", "0",
                    "--no-scale",
                    "--out-model", str(out),
                ]
            )
            == 0
        )
        bundle = load_model(out)
        assert bundle.scaling is None
        assert (bundle.model.lower >= 0.0).all() and (bundle.model.upper <= 1.0).all()

    def test_benchmark_with_empty_selection_writes_empty_aggregate(self, pipeline_paths):
        p = pipeline_paths
        assert run_train(p) == 0
        assert run_calibrate(p) == 0
        report = p["tmp"] / "empty.jsonl"
        assert (
            cli.main(
                [
                    "benchmark",
                    "--model", str(p["calibrated"]),
                    "--data", str(p["test"]),
                    "--limit", "0",
                    "--out-report", str(report),
                ]
            )
            == 0
        )
        records, aggregate = read_explanation_report(report)
        assert records == []
        assert all(group["count"] == 0 for group in aggregate["by_group"].values())


class TestEnvironment:
    def test_epsilon_env_override(self):
        import subprocess

        out = subprocess.run(
            ["python3", "-c", "import minaxp; print(minaxp.DEFAULT_EPSILON)"],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "MINAXP_EPSILON": "1e-6"},
        )
        assert out.returncode == 0
        assert float(out.stdout.strip()) == 1e-6

    def test_module_entry_point(self, tmp_path):
        import subprocess

        result = subprocess.run(
            ["python3", "-m", "minaxp.cli", "verify", "--cases", "3", "--seed", "0"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert "3/3 classified, 3/3 rejected agree" in result.stdout


class TestExitCodes:
    def test_missing_file_is_input_error(self, tmp_path, capsys):
        code = cli.main(
            ["train", "--data", str(tmp_path / "nope.csv"), "--out-model", str(tmp_path / "m.json")]
        )
        assert code == cli.EXIT_INPUT_ERROR
        assert "error:" in capsys.readouterr().err

    def test_wr_out_of_range_is_input_error(self, pipeline_paths):
        p = pipeline_paths
        assert run_train(p) == 0
        assert run_calibrate(p, wr="1.5") == cli.EXIT_INPUT_ERROR

    def test_verify_passes_on_honest_build(self, capsys):
        assert cli.main(["verify", "--cases", "20", "--seed", "3"]) == 0
        assert "20/20 classified, 20/20 rejected agree" in capsys.readouterr().out

    def test_verify_zero_cases_warns(self, capsys):
        assert cli.main(["verify", "--cases", "0"]) == 0
        assert "nothing verified" in capsys.readouterr().out

    def test_verify_flags_an_injected_bug(self, monkeypatch, capsys):
        # negative control: a greedy that pads every explanation must trip verification
        import minaxp.classified as classified

        real = classified.explain_positive

        def padded(clf, instance, eps=1e-9):
            explanation, trace = real(clf, instance, eps)
            spare = [j for j in range(clf.model.n_features) if j not in explanation.indices]
            if not spare:
                return explanation, trace
            bloated = Explanation(
                indices=tuple(sorted(explanation.indices + (spare[0],))),
                kind=ExplanationKind.POSITIVE,
                certified_minimum=True,
            )
            return bloated, trace

        monkeypatch.setattr(cli, "explain_positive", padded)
        assert cli.main(["verify", "--cases", "10", "--seed", "3"]) == cli.EXIT_VERIFY_FAILED
        assert "FAILED" in capsys.readouterr().err
