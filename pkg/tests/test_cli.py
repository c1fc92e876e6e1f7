"""End-to-end command-line pipeline: subcommands, exit codes, artifacts."""

import json
import subprocess
import sys
from collections import Counter

import pytest

from sts.cli import main
from sts.mining import dump_instances, load_instances, make_instance
from sts.questgen import load_benchmark
from sts.verifier import Review, ReviewStore


def last_summary(capsys):
    """Parsed machine-readable summary line from captured stderr."""
    err = capsys.readouterr().err
    line = [l for l in err.strip().splitlines() if l.startswith("{")][-1]
    return json.loads(line)


def write_gt_answers(benchmark_path, answers_path):
    doc = load_benchmark(benchmark_path)
    with open(answers_path, "w", encoding="utf-8") as handle:
        for question in doc.questions:
            handle.write(json.dumps({"question_id": question.question_id,
                                     "raw_text": question.correct_letter}))
            handle.write("\n")
    return len(doc.questions)


@pytest.fixture(scope="module")
def suite_dir(tmp_path_factory):
    scenes = tmp_path_factory.mktemp("cli") / "scenes"
    assert main(["synth", "--out", str(scenes), "--seed", "11"]) == 0
    return scenes


@pytest.fixture(scope="module")
def mined_path(suite_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-mined") / "mined.jsonl"
    assert main(["mine", "--scenes", str(suite_dir),
                 "--out", str(out)]) == 0
    return out


@pytest.fixture(scope="module")
def benchmark_path(suite_dir, mined_path, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-bench") / "benchmark.json"
    assert main(["questgen", "--in", str(mined_path),
                 "--scenes", str(suite_dir), "--out", str(out),
                 "--options", "5", "--seed", "7"]) == 0
    return out


class TestUsage:
    def test_unknown_flag_exits_64_with_usage(self, capsys):
        assert main(["mine", "--bogus"]) == 64
        assert "Usage" in capsys.readouterr().err

    def test_unknown_subcommand_exits_64(self, capsys):
        assert main(["frobnicate"]) == 64
        assert "No such command" in capsys.readouterr().err

    def test_no_arguments_exits_64(self):
        assert main([]) == 64

    def test_help_exits_zero_and_lists_subcommands(self, capsys):
        assert main(["--help"]) == 0
        out = capsys.readouterr().out
        for name in ("validate", "mine", "sample", "serve", "merge",
                     "questgen", "score", "synth", "stats"):
            assert name in out

    def test_console_script_is_installed(self):
        done = subprocess.run(["sts", "--help"], capture_output=True,
                              text=True)
        assert done.returncode == 0
        assert "Usage: sts" in done.stdout


class TestSynth:
    def test_writes_suite_and_labels(self, suite_dir):
        scenes = sorted(suite_dir.glob("*.scene.json"))
        assert len(scenes) == 53
        labels = [json.loads(line) for line in
                  (suite_dir / "labels.jsonl").read_text().splitlines()]
        assert len(labels) == 53
        assert all(row["scene_id"] and isinstance(row["expected"], list)
                   for row in labels)

    def test_no_labels_flag(self, tmp_path, capsys):
        out = tmp_path / "scenes"
        assert main(["synth", "--out", str(out), "--no-labels"]) == 0
        assert not (out / "labels.jsonl").exists()
        summary = last_summary(capsys)
        assert summary["cmd"] == "synth"
        assert summary["out"] == 53
        assert summary["duration_s"] >= 0


class TestValidate:
    def test_clean_suite_passes(self, suite_dir, capsys):
        assert main(["validate", "--scenes", str(suite_dir)]) == 0
        captured = capsys.readouterr()
        assert ": ok" in captured.out
        summary = json.loads(captured.err.strip().splitlines()[-1])
        assert summary["in"] == 53
        assert summary["out"] == 53

    def test_json_format(self, suite_dir, capsys):
        assert main(["validate", "--scenes", str(suite_dir),
                     "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["ok"] == 53
        assert payload["failed"] == 0

    def test_corrupt_document_fails(self, tmp_path, capsys):
        (tmp_path / "bad.scene.json").write_text("{not json",
                                                 encoding="utf-8")
        assert main(["validate", "--scenes", str(tmp_path)]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_missing_path_is_io_error(self, tmp_path):
        assert main(["validate",
                     "--scenes", str(tmp_path / "nope")]) == 2


class TestMine:
    def test_mines_the_suite(self, mined_path, capsys):
        instances = load_instances(mined_path)
        assert len(instances) >= 43
        assert len({i.type for i in instances}) >= 43

    def test_summary_counts_scenes_in(self, suite_dir, tmp_path, capsys):
        out = tmp_path / "mined.jsonl"
        assert main(["mine", "--scenes", str(suite_dir),
                     "--out", str(out)]) == 0
        summary = last_summary(capsys)
        assert summary["cmd"] == "mine"
        assert summary["in"] == 53
        assert summary["out"] >= 43

    def test_jobs_do_not_change_output(self, suite_dir, mined_path,
                                       tmp_path):
        parallel = tmp_path / "parallel.jsonl"
        assert main(["mine", "--scenes", str(suite_dir),
                     "--out", str(parallel), "--jobs", "4"]) == 0
        assert parallel.read_bytes() == mined_path.read_bytes()

    def test_explicit_catalog_file(self, suite_dir, mined_path, tmp_path):
        from importlib import resources
        text = (resources.files("sts") / "data" / "catalog"
                / "stsnu.v1.json").read_text(encoding="utf-8")
        catalog_path = tmp_path / "stsnu.v1.json"
        catalog_path.write_text(text, encoding="utf-8")
        out = tmp_path / "mined.jsonl"
        assert main(["mine", "--scenes", str(suite_dir),
                     "--catalog", str(catalog_path),
                     "--out", str(out)]) == 0
        assert out.read_bytes() == mined_path.read_bytes()

    def test_corrupt_scene_fails_validation(self, tmp_path):
        (tmp_path / "bad.scene.json").write_text("[]", encoding="utf-8")
        assert main(["mine", "--scenes", str(tmp_path),
                     "--out", str(tmp_path / "m.jsonl")]) == 1


class TestSample:
    def test_samples_with_report(self, suite_dir, mined_path, tmp_path,
                                 capsys):
        out = tmp_path / "sampled.scenarios.jsonl"
        report = tmp_path / "report.json"
        assert main(["sample", "--in", str(mined_path),
                     "--scenes", str(suite_dir), "--out", str(out),
                     "--report", str(report)]) == 0
        kept = load_instances(out)
        total = len(load_instances(mined_path))
        assert 0 < len(kept) <= total
        payload = json.loads(report.read_text())
        assert sum(row["kept"] for row in payload.values()) == len(kept)
        summary = last_summary(capsys)
        assert summary["in"] == total
        assert summary["out"] == len(kept)

    def test_cap_limits_each_type(self, suite_dir, mined_path, tmp_path):
        out = tmp_path / "sampled.scenarios.jsonl"
        assert main(["sample", "--in", str(mined_path),
                     "--scenes", str(suite_dir), "--out", str(out),
                     "--cap", "1"]) == 0
        counts = Counter(i.type for i in load_instances(out))
        assert counts and max(counts.values()) == 1

    def test_instance_without_scene_fails(self, suite_dir, tmp_path):
        orphan = make_instance("ghost-scene", "ego_stop", "Ego", 0, 5,
                               (), (), (), {})
        mined = tmp_path / "mined.jsonl"
        dump_instances([orphan], mined)
        assert main(["sample", "--in", str(mined),
                     "--scenes", str(suite_dir),
                     "--out", str(tmp_path / "out.jsonl")]) == 1


class TestServe:
    @pytest.fixture()
    def captured_server(self, monkeypatch):
        calls = []
        monkeypatch.setattr("sts.cli._serve_app",
                            lambda app, host, port:
                            calls.append((app, host, port)))
        return calls

    def test_serves_ingested_instances(self, mined_path, tmp_path,
                                       captured_server, capsys):
        db = tmp_path / "reviews.jsonl"
        assert main(["serve", "--db", str(db),
                     "--in", str(mined_path)]) == 0
        app, host, port = captured_server[0]
        assert (host, port) == ("127.0.0.1", 8000)
        assert app.title
        summary = last_summary(capsys)
        assert summary["cmd"] == "serve"
        assert summary["in"] == len(load_instances(mined_path))

    def test_listen_flag(self, tmp_path, captured_server):
        assert main(["serve", "--db", str(tmp_path / "db.jsonl"),
                     "--listen", "0.0.0.0:9005"]) == 0
        assert captured_server[0][1:] == ("0.0.0.0", 9005)

    def test_bad_listen_is_usage_error(self, tmp_path, captured_server):
        assert main(["serve", "--db", str(tmp_path / "db.jsonl"),
                     "--listen", "nohost"]) == 64
        assert not captured_server

    def test_missing_db_is_usage_error(self, capsys, monkeypatch):
        monkeypatch.delenv("STS_DB_PATH", raising=False)
        assert main(["serve"]) == 64
        assert "STS_DB_PATH" in capsys.readouterr().err


@pytest.fixture()
def reviewed_db(mined_path, tmp_path):
    """Event log with three accepts on one instance, three rejects on
    another."""
    instances = load_instances(mined_path)[:2]
    db = tmp_path / "reviews.jsonl"
    store = ReviewStore(db)
    store.ingest(instances)
    for reviewer in ("r1", "r2", "r3"):
        store.create_session(reviewer)
        store.submit_review(Review(instances[0].scenario_id, reviewer,
                                   True, (), 1500))
        store.submit_review(Review(instances[1].scenario_id, reviewer,
                                   False, (), 900))
    store.close()
    return db


class TestMerge:
    def test_merges_and_writes_accepted(self, reviewed_db, tmp_path,
                                        capsys):
        out = tmp_path / "verified.jsonl"
        assert main(["merge", "--db", str(reviewed_db),
                     "--out", str(out)]) == 0
        captured = capsys.readouterr()
        assert "accepted: 1" in captured.out
        assert "rejected: 1" in captured.out
        assert len(load_instances(out)) == 1
        summary = json.loads(captured.err.strip().splitlines()[-1])
        assert summary["in"] == 6
        assert summary["out"] == 1

    def test_json_format(self, reviewed_db, capsys):
        assert main(["merge", "--db", str(reviewed_db),
                     "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["accepted"] == 1
        assert "stats" in payload

    def test_db_from_environment(self, reviewed_db, monkeypatch, capsys):
        monkeypatch.setenv("STS_DB_PATH", str(reviewed_db))
        assert main(["merge"]) == 0
        assert "accepted: 1" in capsys.readouterr().out


class TestStats:
    def test_text_report(self, reviewed_db, capsys):
        assert main(["stats", "--db", str(reviewed_db)]) == 0
        out = capsys.readouterr().out
        assert "reviews: 6" in out
        assert "median review" in out

    def test_json_report(self, reviewed_db, capsys):
        assert main(["stats", "--db", str(reviewed_db),
                     "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["reviews"] == 6
        assert "agreement" in payload


class TestQuestgen:
    def test_same_seed_is_byte_identical(self, suite_dir, mined_path,
                                         benchmark_path, tmp_path):
        again = tmp_path / "benchmark.json"
        assert main(["questgen", "--in", str(mined_path),
                     "--scenes", str(suite_dir), "--out", str(again),
                     "--options", "5", "--seed", "7"]) == 0
        assert again.read_bytes() == benchmark_path.read_bytes()

    def test_different_seed_changes_the_file(self, suite_dir, mined_path,
                                             benchmark_path, tmp_path):
        other = tmp_path / "benchmark.json"
        assert main(["questgen", "--in", str(mined_path),
                     "--scenes", str(suite_dir), "--out", str(other),
                     "--options", "5", "--seed", "8"]) == 0
        assert other.read_bytes() != benchmark_path.read_bytes()

    def test_benchmark_shape(self, benchmark_path):
        doc = load_benchmark(benchmark_path)
        assert doc.seed == 7
        assert sum(doc.letter_counts.values()) == len(doc.questions)
        assert all(len(q.options) == 5 for q in doc.questions)

    def test_family_writes_prompts(self, suite_dir, mined_path, tmp_path):
        out = tmp_path / "benchmark.json"
        assert main(["questgen", "--in", str(mined_path),
                     "--scenes", str(suite_dir), "--out", str(out),
                     "--family", "llm_trajectory"]) == 0
        rows = [json.loads(line) for line in
                (tmp_path / "benchmark.prompts.jsonl")
                .read_text(encoding="utf-8").splitlines()]
        assert len(rows) == len(load_benchmark(out).questions)
        assert all(row["prompt"].endswith("and nothing else.")
                   for row in rows)

    def test_unknown_family_is_usage_error(self, mined_path):
        assert main(["questgen", "--in", str(mined_path),
                     "--family", "telepathy"]) == 64

    def test_option_count_outside_bounds_fails(self, suite_dir,
                                               mined_path, tmp_path):
        assert main(["questgen", "--in", str(mined_path),
                     "--scenes", str(suite_dir),
                     "--out", str(tmp_path / "b.json"),
                     "--options", "12"]) == 1


class TestScore:
    def test_ground_truth_scores_full_marks(self, benchmark_path,
                                            tmp_path, capsys):
        answers = tmp_path / "gt.jsonl"
        n = write_gt_answers(benchmark_path, answers)
        assert main(["score", "--benchmark", str(benchmark_path),
                     "--answers", str(answers)]) == 0
        captured = capsys.readouterr()
        assert "Overall" in captured.out
        assert "100.00" in captured.out
        summary = json.loads(captured.err.strip().splitlines()[-1])
        assert summary == {"cmd": "score", "in": n, "out": n,
                           "duration_s": summary["duration_s"]}

    def test_json_format_and_report_file(self, benchmark_path, tmp_path,
                                         capsys):
        answers = tmp_path / "gt.jsonl"
        write_gt_answers(benchmark_path, answers)
        report = tmp_path / "report.json"
        assert main(["score", "--benchmark", str(benchmark_path),
                     "--answers", str(answers), "--format", "json",
                     "--out", str(report), "--bias"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["overall"] == 1.0
        assert payload["bias"]["p_value"] == pytest.approx(1.0)
        assert json.loads(report.read_text())["overall"] == 1.0

    def test_bias_line_in_text_format(self, benchmark_path, tmp_path,
                                      capsys):
        answers = tmp_path / "gt.jsonl"
        write_gt_answers(benchmark_path, answers)
        assert main(["score", "--benchmark", str(benchmark_path),
                     "--answers", str(answers), "--bias"]) == 0
        assert "letter bias p-value: 1.0000" in capsys.readouterr().out

    def test_unknown_question_id_fails(self, benchmark_path, tmp_path):
        answers = tmp_path / "bad.jsonl"
        answers.write_text('{"question_id": "q-ghost", "raw_text": "A"}\n',
                           encoding="utf-8")
        assert main(["score", "--benchmark", str(benchmark_path),
                     "--answers", str(answers)]) == 1


class TestPipeline:
    def test_mine_sample_questgen_score_compose(self, suite_dir,
                                                tmp_path):
        mined = tmp_path / "mined.jsonl"
        sampled = tmp_path / "sampled.scenarios.jsonl"
        bench = tmp_path / "benchmark.json"
        answers = tmp_path / "gt.jsonl"
        assert main(["mine", "--scenes", str(suite_dir),
                     "--out", str(mined), "--jobs", "2"]) == 0
        assert main(["sample", "--in", str(mined),
                     "--scenes", str(suite_dir),
                     "--out", str(sampled), "--jobs", "2"]) == 0
        assert main(["questgen", "--in", str(sampled),
                     "--scenes", str(suite_dir), "--out", str(bench),
                     "--seed", "7"]) == 0
        n = write_gt_answers(bench, answers)
        assert n > 0
        assert main(["score", "--benchmark", str(bench),
                     "--answers", str(answers)]) == 0
