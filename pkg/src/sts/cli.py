"""Command-line pipeline around the library.

One executable, ``sts``, chains the whole workflow: validate scene
documents, mine scenario instances, subsample them spatially, serve the
review UI, merge verdicts, emit the benchmark, and score answer files.
Every run finishes with one machine-readable summary line on stderr
(command, counts in and out, duration). Exit codes: 0 success, 1
validation failure, 2 I/O error, 64 usage error.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

import click
import uvicorn

from sts.catalog import Catalog, CatalogError, default_catalog, load_catalog
from sts.mining import (
    DEFAULT_MINER_CONFIG,
    InstanceError,
    MinerConfigError,
    dump_instances,
    load_instances,
    load_miner_config,
    mine_scene,
)
from sts.questgen import (
    FAMILIES,
    QuestgenError,
    generate_questions,
    load_benchmark,
    render_prompt,
    save_benchmark,
)
from sts.sampler import (
    DEFAULT_SAMPLING_CONFIG,
    SamplerError,
    sampling_report,
    score_sample,
    subsample,
)
from sts.scene import (
    SCENE_SUFFIX,
    Scene,
    SceneParseError,
    SceneValidationError,
    load_scene,
    save_scene,
    validate_scene,
)
from sts.scorer import ScorerError
from sts.scorer import bias_report as answer_bias_report
from sts.scorer import format_report, load_answers
from sts.scorer import score as score_benchmark
from sts.synth import SynthError, synth_suite
from sts.verifier import MergePolicy, ReviewStore, VerifierError, create_app

VALIDATION_ERRORS = (
    CatalogError,
    InstanceError,
    MinerConfigError,
    QuestgenError,
    SamplerError,
    SceneParseError,
    SceneValidationError,
    ScorerError,
    SynthError,
    VerifierError,
    json.JSONDecodeError,
)

T = TypeVar("T")
R = TypeVar("R")


def _summary(cmd: str, n_in: int, n_out: int, started: float) -> None:
    click.echo(json.dumps({"cmd": cmd, "in": n_in, "out": n_out,
                           "duration_s": round(time.monotonic() - started,
                                               3)}),
               err=True)


def _pooled(work: Callable[[T], R], items: Sequence[T],
            jobs: int | None) -> list[R]:
    """Apply work across items on a thread pool, preserving order."""
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(items) <= 1:
        return [work(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, items))


def _scene_paths(root: str | Path) -> list[Path]:
    path = Path(root)
    if path.is_dir():
        found = sorted(path.glob(f"*{SCENE_SUFFIX}"))
        if not found:
            raise FileNotFoundError(f"no *{SCENE_SUFFIX} files under {path}")
        return found
    if path.is_file():
        return [path]
    raise FileNotFoundError(f"no such scene path: {path}")


def _load_scenes(root: str | Path) -> dict[str, Scene]:
    scenes = {}
    for path in _scene_paths(root):
        scene = load_scene(path)
        scenes[scene.scene_id] = scene
    return scenes


def _catalog_from(path: str | None) -> Catalog:
    if path is None:
        return default_catalog()
    return load_catalog(Path(path).read_text(encoding="utf-8"))


def _require_db(db: str | None) -> str:
    if not db:
        raise click.UsageError("a review database is required; pass --db "
                               "or set STS_DB_PATH")
    return db


def _parse_listen(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not port.isdigit():
        raise click.BadParameter("expected host:port",
                                 param_hint="'--listen'")
    return host or "127.0.0.1", int(port)


def _serve_app(app, host: str, port: int) -> None:
    uvicorn.run(app, host=host, port=port, log_level="warning")


def _write_json(path: str | Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


@click.group(name="sts")
def cli() -> None:
    """Mine, verify, and score spatio-temporal driving scenarios."""


@cli.command(name="validate")
@click.option("--scenes", "scenes_path", required=True,
              help="Scene document or directory of them.")
@click.option("--format", "fmt", type=click.Choice(("json", "text")),
              default="text", show_default=True)
def validate_scenes(scenes_path: str, fmt: str) -> int:
    """Check scene documents and report violations."""
    started = time.monotonic()
    rows = []
    for path in _scene_paths(scenes_path):
        try:
            violations = [f"{v.path}: {v.rule}"
                          for v in validate_scene(load_scene(path))]
        except (SceneParseError, SceneValidationError) as exc:
            violations = [str(exc)]
        rows.append({"path": str(path), "ok": not violations,
                     "violations": violations})
    ok = sum(row["ok"] for row in rows)
    if fmt == "json":
        click.echo(json.dumps({"files": rows, "ok": ok,
                               "failed": len(rows) - ok}, indent=2))
    else:
        for row in rows:
            click.echo(f"{row['path']}: "
                       f"{'ok' if row['ok'] else 'FAIL'}")
            for violation in row["violations"]:
                click.echo(f"  {violation}")
    _summary("validate", len(rows), ok, started)
    return 0 if ok == len(rows) else 1


@cli.command(name="mine")
@click.option("--scenes", "scenes_path", required=True,
              help="Scene document or directory of them.")
@click.option("--catalog", "catalog_path", default=None,
              help="Scenario catalog JSON; defaults to the packaged one.")
@click.option("--config", "config_path", default=None,
              help="Miner threshold overrides, JSON.")
@click.option("--out", "out_path", required=True,
              help="Mined instances, JSON lines.")
@click.option("--jobs", type=int, default=None,
              help="Worker threads across scenes; defaults to CPU count.")
def mine_scenes(scenes_path: str, catalog_path: str | None,
                config_path: str | None, out_path: str,
                jobs: int | None) -> int:
    """Mine scenario instances from ground-truth scenes."""
    started = time.monotonic()
    catalog = _catalog_from(catalog_path)
    cfg = DEFAULT_MINER_CONFIG
    if config_path is not None:
        cfg = load_miner_config(Path(config_path).read_text(
            encoding="utf-8"))
    paths = _scene_paths(scenes_path)

    def work(path: Path):
        return mine_scene(load_scene(path), catalog, cfg)

    mined = [instance
             for batch in _pooled(work, paths, jobs)
             for instance in batch]
    count = dump_instances(mined, out_path)
    _summary("mine", len(paths), count, started)
    return 0


@cli.command(name="sample")
@click.option("--in", "in_path", required=True,
              help="Mined instances, JSON lines.")
@click.option("--scenes", "scenes_path", required=True)
@click.option("--out", "out_path", required=True,
              help="Kept instances, JSON lines.")
@click.option("--report", "report_path", default=None,
              help="Per-type kept/dropped counts, JSON.")
@click.option("--cap", type=int, default=None,
              help=f"Per-type cap; defaults to "
                   f"{DEFAULT_SAMPLING_CONFIG.cap}.")
@click.option("--jobs", type=int, default=None,
              help="Worker threads across instances; defaults to CPU "
                   "count.")
def sample_instances(in_path: str, scenes_path: str, out_path: str,
                     report_path: str | None, cap: int | None,
                     jobs: int | None) -> int:
    """Subsample mined instances for spatial diversity."""
    started = time.monotonic()
    instances = load_instances(in_path)
    scenes = _load_scenes(scenes_path)
    cfg = DEFAULT_SAMPLING_CONFIG if cap is None \
        else replace(DEFAULT_SAMPLING_CONFIG, cap=cap)

    def work(instance):
        scene = scenes.get(instance.scene_id)
        if scene is None:
            raise SamplerError(f"no scene '{instance.scene_id}' for "
                               f"'{instance.scenario_id}'")
        return instance.scenario_id, score_sample(instance, scene, cfg)

    scores = dict(_pooled(work, instances, jobs))
    kept = subsample(instances, scores, cfg)
    dump_instances(kept, out_path)
    if report_path is not None:
        _write_json(report_path, sampling_report(instances, kept))
    _summary("sample", len(instances), len(kept), started)
    return 0


@cli.command(name="serve")
@click.option("--db", "db_path", default=None, envvar="STS_DB_PATH",
              help="Review event log; falls back to STS_DB_PATH.")
@click.option("--in", "in_path", default=None,
              help="Instances to ingest before serving, JSON lines.")
@click.option("--scenes", "scenes_path", default=None,
              help="Scene directory for excerpts.")
@click.option("--listen", default="127.0.0.1:8000", show_default=True,
              help="host:port to bind.")
@click.option("--unblind", is_flag=True,
              help="Expose other reviewers' verdicts.")
def serve_reviews(db_path: str | None, in_path: str | None,
                  scenes_path: str | None, listen: str,
                  unblind: bool) -> int:
    """Run the HTTP review service until interrupted."""
    started = time.monotonic()
    host, port = _parse_listen(listen)
    store = ReviewStore(_require_db(db_path))
    try:
        ingested = store.ingest_file(in_path) if in_path else 0
        app = create_app(store, scenes=scenes_path, unblind=unblind)
        _serve_app(app, host, port)
        _summary("serve", ingested, store.review_count, started)
    finally:
        store.close()
    return 0


@cli.command(name="merge")
@click.option("--db", "db_path", default=None, envvar="STS_DB_PATH")
@click.option("--out", "out_path", default=None,
              help="Accepted instances with pruned negatives, JSON lines.")
@click.option("--quorum", type=int, default=3, show_default=True)
@click.option("--format", "fmt", type=click.Choice(("json", "text")),
              default="text", show_default=True)
def merge_store(db_path: str | None, out_path: str | None, quorum: int,
                fmt: str) -> int:
    """Merge reviews into accept/reject verdicts."""
    started = time.monotonic()
    store = ReviewStore(_require_db(db_path))
    try:
        result = store.merge(MergePolicy(quorum=quorum))
        reviews = store.review_count
    finally:
        store.close()
    if out_path is not None:
        dump_instances(result.accepted, out_path)
    counts = {"accepted": len(result.accepted),
              "rejected": len(result.rejected),
              "under_quorum": len(result.under_quorum),
              "unusable": len(result.unusable)}
    if fmt == "json":
        click.echo(json.dumps({**counts, "stats": result.stats.to_dict()},
                              indent=2))
    else:
        for key, value in counts.items():
            click.echo(f"{key}: {value}")
    _summary("merge", reviews, counts["accepted"], started)
    return 0


@cli.command(name="questgen")
@click.option("--in", "in_path", required=True,
              help="Verified instances, JSON lines.")
@click.option("--scenes", "scenes_path", default=".", show_default=True)
@click.option("--out", "out_path", default="benchmark.json",
              show_default=True)
@click.option("--options", "k", type=int, default=5, show_default=True,
              help="Options per question.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--family", type=click.Choice(FAMILIES), default=None,
              help="Also render prompts for this family, JSON lines "
                   "next to the benchmark.")
@click.option("--catalog", "catalog_path", default=None)
def generate_benchmark(in_path: str, scenes_path: str, out_path: str,
                       k: int, seed: int, family: str | None,
                       catalog_path: str | None) -> int:
    """Turn verified instances into a multiple-choice benchmark."""
    started = time.monotonic()
    instances = load_instances(in_path)
    scenes = _load_scenes(scenes_path)
    catalog = _catalog_from(catalog_path)
    version = None
    if catalog_path is not None:
        version = Path(catalog_path).name.removesuffix(".json")
    doc = generate_questions(instances, scenes, catalog, k=k, seed=seed,
                             catalog_version=version)
    save_benchmark(doc, out_path)
    if family is not None:
        prompts_path = Path(out_path).with_suffix(".prompts.jsonl")
        with open(prompts_path, "w", encoding="utf-8") as handle:
            for question in doc.questions:
                handle.write(json.dumps(
                    {"question_id": question.question_id,
                     "family": family,
                     "prompt": render_prompt(question, family,
                                             catalog=catalog)},
                    ensure_ascii=False))
                handle.write("\n")
    _summary("questgen", len(instances), len(doc.questions), started)
    return 0


@cli.command(name="score")
@click.option("--benchmark", "benchmark_path", required=True)
@click.option("--answers", "answers_path", required=True,
              help="Answer records, JSON lines.")
@click.option("--format", "fmt", type=click.Choice(("json", "text")),
              default="text", show_default=True)
@click.option("--out", "out_path", default=None,
              help="Full report, JSON.")
@click.option("--bias", is_flag=True,
              help="Add the predicted-letter bias check.")
def score_answers(benchmark_path: str, answers_path: str, fmt: str,
                  out_path: str | None, bias: bool) -> int:
    """Score an answer file against a benchmark."""
    started = time.monotonic()
    doc = load_benchmark(benchmark_path)
    answers = load_answers(answers_path)
    report = score_benchmark(doc, answers)
    payload = report.to_dict()
    if bias:
        payload["bias"] = answer_bias_report(doc, answers)
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(format_report(report))
        if bias:
            p_value = payload["bias"]["p_value"]
            shown = "n/a" if p_value is None else f"{p_value:.4f}"
            click.echo(f"letter bias p-value: {shown}")
    if out_path is not None:
        _write_json(out_path, payload)
    _summary("score", len(answers), report.total, started)
    return 0


@cli.command(name="synth")
@click.option("--out", "out_dir", required=True,
              help="Directory for the generated scene documents.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--labels/--no-labels", "labels", default=True,
              show_default=True,
              help="Write expected scenario labels next to the scenes.")
def synth_scenes(out_dir: str, seed: int, labels: bool) -> int:
    """Generate the labeled synthetic scene suite."""
    started = time.monotonic()
    suite = synth_suite(seed=seed)
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    for scene, _ in suite:
        save_scene(scene, root / f"{scene.scene_id}{SCENE_SUFFIX}")
    if labels:
        with open(root / "labels.jsonl", "w", encoding="utf-8") as handle:
            for scene, expected in suite:
                handle.write(json.dumps(
                    {"scene_id": scene.scene_id,
                     "expected": [{"type": label.type,
                                   "agents": list(label.agent_ids),
                                   "frame_start": label.frame_start,
                                   "frame_end": label.frame_end}
                                  for label in expected]}))
                handle.write("\n")
    _summary("synth", 0, len(suite), started)
    return 0


@cli.command(name="stats")
@click.option("--db", "db_path", default=None, envvar="STS_DB_PATH")
@click.option("--quorum", type=int, default=3, show_default=True)
@click.option("--format", "fmt", type=click.Choice(("json", "text")),
              default="text", show_default=True)
def report_stats(db_path: str | None, quorum: int, fmt: str) -> int:
    """Review timing and agreement statistics."""
    started = time.monotonic()
    store = ReviewStore(_require_db(db_path))
    try:
        data = store.stats(MergePolicy(quorum=quorum))
    finally:
        store.close()
    if fmt == "json":
        click.echo(json.dumps(data, indent=2))
    else:
        overall = data["overall"]
        click.echo(f"instances: {data['instances']}")
        click.echo(f"reviews: {data['reviews']}")
        click.echo(f"mean review: {overall['mean_ms']:.0f} ms")
        click.echo(f"median review: {overall['median_ms']:.0f} ms")
        click.echo(f"throughput: {overall['seconds_per_sample']:.2f} "
                   f"s/sample")
        for name, row in sorted(data["reviewers"].items()):
            click.echo(f"  {name}: {row['count']} reviews, "
                       f"median {row['median_ms']:.0f} ms")
    _summary("stats", data["reviews"], data["instances"], started)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; maps errors to exit codes."""
    try:
        code = cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        click.echo(f"error: {exc.format_message()}", err=True)
        return 64
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 130
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return int(code) if isinstance(code, int) else 0


if __name__ == "__main__":
    raise SystemExit(main())
