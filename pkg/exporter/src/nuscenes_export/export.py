"""Split-level export orchestration."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from nuscenes_export import devkit
from nuscenes_export.config import ExportConfig
from nuscenes_export.convert import bundle_to_document, write_document


class ExportError(RuntimeError):
    """A precondition for exporting is not met."""


_WORKER: dict = {}


def _check_root(config: ExportConfig, version: str) -> None:
    if not config.root.is_dir():
        raise ExportError(f"dataset root {config.root} does not exist")
    tables = config.root / version
    if not tables.is_dir():
        raise ExportError(
            f"no {version} tables under {config.root}; expected the "
            f"directory {tables}")


def _open_handles(root: Path, version: str):
    try:
        nusc = devkit.open_dataset(root, version)
    except devkit.DevkitUnavailable as err:
        raise ExportError(str(err)) from err
    return nusc


def _export_one(nusc, maps: dict, scene_record: dict,
                config: ExportConfig) -> Path:
    *_, Quaternion = devkit.require_devkit()
    log = nusc.get("log", scene_record["log_token"])
    location = log["location"]
    if location not in maps:
        try:
            maps[location] = devkit.open_map(config.root, location)
        except FileNotFoundError as err:
            raise ExportError(str(err)) from err
    bundle = devkit.bundle_scene(nusc, maps[location], scene_record,
                                 Quaternion, config.map_radius_m)
    doc = bundle_to_document(bundle, config.map_radius_m)
    return write_document(
        doc, config.out_dir / f"{bundle.scene_id}.scene.json")


def _init_worker(root: Path, version: str) -> None:
    _WORKER["nusc"] = _open_handles(root, version)
    _WORKER["maps"] = {}
    _WORKER["version"] = version


def _worker_export(scene_name: str, config: ExportConfig) -> str:
    nusc = _WORKER["nusc"]
    record = next(s for s in nusc.scene if s["name"] == scene_name)
    return str(_export_one(nusc, _WORKER["maps"], record, config))


def export_split(config: ExportConfig, jobs: int = 1) -> int:
    """Write one interchange document per scene of the split; returns
    how many documents were written."""
    try:
        version = devkit.version_for_split(config.split)
    except ValueError as err:
        raise ExportError(str(err)) from err
    _check_root(config, version)
    try:
        names = set(devkit.split_scene_names(config.split))
    except devkit.DevkitUnavailable as err:
        raise ExportError(str(err)) from err

    nusc = _open_handles(config.root, version)
    records = [s for s in nusc.scene if s["name"] in names]
    if not records:
        raise ExportError(
            f"split {config.split!r} has no scenes in {config.root}")
    config.out_dir.mkdir(parents=True, exist_ok=True)

    if jobs <= 1:
        maps: dict = {}
        for record in records:
            _export_one(nusc, maps, record, config)
        return len(records)

    with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker,
            initargs=(config.root, version)) as pool:
        list(pool.map(_worker_export,
                      [r["name"] for r in records],
                      [config] * len(records)))
    return len(records)
