"""The sts-export command."""

from __future__ import annotations

import argparse
import sys

from nuscenes_export.config import ExportConfig
from nuscenes_export.export import ExportError, export_split


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sts-export",
        description="Export nuScenes key frames to .scene.json "
                    "interchange documents.")
    parser.add_argument("--root", required=True,
                        help="dataset root directory")
    parser.add_argument("--split", required=True,
                        help="split name (train, val, test, mini_train, "
                             "mini_val)")
    parser.add_argument("--out", required=True,
                        help="output directory for scene documents")
    parser.add_argument("--radius", type=float, default=80.0,
                        help="map clip radius in meters around the ego "
                             "route (default 80)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="scenes exported in parallel processes")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ExportConfig(root=args.root, split=args.split,
                              out_dir=args.out, map_radius_m=args.radius)
        count = export_split(config, jobs=args.jobs)
    except (ExportError, ValueError) as err:
        print(f"sts-export: {err}", file=sys.stderr)
        return 1
    print(f"wrote {count} scene documents to {config.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
