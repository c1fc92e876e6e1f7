"""sts-export argument handling and error reporting."""

import pytest

from nuscenes_export.cli import build_parser, main


def test_usage_lists_required_flags(capsys):
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["--help"])
    assert excinfo.value.code == 0
    out = capsys.readouterr().out
    assert "--root" in out and "--split" in out and "--out" in out


def test_missing_required_flag_exits_64_style(capsys):
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["--root", "/data"])
    assert excinfo.value.code == 2


def test_bad_radius_reports_and_fails(tmp_path, capsys):
    code = main(["--root", str(tmp_path), "--split", "val",
                 "--out", str(tmp_path / "out"), "--radius", "0"])
    assert code == 1
    assert "map_radius_m" in capsys.readouterr().err


def test_missing_root_reports_and_fails(tmp_path, capsys):
    code = main(["--root", str(tmp_path / "missing"), "--split", "val",
                 "--out", str(tmp_path / "out")])
    assert code == 1
    assert "does not exist" in capsys.readouterr().err
