"""Stub extraction, format writing, label mapping."""

import numpy as np
import pytest

from reprextract import (
    BACKBONE_DIMS,
    ExtractionSpec,
    extract,
    file_size,
    label_map,
    stub_features,
    write_features,
)
from reprextract.cli import main


def test_backbone_registry():
    assert BACKBONE_DIMS == {
        "alexnet": 4096,
        "vgg16": 4096,
        "resnet18": 512,
        "resnet34": 512,
        "resnet50": 2048,
    }
    with pytest.raises(ValueError):
        ExtractionSpec(backbone="resnet101")
    with pytest.raises(ValueError):
        ExtractionSpec(backbone="resnet18", n_images=0)


def test_label_map_values():
    assert label_map("ship") == 0
    assert label_map("frog") == 1
    with pytest.raises(ValueError, match="plane"):
        label_map("plane")


def test_stub_features_deterministic_and_shaped():
    a, la = stub_features("resnet18", 32)
    b, lb = stub_features("resnet18", 32)
    assert a.shape == (32, 512) and a.dtype == np.float32
    assert (a == b).all() and (la == lb).all()
    other, _ = stub_features("resnet50", 32)
    assert other.shape == (32, 2048)


def test_write_features_validation(tmp_path):
    with pytest.raises(ValueError, match="binary"):
        write_features(np.zeros((2, 3), dtype=np.float32), np.asarray([0, 2]), tmp_path / "x")
    with pytest.raises(ValueError, match="2-d"):
        write_features(np.zeros(3, dtype=np.float32), np.asarray([0]), tmp_path / "x")


def test_cli_stub_roundtrip(tmp_path):
    out = tmp_path / "r18.repr"
    code = main(["--backbone", "resnet18", "--n", "16", "--out", str(out), "--stub"])
    assert code == 0
    assert out.stat().st_size == file_size(16, 512)
    blob = out.read_bytes()
    assert blob[:4] == b"MKTR"


def test_cli_stub_reruns_identical(tmp_path):
    a, b = tmp_path / "a.repr", tmp_path / "b.repr"
    for out in (a, b):
        assert main(["--backbone", "vgg16", "--n", "8", "--out", str(out), "--stub"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_real_extraction_errors_are_actionable(tmp_path, monkeypatch):
    # point the data dir somewhere empty and forbid the download from
    # completing quickly by using an unroutable proxy-free location
    spec = ExtractionSpec(
        backbone="resnet18", n_images=4, out_path=str(tmp_path / "x.repr"),
        data_dir=str(tmp_path / "nodata"),
    )
    try:
        extract(spec)
    except RuntimeError as exc:
        message = str(exc).lower()
        assert "cifar" in message or "weights" in message or "download" in message
    else:
        pytest.skip("network and weights available; real path exercised elsewhere")
