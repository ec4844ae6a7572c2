"""Extraction pipeline: CIFAR-10 images -> backbone features -> repr file."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backbones import BACKBONE_DIMS, batched_features, check_backbone, load_cifar10, load_feature_extractor
from .format import write_features
from .labels import label_map

STUB_SEED = 1234


@dataclass(frozen=True)
class ExtractionSpec:
    backbone: str
    n_images: int = 10_000
    out_path: str = "features.repr"
    device: str = "cpu"
    batch_size: int = 64
    data_dir: str = "./data"
    stub: bool = False

    def __post_init__(self):
        check_backbone(self.backbone)
        if self.n_images < 1:
            raise ValueError("n_images must be >= 1")


def stub_features(backbone: str, n_images: int, seed: int = STUB_SEED):
    """Deterministic stand-in features: fixed-seed pseudo-images projected
    through a fixed random matrix, labels drawn with the task's 0.6/0.4 mix.

    Needs no network or torch and produces the exact on-disk shape of a real
    extraction.
    """
    dim = check_backbone(backbone)
    rng = np.random.default_rng([seed, dim, n_images])
    labels = (rng.random(n_images) < 0.4).astype(np.uint8)
    pixels = rng.normal(size=(n_images, 64)).astype(np.float32)
    projection = rng.normal(size=(64, dim)).astype(np.float32) / 8.0
    shift = rng.normal(size=dim).astype(np.float32)
    features = pixels @ projection + (2.0 * labels - 1.0)[:, None] * 0.5 * shift
    return features.astype(np.float32), labels


def extract(spec: ExtractionSpec) -> str:
    """Produce the repr file described by ``spec``; returns the output path."""
    expected_dim = BACKBONE_DIMS[spec.backbone]
    if spec.stub:
        features, labels = stub_features(spec.backbone, spec.n_images)
    else:
        dataset = load_cifar10(spec.data_dir)
        if len(dataset) < spec.n_images:
            raise ValueError(f"dataset holds {len(dataset)} images, need {spec.n_images}")
        model, preprocess = load_feature_extractor(spec.backbone, spec.device)
        images = [dataset[i][0] for i in range(spec.n_images)]
        features = batched_features(
            model, preprocess, images, device=spec.device, batch_size=spec.batch_size
        )
        labels = np.asarray(
            [label_map(dataset.classes[dataset[i][1]]) for i in range(spec.n_images)],
            dtype=np.uint8,
        )
    if features.shape != (spec.n_images, expected_dim):
        raise RuntimeError(
            f"{spec.backbone} produced features of shape {features.shape}, "
            f"expected ({spec.n_images}, {expected_dim})"
        )
    write_features(features, labels, spec.out_path)
    return spec.out_path
