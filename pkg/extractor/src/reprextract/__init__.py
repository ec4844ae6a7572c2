"""Penultimate-layer CIFAR-10 embeddings exported as binary repr files."""

from .backbones import BACKBONE_DIMS
from .extract import ExtractionSpec, extract, stub_features
from .format import file_size, write_features
from .labels import CLASS_0, CLASS_1, label_map

__all__ = [
    "BACKBONE_DIMS",
    "CLASS_0",
    "CLASS_1",
    "ExtractionSpec",
    "extract",
    "file_size",
    "label_map",
    "stub_features",
    "write_features",
]
