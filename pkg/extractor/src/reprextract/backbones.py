"""Pretrained backbone registry and penultimate-feature extraction.

Torch and torchvision are imported lazily so that stub mode works without
them installed.
"""

from __future__ import annotations

import numpy as np

# Penultimate-layer width of each supported ImageNet-pretrained backbone.
BACKBONE_DIMS = {
    "alexnet": 4096,
    "vgg16": 4096,
    "resnet18": 512,
    "resnet34": 512,
    "resnet50": 2048,
}


def check_backbone(name: str) -> int:
    if name not in BACKBONE_DIMS:
        raise ValueError(f"unknown backbone {name!r}; expected one of {sorted(BACKBONE_DIMS)}")
    return BACKBONE_DIMS[name]


def load_feature_extractor(name: str, device: str = "cpu"):
    """Pretrained backbone with its classification head replaced by identity.

    Returns ``(model, preprocess)`` where preprocess is the canonical
    ImageNet transform of the pretrained weights (CIFAR's 32x32 images are
    upscaled by it). Raises with download guidance when weights cannot be
    obtained.
    """
    check_backbone(name)
    try:
        import torch
        from torchvision.models import get_model, get_model_weights
    except ImportError as exc:
        raise RuntimeError(
            "torch and torchvision are required for real extraction; install the "
            "'backbones' extra or use --stub"
        ) from exc
    weights = get_model_weights(name).DEFAULT
    try:
        model = get_model(name, weights=weights)
    except Exception as exc:
        raise RuntimeError(
            f"could not obtain pretrained weights for {name}: {exc}. Download them on a "
            "machine with network access (they cache under ~/.cache/torch) or use --stub"
        ) from exc
    if name.startswith("resnet"):
        model.fc = torch.nn.Identity()
    else:
        model.classifier[6] = torch.nn.Identity()
    model.eval()
    model.to(device)
    return model, weights.transforms()


def load_cifar10(data_dir: str, download: bool = True):
    """CIFAR-10 training set; raises with guidance when unavailable."""
    try:
        from torchvision.datasets import CIFAR10
    except ImportError as exc:
        raise RuntimeError(
            "torchvision is required to load CIFAR-10; install the 'backbones' extra "
            "or use --stub"
        ) from exc
    try:
        return CIFAR10(root=data_dir, train=True, download=download)
    except Exception as exc:
        raise RuntimeError(
            f"could not load CIFAR-10 from {data_dir}: {exc}. Download it on a machine "
            "with network access or place the extracted 'cifar-10-batches-py' there"
        ) from exc


def batched_features(model, preprocess, images, device: str = "cpu", batch_size: int = 64):
    """Run inference over PIL images, returning a float32 feature matrix."""
    import torch

    chunks = []
    with torch.no_grad():
        for start in range(0, len(images), batch_size):
            batch = torch.stack([preprocess(img) for img in images[start : start + batch_size]])
            out = model(batch.to(device))
            chunks.append(out.cpu().numpy().astype(np.float32))
    return np.concatenate(chunks, axis=0)
