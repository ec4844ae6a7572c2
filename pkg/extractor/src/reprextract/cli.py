"""`extract` command line: one backbone, one output file."""

from __future__ import annotations

import argparse
import sys

from .backbones import BACKBONE_DIMS
from .extract import ExtractionSpec, extract


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extract",
        description="Export penultimate-layer CIFAR-10 embeddings from a pretrained "
        "backbone as a binary repr file.",
    )
    parser.add_argument("--backbone", required=True, choices=sorted(BACKBONE_DIMS))
    parser.add_argument("--n", type=int, default=10_000, help="number of images (default 10000)")
    parser.add_argument("--out", required=True, help="output repr file path")
    parser.add_argument("--stub", action="store_true",
                        help="fixed-seed synthetic features; no downloads, no torch")
    parser.add_argument("--device", default="cpu", help="inference device (default cpu)")
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--data-dir", default="./data", help="CIFAR-10 location/download root")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = ExtractionSpec(
        backbone=args.backbone,
        n_images=args.n,
        out_path=args.out,
        device=args.device,
        batch_size=args.batch_size,
        data_dir=args.data_dir,
        stub=args.stub,
    )
    try:
        path = extract(spec)
    except (RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.n_images} x {BACKBONE_DIMS[spec.backbone]} features to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
