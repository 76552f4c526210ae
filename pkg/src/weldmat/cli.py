"""Command-line front end.

Exit codes: 0 success, 1 computational failure (solver divergence,
degenerate trimap), 2 usage or I/O error. Every tunable defaults to the
production values, so zero-flag invocations run the standard pipeline.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .augment import AugmentConfig, augment_pair
from .errors import (
    DegenerateCrop,
    DimensionMismatch,
    EmptyDataset,
    ImageTooSmall,
    InvariantViolation,
    LengthMismatch,
    MalformedHeader,
    NoKnownPixels,
    SolverDivergence,
    UnreadableFile,
)
from .heatmap import HeatmapParams, laplacian_boundary, make_heatmap_gt
from .losses import LossParams, combined_loss
from .matting import MattingParams
from .metrics import evaluate
from .raster import load_raster, save_raster, write_wfr
from .refine import RefineParams, build_trimap, refine
from .synth import SynthParams, synth_instance

_COMPUTE_ERRORS = (SolverDivergence, NoKnownPixels)
_USAGE_ERRORS = (
    UnreadableFile,
    MalformedHeader,
    InvariantViolation,
    DimensionMismatch,
    LengthMismatch,
    EmptyDataset,
    DegenerateCrop,
    ImageTooSmall,
    ValueError,
    OSError,
)


def cmd_heatmap_gt(args):
    mask = load_raster(args.mask, "mask")
    params = HeatmapParams(sigma=args.sigma, edge_threshold=args.edge_threshold)
    boundary = laplacian_boundary(mask, params.edge_threshold)
    n_boundary = int(boundary.sum())
    heat = make_heatmap_gt(mask, params)
    if n_boundary == 0:
        print("warning: mask has no boundary, heatmap is all zero", file=sys.stderr)
    save_raster(args.out, heat)
    if args.preview:
        save_raster(args.preview, heat)
    support = float((heat > 0).mean())
    print(f"sigma {params.sigma}")
    print(f"boundary pixels {n_boundary}")
    print(f"nonzero support fraction {support:.6f}")
    return 0


def cmd_loss(args):
    ps = load_raster(args.ps, "prob")
    gs = load_raster(args.gs, "mask")
    pb = load_raster(args.pb, "prob")
    hb = load_raster(args.hb, "prob")
    params = LossParams(w1=args.w1, w2=args.w2, alpha_t=args.alpha_t, gamma=args.gamma)
    report = combined_loss(ps, gs, pb, hb, params)
    if args.grad_ps_out:
        write_wfr(args.grad_ps_out, report.grad_ps)
    if args.grad_pb_out:
        write_wfr(args.grad_pb_out, report.grad_pb)
    if args.json:
        print(
            json.dumps(
                {
                    "focal": report.focal,
                    "boundary_mse": report.boundary_mse,
                    "combined": report.combined,
                }
            )
        )
    else:
        print(f"focal {report.focal:.12g}")
        print(f"boundary_mse {report.boundary_mse:.12g}")
        print(f"combined {report.combined:.12g}")
    return 0


def cmd_trimap(args):
    prob = load_raster(args.prob, "prob")
    tri = build_trimap(prob, c_high=args.c_high, c_low=args.c_low)
    save_raster(args.out, tri)
    counts = {
        "foreground": int((tri == 1.0).sum()),
        "background": int((tri == 0.0).sum()),
        "unknown": int((tri == 0.5).sum()),
    }
    for key, n in counts.items():
        print(f"{key} {n}")
    return 0


def cmd_refine(args):
    image = load_raster(args.image, "image")
    prob = load_raster(args.prob, "prob")
    params = RefineParams(
        c_high=args.c_high,
        c_low=args.c_low,
        matting=MattingParams(
            epsilon=args.epsilon,
            solver_tol=args.solver_tol,
            max_iters=args.max_iters,
        ),
        mask_threshold=args.mask_threshold,
        band_dilation=args.sigma_band,
    )
    t0 = time.perf_counter()
    mask, alpha, trimap = refine(image, prob, params)
    elapsed = time.perf_counter() - t0
    save_raster(args.out, mask)
    if args.trimap_out:
        save_raster(args.trimap_out, trimap)
    if args.alpha_out:
        save_raster(args.alpha_out, alpha.alpha)
    unknown = int((trimap == 0.5).sum())
    if args.bench:
        print(f"seconds {elapsed:.3f}")
        print(f"unknown pixels {unknown}")
    if args.json:
        print(
            json.dumps(
                {
                    "out": str(args.out),
                    "unknown_pixels": unknown,
                    "foreground_pixels": int(mask.sum()),
                    "seconds": elapsed,
                }
            )
        )
    return 0


_RASTER_SUFFIXES = (".png", ".pgm", ".wfr")


def _mask_dir(path):
    d = Path(path)
    if not d.is_dir():
        raise UnreadableFile(f"{path}: not a directory")
    return {p.name: p for p in d.iterdir() if p.suffix.lower() in _RASTER_SUFFIXES}


def cmd_eval(args):
    preds = _mask_dir(args.pred_dir)
    gts = _mask_dir(args.gt_dir)
    names = sorted(set(preds) & set(gts))
    if not names:
        raise EmptyDataset("no file names shared between pred and gt directories")
    result = evaluate(
        [load_raster(preds[n], "mask") for n in names],
        [load_raster(gts[n], "mask") for n in names],
        aggregate=args.aggregate,
    )
    doc = result.to_dict()
    for record, name in zip(doc["per_image"], names):
        record["name"] = name
    if args.report:
        Path(args.report).write_text(json.dumps(doc, indent=2) + "\n")
    if args.json:
        print(json.dumps(doc))
    else:
        print(f"images {len(names)}")
        print(f"dataset_miou {result.dataset_miou:.6f}")
    return 0


def cmd_augment(args):
    image = load_raster(args.image, "image")
    mask = load_raster(args.mask, "mask")
    if args.config:
        cfg = AugmentConfig.from_json(Path(args.config).read_text())
        if args.seed is not None:
            cfg = AugmentConfig(seed=args.seed, stages=cfg.stages)
    else:
        cfg = AugmentConfig(seed=args.seed if args.seed is not None else 0)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    aug_img, aug_mask = augment_pair(image, mask, cfg)
    img_out = out_dir / f"{Path(args.image).stem}_aug.png"
    mask_out = out_dir / f"{Path(args.mask).stem}_aug.png"
    save_raster(img_out, aug_img)
    save_raster(mask_out, aug_mask)
    print(f"wrote {img_out}")
    print(f"wrote {mask_out}")
    return 0


def cmd_synth(args):
    params = SynthParams(
        size=args.size,
        blur_sigma=args.blur_sigma,
        prob_gain=args.prob_gain,
        lump_amp=args.lump_amp,
        image_noise=args.image_noise,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        image, mask, prob = synth_instance(args.seed + i, params)
        save_raster(out_dir / f"{i:03d}_image.png", image)
        save_raster(out_dir / f"{i:03d}_mask.png", mask)
        write_wfr(out_dir / f"{i:03d}_prob.wfr", prob)
    print(f"wrote {args.count} instances to {out_dir}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weldmat",
        description="Weld segmentation post-processing: heatmap targets, "
        "loss oracles, matting refinement, evaluation, augmentation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("heatmap-gt", help="boundary heatmap ground truth from a mask")
    p.add_argument("--mask", required=True, help="binary mask (PNG/PGM/WFR)")
    p.add_argument("--out", required=True, help="heatmap output (.wfr exact, .png preview)")
    p.add_argument("--preview", help="optional extra 8-bit PNG preview")
    p.add_argument("--sigma", type=float, default=3.0)
    p.add_argument("--edge-threshold", type=float, default=0.1)
    p.set_defaults(func=cmd_heatmap_gt)

    p = sub.add_parser("loss", help="focal + boundary-MSE loss report")
    p.add_argument("--ps", required=True, help="predicted segmentation map")
    p.add_argument("--gs", required=True, help="ground-truth mask")
    p.add_argument("--pb", required=True, help="predicted boundary map")
    p.add_argument("--hb", required=True, help="boundary heatmap target")
    p.add_argument("--w1", type=float, default=0.8)
    p.add_argument("--w2", type=float, default=0.2)
    p.add_argument("--alpha-t", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.2)
    p.add_argument("--grad-ps-out", help="write segmentation gradient as WFR")
    p.add_argument("--grad-pb-out", help="write boundary gradient as WFR")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("trimap", help="threshold a probability map into a trimap")
    p.add_argument("--prob", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--c-high", type=float, default=0.46)
    p.add_argument("--c-low", type=float, default=0.38)
    p.set_defaults(func=cmd_trimap)

    p = sub.add_parser("refine", help="matting-refine a probability map into a mask")
    p.add_argument("--image", required=True)
    p.add_argument("--prob", required=True)
    p.add_argument("--out", required=True, help="binary mask output")
    p.add_argument("--trimap-out")
    p.add_argument("--alpha-out", help="raw alpha matte as WFR")
    p.add_argument("--c-high", type=float, default=0.46)
    p.add_argument("--c-low", type=float, default=0.38)
    p.add_argument("--sigma-band", type=int, default=0, help="extra unknown-band dilation radius")
    p.add_argument("--mask-threshold", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=1e-7)
    p.add_argument("--solver-tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--bench", action="store_true", help="print wall time and unknown-set size")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("eval", help="mIoU of predicted masks against ground truth")
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--gt-dir", required=True)
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--aggregate", choices=("macro", "global"), default="macro")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("augment", help="seeded joint image/mask augmentation")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="JSON stage configuration")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("synth", help="synthetic weld-like benchmark instances")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--blur-sigma", type=float, default=4.0)
    p.add_argument("--prob-gain", type=float, default=0.88)
    p.add_argument("--lump-amp", type=float, default=0.06)
    p.add_argument("--image-noise", type=float, default=0.02)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _COMPUTE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
