"""Command-line interface: analyze, sweep, and synth subcommands."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from nuctrack import pipeline, synth
from nuctrack.imgproc import StructuringElement

CONFIG_KEYS = (
    "opening_iters",
    "closing_iters",
    "min_area",
    "dilation_iters",
    "jump_factor",
    "min_jump",
    "threshold_override",
    "freeze_threshold",
    "jobs",
    "se",
)


def _add_detection_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--opening", type=int, default=None, dest="opening_iters",
                        help="erosion/dilation pairs in the opening pass (default 2)")
    parser.add_argument("--closing", type=int, default=None, dest="closing_iters",
                        help="dilation/erosion pairs in the closing pass (default 0)")
    parser.add_argument("--min-area", type=int, default=None, dest="min_area",
                        help="smallest component kept as a nucleus, in pixels (default 20)")
    parser.add_argument("--dilation", type=int, default=None, dest="dilation_iters",
                        help="cytoplasm ring width in dilation steps (default 5)")
    parser.add_argument("--threshold", type=int, default=None, dest="threshold_override",
                        help="fixed binarization threshold; skips automatic selection")
    parser.add_argument("--jump-factor", type=float, default=None, dest="jump_factor",
                        help="relative noise increase that counts as the knee (default 2.0)")
    parser.add_argument("--min-jump", type=int, default=None, dest="min_jump",
                        help="absolute noise increase that counts as the knee (default 10)")
    parser.add_argument("--freeze-threshold", action="store_const", const=True, default=None,
                        dest="freeze_threshold",
                        help="select the threshold on frame 0 only and reuse it")
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker threads for per-frame detection (default 1)")
    parser.add_argument("--se", choices=["square3", "cross3"], default=None,
                        help="structuring element shape (default square3)")
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file with the options above; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nuctrack",
        description="Detect, track, and quantify fluorescent nuclei in "
        "two-channel time-lapse frame sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run detection, tracking, and measurement")
    analyze.add_argument("--red", type=Path, required=True, help="detection-channel frame directory")
    analyze.add_argument("--green", type=Path, required=True, help="measurement-channel frame directory")
    analyze.add_argument("--out", type=Path, required=True, help="output CSV path")
    analyze.add_argument("--overlay-dir", type=Path, default=None,
                         help="write per-frame overlay PNGs here")
    analyze.add_argument("--scan-dump-dir", type=Path, default=None,
                         help="write per-frame threshold-scan CSVs here")
    _add_detection_options(analyze)

    swp = sub.add_parser("sweep", help="tracked-to-final-frame counts over a grid of "
                                       "opening/closing iteration counts")
    swp.add_argument("--red", type=Path, required=True)
    swp.add_argument("--green", type=Path, required=True)
    swp.add_argument("--out", type=Path, required=True, help="output grid CSV path")
    swp.add_argument("--max-opening", type=int, default=5)
    swp.add_argument("--max-closing", type=int, default=5)
    _add_detection_options(swp)

    syn = sub.add_parser("synth", help="generate a synthetic two-channel sequence with ground truth")
    syn.add_argument("--out", type=Path, required=True, help="output directory (red/, green/, ground_truth.json)")
    syn.add_argument("--blobs", type=int, default=12)
    syn.add_argument("--frames", type=int, default=16)
    syn.add_argument("--width", type=int, default=640)
    syn.add_argument("--height", type=int, default=480)
    syn.add_argument("--radius-min", type=int, default=6)
    syn.add_argument("--radius-max", type=int, default=10)
    syn.add_argument("--noise-density", type=float, default=0.0)
    syn.add_argument("--noise-amplitude", type=int, default=0)
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--step-fraction", type=float, default=0.5,
                     help="max per-frame displacement as a fraction of blob radius")
    syn.add_argument("--separation", type=float, default=4.0,
                     help="min center distance between blobs, in blob radii")
    syn.add_argument("--nucleus-intensity", type=int, default=180)
    syn.add_argument("--green-nucleus", type=int, default=200)
    syn.add_argument("--green-cytoplasm", type=int, default=50)
    syn.add_argument("--benchmark", action="store_true",
                     help="ignore the options above and write the seeded 20-blob sweep benchmark")
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    file_values: dict = {}
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            file_values = json.load(fh)
        unknown = set(file_values) - set(CONFIG_KEYS)
        if unknown:
            raise SystemExit(f"unknown config keys: {', '.join(sorted(unknown))}")
    merged = {}
    for key in CONFIG_KEYS:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            merged[key] = cli_value
        elif key in file_values:
            merged[key] = file_values[key]
    if "se" in merged and not isinstance(merged["se"], StructuringElement):
        merged["se"] = StructuringElement(merged["se"])
    return merged


def _cmd_analyze(args: argparse.Namespace) -> int:
    config = pipeline.RunConfig(
        red_dir=args.red,
        green_dir=args.green,
        out_csv=args.out,
        overlay_dir=args.overlay_dir,
        scan_dump_dir=args.scan_dump_dir,
        **_merge_config(args),
    )
    tracks, records = pipeline.run(config)
    live = sum(1 for t in tracks if t.status.value == "live")
    logging.getLogger("nuctrack").info(
        "analyze done: %d tracks (%d live at final frame), %d measurements -> %s",
        len(tracks), live, len(records), args.out,
    )
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = pipeline.RunConfig(
        red_dir=args.red,
        green_dir=args.green,
        out_csv=args.out,
        **_merge_config(args),
    )
    pipeline.sweep(config, max_opening=args.max_opening, max_closing=args.max_closing)
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    if args.benchmark:
        bench = synth.sweep_benchmark(seed=args.seed if args.seed else 1701)
        specs, frames = bench.specs, bench.frames
        width, height = bench.width, bench.height
        density, amplitude, seed = bench.noise_density, bench.noise_amplitude, bench.seed
    else:
        specs = synth.random_drift_specs(
            seed=args.seed,
            n_blobs=args.blobs,
            frames=args.frames,
            width=args.width,
            height=args.height,
            radius_min=args.radius_min,
            radius_max=args.radius_max,
            step_fraction=args.step_fraction,
            separation_factor=args.separation,
            nucleus_intensity=args.nucleus_intensity,
            green_nucleus_level=args.green_nucleus,
            green_cytoplasm_level=args.green_cytoplasm,
        )
        frames, width, height = args.frames, args.width, args.height
        density, amplitude, seed = args.noise_density, args.noise_amplitude, args.seed
    reds, greens, truth = synth.generate(
        specs, frames, width, height,
        noise_density=density, noise_amplitude=amplitude, seed=seed,
    )
    out = Path(args.out)
    synth.write_sequence(reds, out / "red")
    synth.write_sequence(greens, out / "green")
    synth.write_ground_truth_json(truth, specs, out / "ground_truth.json")
    logging.getLogger("nuctrack").info(
        "wrote %d frame pairs (%dx%d, %d blobs) to %s", frames, width, height, len(specs), out
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    handlers = {"analyze": _cmd_analyze, "sweep": _cmd_sweep, "synth": _cmd_synth}
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
