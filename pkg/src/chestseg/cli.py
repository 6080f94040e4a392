"""Command-line interface.

Subcommands:

* ``synth``   — render a synthetic phantom to frames + manifest + truth
* ``segment`` — run the full segmentation pipeline on a recording
* ``extract`` — pull the breathing signal out of a recording + ROI
* ``compare`` — automatic ROI vs a rough rectangle, side by side
* ``render``  — dump viewable grayscale images of frames/masks

Every subcommand writes its artifacts under a required output directory
(``-o``). Exit status 0 on success, 1 on any pipeline/config/I/O error
(diagnostic on stderr), 2 on bad usage.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .breathing import analyze_roi, centered_rectangle_mask, extract_breathing_signal, manual_rectangle_mask
from .config import PipelineConfig
from .depth_io import (
    SequenceManifest,
    load_sequence,
    normalize_frame,
    read_gray_image,
    read_pgm16,
    save_gray_image,
    write_pgm16,
)
from .exceptions import ChestsegError
from .kvfile import format_kv
from .noise import inpaint_pepper
from .phantom import default_phantom_spec, generate_phantom, load_phantom_spec
from .pipeline import segment_sequence
from .spectral import pixel_spectrum

_CONFIG_FLAGS = (
    # (flag, dest, type, help)
    ("--max-distance", "max_distance_mm", float, "depth cutoff in mm; farther pixels are invalid"),
    ("--median-radius", "median_radius", int, "pepper-inpaint window radius in px"),
    ("--margin", "margin", str, "border band to ignore, in px, or 'auto'"),
    ("--canny-low", "canny_low", float, "low edge threshold, fraction of max gradient"),
    ("--canny-high", "canny_high", float, "high edge threshold, fraction of max gradient"),
    ("--canny-sigma", "canny_sigma", float, "Gaussian sigma for edge detection"),
    ("--dilate-radius", "dilate_radius", int, "edge dilation radius in px"),
    ("--segment-seconds", "segment_seconds", float, "time-segment length in seconds"),
    ("--stride-seconds", "stride_seconds", float, "segment stride in seconds (default: segment length)"),
    ("--band-low", "band_low_hz", float, "breathing band lower edge in Hz"),
    ("--band-high", "band_high_hz", float, "breathing band upper edge in Hz"),
    ("--amp-frac", "amp_threshold_frac", float, "amplitude threshold, fraction of segment max"),
    ("--window", "window", str, "DFT window: rect or hann"),
    ("--open-radius", "open_radius", int, "morphological opening radius"),
    ("--close-radius", "close_radius", int, "morphological closing radius"),
    ("--min-area-frac", "min_area_frac", float, "minimum component area, fraction of frame pixels"),
    ("--conf", "conf_threshold", float, "confidence threshold for the final mask"),
    ("--motion-thresh", "motion_threshold", float, "mean |frame diff| flagging posture motion"),
)


def _add_config_flags(parser):
    parser.add_argument("--config", metavar="FILE",
                        help="config file; explicit flags override it")
    for flag, dest, typ, helptext in _CONFIG_FLAGS:
        kwargs = {"dest": dest, "help": helptext, "default": None}
        if flag == "--window":
            kwargs["choices"] = ("rect", "hann")
        elif typ is not str:
            kwargs["type"] = typ
        parser.add_argument(flag, **kwargs)


def _build_config(args):
    """defaults <- config file <- explicit flags."""
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    for _, dest, _, _ in _CONFIG_FLAGS:
        val = getattr(args, dest, None)
        if val is None:
            continue
        if dest == "margin":
            val = None if val == "auto" else int(val)
        setattr(cfg, dest, val)
    cfg.validate()
    return cfg


def _outdir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _load_mask_arg(path):
    img = read_gray_image(path)
    return img > 127


def _write_report(path, pairs):
    with open(path, "w") as f:
        f.write(format_kv(pairs))


def _roi_pairs(prefix, report):
    return [
        (prefix + "mask_area", report.mask_area),
        (prefix + "dominant_freq_hz", "%.6f" % report.dominant_freq_hz),
        (prefix + "in_band_peak_amplitude", "%.9g" % report.in_band_peak_amplitude),
        (prefix + "spectral_snr", "%.6g" % report.spectral_snr),
    ]


def _cmd_synth(args):
    spec = load_phantom_spec(args.spec) if args.spec else default_phantom_spec()
    sequence, truth = generate_phantom(spec, args.seed)
    out = _outdir(args)
    frame_names = []
    for t in range(len(sequence)):
        name = "frame_%06d.pgm" % t
        write_pgm16(os.path.join(out, name), sequence.frames[t])
        frame_names.append(name)
    save_gray_image(os.path.join(out, "truth_mask.pgm"), truth.chest_mask)
    for start, mask in truth.epochs[1:]:
        save_gray_image(os.path.join(out, "truth_mask_f%06d.pgm" % start), mask)
    manifest = SequenceManifest(fps=sequence.fps, width=sequence.width,
                                height=sequence.height, frame_paths=frame_names,
                                ground_truth_mask="truth_mask.pgm",
                                ground_truth_freq_hz=truth.breathing_freq_hz)
    manifest.save(os.path.join(out, "manifest.txt"))
    print("wrote %d frames to %s" % (len(sequence), out))
    return 0


def _cmd_segment(args):
    cfg = _build_config(args)
    sequence = load_sequence(args.manifest)
    result = segment_sequence(sequence, cfg)
    out = _outdir(args)
    save_gray_image(os.path.join(out, "mask.pgm"), result.mask)
    save_gray_image(os.path.join(out, "confidence.pgm"), result.confidence)
    pairs = [
        ("frames", len(sequence)),
        ("fps", sequence.fps),
        ("width", sequence.width),
        ("height", sequence.height),
        ("total_segments", len(result.segments)),
        ("valid_segments", result.valid_segments),
        ("mask_area", int(result.mask.sum())),
        ("confidence_max", "%.6f" % result.confidence.max()),
    ]
    _write_report(os.path.join(out, "report.txt"), pairs)
    if args.debug_images:
        first = inpaint_pepper(normalize_frame(sequence.frames[0],
                                               cfg.max_distance_mm),
                               cfg.median_radius)
        save_gray_image(os.path.join(out, "debug_inpainted_frame000000.pgm"), first)
        for seg in result.segments:
            stem = os.path.join(out, "debug_seg%06d_" % seg.start)
            save_gray_image(stem + "ignore.pgm", seg.ignore)
            save_gray_image(stem + "amplitude.pgm", seg.amplitude)
            save_gray_image(stem + "raw_mask.pgm", seg.raw_mask)
            save_gray_image(stem + "refined_mask.pgm", seg.refined_mask)
    print("mask area %d px over %d valid segments"
          % (int(result.mask.sum()), result.valid_segments))
    return 0


def _roi_from_args(args, sequence):
    if args.rect is not None and args.mask is not None:
        raise ChestsegError("give only one of --mask and --rect")
    if args.rect is not None:
        return manual_rectangle_mask(sequence.width, sequence.height, args.rect)
    if args.mask is not None:
        return _load_mask_arg(args.mask)
    raise ChestsegError("give an ROI: --mask FILE or --rect X Y W H")


def _spectrum_image(samples, fps, height=200):
    freqs, mags = pixel_spectrum(samples, fps)
    peak = mags.max()
    img = np.zeros((height, mags.size), dtype=bool)
    if peak > 0:
        levels = np.rint(mags / peak * (height - 1)).astype(int)
        for col, lv in enumerate(levels):
            if lv > 0:
                img[height - 1 - lv:, col] = True
    return img


def _cmd_extract(args):
    cfg = _build_config(args)
    sequence = load_sequence(args.manifest)
    roi = _roi_from_args(args, sequence)
    out = _outdir(args)
    sig = extract_breathing_signal(sequence, roi, cfg.max_distance_mm,
                                   cfg.median_radius)
    report = analyze_roi(sequence, roi, cfg)
    with open(os.path.join(out, "breathing_signal.txt"), "w") as f:
        for v in sig.samples:
            f.write("%.9f\n" % v)
    _write_report(os.path.join(out, "report.txt"),
                  [("fps", sequence.fps), ("samples", sig.samples.size)]
                  + _roi_pairs("", report))
    if args.spectrum_image:
        save_gray_image(os.path.join(out, "spectrum.pgm"),
                        _spectrum_image(sig.samples, sig.fps))
    print("dominant frequency %.4f Hz (snr %.2f)"
          % (report.dominant_freq_hz, report.spectral_snr))
    return 0


def _cmd_compare(args):
    cfg = _build_config(args)
    sequence = load_sequence(args.manifest)
    auto_mask = _load_mask_arg(args.mask)
    if args.rect is not None:
        rect_mask = manual_rectangle_mask(sequence.width, sequence.height, args.rect)
    else:
        manifest = SequenceManifest.load(args.manifest)
        if manifest.ground_truth_mask is None:
            raise ChestsegError(
                "no --rect given and the manifest has no ground-truth mask "
                "to center a rectangle on")
        gt_path = os.path.join(os.path.dirname(os.path.abspath(args.manifest)),
                               manifest.ground_truth_mask)
        rect_mask = centered_rectangle_mask(_load_mask_arg(gt_path),
                                            args.rect_scale)
    auto_report = analyze_roi(sequence, auto_mask, cfg)
    rect_report = analyze_roi(sequence, rect_mask, cfg)
    out = _outdir(args)
    ratio = (auto_report.spectral_snr / rect_report.spectral_snr
             if rect_report.spectral_snr > 0 else float("inf"))
    _write_report(os.path.join(out, "compare.txt"),
                  _roi_pairs("auto_", auto_report)
                  + _roi_pairs("rect_", rect_report)
                  + [("snr_ratio", "%.6g" % ratio)])
    print("auto snr %.2f vs rectangle snr %.2f"
          % (auto_report.spectral_snr, rect_report.spectral_snr))
    return 0


def _cmd_render(args):
    sequence = load_sequence(args.manifest)
    out = _outdir(args)
    t = args.frame
    if not 0 <= t < len(sequence):
        raise ChestsegError("frame %d out of range (sequence has %d)"
                            % (t, len(sequence)))
    frame = sequence.frames[t]
    save_gray_image(os.path.join(out, "render_frame%06d.pgm" % t),
                    frame.astype(np.float64))
    if args.normalized:
        save_gray_image(os.path.join(out, "render_normalized%06d.pgm" % t),
                        normalize_frame(frame, args.max_distance))
    if args.mask is not None:
        save_gray_image(os.path.join(out, "render_mask.pgm"),
                        _load_mask_arg(args.mask))
    print("rendered frame %d of %s" % (t, args.manifest))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chestseg",
        description="Segment the breathing-influenced chest region in "
                    "depth video and extract the breathing signal.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic phantom recording")
    p.add_argument("--spec", metavar="FILE", help="phantom spec file (default: built-in scene)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("segment", help="segment the chest region of a recording")
    p.add_argument("manifest", help="sequence manifest file")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--debug-images", action="store_true",
                   help="also write per-stage intermediate images")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("extract", help="extract the breathing signal from an ROI")
    p.add_argument("manifest", help="sequence manifest file")
    p.add_argument("--mask", metavar="FILE", help="ROI mask image (e.g. segment output)")
    p.add_argument("--rect", nargs=4, type=int, metavar=("X", "Y", "W", "H"),
                   help="rectangular ROI instead of a mask file")
    p.add_argument("--spectrum-image", action="store_true",
                   help="also write a grayscale spectrum plot")
    p.add_argument("-o", "--out", required=True, help="output directory")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("compare", help="compare automatic ROI vs a rough rectangle")
    p.add_argument("manifest", help="sequence manifest file")
    p.add_argument("--mask", required=True, metavar="FILE",
                   help="automatic ROI mask image")
    p.add_argument("--rect", nargs=4, type=int, metavar=("X", "Y", "W", "H"),
                   help="rectangle to compare against (default: centered on "
                        "the manifest ground truth)")
    p.add_argument("--rect-scale", type=float, default=4.0,
                   help="rectangle area as a multiple of the ground-truth "
                        "area (default 4)")
    p.add_argument("-o", "--out", required=True, help="output directory")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("render", help="write viewable grayscale images")
    p.add_argument("manifest", help="sequence manifest file")
    p.add_argument("--frame", type=int, default=0, help="frame index (default 0)")
    p.add_argument("--normalized", action="store_true",
                   help="also render the normalized frame")
    p.add_argument("--max-distance", type=float, default=3000.0,
                   help="normalization cutoff in mm (default 3000)")
    p.add_argument("--mask", metavar="FILE", help="also render this mask image")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_render)
    return parser


def run_cli(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ChestsegError as exc:
        print("chestseg: error: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("chestseg: error: %s" % exc, file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
