"""``monocolor`` command line.

Exit status: 0 on success, 1 when a pipeline warning is escalated by
``--strict``, 2 for I/O and argument errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .denoise import rrdct_denoise
from .evalkit import NOISE_GRID, NoiseParams, list_scenes, run_benchmark, summarize
from .imagecore import read_image, rgb_to_lab, write_image
from .pipeline import PipelineConfig, colorize
from .sampler import DEFAULT_PRIOR_PATH, PriorTable, calibrate_priors, emit_selection_table, pair_from_rgb
from .scribbler import MatchConfig, Status

log = logging.getLogger("monocolor")

EXIT_OK, EXIT_WARNING, EXIT_IO = 0, 1, 2

# debug rendering of the per-pixel status codes
_STATUS_COLOURS = {
    Status.VALID: (0.2, 0.8, 0.2),
    Status.OCCLUDED: (0.1, 0.1, 0.1),
    Status.AMBIGUOUS: (0.9, 0.2, 0.2),
    Status.SEEDED: (1.0, 1.0, 0.0),
    Status.PROPAGATED: (0.3, 0.3, 0.9),
}


class UsageError(Exception):
    pass


def set_threads(n: int | None) -> None:
    if n is None:
        return
    if n < 1:
        raise UsageError("--threads must be positive")
    import cv2
    import numba

    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    cv2.setNumThreads(n)


def load_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    changes = {}
    if args.seed is not None:
        changes["rng_seed"] = args.seed
    if args.no_denoise:
        changes["pre_denoise"] = False
    return cfg.replace(**changes) if changes else cfg


def read_mono(path) -> np.ndarray:
    """Lightness in [0, 1]: a single-channel file is taken as L/100 directly,
    a colour file is converted and its lightness kept."""
    img = read_image(path)
    if img.ndim == 3:
        return rgb_to_lab(img[..., :3]).l
    return img


def status_image(status: np.ndarray) -> np.ndarray:
    out = np.zeros(status.shape + (3,))
    for code, colour in _STATUS_COLOURS.items():
        out[status == code] = colour
    return out


def dump_debug(dirpath: Path, result) -> None:
    dirpath.mkdir(parents=True, exist_ok=True)
    write_image(dirpath / "scribble_status.png", status_image(result.scribbles.status))
    write_image(dirpath / "hint_status.png", status_image(result.hints.status))
    with (dirpath / "seeds.csv").open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["row", "col", "a", "b"])
        for s in result.seeds:
            wr.writerow([s.row, s.col, f"{s.a:.6f}", f"{s.b:.6f}"])
    with (dirpath / "summary.txt").open("w") as fh:
        for name, frac in result.scribbles.fractions().items():
            fh.write(f"scribble_{name} = {frac:.6f}\n")
        fh.write(f"seeds = {len(result.seeds)}\n")
        for stage, sec in result.timings.items():
            fh.write(f"time_{stage} = {sec:.4f}\n")
        fh.write(f"flags = {','.join(result.flags) or 'none'}\n")


# ------------------------------------------------------------------ commands


def cmd_colorize(args) -> int:
    cfg = load_config(args)
    mono = read_mono(args.mono)
    guide = read_image(args.guide)
    if guide.ndim != 3:
        raise UsageError(f"{args.guide}: guidance must be a colour image")
    noise = None
    if args.alpha is not None or args.sigma2 is not None:
        noise = NoiseParams(args.alpha or 0.0, args.sigma2 or 0.0)
    result = colorize(mono, guide[..., :3], cfg, noise=noise)
    write_image(args.out, result.rgb, bits=args.bits)

    for stage, sec in result.timings.items():
        print(f"{stage:<10s} {sec:8.3f} s")
    fr = result.scribbles.fractions()
    print(f"valid {fr['valid']:.3f}  occluded {fr['occluded']:.3f}  "
          f"ambiguous {fr['ambiguous']:.3f}  seeds {len(result.seeds)}")

    debug_dir = args.debug_dir
    if debug_dir is None and cfg.dump_debug:
        debug_dir = Path(args.out).with_name(Path(args.out).stem + "_debug")
    if debug_dir is not None:
        dump_debug(Path(debug_dir), result)

    for flag in result.flags:
        log.warning("pipeline flag: %s", flag)
    if args.strict and result.flags:
        return EXIT_WARNING
    return EXIT_OK


def cmd_synth(args) -> int:
    """Lay out stereo views as ``<out>/<scene>/view_left.png`` + ``view_right.png``."""
    out = Path(args.out)
    jobs = []
    if args.pair:
        left, right, name = args.pair
        jobs.append((name, Path(left), Path(right)))
    if args.source:
        src = Path(args.source)
        if not src.is_dir():
            raise FileNotFoundError(f"{src}: not a directory")
        for scene in sorted(p for p in src.iterdir() if p.is_dir()):
            left, right = scene / args.left_name, scene / args.right_name
            if left.is_file() and right.is_file():
                jobs.append((scene.name, left, right))
            else:
                log.warning("skipping %s: %s or %s missing", scene.name, args.left_name, args.right_name)
    if not jobs:
        raise UsageError("nothing to prepare; give a source directory or --pair")
    for name, left, right in jobs:
        l_img, r_img = read_image(left), read_image(right)
        if l_img.shape != r_img.shape or l_img.ndim != 3:
            raise UsageError(f"{name}: views must be equal-size colour images")
        dest = out / name
        dest.mkdir(parents=True, exist_ok=True)
        write_image(dest / "view_left.png", l_img[..., :3], bits=args.bits)
        write_image(dest / "view_right.png", r_img[..., :3], bits=args.bits)
        print(f"{name}: {l_img.shape[1]}x{l_img.shape[0]}")
    return EXIT_OK


def _parse_grid(text: str | None):
    if text is None:
        return NOISE_GRID
    grid = []
    for item in text.split(";"):
        alpha, sigma2 = (float(v) for v in item.split(","))
        grid.append((alpha, sigma2))
    return tuple(grid)


def cmd_evaluate(args) -> int:
    cfg = load_config(args)
    if not Path(args.dataset).is_dir():
        raise FileNotFoundError(f"{args.dataset}: not a directory")
    if not list_scenes(args.dataset):
        raise UsageError(f"{args.dataset}: no <scene>/view_left.png + view_right.png found")
    rows = run_benchmark(args.dataset, cfg, _parse_grid(args.noise_grid), args.out,
                         seed=args.seed or 0)
    for row in rows:
        print(f"{row.image:<16s} a={row.alpha:<8g} s2={row.sigma2:<8g} "
              f"{row.psnr_db:7.2f} dB  {row.ssim:.4f}  {row.total_s:6.2f} s")
    for (alpha, sigma2), (p, s) in summarize(rows).items():
        print(f"mean a={alpha:g} s2={sigma2:g}: {p:.2f} dB / {s:.4f}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = load_config(args)
    scenes = list_scenes(args.dataset) if Path(args.dataset).is_dir() else []
    if not scenes:
        raise UsageError(f"{args.dataset}: no prepared scenes to calibrate on")
    match = MatchConfig.full(patch_size=cfg.match.patch_size, epsilon=cfg.match.epsilon,
                             ambiguity_tau=cfg.match.ambiguity_tau)

    def pairs():
        for scene in scenes:
            log.info("calibrating on %s", scene.name)
            yield pair_from_rgb(read_image(scene / "view_left.png")[..., :3],
                                read_image(scene / "view_right.png")[..., :3])

    prior = calibrate_priors(pairs(), match, cfg.geometry)
    prior.save(args.out)
    print(f"slope {prior.slope:.6g}  intercept {prior.intercept:.6g}  "
          f"P(g={prior.pool}) {prior.p_g[-1]:.4f}")
    return EXIT_OK


def cmd_sampling_analysis(args) -> int:
    prior = PriorTable.load(args.prior)
    rows = emit_selection_table(prior, range(1, args.n_max + 1), range(1, args.n_max + 1))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        wr = csv.writer(fh)
        wr.writerow(["N", "T", "phi_valid", "phi_confidence"])
        for n, t, valid, conf in rows:
            wr.writerow([n, t, f"{valid:.6f}", f"{conf:.6f}"])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_denoise(args) -> int:
    cfg = load_config(args)
    img = read_image(args.input)
    noise = None
    if args.alpha is not None or args.sigma2 is not None:
        noise = NoiseParams(args.alpha or 0.0, args.sigma2 or 0.0)
    res = rrdct_denoise(img, cfg.denoise, noise, cfg.rng_seed)
    write_image(args.out, res.image, bits=args.bits)
    print(f"rng seed {res.seed}{'  (passed through)' if res.passthrough else ''}")
    if args.strict and res.passthrough:
        return EXIT_WARNING
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value pipeline configuration file")
    common.add_argument("--threads", type=int, help="cap on worker threads")
    common.add_argument("--seed", type=int, help="random seed (denoiser tilings, noise)")
    common.add_argument("--no-denoise", action="store_true", help="skip guidance pre-denoising")
    common.add_argument("--debug-dir", help="write intermediate maps here")
    common.add_argument("--strict", action="store_true", help="exit 1 on pipeline warnings")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="monocolor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("colorize", parents=[common], help="colorize a monochrome image")
    c.add_argument("mono")
    c.add_argument("guide")
    c.add_argument("out")
    c.add_argument("--alpha", type=float, help="known signal-dependent noise variance of the guide")
    c.add_argument("--sigma2", type=float, help="known additive noise variance of the guide")
    c.add_argument("--bits", type=int, choices=(8, 16), default=8)
    c.set_defaults(func=cmd_colorize)

    s = sub.add_parser("synth", parents=[common], help="prepare a dataset directory")
    s.add_argument("out")
    s.add_argument("--source", help="directory of scenes holding two views each")
    s.add_argument("--left-name", default="view1.png")
    s.add_argument("--right-name", default="view5.png")
    s.add_argument("--pair", nargs=3, metavar=("LEFT", "RIGHT", "NAME"))
    s.add_argument("--bits", type=int, choices=(8, 16), default=8)
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("evaluate", parents=[common], help="PSNR/SSIM benchmark")
    e.add_argument("dataset")
    e.add_argument("--out", help="CSV path")
    e.add_argument("--noise-grid", help="'alpha,sigma2;alpha,sigma2;...'")
    e.set_defaults(func=cmd_evaluate)

    k = sub.add_parser("calibrate", parents=[common], help="estimate the sampling prior")
    k.add_argument("dataset")
    k.add_argument("out")
    k.set_defaults(func=cmd_calibrate)

    a = sub.add_parser("sampling-analysis", parents=[common], help="(N, T) selection table")
    a.add_argument("--prior", default=str(DEFAULT_PRIOR_PATH))
    a.add_argument("--n-max", type=int, default=16)
    a.add_argument("--out", help="CSV path (default stdout)")
    a.set_defaults(func=cmd_sampling_analysis)

    d = sub.add_parser("denoise", parents=[common], help="RRDCT denoising of one image")
    d.add_argument("input")
    d.add_argument("out")
    d.add_argument("--alpha", type=float)
    d.add_argument("--sigma2", type=float)
    d.add_argument("--bits", type=int, choices=(8, 16), default=8)
    d.set_defaults(func=cmd_denoise)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        set_threads(args.threads)
        return args.func(args)
    except (UsageError, OSError, ValueError) as exc:
        print(f"monocolor {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
