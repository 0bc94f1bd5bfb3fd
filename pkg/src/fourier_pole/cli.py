"""Command-line interface.

Subcommands: ``render``, ``estimate-angle``, ``triangulate``, ``montecarlo``
and ``reproduce``. Exit status: 0 success, 2 configuration error, 3 I/O or
mesh error, 4 numerical or degenerate input, 5 failed reproduction check.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import PipelineConfig
from .errors import ConfigError, MeshError, PoleEstimationError
from .geometry import CameraFrame
from .montecarlo import MonteCarloConfig, run_monte_carlo
from .pipeline import build_mesh, estimate_from_stack, render_frames
from .render import SilhouetteImage
from .reproduce import CASES, reproduce, write_mc_bundle
from .spectral import spectral_image
from .stack import co_add, register_frames
from .triangulation import InPlaneMeasurement, pole_error, triangulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_ACCEPTANCE = 5


def load_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "out", None):
        cfg.output_dir = args.out
    return cfg.validate()


def out_dir(cfg: PipelineConfig) -> Path:
    p = Path(cfg.output_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def frame_sidecar(img: SilhouetteImage) -> dict:
    d = {
        "index": int(img.extra.get("index", 0)),
        "lon_deg": float(np.degrees(img.lon)),
        "lat_deg": float(np.degrees(img.lat)),
        "r": float(img.r),
        "phase_deg": float(np.degrees(img.phase)),
        "n": int(img.n),
    }
    if img.com_uv is not None:
        d["com_u"], d["com_v"] = (float(x) for x in img.com_uv)
    if "alpha_true" in img.extra:
        d["alpha_true_deg"] = float(np.degrees(img.extra["alpha_true"]))
    return d


def cmd_render(args) -> int:
    cfg = load_config(args)
    if cfg.shape.kind == "perturbed_sphere" and "seed" not in cfg.shape.params:
        cfg.shape.params["seed"] = cfg.seed
    out = out_dir(cfg)
    mesh = build_mesh(cfg)
    count = 0
    for img in render_frames(cfg, mesh, args.threads):
        stem = out / f"frame_{img.extra['index']:05d}"
        io.write_pgm(stem.with_suffix(".pgm"), img.pixels)
        io.write_json(stem.with_suffix(".json"), frame_sidecar(img))
        if img.brightness is not None:
            io.write_fpes(out / f"{stem.name}_shading.fpes", img.brightness)
        count += 1
    (out / "config.json").write_text(cfg.to_json())
    print(f"wrote {count} frames to {out}")
    return EXIT_OK


def load_frames(frames_dir: Path, weighting: str) -> list:
    if not frames_dir.is_dir():
        raise FileNotFoundError(f"frames directory {frames_dir} not found")
    frames = []
    for pgm in sorted(frames_dir.glob("frame_*.pgm")):
        side = pgm.with_suffix(".json")
        meta = io.read_json(side) if side.exists() else {}
        com = (meta["com_u"], meta["com_v"]) if "com_u" in meta else None
        shading = None
        if weighting == "lambertian":
            fp = frames_dir / f"{pgm.stem}_shading.fpes"
            if not fp.exists():
                raise FileNotFoundError(f"{fp} is needed for lambertian centroids")
            shading = io.read_fpes(fp)
        extra = {"index": meta.get("index", len(frames))}
        if "alpha_true_deg" in meta:
            extra["alpha_true"] = np.radians(meta["alpha_true_deg"])
        frames.append(SilhouetteImage(
            io.read_silhouette_pgm(pgm), np.radians(meta.get("lon_deg", 0.0)),
            np.radians(meta.get("lat_deg", 0.0)), meta.get("r", 1.0),
            np.radians(meta.get("phase_deg", 0.0)), com, shading, extra))
    if not frames:
        raise FileNotFoundError(f"no frame_*.pgm files in {frames_dir}")
    return frames


def cmd_estimate_angle(args) -> int:
    cfg = load_config(args)
    frames = load_frames(Path(args.frames_dir), cfg.render.centroid_weighting)
    if len(frames) < 2:
        raise ValueError("need at least two frames")
    stack = co_add(register_frames(frames, cfg.registration, cfg.render.centroid_weighting))
    stack.registration = cfg.registration
    truth = frames[0].extra.get("alpha_true")
    res = estimate_from_stack(stack, cfg, truth)
    out = out_dir(cfg)
    curve_path = out / "curve.csv"
    io.write_csv(curve_path, ["theta_deg", "psi"],
                 zip(np.degrees(res.curve.thetas), res.curve.scores))
    io.write_pgm(out / "stack.pgm", stack.pixels, maxval=stack.frame_count)
    io.write_json(out / "stack.json", {
        "frame_count": stack.frame_count, "registration": stack.registration,
        "lon_deg": [float(np.degrees(x)) for x in stack.lons]})
    io.write_fpes(out / "spectrum.fpes", spectral_image(stack, cfg.tau_px))
    io.write_json(out / "spectrum.json", {
        "n": stack.n, "tau": cfg.tau, "content": "log(1 + |F|^2), DC at index n // 2"})
    result = {
        "alpha_hat_deg": float(np.degrees(res.alpha_hat)),
        "hypotheses_deg": [float(np.degrees(h)) for h in res.hypotheses],
        "curve_csv": str(curve_path),
    }
    if res.disambiguated is not None:
        result["disambiguated_deg"] = float(np.degrees(res.disambiguated))
    if truth is not None:
        result["alpha_true_deg"] = float(np.degrees(truth))
        result["abs_error_deg"] = float(np.degrees(res.error))
    io.write_json(out / "estimate.json", result)
    print(f"alpha_hat = {result['alpha_hat_deg']:.1f} deg")
    return EXIT_OK


FRAME_COLUMNS = ["i_x", "i_y", "i_z", "j_x", "j_y", "j_z", "k_x", "k_y", "k_z"]


def read_measurements(path) -> list:
    rows = io.read_csv(path)
    ms = []
    for n, r in enumerate(rows, start=2):
        try:
            v = np.array([float(r[c]) for c in FRAME_COLUMNS])
            frame = CameraFrame(v[0:3], v[3:6], v[6:9])
            weight = float(r["weight"]) if r.get("weight") not in (None, "") else 1.0
            rho = r.get("projection_norm")
            ms.append(InPlaneMeasurement(np.radians(float(r["alpha_deg"])), frame, weight,
                                         float(rho) if rho not in (None, "") else None))
        except KeyError as exc:
            raise ValueError(f"{path}: missing column {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{path}, line {n}: {exc}") from exc
    return ms


def cmd_triangulate(args) -> int:
    ms = read_measurements(args.measurements)
    est = triangulate(ms, method=args.method)
    result = {
        "omega_hat": [float(x) for x in est.omega_hat],
        "residual_rms": est.residual_rms,
        "n_measurements": est.n_measurements,
        "method": est.method,
    }
    if args.truth:
        truth = np.array([float(x) for x in args.truth.split(",")])
        if truth.shape != (3,) or np.linalg.norm(truth) == 0:
            raise ConfigError("--truth takes three comma-separated components")
        truth /= np.linalg.norm(truth)
        result["epsilon_deg"] = float(np.degrees(pole_error(est.omega_hat, truth)))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "triangulation.json", result)
    print(" ".join(f"{x:.9f}" for x in est.omega_hat))
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    cfg = load_config(args)
    m = cfg.montecarlo
    mc = MonteCarloConfig(m.trials, np.radians(m.sigma_deg), m.n_views, cfg.seed,
                          np.radians(m.bin_width_deg), m.method)
    res = run_monte_carlo(mc, args.threads)
    out = out_dir(cfg)
    write_mc_bundle(out, "montecarlo", res)
    print(f"outliers over 5 deg: {res.outlier_count} of {m.trials}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    manifest = reproduce(args.case, args.out or f"out/{args.case}", args.seed or 0,
                         args.threads, args.fast)
    for c in manifest["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']} = {c['value']}  ({c['bound']})")
    return EXIT_OK if manifest["passed"] else EXIT_ACCEPTANCE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline config")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="64-bit seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads (speed only)")

    p = argparse.ArgumentParser(prog="fourier-pole",
                                description="Pole estimation from silhouette stacks.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("render", parents=[common], help="render a hovering silhouette sequence")
    e = sub.add_parser("estimate-angle", parents=[common], help="in-plane angle from frames")
    e.add_argument("frames_dir")
    t = sub.add_parser("triangulate", parents=[common], help="pole from a measurements CSV")
    t.add_argument("measurements")
    t.add_argument("--truth", help="true pole as x,y,z to report the error")
    t.add_argument("--method", choices=["linear", "nullspace"])
    sub.add_parser("montecarlo", parents=[common], help="triangulation Monte Carlo")
    r = sub.add_parser("reproduce", parents=[common], help="rerun and check an experiment")
    r.add_argument("case", choices=CASES)
    r.add_argument("--fast", action="store_true", help="256 px profile for fig_inplane")
    return p


_COMMANDS = {
    "render": cmd_render,
    "estimate-angle": cmd_estimate_angle,
    "triangulate": cmd_triangulate,
    "montecarlo": cmd_montecarlo,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        print("error: --seed must fit in 64 bits", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, MeshError, PoleEstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
