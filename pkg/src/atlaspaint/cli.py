"""Command-line interface: prep-atlas, render, montage, animate, validate, serve.

Exit codes: 0 success, 1 validation/data error, 2 I/O error, 64 usage error.
Flags override config-file keys, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .atlas import AtlasError, load_manifest, prep_atlas
from .biomarker import BiomarkerError
from .camera import EmptyScene, UnknownView
from .colormap import BadColor, OutOfRange
from .compose import (
    ComposeError,
    render_animation,
    render_job,
    render_montage,
)
from .config import Config, ConfigError, build_render_job, validate_config_dict
from .gifenc import GifError
from .mesh import MeshError
from .ply import PlyError
from .png import IoError

VALIDATION_ERRORS = (
    ConfigError,
    AtlasError,
    BiomarkerError,
    BadColor,
    OutOfRange,
    UnknownView,
    EmptyScene,
    ComposeError,
    GifError,
    MeshError,
    PlyError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(64)


def _add_render_flags(p: _Parser):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--atlas", help="atlas manifest path (overrides config)")
    p.add_argument("--input", help="biomarker CSV path (overrides config)")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--views", help="comma-separated view names")
    p.add_argument("--resolution", help="WIDTHxHEIGHT, e.g. 1200x900")
    p.add_argument("--colors", help="comma-separated #RRGGBB anchors")
    p.add_argument("--shell-alpha", type=float, dest="shell_alpha")
    p.add_argument("--background", help="#RRGGBB background")
    p.add_argument("--prefix", help="output filename prefix")
    p.add_argument("--lenient", action="store_true",
                   help="clamp out-of-range CSV values instead of failing")
    p.add_argument("--log-transform", action="store_true", dest="log_transform",
                   help="log-normalize raw CSV values")


def build_parser() -> _Parser:
    parser = _Parser(prog="atlaspaint",
                     description="Brain-atlas biomarker renderer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prep-atlas", help="normalize and split a raw atlas")
    p.add_argument("--raw", required=True, help="directory with raw meshes")
    p.add_argument("--manifest", required=True, help="raw manifest file")
    p.add_argument("--out", required=True, help="output atlas directory")

    for name, extra in (
        ("render", ()),
        ("montage", ("pad",)),
        ("animate", ("view", "fpt", "delay", "dither")),
        ("validate", ()),
    ):
        p = sub.add_parser(name)
        _add_render_flags(p)
        if "pad" in extra:
            p.add_argument("--pad", type=int, help="cell padding in pixels")
        if "view" in extra:
            p.add_argument("--view", help="view to animate")
            p.add_argument("--fpt", type=int, help="frames per stage transition")
            p.add_argument("--delay", type=int, help="frame delay in centiseconds")
            p.add_argument("--dither", action="store_true",
                           help="ordered dithering during GIF quantization")

    p = sub.add_parser("serve", help="start the HTTP render service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--config", help="JSON config whose atlas gets registered")
    p.add_argument("--atlas", action="append", default=[],
                   help="atlas manifest to register (repeatable)")
    p.add_argument("--spool", help="job spool directory (default: ./spool)")
    p.add_argument("--cors-origin", dest="cors_origin",
                   help="origin allowed for cross-origin requests")
    p.add_argument("--queue-cap", type=int, dest="queue_cap", default=64)
    p.add_argument("--ui", help="static web UI directory to serve at /")
    return parser


def _load_merged_config(args) -> Config:
    doc = {}
    base = Path(".")
    if args.config:
        path = Path(args.config)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError("$", f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"{path} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("$", "config must be a JSON object")
        base = path.parent
        # config-file paths are relative to the config file itself
        for key in ("atlas", "input_csv", "out_dir"):
            if isinstance(doc.get(key), str):
                doc[key] = str(base / doc[key])

    overrides = {
        "atlas": args.atlas,
        "input_csv": args.input,
        "out_dir": args.out,
        "prefix": getattr(args, "prefix", None),
        "background": getattr(args, "background", None),
        "shell_alpha": getattr(args, "shell_alpha", None),
    }
    if getattr(args, "views", None):
        overrides["views"] = [v.strip() for v in args.views.split(",") if v.strip()]
    if getattr(args, "colors", None):
        overrides["colors"] = [c.strip() for c in args.colors.split(",") if c.strip()]
    if getattr(args, "resolution", None):
        parts = args.resolution.lower().split("x")
        try:
            overrides["resolution"] = [int(parts[0]), int(parts[1])]
        except (ValueError, IndexError):
            raise ConfigError(
                "resolution", f"expected WIDTHxHEIGHT, got {args.resolution!r}"
            ) from None
    if getattr(args, "lenient", False):
        overrides["strict"] = False
    if getattr(args, "log_transform", False):
        overrides["log_transform"] = True
    if getattr(args, "pad", None) is not None:
        overrides["montage_pad"] = args.pad
    if getattr(args, "view", None) is not None:
        overrides["animation_view"] = args.view
    if getattr(args, "fpt", None) is not None:
        overrides["fpt"] = args.fpt
    if getattr(args, "delay", None) is not None:
        overrides["delay_cs"] = args.delay
    if getattr(args, "dither", False):
        overrides["dither"] = True

    doc.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config_dict(doc)


def _prepare(cfg: Config):
    if not cfg.atlas:
        raise ConfigError("atlas", "no atlas manifest given (config key or --atlas)")
    if not cfg.input_csv:
        raise ConfigError("input_csv", "no biomarker CSV given (config key or --input)")
    manifest = load_manifest(cfg.atlas)
    csv_text = Path(cfg.input_csv).read_text(encoding="utf-8")
    prefix = Path(cfg.out_dir) / cfg.prefix
    return build_render_job(cfg, manifest, csv_text, prefix), manifest


def _cmd_validate(args) -> int:
    cfg = _load_merged_config(args)
    job, manifest = _prepare(cfg)
    print(f"atlas: {manifest.atlas_id} ({len(manifest.regions)} region entries,"
          f" hollow={manifest.hollow})")
    print(f"stages: {len(job.table.stages)} ({', '.join(job.table.stages)})")
    print(f"views: {', '.join(job.views)}")
    print(f"resolution: {job.resolution[0]}x{job.resolution[1]}")
    print(f"gradient anchors: {len(job.gradient.anchors)}")
    for warning in job.table.warnings:
        print(f"warning: {warning}")
    print("ok")
    return 0


def _cmd_render(args) -> int:
    cfg = _load_merged_config(args)
    job, _ = _prepare(cfg)
    for path in render_job(job):
        print(path)
    return 0


def _cmd_montage(args) -> int:
    cfg = _load_merged_config(args)
    job, _ = _prepare(cfg)
    print(render_montage(job, pad=cfg.montage_pad))
    return 0


def _cmd_animate(args) -> int:
    cfg = _load_merged_config(args)
    job, _ = _prepare(cfg)
    view = cfg.animation_view or job.views[0]
    print(render_animation(job, view, frames_per_transition=cfg.fpt,
                           delay_cs=cfg.delay_cs, dither=cfg.dither))
    return 0


def _cmd_prep_atlas(args) -> int:
    manifest = prep_atlas(args.raw, args.manifest, args.out)
    print(f"prepared {len(manifest.regions)} hemisphere entries in {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .config import load_config
    from .service import create_app

    registry = {}
    for path in args.atlas:
        manifest = load_manifest(path)
        registry[manifest.atlas_id] = manifest
    if args.config:
        cfg = load_config(args.config)
        if cfg.atlas:
            # config-file paths resolve relative to the config file
            manifest = load_manifest(Path(args.config).parent / cfg.atlas)
            registry.setdefault(manifest.atlas_id, manifest)
    app = create_app(
        registry,
        spool_dir=Path(args.spool) if args.spool else Path("spool"),
        queue_cap=args.queue_cap,
        cors_origin=args.cors_origin,
        ui_dir=Path(args.ui) if args.ui else None,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "prep-atlas": _cmd_prep_atlas,
    "render": _cmd_render,
    "montage": _cmd_montage,
    "animate": _cmd_animate,
    "validate": _cmd_validate,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IoError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
