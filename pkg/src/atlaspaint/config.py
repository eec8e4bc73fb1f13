"""Render configuration: JSON schema, defaults, validation, job assembly.

Schema (docs/config.md): every key optional; flags > file > defaults.
Diagnostics carry the offending key path so the CLI, the HTTP service and
the web UI all report the same message for the same mistake.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .biomarker import parse_biomarker_csv
from .camera import VIEW_ALIASES, VIEWS, UnknownView, canonical_view
from .colormap import DEFAULT_ANCHORS, BadColor, ColorGradient, parse_hex_color
from .compose import RenderJob

DEFAULT_VIEWS = ("cortical-outer-right", "subcortical", "top")
DEFAULT_RESOLUTION = (1200, 900)
MODES = ("images", "montage", "animation")


class ConfigError(Exception):
    """Invalid configuration; `key` is the offending key path."""

    def __init__(self, key: str, reason: str):
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}")


@dataclass
class Config:
    atlas: str | None = None
    input_csv: str | None = None
    colors: list[str] = field(default_factory=lambda: list(DEFAULT_ANCHORS))
    views: list[str] = field(default_factory=lambda: list(DEFAULT_VIEWS))
    resolution: tuple[int, int] = DEFAULT_RESOLUTION
    shell_alpha: float = 0.0
    log_transform: bool = False
    log_fold_range: float = 1000.0
    log_ref: float | None = None
    background: str = "#FFFFFF"
    out_dir: str = "out"
    prefix: str = "render"
    strict: bool = True
    mode: str = "images"
    animation_view: str | None = None
    fpt: int = 4
    delay_cs: int = 50
    montage_pad: int = 8
    dither: bool = False


_KEYS = set(Config.__dataclass_fields__)


def _expect(doc, key, types, default):
    value = doc.get(key)
    if value is None:  # absent and explicit null both mean "use default"
        value = default
    if value is None:
        return None
    allowed = types if isinstance(types, tuple) else (types,)
    # bool is an int subclass; only accept it where bool is asked for
    bad_bool = isinstance(value, bool) and bool not in allowed
    if bad_bool or not isinstance(value, allowed):
        names = "/".join(t.__name__ for t in allowed)
        raise ConfigError(key, f"expected {names}, got {value!r}")
    return value


def validate_config_dict(doc: dict) -> Config:
    """Validate a raw config JSON object, applying defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("$", "config must be a JSON object")
    for key in doc:
        if key not in _KEYS:
            raise ConfigError(key, "unknown configuration key")

    cfg = Config()
    cfg.atlas = _expect(doc, "atlas", str, None)
    cfg.input_csv = _expect(doc, "input_csv", str, None)

    colors = doc.get("colors", list(DEFAULT_ANCHORS))
    if not isinstance(colors, list) or len(colors) < 2:
        raise ConfigError("colors", "expected a list of at least 2 hex colors")
    for i, c in enumerate(colors):
        try:
            parse_hex_color(c)
        except BadColor as exc:
            raise ConfigError(f"colors[{i}]", str(exc)) from None
    cfg.colors = list(colors)

    views = doc.get("views", list(DEFAULT_VIEWS))
    if not isinstance(views, list) or not views:
        raise ConfigError("views", "expected a nonempty list of view names")
    resolved = []
    for i, v in enumerate(views):
        try:
            resolved.append(canonical_view(v))
        except (UnknownView, TypeError):
            allowed = ", ".join(VIEWS + tuple(VIEW_ALIASES))
            raise ConfigError(f"views[{i}]", f"{v!r} not one of: {allowed}") from None
    cfg.views = resolved

    res = doc.get("resolution", list(DEFAULT_RESOLUTION))
    if (not isinstance(res, (list, tuple)) or len(res) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in res)):
        raise ConfigError("resolution", "expected [width, height] integers")
    if res[0] < 16 or res[1] < 16:
        raise ConfigError("resolution", f"{res[0]}x{res[1]} below the 16x16 minimum")
    cfg.resolution = (res[0], res[1])

    shell = _expect(doc, "shell_alpha", (int, float), 0.0)
    if not 0.0 <= float(shell) <= 1.0:
        raise ConfigError("shell_alpha", f"{shell} outside [0, 1]")
    cfg.shell_alpha = float(shell)

    cfg.log_transform = _expect(doc, "log_transform", bool, False)
    fold = _expect(doc, "log_fold_range", (int, float), 1000.0)
    if float(fold) <= 1.0:
        raise ConfigError("log_fold_range", f"{fold} must exceed 1")
    cfg.log_fold_range = float(fold)
    ref = _expect(doc, "log_ref", (int, float), None)
    if ref is not None and float(ref) <= 0.0:
        raise ConfigError("log_ref", f"{ref} must be positive")
    cfg.log_ref = None if ref is None else float(ref)

    bg = _expect(doc, "background", str, "#FFFFFF")
    try:
        parse_hex_color(bg)
    except BadColor as exc:
        raise ConfigError("background", str(exc)) from None
    cfg.background = bg

    cfg.out_dir = _expect(doc, "out_dir", str, "out")
    cfg.prefix = _expect(doc, "prefix", str, "render")
    cfg.strict = _expect(doc, "strict", bool, True)

    mode = _expect(doc, "mode", str, "images")
    if mode not in MODES:
        raise ConfigError("mode", f"{mode!r} not one of: {', '.join(MODES)}")
    cfg.mode = mode

    anim = doc.get("animation_view")
    if anim is not None:
        try:
            anim = canonical_view(anim)
        except (UnknownView, TypeError):
            raise ConfigError("animation_view", f"{anim!r} is not a view") from None
    cfg.animation_view = anim

    fpt = _expect(doc, "fpt", int, 4)
    if fpt < 1:
        raise ConfigError("fpt", f"{fpt} must be >= 1")
    cfg.fpt = fpt
    delay = _expect(doc, "delay_cs", int, 50)
    if not 0 <= delay <= 0xFFFF:
        raise ConfigError("delay_cs", f"{delay} outside [0, 65535]")
    cfg.delay_cs = delay
    pad = _expect(doc, "montage_pad", int, 8)
    if pad < 0:
        raise ConfigError("montage_pad", f"{pad} must be >= 0")
    cfg.montage_pad = pad
    cfg.dither = _expect(doc, "dither", bool, False)
    return cfg


def load_config(path) -> Config:
    """Load and validate a config file; paths stay as written."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError("$", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"{path} is not valid JSON: {exc}") from None
    return validate_config_dict(doc)


def build_table(cfg: Config, manifest, csv_text: str):
    """Parse biomarker CSV per config (optionally log-normalized)."""
    k = len(cfg.colors) - 1
    table = parse_biomarker_csv(
        csv_text, manifest, k, strict=cfg.strict, raw=cfg.log_transform
    )
    if cfg.log_transform:
        table = table.log_normalized(fold_range=cfg.log_fold_range, ref=cfg.log_ref)
    return table


def build_render_job(cfg: Config, manifest, csv_text: str, output_prefix) -> RenderJob:
    return RenderJob(
        manifest=manifest,
        table=build_table(cfg, manifest, csv_text),
        gradient=ColorGradient.from_hex(cfg.colors),
        views=list(cfg.views),
        resolution=cfg.resolution,
        shell_alpha=cfg.shell_alpha,
        output_prefix=output_prefix,
        background=parse_hex_color(cfg.background),
    )
