"""Biomarker CSV ingestion, log-normalization and stage interpolation.

Input format (docs/csv.md): first header cell `Image-name-unique`, remaining
cells are region identifiers, optionally suffixed `-lh`/`-rh` to bind one
hemisphere.  Each following row is one stage: a label plus numeric values.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .colormap import OutOfRange

HEADER_CELL = "Image-name-unique"
HEMISPHERES = ("left", "right")

_SUFFIXES = {"-lh": "left", "-rh": "right"}


class BiomarkerError(Exception):
    """Malformed biomarker input."""


class BadHeader(BiomarkerError):
    """First header cell is not Image-name-unique."""


class UnknownRegion(BiomarkerError):
    """CSV column does not match any manifest region/hemisphere."""


class NonNumericValue(BiomarkerError):
    """A data cell does not parse as a number."""


class NegativeValue(BiomarkerError):
    """Raw value below zero fed to log normalization."""


@dataclass
class BiomarkerTable:
    """Ordered stages x (region, hemisphere) value matrix, values in [0, K]."""

    stages: list[str]
    per_stage: dict[str, dict[tuple[str, str], float]]
    k: int
    warnings: list[str] = field(default_factory=list)

    def value(self, stage: str, region_id: str, hemisphere: str) -> float:
        if stage not in self.per_stage:
            raise BiomarkerError(f"unknown stage {stage!r}")
        return self.per_stage[stage].get((region_id, hemisphere), 0.0)

    def stage_values(self, stage: str) -> dict[tuple[str, str], float]:
        if stage not in self.per_stage:
            raise BiomarkerError(f"unknown stage {stage!r}")
        return dict(self.per_stage[stage])

    def log_normalized(
        self, fold_range: float = 1000.0, ref: float | None = None
    ) -> "BiomarkerTable":
        """Log-normalize every value against the table-wide positive minimum."""
        pooled = {
            (stage, key): v
            for stage in self.stages
            for key, v in self.per_stage[stage].items()
        }
        normalized = log_normalize(pooled, fold_range=fold_range, k=self.k, ref=ref)
        per_stage: dict[str, dict[tuple[str, str], float]] = {
            s: {} for s in self.stages
        }
        for (stage, key), v in normalized.items():
            per_stage[stage][key] = v
        return BiomarkerTable(list(self.stages), per_stage, self.k, list(self.warnings))

    def to_csv(self) -> str:
        """Debug dump; reparsing preserves stage order and labels."""
        keys = sorted({k for s in self.stages for k in self.per_stage[s]})
        cols = [f"{r}-lh" if h == "left" else f"{r}-rh" for r, h in keys]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([HEADER_CELL] + cols)
        for stage in self.stages:
            row = [self.per_stage[stage].get(k, 0.0) for k in keys]
            writer.writerow([stage] + [repr(v) for v in row])
        return buf.getvalue()


def _manifest_hemispheres(manifest) -> dict[str, set[str]]:
    """region_id -> set of hemispheres it exists for ('both' expands)."""
    out: dict[str, set[str]] = {}
    for entry in manifest.regions:
        hemis = HEMISPHERES if entry.hemisphere == "both" else (entry.hemisphere,)
        out.setdefault(entry.region_id, set()).update(hemis)
    return out


def parse_biomarker_csv(
    text: str,
    manifest,
    k: int,
    strict: bool = True,
    raw: bool = False,
) -> BiomarkerTable:
    """Parse biomarker CSV against a manifest.

    Unsuffixed region columns fan out to both hemispheres; `-lh`/`-rh`
    columns bind one.  Regions present in the manifest but absent from the
    CSV default to 0.  Values outside [0, k] raise OutOfRange when strict,
    otherwise clamp with a recorded warning.  With raw=True the range check
    is skipped entirely (values are pre-normalization measurements).
    """
    rows = [r for r in csv.reader(io.StringIO(text.lstrip("﻿"))) if r]
    if not rows:
        raise BadHeader("empty CSV")
    header = [c.strip() for c in rows[0]]
    if header[0] != HEADER_CELL:
        raise BadHeader(f"first header cell must be {HEADER_CELL!r}, got {header[0]!r}")

    available = _manifest_hemispheres(manifest)
    warnings: list[str] = []

    # column index -> list of (region, hemisphere) targets (empty = ignored)
    targets: list[list[tuple[str, str]]] = []
    for col in header[1:]:
        base, hemis = col, list(HEMISPHERES)
        for suffix, hemi in _SUFFIXES.items():
            if col.endswith(suffix):
                base, hemis = col[: -len(suffix)], [hemi]
                break
        if base not in available:
            if strict:
                raise UnknownRegion(f"column {col!r}: no region {base!r} in manifest")
            warnings.append(f"ignoring column {col!r}: unknown region")
            targets.append([])
            continue
        usable = [h for h in hemis if h in available[base]]
        if not usable and strict:
            raise UnknownRegion(
                f"column {col!r}: region {base!r} has no {hemis[0]} hemisphere"
            )
        if len(usable) < len(hemis) and strict is False and not usable:
            warnings.append(f"ignoring column {col!r}: hemisphere not in manifest")
        targets.append([(base, h) for h in usable])

    stages: list[str] = []
    per_stage: dict[str, dict[tuple[str, str], float]] = {}
    for row in rows[1:]:
        if len(row) != len(header):
            raise BiomarkerError(
                f"row {row[0]!r} has {len(row)} cells, expected {len(header)}"
            )
        stage = row[0].strip()
        if stage in per_stage:
            raise BiomarkerError(f"duplicate stage label {stage!r}")
        values: dict[tuple[str, str], float] = {}
        for col_i, cell in enumerate(row[1:]):
            try:
                v = float(cell)
            except ValueError:
                raise NonNumericValue(
                    f"row {stage!r}, column {header[col_i + 1]!r}: {cell!r}"
                ) from None
            if not raw and (v < 0.0 or v > k):
                if strict:
                    raise OutOfRange(
                        f"row {stage!r}, column {header[col_i + 1]!r}: "
                        f"{v} outside [0, {k}]"
                    )
                clamped = min(max(v, 0.0), float(k))
                warnings.append(
                    f"clamped {v} to {clamped} at row {stage!r}, "
                    f"column {header[col_i + 1]!r}"
                )
                v = clamped
            for key in targets[col_i]:
                values[key] = v
        # regions not in the CSV render in the baseline anchor color
        for region, hemis in available.items():
            for h in hemis:
                values.setdefault((region, h), 0.0)
        stages.append(stage)
        per_stage[stage] = values

    return BiomarkerTable(stages, per_stage, k, warnings)


def log_normalize(
    raw: dict, fold_range: float = 1000.0, k: int = 3, ref: float | None = None
) -> dict:
    """Map positive raw values onto [0, k] over a log10 fold_range.

    v = k * clamp(log10(x / x_min), 0, log10(fold_range)) / log10(fold_range)
    where x_min is the smallest positive raw value (or `ref` when given).
    Zeros stay 0; negatives raise NegativeValue.
    """
    if fold_range <= 1.0:
        raise ValueError(f"fold_range must exceed 1, got {fold_range}")
    for key, v in raw.items():
        if v < 0.0:
            raise NegativeValue(f"negative value {v} at {key!r}")
    positives = [v for v in raw.values() if v > 0.0]
    if ref is not None:
        if ref <= 0.0:
            raise ValueError(f"log reference must be positive, got {ref}")
        x_min = float(ref)
    elif positives:
        x_min = min(positives)
    else:
        return {key: 0.0 for key in raw}

    span = math.log10(fold_range)
    out = {}
    for key, v in raw.items():
        if v <= 0.0:
            out[key] = 0.0
        else:
            t = min(max(math.log10(v / x_min), 0.0), span)
            out[key] = k * t / span
    return out


def interpolate_stages(
    table: BiomarkerTable, i: int, j: int, t: float
) -> dict[tuple[str, str], float]:
    """Linear per-key blend between stage i and stage j at parameter t."""
    if not (0 <= i < len(table.stages) and 0 <= j < len(table.stages)):
        raise BiomarkerError(f"stage index out of range: {i}, {j}")
    vi = table.per_stage[table.stages[i]]
    vj = table.per_stage[table.stages[j]]
    keys = set(vi) | set(vj)
    return {
        key: (1.0 - t) * vi.get(key, 0.0) + t * vj.get(key, 0.0) for key in keys
    }
