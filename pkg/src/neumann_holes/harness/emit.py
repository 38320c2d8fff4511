"""Deterministic CSV, JSON and SVG output."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from ..analytic import disk_gamma_radii
from ..errors import IoError

SCHEMA_VERSION = 1
SWEEP_COLUMNS = ("eps", "lambda_eps", "delta_lambda", "error_bar")


def _num(v: float) -> str:
    return repr(float(v))


def sweep_csv(rows: Iterable) -> str:
    """CSV text with columns eps, lambda_eps, delta_lambda, error_bar."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([_num(getattr(r, c)) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def contour_csv(lines: Sequence[np.ndarray]) -> str:
    """x,y per vertex with a blank line between polylines."""
    out = ["x,y"]
    for k, line in enumerate(lines):
        if k:
            out.append("")
        out.extend(f"{_num(p[0])},{_num(p[1])}" for p in line)
    return "\n".join(out) + "\n"


def table_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def report_json(payload: dict) -> str:
    """JSON text with a top-level schema field and sorted keys."""
    doc = {"schema": SCHEMA_VERSION}
    doc.update(_jsonable(payload))
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Layer:
    """A set of polylines drawn in one style."""

    name: str
    lines: tuple
    stroke: str
    dash: Optional[str] = None
    width: float = 1.5


def _fmt(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def svg_document(layers: Sequence[Layer], bbox, size: int = 480, outline: Optional[np.ndarray] = None) -> str:
    """SVG with an explicit viewBox in data coordinates (y pointing up)."""
    x0, x1, y0, y1 = bbox
    w, h = x1 - x0, y1 - y0
    pad = 0.02 * max(w, h)
    vb = (x0 - pad, -(y1 + pad), w + 2 * pad, h + 2 * pad)
    height = int(round(size * vb[3] / vb[2]))
    scale = vb[2] / size
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{height}" '
        f'viewBox="{" ".join(_fmt(v) for v in vb)}">',
    ]

    def path(line, stroke, dash, width, cls):
        d = "M " + " L ".join(f"{_fmt(p[0])} {_fmt(-p[1])}" for p in line)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        return (f'  <path class="{cls}" d="{d}" fill="none" stroke="{stroke}" '
                f'stroke-width="{_fmt(width * scale)}"{extra}/>')

    if outline is not None:
        parts.append(path(outline, "#000000", None, 1.0, "boundary"))
    for layer in layers:
        parts.append(f'  <g id="{layer.name}">')
        for line in layer.lines:
            parts.append("  " + path(line, layer.stroke, layer.dash, layer.width, layer.name))
        parts.append("  </g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def circle_polyline(center, r: float, n: int = 256) -> np.ndarray:
    t = 2 * np.pi * np.arange(n + 1) / n
    return np.column_stack([center[0] + r * np.cos(t), center[1] + r * np.sin(t)])


def disk_figure(phi, gamma_radii: Sequence[float], nodal_radii: Sequence[float]) -> str:
    """Γ circles (dashed red) and nodal circles (solid blue) of a radial disk mode."""
    c, R = phi.center, phi.R
    layers = [
        Layer("gamma", tuple(circle_polyline(c, r) for r in gamma_radii), "#c0392b", "0.05 0.03"),
        Layer("nodal", tuple(circle_polyline(c, r) for r in nodal_radii), "#1f4e9c"),
    ]
    return svg_document(layers, phi.bbox, outline=circle_polyline(c, R))


def contour_figure(phi, gamma_lines, nodal_lines) -> str:
    """Γ polylines and nodal polylines of a planar mode over its domain."""
    x0, x1, y0, y1 = phi.bbox
    outline = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]])
    layers = [Layer("gamma", tuple(gamma_lines), "#c0392b", "0.05 0.03"),
              Layer("nodal", tuple(nodal_lines), "#1f4e9c")]
    return svg_document(layers, phi.bbox, outline=outline)


def write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def emit(obj_text: str, out_dir, name: str) -> Path:
    """Write already rendered ``obj_text`` to ``out_dir/name``."""
    return write_text(Path(out_dir) / name, obj_text)


def disk_gamma_rows(modes) -> List[list]:
    """Rows (k, alpha, kind, radius) for radial disk modes."""
    rows = []
    for phi in modes:
        for r in disk_gamma_radii(phi):
            rows.append([phi.k, phi.alpha, "gamma", float(r)])
        for r in phi.nodal_radii():
            rows.append([phi.k, phi.alpha, "nodal", float(r)])
    return rows
