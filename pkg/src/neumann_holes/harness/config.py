"""Experiment configuration files.

A config is a TOML document.  Lengths are in the units of the domain
coordinates; ε is the hole scale in the same units (circle radius, or the factor
applied to polygon vertices).

.. code-block:: toml

    [domain]
    shape = "rectangle"          # "rectangle" or "disk"
    bounds = [0.0, 1.0, 0.0, 1.189207115002721]   # x_min, x_max, y_min, y_max
    # center = [0.0, 0.0]        # disk only
    # radius = 1.0               # disk only

    [hole]
    shape = "circle"             # "circle" or "polygon"
    center = [0.5, 0.5946035575013605]
    # vertices = [[1, 0], [0, 1], [-1, 0], [0, -1]]   # polygon only, unit scale
    eps = [0.08, 0.06, 0.04, 0.03]                    # strictly decreasing

    [mode]
    n = 1                        # 0-based index; 0 is the constant mode

    [mesh]
    h0 = 0.05                    # coarsest target edge length
    levels = 3                   # nested uniform refinements used for extrapolation
    order = 2                    # 1 (P1) or 2 (P2)
    seed = 0

    [solver]
    tol = 1e-9                   # relative eigen-residual
    rel_gap_min = 1e-3           # simplicity gate

    [fit]
    model = "power"              # "power" or "power_log"

    [output]
    dir = "out"
"""
from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigError
from ..geometry import Circle, Disk, DomainSpec, HoleSpec, Polygon, Rectangle

FIT_MODELS = ("power", "power_log")


@dataclass(frozen=True)
class ExperimentConfig:
    outer: object
    hole_center: Tuple[float, float]
    eps: Tuple[float, ...]
    n: int
    hole_vertices: Optional[Tuple[Tuple[float, float], ...]] = None
    h0: float = 0.05
    levels: int = 3
    order: int = 2
    seed: int = 0
    tol: float = 1e-9
    rel_gap_min: float = 1e-3
    fit_model: str = "power"
    out_dir: str = "out"

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        object.__setattr__(self, "hole_center", tuple(float(c) for c in self.hole_center))
        self.validate()

    def validate(self) -> None:
        e = self.eps
        if len(e) < 4:
            raise ConfigError(f"need at least 4 eps values, got {len(e)}")
        if any(not (a > b) for a, b in zip(e, e[1:])) or e[-1] <= 0:
            raise ConfigError("eps list must be positive and strictly decreasing")
        if self.n < 1:
            raise ConfigError("mode index n must be >= 1 (n = 0 is the constant mode)")
        if self.levels < 3:
            raise ConfigError("extrapolation needs at least 3 mesh levels")
        if self.order not in (1, 2):
            raise ConfigError("element order must be 1 or 2")
        if not (self.h0 > 0 and math.isfinite(self.h0)):
            raise ConfigError("h0 must be positive")
        if self.fit_model not in FIT_MODELS:
            raise ConfigError(f"fit model must be one of {FIT_MODELS}")
        if not (self.tol > 0 and self.rel_gap_min > 0):
            raise ConfigError("tolerances must be positive")
        if not isinstance(self.outer, (Rectangle, Disk)):
            raise ConfigError("outer domain must be a rectangle or a disk")

    @property
    def hole_shape(self):
        return Circle() if self.hole_vertices is None else Polygon(tuple(map(tuple, self.hole_vertices)))

    def hole(self, eps: float) -> HoleSpec:
        return HoleSpec(self.hole_shape, self.hole_center, float(eps))

    def domain(self, eps: Optional[float]) -> DomainSpec:
        return DomainSpec(self.outer, None if eps is None else self.hole(eps))

    @property
    def extrapolation_order(self) -> float:
        """Observed convergence order of eigenvalues on perforated meshes.

        The hole boundary is polygonal, which limits P2 to second order as well.
        """
        return 2.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["outer"] = self.outer.to_dict()
        return d


def _outer_from_table(t: dict):
    shape = t.get("shape")
    if shape == "rectangle":
        b = t.get("bounds")
        if b is None or len(b) != 4:
            raise ConfigError("rectangle needs bounds = [x_min, x_max, y_min, y_max]")
        return Rectangle(*map(float, b))
    if shape == "disk":
        return Disk(tuple(map(float, t.get("center", (0.0, 0.0)))), float(t.get("radius", 1.0)))
    raise ConfigError(f"unknown domain shape {shape!r}")


def config_from_dict(d: dict) -> ExperimentConfig:
    try:
        dom, hole, mode = d["domain"], d["hole"], d["mode"]
    except KeyError as exc:
        raise ConfigError(f"missing section [{exc.args[0]}]") from None
    mesh, solver, fit, out = d.get("mesh", {}), d.get("solver", {}), d.get("fit", {}), d.get("output", {})
    shape = hole.get("shape", "circle")
    if shape not in ("circle", "polygon"):
        raise ConfigError(f"unknown hole shape {shape!r}")
    verts = None
    if shape == "polygon":
        if "vertices" not in hole:
            raise ConfigError("polygon hole needs vertices")
        verts = tuple(tuple(map(float, v)) for v in hole["vertices"])
    try:
        return ExperimentConfig(
            outer=_outer_from_table(dom),
            hole_center=tuple(hole["center"]),
            eps=tuple(hole["eps"]),
            n=int(mode["n"]),
            hole_vertices=verts,
            h0=float(mesh.get("h0", 0.05)),
            levels=int(mesh.get("levels", 3)),
            order=int(mesh.get("order", 2)),
            seed=int(mesh.get("seed", 0)),
            tol=float(solver.get("tol", 1e-9)),
            rel_gap_min=float(solver.get("rel_gap_min", 1e-3)),
            fit_model=str(fit.get("model", "power")),
            out_dir=str(out.get("dir", "out")),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed config: {exc}") from None


def load_config(path) -> ExperimentConfig:
    try:
        with open(Path(path), "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(data)


def loads_config(text: str) -> ExperimentConfig:
    try:
        return config_from_dict(tomllib.loads(text))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(exc)) from None
