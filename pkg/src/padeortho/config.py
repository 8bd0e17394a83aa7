"""Experiment configuration: parsing, validation and serialization.

Configs are YAML (any JSON document is also accepted). Example::

    geometry: {kind: interval, endpoints: [-1, 1]}
    measure: chebyshev1
    function:
      poles:
        - {location: 1.5, coefficients: [-1]}
        - {location: 3.0, coefficients: [-1]}
      entire: none
    m: 1
    n: {start: 1, stop: 40, step: 1}      # stop is inclusive
    grid: {kind: interval, points: 201}
    fit_window: [10, 40]
    tolerances: {delta_rel: 0.05}
    output: {dir: out}

Complex numbers may be written as a real number, a ``[re, im]`` pair, or a
string such as ``"1+2j"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from .basis import Family, MeasureBasis
from .errors import ParseError, ValidationError
from .expansion import EntireKind, FunctionSpec, Pole, Singularity
from .geometry import Geometry, GeometryKind
from .rowseq import MAX_TRACKED, Tolerances

GRID_KINDS = ("interval", "segment", "circle", "disk", "points")


@dataclass(frozen=True)
class GridSpec:
    """Evaluation set K. ``interval`` spans E itself; the others are explicit."""

    kind: str = "interval"
    points: int = 201
    start: complex = -1.0
    stop: complex = 1.0
    radius: float = 0.5
    rings: int = 8
    values: tuple = ()

    def build(self, geometry: Geometry) -> np.ndarray:
        if self.kind == "interval":
            if geometry.kind is GeometryKind.UNIT_DISK:
                theta = 2 * np.pi * np.arange(self.points) / self.points
                return np.exp(1j * theta)
            return np.linspace(geometry.a, geometry.b, self.points).astype(complex)
        if self.kind == "segment":
            t = np.linspace(0.0, 1.0, self.points)
            return self.start + t * (self.stop - self.start)
        theta = 2 * np.pi * np.arange(self.points) / self.points
        if self.kind == "circle":
            return self.radius * np.exp(1j * theta)
        if self.kind == "disk":
            radii = self.radius * np.arange(1, self.rings + 1) / self.rings
            ring = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
            return np.concatenate([[0j], ring])
        return np.array(self.values, dtype=complex)


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: Geometry
    measure: Family
    function: FunctionSpec
    m: int
    n_start: int
    n_stop: int
    n_step: int = 1
    grid: GridSpec | None = None
    fit_window: tuple | None = None
    error_window: tuple | None = None
    tolerances: Tolerances = Tolerances()
    truncation: int | None = None
    output_dir: str | None = None
    coeffs_path: str | None = None
    source: str | None = field(default=None, compare=False, repr=False)

    @property
    def ns(self) -> list[int]:
        return list(range(self.n_start, self.n_stop + 1, self.n_step))

    @property
    def basis(self) -> MeasureBasis:
        return MeasureBasis(self.geometry, self.measure)

    @property
    def N(self) -> int:
        """Coefficient truncation order used for the sweep."""
        return self.truncation if self.truncation is not None else self.min_truncation + 2

    @property
    def min_truncation(self) -> int:
        bandwidth = 0 if self.measure is Family.CIRCLE_LEBESGUE else 1
        return self.n_stop + self.m + bandwidth * self.m

    def to_dict(self) -> dict:
        g = self.geometry
        geom = {"kind": g.kind.value}
        if g.kind is GeometryKind.INTERVAL:
            geom["endpoints"] = [g.a, g.b]
        func = {
            "poles": [
                {"location": _complex_out(p.location), "order": p.order,
                 "coefficients": [_complex_out(c) for c in p.coefficients]}
                for p in self.function.poles
            ],
            "entire": self.function.entire.value,
        }
        if self.function.entire is EntireKind.POLYNOMIAL:
            func["polynomial"] = [_complex_out(c) for c in self.function.polynomial]
        if self.function.declared_singularities is not None:
            func["singularities"] = [
                {"location": _complex_out(s.location), "level": s.level,
                 "order": s.order if s.order is not None else 1, "polar": s.order is not None}
                for s in self.function.declared_singularities
            ]
        out = {
            "geometry": geom,
            "measure": self.measure.value,
            "function": func,
            "m": self.m,
            "n": {"start": self.n_start, "stop": self.n_stop, "step": self.n_step},
        }
        if self.grid is not None:
            gr = self.grid
            grid = {"kind": gr.kind, "points": gr.points}
            if gr.kind == "segment":
                grid.update(start=_complex_out(gr.start), stop=_complex_out(gr.stop))
            elif gr.kind in ("circle", "disk"):
                grid["radius"] = gr.radius
                if gr.kind == "disk":
                    grid["rings"] = gr.rings
            elif gr.kind == "points":
                grid = {"kind": "points", "values": [_complex_out(v) for v in gr.values]}
            out["grid"] = grid
        if self.fit_window is not None:
            out["fit_window"] = list(self.fit_window)
        if self.error_window is not None:
            out["error_window"] = list(self.error_window)
        out["tolerances"] = {f.name: getattr(self.tolerances, f.name) for f in fields(Tolerances)}
        if self.truncation is not None:
            out["truncation"] = self.truncation
        output = {}
        if self.output_dir is not None:
            output["dir"] = self.output_dir
        if self.coeffs_path is not None:
            output["coeffs"] = self.coeffs_path
        if output:
            out["output"] = output
        return out

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _complex_out(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def _complex_in(value, path):
    if isinstance(value, bool):
        raise ParseError("expected a number", path)
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            pass
    raise ParseError(f"expected a complex number, got {value!r}", path)


def _int_in(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", path)
    if minimum is not None and value < minimum:
        raise ParseError(f"must be >= {minimum}", path)
    return value


def _float_in(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a real number, got {value!r}", path)
    return float(value)


def _mapping(value, path):
    if not isinstance(value, dict):
        raise ParseError("expected a mapping", path)
    return value


def _list(value, path):
    if not isinstance(value, list):
        raise ParseError("expected a list", path)
    return value


def _reject_unknown(d, allowed, path):
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ParseError(f"unknown key(s) {extra}", path)


def _window(value, path):
    w = _list(value, path)
    if len(w) != 2:
        raise ParseError("expected [lo, hi]", path)
    return (_int_in(w[0], f"{path}[0]", 0), _int_in(w[1], f"{path}[1]", 0))


def _parse_geometry(d) -> Geometry:
    d = _mapping(d, "geometry")
    _reject_unknown(d, {"kind", "endpoints"}, "geometry")
    kind = d.get("kind")
    if kind == "unit_disk":
        return Geometry.unit_disk()
    if kind == "interval":
        ends = _list(d.get("endpoints", [-1.0, 1.0]), "geometry.endpoints")
        if len(ends) != 2:
            raise ParseError("expected [a, b]", "geometry.endpoints")
        a, b = (_float_in(v, f"geometry.endpoints[{i}]") for i, v in enumerate(ends))
        if not a < b:
            raise ValidationError(f"geometry.endpoints: need a < b, got [{a}, {b}]")
        return Geometry.interval(a, b)
    raise ParseError(f"unknown kind {kind!r}; expected 'unit_disk' or 'interval'", "geometry.kind")


def _parse_function(d) -> FunctionSpec:
    d = _mapping(d, "function")
    _reject_unknown(d, {"poles", "entire", "polynomial", "singularities"}, "function")
    poles = []
    for i, p in enumerate(_list(d.get("poles", []), "function.poles")):
        path = f"function.poles[{i}]"
        p = _mapping(p, path)
        _reject_unknown(p, {"location", "order", "coefficients"}, path)
        if "location" not in p:
            raise ParseError("missing", f"{path}.location")
        loc = _complex_in(p["location"], f"{path}.location")
        coeffs = [_complex_in(c, f"{path}.coefficients[{j}]")
                  for j, c in enumerate(_list(p.get("coefficients", [-1.0]), f"{path}.coefficients"))]
        order = _int_in(p.get("order", len(coeffs)), f"{path}.order", 1)
        try:
            poles.append(Pole(loc, order, tuple(coeffs)))
        except ValueError as exc:
            raise ParseError(str(exc), path) from None
    entire = d.get("entire", "none")
    if entire is None:
        entire = "none"
    try:
        entire = EntireKind(entire)
    except ValueError:
        raise ParseError(f"unknown entire part {entire!r}", "function.entire") from None
    poly = ()
    if "polynomial" in d:
        if entire is not EntireKind.POLYNOMIAL:
            raise ParseError("given without entire: polynomial", "function.polynomial")
        poly = tuple(_complex_in(c, f"function.polynomial[{j}]")
                     for j, c in enumerate(_list(d["polynomial"], "function.polynomial")))
    sings = None
    if "singularities" in d:
        sings = []
        for i, s in enumerate(_list(d["singularities"], "function.singularities")):
            path = f"function.singularities[{i}]"
            s = _mapping(s, path)
            _reject_unknown(s, {"location", "level", "order", "polar"}, path)
            loc = _complex_in(s.get("location"), f"{path}.location")
            level = s.get("level")
            level = None if level is None else _float_in(level, f"{path}.level")
            polar = s.get("polar", True)
            if not isinstance(polar, bool):
                raise ParseError("expected true/false", f"{path}.polar")
            order = _int_in(s.get("order", 1), f"{path}.order", 1) if polar else None
            sings.append(Singularity(loc, level, order))
        sings = tuple(sings)
    return FunctionSpec(tuple(poles), entire, poly, sings)


def _parse_grid(d) -> GridSpec:
    d = _mapping(d, "grid")
    _reject_unknown(d, {"kind", "points", "start", "stop", "radius", "rings", "values"}, "grid")
    kind = d.get("kind", "interval")
    if kind not in GRID_KINDS:
        raise ParseError(f"unknown kind {kind!r}; expected one of {GRID_KINDS}", "grid.kind")
    if kind == "points":
        vals = tuple(_complex_in(v, f"grid.values[{i}]") for i, v in enumerate(_list(d.get("values"), "grid.values")))
        return GridSpec(kind="points", points=len(vals), values=vals)
    kw = {"kind": kind, "points": _int_in(d.get("points", 201), "grid.points", 1)}
    if kind == "segment":
        kw["start"] = _complex_in(d.get("start"), "grid.start")
        kw["stop"] = _complex_in(d.get("stop"), "grid.stop")
    if kind in ("circle", "disk"):
        kw["radius"] = _float_in(d.get("radius", 0.5), "grid.radius")
    if kind == "disk":
        kw["rings"] = _int_in(d.get("rings", 8), "grid.rings", 1)
    return GridSpec(**kw)


def _parse_tolerances(d) -> Tolerances:
    d = _mapping(d, "tolerances")
    names = {f.name for f in fields(Tolerances)}
    _reject_unknown(d, names, "tolerances")
    return Tolerances(**{k: _float_in(v, f"tolerances.{k}") for k, v in d.items()})


TOP_LEVEL = {"geometry", "measure", "function", "m", "n", "grid", "fit_window", "error_window",
             "tolerances", "truncation", "output"}


def parse_config(source) -> ExperimentConfig:
    """Parse and validate a config from a path or from YAML/JSON text."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
        text = Path(source).read_text()
    else:
        text = str(source)
    try:
        d = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"not valid YAML/JSON: {exc}") from None
    d = _mapping(d, "<root>")
    _reject_unknown(d, TOP_LEVEL, "<root>")
    for key in ("geometry", "measure", "function", "m", "n"):
        if key not in d:
            raise ParseError("missing", key)

    geometry = _parse_geometry(d["geometry"])
    try:
        measure = Family(d["measure"])
    except ValueError:
        raise ParseError(f"unknown measure {d['measure']!r}", "measure") from None
    function = _parse_function(d["function"])
    m = _int_in(d["m"], "m", 0)
    nd = _mapping(d["n"], "n")
    _reject_unknown(nd, {"start", "stop", "step"}, "n")
    n_start = _int_in(nd.get("start"), "n.start", 0)
    n_stop = _int_in(nd.get("stop"), "n.stop", 0)
    n_step = _int_in(nd.get("step", 1), "n.step", 1)
    grid = _parse_grid(d["grid"]) if "grid" in d else None
    fit_window = _window(d["fit_window"], "fit_window") if "fit_window" in d else None
    error_window = _window(d["error_window"], "error_window") if "error_window" in d else None
    tolerances = _parse_tolerances(d["tolerances"]) if "tolerances" in d else Tolerances()
    truncation = _int_in(d["truncation"], "truncation", 0) if "truncation" in d else None
    output = _mapping(d.get("output", {}), "output")
    _reject_unknown(output, {"dir", "coeffs"}, "output")

    cfg = ExperimentConfig(
        geometry=geometry, measure=measure, function=function, m=m,
        n_start=n_start, n_stop=n_stop, n_step=n_step, grid=grid,
        fit_window=fit_window, error_window=error_window, tolerances=tolerances,
        truncation=truncation, output_dir=output.get("dir"), coeffs_path=output.get("coeffs"),
        source=text,
    )
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    """Cross-field checks; raises ValidationError."""
    g = cfg.geometry
    try:
        MeasureBasis(g, cfg.measure)
    except ValueError as exc:
        raise ValidationError(f"measure: {exc}") from None
    for i, p in enumerate(cfg.function.poles):
        if g.contains(p.location):
            raise ValidationError(f"function.poles[{i}]: pole at {p.location} lies inside E")
    if cfg.n_start > cfg.n_stop:
        raise ValidationError(f"n: empty range start={cfg.n_start} > stop={cfg.n_stop}")
    if cfg.m > MAX_TRACKED:
        raise ValidationError(f"m: pole tracking supports m <= {MAX_TRACKED}")
    if cfg.truncation is not None and cfg.truncation < cfg.min_truncation:
        raise ValidationError(
            f"truncation: N={cfg.truncation} < n_stop + m + bandwidth*m = {cfg.min_truncation}"
        )
    for name in ("fit_window", "error_window"):
        w = getattr(cfg, name)
        if w is not None and w[0] > w[1]:
            raise ValidationError(f"{name}: empty window {list(w)}")
    if cfg.grid is not None:
        K = cfg.grid.build(g)
        if K.size == 0:
            raise ValidationError("grid: no points")
        for i, p in enumerate(cfg.function.poles):
            if np.min(np.abs(K - p.location)) < 1e-12:
                raise ValidationError(f"grid: contains the pole function.poles[{i}]")
        rho_m = cfg.function.rho(g, cfg.m)
        if not math.isinf(rho_m) and np.max(g.level_indicator(K)) >= rho_m:
            raise ValidationError(f"grid: K must lie inside the canonical domain of index rho_m = {rho_m:.6g}")
