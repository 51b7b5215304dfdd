"""JSON descriptors for paths, connections, potentials and run configurations.

Descriptors are pydantic models; ``build_*`` functions turn them into
library objects. Paths can be composed from other path descriptors
(reverse, canonical product, restriction, reparameterization).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import catalog
from .gauge import GaugePotential, su2_constant_potential, u1_uniform_potential
from .linear import ConnectionField, IntegratorConfig, SCHEMES, constant_connection, flat_connection
from .paths import (
    Interval,
    PathSpec,
    Reparameterization,
    affine,
    canonicalize,
    circle_arc,
    concat_canonical,
    cubic,
    latitude_arc,
    line_segment,
    longitude_arc,
    point_path,
    polyline,
    reparameterize,
    restrict,
    reverse_canonical,
    sampled,
)
from .report import SCHEMA_VERSION

Domain = Annotated[list[float], Field(min_length=2, max_length=2)]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _interval(d) -> Interval:
    return Interval(float(d[0]), float(d[1]))


# --------------------------------------------------------------------------
# Paths


class LinePath(_Model):
    kind: Literal["line"]
    start: list[float]
    end: list[float]
    domain: Domain = [0.0, 1.0]


class CirclePath(_Model):
    kind: Literal["circle"]
    center: Annotated[list[float], Field(min_length=2, max_length=2)] = [0.0, 0.0]
    radius: float = Field(1.0, gt=0)
    domain: Domain = [0.0, 6.283185307179586]


class LatitudePath(_Model):
    kind: Literal["latitude"]
    theta0: float
    domain: Domain = [0.0, 6.283185307179586]


class LongitudePath(_Model):
    kind: Literal["longitude"]
    phi0: float
    domain: Domain = [0.25, 2.891592653589793]


class PolylinePath(_Model):
    kind: Literal["polyline"]
    points: list[list[float]] = Field(min_length=2)
    domain: Domain = [0.0, 1.0]


class PointPath(_Model):
    kind: Literal["point"]
    point: list[float]
    at: float = 0.0


class SampledPath(_Model):
    kind: Literal["samples"]
    points: list[list[float]] = Field(min_length=2, description="rows [s, x_1, ..., x_m]")
    interp: Literal["cubic", "linear"] = "cubic"


class ReparamDescriptor(_Model):
    """Map from ``source`` onto the domain of the path it is applied to."""

    kind: Literal["affine", "cubic"]
    source: Domain
    weight: float = Field(0.5, ge=0.0, lt=1.0)
    reverse: bool = False


class ReversePath(_Model):
    kind: Literal["reverse"]
    path: "PathDescriptor"


class ConcatPath(_Model):
    kind: Literal["concat"]
    first: "PathDescriptor"
    second: "PathDescriptor"


class RestrictPath(_Model):
    kind: Literal["restrict"]
    path: "PathDescriptor"
    domain: Domain


class ReparamPath(_Model):
    kind: Literal["reparam"]
    path: "PathDescriptor"
    tau: ReparamDescriptor


class CatalogPath(_Model):
    """A path listed by a catalog entry, e.g. ``{"kind": "catalog", "entry": "u1_uniform", "name": "circle"}``."""

    kind: Literal["catalog"]
    entry: str
    name: str


PathDescriptor = Annotated[
    Union[LinePath, CirclePath, LatitudePath, LongitudePath, PolylinePath, PointPath, SampledPath,
          ReversePath, ConcatPath, RestrictPath, ReparamPath, CatalogPath],
    Field(discriminator="kind"),
]

for _m in (ReversePath, ConcatPath, RestrictPath, ReparamPath):
    _m.model_rebuild()


def build_reparam(d: ReparamDescriptor, target: Interval) -> Reparameterization:
    src = _interval(d.source)
    if d.kind == "affine":
        return affine(src, target, reverse=d.reverse)
    return cubic(src, target, weight=d.weight, reverse=d.reverse)


def build_path(d) -> PathSpec:
    """Library path for a descriptor (a model instance or plain dict)."""
    if isinstance(d, dict):
        d = PathModel.model_validate({"path": d}).path
    k = d.kind
    if k == "line":
        return line_segment(d.start, d.end, _interval(d.domain))
    if k == "circle":
        return circle_arc(d.center, d.radius, _interval(d.domain))
    if k == "latitude":
        return latitude_arc(d.theta0, _interval(d.domain))
    if k == "longitude":
        return longitude_arc(d.phi0, _interval(d.domain))
    if k == "polyline":
        return polyline(d.points, _interval(d.domain))
    if k == "point":
        return point_path(d.point, d.at)
    if k == "samples":
        return sampled(d.points, d.interp)
    if k == "reverse":
        return reverse_canonical(build_path(d.path))
    if k == "concat":
        return concat_canonical(canonicalize(build_path(d.first)), canonicalize(build_path(d.second)))
    if k == "restrict":
        return restrict(build_path(d.path), _interval(d.domain))
    if k == "reparam":
        inner = build_path(d.path)
        return reparameterize(inner, build_reparam(d.tau, inner.domain))
    if k == "catalog":
        return catalog.get_entry(d.entry).path(d.name)
    raise ValueError(f"unknown path kind {k!r}")


class PathModel(_Model):
    path: PathDescriptor


# --------------------------------------------------------------------------
# Connections and potentials


class FlatConnection(_Model):
    kind: Literal["flat"]
    n: int = Field(2, ge=1)
    chart_dim: int = Field(2, ge=1)


class ConstantConnection(_Model):
    kind: Literal["constant"]
    G0: list[list[float]]

    @field_validator("G0")
    @classmethod
    def _square(cls, v):
        if not v or any(len(row) != len(v) for row in v):
            raise ValueError("G0 must be a non-empty square matrix")
        return v


class SphereConnection(_Model):
    kind: Literal["sphere_levi_civita"]


class U1Connection(_Model):
    kind: Literal["u1_uniform"]
    B: float


class SU2Connection(_Model):
    kind: Literal["su2_constant"]
    a: list[Annotated[list[float], Field(min_length=3, max_length=3)]] = Field(min_length=1)


ConnectionDescriptor = Annotated[
    Union[FlatConnection, ConstantConnection, SphereConnection, U1Connection, SU2Connection],
    Field(discriminator="kind"),
]


class ConnectionModel(_Model):
    connection: ConnectionDescriptor


def build_connection(d) -> ConnectionField:
    if isinstance(d, dict):
        d = ConnectionModel.model_validate({"connection": d}).connection
    if d.kind == "flat":
        return flat_connection(d.n, d.chart_dim)
    if d.kind == "constant":
        return constant_connection(d.G0)
    if d.kind == "sphere_levi_civita":
        return catalog.sphere_levi_civita().connection
    if d.kind == "u1_uniform":
        return u1_uniform_potential(d.B).connection()
    if d.kind == "su2_constant":
        return su2_constant_potential(d.a).connection()
    raise ValueError(f"unknown connection kind {d.kind!r}")


class PotentialDescriptor(_Model):
    group: Literal["U1", "SU2"]
    kind: Literal["u1_uniform", "su2_constant"]
    B: Optional[float] = None
    a: Optional[list[Annotated[list[float], Field(min_length=3, max_length=3)]]] = None

    @model_validator(mode="after")
    def _consistent(self):
        if self.kind == "u1_uniform":
            if self.group != "U1" or self.B is None:
                raise ValueError("u1_uniform needs group U1 and a field strength B")
        elif self.group != "SU2" or not self.a:
            raise ValueError("su2_constant needs group SU2 and coefficients a")
        return self


def build_potential(d) -> GaugePotential:
    if isinstance(d, dict):
        d = PotentialDescriptor.model_validate(d)
    if d.kind == "u1_uniform":
        return u1_uniform_potential(d.B)
    return su2_constant_potential(d.a)


# --------------------------------------------------------------------------
# Run configuration


class IntegratorDescriptor(_Model):
    steps: int = Field(2000, ge=1)
    scheme: str = "midpoint_magnus2"
    reunitarize: bool = False
    reverse: Literal["invert", "direct"] = "invert"

    @field_validator("scheme")
    @classmethod
    def _scheme(cls, v):
        if v not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        return v

    def build(self) -> IntegratorConfig:
        return IntegratorConfig(self.steps, self.scheme, self.reunitarize, self.reverse)


COMMANDS = ("transport", "wilson", "laws", "roundtrip", "convergence")
SUITE_NAMES = ("groupoid", "locality", "chain", "axioms", "reconstruction", "roundtrip", "gauge", "tensor")


class RunConfig(_Model):
    """Everything a CLI run needs; flags override these fields."""

    schema_version: int = SCHEMA_VERSION
    command: Literal["transport", "wilson", "laws", "roundtrip", "convergence"]
    entry: Optional[str] = None
    entry_params: dict = Field(default_factory=dict)
    path: Optional[PathDescriptor] = None
    path_name: Optional[str] = None
    connection: Optional[ConnectionDescriptor] = None
    potential: Optional[PotentialDescriptor] = None
    mock: Optional[Literal["path_global", "speed_blind"]] = None
    suites: list[Literal["groupoid", "locality", "chain", "axioms", "reconstruction", "roundtrip", "gauge",
                         "tensor"]] = Field(default_factory=lambda: ["groupoid", "locality"])
    s: Optional[float] = None
    t: Optional[float] = None
    grid: int = Field(9, ge=2)
    tol: Optional[float] = Field(None, gt=0, description="overrides each suite's main tolerance")
    steps_list: list[Annotated[int, Field(ge=1)]] = Field(default_factory=lambda: [250, 500, 1000, 2000],
                                                          min_length=2)
    integrator: IntegratorDescriptor = Field(default_factory=IntegratorDescriptor)
    format: Literal["json", "csv"] = "json"
    out: Optional[str] = None

    @field_validator("schema_version")
    @classmethod
    def _version(cls, v):
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {v}; this build reads {SCHEMA_VERSION}")
        return v

    @model_validator(mode="after")
    def _resolvable(self):
        if self.entry is not None and self.entry not in catalog.CATALOG:
            raise ValueError(f"unknown catalog entry {self.entry!r}; available: {sorted(catalog.CATALOG)}")
        return self


# --------------------------------------------------------------------------
# Report schema (documentation of the emitted JSON)


class RowModel(_Model):
    law: str
    path: str
    s: Union[float, str]
    t: Union[float, str]
    via: list[float]
    residual: Union[float, str]
    tol: Union[float, str]
    pass_: bool = Field(alias="pass")
    informational: bool


class LawSummaryModel(_Model):
    law: str
    max_residual: Union[float, str]
    witness: Optional[RowModel]
    count: int
    passed: bool


class ReportModel(_Model):
    schema_version: int
    report: str
    passed: bool
    laws: list[LawSummaryModel]
    rows: list[RowModel]


SCHEMA_MODELS = {
    "path": PathModel,
    "connection": ConnectionModel,
    "potential": PotentialDescriptor,
    "run_config": RunConfig,
    "report": ReportModel,
}


def schema_documents() -> dict[str, dict]:
    out = {}
    for name, model in SCHEMA_MODELS.items():
        doc = model.model_json_schema(by_alias=True)
        doc["$id"] = f"pathtransport/{name}.schema.json"
        doc["x-schema-version"] = SCHEMA_VERSION
        out[name] = doc
    return out


def write_schemas(directory: str | Path) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    for name, doc in schema_documents().items():
        p = d / f"{name}.schema.json"
        p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        written.append(p)
    return written
