"""Closed-form connections with analytic transport oracles.

Every entry lists named paths and, for each, a function ``(s, t) -> H(t, s)``
evaluated without integrating anything. The listed paths are chosen so
the pulled-back coefficients are constant on each smooth piece; the
integrator is then exact up to rounding and the law suites can run at
tight tolerances with the default step count. Convergence studies
reparameterize a path by a cubic map so the coefficients vary along it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.linalg import expm as scipy_expm

from .errors import DomainError
from .gauge import PAULI, GaugePotential, su2_constant_potential, u1_uniform_potential
from .linear import (
    ChartConnection,
    ConnectionField,
    ConnectionTransport,
    IntegratorConfig,
    constant_connection,
    flat_connection,
    transport_matrix,
)
from .matrices import frob
from .paths import (
    Interval,
    PathSpec,
    circle_arc,
    cubic,
    latitude_arc,
    line_segment,
    polyline,
    reparameterize,
)

Oracle = Callable[[float, float], np.ndarray]

CONVERGENCE_STEPS = (250, 500, 1000, 2000)


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    """A connection, named test paths and the closed-form transport on each.

    ``pairs`` lists path names ``(g1, g2)`` whose canonical forms can be
    concatenated; ``loops`` lists closed paths; ``convergence_path`` names
    the path used for the integrator-order study.
    """

    name: str
    connection: ConnectionField
    paths: Mapping[str, PathSpec]
    oracles: Mapping[str, Oracle]
    potential: GaugePotential | None = None
    pairs: tuple[tuple[str, str], ...] = ()
    loops: tuple[str, ...] = ()
    convergence_path: str = ""
    params: dict = field(default_factory=dict)

    def path(self, label: str) -> PathSpec:
        try:
            return self.paths[label]
        except KeyError:
            raise KeyError(f"catalog entry {self.name!r} has no path {label!r}; "
                           f"available: {sorted(self.paths)}") from None

    def oracle(self, label: str, s: float, t: float) -> np.ndarray:
        """Closed-form ``H(t, s)`` on the named path."""
        self.path(label)
        return self.oracles[label](float(s), float(t))

    def whole_oracle(self, label: str) -> np.ndarray:
        a, b = self.path(label).domain
        return self.oracle(label, a, b)

    def transport(self, cfg: IntegratorConfig = IntegratorConfig()) -> ConnectionTransport:
        return ConnectionTransport(self.connection, cfg, name=self.name)

    def oracle_residual(self, label: str, s: float, t: float, cfg: IntegratorConfig = IntegratorConfig()) -> float:
        path = self.path(label)
        return frob(transport_matrix(self.connection, path, s, t, cfg) - self.oracle(label, s, t))


# --------------------------------------------------------------------------
# Helpers


def rotation_angle(M: np.ndarray) -> float:
    """Angle in ``[0, pi]`` of a matrix similar to a planar rotation.

    Read from the arguments of the eigenvalues ``exp(+-i angle)``, which do
    not change under a change of frame. Unlike ``acos`` of the half trace,
    this stays first-order accurate near ``0`` and ``pi``.
    """
    ev = np.linalg.eigvals(np.asarray(M, dtype=complex))
    return float(np.max(np.abs(np.angle(ev))))


def _cuts(path: PathSpec, s: float, t: float) -> list[float]:
    lo, hi = min(s, t), max(s, t)
    inner = [b for b in path.breakpoints if lo < b < hi]
    cuts = [lo] + inner + [hi]
    return cuts if s <= t else cuts[::-1]


def piecewise_oracle(path: PathSpec, piece: Callable[[np.ndarray, np.ndarray], np.ndarray], n: int,
                     dtype=float) -> Oracle:
    """Oracle for paths whose coefficients are constant on each smooth piece.

    ``piece(x0, x1)`` returns the transport across one piece from chart
    point ``x0`` to ``x1``; pieces are multiplied in the order traversed.
    """

    def oracle(s: float, t: float) -> np.ndarray:
        out = np.eye(n, dtype=dtype)
        cuts = _cuts(path, s, t)
        for u0, u1 in zip(cuts[:-1], cuts[1:]):
            out = piece(path(u0), path(u1)) @ out
        return out

    return oracle


def su2_exp(v) -> np.ndarray:
    """``exp((i/2) v . sigma)`` in closed form."""
    v = np.asarray(v, dtype=float)
    r = float(np.linalg.norm(v))
    if r == 0.0:
        return np.eye(2, dtype=complex)
    n = v / r
    return math.cos(r / 2) * np.eye(2) + 1j * math.sin(r / 2) * np.einsum("k,kij->ij", n, PAULI)


def _named(paths: Mapping[str, PathSpec]) -> dict[str, PathSpec]:
    return {k: p.relabel(k) for k, p in paths.items()}


# --------------------------------------------------------------------------
# Entries


def flat(n: int = 2) -> CatalogEntry:
    """Zero connection on the plane: every transport is the identity."""
    conn = flat_connection(n, chart_dim=2)
    paths = _named({
        "line": line_segment([0.0, 0.0], [1.0, 0.0]),
        "rise": line_segment([1.0, 0.0], [1.0, 1.0]),
        "circle": circle_arc([0.2, -0.1], 0.7),
        "square": polyline([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]]),
    })
    eye = np.eye(n)
    oracles = {k: (lambda s, t: eye.copy()) for k in paths}
    return CatalogEntry("flat", conn, paths, oracles, pairs=(("line", "rise"),), loops=("circle", "square"),
                        convergence_path="circle", params={"n": n})


DEFAULT_G0 = ((0.3, -1.1), (0.7, -0.2))


def constant_gamma(G0=DEFAULT_G0) -> CatalogEntry:
    """One-dimensional chart with constant coefficient ``G0``.

    Along any path ``x(s)`` the pulled-back coefficient is ``x'(s) G0``, so
    ``H(t, s) = exp(-(x(t) - x(s)) G0)``.
    """
    G0 = np.asarray(G0)
    conn = constant_connection(G0)
    paths = _named({
        "line": line_segment([0.0], [1.0]),
        "wide": line_segment([-0.5], [1.5], Interval(-1.0, 2.0)),
        "back": line_segment([1.0], [0.2]),
    })

    def make(path):
        return lambda s, t: scipy_expm(-(path(t)[0] - path(s)[0]) * G0)

    oracles = {k: make(p) for k, p in paths.items()}
    return CatalogEntry("constant_gamma", conn, paths, oracles, pairs=(("line", "back"),),
                        convergence_path="line", params={"G0": G0.tolist()})


def sphere_components(x: np.ndarray) -> np.ndarray:
    """Levi-Civita coefficients of the unit sphere in the chart ``(theta, phi)``.

    ``out[k, i, a, b] = Gamma^a_{b i}``: the matrix for chart direction ``i``.
    """
    th = x[:, 0]
    cot = np.cos(th) / np.sin(th)
    sc = np.sin(th) * np.cos(th)
    out = np.zeros((x.shape[0], 2, 2, 2))
    out[:, 0, 1, 1] = cot
    out[:, 1, 0, 1] = -sc
    out[:, 1, 1, 0] = cot
    return out


def sphere_levi_civita(theta0: float = math.pi / 3) -> CatalogEntry:
    """Round unit sphere, transported along arcs of the latitude ``theta0``.

    Along a latitude the coefficient is the constant ``M = A_phi(theta0)``
    with ``M^2 = -cos(theta0)^2 I``, so
    ``exp(-d M) = cos(c d) I - sin(c d)/c M`` with ``c = cos(theta0)``.
    Once round the circle the rotation angle is ``2 pi cos(theta0)``, the
    same holonomy as ``2 pi (1 - cos(theta0))`` up to orientation.
    """
    theta0 = float(theta0)
    if not 0.0 < theta0 < math.pi:
        raise DomainError("latitude must avoid the poles: need 0 < theta0 < pi")
    conn = ChartConnection(sphere_components, 2, 2, name="sphere_levi_civita")
    M = sphere_components(np.array([[theta0, 0.0]]))[0, 1]
    c = math.cos(theta0)
    paths = _named({
        "latitude": latitude_arc(theta0),
        "quarter": latitude_arc(theta0, Interval(0.0, math.pi / 2)),
        "next_quarter": latitude_arc(theta0, Interval(math.pi / 2, math.pi)),
    })

    def make(path):
        def oracle(s, t):
            d = path(t)[1] - path(s)[1]
            # sin(c d) / c written through sinc so the equator (c = 0) is covered.
            return math.cos(c * d) * np.eye(2) - d * np.sinc(c * d / math.pi) * M
        return oracle

    oracles = {k: make(p) for k, p in paths.items()}
    return CatalogEntry("sphere_levi_civita", conn, paths, oracles, pairs=(("quarter", "next_quarter"),),
                        loops=("latitude",), convergence_path="latitude", params={"theta0": theta0})


def sphere_holonomy_angle(theta0: float) -> float:
    """Rotation angle in ``[0, pi]`` of the holonomy round the latitude ``theta0``."""
    a = (2 * math.pi * (1 - math.cos(theta0))) % (2 * math.pi)
    return min(a, 2 * math.pi - a)


def u1_circle_integral(center, radius: float, s: float, t: float) -> float:
    """``int (x dy - y dx)`` along ``center + r (cos u, sin u)`` for ``u`` from ``s`` to ``t``."""
    cx, cy = center
    r = radius
    return r * r * (t - s) + r * (cx * (math.sin(t) - math.sin(s)) - cy * (math.cos(t) - math.cos(s)))


def u1_uniform(B: float = math.pi, radius: float = 1.0) -> CatalogEntry:
    """Uniform field strength ``B`` in the symmetric gauge.

    The linear transport is ``H(t, s) = exp(-i B/2 int_s^t (x dy - y dx))``;
    a straight piece contributes ``x0 x x1`` to the integral and a circle
    piece its closed form. The Wilson loop round a circle of radius ``r``
    centred at the origin is ``exp(i B pi r^2)``.
    """
    B = float(B)
    A = u1_uniform_potential(B)
    conn = A.connection()
    r = float(radius)
    paths = _named({
        "circle": circle_arc([0.0, 0.0], r),
        "line": line_segment([0.0, 0.5], [1.0, 0.0]),
        "rise": line_segment([1.0, 0.0], [1.0, 1.0]),
        "square": polyline([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]]),
    })

    def phase(integral):
        return np.array([[np.exp(-0.5j * B * integral)]])

    oracles = {"circle": lambda s, t: phase(u1_circle_integral((0.0, 0.0), r, s, t))}
    for k in ("line", "rise", "square"):
        oracles[k] = piecewise_oracle(paths[k], lambda x0, x1: phase(x0[0] * x1[1] - x0[1] * x1[0]), 1, complex)
    return CatalogEntry("u1_uniform", conn, paths, oracles, potential=A, pairs=(("line", "rise"),),
                        loops=("circle", "square"), convergence_path="circle", params={"B": B, "radius": r})


def u1_loop_phase(B: float, radius: float) -> float:
    return B * math.pi * radius**2


DEFAULT_SU2 = ((0.9, 0.0, 0.0), (0.0, 1.3, 0.0))


def su2_constant(a: Sequence[Sequence[float]] = DEFAULT_SU2) -> CatalogEntry:
    """Constant SU(2) potential ``A_i = (i/2) a_i . sigma`` on the plane.

    Across a straight piece from ``x0`` to ``x1`` the transport is
    ``exp(-(i/2) v . sigma)`` with ``v = sum_i (x1 - x0)^i a_i``; on
    polylines the pieces multiply in traversal order.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape != (2, 3):
        raise ValueError("su2_constant expects one 3-vector for each of the two chart directions")
    if not np.all(np.isfinite(a)):
        raise ValueError("su2 coefficients must be finite")
    A = su2_constant_potential(a)
    conn = A.connection()
    paths = _named({
        "e1": line_segment([0.0, 0.0], [1.0, 0.0]),
        "e2": line_segment([1.0, 0.0], [1.0, 1.0]),
        "diagonal": line_segment([0.0, 0.0], [0.7, -0.4]),
        "square": polyline([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]]),
    })

    def piece(x0, x1):
        return su2_exp(-(x1 - x0) @ a)

    oracles = {k: piecewise_oracle(p, piece, 2, complex) for k, p in paths.items()}
    return CatalogEntry("su2_constant", conn, paths, oracles, potential=A, pairs=(("e1", "e2"),),
                        loops=("square",), convergence_path="square", params={"a": a.tolist()})


CATALOG: dict[str, Callable[..., CatalogEntry]] = {
    "flat": flat,
    "constant_gamma": constant_gamma,
    "sphere_levi_civita": sphere_levi_civita,
    "u1_uniform": u1_uniform,
    "su2_constant": su2_constant,
}


def get_entry(name: str, **params) -> CatalogEntry:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; available: {sorted(CATALOG)}") from None
    return factory(**params)


def all_entries() -> list[CatalogEntry]:
    return [f() for f in CATALOG.values()]


# --------------------------------------------------------------------------
# Convergence


@dataclass(frozen=True)
class ConvergenceStudy:
    entry: str
    path: str
    steps: tuple[int, ...]
    residuals: tuple[float, ...]
    order: float | None

    @property
    def exact(self) -> bool:
        return self.order is None

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "path": self.path,
            "steps": list(self.steps),
            "residuals": list(self.residuals),
            "order": self.order,
            "exact": self.exact,
        }


EXACT_FLOOR = 1e-13


def fitted_order(steps: Sequence[int], residuals: Sequence[float]) -> float | None:
    """Least-squares slope of ``-log(residual)`` against ``log(steps)``; ``None`` when all residuals vanish."""
    r = np.asarray(residuals, dtype=float)
    if np.all(r <= EXACT_FLOOR):
        return None
    if np.any(r <= 0):
        raise ArithmeticError("cannot fit an order through zero residuals")
    slope = np.polyfit(np.log(np.asarray(steps, dtype=float)), np.log(r), 1)[0]
    return float(-slope)


def convergence_study(entry: CatalogEntry, steps: Sequence[int] = CONVERGENCE_STEPS,
                      scheme: str = "midpoint_magnus2", label: str | None = None) -> ConvergenceStudy:
    """Whole-path error against the oracle on the cubically reparameterized convergence path."""
    label = label or entry.convergence_path
    path = entry.path(label)
    tau = cubic(path.domain, path.domain, weight=0.5)
    moved = reparameterize(path, tau)
    a, b = path.domain
    ref = entry.oracle(label, a, b)
    res = []
    for n in steps:
        H = transport_matrix(entry.connection, moved, a, b, IntegratorConfig(steps=int(n), scheme=scheme))
        res.append(frob(H - ref))
    return ConvergenceStudy(entry.name, f"{label}o{tau.label}", tuple(int(n) for n in steps), tuple(res),
                            fitted_order(steps, res))


__all__ = [
    "CATALOG",
    "CatalogEntry",
    "ConvergenceStudy",
    "all_entries",
    "constant_gamma",
    "convergence_study",
    "fitted_order",
    "flat",
    "get_entry",
    "piecewise_oracle",
    "rotation_angle",
    "sphere_holonomy_angle",
    "sphere_levi_civita",
    "su2_constant",
    "su2_exp",
    "u1_circle_integral",
    "u1_loop_phase",
    "u1_uniform",
]
