"""Paths in a single chart R^m and the canonical operations on them.

A :class:`PathSpec` is an immutable wrapper around two vectorised callables:
``point_fn`` maps an array of parameters of shape ``(N,)`` to points of
shape ``(N, m)`` and ``velocity_fn`` returns the parameter derivative with the
same shapes. Calling a path with a scalar returns a single point of shape
``(m,)``.

Paths may be only piecewise C1. Parameters where the velocity may jump are
listed in ``breakpoints`` and integrators never step across them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, JunctionError

ArrayFn = Callable[[np.ndarray], np.ndarray]

POINT_TOL = 1e-9  # chart-coordinate tolerance for endpoint matching
_PARAM_SLACK = 1e-12


def _slack(a: float, b: float) -> float:
    return _PARAM_SLACK * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class Interval:
    """Closed real interval ``[a, b]`` with ``a <= b``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"interval endpoints must be finite, got [{a}, {b}]")
        if a > b:
            raise DomainError(f"interval requires a <= b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def degenerate(self) -> bool:
        return self.a == self.b

    def contains(self, s) -> bool:
        s = np.asarray(s, dtype=float)
        eps = _slack(self.a, self.b)
        return bool(np.all((s >= self.a - eps) & (s <= self.b + eps)))

    def contains_interval(self, other: "Interval") -> bool:
        return self.contains(other.a) and self.contains(other.b)

    def is_close(self, other: "Interval") -> bool:
        eps = _slack(min(self.a, other.a), max(self.b, other.b))
        return abs(self.a - other.a) <= eps and abs(self.b - other.b) <= eps

    def grid(self, n: int = 9) -> np.ndarray:
        return np.linspace(self.a, self.b, n)

    def __iter__(self):
        yield self.a
        yield self.b


UNIT = Interval(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class PathSpec:
    domain: Interval
    point_fn: ArrayFn
    dim: int
    velocity_fn: ArrayFn | None = None
    smoothness: str = "C1"
    breakpoints: tuple[float, ...] = ()
    label: str = ""
    descriptor: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.smoothness not in ("C0", "C1"):
            raise ValueError(f"smoothness must be 'C0' or 'C1', got {self.smoothness!r}")
        if self.smoothness == "C1" and self.velocity_fn is None:
            raise ValueError("a C1 path needs a velocity evaluator")
        a, b = self.domain
        bps = tuple(sorted(float(x) for x in self.breakpoints if a < x < b))
        object.__setattr__(self, "breakpoints", bps)

    def _params(self, s) -> tuple[np.ndarray, bool]:
        arr = np.asarray(s, dtype=float)
        if not self.domain.contains(arr):
            raise DomainError(f"parameter {s!r} outside path domain [{self.domain.a}, {self.domain.b}]")
        scalar = arr.ndim == 0
        arr = np.clip(np.atleast_1d(arr), self.domain.a, self.domain.b)
        return arr, scalar

    def __call__(self, s) -> np.ndarray:
        arr, scalar = self._params(s)
        pts = np.asarray(self.point_fn(arr), dtype=float).reshape(arr.shape[0], self.dim)
        return pts[0] if scalar else pts

    def velocity(self, s) -> np.ndarray:
        if self.velocity_fn is None:
            raise DomainError(f"path {self.label or '<anonymous>'} has no velocity evaluator")
        arr, scalar = self._params(s)
        vel = np.asarray(self.velocity_fn(arr), dtype=float).reshape(arr.shape[0], self.dim)
        return vel[0] if scalar else vel

    @property
    def start(self) -> np.ndarray:
        return self(self.domain.a)

    @property
    def end(self) -> np.ndarray:
        return self(self.domain.b)

    @property
    def is_closed(self) -> bool:
        return bool(np.linalg.norm(self.start - self.end) <= POINT_TOL)

    def relabel(self, label: str) -> "PathSpec":
        return replace(self, label=label)


# --------------------------------------------------------------------------
# Reparameterizations


@dataclass(frozen=True, eq=False)
class Reparameterization:
    """Strictly monotone C1 bijection ``tau: source -> target``."""

    source: Interval
    target: Interval
    fn: ArrayFn
    deriv: ArrayFn
    inverse: ArrayFn | None = None
    orientation: str = "preserving"
    label: str = ""

    def __post_init__(self):
        if self.orientation not in ("preserving", "reversing"):
            raise ValueError(f"orientation must be 'preserving' or 'reversing', got {self.orientation!r}")
        self.validate()

    def validate(self, samples: int = 65) -> None:
        src, tgt = self.source, self.target
        if src.degenerate or tgt.degenerate:
            if not (src.degenerate and tgt.degenerate):
                raise DomainError("a reparameterization cannot map a point onto an interval or back")
            return
        ends = self(np.array([src.a, src.b]))
        want = (tgt.a, tgt.b) if self.orientation == "preserving" else (tgt.b, tgt.a)
        eps = 1e-10 * max(1.0, abs(tgt.a), abs(tgt.b))
        if abs(ends[0] - want[0]) > eps or abs(ends[1] - want[1]) > eps:
            raise DomainError(f"reparameterization endpoints {ends.tolist()} do not map onto {list(want)}")
        grid = src.grid(samples)
        vals = self(grid)
        d = self.derivative(grid)
        sign = 1.0 if self.orientation == "preserving" else -1.0
        steps = sign * np.diff(vals)
        floor = 1e-9 * tgt.length / src.length
        if np.any(steps <= 0) or np.any(sign * d < floor):
            raise DomainError("reparameterization is not strictly monotone with derivative bounded away from 0")

    def __call__(self, s) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(s, dtype=float)), dtype=float)

    def derivative(self, s) -> np.ndarray:
        return np.asarray(self.deriv(np.asarray(s, dtype=float)), dtype=float)

    def invert(self, u) -> np.ndarray:
        """Source parameter mapped onto ``u``."""
        u = np.asarray(u, dtype=float)
        if self.inverse is not None:
            return np.asarray(self.inverse(u), dtype=float)
        return _bisect_inverse(self, u)


def _bisect_inverse(tau: Reparameterization, u: np.ndarray) -> np.ndarray:
    lo = np.full(u.shape, tau.source.a)
    hi = np.full(u.shape, tau.source.b)
    sign = 1.0 if tau.orientation == "preserving" else -1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = sign * (tau(mid) - u) < 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def identity_reparam(interval: Interval) -> Reparameterization:
    return Reparameterization(interval, interval, lambda s: s, lambda s: np.ones_like(s),
                              inverse=lambda u: u, label="identity")


def affine(source: Interval, target: Interval, reverse: bool = False) -> Reparameterization:
    """Affine bijection; orientation reversing when ``reverse`` is set."""
    if source.degenerate or target.degenerate:
        if not (source.degenerate and target.degenerate):
            raise DomainError("affine map between a point and a proper interval")
        t0 = target.a
        return Reparameterization(source, target, lambda s: np.full_like(s, t0), lambda s: np.ones_like(s),
                                  inverse=lambda u: np.full_like(u, source.a),
                                  orientation="reversing" if reverse else "preserving", label="affine")
    k = target.length / source.length
    if reverse:
        k = -k
        t0 = target.b
    else:
        t0 = target.a
    s0 = source.a
    return Reparameterization(
        source, target,
        lambda s: t0 + k * (s - s0),
        lambda s: np.full_like(s, k),
        inverse=lambda u: s0 + (u - t0) / k,
        orientation="reversing" if reverse else "preserving",
        label="affine_reversed" if reverse else "affine",
    )


def cubic(source: Interval, target: Interval, weight: float = 0.5, reverse: bool = False) -> Reparameterization:
    """Monotone cubic ``x -> (1-w) x + w x^3`` on normalised coordinates.

    The derivative stays in ``[1-w, 1+2w]`` times the length ratio, so
    ``0 <= w < 1`` keeps it bounded away from zero.
    """
    if not 0.0 <= weight < 1.0:
        raise DomainError(f"cubic weight must lie in [0, 1), got {weight}")
    if source.degenerate or target.degenerate:
        raise DomainError("cubic reparameterization needs proper intervals")
    w = float(weight)
    s0, L = source.a, source.length
    T = target.length

    def norm_fn(x):
        return (1 - w) * x + w * x**3

    def norm_inv(y):
        if w == 0.0:
            return y
        if w < 0.05:
            # nearly linear: Newton from x = y converges in a few steps, where
            # Cardano would overflow or cancel
            x = np.asarray(y, dtype=float)
            for _ in range(8):
                x = x - (norm_fn(x) - y) / ((1 - w) + 3 * w * x * x)
            return x
        # single real root of w x^3 + (1-w) x - y = 0 (Cardano, p > 0)
        p = (1 - w) / w
        q = -y / w
        disc = np.sqrt(q * q / 4 + p**3 / 27)
        x = np.cbrt(-q / 2 + disc) + np.cbrt(-q / 2 - disc)
        return x - (norm_fn(x) - y) / ((1 - w) + 3 * w * x * x)

    if reverse:
        fn = lambda s: target.b - T * norm_fn((s - s0) / L)
        deriv = lambda s: -T / L * ((1 - w) + 3 * w * ((s - s0) / L) ** 2)
        inv = lambda u: s0 + L * norm_inv((target.b - u) / T)
    else:
        fn = lambda s: target.a + T * norm_fn((s - s0) / L)
        deriv = lambda s: T / L * ((1 - w) + 3 * w * ((s - s0) / L) ** 2)
        inv = lambda u: s0 + L * norm_inv((u - target.a) / T)
    return Reparameterization(source, target, fn, deriv, inverse=inv,
                              orientation="reversing" if reverse else "preserving",
                              label="cubic_reversed" if reverse else "cubic")


def canonical_reverse_map(interval: Interval) -> Reparameterization:
    """``s -> a + b - s`` on ``[a, b]``."""
    a, b = interval
    r = Reparameterization(interval, interval, lambda s: a + b - s, lambda s: -np.ones_like(s),
                           inverse=lambda u: a + b - u,
                           orientation="reversing" if not interval.degenerate else "preserving",
                           label="canonical_reverse")
    return r


def compose_reparams(outer: Reparameterization, inner: Reparameterization) -> Reparameterization:
    """``outer o inner``; requires ``inner.target == outer.source``."""
    if not inner.target.is_close(outer.source):
        raise DomainError("cannot compose reparameterizations: intermediate intervals differ")
    flips = (outer.orientation == "reversing") != (inner.orientation == "reversing")
    return Reparameterization(
        inner.source, outer.target,
        lambda s: outer(inner(s)),
        lambda s: outer.derivative(inner(s)) * inner.derivative(s),
        inverse=lambda u: inner.invert(outer.invert(u)),
        orientation="reversing" if flips else "preserving",
        label=f"{outer.label}*{inner.label}",
    )


# --------------------------------------------------------------------------
# Canonical path operations


def restrict(path: PathSpec, sub: Interval) -> PathSpec:
    if not path.domain.contains_interval(sub):
        raise DomainError(f"[{sub.a}, {sub.b}] is not contained in [{path.domain.a}, {path.domain.b}]")
    sub = Interval(max(sub.a, path.domain.a), min(sub.b, path.domain.b))
    return PathSpec(sub, path.point_fn, path.dim, path.velocity_fn, path.smoothness,
                    path.breakpoints, label=f"{path.label}|[{sub.a:g},{sub.b:g}]")


def reverse_canonical(path: PathSpec) -> PathSpec:
    """``s -> path(a + b - s)`` on the same domain."""
    a, b = path.domain
    pf = path.point_fn
    vf = path.velocity_fn
    return PathSpec(
        path.domain,
        lambda s: pf(a + b - s),
        path.dim,
        None if vf is None else (lambda s: -vf(a + b - s)),
        path.smoothness,
        tuple(a + b - x for x in path.breakpoints),
        label=f"{path.label}_-",
    )


def concat_canonical(first: PathSpec, second: PathSpec, tol: float = POINT_TOL) -> PathSpec:
    """Canonical product: ``first(2s)`` on [0, 1/2], ``second(2s - 1)`` on [1/2, 1]."""
    for p in (first, second):
        if not p.domain.is_close(UNIT):
            raise DomainError(f"canonical product needs paths on [0, 1], got [{p.domain.a}, {p.domain.b}]")
    if first.dim != second.dim:
        raise JunctionError("paths live in charts of different dimension")
    gap = float(np.linalg.norm(first.end - second.start))
    if gap > tol:
        raise JunctionError(f"first path ends {gap:.3g} away from the start of the second")
    f1, f2 = first.point_fn, second.point_fn

    def point(s):
        left = s <= 0.5
        out = np.empty((s.shape[0], first.dim))
        out[left] = np.asarray(f1(np.minimum(2 * s[left], 1.0))).reshape(-1, first.dim)
        out[~left] = np.asarray(f2(np.maximum(2 * s[~left] - 1, 0.0))).reshape(-1, first.dim)
        return out

    joined_velocity = None
    smooth = "C0"
    if first.velocity_fn is not None and second.velocity_fn is not None:
        v1, v2 = first.velocity_fn, second.velocity_fn

        def velocity(s):
            left = s < 0.5
            out = np.empty((s.shape[0], first.dim))
            out[left] = 2 * np.asarray(v1(np.minimum(2 * s[left], 1.0))).reshape(-1, first.dim)
            out[~left] = 2 * np.asarray(v2(np.maximum(2 * s[~left] - 1, 0.0))).reshape(-1, first.dim)
            return out

        joined_velocity = velocity
        if first.smoothness == "C1" and second.smoothness == "C1":
            jump = np.linalg.norm(first.velocity(1.0) - second.velocity(0.0))
            if jump <= tol:
                smooth = "C1"
    bps = tuple(x / 2 for x in first.breakpoints) + (0.5,) + tuple((1 + x) / 2 for x in second.breakpoints)
    return PathSpec(UNIT, point, first.dim, joined_velocity, smooth, bps,
                    label=f"({first.label}*{second.label})")


def reparameterize(path: PathSpec, tau: Reparameterization) -> PathSpec:
    """``path o tau`` with domain ``tau.source``."""
    if not tau.target.is_close(path.domain):
        raise DomainError(
            f"reparameterization targets [{tau.target.a}, {tau.target.b}] "
            f"but the path lives on [{path.domain.a}, {path.domain.b}]"
        )
    lo, hi = path.domain

    def inside(u):
        return np.clip(u, lo, hi)

    pf, vf = path.point_fn, path.velocity_fn
    velocity = None
    if vf is not None:
        velocity = lambda s: tau.derivative(s)[:, None] * np.asarray(vf(inside(tau(s)))).reshape(s.shape[0], -1)
    bps = tuple(float(x) for x in np.atleast_1d(tau.invert(np.array(path.breakpoints)))) if path.breakpoints else ()
    return PathSpec(tau.source, lambda s: pf(inside(tau(s))), path.dim, velocity, path.smoothness, bps,
                    label=f"{path.label}o{tau.label}")


def point_path(x, a: float = 0.0) -> PathSpec:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    m = x.shape[0]
    return PathSpec(
        Interval(a, a),
        lambda s: np.broadcast_to(x, (s.shape[0], m)).copy(),
        m,
        lambda s: np.zeros((s.shape[0], m)),
        label="point",
        descriptor={"kind": "point", "point": x.tolist(), "at": float(a)},
    )


def canonicalize(path: PathSpec) -> PathSpec:
    """Affinely reparameterize a path onto [0, 1] (no-op if already there)."""
    if path.domain.is_close(UNIT):
        return path
    return reparameterize(path, affine(UNIT, path.domain)).relabel(path.label)


# --------------------------------------------------------------------------
# Analytic registry


def line_segment(start, end, domain: Interval = UNIT) -> PathSpec:
    p = np.asarray(start, dtype=float)
    q = np.asarray(end, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("line endpoints must be vectors of equal length")
    a, L = domain.a, domain.length
    d = (q - p) / L if L > 0 else np.zeros_like(p)
    return PathSpec(
        domain,
        lambda s: p + (s[:, None] - a) * d,
        p.shape[0],
        lambda s: np.broadcast_to(d, (s.shape[0], p.shape[0])).copy(),
        label="line",
        descriptor={"kind": "line", "start": p.tolist(), "end": q.tolist(), "domain": [domain.a, domain.b]},
    )


def circle_arc(center=(0.0, 0.0), radius: float = 1.0, domain: Interval = Interval(0.0, 2 * math.pi)) -> PathSpec:
    """Counter-clockwise circle ``center + r (cos s, sin s)``; the domain is the angle range."""
    c = np.asarray(center, dtype=float)
    if c.shape != (2,):
        raise ValueError("circle center must be a 2-vector")
    r = float(radius)
    if r <= 0:
        raise ValueError("circle radius must be positive")
    return PathSpec(
        domain,
        lambda s: c + r * np.stack([np.cos(s), np.sin(s)], axis=-1),
        2,
        lambda s: r * np.stack([-np.sin(s), np.cos(s)], axis=-1),
        label="circle",
        descriptor={"kind": "circle", "center": c.tolist(), "radius": r, "domain": [domain.a, domain.b]},
    )


def latitude_arc(theta0: float, domain: Interval = Interval(0.0, 2 * math.pi)) -> PathSpec:
    """Sphere latitude in chart coordinates ``(theta, phi) = (theta0, s)``."""
    th = float(theta0)
    return PathSpec(
        domain,
        lambda s: np.stack([np.full_like(s, th), s], axis=-1),
        2,
        lambda s: np.stack([np.zeros_like(s), np.ones_like(s)], axis=-1),
        label="latitude",
        descriptor={"kind": "latitude", "theta0": th, "domain": [domain.a, domain.b]},
    )


def longitude_arc(phi0: float, domain: Interval = Interval(0.25, math.pi - 0.25)) -> PathSpec:
    """Sphere meridian ``(theta, phi) = (s, phi0)``; keep the domain off the poles."""
    ph = float(phi0)
    return PathSpec(
        domain,
        lambda s: np.stack([s, np.full_like(s, ph)], axis=-1),
        2,
        lambda s: np.stack([np.ones_like(s), np.zeros_like(s)], axis=-1),
        label="longitude",
        descriptor={"kind": "longitude", "phi0": ph, "domain": [domain.a, domain.b]},
    )


def polyline(points, domain: Interval = UNIT) -> PathSpec:
    """Piecewise-linear path through ``points``, one equal parameter slice per segment."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] < 2:
        raise ValueError("a polyline needs at least two points")
    k = P.shape[0] - 1
    a, L = domain.a, domain.length
    if L <= 0:
        raise DomainError("a polyline needs a proper domain")
    D = np.diff(P, axis=0) * (k / L)

    def seg(s):
        return np.clip(np.floor((s - a) / L * k).astype(int), 0, k - 1)

    def point(s):
        i = seg(s)
        return P[i] + (s - a - i * L / k)[:, None] * D[i]

    return PathSpec(
        domain, point, P.shape[1], lambda s: D[seg(s)],
        smoothness="C0",
        breakpoints=tuple(a + L * j / k for j in range(1, k)),
        label="polyline",
        descriptor={"kind": "polyline", "points": P.tolist(), "domain": [domain.a, domain.b]},
    )


def sampled(table, interp: str = "cubic") -> PathSpec:
    """Path through rows ``[s, x_1, ..., x_m]``.

    ``interp="cubic"`` uses a not-a-knot cubic spline and its analytic
    derivative; ``"linear"`` gives a polyline in parameter space with
    breakpoints at the interior samples.
    """
    T = np.asarray(table, dtype=float)
    if T.ndim != 2 or T.shape[1] < 2 or T.shape[0] < 2:
        raise ValueError("sample table must have rows [s, x_1, ..., x_m] and at least two rows")
    s, X = T[:, 0], T[:, 1:]
    if np.any(np.diff(s) <= 0):
        raise ValueError("sample parameters must be strictly increasing")
    domain = Interval(s[0], s[-1])
    desc = {"kind": "samples", "points": T.tolist(), "interp": interp}
    if interp == "cubic":
        if T.shape[0] < 4:
            raise ValueError("cubic interpolation needs at least four samples")
        spline = CubicSpline(s, X, axis=0)
        dspline = spline.derivative()
        return PathSpec(domain, spline, X.shape[1], dspline, label="samples", descriptor=desc)
    if interp == "linear":
        D = np.diff(X, axis=0) / np.diff(s)[:, None]

        def seg(u):
            return np.clip(np.searchsorted(s, u, side="right") - 1, 0, len(s) - 2)

        return PathSpec(domain, lambda u: X[seg(u)] + (u - s[seg(u)])[:, None] * D[seg(u)], X.shape[1],
                        lambda u: D[seg(u)], smoothness="C0", breakpoints=tuple(s[1:-1]),
                        label="samples", descriptor=desc)
    raise ValueError(f"unknown interpolation rule {interp!r}")
