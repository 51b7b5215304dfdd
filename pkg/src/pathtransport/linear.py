"""Linear transports generated by connection coefficients.

Along a path ``gamma`` with coefficient matrix ``Gamma(u)`` the transport
matrix ``H(t, s)`` (fibre over ``gamma(s)`` to fibre over ``gamma(t)``)
solves::

    dU/du = -Gamma(u) U,    U(s) = I,    H(t, s) = U(t)

which is what one gets by differentiating the frame representation
``H(u, s) = F(u)^{-1} F(s)`` with ``Gamma(u) = F(u)^{-1} F'(u)``.

The default integrator is the second-order midpoint Magnus scheme: one
exponential ``exp(-Gamma(u_mid) du)`` per step, multiplied in order.
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, NonFiniteError, TransportError
from .matrices import closest_unitary, expm, ordered_product
from .paths import PathSpec, Reparameterization
from .transport import TransportFamily, TransportMatrix, inverse_matrix

SCHEMES = ("midpoint_magnus2", "product_of_exponentials")
FD_STEP = 1e-4
FD_MIN_STEP = 1e-7


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings.

    ``steps`` is the number of steps used for one integration over
    ``[s, t]``, shared among the smooth pieces of the path in proportion
    to their length (at least one per piece). ``reverse`` selects how
    ``t < s`` is handled: ``"invert"`` integrates ``t -> s`` and inverts,
    ``"direct"`` steps backwards.
    """

    steps: int = 2000
    scheme: str = "midpoint_magnus2"
    reunitarize: bool = False
    reverse: str = "invert"

    def __post_init__(self):
        if int(self.steps) < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.reverse not in ("invert", "direct"):
            raise ValueError(f"reverse must be 'invert' or 'direct', got {self.reverse!r}")
        object.__setattr__(self, "steps", int(self.steps))


# --------------------------------------------------------------------------
# Connection fields


class ConnectionField:
    """Produces the coefficient matrices ``Gamma_gamma(s)`` along a path."""

    fibre_dim: int
    dtype = float
    name = "connection"

    def coefficients(self, path: PathSpec, s: np.ndarray) -> np.ndarray:
        """Stack of shape ``(len(s), n, n)``."""
        raise NotImplementedError

    def at(self, path: PathSpec, s: float) -> np.ndarray:
        return self.coefficients(path, np.array([float(s)]))[0]


class ChartConnection(ConnectionField):
    """Connection given by chart-level matrices ``A_i(x)``, one per chart direction.

    Pulled back along a path as ``Gamma(s) = sum_i A_i(gamma(s)) dgamma^i/ds``,
    which transforms covariantly under any change of parameter.
    ``components`` maps points of shape ``(N, m)`` to ``(N, m, n, n)``.
    """

    def __init__(self, components: Callable[[np.ndarray], np.ndarray], fibre_dim: int, chart_dim: int,
                 dtype=float, name: str = "chart_connection"):
        self.components = components
        self.fibre_dim = int(fibre_dim)
        self.chart_dim = int(chart_dim)
        self.dtype = dtype
        self.name = name

    def potential(self, x) -> np.ndarray:
        """``A_i(x)`` for a single point, shape ``(m, n, n)``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.asarray(self.components(x))[0]

    def coefficients(self, path, s):
        if path.dim != self.chart_dim:
            raise DomainError(f"{self.name} lives on a {self.chart_dim}-dimensional chart, path has dimension {path.dim}")
        s = np.atleast_1d(np.asarray(s, dtype=float))
        A = np.asarray(self.components(path(s)))
        v = path.velocity(s)
        return np.einsum("kmij,km->kij", A, v)


class AlongPathConnection(ConnectionField):
    """Coefficients given directly as ``fn(path, s) -> (N, n, n)``."""

    def __init__(self, fn: Callable[[PathSpec, np.ndarray], np.ndarray], fibre_dim: int, dtype=float,
                 name: str = "path_connection"):
        self.fn = fn
        self.fibre_dim = int(fibre_dim)
        self.dtype = dtype
        self.name = name

    def coefficients(self, path, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.asarray(self.fn(path, s))


def flat_connection(n: int = 2, chart_dim: int = 1) -> ChartConnection:
    def comps(x):
        return np.zeros((x.shape[0], chart_dim, n, n))

    return ChartConnection(comps, n, chart_dim, name="flat")


def constant_connection(G0) -> ChartConnection:
    """One-dimensional chart with ``A_1 = G0``: along ``gamma(s) = s`` the coefficient is ``G0``."""
    G0 = np.asarray(G0)
    if G0.ndim != 2 or G0.shape[0] != G0.shape[1]:
        raise ValueError("constant coefficient must be a square matrix")
    if not np.all(np.isfinite(G0)):
        raise ValueError("constant coefficient must be finite")
    n = G0.shape[0]

    def comps(x):
        return np.broadcast_to(G0, (x.shape[0], 1, n, n))

    return ChartConnection(comps, n, 1, dtype=G0.dtype, name="constant")


def reparam_coefficients(conn: ConnectionField, path: PathSpec, tau: Reparameterization) -> AlongPathConnection:
    """Coefficient field of ``path o tau``: ``s -> tau'(s) Gamma_path(tau(s))``."""
    if not tau.target.is_close(path.domain):
        raise DomainError("reparameterization does not target the path domain")
    lo, hi = path.domain

    def fn(_moved, s):
        return tau.derivative(s)[:, None, None] * conn.coefficients(path, np.clip(tau(s), lo, hi))

    return AlongPathConnection(fn, conn.fibre_dim, conn.dtype, name=f"{conn.name}o{tau.label}")


# --------------------------------------------------------------------------
# Integration


def _step_grid(path: PathSpec, s: float, t: float, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Left ends and widths of the forward steps over ``[s, t]`` (``s < t``)."""
    cuts = [s] + [b for b in path.breakpoints if s < b < t] + [t]
    lengths = np.diff(cuts)
    counts = np.maximum(1, np.rint(steps * lengths / (t - s)).astype(int))
    lefts, widths = [], []
    for u0, u1, k in zip(cuts[:-1], cuts[1:], counts):
        edges = np.linspace(u0, u1, k + 1)
        lefts.append(edges[:-1])
        widths.append(np.diff(edges))
    return np.concatenate(lefts), np.concatenate(widths)


def _factors(conn: ConnectionField, path: PathSpec, s: float, t: float, cfg: IntegratorConfig) -> np.ndarray:
    """Per-step propagators from ``s`` towards ``t`` in time order (first step first)."""
    forward = s < t
    lo, hi = (s, t) if forward else (t, s)
    left, width = _step_grid(path, lo, hi, cfg.steps)
    if cfg.scheme == "midpoint_magnus2":
        nodes = left + 0.5 * width
    elif forward:
        nodes = left
    else:
        nodes = left + width
    G = conn.coefficients(path, nodes)
    if not np.all(np.isfinite(G)):
        raise NonFiniteError(f"non-finite connection coefficients along {path.label or 'path'}")
    du = width if forward else -width
    F = expm(-G * du[:, None, None])
    if not forward:
        F = F[::-1]
    if cfg.reunitarize:
        F = closest_unitary(F)
    return F


def _propagate(conn, path, s, t, cfg) -> np.ndarray:
    F = _factors(conn, path, s, t, cfg)
    H = ordered_product(F, closest_unitary if cfg.reunitarize else None)
    if not np.all(np.isfinite(H)):
        raise NonFiniteError("transport matrix overflowed")
    return H


def _check_params(path: PathSpec, *params: float) -> None:
    for x in params:
        if not path.domain.contains(x):
            raise DomainError(f"parameter {x} outside [{path.domain.a}, {path.domain.b}]")


def transport_matrix(conn: ConnectionField, path: PathSpec, s: float, t: float,
                     cfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Bare-matrix form of :func:`integrate_transport`."""
    _check_params(path, s, t)
    s, t = float(s), float(t)
    n = conn.fibre_dim
    if s == t:
        return np.eye(n, dtype=np.result_type(conn.dtype, float))
    if t < s and cfg.reverse == "invert":
        return inverse_matrix(_propagate(conn, path, t, s, cfg), "transport matrix")
    return _propagate(conn, path, s, t, cfg)


def integrate_transport(conn: ConnectionField, path: PathSpec, s: float, t: float,
                        cfg: IntegratorConfig = IntegratorConfig()) -> TransportMatrix:
    """Transport matrix ``H(t, s; path)`` obtained by integrating the coefficient ODE."""
    return TransportMatrix(s, t, transport_matrix(conn, path, s, t, cfg))


def integrate_trajectory(conn: ConnectionField, path: PathSpec, s: float, t: float,
                         cfg: IntegratorConfig = IntegratorConfig()) -> tuple[np.ndarray, np.ndarray]:
    """Step-by-step solution: parameters ``u_k`` and ``H(u_k, s)`` for every step."""
    _check_params(path, s, t)
    s, t = float(s), float(t)
    n = conn.fibre_dim
    if s == t:
        return np.array([s]), np.eye(n)[None]
    F = _factors(conn, path, s, t, cfg)
    lo, hi = min(s, t), max(s, t)
    left, width = _step_grid(path, lo, hi, cfg.steps)
    edges = np.append(left, hi)
    if t < s:
        edges = edges[::-1]
    out = np.empty((F.shape[0] + 1, n, n), dtype=F.dtype)
    out[0] = np.eye(n)
    for k in range(F.shape[0]):
        out[k + 1] = F[k] @ out[k]
        if cfg.reunitarize:
            out[k + 1] = closest_unitary(out[k + 1])
    return edges, out


class ConnectionTransport(TransportFamily):
    """Transport family obtained by integrating a connection field.

    Forward integrations are memoised per ``(path, s, t)`` (paths compare
    by identity), so the reverse transport ``t -> s`` reuses the forward
    one when ``cfg.reverse == "invert"``. ``cache_size=0`` disables this.
    """

    def __init__(self, conn: ConnectionField, cfg: IntegratorConfig = IntegratorConfig(), name: str | None = None,
                 cache_size: int = 4096):
        self.conn = conn
        self.cfg = cfg
        self.fibre_dim = conn.fibre_dim
        self.name = name or conn.name
        self.cache_size = int(cache_size)
        self._cache: OrderedDict = OrderedDict()

    def _forward(self, path, s, t) -> np.ndarray:
        key = (path, s, t)
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        H = transport_matrix(self.conn, path, s, t, self.cfg)
        if self.cache_size > 0:
            self._cache[key] = H
            if len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
        return H

    def matrix(self, path, s, t):
        s, t = float(s), float(t)
        if s == t or self.cache_size == 0 or (t < s and self.cfg.reverse == "direct"):
            return transport_matrix(self.conn, path, s, t, self.cfg)
        if s < t:
            return self._forward(path, s, t).copy()
        _check_params(path, s, t)
        return inverse_matrix(self._forward(path, t, s), "transport matrix")


# --------------------------------------------------------------------------
# Frames


@dataclass(frozen=True, eq=False)
class FrameFunction:
    """Invertible matrix function ``F(s)``; ``fn`` maps ``(N,)`` to ``(N, n, n)``."""

    fn: Callable[[np.ndarray], np.ndarray]
    fibre_dim: int

    def __call__(self, s) -> np.ndarray:
        arr = np.asarray(s, dtype=float)
        out = np.asarray(self.fn(np.atleast_1d(arr)))
        return out[0] if arr.ndim == 0 else out


def transport_from_frame(F: FrameFunction, path: PathSpec, s: float, t: float) -> TransportMatrix:
    """``H(t, s) = F(t)^{-1} F(s)``."""
    _check_params(path, s, t)
    Ft = F(float(t))
    Fs = F(float(s))
    return TransportMatrix(s, t, inverse_matrix(Ft, "frame matrix") @ Fs)


def coefficients_from_frame(F: FrameFunction, path: PathSpec, s, h: float = FD_STEP) -> np.ndarray:
    """Finite-difference estimate of ``Gamma(s) = d/dt H(s, t) |_{t=s} = F(s)^{-1} F'(s)``.

    Central differences in the interior, second-order one-sided differences
    within ``h`` of an endpoint.
    """
    if h < FD_MIN_STEP:
        raise ValueError(f"finite-difference step {h} below cancellation guard {FD_MIN_STEP}")
    arr = np.asarray(s, dtype=float)
    scalar = arr.ndim == 0
    u = np.atleast_1d(arr)
    _check_params(path, *u)
    a, b = path.domain
    if b - a < 2 * h:
        raise ValueError("path domain too short for the finite-difference step")
    Fs = F(u)
    inv = np.linalg.inv(Fs)
    dF = np.empty_like(Fs)
    mid = (u - h >= a) & (u + h <= b)
    lo = ~mid & (u - h < a)
    hi = ~mid & ~lo
    if mid.any():
        dF[mid] = (F(u[mid] + h) - F(u[mid] - h)) / (2 * h)
    if lo.any():
        dF[lo] = (-3 * Fs[lo] + 4 * F(u[lo] + h) - F(u[lo] + 2 * h)) / (2 * h)
    if hi.any():
        dF[hi] = (3 * Fs[hi] - 4 * F(u[hi] - h) + F(u[hi] - 2 * h)) / (2 * h)
    G = inv @ dF
    return G[0] if scalar else G


def frame_connection(F: FrameFunction, path: PathSpec, h: float = FD_STEP) -> AlongPathConnection:
    """Connection whose coefficients are extracted from ``F`` by finite differences."""
    return AlongPathConnection(lambda _p, s: coefficients_from_frame(F, path, s, h), F.fibre_dim,
                               name="frame_coefficients")


class FrameTransport(TransportFamily):
    """Transport ``F(t)^{-1} F(s)`` with the frame ``F(s; gamma) = Phi(gamma(s))``.

    Because the frame depends on the path only through its points, the
    family is path-local and parameter-independent with no integration
    error (a pure-gauge transport).
    """

    def __init__(self, field: Callable[[np.ndarray], np.ndarray], fibre_dim: int, name: str = "frame"):
        self.field = field
        self.fibre_dim = int(fibre_dim)
        self.name = name

    def frame(self, path: PathSpec) -> FrameFunction:
        return FrameFunction(lambda s: np.asarray(self.field(path(s))), self.fibre_dim)

    def matrix(self, path, s, t):
        return transport_from_frame(self.frame(path), path, s, t).matrix


# --------------------------------------------------------------------------
# Derivation along a path


def _section_fn(sigma) -> Callable[[np.ndarray], np.ndarray]:
    if callable(sigma):
        return lambda u: np.asarray(sigma(np.atleast_1d(u)))
    try:
        params, values = sigma
    except (TypeError, ValueError):
        raise TransportError("section must be a callable or a (params, values) pair") from None
    params = np.asarray(params, dtype=float)
    values = np.asarray(values)
    if params.ndim != 1 or params.shape[0] < 4 or values.shape[0] != params.shape[0]:
        raise TransportError("sampled section needs at least four samples with matching values")
    spline = CubicSpline(params, values, axis=0)
    return lambda u: spline(np.atleast_1d(u))


def derivation(conn: ConnectionField, path: PathSpec, sigma, s: float, h: float = FD_STEP,
               method: str = "transport", cfg: IntegratorConfig = IntegratorConfig(steps=32)) -> np.ndarray:
    """Covariant derivative of a section along ``path`` at ``s``.

    ``method="transport"`` evaluates the defining difference quotient
    ``(I_{s+h->s} sigma(s+h) - sigma(s)) / h`` (central, second order);
    ``method="closed"`` evaluates ``sigma'(s) + Gamma(s) sigma(s)``.
    ``sigma`` is a vectorised callable ``(N,) -> (N, n)`` or a pair
    ``(params, values)`` of samples, interpolated with a cubic spline.
    """
    if h < FD_MIN_STEP:
        raise ValueError(f"finite-difference step {h} below cancellation guard {FD_MIN_STEP}")
    sig = _section_fn(sigma)
    s = float(s)
    _check_params(path, s)
    a, b = path.domain
    central = s - h >= a and s + h <= b
    if not central and b - a < 2 * h:
        raise ValueError("path domain too short for the finite-difference step")
    if method == "closed":
        if central:
            d = (sig(s + h)[0] - sig(s - h)[0]) / (2 * h)
        elif s - h < a:
            d = (-3 * sig(s)[0] + 4 * sig(s + h)[0] - sig(s + 2 * h)[0]) / (2 * h)
        else:
            d = (3 * sig(s)[0] - 4 * sig(s - h)[0] + sig(s - 2 * h)[0]) / (2 * h)
        return d + conn.at(path, s) @ sig(s)[0]
    if method != "transport":
        raise ValueError(f"unknown derivation method {method!r}")

    def pulled(u):
        return transport_matrix(conn, path, u, s, cfg) @ sig(u)[0]

    if central:
        return (pulled(s + h) - pulled(s - h)) / (2 * h)
    if s - h < a:
        return (-3 * sig(s)[0] + 4 * pulled(s + h) - pulled(s + 2 * h)) / (2 * h)
    return (3 * sig(s)[0] - 4 * pulled(s - h) + pulled(s - 2 * h)) / (2 * h)
