"""Group-valued parallel transport: path-ordered exponentials and Wilson loops.

``g_gamma = Pexp int A_i dx^i`` is taken in the right-acting convention
with earlier pieces of the path on the left, so that

    g_{gamma o tau} = g_gamma,   g_{gamma_-} = g_gamma^{-1},   g_{g1 g2} = g_{g1} g_{g2}

and across a short segment ``g = I + A_i dx^i + O(dx^2)``. Numerically
``g_gamma`` is the inverse of the linear transport ``H(b, a)`` generated
by the pulled-back coefficients ``Gamma(s) = A_i(gamma(s)) dgamma^i/ds``,
i.e. ``g_gamma = H(a, b)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import GroupInvariantError, LoopError
from .linear import ChartConnection, ConnectionTransport, IntegratorConfig, transport_matrix
from .matrices import closest_special_unitary, frob, unitarity_defect
from .paths import (
    POINT_TOL,
    Interval,
    PathSpec,
    Reparameterization,
    canonicalize,
    concat_canonical,
    line_segment,
    reparameterize,
    restrict,
    reverse_canonical,
)
from .report import LawReport
from .transport import DEFAULT_TOL, inverse_matrix

GROUPS = ("U1", "SU2", "GLn")
ALGEBRA_TOL = 1e-12
GROUP_TOL = 1e-10

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class GaugePotential:
    """Lie-algebra valued potential ``A_i(x)``.

    ``components`` maps points ``(N, m)`` to ``(N, m, n, n)``; U1 uses
    ``n = 1`` with purely imaginary entries.
    """

    def __init__(self, group: str, components: Callable[[np.ndarray], np.ndarray], chart_dim: int,
                 fibre_dim: int | None = None, name: str = "potential"):
        if group not in GROUPS:
            raise ValueError(f"unknown group {group!r}; expected one of {GROUPS}")
        self.group = group
        self.components = components
        self.chart_dim = int(chart_dim)
        self.fibre_dim = {"U1": 1, "SU2": 2}.get(group, fibre_dim)
        if self.fibre_dim is None:
            raise ValueError("GLn potentials need an explicit fibre dimension")
        self.name = name

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.asarray(self.components(x))[0]

    def check_algebra(self, points) -> float:
        """Largest departure from the Lie algebra over ``points``; raises beyond tolerance."""
        A = np.asarray(self.components(np.atleast_2d(np.asarray(points, dtype=float))))
        if self.group == "U1":
            dev = float(np.max(np.abs(A.real))) if A.size else 0.0
        elif self.group == "SU2":
            herm = A + np.conj(np.swapaxes(A, -1, -2))
            tr = np.trace(A, axis1=-2, axis2=-1)
            dev = max(float(np.max(np.abs(herm))), float(np.max(np.abs(tr))))
        else:
            dev = 0.0
        if dev > ALGEBRA_TOL:
            raise GroupInvariantError(f"{self.group} potential leaves its Lie algebra by {dev:.3g}")
        return dev

    def connection(self) -> ChartConnection:
        dtype = float if self.group == "GLn" else complex
        return ChartConnection(self.components, self.fibre_dim, self.chart_dim, dtype=dtype, name=self.name)


def u1_uniform_potential(B: float) -> GaugePotential:
    """Uniform field strength ``B`` in the plane, symmetric gauge ``A = i(-B y/2, B x/2)``."""
    B = float(B)

    def comps(x):
        out = np.zeros((x.shape[0], 2, 1, 1), dtype=complex)
        out[:, 0, 0, 0] = -0.5j * B * x[:, 1]
        out[:, 1, 0, 0] = 0.5j * B * x[:, 0]
        return out

    return GaugePotential("U1", comps, 2, name=f"u1_uniform(B={B:g})")


def su2_algebra(a) -> np.ndarray:
    """``(i/2) a . sigma`` (anti-Hermitian, traceless)."""
    a = np.asarray(a, dtype=float)
    return 0.5j * np.einsum("...k,kij->...ij", a, PAULI)


def su2_constant_potential(a) -> GaugePotential:
    """Constant SU(2) potential; ``a`` holds one 3-vector per chart direction."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[1] != 3:
        raise ValueError("su2 coefficients need three components per chart direction")
    A = su2_algebra(a)
    m = a.shape[0]

    def comps(x):
        return np.broadcast_to(A, (x.shape[0], m, 2, 2))

    return GaugePotential("SU2", comps, m, name="su2_constant")


@dataclass(frozen=True, eq=False)
class GroupElement:
    group: str
    matrix: np.ndarray
    base_point: np.ndarray | None = None

    @property
    def phase(self) -> float | None:
        """U1 phase in ``(-pi, pi]``."""
        if self.group != "U1":
            return None
        return float(np.angle(self.matrix[0, 0]))

    def defect(self) -> float:
        M = self.matrix
        if self.group == "U1":
            return abs(abs(M[0, 0]) - 1.0)
        if self.group == "SU2":
            return max(unitarity_defect(M), abs(np.linalg.det(M) - 1.0))
        return 0.0

    def check(self, tol: float = GROUP_TOL) -> None:
        d = self.defect()
        if d > tol:
            raise GroupInvariantError(f"{self.group} element is off the group by {d:.3g}")


def project_to_group(group: str, M: np.ndarray) -> np.ndarray:
    if group == "U1":
        return M / abs(M[0, 0])
    if group == "SU2":
        return closest_special_unitary(M)
    return M


def group_transport(A: GaugePotential, path: PathSpec, cfg: IntegratorConfig = IntegratorConfig()) -> GroupElement:
    """``g_gamma = Pexp int_gamma A_i dx^i``."""
    a, b = path.domain
    M = transport_matrix(A.connection(), path, b, a, cfg)
    if cfg.reunitarize:
        M = project_to_group(A.group, M)
    g = GroupElement(A.group, M, base_point=path(a))
    g.check()
    return g


def group_family(A: GaugePotential, cfg: IntegratorConfig = IntegratorConfig()) -> ConnectionTransport:
    """The linear transport family whose inverse whole-path matrix is ``g``."""
    return ConnectionTransport(A.connection(), cfg, name=A.name)


def wilson_loop(A: GaugePotential, loop: PathSpec, cfg: IntegratorConfig = IntegratorConfig(),
                tol: float = POINT_TOL) -> GroupElement:
    gap = float(np.linalg.norm(loop.start - loop.end))
    if gap > tol:
        raise LoopError(f"path is not closed: endpoints differ by {gap:.3g}")
    return group_transport(A, loop, cfg)


def rebase_loop(loop: PathSpec, c: float) -> PathSpec:
    """The same closed curve started at ``loop(c)``: ``loop|[c,b]`` then ``loop|[a,c]``."""
    a, b = loop.domain
    if not a < c < b:
        raise ValueError("new base parameter must be interior")
    tail = canonicalize(restrict(loop, Interval(c, b)))
    head = canonicalize(restrict(loop, Interval(a, c)))
    return concat_canonical(tail, head).relabel(f"{loop.label}@{c:g}")


def check_group_laws(A: GaugePotential, g1: PathSpec, g2: PathSpec, tau: Reparameterization | None = None,
                     tol: float = DEFAULT_TOL, cfg: IntegratorConfig = IntegratorConfig(),
                     report: LawReport | None = None) -> LawReport:
    """Reparameterization, reversal and product laws for ``g``.

    ``group_product`` uses ``g_{g1 g2} = g_{g1} g_{g2}``; the opposite order
    is recorded as informational ``group_product_swapped``.
    """
    rep = report if report is not None else LawReport(f"group:{A.name}")
    nan = float("nan")
    c1, c2 = canonicalize(g1), canonicalize(g2)
    m1 = group_transport(A, c1, cfg).matrix
    m2 = group_transport(A, c2, cfg).matrix
    if tau is not None:
        moved = reparameterize(g1, tau)
        rep.add("group_reparam", f"{g1.label}o{tau.label}", nan, nan,
                frob(group_transport(A, moved, cfg).matrix - group_transport(A, g1, cfg).matrix), tol)
    for c, m in ((c1, m1), (c2, m2)):
        rep.add("group_reversal", c.label, nan, nan,
                frob(group_transport(A, reverse_canonical(c), cfg).matrix - inverse_matrix(m)), tol)
    m12 = group_transport(A, concat_canonical(c1, c2), cfg).matrix
    label = f"{g1.label}*{g2.label}"
    rep.add("group_product", label, nan, nan, frob(m12 - m1 @ m2), tol)
    rep.add("group_product_swapped", label, nan, nan, frob(m12 - m2 @ m1), tol, informational=True)
    return rep


def infinitesimal_deviation(A: GaugePotential, x, dx, cfg: IntegratorConfig = IntegratorConfig(steps=64)) -> float:
    """``|| g over [x, x + dx] - (I + A_i(x) dx^i) ||``."""
    x = np.asarray(x, dtype=float)
    dx = np.asarray(dx, dtype=float)
    g = group_transport(A, line_segment(x, x + dx), cfg).matrix
    lin = np.eye(A.fibre_dim) + np.einsum("kij,k->ij", A(x), dx)
    return frob(g - lin)


def infinitesimal_check(A: GaugePotential, x, dx, tol: float = 0.5,
                        cfg: IntegratorConfig = IntegratorConfig(steps=64),
                        report: LawReport | None = None) -> LawReport:
    """Second-order agreement of ``g`` with ``I + A_i dx^i``.

    Rows: ``infinitesimal`` holds the measured second-order coefficient
    ``dev(dx) / |dx|^2`` (informational); ``infinitesimal_ratio`` holds
    ``|dev(dx) / dev(dx/2) - 4|`` and passes within ``tol``. An exactly zero
    deviation (flat potential) counts as a pass.
    """
    rep = report if report is not None else LawReport(f"infinitesimal:{A.name}")
    dx = np.asarray(dx, dtype=float)
    size = float(np.linalg.norm(dx))
    d1 = infinitesimal_deviation(A, x, dx, cfg)
    d2 = infinitesimal_deviation(A, x, dx / 2, cfg)
    nan = float("nan")
    rep.add("infinitesimal", A.name, 0.0, size, d1 / size**2, np.inf, informational=True)
    if d1 == 0.0 and d2 == 0.0:
        rep.add("infinitesimal_ratio", A.name, 0.0, size, 0.0, tol)
    else:
        ratio = d1 / d2 if d2 > 0 else nan
        rep.add("infinitesimal_ratio", A.name, 0.0, size, abs(ratio - 4.0), tol, via=(ratio,))
    return rep
