"""Transports along paths: matrices, families and the generic law checks.

Fibres are R^n (or C^n) in a fixed frame along each path, so a transport
``I^gamma_{s->t}`` is an ``n x n`` invertible matrix. A
:class:`TransportFamily` resolves ``(path, s, t)`` to that matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CompositionError, DomainError, SingularMatrixError, TransportError
from .matrices import frob
from .paths import Interval, PathSpec, Reparameterization, reparameterize, restrict
from .report import LawReport

DEFAULT_TOL = 1e-8
DEFAULT_GRID = 9
COND_LIMIT = 1e12
_PARAM_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class TransportMatrix:
    """``matrix`` carries the fibre over ``path(source)`` to the fibre over ``path(target)``."""

    source: float
    target: float
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise TransportError(f"transport matrix must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "source", float(self.source))
        object.__setattr__(self, "target", float(self.target))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, s: float, n: int, dtype=float) -> "TransportMatrix":
        return cls(s, s, np.eye(n, dtype=dtype))


def _same_param(x: float, y: float) -> bool:
    return abs(x - y) <= _PARAM_EPS * max(1.0, abs(x), abs(y))


def compose(second: TransportMatrix, first: TransportMatrix) -> TransportMatrix:
    """``second o first``: transport ``first.source -> first.target == second.source -> second.target``."""
    if not _same_param(first.target, second.source):
        raise CompositionError(
            f"cannot compose: first ends at {first.target} but second starts at {second.source}"
        )
    if first.n != second.n:
        raise CompositionError("fibre dimensions differ")
    return TransportMatrix(first.source, second.target, second.matrix @ first.matrix)


def check_invertible(m: np.ndarray, what: str = "matrix") -> None:
    if not np.all(np.isfinite(m)):
        raise SingularMatrixError(f"{what} has non-finite entries")
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrixError(f"{what} is singular to working precision (condition number {cond:.3g})")


def inverse_matrix(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    check_invertible(m, what)
    return np.linalg.inv(m)


def invert(m: TransportMatrix) -> TransportMatrix:
    return TransportMatrix(m.target, m.source, inverse_matrix(m.matrix, "transport matrix"))


def apply(m: TransportMatrix, v) -> np.ndarray:
    v = np.asarray(v)
    if v.shape[0] != m.n:
        raise TransportError(f"vector has dimension {v.shape[0]}, fibre has dimension {m.n}")
    return m.matrix @ v


class TransportFamily:
    """Base class for transports along paths.

    Subclasses implement :meth:`matrix`, returning the ``n x n`` matrix of
    ``I^path_{s->t}``. Implementations must be pure functions of their
    arguments.
    """

    fibre_dim: int = 0
    name: str = "transport"

    def matrix(self, path: PathSpec, s: float, t: float) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, path: PathSpec, s: float, t: float) -> TransportMatrix:
        for x in (s, t):
            if not path.domain.contains(x):
                raise DomainError(f"parameter {x} outside [{path.domain.a}, {path.domain.b}]")
        return TransportMatrix(s, t, self.matrix(path, float(s), float(t)))


# --------------------------------------------------------------------------
# Law checks


def _pair_table(I: TransportFamily, path: PathSpec, grid: Sequence[float]) -> list[list[np.ndarray]]:
    return [[I.matrix(path, s, t) for t in grid] for s in grid]


def _label(path: PathSpec) -> str:
    return path.label or "path"


def check_groupoid(I: TransportFamily, path: PathSpec, grid: Sequence[float] | None = None,
                   tol: float = DEFAULT_TOL, report: LawReport | None = None) -> LawReport:
    """Composition, identity and inverse laws over all grid pairs/triples.

    Row ``composition`` for source ``s`` and target ``r`` holds the worst
    ``||I_{t->r} I_{s->t} - I_{s->r}||`` over intermediate ``t`` (kept in
    ``via``).
    """
    grid = [float(g) for g in (path.domain.grid(DEFAULT_GRID) if grid is None else grid)]
    if not all(path.domain.contains(g) for g in grid):
        raise TransportError("grid must lie inside the path domain")
    rep = report if report is not None else LawReport(f"groupoid:{_label(path)}")
    label = _label(path)
    M = _pair_table(I, path, grid)
    n = len(grid)
    eye = np.eye(M[0][0].shape[0])
    for i in range(n):
        rep.add("identity", label, grid[i], grid[i], frob(M[i][i] - eye), tol)
    for i in range(n):
        for k in range(n):
            worst, via = -1.0, grid[i]
            for j in range(n):
                res = frob(M[j][k] @ M[i][j] - M[i][k])
                if res > worst:
                    worst, via = res, grid[j]
            rep.add("composition", label, grid[i], grid[k], worst, tol, via=(via,))
    for i in range(n):
        for j in range(n):
            try:
                res = frob(inverse_matrix(M[i][j]) - M[j][i])
            except SingularMatrixError:
                res = float("inf")
            rep.add("inverse", label, grid[i], grid[j], res, tol)
    return rep


def check_restriction(I: TransportFamily, path: PathSpec, sub: Interval, grid: Sequence[float] | None = None,
                      tol: float = DEFAULT_TOL, report: LawReport | None = None) -> LawReport:
    """``I^{path|sub}_{s->t} == I^path_{s->t}`` for grid pairs inside ``sub``."""
    grid = [float(g) for g in (sub.grid(DEFAULT_GRID) if grid is None else grid)]
    if not all(sub.contains(g) for g in grid):
        raise TransportError("grid must lie inside the sub-interval")
    short = restrict(path, sub)
    label = f"{_label(path)}|[{sub.a:.6g},{sub.b:.6g}]"
    rep = report if report is not None else LawReport(f"restriction:{label}")
    for s in grid:
        for t in grid:
            rep.add("restriction", label, s, t, frob(I.matrix(short, s, t) - I.matrix(path, s, t)), tol)
    return rep


def check_reparam(I: TransportFamily, path: PathSpec, tau: Reparameterization, grid: Sequence[float] | None = None,
                  tol: float = DEFAULT_TOL, report: LawReport | None = None) -> LawReport:
    """``I^{path o tau}_{s->t} == I^path_{tau(s)->tau(t)}`` for grid pairs in ``tau.source``."""
    grid = [float(g) for g in (tau.source.grid(DEFAULT_GRID) if grid is None else grid)]
    if not all(tau.source.contains(g) for g in grid):
        raise TransportError("grid must lie inside the reparameterization source")
    moved = reparameterize(path, tau)
    label = f"{_label(path)}o{tau.label}"
    rep = report if report is not None else LawReport(f"reparametrization:{label}")
    img = np.clip(tau(np.array(grid)), path.domain.a, path.domain.b)
    for i, s in enumerate(grid):
        for j, t in enumerate(grid):
            lhs = I.matrix(moved, s, t)
            rhs = I.matrix(path, float(img[i]), float(img[j]))
            rep.add("reparametrization", label, s, t, frob(lhs - rhs), tol)
    return rep
