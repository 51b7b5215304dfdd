"""Axiomatic parallel transport and its equivalence with transports along paths.

A :class:`ParallelTransportRule` assigns to every path ``gamma: [a, b] -> B``
one invertible fibre map ``phi_gamma`` (here a matrix). From a transport
family ``I`` one gets ``phi_gamma = I^gamma_{a->b}``; conversely a rule gives
back a family through ``I^gamma_{s->t} = phi_{gamma|[a,t]} phi_{gamma|[a,s]}^{-1}``.
Composition order follows left action: ``phi_{g1 g2} = phi_{g2} phi_{g1}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .matrices import frob
from .paths import (
    Interval,
    PathSpec,
    Reparameterization,
    affine,
    canonicalize,
    concat_canonical,
    cubic,
    point_path,
    reparameterize,
    restrict,
    reverse_canonical,
)
from .report import LawReport
from .transport import DEFAULT_GRID, DEFAULT_TOL, TransportFamily, TransportMatrix, inverse_matrix


@dataclass(frozen=True, eq=False)
class ParallelMap:
    """``matrix`` maps the fibre over ``path.start`` onto the fibre over ``path.end``."""

    path: PathSpec
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        inverse_matrix(m, "parallel map")
        object.__setattr__(self, "matrix", m)


class ParallelTransportRule:
    def __init__(self, assign: Callable[[PathSpec], np.ndarray], fibre_dim: int, name: str = "phi"):
        self.assign = assign
        self.fibre_dim = int(fibre_dim)
        self.name = name

    def matrix(self, path: PathSpec) -> np.ndarray:
        return np.asarray(self.assign(path))

    def __call__(self, path: PathSpec) -> ParallelMap:
        return ParallelMap(path, self.matrix(path))


def rule_from_transport(I: TransportFamily) -> ParallelTransportRule:
    """``phi_gamma := I^gamma_{a->b}``."""
    return ParallelTransportRule(lambda p: I.matrix(p, p.domain.a, p.domain.b), I.fibre_dim,
                                 name=f"phi[{I.name}]")


def from_transport(I: TransportFamily, path: PathSpec) -> ParallelMap:
    return ParallelMap(path, I.matrix(path, path.domain.a, path.domain.b))


@dataclass(frozen=True)
class SegmentSign:
    s: float
    t: float
    epsilon: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "epsilon", 1 if self.s <= self.t else -1)


def initial_segment(path: PathSpec, s: float, via: str = "restriction") -> PathSpec:
    """The piece of ``path`` over ``[a, s]``.

    ``via="restriction"`` restricts the path; ``"affine"`` and ``"cubic"``
    instead compose the whole path with an orientation-preserving map
    ``[a, b] -> [a, s]`` of that shape. A zero-length piece is a point path.
    Results are memoised so repeated requests return the same path object,
    which lets memoising transport families reuse their work.
    """
    a, b = path.domain
    if not path.domain.contains(s):
        raise DomainError(f"{s} outside [{a}, {b}]")
    return _initial_segment(path, min(max(float(s), a), b), via)


@lru_cache(maxsize=4096)
def _initial_segment(path: PathSpec, s: float, via: str) -> PathSpec:
    a, b = path.domain
    if s == a:
        return point_path(path(a), a)
    if via == "restriction":
        return restrict(path, Interval(a, s))
    head = restrict(path, Interval(a, s))
    if via == "affine":
        tau = affine(path.domain, head.domain)
    elif via == "cubic":
        tau = cubic(path.domain, head.domain, weight=0.5)
    else:
        raise ValueError(f"unknown segment construction {via!r}")
    return reparameterize(head, tau)


def to_transport(phi: ParallelTransportRule, path: PathSpec, s: float, t: float,
                 via: str = "restriction") -> TransportMatrix:
    """``phi_{gamma|[a,t]} o (phi_{gamma|[a,s]})^{-1}``."""
    Ft = phi.matrix(initial_segment(path, t, via))
    Fs = phi.matrix(initial_segment(path, s, via))
    return TransportMatrix(s, t, Ft @ inverse_matrix(Fs, "parallel map"))


def segment_form(phi: ParallelTransportRule, path: PathSpec, s: float, t: float) -> TransportMatrix:
    """``(phi_{gamma|[min, max]})^{eps(s, t)}`` with ``eps = +1`` iff ``s <= t``."""
    sign = SegmentSign(float(s), float(t))
    lo, hi = min(s, t), max(s, t)
    M = phi.matrix(restrict(path, Interval(lo, hi)) if lo < hi else point_path(path(lo), lo))
    return TransportMatrix(s, t, M if sign.epsilon > 0 else inverse_matrix(M, "parallel map"))


class ReconstructedTransport(TransportFamily):
    """Transport along paths rebuilt from a parallel-transport rule."""

    def __init__(self, phi: ParallelTransportRule, via: str = "restriction"):
        self.phi = phi
        self.via = via
        self.fibre_dim = phi.fibre_dim
        self.name = f"I[{phi.name}]"

    def matrix(self, path, s, t):
        return to_transport(self.phi, path, s, t, self.via).matrix


# --------------------------------------------------------------------------
# Axiom checks


def standard_reparams(domain: Interval) -> list[Reparameterization]:
    """Orientation-preserving test maps onto ``domain``: an affine map from a
    longer interval and a cubic from a shorter one, so parameter-speed
    dependence cannot hide."""
    return [affine(Interval(-1.0, 3.0), domain), cubic(Interval(2.0, 2.5), domain, weight=0.5)]


@dataclass
class AxiomSuite:
    paths: Sequence[PathSpec]
    pairs: Sequence[tuple[PathSpec, PathSpec]] = ()
    points: Sequence[PathSpec] = ()
    reparams: Callable[[Interval], Sequence[Reparameterization]] = standard_reparams


def _name(p: PathSpec) -> str:
    return p.label or "path"


def check_axioms(phi: ParallelTransportRule, suite: AxiomSuite, tol: float = DEFAULT_TOL,
                 report: LawReport | None = None) -> LawReport:
    """Reparameterization invariance, reversal, product, point-path and reversed-product laws.

    Product rows use the left-action order ``phi_{g1 g2} = phi_{g2} phi_{g1}``;
    the opposite order is recorded as informational ``product_swapped`` rows.
    """
    rep = report if report is not None else LawReport(f"axioms:{phi.name}")
    eye = np.eye(phi.fibre_dim)
    nan = float("nan")
    for path in suite.paths:
        a, b = path.domain
        base = phi.matrix(path)
        if not path.domain.degenerate:
            for tau in suite.reparams(path.domain):
                moved = reparameterize(path, tau)
                rep.add("reparam_invariance", f"{_name(path)}o{tau.label}", a, b,
                        frob(phi.matrix(moved) - base), tol)
        canon = canonicalize(path)
        rep.add("reversal", _name(path), a, b,
                frob(phi.matrix(reverse_canonical(canon)) - inverse_matrix(phi.matrix(canon))), tol)
        rep.add("point_path", f"point@{_name(path)}", a, a, frob(phi.matrix(point_path(path(a), a)) - eye), tol)
    for pt in suite.points:
        rep.add("point_path", _name(pt), pt.domain.a, pt.domain.a, frob(phi.matrix(pt) - eye), tol)
    for g1, g2 in suite.pairs:
        c1, c2 = canonicalize(g1), canonicalize(g2)
        prod = concat_canonical(c1, c2)
        label = f"{_name(g1)}*{_name(g2)}"
        m1, m2, m12 = phi.matrix(c1), phi.matrix(c2), phi.matrix(prod)
        rep.add("product", label, nan, nan, frob(m12 - m2 @ m1), tol)
        rep.add("product_swapped", label, nan, nan, frob(m12 - m1 @ m2), tol, informational=True)
        lhs = phi.matrix(reverse_canonical(prod))
        rhs = phi.matrix(reverse_canonical(c1)) @ phi.matrix(reverse_canonical(c2))
        rep.add("reversed_product", label, nan, nan, frob(lhs - rhs), tol)
    return rep


def check_segment_law(phi: ParallelTransportRule, path: PathSpec, r: float, s: float, t: float,
                      tol: float = DEFAULT_TOL, report: LawReport | None = None) -> LawReport:
    """``phi_{gamma|[s,t]} phi_{gamma|[r,s]} == phi_{gamma|[r,t]}`` for ``r <= s <= t``."""
    if not r <= s <= t:
        raise DomainError(f"segment law needs r <= s <= t, got {r}, {s}, {t}")
    rep = report if report is not None else LawReport(f"segment:{_name(path)}")

    def piece(u, v):
        return phi.matrix(restrict(path, Interval(u, v)) if u < v else point_path(path(u), u))

    res = frob(piece(s, t) @ piece(r, s) - piece(r, t))
    rep.add("segment", _name(path), r, t, res, tol, via=(s,))
    return rep


RECONSTRUCTION_FORMS = ("segment_form", "tau_affine", "tau_cubic")


def check_reconstruction(phi: ParallelTransportRule, path: PathSpec, grid: Sequence[float] | None = None,
                         tol: float = 1e-10, tau_tol: float | None = None,
                         forms: Sequence[str] = RECONSTRUCTION_FORMS,
                         report: LawReport | None = None) -> LawReport:
    """Agreement of the three reconstructions of ``I^gamma_{s->t}`` from ``phi``.

    Rows ``segment_form`` compare the sign-exponent form with the
    restriction form; ``tau_affine`` and ``tau_cubic`` compare the
    restriction form with the forms built from reparameterized whole paths
    and are held to ``tau_tol`` (default ``tol``). An integrated rule sees
    a different discretisation on a cubically reparameterized path, so its
    ``tau_cubic`` rows carry the integrator error. ``forms`` selects
    which of the three row kinds to produce.
    """
    tau_tol = tol if tau_tol is None else tau_tol
    grid = [float(g) for g in (path.domain.grid(DEFAULT_GRID) if grid is None else grid)]
    rep = report if report is not None else LawReport(f"reconstruction:{_name(path)}")
    for s in grid:
        for t in grid:
            ref = to_transport(phi, path, s, t).matrix
            if "segment_form" in forms:
                rep.add("segment_form", _name(path), s, t, frob(segment_form(phi, path, s, t).matrix - ref), tol)
            for via in ("affine", "cubic"):
                if f"tau_{via}" in forms:
                    rep.add(f"tau_{via}", _name(path), s, t, frob(to_transport(phi, path, s, t, via).matrix - ref), tau_tol)
    return rep


def roundtrip_transport(I: TransportFamily, path: PathSpec, grid: Sequence[float] | None = None,
                        tol: float = DEFAULT_TOL, report: LawReport | None = None) -> LawReport:
    """Transport -> parallel rule -> transport, and rule -> transport -> rule.

    ``roundtrip_transport`` rows compare the rebuilt family with ``I`` on
    grid pairs; ``roundtrip_parallel`` rows compare ``phi`` with the rule
    recovered from the rebuilt family on every initial segment of the path.
    """
    grid = [float(g) for g in (path.domain.grid(DEFAULT_GRID) if grid is None else grid)]
    rep = report if report is not None else LawReport(f"roundtrip:{_name(path)}")
    phi = rule_from_transport(I)
    rebuilt = ReconstructedTransport(phi)
    phi_again = rule_from_transport(rebuilt)
    for s in grid:
        for t in grid:
            rep.add("roundtrip_transport", _name(path), s, t, frob(rebuilt.matrix(path, s, t) - I.matrix(path, s, t)), tol)
    a = path.domain.a
    for t in grid:
        seg = initial_segment(path, t)
        rep.add("roundtrip_parallel", _name(path), a, t, frob(phi_again.matrix(seg) - phi.matrix(seg)), tol)
    return rep
