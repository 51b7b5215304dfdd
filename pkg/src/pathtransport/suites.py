"""Named law suites over catalog entries, shared by the CLI and the test suite.

Every suite returns a :class:`LawReport`. Step counts: the catalog paths
have piecewise-constant coefficients, so the default integrator settings
are exact up to rounding on them; checks that pass through a cubic
reparameterization run at ``FINE_STEPS`` so the second-order integrator
error drops below the ``1e-8`` tolerance.
"""
from __future__ import annotations

import math
import time
from dataclasses import replace
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm as scipy_expm

from .catalog import (
    CATALOG,
    CatalogEntry,
    ConvergenceStudy,
    all_entries,
    convergence_study,
    get_entry,
    rotation_angle,
    sphere_holonomy_angle,
    u1_loop_phase,
)
from .gauge import check_group_laws, group_transport, infinitesimal_check, rebase_loop, wilson_loop
from .linear import (
    FrameTransport,
    IntegratorConfig,
    derivation,
    reparam_coefficients,
    transport_matrix,
)
from .matrices import frob
from .parallel import (
    AxiomSuite,
    ReconstructedTransport,
    check_axioms,
    check_reconstruction,
    check_segment_law,
    roundtrip_transport,
    rule_from_transport,
)
from .paths import Interval, PathSpec, affine, canonicalize, concat_canonical, cubic, reparameterize, restrict
from .report import LawReport
from .tensor import STransport, check_algebraic_laws, orientation_behavior
from .transport import DEFAULT_TOL, TransportFamily, check_groupoid, check_reparam, check_restriction, inverse_matrix

FINE_STEPS = 20000
NAN = float("nan")


def fine(cfg: IntegratorConfig, steps: int = FINE_STEPS) -> IntegratorConfig:
    return replace(cfg, steps=max(cfg.steps, steps))


def middle(domain: Interval) -> Interval:
    """The middle half of ``domain``."""
    q = domain.length / 4
    return Interval(domain.a + q, domain.b - q)


def locality_taus(domain: Interval) -> list:
    """Orientation-preserving maps onto ``domain`` from a longer and a shorter interval."""
    return [affine(Interval(-1.0, 3.0), domain), cubic(Interval(2.0, 2.5), domain, weight=0.5)]


# --------------------------------------------------------------------------
# Transport-level suites


def groupoid_suite(entry: CatalogEntry, cfg: IntegratorConfig = IntegratorConfig(),
                   tol: float = DEFAULT_TOL) -> LawReport:
    rep = LawReport(f"groupoid:{entry.name}")
    I = entry.transport(cfg)
    for path in entry.paths.values():
        check_groupoid(I, path, tol=tol, report=rep)
    return rep


def locality_suite(I: TransportFamily, paths: Sequence[PathSpec], tol: float = DEFAULT_TOL,
                   fine_family: TransportFamily | None = None, name: str | None = None) -> LawReport:
    """Restriction to the middle half and reparameterization by an affine and a cubic map.

    ``fine_family`` (default ``I``) is used for the cubic checks.
    """
    rep = LawReport(name or f"locality:{I.name}")
    fam_fine = fine_family or I
    for path in paths:
        check_restriction(I, path, middle(path.domain), tol=tol, report=rep)
        aff, cub = locality_taus(path.domain)
        check_reparam(I, path, aff, tol=tol, report=rep)
        check_reparam(fam_fine, path, cub, tol=tol, report=rep)
    return rep


def catalog_locality_suite(entry: CatalogEntry, cfg: IntegratorConfig = IntegratorConfig(),
                           tol: float = DEFAULT_TOL) -> LawReport:
    return locality_suite(entry.transport(cfg), list(entry.paths.values()), tol,
                          fine_family=entry.transport(fine(cfg)), name=f"locality:{entry.name}")


def chain_suite(entry: CatalogEntry, cfg: IntegratorConfig = IntegratorConfig(), tol: float = DEFAULT_TOL,
                deriv_tol: float = 1e-5, h: float = 1e-4, label: str | None = None) -> LawReport:
    """Coefficient transformation and the two consequences it carries under a cubic reparameterization.

    Rows: ``coefficient_law`` compares the pulled-back coefficients of the
    moved path with ``tau' Gamma(tau)``; ``matrix_law`` compares the
    transport generated by the transformed coefficients with the original
    one at ``tau``-images; ``derivation_law`` compares the covariant
    derivative along the moved path with ``tau'`` times the one along the
    original path, both from the transport difference quotient.
    """
    rep = LawReport(f"chain:{entry.name}")
    label = label or entry.convergence_path
    path = entry.path(label)
    a, b = path.domain
    src = Interval(a - 0.5, a + 0.5 * (b - a))
    tau = cubic(src, path.domain, weight=0.5)
    moved = reparameterize(path, tau)
    tag = f"{label}o{tau.label}"
    transformed = reparam_coefficients(entry.connection, path, tau)
    grid = src.grid(9)
    direct = entry.connection.coefficients(moved, grid)
    rep.add("coefficient_law", tag, a, b, frob(direct - transformed.coefficients(moved, grid)), tol)
    cfg_f = fine(cfg)
    img = np.clip(tau(grid), a, b)
    for i, s in enumerate(grid):
        for j, t in enumerate(grid):
            lhs = transport_matrix(transformed, moved, s, t, cfg_f)
            rhs = transport_matrix(entry.connection, path, img[i], img[j], cfg_f)
            rep.add("matrix_law", tag, s, t, frob(lhs - rhs), tol)
    n = entry.connection.fibre_dim
    freqs = np.arange(1, n + 1, dtype=float)

    def sigma(u):
        u = np.atleast_1d(u)
        return np.sin(np.outer(u, freqs) + 0.3) + 0.5 * np.cos(2 * np.outer(u, freqs))

    def sigma_moved(s):
        return sigma(np.clip(tau(np.atleast_1d(s)), a, b))

    sample = src.grid(7)
    for s, u, d in zip(sample, np.clip(tau(sample), a, b), tau.derivative(sample)):
        lhs = derivation(entry.connection, moved, sigma_moved, s, h=h)
        rhs = d * derivation(entry.connection, path, sigma, float(u), h=h)
        rep.add("derivation_law", tag, s, s, float(np.linalg.norm(lhs - rhs)), deriv_tol)
        closed = derivation(entry.connection, moved, sigma_moved, s, h=h, method="closed")
        rep.add("derivation_closed_form", tag, s, s, float(np.linalg.norm(lhs - closed)), deriv_tol)
    return rep


# --------------------------------------------------------------------------
# Parallel-transport suites


def axiom_suite(entry: CatalogEntry, cfg: IntegratorConfig = IntegratorConfig(), tol: float = DEFAULT_TOL) -> LawReport:
    """The parallel-transport axioms for ``phi`` built from the entry's transport.

    The axiom checks include cubic reparameterizations, so the rule runs
    at ``FINE_STEPS``. Segment-law rows cover each path at quarter points.
    """
    phi = rule_from_transport(entry.transport(fine(cfg)))
    paths = list(entry.paths.values())
    pairs = [(entry.path(p1), entry.path(p2)) for p1, p2 in entry.pairs]
    rep = check_axioms(phi, AxiomSuite(paths, pairs), tol=tol)
    rep.name = f"axioms:{entry.name}"
    phi_default = rule_from_transport(entry.transport(cfg))
    for path in paths:
        g = path.domain.grid(5)
        check_segment_law(phi_default, path, g[0], g[2], g[4], tol=tol, report=rep)
        check_segment_law(phi_default, path, g[1], g[1], g[3], tol=tol, report=rep)
    return rep


def frame_field(x: np.ndarray) -> np.ndarray:
    """An invertible ``2 x 2`` frame over the plane used for pure-gauge transports."""
    x = np.atleast_2d(x)
    x0 = x[:, 0]
    x1 = x[:, 1] if x.shape[1] > 1 else np.zeros_like(x0)
    al = x0 + 0.3 * x1
    R = np.stack([np.stack([np.cos(al), np.sin(al)], -1), np.stack([-np.sin(al), np.cos(al)], -1)], -2)
    U = np.zeros_like(R)
    U[:, 0, 0] = np.exp(0.4 * x0)
    U[:, 0, 1] = x1
    U[:, 1, 1] = np.exp(-0.2 * x0 + 0.1 * x1)
    return R @ U


def frame_example() -> FrameTransport:
    return FrameTransport(frame_field, 2, name="frame_example")


def reconstruction_suite(entry: CatalogEntry | None, cfg: IntegratorConfig = IntegratorConfig(),
                         tol: float = 1e-10, groupoid_tol: float = 1e-12) -> LawReport:
    """Rebuilding transports from an axiom-satisfying rule.

    With ``entry=None`` the rule comes from the frame example over the flat
    entry's paths. ``segment_form`` rows and the ``tau_affine`` rows are
    held to ``tol``; ``tau_cubic`` rows of an integrated rule carry the
    integrator error at ``FINE_STEPS`` and are held to ``DEFAULT_TOL``.
    The rebuilt family must pass the groupoid laws at ``groupoid_tol``.
    """
    rep = LawReport("reconstruction")
    if entry is None:
        phi = rule_from_transport(frame_example())
        paths = list(CATALOG["flat"]().paths.values())
        for path in paths:
            check_reconstruction(phi, path, tol=tol, report=rep)
        rep.name = "reconstruction:frame_example"
    else:
        phi = rule_from_transport(entry.transport(cfg))
        phi_fine = rule_from_transport(entry.transport(fine(cfg)))
        paths = list(entry.paths.values())
        for path in paths:
            check_reconstruction(phi, path, tol=tol, forms=("segment_form", "tau_affine"), report=rep)
            check_reconstruction(phi_fine, path, path.domain.grid(5), tau_tol=DEFAULT_TOL, forms=("tau_cubic",),
                                 report=rep)
        rep.name = f"reconstruction:{entry.name}"
    rebuilt = ReconstructedTransport(phi)
    for path in paths:
        sub = check_groupoid(rebuilt, path, tol=groupoid_tol)
        for row in sub.rows:
            rep.add(f"rebuilt_{row.law}", row.path, row.s, row.t, row.residual, row.tol, row.via)
    return rep


def roundtrip_suite(entry: CatalogEntry | None, cfg: IntegratorConfig = IntegratorConfig(),
                    tol: float | None = None) -> LawReport:
    """Transport to rule to transport, and rule to transport to rule.

    Default tolerance: ``1e-10`` for the frame example (``entry=None``),
    ``1e-8`` for integrated catalog transports.
    """
    if entry is None:
        I: TransportFamily = frame_example()
        paths = list(CATALOG["flat"]().paths.values())
        tol = 1e-10 if tol is None else tol
        name = "frame_example"
    else:
        I = entry.transport(cfg)
        paths = list(entry.paths.values())
        tol = DEFAULT_TOL if tol is None else tol
        name = entry.name
    rep = LawReport(f"roundtrip:{name}")
    for path in paths:
        roundtrip_transport(I, path, tol=tol, report=rep)
    return rep


# --------------------------------------------------------------------------
# Holonomy and gauge suites


def holonomy_suite(cfg: IntegratorConfig = IntegratorConfig(), tol_angle: float = 1e-6,
                   tol_exp: float = 1e-10, time_limit: float = 1.0, theta0: float = math.pi / 3,
                   B: float = math.pi, radius: float = 1.0, G0=None) -> LawReport:
    """Integrated holonomies against their closed forms, each run timed.

    ``sphere_rotation``: trace angle round the latitude against
    ``2 pi (1 - cos theta0)`` folded into ``[0, pi]``; ``sphere_quarter``:
    the quarter arc against ``|cos theta0| pi / 2``; ``u1_phase``: the
    Wilson-loop phase against ``B pi r^2`` modulo ``2 pi``;
    ``constant_exponential``: the transport on ``[0, 1]`` against
    ``exp(-G0)``. ``runtime`` rows hold the wall time of each run.
    """
    rep = LawReport("holonomy")
    sph = get_entry("sphere_levi_civita", theta0=theta0)
    t0 = time.perf_counter()
    H = transport_matrix(sph.connection, sph.path("latitude"), 0.0, 2 * math.pi, cfg)
    dt = time.perf_counter() - t0
    rep.add("sphere_rotation", "latitude", 0.0, 2 * math.pi,
            abs(rotation_angle(H) - sphere_holonomy_angle(theta0)), tol_angle, via=(rotation_angle(H),))
    rep.add("runtime", "sphere_latitude", NAN, NAN, dt, time_limit)
    Hq = transport_matrix(sph.connection, sph.path("quarter"), 0.0, math.pi / 2, cfg)
    # In the coordinate frame the transport turns by cos(theta0) per unit of
    # longitude; at theta0 = pi/3 this is a quarter of the full holonomy.
    quarter = abs(math.cos(theta0)) * math.pi / 2
    rep.add("sphere_quarter", "quarter", 0.0, math.pi / 2, abs(rotation_angle(Hq) - quarter), tol_angle,
            via=(rotation_angle(Hq),))

    u1 = get_entry("u1_uniform", B=B, radius=radius)
    t0 = time.perf_counter()
    g = wilson_loop(u1.potential, u1.path("circle"), cfg)
    dt = time.perf_counter() - t0
    want = u1_loop_phase(B, radius)
    diff = (g.phase - want + math.pi) % (2 * math.pi) - math.pi
    rep.add("u1_phase", "circle", NAN, NAN, abs(diff), tol_angle, via=(g.phase,))
    rep.add("runtime", "u1_circle", NAN, NAN, dt, time_limit)

    cg = get_entry("constant_gamma") if G0 is None else get_entry("constant_gamma", G0=G0)
    G = np.asarray(cg.params["G0"])
    t0 = time.perf_counter()
    H = transport_matrix(cg.connection, cg.path("line"), 0.0, 1.0, cfg)
    dt = time.perf_counter() - t0
    rep.add("constant_exponential", "line", 0.0, 1.0, frob(H - scipy_expm(-G)), tol_exp)
    rep.add("runtime", "constant_line", NAN, NAN, dt, time_limit)
    return rep


GAUGE_ENTRIES = ("u1_uniform", "su2_constant")


def gauge_suite(entry: CatalogEntry, cfg: IntegratorConfig = IntegratorConfig(), tol: float = DEFAULT_TOL,
                ratio_tol: float = 0.5, dx_size: float = 1e-4) -> LawReport:
    """Group-valued laws, Wilson-loop properties and the infinitesimal expansion for a gauge entry.

    ``ratio_tol = 0.5`` keeps the Richardson ratio inside ``[3.5, 4.5]``.
    """
    A = entry.potential
    if A is None:
        raise ValueError(f"catalog entry {entry.name!r} has no gauge potential")
    rep = LawReport(f"gauge:{entry.name}")
    p1, p2 = entry.pairs[0]
    g1, g2 = entry.path(p1), entry.path(p2)
    check_group_laws(A, g1, g2, cubic(Interval(0.0, 1.0), g1.domain, weight=0.5), tol=tol, cfg=fine(cfg), report=rep)
    for loop_name in entry.loops:
        loop = entry.path(loop_name)
        W = wilson_loop(A, loop, cfg).matrix
        rep.add("wilson_oracle", loop_name, NAN, NAN, frob(W - inverse_matrix(entry.whole_oracle(loop_name))), tol)
        rep.add("wilson_reversal", loop_name, NAN, NAN,
                frob(wilson_loop(A, reparameterize(loop, affine(loop.domain, loop.domain, reverse=True)), cfg).matrix
                     - inverse_matrix(W)), tol)
        c = loop.domain.a + 0.3 * loop.domain.length
        head = canonicalize(restrict(loop, Interval(loop.domain.a, c)))
        g_head = group_transport(A, head, cfg).matrix
        W_moved = wilson_loop(A, rebase_loop(loop, c), cfg).matrix
        rep.add("wilson_conjugation", loop_name, NAN, c, frob(W_moved - inverse_matrix(g_head) @ W @ g_head), tol)
        cl = canonicalize(loop)
        W2 = wilson_loop(A, concat_canonical(cl, cl), cfg).matrix
        rep.add("wilson_concatenation", f"{loop_name}*{loop_name}", NAN, NAN, frob(W2 - W @ W), tol)
    base = np.array([0.3, -0.2])
    for d in ([1.0, 0.0], [0.0, 1.0], [0.6, 0.8]):
        infinitesimal_check(A, base, dx_size * np.asarray(d), tol=ratio_tol, report=rep)
    return rep


# --------------------------------------------------------------------------
# Tensor suite


def tensor_suite(entry: CatalogEntry, cfg: IntegratorConfig = IntegratorConfig(), seed: int = 0,
                 samples: int = 200, alg_tol: float = 1e-12, int_tol: float = 1e-10) -> LawReport:
    """Algebraic laws on the entry's transport matrices and orientation behaviour on its paths."""
    rep = LawReport(f"tensor:{entry.name}")
    rng = np.random.default_rng(seed)
    I = entry.transport(cfg)
    for name, path in entry.paths.items():
        H = I(path, path.domain.a, path.domain.b)
        check_algebraic_laws(H, rng, samples=samples, tol=alg_tol, label=name, report=rep)
    S = STransport(I)
    second = dict(entry.pairs)
    for name, path in entry.paths.items():
        taus = [affine(path.domain, path.domain, reverse=True), affine(Interval(-1.0, 3.0), path.domain)]
        sec = entry.path(second[name]) if name in second else None
        orientation_behavior(S, path, taus, second=sec, tol=int_tol, report=rep)
    return rep


# --------------------------------------------------------------------------
# Convergence


def convergence_suite(entries: Sequence[CatalogEntry] | None = None, steps: Sequence[int] = (250, 500, 1000, 2000),
                      target: float = 2.0, tol: float = 0.3) -> tuple[LawReport, list[ConvergenceStudy]]:
    """Fitted order per entry; an entry with zero error at every step count counts as exact."""
    entries = list(entries) if entries is not None else all_entries()
    rep = LawReport("convergence")
    studies = []
    for e in entries:
        st = convergence_study(e, steps)
        studies.append(st)
        if st.exact:
            rep.add("convergence_exact", st.path, NAN, NAN, max(st.residuals), 1e-13)
        else:
            rep.add("convergence_order", f"{e.name}:{st.path}", NAN, NAN, abs(st.order - target), tol, via=(st.order,))
    return rep, studies


# --------------------------------------------------------------------------
# Registry


SuiteFn = Callable[..., LawReport]

SUITES: dict[str, SuiteFn] = {
    "groupoid": groupoid_suite,
    "locality": catalog_locality_suite,
    "chain": chain_suite,
    "axioms": axiom_suite,
    "reconstruction": reconstruction_suite,
    "roundtrip": roundtrip_suite,
    "gauge": gauge_suite,
    "tensor": tensor_suite,
}

LAW_SUITES = ("groupoid", "locality", "axioms", "gauge", "tensor")
