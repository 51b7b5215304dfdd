"""Lifting a fibre transport to the tensor algebra over the fibre.

A ``(p, q)`` tensor stores ``p`` contravariant slots followed by ``q``
covariant slots as a dense array of shape ``(n,) * (p + q)``. A base
transport matrix ``H`` acts by ``H`` on each contravariant slot and by
``(H^{-1})^T`` on each covariant slot. This is the unique multilinear
extension that distributes over tensor products, commutes with
contractions and fixes scalars.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import RankError
from .matrices import frob
from .paths import (
    PathSpec,
    Reparameterization,
    canonicalize,
    concat_canonical,
    point_path,
    reparameterize,
    reverse_canonical,
)
from .report import LawReport
from .transport import TransportFamily, TransportMatrix, inverse_matrix

MAX_RANK = 4


@dataclass(frozen=True, eq=False)
class Tensor:
    p: int
    q: int
    entries: np.ndarray

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if p < 0 or q < 0:
            raise RankError("tensor ranks must be non-negative")
        if p + q > MAX_RANK:
            raise RankError(f"total rank {p + q} exceeds the supported maximum {MAX_RANK}")
        e = np.asarray(self.entries)
        if e.ndim != p + q or (e.ndim and len(set(e.shape)) != 1):
            raise RankError(f"entries of shape {e.shape} do not form a ({p},{q}) tensor")
        if not np.all(np.isfinite(e)):
            raise RankError("tensor entries must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int | None:
        return self.entries.shape[0] if self.entries.ndim else None

    @property
    def rank(self) -> tuple[int, int]:
        return self.p, self.q

    def __add__(self, other: "Tensor") -> "Tensor":
        _same_rank(self, other)
        return Tensor(self.p, self.q, self.entries + other.entries)

    def __sub__(self, other: "Tensor") -> "Tensor":
        _same_rank(self, other)
        return Tensor(self.p, self.q, self.entries - other.entries)

    def __rmul__(self, lam) -> "Tensor":
        return Tensor(self.p, self.q, lam * self.entries)

    @classmethod
    def scalar(cls, value) -> "Tensor":
        return cls(0, 0, np.asarray(value))

    @classmethod
    def vector(cls, v) -> "Tensor":
        return cls(1, 0, np.asarray(v))

    @classmethod
    def covector(cls, w) -> "Tensor":
        return cls(0, 1, np.asarray(w))


def _same_rank(a: Tensor, b: Tensor) -> None:
    if a.rank != b.rank or a.entries.shape != b.entries.shape:
        raise RankError(f"rank mismatch: ({a.p},{a.q}) vs ({b.p},{b.q})")


def tensor_product(A: Tensor, B: Tensor) -> Tensor:
    """``A (x) B`` with contravariant slots of both factors first, then covariant ones."""
    if A.n is not None and B.n is not None and A.n != B.n:
        raise RankError("tensor factors live over different fibre dimensions")
    outer = np.multiply.outer(A.entries, B.entries)
    pa, qa, pb = A.p, A.q, B.p
    axes = (list(range(pa)) + list(range(pa + qa, pa + qa + pb))
            + list(range(pa, pa + qa)) + list(range(pa + qa + pb, outer.ndim)))
    return Tensor(A.p + B.p, A.q + B.q, np.transpose(outer, axes))


def contract(T: Tensor, slot_up: int = 0, slot_down: int = 0) -> Tensor:
    """Trace contravariant slot ``slot_up`` against covariant slot ``slot_down``."""
    if not (0 <= slot_up < T.p and 0 <= slot_down < T.q):
        raise RankError(f"cannot contract slots ({slot_up}, {slot_down}) of a ({T.p},{T.q}) tensor")
    return Tensor(T.p - 1, T.q - 1, np.trace(T.entries, axis1=slot_up, axis2=T.p + slot_down))


def pairing(w: Tensor, v: Tensor) -> complex:
    """``<w, v>`` for a covector and a vector."""
    if w.rank != (0, 1) or v.rank != (1, 0):
        raise RankError("pairing needs a (0,1) tensor and a (1,0) tensor")
    return contract(tensor_product(v, w)).entries[()]


def identity_tensor(n: int) -> Tensor:
    return Tensor(1, 1, np.eye(n))


@dataclass(frozen=True, eq=False)
class STransportMap:
    """Action of a base transport on ``(p, q)`` tensors."""

    base: TransportMatrix
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.p + self.q > MAX_RANK:
            raise RankError(f"unsupported rank ({self.p},{self.q})")
        object.__setattr__(self, "_dual", inverse_matrix(self.base.matrix, "base transport").T)

    def slot_matrices(self) -> list[np.ndarray]:
        return [self.base.matrix] * self.p + [self._dual] * self.q

    def for_rank(self, p: int, q: int) -> "STransportMap":
        return STransportMap(self.base, p, q)

    def apply(self, T: Tensor) -> Tensor:
        if T.rank != (self.p, self.q):
            raise RankError(f"map acts on ({self.p},{self.q}) tensors, got ({T.p},{T.q})")
        if T.n is not None and T.n != self.base.n:
            raise RankError("tensor and transport have different fibre dimensions")
        out = T.entries
        for k, M in enumerate(self.slot_matrices()):
            out = np.moveaxis(np.tensordot(M, out, axes=([1], [k])), 0, k)
        return Tensor(self.p, self.q, out)

    __call__ = apply

    def operator(self) -> np.ndarray:
        """Matrix on flattened (row-major) tensor entries: the Kronecker product of slot matrices."""
        mats = self.slot_matrices()
        if not mats:
            return np.eye(1)
        return reduce(np.kron, mats)


def lift(H: TransportMatrix | np.ndarray, p: int, q: int) -> STransportMap:
    if not isinstance(H, TransportMatrix):
        H = TransportMatrix(0.0, 1.0, np.asarray(H))
    return STransportMap(H, p, q)


def apply_tensor(S: STransportMap, T: Tensor) -> Tensor:
    return S.apply(T)


def act(H: TransportMatrix | np.ndarray, T: Tensor) -> Tensor:
    """Apply the lift of ``H`` at the rank of ``T``."""
    return lift(H, T.p, T.q).apply(T)


class STransport:
    """Tensor-algebra transport ``S^gamma_{s->t}`` built on a base family."""

    def __init__(self, base: TransportFamily):
        self.base = base
        self.name = f"S[{base.name}]"

    def __call__(self, path: PathSpec, s: float, t: float, p: int, q: int) -> STransportMap:
        return lift(self.base(path, s, t), p, q)

    def whole(self, path: PathSpec, p: int, q: int) -> STransportMap:
        """``phi_path``: the lift of the transport from start to end."""
        return self(path, path.domain.a, path.domain.b, p, q)


# --------------------------------------------------------------------------
# Law checks


def random_tensor(rng: np.random.Generator, p: int, q: int, n: int) -> Tensor:
    return Tensor(p, q, rng.standard_normal((n,) * (p + q)))


def ranks_up_to(total: int) -> list[tuple[int, int]]:
    return [(p, k - p) for k in range(total + 1) for p in range(k + 1)]


def check_algebraic_laws(H: TransportMatrix | np.ndarray, rng: np.random.Generator, samples: int = 200,
                         max_total: int = 3, tol: float = 1e-12, label: str = "H",
                         report: LawReport | None = None) -> LawReport:
    """Linearity, tensor-product distribution, contraction commutation,
    scalar identity and pairing preservation on random tensors.

    Residuals are relative to the size of the compared quantities.
    """
    if not isinstance(H, TransportMatrix):
        H = TransportMatrix(0.0, 1.0, np.asarray(H))
    n = H.n
    rep = report if report is not None else LawReport(f"tensor:{label}")
    nan = float("nan")
    ranks = ranks_up_to(max_total)

    def rel(x: np.ndarray, y: np.ndarray) -> float:
        return frob(x - y) / max(1.0, frob(y))

    for k in range(samples):
        p, q = ranks[k % len(ranks)]
        T1, T2 = random_tensor(rng, p, q, n), random_tensor(rng, p, q, n)
        l1, l2 = rng.standard_normal(2)
        S = lift(H, p, q)
        lhs = S(l1 * T1 + l2 * T2).entries
        rep.add("linearity", label, nan, nan, rel(lhs, l1 * S(T1).entries + l2 * S(T2).entries), tol)

        pa = int(rng.integers(0, p + 1))
        qa = int(rng.integers(0, q + 1))
        A = random_tensor(rng, pa, qa, n)
        B = random_tensor(rng, p - pa, q - qa, n)
        both = act(H, tensor_product(A, B)).entries
        rep.add("tensor_product", label, nan, nan, rel(both, tensor_product(act(H, A), act(H, B)).entries), tol)

        if p >= 1 and q >= 1:
            i, j = int(rng.integers(0, p)), int(rng.integers(0, q))
            rep.add("contraction", label, nan, nan,
                    rel(contract(S(T1), i, j).entries, act(H, contract(T1, i, j)).entries), tol)

        c = Tensor.scalar(rng.standard_normal())
        rep.add("scalar_identity", label, nan, nan, abs(act(H, c).entries - c.entries), 0.0)

        v, w = random_tensor(rng, 1, 0, n), random_tensor(rng, 0, 1, n)
        ref = pairing(w, v)
        rep.add("pairing", label, nan, nan, abs(pairing(act(H, w), act(H, v)) - ref) / max(1.0, abs(ref)), tol)
    return rep


def orientation_behavior(S: STransport, path: PathSpec, taus: Sequence[Reparameterization] = (),
                         second: PathSpec | None = None, max_total: int = 3, tol: float = 1e-10,
                         report: LawReport | None = None) -> LawReport:
    """Orientation and product laws for ``phi_eta = S^eta_{a->b}`` on every rank up to ``max_total``.

    Rows: ``orientation_preserving`` (``phi_{eta o tau} = phi_eta``),
    ``orientation_reversing`` (``phi_{eta o tau} = phi_eta^{-1}``),
    ``canonical_inverse`` (``phi_{eta_-} = phi_eta^{-1}``), ``point_path``
    (identity), and, when ``second`` is given, ``product``
    (``phi_{eta1 eta2} = phi_{eta2} o phi_{eta1}``) with the opposite order
    in the informational ``product_swapped`` row.
    """
    rep = report if report is not None else LawReport(f"orientation:{path.label or 'path'}")
    label = path.label or "path"
    nan = float("nan")

    def whole(eta: PathSpec) -> TransportMatrix:
        return S.base(eta, eta.domain.a, eta.domain.b)

    canon = canonicalize(path)
    H = whole(path)
    Hc = whole(canon)
    Hrev = whole(reverse_canonical(canon))
    Hpt = whole(point_path(path(path.domain.a), path.domain.a))
    moved = [(tau, whole(reparameterize(path, tau))) for tau in taus]
    if second is not None:
        c2 = canonicalize(second)
        H2 = whole(c2)
        H12 = whole(concat_canonical(canon, c2))
    for p, q in ranks_up_to(max_total):
        tag = f"{label}[{p},{q}]"
        base = lift(H, p, q).operator()
        eye = np.eye(len(base))
        for tau, Ht in moved:
            op = lift(Ht, p, q).operator()
            if tau.orientation == "preserving":
                rep.add("orientation_preserving", f"{tag}o{tau.label}", nan, nan, frob(op - base), tol)
            else:
                rep.add("orientation_reversing", f"{tag}o{tau.label}", nan, nan, frob(op @ base - eye), tol)
        rep.add("canonical_inverse", tag, nan, nan,
                frob(lift(Hrev, p, q).operator() - inverse_matrix(lift(Hc, p, q).operator())), tol)
        rep.add("point_path", tag, nan, nan, frob(lift(Hpt, p, q).operator() - eye), tol)
        if second is not None:
            m1 = lift(Hc, p, q).operator()
            m2 = lift(H2, p, q).operator()
            m12 = lift(H12, p, q).operator()
            pl = f"{label}*{second.label or 'path'}[{p},{q}]"
            rep.add("product", pl, nan, nan, frob(m12 - m2 @ m1), tol)
            rep.add("product_swapped", pl, nan, nan, frob(m12 - m1 @ m2), tol, informational=True)
    return rep
