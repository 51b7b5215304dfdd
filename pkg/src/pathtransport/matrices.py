"""Batched small-matrix kernels used by the integrators.

The transports integrate thousands of tiny (n <= 4 or so) matrix
exponentials per call, so everything here works on stacks of matrices
with shape ``(..., n, n)`` and avoids Python-level loops over the stack.
"""
from __future__ import annotations

import numpy as np

# Pade coefficients and backward-error bounds from Higham (2005),
# "The scaling and squaring method for the matrix exponential revisited".
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0,
    ),
    13: (
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0,
    ),
}
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_uv(A: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    b = _PADE[m]
    eye = np.broadcast_to(np.eye(A.shape[-1], dtype=A.dtype), A.shape)
    A2 = A @ A
    if m < 13:
        powers = [eye, A2]
        while len(powers) < (m + 1) // 2:
            powers.append(powers[-1] @ A2)
        u = sum(b[2 * k + 1] * powers[k] for k in range(len(powers)))
        v = sum(b[2 * k] * powers[k] for k in range(len(powers)))
        return A @ u, v
    A4 = A2 @ A2
    A6 = A4 @ A2
    u = A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye
    v = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye
    return A @ u, v


def _solve(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """``P^{-1} Q`` for stacks; closed-form inverses for 1x1 and 2x2 blocks.

    The Pade denominators are well conditioned by construction, so the
    adjugate formula loses nothing against a pivoted solve at these sizes.
    """
    n = P.shape[-1]
    if n == 1:
        return Q / P
    if n == 2:
        a, b = P[..., 0, 0], P[..., 0, 1]
        c, d = P[..., 1, 0], P[..., 1, 1]
        det = (a * d - b * c)[..., None, None]
        adj = np.stack([np.stack([d, -b], -1), np.stack([-c, a], -1)], -2)
        return (adj @ Q) / det
    return np.linalg.solve(P, Q)


def expm(A) -> np.ndarray:
    """Matrix exponential of a single matrix or a stack of matrices.

    Scaling and squaring with a diagonal Pade approximant whose degree is
    picked from the largest 1-norm in the stack. All matrices in the stack
    share one scaling exponent, which is fine for the integrators (their
    per-step generators have comparable norms).
    """
    A = np.asarray(A)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {A.shape}")
    if not np.issubdtype(A.dtype, np.inexact):
        A = A.astype(float)
    if A.size == 0:
        return A.copy()
    norm = float(np.max(np.sum(np.abs(A), axis=-2))) if A.shape[-1] else 0.0
    if not np.isfinite(norm):
        raise FloatingPointError("non-finite entries in matrix exponential argument")
    squarings = 0
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            break
    else:
        m = 13
        if norm > _THETA[13]:
            squarings = int(np.ceil(np.log2(norm / _THETA[13])))
            A = A / 2.0**squarings
    u, v = _pade_uv(A, m)
    R = _solve(v - u, v + u)
    for _ in range(squarings):
        R = R @ R
    return R


def ordered_product(factors: np.ndarray, project=None) -> np.ndarray:
    """Return ``F[N-1] @ ... @ F[1] @ F[0]`` for a stack ``F`` of shape (N, n, n).

    Later factors multiply from the left. The product is formed by pairwise
    reduction, so it costs about log2(N) batched matmuls. ``project`` is an
    optional callable applied to every intermediate stack (used to keep
    unitary products on the group).
    """
    m = np.asarray(factors)
    if m.shape[0] == 0:
        raise ValueError("empty product")
    while m.shape[0] > 1:
        tail = None
        if m.shape[0] % 2:
            tail, m = m[-1:], m[:-1]
        # overflow surfaces as inf entries, which callers check for
        with np.errstate(over="ignore", invalid="ignore"):
            m = m[1::2] @ m[0::2]
        if tail is not None:
            m = np.concatenate([m, tail])
        if project is not None:
            m = project(m)
    return m[0]


def closest_unitary(U: np.ndarray) -> np.ndarray:
    """Polar projection onto the unitary (orthogonal, for real input) matrices."""
    w, _, vh = np.linalg.svd(U)
    return w @ vh


def closest_special_unitary(U: np.ndarray) -> np.ndarray:
    W = closest_unitary(U)
    n = W.shape[-1]
    det = np.linalg.det(W)
    return W / (det ** (1.0 / n))[..., None, None]


def unitarity_defect(U: np.ndarray) -> float:
    """Largest ``||U^H U - I||_F`` over a stack."""
    U = np.asarray(U)
    eye = np.eye(U.shape[-1])
    d = np.conj(np.swapaxes(U, -1, -2)) @ U - eye
    return float(np.max(np.linalg.norm(d, axis=(-2, -1))))


def frob(A) -> float:
    return float(np.linalg.norm(np.asarray(A)))
