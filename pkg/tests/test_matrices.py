import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from pathtransport.matrices import (
    closest_special_unitary,
    closest_unitary,
    expm,
    frob,
    ordered_product,
    unitarity_defect,
)


@given(n=st.integers(1, 5), scale=st.floats(1e-3, 8.0), seed=st.integers(0, 2**32 - 1), complex_=st.booleans())
def test_expm_matches_scipy(n, scale, seed, complex_):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    if complex_:
        A = A + 1j * rng.standard_normal((n, n))
    A *= scale / max(1.0, np.linalg.norm(A))
    ref = scipy.linalg.expm(A)
    assert frob(expm(A) - ref) <= 1e-12 * max(1.0, frob(ref))


def test_expm_batched_matches_loop(rng):
    A = rng.standard_normal((7, 3, 3))
    out = expm(A)
    for k in range(7):
        np.testing.assert_allclose(out[k], scipy.linalg.expm(A[k]), rtol=1e-12, atol=1e-13)


def test_expm_of_zero_and_nilpotent():
    np.testing.assert_array_equal(expm(np.zeros((3, 3))), np.eye(3))
    N = np.array([[0.0, 2.0], [0.0, 0.0]])
    np.testing.assert_allclose(expm(N), [[1.0, 2.0], [0.0, 1.0]], atol=1e-15)


def test_ordered_product_order(rng):
    F = rng.standard_normal((9, 2, 2))
    ref = np.eye(2)
    for k in range(9):
        ref = F[k] @ ref
    np.testing.assert_allclose(ordered_product(F), ref, rtol=1e-12, atol=1e-12)


def test_projections_land_on_group(rng):
    U = scipy.linalg.expm(1j * (lambda h: h + h.conj().T)(rng.standard_normal((2, 2))))
    noisy = U + 1e-6 * rng.standard_normal((2, 2))
    assert unitarity_defect(closest_unitary(noisy)) < 1e-13
    S = closest_special_unitary(noisy)
    assert unitarity_defect(S) < 1e-13
    assert abs(np.linalg.det(S) - 1) < 1e-13


def test_frob():
    assert frob(np.array([[3.0, 4.0]])) == pytest.approx(5.0)
