"""Lorentz four-vectors, 2x2 matrix coordinates and the tube domain.

The matrix picture is canonical here: a four-vector z = (z0, z1, z2, z3)
maps to

    Z = [[z0 + z3, z1 - i z2],
         [z1 + i z2, z0 - z3]]

so that det Z equals the complex-bilinear Lorentz square <z, z>.  The tube
is the set of matrices whose Hermitian imaginary part (Z - Z^H)/2i is
positive definite; tuples belong componentwise.  All values are plain
numpy arrays: a matrix point is (2, 2) complex, a tuple point (N, 2, 2).
"""

import numpy as np

__all__ = [
    "DomainError",
    "IDENTITY",
    "lorentz_product",
    "to_matrix",
    "from_matrix",
    "det2",
    "inv2",
    "adj2",
    "hermitian_im",
    "det_im",
    "is_positive_definite",
    "as_tuple_point",
    "tube_membership",
    "tube_margin",
    "matrix_lorentz_product",
    "sample_four_vector",
    "sample_hermitian",
    "sample_tube_matrix",
    "sample_tube_point",
]


class DomainError(ValueError):
    """Raised when a point leaves the domain of the requested quantity."""


IDENTITY = np.eye(2, dtype=complex)


def lorentz_product(z, w):
    """Complex-bilinear product z0*w0 - z1*w1 - z2*w2 - z3*w3."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return complex(z[0] * w[0] - z[1] * w[1] - z[2] * w[2] - z[3] * w[3])


def to_matrix(z):
    """Matrix coordinates of a four-vector; det(to_matrix(z)) = <z, z>."""
    z = np.asarray(z, dtype=complex)
    return np.array(
        [
            [z[0] + z[3], z[1] - 1j * z[2]],
            [z[1] + 1j * z[2], z[0] - z[3]],
        ]
    )


def from_matrix(Z):
    """Inverse of to_matrix."""
    Z = np.asarray(Z, dtype=complex)
    x, y = Z[0, 0], Z[0, 1]
    w, v = Z[1, 0], Z[1, 1]
    return np.array(
        [
            (x + v) / 2,
            (y + w) / 2,
            (w - y) / (2j),
            (x - v) / 2,
        ]
    )


def det2(M):
    """Determinant of 2x2 matrices, vectorized over leading axes."""
    M = np.asarray(M)
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def adj2(M):
    """Adjugate of 2x2 matrices; M @ adj2(M) = det2(M) * I."""
    M = np.asarray(M)
    out = np.empty_like(M)
    out[..., 0, 0] = M[..., 1, 1]
    out[..., 0, 1] = -M[..., 0, 1]
    out[..., 1, 0] = -M[..., 1, 0]
    out[..., 1, 1] = M[..., 0, 0]
    return out


def inv2(M):
    d = det2(M)
    return adj2(M) / d[..., None, None]


def hermitian_im(Z):
    """(Z - Z^H)/2i, built exactly Hermitian: real diagonal, one stored
    off-diagonal value and its conjugate."""
    Z = np.asarray(Z, dtype=complex)
    H = np.empty_like(Z)
    H[..., 0, 0] = Z[..., 0, 0].imag
    H[..., 1, 1] = Z[..., 1, 1].imag
    b = (Z[..., 0, 1] - np.conj(Z[..., 1, 0])) * (-0.5j)
    H[..., 0, 1] = b
    H[..., 1, 0] = np.conj(b)
    return H


def det_im(Z):
    """det(hermitian_im(Z)) computed in real arithmetic."""
    Z = np.asarray(Z, dtype=complex)
    a = Z[..., 0, 0].imag
    d = Z[..., 1, 1].imag
    b = (Z[..., 0, 1] - np.conj(Z[..., 1, 0])) * 0.5
    return a * d - (b.real**2 + b.imag**2)


def is_positive_definite(H):
    """Leading-minor test for a 2x2 Hermitian matrix."""
    H = np.asarray(H)
    a = H[0, 0].real
    d = H[1, 1].real
    det = a * d - abs(H[0, 1]) ** 2
    return bool(a > 0 and det > 0)


def as_tuple_point(Z):
    """Coerce a (2,2) matrix or an (N,2,2) stack to tuple-point shape."""
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim == 2:
        Z = Z[None, :, :]
    if Z.ndim != 3 or Z.shape[1:] != (2, 2):
        raise ValueError(f"expected (N,2,2) tuple point, got shape {Z.shape}")
    return Z


def tube_membership(Z):
    """True iff every component has positive definite Hermitian imaginary part."""
    Z = as_tuple_point(Z)
    a = Z[..., 0, 0].imag
    return bool(np.all(a > 0) and np.all(det_im(Z) > 0))


def tube_margin(Z):
    """Smallest eigenvalue of hermitian_im over all components.

    Positive exactly on the tube; used as a robust membership margin.
    """
    Z = as_tuple_point(Z)
    a = Z[..., 0, 0].imag
    d = Z[..., 1, 1].imag
    b = (Z[..., 0, 1] - np.conj(Z[..., 1, 0])) * 0.5
    rad = np.sqrt((a - d) ** 2 + 4.0 * (b.real**2 + b.imag**2))
    return float(np.min((a + d - rad) / 2.0))


def matrix_lorentz_product(Z, W):
    """Symmetric bilinear form polarizing det: (det(Z+W) - det Z - det W)/2."""
    Z = np.asarray(Z, dtype=complex)
    W = np.asarray(W, dtype=complex)
    return complex((det2(Z + W) - det2(Z) - det2(W)) / 2)


def sample_four_vector(rng):
    """Four complex components with standard-normal real and imaginary parts."""
    return rng.complex_normals(4)


def sample_hermitian(rng):
    """Hermitian 2x2: real normal diagonal, one complex normal off-diagonal."""
    a = rng.normal()
    d = rng.normal()
    q = rng.normal() + 1j * rng.normal()
    return np.array([[a, q], [np.conj(q), d]])


def sample_tube_matrix(rng):
    """Random tube member Z = R + iP, P = A A^H + 0.1 I positive definite.

    The 0.1 margin keeps samples away from the boundary of the cone.
    """
    A = rng.matrix()
    P = A @ A.conj().T + 0.1 * IDENTITY
    R = sample_hermitian(rng)
    return R + 1j * P


def sample_tube_point(rng, n):
    return np.stack([sample_tube_matrix(rng) for _ in range(n)])
