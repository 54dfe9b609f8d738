"""SL2(C), SU(2) and their actions on tuples of 2x2 matrices.

The real group acts by g * Z = g Z conj(g)^t componentwise; its
complexification SL2 x SL2 acts by (g, h) * Z = g Z h^t, and the real
form sits inside the product as g -> (g, conj(g)).  The real Lie algebra
sl2(C) is handled as six real coordinates over the fixed ordered basis

    e1 = [[1,0],[0,-1]]   e2 = [[0,1],[0,0]]   e3 = [[0,0],[1,0]]
    e4 = i e1             e5 = i e2            e6 = i e3

which pins the components of moment values across implementations.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import IDENTITY, as_tuple_point, det2, adj2

__all__ = [
    "BASIS",
    "GroupPair",
    "realize",
    "coefficients",
    "expm_traceless",
    "exp_algebra",
    "make_unimodular",
    "act_real",
    "act_complex",
    "flow_pair",
    "flow_point",
    "real_vector_field",
    "apply_J",
    "conjugation_action",
    "adjoint",
    "sample_sl2",
    "sample_su2",
    "sample_algebra",
]

_E1 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_E2 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_E3 = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

BASIS = np.stack([_E1, _E2, _E3, 1j * _E1, 1j * _E2, 1j * _E3])
BASIS_DAG = np.conj(np.swapaxes(BASIS, -1, -2))


def realize(xi):
    """Matrix of an algebra vector: sum of c_k e_k (traceless by basis)."""
    xi = np.asarray(xi, dtype=float)
    return np.tensordot(xi, BASIS, axes=(0, 0))


def coefficients(X):
    """Basis coordinates of a traceless complex 2x2 matrix (exact)."""
    X = np.asarray(X, dtype=complex)
    p = (X[0, 0] - X[1, 1]) / 2
    q = X[0, 1]
    r = X[1, 0]
    return np.array([p.real, q.real, r.real, p.imag, q.imag, r.imag])


def expm_traceless(M):
    """exp of a traceless 2x2: cosh(d) I + sinh(d)/d M with d^2 = -det M.

    Below |d| = 1e-6 a degree-4 series is used; the two branches agree to
    better than 1e-12 in the overlap.
    """
    M = np.asarray(M, dtype=complex)
    dsq = -det2(M)
    d = np.sqrt(dsq)
    if abs(d) < 1e-6:
        c = 1.0 + dsq / 2.0 + dsq * dsq / 24.0
        s = 1.0 + dsq / 6.0 + dsq * dsq / 120.0
    else:
        c = np.cosh(d)
        s = np.sinh(d) / d
    return c * IDENTITY + s * M


def exp_algebra(xi, t=1.0):
    """Matrix exponential of t * xi for an algebra vector xi."""
    return expm_traceless(t * realize(xi))


def make_unimodular(g):
    """Scale to det 1 with the principal square root of the determinant."""
    g = np.asarray(g, dtype=complex)
    d = det2(g)
    if abs(d) < 1e-12:
        raise ValueError("matrix is numerically singular, cannot normalize det")
    return g / np.sqrt(d)


@dataclass(frozen=True)
class GroupPair:
    """Element (g, h) of SL2 x SL2; factors are det-normalized on make()."""

    g: np.ndarray
    h: np.ndarray

    @classmethod
    def make(cls, g, h):
        return cls(make_unimodular(g), make_unimodular(h))

    @classmethod
    def real_form(cls, g):
        g = make_unimodular(g)
        return cls(g, np.conj(g))

    @classmethod
    def identity(cls):
        return cls(IDENTITY.copy(), IDENTITY.copy())

    def inverse(self):
        # det 1, so the inverse is the adjugate (exact)
        return GroupPair(adj2(self.g), adj2(self.h))


def _apply(a, Z, b):
    """a @ Z @ b preserving (2,2) versus (N,2,2) input shape."""
    Z = np.asarray(Z, dtype=complex)
    return a @ Z @ b


def act_real(g, Z):
    """Real action g * Z = g Z conj(g)^t componentwise."""
    g = np.asarray(g, dtype=complex)
    return _apply(g, Z, g.conj().T)


def act_complex(p, Z):
    """Complexified action (g, h) * Z = g Z h^t componentwise."""
    if isinstance(p, GroupPair):
        g, h = p.g, p.h
    else:
        g, h = p
    return _apply(np.asarray(g, dtype=complex), Z, np.asarray(h, dtype=complex).T)


def flow_pair(xi, tau):
    """Group pair exp(tau * (xi, conj(xi))) for complex time tau.

    Real tau gives the real one-parameter flow, tau = i t the transverse
    flow along the complexified direction.
    """
    X = realize(xi)
    return expm_traceless(tau * X), expm_traceless(tau * np.conj(X))


def flow_point(xi, tau, Z):
    """Point moved by flow_pair(xi, tau)."""
    A, B = flow_pair(xi, tau)
    return _apply(A, Z, B.T)


def real_vector_field(xi, Z):
    """d/dt at 0 of act_real(exp(t xi), Z): xi Z + Z xi^H componentwise."""
    X = realize(xi)
    Z = np.asarray(Z, dtype=complex)
    return X @ Z + Z @ X.conj().T


def apply_J(V):
    """Ambient complex structure: multiply every entry by i."""
    return 1j * np.asarray(V, dtype=complex)


def conjugation_action(g, X):
    """g X g^{-1} for unimodular g (inverse via adjugate)."""
    g = np.asarray(g, dtype=complex)
    return g @ np.asarray(X, dtype=complex) @ adj2(g)


def adjoint(g, xi):
    """Ad(g) xi expressed back in the fixed basis (exact linear algebra)."""
    return coefficients(conjugation_action(g, realize(xi)))


def sample_sl2(rng):
    """Random SL2(C) element: complex normal matrix, det-normalized."""
    while True:
        M = rng.matrix()
        if abs(det2(M)) > 1e-3:
            return make_unimodular(M)


def sample_su2(rng):
    """Random SU(2) element from a normalized complex normal pair."""
    while True:
        a = rng.normal() + 1j * rng.normal()
        b = rng.normal() + 1j * rng.normal()
        n = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if n > 1e-6:
            a, b = a / n, b / n
            return np.array([[a, b], [-np.conj(b), np.conj(a)]])


def sample_algebra(rng):
    """Six standard-normal basis coefficients."""
    return rng.normals(6)


def full_tangent_basis(n):
    """The 4n unit matrix directions of an n-tuple tangent space.

    Order: component index, then entries (0,0), (0,1), (1,0), (1,1).
    """
    out = np.zeros((4 * n, n, 2, 2), dtype=complex)
    k = 0
    for j in range(n):
        for r in range(2):
            for c in range(2):
                out[k, j, r, c] = 1.0
                k += 1
    return out


def orbit_fields(Z):
    """Stack of the six basis vector fields at Z, shape (6, N, 2, 2)."""
    Z = as_tuple_point(Z)
    return np.einsum("kab,nbc->knac", BASIS, Z) + np.einsum(
        "nab,kbc->knac", Z, BASIS_DAG
    )
