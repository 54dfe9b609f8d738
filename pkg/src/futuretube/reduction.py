"""Orbit minimization of the potential and the minimum-principle checks.

The minimizer descends along the six transverse directions exp(i s xi),
using the moment value itself as the gradient: mu_xi is exactly the
derivative of phi along exp(i t xi).  The potential is its own barrier,
so trial steps leaving the tube are rejected by the line search.  Reduced
points realize the fiberwise minimum, and the checks below grade the
structure expected there: vanishing symplectic form on the real orbit,
positive normal Hessian, and the Levi identity between the fiberwise
minimum and the potential on a metric-orthogonal section.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import DomainError, as_tuple_point, tube_membership
from .actions import GroupPair, apply_J, flow_pair, make_unimodular, orbit_fields, full_tangent_basis
from .psh import dphi, levi_form, levi_form_phi, moment_map, omega_eval, phi
from .quotient import gram_map

__all__ = [
    "ConvergenceError",
    "ReduceOptions",
    "ReductionResult",
    "orbit_minimize",
    "big_psi",
    "LagrangianReport",
    "lagrangian_check",
    "CriticalityReport",
    "critical_iff_moment_zero",
    "SectionProbe",
    "section_probe",
    "SectionLeviReport",
    "section_levi_identity",
]


class ConvergenceError(RuntimeError):
    """The orbit minimizer did not reach the requested moment tolerance."""


@dataclass
class ReduceOptions:
    moment_tol: float = 1e-8
    max_iters: int = 2000
    armijo: float = 1e-4
    shrink: float = 0.5
    step_init: float = 1.0
    step_floor: float = 1e-18


@dataclass
class ReductionResult:
    start: np.ndarray
    minimizer: GroupPair
    reduced_point: np.ndarray
    phi_min: float
    moment_norm: float
    converged: bool
    iterations: int


def _transverse_direction(P, m):
    """Descent direction in the exp(i g) chart from the moment value.

    The derivative of the moment along the chart is the normal Hessian
    J_kl = omega(field_k, J field_l) = 4 Re <field_k, field_l>_Levi, so a
    damped solve of J c = mu gives a Newton step for the zero of the
    moment.  The damping 0.01 |mu| handles the gauge directions where
    the fields degenerate (point stabilizers); the raw moment value is
    the fallback if the solve misbehaves.  Either way <mu, xi> < 0, a
    phi-descent direction.
    """
    F = orbit_fields(P)
    J = 4.0 * np.real(levi_form_phi(P, F).entries)
    lam = 0.01 * float(np.linalg.norm(m)) + 1e-300
    try:
        c = np.linalg.solve(J + lam * np.eye(6), m)
    except np.linalg.LinAlgError:
        return -m, -float(m @ m)
    deriv = -float(m @ c)
    if not np.isfinite(deriv) or deriv >= 0.0:
        return -m, -float(m @ m)
    return -c, deriv


def orbit_minimize(Z, opts=None):
    """Minimize phi over the local complexified orbit of Z.

    Moves are Z <- exp(i s xi) . Z with xi from the negated moment value,
    preconditioned by the analytic normal Hessian, accepted under an
    Armijo test on phi; membership failures reject the trial.  Converged
    means the moment norm fell below opts.moment_tol.  Non-convergence is
    reported through the flag, not raised: it signals either an exhausted
    budget or a fiber whose infimum this probe did not attain.
    """
    if opts is None:
        opts = ReduceOptions()
    Z0 = as_tuple_point(Z)
    if not tube_membership(Z0):
        raise DomainError("orbit_minimize starts from a tube point")

    P = Z0.copy()
    g = np.eye(2, dtype=complex)
    h = np.eye(2, dtype=complex)
    converged = False
    it = 0
    m = moment_map(P)
    mn = float(np.linalg.norm(m))
    cur = phi(P)
    while it < opts.max_iters:
        if mn <= opts.moment_tol:
            converged = True
            break
        xi, deriv = _transverse_direction(P, m)
        # fresh unit trial step: the damped solve is a natural Newton step
        s = opts.step_init
        accepted = False
        while s >= opts.step_floor:
            A, B = flow_pair(xi, 1j * s)
            Pt = A @ P @ B.T
            if tube_membership(Pt):
                ft = phi(Pt)
                if ft <= cur + opts.armijo * s * deriv:
                    accepted = True
                    break
            s *= opts.shrink
        if not accepted:
            break
        P = Pt
        cur = ft
        g = make_unimodular(A @ g)
        h = make_unimodular(B @ h)
        it += 1
        m = moment_map(P)
        mn = float(np.linalg.norm(m))
    if mn <= opts.moment_tol:
        converged = True

    return ReductionResult(
        start=Z0,
        minimizer=GroupPair(g, h),
        reduced_point=P,
        phi_min=cur,
        moment_norm=mn,
        converged=converged,
        iterations=it,
    )


def big_psi(Z, opts=None, witness=None):
    """Infimum of phi over the local orbit: the induced quotient function.

    For a point outside the tube the caller must supply a tube witness on
    the same fiber (checked through the Gram image).
    """
    Z = as_tuple_point(Z)
    if witness is None:
        if not tube_membership(Z):
            raise DomainError("witness translate required for points outside the tube")
        witness = Z
    else:
        witness = as_tuple_point(witness)
        if not tube_membership(witness):
            raise ValueError("witness must lie in the tube")
        gz, gw = gram_map(Z), gram_map(witness)
        if np.linalg.norm(gw - gz) > 1e-6 * (1.0 + np.linalg.norm(gz)):
            raise ValueError("witness lies on a different fiber (Gram mismatch)")
    r = orbit_minimize(witness, opts)
    if not r.converged:
        raise ConvergenceError(f"moment norm {r.moment_norm:.2e} after {r.iterations} iterations")
    return r.phi_min


def _real_rank(vectors, tol=1e-6):
    if len(vectors) == 0:
        return 0
    M = np.stack([np.concatenate([v.ravel().real, v.ravel().imag]) for v in vectors])
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


@dataclass
class LagrangianReport:
    max_omega: float
    orbit_dim: int
    complex_orbit_dim: int
    dimension_ok: bool
    passed: bool


def lagrangian_check(R, tol=1e-5):
    """Grade isotropy of the real orbit through a reduced point.

    Evaluates omega on all basis field pairs and checks the dimension side
    condition: the real orbit span is half the real dimension of the
    complex orbit span (Lagrangian inside the fiber).
    """
    if not R.converged:
        raise ValueError("lagrangian_check needs a converged reduction")
    Zr = R.reduced_point
    F = orbit_fields(Zr)
    scale = 1.0 + float(np.linalg.norm(Zr))
    live = [k for k in range(6) if np.linalg.norm(F[k]) > 1e-10 * scale]
    worst = 0.0
    for a in range(len(live)):
        for b in range(a + 1, len(live)):
            worst = max(worst, abs(omega_eval(Zr, F[live[a]], F[live[b]])))
    rank_real = _real_rank([F[k] for k in live])
    rank_complex = _real_rank([F[k] for k in live] + [1j * F[k] for k in live])
    dimension_ok = 2 * rank_real == rank_complex
    return LagrangianReport(
        max_omega=worst,
        orbit_dim=rank_real,
        complex_orbit_dim=rank_complex,
        dimension_ok=dimension_ok,
        passed=bool(worst <= tol and dimension_ok),
    )


@dataclass
class CriticalityReport:
    moment_norm: float
    orbit_gradient_norm: float
    consistent: bool


def critical_iff_moment_zero(Z, tol=1e-6):
    """Compare the moment norm with the orbit-restricted gradient of phi.

    The twelve orbit directions are the six basis fields and their J
    images; invariance kills the first six, the J directions carry the
    moment components, so the two norms vanish together.
    """
    Z = as_tuple_point(Z)
    m = moment_map(Z)
    F = orbit_fields(Z)
    comps = [dphi(Z, F[k]) for k in range(6)]
    comps += [dphi(Z, apply_J(F[k])) for k in range(6)]
    gn = float(np.linalg.norm(comps))
    mn = float(np.linalg.norm(m))
    consistent = (mn <= tol and gn <= tol) or (mn > tol and gn > tol)
    return CriticalityReport(moment_norm=mn, orbit_gradient_norm=gn, consistent=consistent)


@dataclass
class SectionProbe:
    base: np.ndarray
    directions: np.ndarray  # (d, N, 2, 2), metric-orthonormal, orthogonal to the orbit
    radius: float


def section_probe(base, radius=1e-3, rank_tol=1e-8):
    """Metric-orthogonal complement of the complex orbit tangent at a
    reduced point, orthonormalized in the Kaehler metric of phi.

    The metric Hermitian form is 4 x the Levi form (our omega convention
    gives omega(V, JV) = 4 <V, V>_Levi).  Orthogonality to the orbit makes
    the minimum-section through the probe flat to first order, which is
    the condition the Levi identity needs.
    """
    base = as_tuple_point(base)
    n = base.shape[0]
    full = full_tangent_basis(n)
    dim = 4 * n
    L = levi_form_phi(base, full).entries
    # in column-vector form the Levi pairing L(v, w) reads w^H conj(L) v,
    # so the metric matrix for flattened tangents is the conjugate
    M = 4.0 * np.conj(L)
    w, U = np.linalg.eigh(M)
    if np.min(w) <= 0:
        raise ValueError("metric form is not positive definite at the base")
    Msqrt = (U * np.sqrt(w)) @ U.conj().T
    Minvs = (U / np.sqrt(w)) @ U.conj().T

    F = orbit_fields(base).reshape(6, dim)
    s = np.linalg.svd(F, compute_uv=False)
    t = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    if t == 0:
        T = np.zeros((dim, 0), dtype=complex)
    else:
        _, _, Vh = np.linalg.svd(F, full_matrices=False)
        # columns spanning span_C{fields}: plain transpose, the conjugate
        # rows of Vh span the conjugate space instead
        T = Vh[:t].T

    Yt = Msqrt @ T
    if Yt.shape[1] == 0:
        comp = np.eye(dim, dtype=complex)
    else:
        Uy, _, _ = np.linalg.svd(Yt, full_matrices=True)
        comp = Uy[:, Yt.shape[1]:]
    X = Minvs @ comp
    # comp has Euclidean-orthonormal columns so X is metric-orthonormal
    # already; re-orthonormalize against roundoff
    gram = X.conj().T @ M @ X
    chol = np.linalg.cholesky(gram)
    X = X @ np.linalg.inv(chol).conj().T

    fcols = F.T / max(1e-300, float(np.max(np.abs(F))))
    ortho_defect = float(np.max(np.abs(X.conj().T @ M @ fcols))) if t else 0.0
    onb_defect = float(np.max(np.abs(X.conj().T @ M @ X - np.eye(X.shape[1]))))
    if max(ortho_defect, onb_defect) > 1e-8:
        raise ValueError("section directions failed the orthonormality tolerance")
    dirs = X.T.reshape(-1, n, 2, 2)
    return SectionProbe(base=base, directions=dirs, radius=radius)


@dataclass
class SectionLeviReport:
    deviation: float
    min_eigenvalue: float
    levi_min: np.ndarray
    levi_phi: np.ndarray
    insufficient_stencil: bool
    passed: bool | None


def section_levi_identity(probe, inner_tol=1e-10, dev_tol=1e-3, eig_tol=1e-6):
    """Compare the Levi form of the fiberwise minimum with that of phi.

    The fiberwise minimum through the probe is evaluated by nested orbit
    minimization at every stencil point (inner moment tolerance defaults
    to 1e-10 to keep second-difference noise under the acceptance band).
    Passing means relative deviation <= dev_tol with minimum eigenvalue
    >= -eig_tol.  A degenerate radius yields no verdict.
    """
    base = probe.base
    mn = float(np.linalg.norm(moment_map(base)))
    if mn > 1e-6:
        raise ValueError(f"probe base is not reduced (moment norm {mn:.2e})")
    if probe.radius < 1e-8 or probe.directions.shape[0] == 0:
        return SectionLeviReport(
            deviation=float("nan"),
            min_eigenvalue=float("nan"),
            levi_min=np.zeros((0, 0)),
            levi_phi=np.zeros((0, 0)),
            insufficient_stencil=True,
            passed=None,
        )

    inner = ReduceOptions(moment_tol=inner_tol)

    def fiber_min(Y):
        r = orbit_minimize(Y, inner)
        if not r.converged:
            raise ConvergenceError("inner minimization failed at a stencil point")
        return r.phi_min

    A = levi_form(fiber_min, base, probe.directions, h=probe.radius).entries
    B = levi_form_phi(base, probe.directions).entries
    deviation = float(np.linalg.norm(A - B) / np.linalg.norm(B))
    min_eig = float(np.linalg.eigvalsh((A + A.conj().T) / 2.0)[0])
    return SectionLeviReport(
        deviation=deviation,
        min_eigenvalue=min_eig,
        levi_min=A,
        levi_phi=B,
        insufficient_stencil=False,
        passed=bool(deviation <= dev_tol and min_eig >= -eig_tol),
    )
