"""Invariant-theory quotient: Gram map, rank tests and orbit probes.

The Gram image (pairwise Lorentz products of the tuple components) is the
computable proxy for the categorical quotient throughout the package;
reports record proxy = "gram".  Closed-orbit detection minimizes the
squared Frobenius norm over the complexified group through a 12-parameter
exponential chart.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import as_tuple_point, det2, tube_membership, tube_margin
from .actions import BASIS, GroupPair, act_complex, expm_traceless, realize, make_unimodular

__all__ = [
    "GRAM_PROXY",
    "gram_map",
    "gram_rank",
    "KempfNessOptions",
    "OrbitProbeReport",
    "kempf_ness_minimize",
    "SaturationReport",
    "saturation_probe",
]

GRAM_PROXY = "gram"


def gram_map(Z):
    """Symmetric N x N matrix of pairwise Lorentz products <Z^i, Z^j>.

    Diagonal entries are exactly det Z^j by polarization; the whole matrix
    is invariant under the complexified action.
    """
    Z = as_tuple_point(Z)
    d = det2(Z)
    pair = det2(Z[:, None, :, :] + Z[None, :, :, :])
    Gm = (pair - d[:, None] - d[None, :]) / 2.0
    # float addition order breaks exact symmetry; mirror the upper triangle
    return np.triu(Gm) + np.triu(Gm, 1).T


def gram_rank(Gm, tol=1e-8):
    """Numeric rank: singular values above tol times the largest."""
    Gm = np.asarray(Gm, dtype=complex)
    s = np.linalg.svd(Gm, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


@dataclass
class KempfNessOptions:
    grad_tol: float = 1e-8
    collapse_tol: float = 1e-10
    # no `closed` verdict while the norm sits this far below the start:
    # on collapsing orbits the gradient (~ 2F) crosses grad_tol first
    collapse_guard: float = 1e-6
    divergence_bound: float = 1e3
    max_iters: int = 10000
    armijo: float = 1e-4
    shrink: float = 0.5
    step_init: float = 1.0
    step_floor: float = 1e-18


@dataclass
class OrbitProbeReport:
    achieved_norm_sq: float
    minimizer: GroupPair
    converged: bool
    iterations: int
    gradient_norm: float
    classification: str  # closed | non_closed | inconclusive
    proxy: str = GRAM_PROXY


def _norm_sq(Y):
    return float(np.sum(Y.real**2 + Y.imag**2))


def _kn_gradient_hessian(Y):
    """Chart gradient and Hessian of the squared norm at (g, h) = (e, e).

    With S = sum_j Y_j Y_j^H and T = sum_j Y_j^H Y_j the gradient is
    (2 Re tr(e_k S), 2 Re tr(e_k^t T)); the Hessian adds the Gram matrix
    of the twelve tangents {e_k Y, Y e_k^t} and the curvature of the
    exponential chart.  Verified against finite differences.
    """
    S = np.einsum("nij,nkj->ik", Y, np.conj(Y))
    T = np.einsum("nji,njk->ik", np.conj(Y), Y)
    ga = 2.0 * np.einsum("kij,ji->k", BASIS, S).real
    gb = 2.0 * np.einsum("kji,ji->k", BASIS, T).real
    grad = np.concatenate([ga, gb])

    VL = np.einsum("kab,nbc->knac", BASIS, Y)
    VR = np.einsum("nab,kcb->knac", Y, BASIS)
    V = np.concatenate([VL, VR])
    G = 2.0 * np.einsum("knab,lnab->kl", np.conj(V), V).real
    BB = np.einsum("kab,lbc->klac", BASIS, BASIS)
    C_LL = np.einsum("klac,ca->kl", BB, S)
    C_LL = (C_LL + C_LL.T).real
    Bt = np.swapaxes(BASIS, 1, 2)
    BBt = np.einsum("kab,lbc->klac", Bt, Bt)
    C_RR = np.einsum("klac,ca->kl", BBt, T)
    C_RR = (C_RR + C_RR.T).real
    T1 = np.einsum("nba,kbc,ncd->knad", np.conj(Y), BASIS, Y)
    C_LR = 2.0 * np.einsum("knad,lad->kl", T1, BASIS).real
    H = G + np.block([[C_LL, C_LR], [C_LR.T, C_RR]])
    return grad, H


def _kn_direction(grad, H):
    """Levenberg-damped Newton step; falls back to steepest descent.

    The shift absorbs both the gauge degeneracy near minima and negative
    curvature away from them; on norm-collapsing configurations, where
    the gradient scales with the objective, the damped solve yields a
    direction of magnitude ~ 1/damping, which escapes at a geometric
    rate where the raw gradient would stall.
    """
    gn = float(np.linalg.norm(grad))
    wmin = float(np.linalg.eigvalsh(H)[0])
    lam = 0.01 * gn + max(0.0, -wmin) * 1.1 + 1e-300
    try:
        d = np.linalg.solve(H + lam * np.eye(12), -grad)
    except np.linalg.LinAlgError:
        return -grad, -gn * gn
    deriv = float(grad @ d)
    if not np.isfinite(deriv) or deriv >= 0.0:
        return -grad, -gn * gn
    dn = float(np.linalg.norm(d))
    if dn > 100.0:
        d *= 100.0 / dn
        deriv = float(grad @ d)
    return d, deriv


def kempf_ness_minimize(Z, opts=None):
    """Minimize the squared Frobenius norm over the complexified orbit.

    Steepest descent over the twelve chart parameters of (g, h) with a
    backtracking Armijo line search whose trial step doubles after each
    accepted move; without the doubling, norm-collapsing directions
    (gradient proportional to the objective) stall hyperbolically.

    Classification: `closed` once the chart gradient drops below grad_tol
    at bounded parameters, `non_closed` when the norm collapses below
    collapse_tol relative to the start or the parameters leave the
    divergence bound while still descending, else `inconclusive`.
    """
    if opts is None:
        opts = KempfNessOptions()
    Z = as_tuple_point(Z)
    Y = Z.copy()
    g = np.eye(2, dtype=complex)
    h = np.eye(2, dtype=complex)
    F0 = _norm_sq(Y)
    classification = "inconclusive"
    converged = False
    it = 0
    grad, H = _kn_gradient_hessian(Y)
    gn = float(np.linalg.norm(grad))
    if F0 == 0.0:
        return OrbitProbeReport(0.0, GroupPair(g, h), True, 0, 0.0, "closed")

    while it < opts.max_iters:
        F = _norm_sq(Y)
        param = max(float(np.linalg.norm(g)), float(np.linalg.norm(h)))
        if F <= opts.collapse_tol * F0:
            classification = "non_closed"
            break
        if gn <= opts.grad_tol and F > opts.collapse_guard * F0:
            if param <= opts.divergence_bound:
                classification = "closed"
                converged = True
            break
        if param > opts.divergence_bound:
            # objective is monotone along accepted moves, so this is escape
            classification = "non_closed"
            break

        d, deriv = _kn_direction(grad, H)
        s = opts.step_init
        accepted = False
        while s >= opts.step_floor:
            Ag = expm_traceless(realize(s * d[:6]))
            Bh = expm_traceless(realize(s * d[6:]))
            Yt = Ag @ Y @ Bh.T
            if _norm_sq(Yt) <= F + opts.armijo * s * deriv:
                accepted = True
                break
            s *= opts.shrink
        if not accepted:
            break
        Y = Yt
        g = make_unimodular(Ag @ g)
        h = make_unimodular(Bh @ h)
        it += 1
        grad, H = _kn_gradient_hessian(Y)
        gn = float(np.linalg.norm(grad))

    return OrbitProbeReport(
        achieved_norm_sq=_norm_sq(Y),
        minimizer=GroupPair(g, h),
        converged=converged,
        iterations=it,
        gradient_norm=gn,
        classification=classification,
    )


@dataclass
class SaturationReport:
    classification: str
    certified_in_extended_tube: bool
    gram_distance: float
    closed_point: np.ndarray
    witness: np.ndarray | None
    witness_kind: str
    reduced_margin: float | None
    verdict: str  # certified | probe failed
    proxy: str = GRAM_PROXY


def _margin_search(W, iters=400, fd_step=1e-6, step_init=0.5, step_floor=1e-12):
    """Local ascent of the tube margin over the pair chart around W.

    Returns the best translate found; succeeds once the margin is positive.
    """
    Y = W.copy()
    best = tube_margin(Y)
    step = step_init
    for _ in range(iters):
        if best > 0.0:
            break
        grad = np.zeros(12)
        for k in range(12):
            da = np.zeros(6)
            db = np.zeros(6)
            if k < 6:
                da[k] = 1.0
            else:
                db[k - 6] = 1.0
            Ap = expm_traceless(realize(fd_step * da))
            Bp = expm_traceless(realize(fd_step * db))
            Am = expm_traceless(realize(-fd_step * da))
            Bm = expm_traceless(realize(-fd_step * db))
            grad[k] = (tube_margin(Ap @ Y @ Bp.T) - tube_margin(Am @ Y @ Bm.T)) / (2 * fd_step)
        gn = float(np.linalg.norm(grad))
        if gn < 1e-14:
            break
        d = grad / gn
        s = step
        moved = False
        while s >= step_floor:
            Ag = expm_traceless(realize(s * d[:6]))
            Bh = expm_traceless(realize(s * d[6:]))
            Yt = Ag @ Y @ Bh.T
            if tube_margin(Yt) > best:
                Y = Yt
                best = tube_margin(Yt)
                moved = True
                break
            s *= 0.5
        if not moved:
            break
        step = min(s * 2.0, 2.0)
    return Y, best


def saturation_probe(Z, kn_opts=None, reduce_opts=None, search_iters=400):
    """Probe whether the closed orbit under the starting point meets the tube.

    Runs the norm minimization, takes the reached point as the stand-in for
    the closed orbit, hunts for a translate inside the tube and certifies by
    reducing it with the orbit minimizer.  A failed hunt reports
    "probe failed", never a refutation.
    """
    from .reduction import ReduceOptions, orbit_minimize

    Z = as_tuple_point(Z)
    if not tube_membership(Z):
        raise ValueError("saturation probe starts from a tube point")
    kn = kempf_ness_minimize(Z, kn_opts)
    W = act_complex(kn.minimizer, Z)
    gram_distance = float(np.linalg.norm(gram_map(W) - gram_map(Z)))

    witness = None
    kind = "none"
    if tube_margin(W) > 0.0:
        witness = W
        kind = "kn_point"
    elif kn.classification == "closed":
        # the recorded minimizer is exact group data: its inverse returns to Z
        witness = act_complex(kn.minimizer.inverse(), W)
        kind = "minimizer_inverse"
        if not tube_membership(witness):
            witness = Z.copy()
    else:
        Yt, margin = _margin_search(W, iters=search_iters)
        if margin > 0.0:
            witness = Yt
            kind = "margin_search"

    certified = False
    reduced_margin = None
    if witness is not None:
        rr = orbit_minimize(witness, reduce_opts if reduce_opts is not None else ReduceOptions())
        if rr.converged and tube_membership(rr.reduced_point):
            certified = True
            reduced_margin = tube_margin(rr.reduced_point)

    return SaturationReport(
        classification=kn.classification,
        certified_in_extended_tube=certified,
        gram_distance=gram_distance,
        closed_point=W,
        witness=witness,
        witness_kind=kind,
        reduced_margin=reduced_margin,
        verdict="certified" if certified else "probe failed",
    )
