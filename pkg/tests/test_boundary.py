"""Normal forms, pair transfer and boundary sequence scans."""

import numpy as np
import pytest

from futuretube import actions as A
from futuretube import geometry as G
from futuretube import serialize
from futuretube.boundary import (
    ScanOptions,
    boundary_scan,
    normal_form,
    pair_transfer,
    parse_sequence,
    schur_unitary,
    triangular_bounds_check,
)
from futuretube.rng import stream_for

iI = 1j * np.eye(2)


def test_normal_form_shear_example():
    # recomputed by hand: eigenvector of the double eigenvalue i is e2,
    # phase-fixed u = [[0,1],[-1,0]]; conjugation gives off-diagonal -1
    W = np.array([[1j, 0.0], [1.0, 1j]])
    nf = normal_form(W)
    assert np.allclose(nf.u, np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert np.allclose(nf.X, np.array([[1j, -1.0], [0.0, 1j]]))
    assert abs(nf.r - 1.0) < 1e-12


def test_normal_form_balancing_example():
    # the smaller-magnitude eigenvalue i/2 moves to (1,1), so r^4 = 4
    W = np.diag([2j, 0.5j])
    nf = normal_form(W)
    assert abs(nf.r - 2.0**0.5) < 1e-12
    assert np.allclose(nf.X, iI)


def test_normal_form_fixed_point():
    W = np.array([[1j, 1.0], [0.0, 1j]])  # already triangular and balanced
    nf = normal_form(W)
    assert np.allclose(nf.u, np.eye(2))
    assert abs(nf.r - 1.0) < 1e-12
    assert np.allclose(nf.X, W)


def test_normal_form_reconstruction_property():
    for i in range(300):
        s = stream_for(6, "nf-recon", i)
        W = G.sample_tube_matrix(s)
        nf = normal_form(W)
        assert G.tube_membership(nf.X)
        assert abs(nf.X[1, 0]) <= 1e-10
        assert abs(abs(nf.X[0, 0]) - abs(nf.X[1, 1])) <= 1e-8 * abs(nf.X[0, 0])
        recon = A.act_real(nf.group_element(), W)
        assert np.max(np.abs(recon - nf.X)) <= 1e-9


def test_normal_form_requires_tube():
    with pytest.raises(G.DomainError):
        normal_form(np.eye(2, dtype=complex))


def test_su2_star_action_is_conjugation():
    for i in range(100):
        s = stream_for(6, "nf-star", i)
        W = G.sample_tube_matrix(s)
        u = A.sample_su2(s)
        d = np.max(np.abs(A.act_real(u, W) - u @ W @ np.linalg.inv(u)))
        assert d <= 1e-12 * (1 + np.max(np.abs(W)))


def test_triangular_bounds():
    rep = triangular_bounds_check(np.array([[1j, 1.0], [0.0, 1j]]))
    assert (rep.quarter_z_sq, rep.im_diag_product, rep.abs_det) == (0.25, 1.0, 1.0)
    assert rep.strict_lower_ok and rep.det_upper_ok

    rep = triangular_bounds_check(iI)
    assert (rep.quarter_z_sq, rep.im_diag_product, rep.abs_det) == (0.0, 1.0, 1.0)

    # det Im = 0: boundary point, precondition error
    with pytest.raises(G.DomainError):
        triangular_bounds_check(np.array([[1j, 2.0], [0.0, 1j]]))
    with pytest.raises(ValueError):
        triangular_bounds_check(np.array([[1j, 0.0], [1.0, 1j]]))


def test_triangular_bounds_on_normal_forms():
    for i in range(200):
        s = stream_for(6, "nf-bounds", i)
        W = G.sample_tube_matrix(s)
        X = normal_form(W).X
        X[1, 0] = 0.0
        rep = triangular_bounds_check(X)
        assert rep.strict_lower_ok and rep.det_upper_ok


def test_pair_transfer_frozen():
    rep = pair_transfer(2j * np.eye(2), iI)
    assert np.allclose(rep.X, 2.0 * np.eye(2))
    assert rep.trace == 4.0 and rep.det == 4.0
    assert np.allclose(sorted([abs(e) for e in rep.eigenvalues]), [2.0, 2.0])
    with pytest.raises(ValueError):
        pair_transfer(iI, np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_pair_transfer_equivariance():
    for i in range(200):
        s = stream_for(6, "pt-equiv", i)
        Z, W = s.matrix(), s.matrix()
        if abs(G.det2(W)) < 1e-3:
            continue
        p = A.GroupPair.make(s.matrix() + 2 * np.eye(2), s.matrix() + 2 * np.eye(2))
        ZW = A.act_complex(p, np.stack([Z, W]))
        r0 = pair_transfer(Z, W)
        r1 = pair_transfer(ZW[0], ZW[1])
        assert abs(r0.trace - r1.trace) <= 1e-9 * (1 + abs(r0.trace))
        assert abs(r0.det - r1.det) <= 1e-9 * (1 + abs(r0.det))
        # conjugated X: int(g) X = g X g^{-1}
        want = p.g @ r0.X @ np.linalg.inv(p.g)
        assert np.max(np.abs(r1.X - want)) <= 1e-8 * (1 + np.max(np.abs(want)))


def test_pair_transfer_positivity_functional():
    for i in range(100):
        s = stream_for(6, "pt-pos", i)
        Z, W = G.sample_tube_matrix(s), G.sample_tube_matrix(s)
        rep = pair_transfer(Z, W)
        assert rep.in_tube
        # the functional is det Im of a star-translate of Z, hence positive
        if abs(rep.triangular_offdiag) > 1e-12:
            assert rep.positivity_functional > 0
        # identity: it equals det Im Z
        assert abs(rep.positivity_functional - G.det_im(Z)) <= 1e-9 * (1 + G.det_im(Z))


def test_pair_transfer_eigenvalue_bound():
    # |lambda| <= |tr| + sqrt(|tr|^2 + |det|) along gram-convergent sequences
    for i in range(50):
        s = stream_for(6, "pt-eig", i)
        Z, W = G.sample_tube_matrix(s), G.sample_tube_matrix(s)
        rep = pair_transfer(Z, W)
        bound = abs(rep.trace) + np.sqrt(abs(rep.trace) ** 2 + abs(rep.det))
        assert max(abs(e) for e in rep.eigenvalues) <= bound + 1e-12


def test_pair_transfer_bounded_along_gram_convergent_sequence():
    # a translate sequence has constant Gram image; the transfer invariants
    # are then constant and the eigenvalues stay inside the bound
    s = stream_for(6, "pt-seq", 0)
    Z, W = G.sample_tube_matrix(s), G.sample_tube_matrix(s)
    base = pair_transfer(Z, W)
    bound = abs(base.trace) + np.sqrt(abs(base.trace) ** 2 + abs(base.det))
    for k in range(1, 12):
        g = A.exp_algebra(np.array([1.0, 0, 0, 0, 0, 0]), 0.3 * k)
        ZW = A.act_real(g, np.stack([Z, W]))
        rep = pair_transfer(ZW[0], ZW[1])
        assert abs(rep.trace - base.trace) <= 1e-8 * (1 + abs(base.trace))
        assert abs(rep.det - base.det) <= 1e-8 * (1 + abs(base.det))
        assert max(abs(e) for e in rep.eigenvalues) <= bound + 1e-9


def test_schur_ordering_deterministic():
    for i in range(100):
        s = stream_for(6, "schur", i)
        M = s.matrix()
        u, T = schur_unitary(M)
        assert abs(T[1, 0]) <= 1e-10 * (1 + np.max(np.abs(M)))
        assert abs(T[0, 0]) <= abs(T[1, 1]) + 1e-10
        assert abs(G.det2(u) - 1) < 1e-12
        assert np.max(np.abs(u @ u.conj().T - np.eye(2))) < 1e-12


def test_parse_sequence_errors():
    with pytest.raises(ValueError):
        parse_sequence({"type": "nope"})
    with pytest.raises(ValueError):
        parse_sequence({"type": "list", "points": []})
    with pytest.raises(ValueError):
        parse_sequence({"type": "curve", "components": [], "k_count": 3})
    with pytest.raises(ValueError):
        parse_sequence({"type": "curve", "components": [{"num": []}], "k_count": 3})
    with pytest.raises(ValueError):
        parse_sequence(
            {
                "type": "translate",
                "base": serialize.point_to_json(iI),
                "generator": [1, 0, 0, 0, 0, 0],
            }
        )
    with pytest.raises(ValueError):
        parse_sequence([1, 2, 3])


def test_parse_sequence_generators():
    pts = parse_sequence(
        {"type": "list", "points": [serialize.point_to_json(iI), serialize.point_to_json(2j * np.eye(2))]}
    )
    assert len(pts) == 2 and np.allclose(pts[1], 2j * np.eye(2))

    zero = serialize.matrix_to_json(np.zeros((2, 2)))
    eye = serialize.matrix_to_json(1j * np.eye(2))
    pts = parse_sequence(
        {"type": "curve", "components": [{"num": [zero, eye]}], "k_count": 3, "k_start": 1}
    )
    assert np.allclose(pts[1], iI / 2.0)

    pts = parse_sequence(
        {
            "type": "translate",
            "base": serialize.point_to_json(iI),
            "generator": [1, 0, 0, 0, 0, 0],
            "times": {"start": 0.0, "step": np.log(2.0), "count": 2},
        }
    )
    assert np.allclose(pts[1], 1j * np.diag([4.0, 0.25]))


def test_boundary_scan_weak_exhaustion():
    zero = serialize.matrix_to_json(np.zeros((2, 2)))
    eye = serialize.matrix_to_json(1j * np.eye(2))
    doc = {"type": "curve", "components": [{"num": [zero, eye]}], "k_count": 40}
    rep = boundary_scan(doc)
    for r in rep.records:
        k = r.index + 1
        assert abs(r.phi - k * k) <= 1e-12 * k * k
        assert abs(r.psi - k * k) <= 1e-6 * k * k
    assert rep.weak_exhaustion_applicable
    assert rep.weak_exhaustion
    assert all(rep.thresholds_crossed.values())
    # this collapsing sequence does not satisfy the bounded-phi premise
    assert not rep.mod_real_applicable


def test_boundary_scan_mod_real():
    doc = {
        "type": "translate",
        "base": serialize.point_to_json(iI),
        "generator": [1, 0, 0, 0, 0, 0],
        "times": {"start": 0.0, "step": 0.5, "count": 15},
    }
    rep = boundary_scan(doc)
    assert rep.phi_bounded and rep.gram_converged and rep.raw_escapes
    assert rep.mod_real_applicable and rep.mod_real_exhaustion
    # translate orbits of i*I normalize back to i*I exactly
    for r in rep.records:
        assert abs(r.phi - 1.0) <= 1e-9
        assert r.rep_max_entry <= 1.0 + 1e-9
    assert not rep.weak_exhaustion_applicable


def test_boundary_scan_constant_sequence_no_verdict():
    doc = {"type": "list", "points": [serialize.point_to_json(iI)] * 6}
    rep = boundary_scan(doc)
    assert not rep.weak_exhaustion_applicable and not rep.weak_exhaustion
    assert not rep.mod_real_applicable and not rep.mod_real_exhaustion


def test_boundary_scan_rejects_empty():
    with pytest.raises(ValueError):
        boundary_scan([])
