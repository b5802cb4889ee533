"""Quasi-periodic path elements and explicit local sections over U, SU, SO."""

import numpy as np
import pytest

from loopbundle import (
    PathElement,
    act_group,
    central_log,
    eval_path,
    exp_skew,
    fiber_certificate,
    identity_loop,
    junction_mismatch,
    path_fiber_quotient,
    path_group_residual,
    project_path,
    smooth_section,
    so_section,
    so_spectral_split,
    su_section,
    un_section,
)
from loopbundle.rand import (
    random_skew,
    random_special_orthogonal,
    random_special_unitary,
    random_unitary,
)

J0 = np.array([[0.0, -1.0], [1.0, 0.0]])
ENDPOINT_TOL = 1e-9
POLY_TOL = 1e-8


def rotation(phi):
    return np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])


def test_trivial_path_is_identity():
    p = PathElement([np.zeros((2, 2))])
    for t in (0.0, 0.3, 1.0):
        assert np.max(np.abs(eval_path(p, t) - np.eye(2))) < 1e-12
    assert np.max(np.abs(project_path(p) - np.eye(2))) < 1e-12


def test_full_turn_factor_at_half():
    p = PathElement([2j * np.pi * np.eye(1)])
    assert abs(eval_path(p, 0.5)[0, 0] + 1.0) < 1e-12


def test_pi_structure_factor_reaches_minus_identity():
    p = PathElement([np.pi * J0], loop=identity_loop(2))
    assert np.max(np.abs(eval_path(p, 1.0) + np.eye(2))) < 1e-12


def test_projection_of_one_factor_path_is_exponential():
    rng = np.random.default_rng(1)
    xi = random_skew(rng, 3)
    p = PathElement([xi])
    assert np.max(np.abs(project_path(p) - exp_skew(xi))) < ENDPOINT_TOL


def test_periodicity_invariant_enforced():
    # eval(t+1) eval(t)^-1 must be constant; a generic non-skew factor breaks it
    with pytest.raises(ValueError):
        PathElement([np.array([[0.1, 0.0], [0.0, -0.1]])], group="U")


def test_un_section_diagonal_example():
    g = np.diag([np.exp(0.3j), np.exp(-0.4j)])
    p = un_section(0.0, g)
    assert np.max(np.abs(p.factors[0] - np.diag([0.3j, -0.4j]))) < 1e-12
    assert np.max(np.abs(project_path(p) - g)) < ENDPOINT_TOL


def test_un_section_shifted_branch_at_minus_identity():
    p = un_section(1j * np.pi, -np.eye(2))
    assert np.max(np.abs(p.factors[0] - 1j * np.pi * np.eye(2))) < 1e-12


def test_un_section_random_endpoints():
    rng = np.random.default_rng(9)
    for dim in (2, 3, 5):
        g = random_unitary(rng, dim)
        try:
            p = un_section(0.0, g)
        except ValueError:
            continue
        assert np.max(np.abs(project_path(p) - g)) < ENDPOINT_TOL
        assert path_group_residual(p) < ENDPOINT_TOL


def test_un_section_cut_rejection():
    with pytest.raises(ValueError):
        un_section(0.0, -np.eye(3))


def test_su_section_trivial_twist():
    # traceless branch log leaves the determinant correction empty
    g = np.diag([np.exp(0.3j), np.exp(-0.3j)])
    p = su_section(0.0, g, np.array([1.0, 0.0]))
    assert np.max(np.abs(p.factors[1])) < 1e-12


def test_su_section_winding_one_example():
    a = np.pi - 0.2
    g = np.diag([np.exp(1j * a), np.exp(-1j * a)])
    p = su_section(1j * np.pi / 2, g, np.array([1.0, 0.0]))
    k = np.trace(p.factors[0]) / (2j * np.pi)
    assert abs(k - 1.0) < 1e-9
    ts = np.linspace(0.0, 1.0, 33)
    dets = np.array([np.linalg.det(eval_path(p, t)) for t in ts])
    assert np.max(np.abs(dets - 1.0)) < 1e-10
    assert np.max(np.abs(project_path(p) - g)) < ENDPOINT_TOL


def test_su_section_determinant_on_grid():
    rng = np.random.default_rng(14)
    ts = np.linspace(0.0, 1.0, 17)
    done = 0
    while done < 20:
        g = random_special_unitary(rng, 3)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        v /= np.linalg.norm(v)
        try:
            p = su_section(0.0, g, v)
        except ValueError:
            continue
        done += 1
        dets = np.array([np.linalg.det(eval_path(p, t)) for t in ts])
        assert np.max(np.abs(dets - 1.0)) < 1e-10
        assert np.max(np.abs(project_path(p) - g)) < ENDPOINT_TOL


def test_su_section_rejects_non_special():
    g = np.diag([np.exp(0.3j), np.exp(0.3j)])
    with pytest.raises(ValueError):
        su_section(0.0, g, np.array([1.0, 0.0]))


def test_split_identity():
    low, high = so_spectral_split(np.eye(2), 0.0)
    assert np.max(np.abs(low)) == 0.0
    assert np.max(np.abs(high - np.eye(2))) < 1e-12


def test_split_minus_identity():
    low, high = so_spectral_split(-np.eye(2), 0.0)
    assert np.max(np.abs(low - np.eye(2))) < 1e-12
    assert np.max(np.abs(high)) == 0.0


def test_split_two_rotation_blocks():
    h = np.zeros((4, 4))
    h[:2, :2] = rotation(2.8)  # real part cos 2.8 < 0
    h[2:, 2:] = rotation(0.3)  # real part cos 0.3 > 0
    low, high = so_spectral_split(h, 0.0)
    assert round(np.trace(low).real) == 2
    assert round(np.trace(high).real) == 2
    assert np.max(np.abs(low @ h - h @ low)) < 1e-9
    assert np.max(np.abs(low + high - np.eye(4))) < 1e-12
    assert np.max(np.abs(low - low.T)) < 1e-12


def test_split_rejects_eigenvalue_on_abscissa():
    with pytest.raises(ValueError):
        so_spectral_split(rotation(np.pi / 2), 0.0)


def test_so_section_empty_low_block():
    rng = np.random.default_rng(3)
    g = exp_skew(random_skew(rng, 4, real=True, scale=0.2)).real
    sec = so_section(0.0, g, g)
    # all eigenvalues stay near 1, so the structure factor vanishes
    assert np.max(np.abs(sec.factors[1])) < 1e-12
    assert np.max(np.abs(project_path(sec) - g)) < ENDPOINT_TOL


def test_so_section_minus_identity():
    g = -np.eye(4)
    sec = so_section(0.0, g, g)
    assert np.max(np.abs(project_path(sec) - g)) < ENDPOINT_TOL
    _, residual, _ = fiber_certificate(sec)
    assert residual < POLY_TOL


def test_so_section_random_pairs():
    rng = np.random.default_rng(15)
    done = 0
    while done < 15:
        g = random_special_orthogonal(rng, 4)
        q = exp_skew(random_skew(rng, 4, real=True, scale=0.1)).real
        h = q @ g @ q.T
        try:
            sec = so_section(0.0, g, h)
        except ValueError:
            continue
        done += 1
        assert np.max(np.abs(project_path(sec) - h)) < ENDPOINT_TOL
        assert path_group_residual(sec) < ENDPOINT_TOL
        _, residual, _ = fiber_certificate(sec)
        assert residual < POLY_TOL


def test_so_section_rank_mismatch_rejected():
    g = np.eye(4)
    h = np.zeros((4, 4))
    h[:2, :2] = rotation(2.9)
    h[2:, 2:] = rotation(0.1)
    with pytest.raises(ValueError):
        so_section(0.0, g, h)


def test_fiber_quotient_of_equal_paths():
    rng = np.random.default_rng(25)
    p = PathElement([random_skew(rng, 3)])
    loop, residual = path_fiber_quotient(p, p)
    assert residual < 1e-10
    assert np.max(np.abs(loop.coeff(0) - np.eye(3))) < 1e-10


def test_fiber_quotient_of_matched_logs():
    rng = np.random.default_rng(26)
    g = random_unitary(rng, 3)
    zeta = central_log(g)
    from loopbundle import clustered_eig

    proj = clustered_eig(g).projector(clustered_eig(g).clusters[0])
    a = PathElement([zeta])
    b = PathElement([zeta + 2j * np.pi * proj])
    loop, residual = path_fiber_quotient(a, b)
    assert residual < POLY_TOL
    assert loop.degree <= 1


def test_fiber_quotient_rejects_different_fibres():
    a = PathElement([np.zeros((2, 2))])
    b = PathElement([(np.pi / 2) * J0])
    with pytest.raises(ValueError):
        path_fiber_quotient(a, b)


def test_certificate_of_section_paths():
    rng = np.random.default_rng(27)
    g = random_unitary(rng, 3)
    quotient, residual, degree = fiber_certificate(un_section(0.0, g))
    assert residual < POLY_TOL
    assert degree >= quotient.degree


def test_smooth_section_through_base_point():
    rng = np.random.default_rng(33)
    g = random_unitary(rng, 3)
    s = smooth_section(g, g)
    # starts at the identity, passes through g at t = 1/2, flat at the seam
    assert np.max(np.abs(s.values[0] - np.eye(3))) < 1e-12
    assert np.max(np.abs(s.values[s.values.shape[0] // 2] - g)) < ENDPOINT_TOL
    assert np.max(np.abs(s.values[-1] - g)) < ENDPOINT_TOL
    assert junction_mismatch(s) < 1e-4


def test_smooth_section_hits_nearby_target():
    rng = np.random.default_rng(35)
    g = random_unitary(rng, 3)
    h = g @ exp_skew(0.1 * random_skew(rng, 3))
    s = smooth_section(g, h)
    assert np.max(np.abs(s.values[-1] - h)) < ENDPOINT_TOL
    assert junction_mismatch(s) < 1e-4


def test_smooth_section_rejects_far_target():
    rng = np.random.default_rng(36)
    g = np.eye(3)
    with pytest.raises(ValueError):
        smooth_section(g, -np.eye(3))


def test_group_action_conjugates_projection():
    rng = np.random.default_rng(41)
    p = un_section(0.0, random_unitary(rng, 3))
    g = random_unitary(rng, 3)
    target = project_path(p)
    conj = act_group(p, g, conjugate=True)
    assert np.max(np.abs(project_path(conj) - g @ target @ g.conj().T)) < ENDPOINT_TOL
    left = act_group(p, g, conjugate=False)
    assert left.periodicity_defect() < ENDPOINT_TOL
