from types import SimpleNamespace

import numpy as np
import pytest

from curvebody import (
    CollisionError,
    DimensionError,
    FullState,
    PolygonConfig,
    SingularityError,
    criterion_terms,
    embed,
    full_rhs,
    integrate_fixed_rk4,
    make_full_rhs,
    pack_full,
    pack_reduced,
    pair_inner,
    reduced_rhs,
    regular_polygon,
    sigma_dot,
    synthesize_initial,
    unpack_full,
    unpack_reduced,
)
from curvebody.dynamics import make_reduced_rhs

from conftest import oracle_criterion_terms, random_valid_full_state


def test_pair_inner_examples():
    assert pair_inner(0.7, 0.0, 1) == 1.0
    assert pair_inner(0.7, 0.0, -1) == -1.0
    assert pair_inner(1.0, np.pi, 1) == pytest.approx(-1.0, abs=1e-15)
    assert pair_inner(0.5, np.pi / 2, -1) == pytest.approx(-1.25, abs=1e-15)


def test_pair_inner_matches_embedded_inner_product():
    cfg = regular_polygon(4, sigma=-1, k=3)
    state = synthesize_initial(cfg, 0.6, 0.1, 0.9)
    full = embed(state, cfg)
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            expected = pair_inner(0.6, cfg.beta[i] - cfg.beta[j], -1)
            got = sigma_dot(full.positions[i], full.positions[j], -1)
            assert got == pytest.approx(expected, abs=1e-14)


def test_criterion_two_bodies_frozen():
    terms = criterion_terms(regular_polygon(2, sigma=1), 0.5)
    # 2^{-1/2} / 1.5^{3/2}, frozen from the direct-summation oracle
    np.testing.assert_allclose(terms.b, 0.3849001794597505, rtol=1e-14)
    np.testing.assert_allclose(terms.c, 0.0, atol=1e-15)


def test_criterion_regular_triangle_symmetric():
    terms = criterion_terms(regular_polygon(3, sigma=1), 0.7)
    assert np.max(terms.b) - np.min(terms.b) <= 1e-15
    np.testing.assert_allclose(terms.c, 0.0, atol=1e-13)


def test_criterion_unequal_masses_frozen_regression():
    cfg = PolygonConfig(
        masses=[1, 1, 2], beta=[0.0, 2 * np.pi / 3, 4 * np.pi / 3], sigma=1, k=3,
    )
    terms = criterion_terms(cfg, 0.5)
    # frozen oracle values: the heavier companion breaks the c-cancellation
    assert terms.c[0] == pytest.approx(0.2275693112718885, rel=1e-12)
    assert terms.b[0] == pytest.approx(1.1824848280991052, rel=1e-12)
    assert abs(terms.c[0]) > 1e-3


def test_criterion_matches_oracle(rng):
    for _ in range(25):
        n = int(rng.integers(2, 7))
        sigma = int(rng.choice([1, -1]))
        beta = np.sort(rng.uniform(0, 2 * np.pi, n))
        if np.min(np.diff(np.concatenate([beta, [beta[0] + 2 * np.pi]]))) < 0.2:
            continue
        masses = rng.uniform(0.5, 2.0, n)
        rho = rng.uniform(0.2, 0.9) if sigma == 1 else rng.uniform(0.2, 2.5)
        cfg = PolygonConfig(masses=masses, beta=beta, sigma=sigma, k=3)
        terms = criterion_terms(cfg, rho)
        b_ref, c_ref = oracle_criterion_terms(masses, beta, sigma, rho)
        np.testing.assert_allclose(terms.b, b_ref, rtol=1e-12)
        np.testing.assert_allclose(terms.c, c_ref, rtol=1e-12, atol=1e-13)
        assert np.all(terms.b > 0)


def test_criterion_pair_mass_scaling(rng):
    # for two bodies, b_1 = m_2 f and b_2 = m_1 f with a shared f
    for _ in range(20):
        masses = rng.uniform(0.2, 3.0, 2)
        phase = rng.uniform(0, 2 * np.pi)
        cfg = regular_polygon(2, phase=phase, masses=masses, sigma=1)
        terms = criterion_terms(cfg, rng.uniform(0.1, 0.9))
        assert terms.b[0] / masses[1] == pytest.approx(
            terms.b[1] / masses[0], rel=1e-14
        )


def test_criterion_antipodal_singularity():
    with pytest.raises(SingularityError):
        criterion_terms(regular_polygon(2, sigma=1), 1.0)
    # hyperbolic branch has no antipodal degeneracy
    terms = criterion_terms(regular_polygon(2, sigma=-1), 5.0)
    assert np.all(np.isfinite(terms.b))


def test_criterion_collision_error():
    stub = SimpleNamespace(
        masses=np.array([1.0, 1.0]), beta=np.array([0.3, 0.3]), sigma=1, n=2,
    )
    with pytest.raises(CollisionError):
        criterion_terms(stub, 0.5)


def test_criterion_rejects_nonpositive_rho():
    with pytest.raises(SingularityError):
        criterion_terms(regular_polygon(3), 0.0)


def test_full_rhs_tangency_identity(rng):
    # q (.) qddot = -(qdot (.) qdot): the radial force component exactly
    # balances the centrifugal term when the state sits on the manifold
    for sigma in (1, -1):
        for _ in range(50):
            state = random_valid_full_state(rng, n=3, k=3, sigma=sigma)
            acc = full_rhs(state)
            for i in range(state.n):
                lhs = sigma_dot(state.positions[i], acc[i], sigma)
                rhs = -sigma_dot(state.velocities[i], state.velocities[i], sigma)
                assert lhs == pytest.approx(rhs, abs=1e-12)


def test_full_rhs_mirror_symmetric_state():
    # two equal masses at angles +/- alpha with no swirl: body 2 is the
    # mirror image of body 1 and so are their accelerations
    cfg = PolygonConfig(masses=[1, 1], beta=[0.7, -0.7], sigma=1, k=3)
    state = embed(synthesize_initial(cfg, 0.6, rho_dot0=0.1), cfg)
    mirror = np.array([1.0, -1.0, 1.0])
    np.testing.assert_allclose(state.positions[1], state.positions[0] * mirror,
                               atol=1e-15)
    acc = full_rhs(state)
    np.testing.assert_allclose(acc[1], acc[0] * mirror, atol=1e-12)


def test_full_rhs_mirror_equivariance():
    # reflecting any state about the first axis reflects its accelerations
    cfg = regular_polygon(2, phase=0.7, sigma=1, k=3)
    state = embed(synthesize_initial(cfg, 0.6, 0.1, 0.8), cfg)
    mirror = np.array([1.0, -1.0, 1.0])
    flipped = FullState(
        positions=state.positions[::-1] * mirror,
        velocities=state.velocities[::-1] * mirror,
        masses=state.masses, sigma=1,
    )
    acc = full_rhs(state)
    acc_flipped = full_rhs(flipped)
    np.testing.assert_allclose(acc_flipped, acc[::-1] * mirror, atol=1e-12)


def test_full_rhs_matches_finite_difference_of_flow():
    # second derivative of the integrated trajectory equals the force law
    cfg = regular_polygon(3, sigma=1, k=3)
    state = embed(synthesize_initial(cfg, 0.8, 0.0, 1.0), cfg)
    rhs = make_full_rhs(cfg.masses, cfg.sigma, cfg.k)
    h = 1e-4
    traj = integrate_fixed_rk4(rhs, pack_full(state), (0.0, 2 * h), h, h)
    q = traj.samples[:, : 3 * 3].reshape(3, 3, 3)  # (time, body, coord)
    fd = (q[2] - 2 * q[1] + q[0]) / h**2
    mid = unpack_full(traj.samples[1], cfg.masses, cfg.sigma, cfg.k)
    np.testing.assert_allclose(full_rhs(mid), fd, atol=1e-6)


def test_full_rhs_collision_singularity():
    q = np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    v = np.zeros((2, 3))
    state = FullState(positions=q, velocities=v, masses=np.ones(2), sigma=1)
    with pytest.raises(SingularityError, match="collision"):
        full_rhs(state)


def test_full_rhs_antipodal_singularity():
    cfg = regular_polygon(2, sigma=1, k=2)
    state = embed(synthesize_initial(cfg, 1.0, theta_dot0=1.0), cfg)
    with pytest.raises(SingularityError, match="antipodal"):
        full_rhs(state)


@pytest.mark.parametrize("sigma,rho0", [(1, 0.8), (1, 0.5), (-1, 0.6), (-1, 1.5)])
def test_reduced_rhs_relative_equilibrium(sigma, rho0):
    # rhodot = 0, Zdot = 0, thetadot^2 = b / rho^3 is a fixed point of the
    # size and fiber equations; the fiber cancellation doubles as a check
    # of the (sigma / rho) coefficient
    cfg = regular_polygon(3, sigma=sigma, k=3)
    b = criterion_terms(cfg, rho0).b[0]
    theta_dot = np.sqrt(b / rho0**3)
    state = synthesize_initial(cfg, rho0, 0.0, theta_dot)
    d = reduced_rhs(state, cfg)
    assert abs(d.rho_ddot) <= 1e-12
    assert np.max(np.abs(d.z_ddot)) <= 1e-12
    assert abs(d.theta_ddot) <= 1e-15


def test_reduced_rhs_pure_attraction_shrinks():
    # with no swirl and no size rate, the polygon contracts on the sphere
    cfg = regular_polygon(3, sigma=1, k=3)
    state = synthesize_initial(cfg, 0.8, 0.0, 0.0)
    d = reduced_rhs(state, cfg)
    b = criterion_terms(cfg, 0.8).b[0]
    assert d.rho_ddot == pytest.approx((1.0 - 1.0 / 0.8**2) * b, rel=1e-14)
    assert d.rho_ddot < 0


def test_reduced_rhs_conserves_planar_momentum_identity():
    # d/dt (rho^2 thetadot) = 2 rho rhodot thetadot + rho^2 thetaddot = 0
    cfg = regular_polygon(4, sigma=-1, k=3)
    state = synthesize_initial(cfg, 0.9, 0.3, 1.4)
    d = reduced_rhs(state, cfg)
    lhs = 2 * state.rho * state.rho_dot * state.theta_dot
    assert lhs + state.rho**2 * d.theta_ddot == pytest.approx(0.0, abs=1e-15)


def test_reduced_rhs_strict_b():
    beta = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3 + 0.1])
    cfg = PolygonConfig(masses=[1, 1, 1], beta=beta, sigma=1, k=3)
    state = synthesize_initial(cfg, 0.8, 0.0, 1.0)
    reduced_rhs(state, cfg)  # default mode runs
    with pytest.raises(SingularityError, match="radial coefficients"):
        reduced_rhs(state, cfg, strict_b=True)


def test_pair_inner_derivative_consistency():
    # d/dt (q_i (.) q_j) along the embedded flow matches the product rule
    cfg = regular_polygon(3, sigma=1, k=3)
    state = synthesize_initial(cfg, 0.8, 0.0, 1.0)
    rhs = make_reduced_rhs(cfg)
    h = 1e-5
    traj = integrate_fixed_rk4(rhs, pack_reduced(state), (0.0, 2 * h), h, h)
    states = [unpack_reduced(y, 3) for y in traj.samples]
    fulls = [embed(s, cfg, tol=1e-3) for s in states]
    for i in range(3):
        for j in range(i + 1, 3):
            inner = [sigma_dot(f.positions[i], f.positions[j], 1) for f in fulls]
            fd = (inner[2] - inner[0]) / (2 * h)
            mid = fulls[1]
            rule = (
                sigma_dot(mid.velocities[i], mid.positions[j], 1)
                + sigma_dot(mid.positions[i], mid.velocities[j], 1)
            )
            assert fd == pytest.approx(rule, abs=1e-6)


def test_reduced_packing_round_trip():
    cfg = regular_polygon(3, sigma=1, k=5)
    state = synthesize_initial(cfg, 0.7, 0.2, 1.1)
    again = unpack_reduced(pack_reduced(state), 5)
    assert again.rho == state.rho and again.theta_dot == state.theta_dot
    np.testing.assert_array_equal(again.z, state.z)
    np.testing.assert_array_equal(again.z_dot, state.z_dot)
    with pytest.raises(DimensionError):
        unpack_reduced(pack_reduced(state), 4)


def test_full_packing_round_trip():
    cfg = regular_polygon(2, sigma=-1, k=3)
    state = embed(synthesize_initial(cfg, 0.5, 0.1, 0.4), cfg)
    again = unpack_full(pack_full(state), cfg.masses, -1, 3)
    np.testing.assert_array_equal(again.positions, state.positions)
    np.testing.assert_array_equal(again.velocities, state.velocities)
    with pytest.raises(DimensionError):
        unpack_full(pack_full(state)[:-1], cfg.masses, -1, 3)
