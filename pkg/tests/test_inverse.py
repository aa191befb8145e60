import warnings

import numpy as np
import pytest

import helmscat as hs
from helmscat.forward import sensor_green_operator
from helmscat.inverse import select_subset, tv_prox, tv_value


@pytest.fixture(autouse=True)
def _quiet_coarse_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        yield


def test_tv_value_by_hand():
    w = np.array([[0.0, 1.0], [0.0, 1.0]])
    # forward differences: dx rows are zero, dy = 1 in both rows
    assert tv_value(w) == pytest.approx(2.0)
    assert tv_value(np.full((5, 5), 3.0)) == 0.0


def test_tv_value_isotropic():
    w = np.zeros((3, 3))
    w[1, 1] = 1.0
    # point spike: two unit forward differences meet at (0,1)/(1,0) style
    # corners; the (0,0)-anchored pair combines isotropically
    expected = np.hypot(1.0, 0.0) * 4 + 0.0
    # differences: dx[0,1]=1, dx[1,1]=-1, dy[1,0]=1, dy[1,1]=-1; pairs at
    # (1,0): hypot(dx=?,dy=1); recompute directly
    dx = np.zeros((3, 3)); dy = np.zeros((3, 3))
    dx[:-1, :] = w[1:, :] - w[:-1, :]
    dy[:, :-1] = w[:, 1:] - w[:, :-1]
    assert tv_value(w) == pytest.approx(np.sum(np.hypot(dx, dy)))


def test_prox_zero_weight_projects():
    w = np.array([[-1.0, 2.0], [0.5, -0.1]])
    np.testing.assert_array_equal(tv_prox(w, 0.0), np.maximum(w, 0.0))


def test_prox_nonnegative_output():
    rng = np.random.default_rng(0)
    w = rng.standard_normal((12, 12))
    out = tv_prox(w, 0.3, 100)
    assert np.all(out >= 0.0)


def test_prox_fixed_point_on_constants():
    w = np.full((10, 10), 1.7)
    out = tv_prox(w, 0.2, 200)
    np.testing.assert_allclose(out, 1.7, atol=1e-10)


def test_prox_matches_convex_solver():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(3)
    v = rng.standard_normal((16, 16)) * 0.5 + 0.3
    weight = 0.2

    W = cp.Variable((16, 16))
    dx = W[1:, :] - W[:-1, :]
    dy = W[:, 1:] - W[:, :-1]
    tv = cp.sum(cp.norm(cp.vstack([cp.vec(dx[:, :-1], order="C"),
                                   cp.vec(dy[:-1, :], order="C")]), axis=0))
    tv = tv + cp.sum(cp.abs(dx[:, -1])) + cp.sum(cp.abs(dy[-1, :]))
    prob = cp.Problem(
        cp.Minimize(0.5 * cp.sum_squares(W - v) + weight * tv), [W >= 0])
    prob.solve(solver=cp.CLARABEL)

    def objective(w):
        return 0.5 * np.sum((w - v) ** 2) + weight * tv_value(w)

    out = tv_prox(v, weight, 1500)
    assert objective(out) - objective(W.value) < 1e-6


def test_prox_negative_weight_rejected():
    with pytest.raises(ValueError):
        tv_prox(np.zeros((4, 4)), -0.1)


def test_snr_values():
    eta_true = np.full((4, 4), 2.0)
    assert hs.snr(eta_true, eta_true) == np.inf
    eta_star = eta_true.copy()
    eta_star += 0.2
    expected = 20.0 * np.log10(np.linalg.norm(eta_true)
                               / np.linalg.norm(eta_true - eta_star))
    assert hs.snr(eta_star, eta_true) == pytest.approx(expected)


def test_eta_potential_round_trip():
    k0 = 2.0 * np.pi / 10.0
    eta = np.array([[1.0, 1.2], [1.5, 1.0]])
    f = k0 ** 2 * (eta ** 2 - 1.0)
    np.testing.assert_allclose(hs.eta_from_potential(f, 1.0, k0), eta)


def test_select_subset_deterministic():
    a = select_subset(np.random.default_rng(5), 20, 6)
    b = select_subset(np.random.default_rng(5), 20, 6)
    assert a == b
    assert a == sorted(a)
    assert len(set(a)) == 6
    assert all(0 <= q < 20 for q in a)


def test_config_validation():
    with pytest.raises(ValueError):
        hs.ReconstructionConfig(gamma=0.0, tau=1.0, iterations=1,
                                subset_size=1)
    with pytest.raises(ValueError):
        hs.ReconstructionConfig(gamma=1.0, tau=1.0, iterations=1,
                                subset_size=0)


def _toy_problem():
    lam = 10.0
    g = hs.Grid2D(17, 16.0, (-8.0, -8.0))
    geom = hs.make_circular_geometry(3, 10, 40.0, lam)
    scene = hs.ScatteringScene(g, 1.0, geom)
    cfg = hs.SolverConfig(abl_points=4, beta=0.0, levels=2, tol=1e-8)
    k0 = scene.k0
    x, y = g.coords()
    f_true = np.where(np.hypot(x, y) <= 4.0, k0 ** 2 * (1.1 ** 2 - 1.0), 0.0)
    g_full = sensor_green_operator(g, geom.sensors, k0, 1.0)
    fwd = hs.HelmholtzForward(scene, f_true, cfg)
    views = []
    for q in range(3):
        u, _ = fwd.total_field(q)
        views.append(g_full[geom.active[q]] @ (f_true * u).ravel())
    return scene, cfg, f_true, hs.MeasurementSet(views)


def test_data_fidelity_zero_at_truth():
    scene, cfg, f_true, ms = _toy_problem()
    for q in range(3):
        val = hs.data_fidelity(scene, f_true, q, ms.views[q], cfg)
        assert val < 1e-16


def test_gradient_vanishes_at_global_minimum():
    scene, cfg, f_true, ms = _toy_problem()
    grad, fid, wu = hs.gradient_data_fidelity(scene, f_true, [0, 1, 2],
                                              ms, cfg)
    scale_grad, scale_fid, _ = hs.gradient_data_fidelity(
        scene, np.zeros_like(f_true), [0, 1, 2], ms, cfg)
    assert fid < 1e-14 * scale_fid
    assert np.abs(grad).max() < 1e-7 * np.abs(scale_grad).max()


def test_reconstruction_recovers_toy_potential():
    scene, cfg, f_true, ms = _toy_problem()
    x, y = scene.grid.coords()
    eta_true = hs.eta_from_potential(f_true, 1.0, scene.k0)
    rc = hs.ReconstructionConfig(gamma=0.05, tau=1e-4, iterations=30,
                                 subset_size=3, seed=0, solver=cfg)
    f_star, history = hs.reconstruct_fbs(ms, scene, rc, eta_true=eta_true)
    assert history.snr_db[-1] > history.snr_db[0]
    assert len(history.objective) == 30
    assert history.objective[-1] < history.objective[0]
    assert np.all(f_star >= 0.0)


def test_reconstruction_history_without_truth():
    scene, cfg, f_true, ms = _toy_problem()
    rc = hs.ReconstructionConfig(gamma=0.05, tau=1e-4, iterations=2,
                                 subset_size=2, seed=1, solver=cfg)
    f_star, history = hs.reconstruct_fbs(ms, scene, rc)
    assert history.snr_db == []
    assert len(history.work_units) == 2
    assert history.work_units[-1] >= history.work_units[0]
