import numpy as np

from pslab import _kernels


def make_circle_data(rng, n_atoms=200, n_lifts=30):
    ang = rng.uniform(-np.pi, np.pi, size=n_atoms)
    zs = np.c_[np.cos(ang), np.sin(ang)]
    ws = rng.uniform(0.0, 1.0, size=n_atoms)
    ws /= ws.sum()
    d = rng.uniform(0.3, 8.0, size=n_lifts)
    oa = rng.uniform(-np.pi, np.pi, size=n_lifts)
    lifts = np.c_[np.sinh(d) * np.cos(oa), np.sinh(d) * np.sin(oa), np.cosh(d)]
    return zs, ws, lifts


def test_backends_agree_shadow_membership(rng):
    starts = rng.uniform(-0.5, 0.5, size=(20, 2))
    ps = rng.uniform(-0.6, 0.6, size=(20, 2))
    ang = rng.uniform(-np.pi, np.pi, size=50)
    zs = np.c_[np.cos(ang), np.sin(ang)]
    got = _kernels.shadow_membership(starts, ps, zs, 0.8)
    ref = _kernels._shadow_membership_np(starts, ps, zs, 0.8)
    assert np.array_equal(got, ref)


def test_backends_agree_shadow_from_origin(rng):
    zs, ws, lifts = make_circle_data(rng)
    got = _kernels.shadow_membership_lifted(lifts, zs, 1.3)
    ref = _kernels._shadow_from_origin_np(lifts, zs, 1.3)
    assert np.array_equal(got, ref)
    mass = _kernels.shadow_mass_from_origin(lifts, zs, ws, 1.3)
    assert np.allclose(mass, ref @ ws, atol=1e-14)


def test_backends_agree_shadow_to_origin(rng):
    zs, ws, _ = make_circle_data(rng)
    # random boosts: SO(2,1) matrices moving the origin to depth d
    mats = []
    for _ in range(15):
        d = rng.uniform(0.2, 5.0)
        a = rng.uniform(-np.pi, np.pi)
        c, s = np.cos(a), np.sin(a)
        R = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        B = np.array([[np.cosh(d), 0.0, np.sinh(d)],
                      [0.0, 1.0, 0.0],
                      [np.sinh(d), 0.0, np.cosh(d)]])
        mats.append(R @ B @ R.T)
    Minvs = np.stack(mats)
    got = _kernels.shadow_membership_to_origin(Minvs, zs, 1.1)
    ref = _kernels._shadow_to_origin_np(Minvs, zs, 1.1)
    assert np.array_equal(got, ref)
    mass = _kernels.shadow_mass_to_origin(Minvs, zs, ws, 1.1)
    assert np.allclose(mass, ref @ ws, atol=1e-14)


def test_batch_log_singular_values_matches_svd(rng):
    mats = rng.normal(size=(64, 3, 3))
    got = _kernels.batch_log_singular_values(mats)
    ref = np.log(np.linalg.svd(mats, compute_uv=False))
    assert np.allclose(got, ref, atol=1e-10)


def test_greedy_cover_backends_and_extremes(rng):
    pts = rng.normal(size=(200, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    for eps in (0.01, 0.2, 2.1):
        got = _kernels.greedy_cover_count(pts, eps, _kernels.METRIC_CHORDAL)
        ref = _kernels._greedy_cover_np(pts, eps, _kernels.METRIC_CHORDAL)
        assert got == ref
    assert _kernels.greedy_cover_count(pts, 2.1, _kernels.METRIC_CHORDAL) == 1


def test_hilbert_dist_ball_kernel_symmetry(rng):
    for _ in range(30):
        x, y = rng.uniform(-0.6, 0.6, size=(2, 2))
        d1 = _kernels._hilbert_dist_ball(x, y)
        d2 = _kernels._hilbert_dist_ball(y, x)
        assert abs(d1 - d2) < 1e-10


def test_seg_point_distance_endpoint_minimum():
    # p next to the segment start: the minimum is at the endpoint q
    q = np.array([0.0, 0.0])
    z = np.array([1.0, 0.0])
    p = np.array([-0.1, 0.0])
    d = _kernels.seg_point_distance(q, z, p)
    assert abs(d - _kernels._hilbert_dist_ball(q, p)) < 1e-9


def test_ray_distances_lifted_on_axis():
    # points on the ray itself are at distance 0; the antipodal point at
    # depth D is at distance D
    D = 2.5
    W = np.array([
        [np.sinh(D), 0.0, np.cosh(D)],
        [-np.sinh(D), 0.0, np.cosh(D)],
    ])
    dists = _kernels.ray_distances_lifted(W, np.array([1.0, 0.0]))
    assert abs(dists[0]) < 1e-12
    assert abs(dists[1] - D) < 1e-12
