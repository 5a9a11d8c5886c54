import numpy as np
import pytest

from pslab import cartan, matgroup, presets
from pslab.errors import NotFree


def test_word_reduction_and_inversion():
    assert matgroup.reduce_word((1, -1, 2)) == (2,)
    assert matgroup.reduce_word((1, 2, -2, -1)) == ()
    assert matgroup.invert_word((1, -2, 1)) == (-1, 2, -1)


def test_word_key_orders_letters_canonically():
    letters = [2, -1, 1, -2]
    assert sorted(letters, key=lambda x: matgroup.word_key((x,))) == [1, -1, 2, -2]


def test_sphere_sizes_match_free_group(sl2):
    spheres = matgroup.word_spheres(sl2, 4)
    sizes = [len(s) for s in spheres]
    assert sizes == [1, 4, 12, 36, 108]
    assert sum(sizes) == matgroup.free_ball_size(2, 4)


def test_sphere_order_is_canonical(sl2):
    sphere1 = matgroup.word_spheres(sl2, 1)[1]
    assert [e.word for e in sphere1] == [(1,), (-1,), (2,), (-2,)]


def test_word_matrices_consistent(sl2):
    for e in matgroup.word_ball(sl2, 3):
        assert np.allclose(e.matrix, sl2.word_matrix(e.word), atol=1e-12)
        assert np.allclose(
            e.inverse_matrix, sl2.word_matrix(matgroup.invert_word(e.word)),
            atol=1e-10)


def test_non_free_presentation_merges_coincident_words():
    # an order-4 rotation: the ball collapses onto 4 distinct elements
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    P = matgroup.GroupPresentation(2, [R], assume_free=False)
    with pytest.warns(UserWarning, match="merged"):
        ball = matgroup.word_ball(P, 6)
    assert len(ball) == 4


def test_conjugacy_classes_cyclic_and_inverse_distinct(sl2):
    reps = matgroup.conjugacy_classes(sl2, 2)
    words = {e.word for e in reps}
    # one representative per necklace; (1, 2) covers (2, 1)
    assert (1, 2) in words and (2, 1) not in words
    # a word and its inverse are distinct classes
    assert (1,) in words and (-1,) in words
    # cyclically non-reduced words are excluded
    assert all(len(w) < 2 or w[0] != -w[-1] for w in words)


def test_conjugacy_classes_primitive_only(sl2):
    reps = matgroup.conjugacy_classes(sl2, 4, primitive_only=True)
    words = {e.word for e in reps}
    assert (1,) in words and (1, 1) not in words


def test_conjugacy_classes_requires_free():
    P = matgroup.GroupPresentation(2, [np.eye(2)], assume_free=False)
    with pytest.raises(NotFree):
        matgroup.conjugacy_classes(P, 2)


def test_exterior_power_rep_multiplicative(rng):
    A, B = rng.normal(size=(2, 4, 4))
    assert np.allclose(
        matgroup.exterior_power_rep(A @ B, 2),
        matgroup.exterior_power_rep(A, 2) @ matgroup.exterior_power_rep(B, 2),
        atol=1e-10,
    )


def test_exterior_power_singular_values(rng):
    A = rng.normal(size=(4, 4))
    s = np.linalg.svd(A, compute_uv=False)
    s2 = np.linalg.svd(matgroup.exterior_power_rep(A, 2), compute_uv=False)
    assert abs(s2[0] - s[0] * s[1]) < 1e-8 * s[0] * s[1]


def test_symmetric_power_rep_homomorphism():
    from conftest import random_sl2

    A, B = random_sl2(2, seed=3)
    assert np.allclose(
        matgroup.symmetric_power_rep(A @ B, 4),
        matgroup.symmetric_power_rep(A, 4) @ matgroup.symmetric_power_rep(B, 4),
        atol=1e-9,
    )


def test_symmetric_power_rep_rotation_orthogonal():
    R = presets.rotation(0.77)
    S = matgroup.symmetric_power_rep(R, 3)
    assert np.allclose(S.T @ S, np.eye(3), atol=1e-12)


def test_batch_kappa_matches_scalar_kappa(sl3):
    ball = matgroup.word_ball(sl3, 4)
    logs = matgroup.batch_kappa(ball)
    for e, row in zip(ball[:40], logs[:40]):
        assert np.allclose(row, cartan.kappa(e.matrix), atol=1e-9)


def test_limit_cone_sample_unit_directions(sl3):
    dirs = matgroup.limit_cone_sample(sl3, (1, 2), 4)
    assert dirs.shape[1] == 3
    assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-12)
    assert np.allclose(dirs.sum(axis=1), 0.0, atol=1e-9)


def test_random_words_reduced(rng):
    for w in matgroup.random_words(2, 100, 12, rng):
        assert matgroup.reduce_word(w) == w
        assert 1 <= len(w) <= 12
