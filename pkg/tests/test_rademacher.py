import numpy as np
import pytest

from opband import RademacherSystem, embed, measure_constants, project


def plain_pnorm(y, p):
    return float(np.sum(np.abs(y) ** p) ** (1.0 / p))


def test_sign_matrix_shape_and_values():
    sys5 = RademacherSystem.make(5, 3.0)
    s = sys5.sign_matrix
    assert s.shape == (5, 32)
    assert set(np.unique(s)) == {-1.0, 1.0}
    # all 32 sign columns are distinct
    cols = {tuple(c) for c in s.T}
    assert len(cols) == 32
    # each row balances: half +1, half -1
    assert np.all(s.sum(axis=1) == 0)


def test_project_embed_is_the_identity():
    rng = np.random.default_rng(0)
    for n, p in [(1, 2.0), (4, 1.5), (6, 3.0), (8, 4.0)]:
        system = RademacherSystem.make(n, p)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        back = project(system, embed(system, x))
        assert np.allclose(back, x, rtol=0, atol=1e-13 * np.abs(x).max())


def test_p2_embedding_is_an_isometry():
    rng = np.random.default_rng(1)
    for n in (2, 5, 9):
        system = RademacherSystem.make(n, 2.0)
        for _ in range(5):
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            y = embed(system, x)
            assert plain_pnorm(y, 2.0) == pytest.approx(
                np.linalg.norm(x), rel=1e-12
            )


def test_p4_moment_identity_for_real_vectors():
    # for real x and signs: E |sum x_i eps_i|^4 = 3 ||x||_2^4 - 2 sum x_i^4
    rng = np.random.default_rng(2)
    for n in (3, 6, 9):
        system = RademacherSystem.make(n, 4.0)
        x = rng.standard_normal(n)
        y = embed(system, x)
        fourth = plain_pnorm(y, 4.0) ** 4
        expected = 3.0 * np.linalg.norm(x) ** 4 - 2.0 * np.sum(x**4)
        assert fourth == pytest.approx(expected, rel=1e-12)


def test_p4_upper_constant_at_n8():
    # the real moment identity peaks at x = ones(n)/sqrt(n), giving
    # (3 - 2/n)^{1/4}; at n = 8 that is about 1.28787
    consts = measure_constants(8, 4.0, restarts=6, iters=200)
    frozen = (3.0 - 2.0 / 8.0) ** 0.25
    assert consts.upper_embed >= frozen - 1e-9
    assert consts.upper_embed == pytest.approx(frozen, rel=0.05)
    assert consts.lower_embed <= 1.0 + 1e-9


def test_p2_constants_are_all_one():
    for n in (2, 4, 6):
        consts = measure_constants(n, 2.0, restarts=4, iters=120)
        assert consts.lower_embed == pytest.approx(1.0, abs=1e-9)
        assert consts.upper_embed == pytest.approx(1.0, abs=1e-9)
        assert consts.projection_norm == pytest.approx(1.0, abs=1e-9)


def test_lower_embedding_constant_stays_away_from_zero():
    # Khintchine: for p = 1.5 the lower constant is bounded below uniformly
    for n in (2, 5, 8):
        consts = measure_constants(n, 1.5, restarts=4, iters=150)
        assert consts.lower_embed >= 0.5
        assert consts.lower_embed <= 1.0 + 1e-9
        assert consts.upper_embed <= 1.0 + 1e-9  # p < 2 contracts moments


def test_projection_norm_bounded_by_embedding_constants():
    # ||J P|| <= ||J|| * ||P|| and ||P|| is the dual-exponent upper constant
    for n, p in [(5, 4.0), (6, 3.0)]:
        q = p / (p - 1.0)
        cp = measure_constants(n, p, restarts=6, iters=200)
        cq = measure_constants(n, q, restarts=6, iters=200)
        assert cp.projection_norm <= cp.upper_embed * cq.upper_embed + 0.05
        assert cp.projection_norm >= 1.0 - 1e-9  # it fixes the embedded copy


def test_make_validates_inputs():
    with pytest.raises(ValueError):
        RademacherSystem.make(0, 2.0)
    with pytest.raises(ValueError):
        RademacherSystem.make(21, 2.0)
    with pytest.raises(ValueError):
        RademacherSystem.make(4, 1.0)


def test_embed_project_validate_lengths():
    system = RademacherSystem.make(3, 2.0)
    with pytest.raises(ValueError):
        embed(system, np.ones(4))
    with pytest.raises(ValueError):
        project(system, np.ones(7))


def test_measure_constants_size_guard():
    with pytest.raises(ValueError, match="14"):
        measure_constants(15, 2.0)
