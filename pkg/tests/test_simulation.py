import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import jacobi_eigenvalues, naive_covariance
from sparseprec.errors import DegenerateDraw, TooFewSamples
from sparseprec.simulation import (
    ScenarioSpec,
    derive_seed,
    draw_case2,
    gen_case1,
    gen_case2,
    make_rng,
    sample_covariance,
    sample_gaussian,
    standard_normals,
)


def test_case1_p2():
    t = gen_case1(2)
    np.testing.assert_array_equal(t.omega, [[4 / 3, -2 / 3], [-2 / 3, 4 / 3]])


def test_case1_p3_values_and_inverse():
    t = gen_case1(3)
    np.testing.assert_array_equal(np.diag(t.omega), [4 / 3, 5 / 3, 4 / 3])
    assert t.omega[0, 1] == t.omega[1, 2] == -2 / 3 and t.omega[0, 2] == 0
    assert np.abs(t.sigma @ t.omega - np.eye(3)).max() <= 1e-12


def test_case1_p200_count():
    assert np.count_nonzero(gen_case1(200).omega) == 598


@pytest.mark.parametrize("p", [2, 5, 50, 400])
def test_case1_inverse_pair(p):
    t = gen_case1(p)
    assert np.abs(t.sigma @ t.omega - np.eye(p)).max() <= 1e-12


def test_case1_rejects_p1():
    with pytest.raises(ValueError):
        gen_case1(1)


@pytest.mark.parametrize("seed", range(20))
def test_case2_inverse_pair_and_construction(seed):
    t = gen_case2(60, seed)
    assert np.all(np.diag(t.omega) == 1.0)
    assert np.array_equal(t.omega, t.omega.T) and np.array_equal(t.sigma, t.sigma.T)
    assert np.abs(t.sigma @ t.omega - np.eye(60)).max() <= 1e-8
    assert t.info["condition_before_normalization"] == pytest.approx(60.0, rel=1e-4)


def test_case2_condition_against_jacobi():
    t = gen_case2(8, 42)
    lo, hi = t.info["lambda_min_B"], t.info["lambda_max_B"]
    iu = np.triu_indices(8, 1)
    B = np.zeros((8, 8))
    B[iu] = np.where(t.omega[iu] != 0, 0.5, 0.0)
    B = B + B.T
    ev = jacobi_eigenvalues(B)
    assert lo == pytest.approx(ev[0], abs=1e-6) and hi == pytest.approx(ev[-1], abs=1e-6)
    d = t.info["delta"]
    assert (ev[-1] + d) / (ev[0] + d) == pytest.approx(8.0, rel=1e-4)


def _edge_fraction(p, seed):
    try:
        return np.count_nonzero(np.triu(gen_case2(p, seed).omega, 1)) / (p * (p - 1) / 2)
    except DegenerateDraw:
        return 0.0  # the empty graph is the only draw without two distinct eigenvalues here


def test_case2_edge_fraction_over_seeds():
    fracs = [_edge_fraction(4, s) for s in range(1000)]
    assert 0.08 <= np.mean(fracs) <= 0.12


def test_case2_deterministic():
    a, b = gen_case2(30, 9), gen_case2(30, 9)
    np.testing.assert_array_equal(a.sigma, b.sigma)
    assert not np.array_equal(a.omega, gen_case2(30, 10).omega)


def test_draw_case2_redraws_degenerate_graphs():
    # at p = 2 the graph is empty (single eigenvalue) with probability 0.9
    truth, seed, redraws = draw_case2(2, 0, 0)
    assert truth.omega[0, 1] != 0
    assert seed == derive_seed(0, 0, redraws)
    assert redraws >= 0


def test_derive_seed_is_pure_and_distinct():
    assert derive_seed(5, 1, 0) == derive_seed(5, 1, 0)
    assert len({derive_seed(5, r, 0) for r in range(100)}) == 100


def test_box_muller_formula():
    m = 3
    rng = make_rng(17, 9)
    u1 = 1.0 - rng.random(m)
    u2 = rng.random(m)
    r = np.sqrt(-2 * np.log(u1))
    expected = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])[:5]
    np.testing.assert_array_equal(standard_normals(make_rng(17, 9), 5), expected)


def test_standard_normal_moments():
    z = standard_normals(make_rng(1, 2), 200_000)
    assert abs(z.mean()) < 0.01 and abs(z.var() - 1) < 0.01


def test_sample_gaussian_identity():
    X = sample_gaussian(np.eye(2), 100_000, 7)
    assert np.abs(sample_covariance(X) - np.eye(2)).max() < 0.03


def test_sample_gaussian_diag_variances():
    X = sample_gaussian(np.diag([4.0, 1.0]), 100_000, 8)
    v = X.var(axis=0, ddof=1)
    assert v[0] == pytest.approx(4.0, rel=0.03) and v[1] == pytest.approx(1.0, rel=0.03)


def test_sample_gaussian_empty():
    assert sample_gaussian(np.eye(3), 0, 1).shape == (0, 3)


def test_sample_covariance_by_hand():
    np.testing.assert_array_equal(sample_covariance(np.array([[0.0, 0.0], [2.0, 0.0]])), [[2, 0], [0, 0]])
    np.testing.assert_array_equal(sample_covariance(np.tile([1.0, -3.0, 2.0], (6, 1))), np.zeros((3, 3)))


def test_sample_covariance_matches_naive_loop():
    X = np.random.default_rng(4).standard_normal((50, 3))
    assert np.abs(sample_covariance(X) - naive_covariance(X)).max() <= 1e-12


def test_sample_covariance_too_few():
    with pytest.raises(TooFewSamples):
        sample_covariance(np.ones((1, 3)))


@given(st.integers(2, 30), st.integers(1, 6), st.integers(0, 2**31))
def test_sample_covariance_symmetric_psd(n, p, seed):
    X = np.random.default_rng(seed).standard_normal((n, p))
    S = sample_covariance(X)
    assert np.array_equal(S, S.T)
    assert np.linalg.eigvalsh(S).min() >= -1e-10


def test_scenario_spec_validation():
    assert ScenarioSpec("case1", 10).to_dict()["p"] == 10
    with pytest.raises(ValueError):
        ScenarioSpec("case3", 10)
    with pytest.raises(ValueError):
        ScenarioSpec("case2", 10, n=0)
