import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from oracles import ar1, brute_force_l1, random_spd, sparse_vector
from sparseprec.baselines import (
    AdmmConfig,
    AdmmFactor,
    HtpConfig,
    admm_solve_column,
    admm_solve_columns,
    htp_solve_column,
    shrink,
)
from sparseprec.giss import Termination
from sparseprec.metrics import incoherence


def e(p, i):
    return np.eye(p)[:, i]


def _oracle_instance(seed, s=2):
    rng = np.random.default_rng(seed)
    while True:
        S = random_spd(rng, 8)
        if incoherence(S, s).a1_holds:
            break
    beta = sparse_vector(rng, 8, s)
    return S, S @ beta, beta


def test_shrink_by_hand():
    np.testing.assert_array_equal(shrink(np.array([3.0, -0.5, -2.0, 0.0]), 1.0), [2.0, 0.0, -1.0, 0.0])


@given(hnp.arrays(np.float64, 10, elements=st.floats(-100, 100)), st.floats(0, 10))
def test_shrink_is_prox_of_l1(x, kappa):
    y = shrink(x, kappa)
    assert np.all(np.abs(y) <= np.abs(x))
    assert np.all(np.abs(x - y) <= kappa + 1e-12)
    assert np.all((y == 0) | (np.sign(y) == np.sign(x)))


def test_htp_identity():
    res = htp_solve_column(np.eye(5), e(5, 3), HtpConfig(sparsity_s=1))
    np.testing.assert_array_equal(res.beta, e(5, 3))
    assert res.iterations == 1
    assert res.termination is Termination.RESIDUAL_BELOW_LAMBDA


def test_htp_ar1_first_column():
    res = htp_solve_column(ar1(200), e(200, 0), HtpConfig(sparsity_s=2))
    assert list(np.flatnonzero(res.beta)) == [0, 1]
    np.testing.assert_allclose(res.beta[:2], [4 / 3, -2 / 3], atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_htp_matches_oracle_support(seed):
    S, b, beta = _oracle_instance(seed)
    _, supp = brute_force_l1(S, b)
    res = htp_solve_column(S, b, HtpConfig(sparsity_s=2))
    assert tuple(np.flatnonzero(np.abs(res.beta) > 1e-8)) == supp


def test_htp_rejects_large_s():
    with pytest.raises(ValueError):
        htp_solve_column(np.eye(3), e(3, 0), HtpConfig(sparsity_s=4))


def test_htp_precomputed_norm_gives_same_answer():
    S = 3.0 * ar1(20)
    a = htp_solve_column(S, e(20, 7), HtpConfig(sparsity_s=3))
    b = htp_solve_column(S, e(20, 7), HtpConfig(sparsity_s=3), sigma_norm=np.linalg.norm(S, 2))
    np.testing.assert_allclose(a.beta, b.beta, atol=1e-12)


def test_admm_identity_equality():
    cfg = AdmmConfig()
    res = admm_solve_column(np.eye(4), e(4, 1), cfg)
    assert np.linalg.norm(res.beta - e(4, 1)) <= cfg.primal_tol
    assert res.termination is Termination.RESIDUAL_BELOW_LAMBDA


def test_admm_ar1_equality_contains_true_support():
    S = ar1(200)
    E = np.eye(200)
    res = admm_solve_columns(S, E, AdmmConfig())
    B = np.column_stack([r.beta for r in res])
    true_supp = np.abs(np.linalg.inv(S)) > 1e-8
    assert np.all(np.abs(B)[true_supp] > 1e-8)
    assert all(r.termination is Termination.RESIDUAL_BELOW_LAMBDA for r in res)


@pytest.mark.parametrize("seed", range(5))
def test_admm_equality_hits_l1_optimum(seed):
    S, b, _ = _oracle_instance(seed)
    oracle, _ = brute_force_l1(S, b)
    res = admm_solve_column(S, b, AdmmConfig())
    assert abs(np.abs(res.beta).sum() - np.abs(oracle).sum()) <= 1e-6


def test_admm_inequality_respects_box():
    S = ar1(30)
    lam = 0.05
    res = admm_solve_column(S, e(30, 4), AdmmConfig(lam=lam, primal_tol=1e-8, dual_tol=1e-8))
    assert res.extra["converged"]
    assert res.final_residual_inf <= lam + 1e-6
    # the relaxed problem yields a smaller l1 norm than the exact inverse column
    assert np.abs(res.beta).sum() < np.abs(np.linalg.solve(S, e(30, 4))).sum()


def test_admm_block_equals_single_columns():
    S = ar1(12)
    cfg = AdmmConfig(lam=0.01, primal_tol=1e-7, dual_tol=1e-7)
    factor = AdmmFactor.build(S, cfg.lam)
    block = admm_solve_columns(S, np.eye(12)[:, [2, 9]], cfg, factor)
    for r, i in zip(block, [2, 9]):
        single = admm_solve_column(S, e(12, i), cfg, factor)
        # matmul widths differ, so only rounding-level agreement is expected
        np.testing.assert_allclose(r.beta, single.beta, rtol=0, atol=1e-12)
        assert abs(r.iterations - single.iterations) <= 1


def test_admm_max_iters():
    res = admm_solve_column(ar1(10), e(10, 0), AdmmConfig(max_iters=2))
    assert res.termination is Termination.MAX_ITERS
    assert not res.extra["converged"]


def test_admm_singular_sigma_is_ridged():
    S = np.ones((3, 3))
    f = AdmmFactor.build(S, 0.0)
    assert f.regularized


def test_config_validation():
    with pytest.raises(ValueError):
        AdmmConfig(penalty_rho=0)
    with pytest.raises(ValueError):
        AdmmConfig(primal_tol=0)
    with pytest.raises(ValueError):
        HtpConfig(sparsity_s=0)
