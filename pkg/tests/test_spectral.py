"""H-eigenvalues, PD probes and copositivity probes."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from structensor.cones import precondition
from structensor.decomposition import null_direction, spans
from structensor.spectral import (
    copositive_min,
    min_h_eigenvalue,
    numeric_pd_check,
    project_simplex,
    strict_cop_check,
)
from structensor.tensor import (
    DecompositionList,
    SymmetricTensor,
    diagonal_tensor,
    eval_tensor,
    from_weighted_powers,
    grad,
    random_tensor,
    rank_one_pow,
    tensor_scale,
)


def _kkt(A, pair):
    m = A.order
    return float(np.max(np.abs(grad(A, pair.x) - pair.lambda_ * pair.x ** (m - 1))))


def test_diagonal_tensor_eigenvalue_one():
    pair = min_h_eigenvalue(diagonal_tensor(4, 3))
    assert pair.lambda_ == pytest.approx(1.0, abs=1e-10)
    assert pair.converged


def test_rank_one_power_zero_at_orthogonal_direction():
    pair = min_h_eigenvalue(rank_one_pow((1.0, 0.0), 4))
    assert abs(pair.lambda_) < 1e-12
    assert abs(pair.x[0]) < 1e-6 and abs(abs(pair.x[1]) - 1) < 1e-9


def test_sec54_eigenvalue(sec54):
    pair = min_h_eigenvalue(sec54, restarts=16)
    assert pair.lambda_ == pytest.approx(0.9956, abs=1e-3)
    assert abs(np.sum(pair.x**4) - 1) <= 1e-12


def test_odd_order_rejected():
    with pytest.raises(ValueError):
        min_h_eigenvalue(random_tensor("dense", 3, 2)[0])
    with pytest.raises(ValueError):
        numeric_pd_check(random_tensor("dense", 3, 2)[0])


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_eigenpair_satisfies_its_residual(seed):
    A, _ = random_tensor("dense", 4, 3, seed=seed)
    pair = min_h_eigenvalue(A, seed=seed)
    assert _kkt(A, pair) <= pair.kkt_residual * (1 + 1e-9) + 1e-15
    assert abs(np.sum(pair.x**4) - 1) <= 1e-12


@settings(max_examples=5, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_cd_tensors_have_nonnegative_eigenvalue(seed):
    A, _ = random_tensor("cd", 4, 3, count=2, seed=seed)
    assert min_h_eigenvalue(A).lambda_ >= -1e-8 * tensor_scale(A)


@pytest.mark.parametrize("t", [0.0, 1.0, 10.0])
def test_diagonal_shift_is_monotone(t):
    A, _ = random_tensor("dense", 4, 3, seed=5)
    base = min_h_eigenvalue(A).lambda_
    shifted = min_h_eigenvalue(A + diagonal_tensor(4, 3, t)).lambda_
    assert shifted >= base - 1e-9 * max(1.0, abs(base))


def test_deterministic_reports():
    A, _ = random_tensor("dense", 4, 3, seed=11)
    a, b = numeric_pd_check(A, seed=3), numeric_pd_check(A, seed=3)
    assert a.to_dict() == b.to_dict()


def test_pd_probe_statuses(sec55):
    assert numeric_pd_check(SymmetricTensor.zeros(4, 2)).status == "zero_boundary"
    u = np.array([1.0, -2.0, 0.5])
    neg = numeric_pd_check(rank_one_pow(u, 4) * -1.0)
    assert neg.status == "negative_witness"
    assert eval_tensor(rank_one_pow(u, 4) * -1.0, neg.argmin) < 0
    probe = numeric_pd_check(precondition(sec55).tensor)
    assert probe.min_value > 0


def test_spanning_iff_positive_eigenvalue():
    A, dec = random_tensor("cd", 4, 3, count=4, seed=2)
    assert spans(dec) and min_h_eigenvalue(A).lambda_ > 1e-8 * tensor_scale(A)
    U = np.array([[1.0, 2.0, 0.0], [0.5, -1.0, 0.0], [2.0, 1.0, 0.0]])
    dec = DecompositionList(U)
    A = from_weighted_powers(dec, 4)
    assert min_h_eigenvalue(A).lambda_ <= 1e-8 * tensor_scale(A)
    assert abs(eval_tensor(A, null_direction(dec))) <= 1e-12


# -- simplex -------------------------------------------------------------------------


def test_project_simplex():
    P = project_simplex(np.array([[0.2, 0.3, 0.5], [2.0, 0.0, 0.0], [-1.0, 0.5, 0.7]]))
    assert np.allclose(P.sum(axis=1), 1) and np.all(P >= 0)
    assert np.allclose(P[0], [0.2, 0.3, 0.5]) and np.allclose(P[1], [1, 0, 0])


def test_copositive_examples(sec54):
    ones = copositive_min(rank_one_pow((1, 1, 1), 4))
    assert ones.min_value == pytest.approx(1.0, rel=1e-9)
    neg = copositive_min(SymmetricTensor.from_entries(4, 2, {(4, 0): -1.0, (0, 4): 1.0}))
    assert neg.status == "negative_witness" and np.allclose(neg.argmin, [1, 0])
    assert strict_cop_check(rank_one_pow((1, 1, 1), 4))
    assert not strict_cop_check(rank_one_pow((1, 0), 4))
    # the raw tensor spans twelve orders of magnitude, so its simplex minimum (~2)
    # sits below the relative threshold; after diagonal scaling it is strict
    assert copositive_min(sec54).status == "zero_boundary"
    assert strict_cop_check(precondition(sec54).tensor)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_cp_tensors_never_negative_on_simplex(seed):
    A, _ = random_tensor("cp", 4, 3, seed=seed)
    assert copositive_min(A, seed=seed).status != "negative_witness"
