"""Tensor core: storage, evaluation, inner products, Hadamard, scaling, generators."""
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from structensor.tensor import (
    DecompositionList,
    SymmetricTensor,
    coefficient_embedding,
    diagonal_tensor,
    eval_tensor,
    from_weighted_powers,
    grad,
    hadamard,
    hessian,
    inner_coeff,
    inner_full,
    multi_indices,
    multinomial,
    random_tensor,
    rank_one_pow,
    scale_variables,
    tensor_scale,
)

from conftest import brute_eval, full_index_sum


# -- multinomial -------------------------------------------------------------


@pytest.mark.parametrize("alpha,expected", [((4, 0), 1), ((2, 2), 6), ((1, 1, 1, 1), 24), ((3, 1, 0), 4)])
def test_multinomial_values(alpha, expected):
    assert multinomial(alpha) == expected


def test_multinomial_overflow_detected():
    with pytest.raises(OverflowError):
        multinomial((1,) * 40)


def test_multi_indices_graded_lex():
    assert multi_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert len(multi_indices(4, 4)) == math.comb(7, 4)


# -- storage and serialization -------------------------------------------------


def test_from_full_round_trip():
    A, _ = random_tensor("dense", 4, 3, seed=3)
    assert SymmetricTensor.from_full(A.to_full()) == A


def test_full_array_is_symmetric():
    A, _ = random_tensor("dense", 3, 3, seed=1)
    T = A.to_full()
    assert np.allclose(T, np.transpose(T, (1, 0, 2)))
    assert np.allclose(T, np.transpose(T, (2, 1, 0)))


def test_dict_round_trip_and_sorted_unique_alphas():
    A, _ = random_tensor("dense", 4, 3, seed=2)
    d = json.loads(json.dumps(A.to_dict()))
    alphas = [tuple(e["alpha"]) for e in d["entries"]]
    assert alphas == sorted(alphas, reverse=True)
    assert len(set(alphas)) == len(alphas)
    assert SymmetricTensor.from_dict(d) == A


@pytest.mark.parametrize(
    "payload,field",
    [
        ({"dim": 2, "entries": []}, "order"),
        ({"order": 4, "dim": 2, "entries": [{"alpha": [3, 0], "value": 1}]}, "alpha"),
        ({"order": 4, "dim": 2, "entries": [{"alpha": [4, 0], "value": 1}, {"alpha": [4, 0], "value": 2}]}, "duplicated"),
    ],
)
def test_malformed_tensor_dict_names_field(payload, field):
    with pytest.raises(ValueError, match=field):
        SymmetricTensor.from_dict(payload)


def test_immutable_values():
    A = diagonal_tensor(4, 2)
    with pytest.raises(ValueError):
        A.values[0] = 5.0


# -- eval / grad -----------------------------------------------------------------


def test_eval_examples(sec54):
    assert eval_tensor(rank_one_pow((1, 1), 4), (1, 2)) == pytest.approx(81.0)
    assert eval_tensor(SymmetricTensor.zeros(4, 3), (1, 2, 3)) == 0.0
    assert eval_tensor(sec54, (1, 0)) == pytest.approx(1.9999, rel=1e-14)


def test_eval_matches_full_index_sum():
    rng = np.random.default_rng(0)
    for seed in range(5):
        A, _ = random_tensor("dense", 3, 3, seed=seed)
        x = rng.standard_normal(3)
        assert eval_tensor(A, x) == pytest.approx(brute_eval(A, x), rel=1e-12, abs=1e-12)


def test_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        eval_tensor(diagonal_tensor(4, 3), (1, 2))


def test_grad_rank_one_and_zero():
    u, x = np.array([1.0, -2.0, 0.5]), np.array([0.3, 0.1, -1.0])
    assert np.allclose(grad(rank_one_pow(u, 4), x), (u @ x) ** 3 * u)
    assert np.all(grad(rank_one_pow(u, 4), np.zeros(3)) == 0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), m=st.integers(2, 5), n=st.integers(2, 4))
def test_euler_identity(seed, m, n):
    A, _ = random_tensor("dense", m, n, seed=seed)
    x = np.random.default_rng(seed).standard_normal(n)
    v = eval_tensor(A, x)
    assert x @ grad(A, x) == pytest.approx(v, rel=1e-10, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_grad_matches_finite_differences(seed):
    A, _ = random_tensor("dense", 4, 3, seed=seed)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(3)
    h = 1e-6
    fd = np.array([(eval_tensor(A, x + h * e) - eval_tensor(A, x - h * e)) / (2 * h) for e in np.eye(3)]) / 4
    g = grad(A, x)
    assert np.allclose(g, fd, rtol=1e-6, atol=1e-6 * np.max(np.abs(g)))


def test_hessian_matches_grad_differences():
    A, _ = random_tensor("dense", 4, 3, seed=9)
    x = np.array([0.4, -0.7, 1.1])
    h = 1e-6
    fd = np.array([(grad(A, x + h * e) - grad(A, x - h * e)) / (2 * h) for e in np.eye(3)]) / 3
    assert np.allclose(hessian(A, x), fd, rtol=1e-6, atol=1e-7)


# -- inner products --------------------------------------------------------------


def test_inner_product_examples():
    I = SymmetricTensor.from_entries(2, 2, {(2, 0): 1, (0, 2): 1})
    assert inner_full(I, I) == 2.0 and inner_coeff(I, I) == 2.0
    A = SymmetricTensor.from_entries(2, 2, {(1, 1): 1})
    assert inner_coeff(A, A) == 1.0 and inner_full(A, A) == 2.0
    assert inner_full(I, SymmetricTensor.zeros(2, 2)) == 0.0


def test_inner_full_of_powers_brute_force():
    u, v = np.array([0.3, -1.2]), np.array([2.0, 0.7])
    U, V = rank_one_pow(u, 4), rank_one_pow(v, 4)
    assert inner_full(U, V) == pytest.approx((u @ v) ** 4, rel=1e-12)
    assert inner_full(U, V) == pytest.approx(full_index_sum(U, V), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_inner_products_symmetric_bilinear_and_related(seed):
    A, _ = random_tensor("dense", 4, 3, seed=seed)
    B, _ = random_tensor("dense", 4, 3, seed=seed + 1)
    C, _ = random_tensor("dense", 4, 3, seed=seed + 2)
    assert inner_full(A, B) == pytest.approx(inner_full(B, A), rel=1e-12)
    assert inner_coeff(A, B) == pytest.approx(inner_coeff(B, A), rel=1e-12)
    assert inner_full(A * 2.0 + C, B) == pytest.approx(2 * inner_full(A, B) + inner_full(C, B), rel=1e-10, abs=1e-10)
    assert inner_full(A, B) == pytest.approx(inner_coeff(coefficient_embedding(A), B), rel=1e-12, abs=1e-12)
    assert inner_full(A, B) == pytest.approx(full_index_sum(A, B), rel=1e-10, abs=1e-10)


# -- Hadamard, powers, scaling -----------------------------------------------------


def test_hadamard_examples():
    u, v = np.array([1.0, 2.0]), np.array([3.0, 4.0])
    P = hadamard(rank_one_pow(u, 2), rank_one_pow(v, 2))
    assert np.allclose(P.values, [9.0, 24.0, 64.0])
    assert P == rank_one_pow(u * v, 2)
    A, _ = random_tensor("dense", 4, 3, seed=0)
    assert hadamard(A, SymmetricTensor.zeros(4, 3)) == SymmetricTensor.zeros(4, 3)


def test_rank_one_pow_examples():
    assert rank_one_pow((1, 0, 0), 4)[(4, 0, 0)] == 1.0
    assert tensor_scale(rank_one_pow((1, 0, 0), 4) - SymmetricTensor.from_entries(4, 3, {(4, 0, 0): 1})) == 0
    assert np.all(rank_one_pow((1, 1), 2).to_full() == 1)
    assert rank_one_pow((1, 1000), 4)[(2, 2)] == 1e6


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), m=st.integers(2, 5))
def test_weighted_powers_evaluate_as_sum(seed, m):
    rng = np.random.default_rng(seed)
    U, w = rng.standard_normal((3, 3)), rng.standard_normal(3)
    A = from_weighted_powers(DecompositionList(U, w), m)
    x = rng.standard_normal(3)
    expected = float(np.sum(w * (U @ x) ** m))
    assert eval_tensor(A, x) == pytest.approx(expected, rel=1e-12, abs=1e-12 * np.sum(np.abs(w) * np.abs(U @ x) ** m))


def test_empty_decomposition_gives_zero():
    assert from_weighted_powers(DecompositionList(np.zeros((0, 3)), np.zeros(0)), 4) == SymmetricTensor.zeros(4, 3)


def test_scale_variables(sec55):
    A, _ = random_tensor("dense", 4, 3, seed=4)
    assert scale_variables(A, np.ones(3)) == A
    u, d = np.array([0.5, -1.0, 2.0]), np.array([2.0, 0.5, 3.0])
    assert scale_variables(rank_one_pow(u, 4), d).allclose(rank_one_pow(d * u, 4), rtol=1e-14)
    x = np.array([0.3, 0.2, -0.9])
    assert eval_tensor(scale_variables(A, d), x) == pytest.approx(eval_tensor(A, d * x), rel=1e-14)
    with pytest.raises(ValueError):
        scale_variables(A, np.array([1.0, 0.0, 1.0]))
    assert tensor_scale(sec55) > 1e20
    assert tensor_scale(scale_variables(sec55, np.array([1, 1 / 50, 1 / 2500, 1 / 125000]))) < 1e3


# -- generators ---------------------------------------------------------------------


def test_random_tensor_contracts():
    A, dec = random_tensor("cp", 4, 3, count=5, seed=1)
    assert np.all(dec.vectors >= 0)
    B, dec2 = random_tensor("cd", 4, 3, count=5, seed=1)
    assert np.linalg.matrix_rank(dec2.vectors) == 3
    assert random_tensor("cd", 4, 3, seed=7)[0] == random_tensor("cd", 4, 3, seed=7)[0]
    for kind in ("sos", "hankel", "dense"):
        assert random_tensor(kind, 4, 3, seed=2)[0] == random_tensor(kind, 4, 3, seed=2)[0]
    with pytest.raises(ValueError):
        random_tensor("nope", 4, 3)


def test_decomposition_list_validation():
    with pytest.raises(ValueError):
        DecompositionList(np.ones((2, 3)), np.ones(3))
    with pytest.raises(ValueError):
        DecompositionList(-np.ones((1, 2)), cp_candidate=True)
    d = DecompositionList(np.ones((2, 3)))
    assert np.all(d.weights == 1)
    assert DecompositionList.from_dict(d.to_dict()).to_dict() == d.to_dict()
    with pytest.raises(ValueError, match="vectors"):
        DecompositionList.from_dict({"dim": 3})
