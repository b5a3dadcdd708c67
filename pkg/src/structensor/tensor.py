"""Symmetric tensors stored by exponent multi-index.

A symmetric tensor of order ``m`` and dimension ``n`` has one free entry per
exponent vector ``alpha`` (nonnegative integers summing to ``m``).  Entries
are kept in a dense array whose rows follow graded-lex order, i.e. the order
produced by ``itertools.combinations_with_replacement``.

Two inner products are provided and they are *not* interchangeable:

* :func:`inner_full` sums over every index tuple, so each multi-index is
  weighted by its multinomial count.
* :func:`inner_coeff` sums raw entries with no weights.  It is the pairing used
  by the moment-matrix machinery, where the SOS side enters through
  :func:`coefficient_embedding`.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "MAX_EXACT_MULTINOMIAL",
    "DecompositionList",
    "SymmetricTensor",
    "coefficient_embedding",
    "eval_tensor",
    "from_weighted_powers",
    "grad",
    "hadamard",
    "hessian",
    "inner_coeff",
    "inner_full",
    "multi_indices",
    "multinomial",
    "rank_one_pow",
    "random_tensor",
    "scale_variables",
    "diagonal_tensor",
    "tensor_scale",
]

# multinomials above this cannot be represented exactly as doubles
MAX_EXACT_MULTINOMIAL = 2**53


@lru_cache(maxsize=None)
def _exponents(n: int, m: int) -> np.ndarray:
    rows = []
    for combo in itertools.combinations_with_replacement(range(n), m):
        row = [0] * n
        for i in combo:
            row[i] += 1
        rows.append(row)
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), n)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _positions(n: int, m: int) -> dict[tuple[int, ...], int]:
    return {tuple(int(v) for v in row): k for k, row in enumerate(_exponents(n, m))}


@lru_cache(maxsize=None)
def _multinomials(n: int, m: int) -> np.ndarray:
    arr = np.array([multinomial(row) for row in _exponents(n, m)], dtype=float)
    arr.setflags(write=False)
    return arr


def multi_indices(n: int, m: int) -> list[tuple[int, ...]]:
    """All exponent vectors of length ``n`` and degree ``m`` in graded-lex order."""
    return list(_positions(n, m))


def multinomial(alpha: Sequence[int]) -> int:
    """Number of index tuples sharing the multi-index ``alpha``: m!/prod(alpha_i!).

    Raises ``OverflowError`` when the count can no longer be held exactly in a
    double, since every downstream use converts it to float.
    """
    alpha = [int(a) for a in alpha]
    if any(a < 0 for a in alpha):
        raise ValueError(f"negative exponent in {alpha}")
    value = math.factorial(sum(alpha))
    for a in alpha:
        value //= math.factorial(a)
    if value > MAX_EXACT_MULTINOMIAL:
        raise OverflowError(f"multinomial of {tuple(alpha)} exceeds 2**53")
    return value


class SymmetricTensor:
    """Immutable order-``m``, dimension-``n`` symmetric tensor.

    ``values`` holds one entry per multi-index in graded-lex order.  Use
    :meth:`from_entries` to build from a mapping ``alpha -> value`` where
    missing keys mean zero.
    """

    __slots__ = ("order", "dim", "_values")

    def __init__(self, order: int, dim: int, values: Iterable[float] | None = None):
        order, dim = int(order), int(dim)
        if order < 1 or dim < 1:
            raise ValueError(f"invalid shape order={order}, dim={dim}")
        size = len(_positions(dim, order))
        if values is None:
            arr = np.zeros(size)
        else:
            arr = np.array(values, dtype=float).reshape(-1)
            if arr.shape != (size,):
                raise ValueError(f"expected {size} entries for S_({order},{dim}), got {arr.size}")
        arr.setflags(write=False)
        self.order = order
        self.dim = dim
        self._values = arr

    @classmethod
    def from_entries(cls, order: int, dim: int, entries: Mapping[Sequence[int], float]):
        pos = _positions(int(dim), int(order))
        values = np.zeros(len(pos))
        for alpha, value in entries.items():
            key = tuple(int(a) for a in alpha)
            if key not in pos:
                raise ValueError(f"multi-index {key} is not valid for order {order}, dim {dim}")
            values[pos[key]] = value
        return cls(order, dim, values)

    @classmethod
    def from_coefficients(cls, order: int, dim: int, coefficients: Iterable[float]):
        """Inverse of :meth:`coefficients`: divide polynomial coefficients by multinomials."""
        coeffs = np.asarray(coefficients, dtype=float)
        return cls(order, dim, coeffs / _multinomials(int(dim), int(order)))

    @classmethod
    def zeros(cls, order: int, dim: int):
        return cls(order, dim)

    @classmethod
    def from_full(cls, array: np.ndarray):
        """Read entries off a dense ``n x ... x n`` array (symmetry assumed, not checked)."""
        array = np.asarray(array, dtype=float)
        order, dim = array.ndim, array.shape[0]
        values = []
        for alpha in _exponents(dim, order):
            idx = tuple(np.repeat(np.arange(dim), alpha))
            values.append(array[idx])
        return cls(order, dim, values)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def exponents(self) -> np.ndarray:
        return _exponents(self.dim, self.order)

    @property
    def multinomials(self) -> np.ndarray:
        return _multinomials(self.dim, self.order)

    @property
    def size(self) -> int:
        return self._values.size

    def entries(self) -> dict[tuple[int, ...], float]:
        return {alpha: float(v) for alpha, v in zip(_positions(self.dim, self.order), self._values)}

    def coefficients(self) -> np.ndarray:
        """Coefficients of the form ``A x^m`` in the monomial basis ``x^alpha``."""
        return self._values * self.multinomials

    def __getitem__(self, alpha: Sequence[int]) -> float:
        key = tuple(int(a) for a in alpha)
        pos = _positions(self.dim, self.order)
        if key in pos:
            return float(self._values[pos[key]])
        if len(key) != self.dim or sum(key) != self.order or min(key) < 0:
            raise KeyError(key)
        return 0.0

    def to_full(self) -> np.ndarray:
        """Dense ``n^m`` array; only sensible at desk scale."""
        out = np.empty((self.dim,) * self.order)
        pos = _positions(self.dim, self.order)
        for idx in itertools.product(range(self.dim), repeat=self.order):
            alpha = [0] * self.dim
            for i in idx:
                alpha[i] += 1
            out[idx] = self._values[pos[tuple(alpha)]]
        return out

    def _check_same_shape(self, other: "SymmetricTensor") -> None:
        if not isinstance(other, SymmetricTensor):
            raise TypeError(f"expected SymmetricTensor, got {type(other).__name__}")
        if (self.order, self.dim) != (other.order, other.dim):
            raise ValueError(
                f"shape mismatch: S_({self.order},{self.dim}) vs S_({other.order},{other.dim})"
            )

    def __add__(self, other):
        self._check_same_shape(other)
        return SymmetricTensor(self.order, self.dim, self._values + other._values)

    def __sub__(self, other):
        self._check_same_shape(other)
        return SymmetricTensor(self.order, self.dim, self._values - other._values)

    def __neg__(self):
        return SymmetricTensor(self.order, self.dim, -self._values)

    def __mul__(self, scalar):
        if isinstance(scalar, SymmetricTensor):
            return NotImplemented
        return SymmetricTensor(self.order, self.dim, self._values * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SymmetricTensor(self.order, self.dim, self._values / float(scalar))

    def __eq__(self, other):
        if not isinstance(other, SymmetricTensor):
            return NotImplemented
        return (self.order, self.dim) == (other.order, other.dim) and np.array_equal(
            self._values, other._values
        )

    def __hash__(self):
        return hash((self.order, self.dim, self._values.tobytes()))

    def allclose(self, other: "SymmetricTensor", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        self._check_same_shape(other)
        scale = max(np.max(np.abs(self._values), initial=0.0), np.max(np.abs(other._values), initial=0.0))
        return bool(np.all(np.abs(self._values - other._values) <= atol + rtol * scale))

    def __repr__(self):
        return f"SymmetricTensor(order={self.order}, dim={self.dim}, nnz={np.count_nonzero(self._values)})"

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "dim": self.dim,
            "entries": [
                {"alpha": list(alpha), "value": float(v)}
                for alpha, v in zip(_positions(self.dim, self.order), self._values)
                if v != 0.0
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SymmetricTensor":
        for key in ("order", "dim", "entries"):
            if key not in data:
                raise ValueError(f"tensor file is missing field '{key}'")
        order, dim = int(data["order"]), int(data["dim"])
        if not isinstance(data["entries"], (list, tuple)):
            raise ValueError("field 'entries' must be a list of {alpha, value} objects")
        entries: dict[tuple[int, ...], float] = {}
        for k, item in enumerate(data["entries"]):
            if not isinstance(item, Mapping) or "alpha" not in item or "value" not in item:
                raise ValueError(f"entries[{k}] needs 'alpha' and 'value'")
            alpha = tuple(int(a) for a in item["alpha"])
            if len(alpha) != dim or sum(alpha) != order or min(alpha) < 0:
                raise ValueError(f"entries[{k}].alpha={list(alpha)} does not match order {order}, dim {dim}")
            if alpha in entries:
                raise ValueError(f"entries[{k}].alpha={list(alpha)} is duplicated")
            entries[alpha] = float(item["value"])
        return cls.from_entries(order, dim, entries)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class DecompositionList:
    """Vectors ``u_j`` and weights ``alpha_j`` representing ``sum_j alpha_j u_j^m``."""

    vectors: np.ndarray
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]
    cp_candidate: bool = False

    def __post_init__(self):
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if np.asarray(self.vectors).size == 0:
            vecs = vecs.reshape(0, vecs.shape[-1] if vecs.ndim == 2 else 0)
        if self.weights is None:
            w = np.ones(vecs.shape[0])
        else:
            w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != vecs.shape[0]:
            raise ValueError(f"{vecs.shape[0]} vectors but {w.shape[0]} weights")
        if self.cp_candidate and np.any(vecs < 0):
            raise ValueError("CP candidate decomposition has a negative coordinate")
        vecs.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "weights": [float(w) for w in self.weights],
            "vectors": [[float(v) for v in row] for row in self.vectors],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "DecompositionList":
        for key in ("dim", "vectors"):
            if key not in data:
                raise ValueError(f"decomposition file is missing field '{key}'")
        dim = int(data["dim"])
        vectors = [list(map(float, v)) for v in data["vectors"]]
        for k, v in enumerate(vectors):
            if len(v) != dim:
                raise ValueError(f"vectors[{k}] has length {len(v)}, expected dim {dim}")
        weights = data.get("weights")
        if weights is not None and len(weights) != len(vectors):
            raise ValueError(f"weights has length {len(weights)}, expected {len(vectors)}")
        return cls(np.array(vectors, dtype=float).reshape(len(vectors), dim), weights)


def _check_vector(A: SymmetricTensor, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != A.dim:
        raise ValueError(f"vector of length {x.shape[0]} for tensor of dim {A.dim}")
    return x


def _monomials(E: np.ndarray, X: np.ndarray) -> np.ndarray:
    """x^alpha for each row alpha of E; X has shape (..., n)."""
    X = np.asarray(X, dtype=float)
    top = int(E.max()) if E.size else 0
    powers = X[..., None] ** np.arange(top + 1)
    out = np.ones(X.shape[:-1] + (E.shape[0],))
    for i in range(E.shape[1]):
        out *= powers[..., i, E[:, i]]
    return out


def eval_tensor(A: SymmetricTensor, x) -> float:
    """``A x^m``: the full-index contraction, computed as sum of coeff * x^alpha."""
    x = _check_vector(A, x)
    return float(A.coefficients() @ _monomials(A.exponents, x))


def _grad_poly(coeffs: np.ndarray, E: np.ndarray, X: np.ndarray) -> np.ndarray:
    # gradient of p(x) = sum coeffs * x^E, batched over leading axes of X
    out = np.empty(X.shape)
    for i in range(E.shape[1]):
        Ei = E.copy()
        Ei[:, i] = np.maximum(Ei[:, i] - 1, 0)
        out[..., i] = _monomials(Ei, X) @ (coeffs * E[:, i])
    return out


def grad(A: SymmetricTensor, x) -> np.ndarray:
    """The vector ``A x^{m-1}``, i.e. the gradient of ``A x^m`` divided by m."""
    x = _check_vector(A, x)
    return _grad_poly(A.coefficients(), A.exponents, x) / A.order


def hessian(A: SymmetricTensor, x) -> np.ndarray:
    """The matrix ``A x^{m-2}`` (Hessian of ``A x^m`` divided by m(m-1))."""
    x = _check_vector(A, x)
    m, n = A.order, A.dim
    if m < 2:
        return np.zeros((n, n))
    E = A.exponents
    c = A.coefficients()
    H = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            Eij = E.copy()
            if i == j:
                factor = E[:, i] * (E[:, i] - 1)
                Eij[:, i] = np.maximum(Eij[:, i] - 2, 0)
            else:
                factor = E[:, i] * E[:, j]
                Eij[:, i] = np.maximum(Eij[:, i] - 1, 0)
                Eij[:, j] = np.maximum(Eij[:, j] - 1, 0)
            H[i, j] = H[j, i] = (c * factor) @ _monomials(Eij, x)
    return H / (m * (m - 1))


def inner_full(A: SymmetricTensor, B: SymmetricTensor) -> float:
    """Sum over all index tuples of ``a_i * b_i`` (multinomial-weighted)."""
    A._check_same_shape(B)
    return float(np.sum(A.multinomials * A.values * B.values))


def inner_coeff(A: SymmetricTensor, B: SymmetricTensor) -> float:
    """Unweighted sum of ``a_alpha * b_alpha`` over multi-indices."""
    A._check_same_shape(B)
    return float(A.values @ B.values)


def coefficient_embedding(A: SymmetricTensor) -> SymmetricTensor:
    """Tensor whose entries are the polynomial coefficients of ``A x^m``.

    ``inner_coeff(coefficient_embedding(A), B) == inner_full(A, B)``.
    """
    return SymmetricTensor(A.order, A.dim, A.coefficients())


def hadamard(A: SymmetricTensor, B: SymmetricTensor) -> SymmetricTensor:
    A._check_same_shape(B)
    return SymmetricTensor(A.order, A.dim, A.values * B.values)


def rank_one_pow(u, m: int) -> SymmetricTensor:
    """``u^m``: the entry at ``alpha`` is ``prod_i u_i^alpha_i``."""
    u = np.asarray(u, dtype=float).reshape(-1)
    return SymmetricTensor(m, u.size, _monomials(_exponents(u.size, int(m)), u))


def from_weighted_powers(dec: DecompositionList, m: int) -> SymmetricTensor:
    """``sum_j alpha_j u_j^m``; an empty list gives the zero tensor."""
    E = _exponents(dec.dim, int(m))
    if len(dec) == 0:
        return SymmetricTensor(m, dec.dim)
    return SymmetricTensor(m, dec.dim, dec.weights @ _monomials(E, dec.vectors))


def diagonal_tensor(m: int, n: int, value: float = 1.0) -> SymmetricTensor:
    """Entry ``value`` at each ``m * e_i`` so that ``D x^m = value * sum x_i^m``."""
    return SymmetricTensor.from_entries(m, n, {tuple(m * np.eye(n, dtype=int)[i]): value for i in range(n)})


def scale_variables(A: SymmetricTensor, d) -> SymmetricTensor:
    """Change of variables ``x -> d * x``: entry at alpha is multiplied by d^alpha."""
    d = _check_vector(A, d)
    if np.any(d <= 0):
        raise ValueError("scale entries must be positive")
    return SymmetricTensor(A.order, A.dim, A.values * _monomials(A.exponents, d))


def tensor_scale(A: SymmetricTensor) -> float:
    """Largest absolute entry; the reference magnitude for relative thresholds."""
    return float(np.max(np.abs(A.values), initial=0.0))


def _square_form(c: np.ndarray, n: int, k: int) -> np.ndarray:
    """Polynomial coefficients (degree 2k) of ``p(x)^2`` where p has degree-k coefficients c."""
    Ek = _exponents(n, k)
    pos = _positions(n, 2 * k)
    out = np.zeros(len(pos))
    for i, bi in enumerate(Ek):
        for j, bj in enumerate(Ek):
            out[pos[tuple(int(v) for v in bi + bj)]] += c[i] * c[j]
    return out


def random_tensor(kind: str, m: int, n: int, count: int | None = None, seed: int = 0):
    """Seeded generator for property tests.

    Returns ``(tensor, decomposition)``; the decomposition is ``None`` unless
    ``kind`` is ``"cd"`` or ``"cp"``.

    * ``cd``: sum of ``count`` m-th powers of standard normal vectors.
    * ``cp``: same with uniform [0, 1) vectors.
    * ``sos``: sum of ``count`` squares of random degree-m/2 forms.
    * ``hankel``: Hankel tensor with a standard normal generating vector.
    * ``dense``: standard normal entries.
    """
    rng = np.random.default_rng(seed)
    if count is None:
        count = n + 1
    if kind in ("cd", "cp"):
        if kind == "cd":
            vecs = rng.standard_normal((count, n))
        else:
            vecs = rng.uniform(0.0, 1.0, size=(count, n))
        dec = DecompositionList(vecs, np.ones(count), cp_candidate=(kind == "cp"))
        return from_weighted_powers(dec, m), dec
    if kind == "sos":
        if m % 2:
            raise ValueError("SOS tensors need even order")
        k = m // 2
        N = len(_positions(n, k))
        coeffs = np.zeros(len(_positions(n, m)))
        for _ in range(count):
            coeffs += _square_form(rng.standard_normal(N), n, k)
        return SymmetricTensor.from_coefficients(m, n, coeffs), None
    if kind == "hankel":
        h = rng.standard_normal((n - 1) * m + 1)
        idx = _exponents(n, m) @ np.arange(n)
        return SymmetricTensor(m, n, h[idx]), None
    if kind == "dense":
        return SymmetricTensor(m, n, rng.standard_normal(len(_positions(n, m)))), None
    raise ValueError(f"unknown tensor kind '{kind}'")
