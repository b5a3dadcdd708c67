"""Hankel tensors, Vandermonde/Prony decompositions and Schur-product tracking.

Indexing convention: with 0-based index positions ``i_1, ..., i_m`` the entry
of a Hankel tensor is ``h[i_1 + ... + i_m]``, so an exponent vector ``alpha``
maps to ``h[sum_i i * alpha_i]`` and ``h`` has length ``(n - 1) m + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .tensor import DecompositionList, SymmetricTensor, _exponents, from_weighted_powers

__all__ = [
    "GeneratingVector",
    "PronyError",
    "VandermondeDecomposition",
    "build_from_vandermonde",
    "generating_from_hankel",
    "hankel_from_generating",
    "inherit_reshape",
    "is_complete_hankel",
    "null_direction",
    "prony_decompose",
    "schur_decomposed",
    "spans",
    "vandermonde_vector",
]

SPAN_RTOL = 1e-10


class PronyError(ValueError):
    """Prony recovery failed; ``reason`` is one of ``rank_overflow``,
    ``complex_nodes``, ``confluent_nodes``."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class GeneratingVector:
    values: np.ndarray
    order: int
    dim: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        expected = (int(self.dim) - 1) * int(self.order) + 1
        if vals.size != expected:
            raise ValueError(
                f"generating vector for order {self.order}, dim {self.dim} needs length {expected}, got {vals.size}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "order", int(self.order))
        object.__setattr__(self, "dim", int(self.dim))

    def __len__(self):
        return self.values.size

    def to_dict(self) -> dict:
        return {"order": self.order, "dim": self.dim, "h": [float(v) for v in self.values]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "GeneratingVector":
        for key in ("order", "dim", "h"):
            if key not in data:
                raise ValueError(f"generating-vector file is missing field '{key}'")
        return cls(np.array(data["h"], dtype=float), int(data["order"]), int(data["dim"]))


@dataclass(frozen=True)
class VandermondeDecomposition:
    """``sum_j w_j (1, u_j, ..., u_j^{n-1})^m + infinity_weight * e_n^m``."""

    nodes: np.ndarray
    weights: np.ndarray
    dim: int
    order: int
    infinity_weight: float = 0.0
    residual: float | None = None
    rank: int | None = None
    singular_values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if nodes.size != weights.size:
            raise ValueError(f"{nodes.size} nodes but {weights.size} weights")
        if nodes.size != np.unique(nodes).size:
            raise ValueError("Vandermonde nodes must be pairwise distinct")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def to_dict(self) -> dict:
        out = {
            "order": self.order,
            "dim": self.dim,
            "nodes": [float(u) for u in self.nodes],
            "weights": [float(w) for w in self.weights],
            "infinity_weight": float(self.infinity_weight),
        }
        if self.residual is not None:
            out["residual"] = float(self.residual)
        if self.rank is not None:
            out["rank"] = int(self.rank)
        if self.singular_values is not None:
            out["singular_values"] = [float(s) for s in self.singular_values]
        return out

    def as_decomposition_list(self) -> DecompositionList:
        vecs = [vandermonde_vector(u, self.dim) for u in self.nodes]
        weights = list(self.weights)
        if self.infinity_weight != 0.0:
            vecs.append(np.eye(self.dim)[-1])
            weights.append(self.infinity_weight)
        if not vecs:
            return DecompositionList(np.zeros((0, self.dim)), np.zeros(0))
        return DecompositionList(np.array(vecs), np.array(weights))


def _level_index(n: int, m: int) -> np.ndarray:
    return _exponents(n, m) @ np.arange(n)


def hankel_from_generating(h: GeneratingVector) -> SymmetricTensor:
    return SymmetricTensor(h.order, h.dim, h.values[_level_index(h.dim, h.order)])


def generating_from_hankel(A: SymmetricTensor, rtol: float = 1e-12) -> GeneratingVector:
    """Read ``h`` off a Hankel tensor; raises ``ValueError`` if A is not Hankel."""
    levels = _level_index(A.dim, A.order)
    h = np.zeros((A.dim - 1) * A.order + 1)
    seen = np.zeros(h.size, dtype=bool)
    scale = max(np.max(np.abs(A.values), initial=0.0), np.finfo(float).tiny)
    for s, v in zip(levels, A.values):
        if not seen[s]:
            h[s], seen[s] = v, True
        elif abs(h[s] - v) > rtol * max(abs(h[s]), abs(v), scale * np.finfo(float).eps):
            raise ValueError(f"not Hankel: entries on index-sum level {s} disagree ({h[s]!r} vs {v!r})")
    return GeneratingVector(h, A.order, A.dim)


def vandermonde_vector(u: float, n: int) -> np.ndarray:
    return float(u) ** np.arange(n)


def build_from_vandermonde(v: VandermondeDecomposition) -> SymmetricTensor:
    dec = v.as_decomposition_list()
    return from_weighted_powers(dec, v.order)


def is_complete_hankel(v: VandermondeDecomposition, tol: float = 0.0) -> bool:
    return bool(np.all(v.weights >= -tol) and v.infinity_weight >= -tol)


def _balance_factor(h: np.ndarray) -> float:
    idx = np.flatnonzero(h)
    if idx.size < 2:
        return 1.0
    slope = np.polyfit(idx, np.log(np.abs(h[idx])), 1)[0]
    return float(np.exp(-slope))


def _hankel_matrix(g: np.ndarray, rows: int) -> np.ndarray:
    cols = g.size - rows + 1
    return np.array([g[i : i + cols] for i in range(rows)])


def prony_decompose(
    h: GeneratingVector,
    tol: float = 1e-10,
    balance: bool = True,
    node_tol: float = 1e-8,
    imag_tol: float = 1e-8,
) -> VandermondeDecomposition:
    """Recover the minimal Vandermonde decomposition of a generating vector.

    The sequence is first rescaled to ``g_i = c^i h_i`` so that its entries have
    comparable magnitude (nodes become ``c * u``, weights are unchanged).  The
    numerical rank ``r`` of the square-ish Hankel matrix of ``g`` (threshold
    ``tol * sigma_1``) fixes the number of terms; the nodes are the roots of
    the annihilating polynomial spanning the null space of the
    ``(L - r) x (r + 1)`` Hankel matrix, and the weights solve the Vandermonde
    least-squares system.  A vanishing leading coefficient of the annihilator
    is read as a node at infinity, carried by ``infinity_weight``.

    Raises :class:`PronyError` when ``r`` cannot be identified from the
    available samples (``2r > L``) or when the nodes are complex or confluent.
    """
    raw = h.values
    L = raw.size
    norm_h = float(np.linalg.norm(raw))
    if norm_h == 0.0:
        return VandermondeDecomposition(np.zeros(0), np.zeros(0), h.dim, h.order, 0.0, 0.0, 0, np.zeros(0))
    c = _balance_factor(raw) if balance else 1.0
    powers = c ** np.arange(L)
    g = raw * powers

    rows = (L + 1) // 2
    sv = np.linalg.svd(_hankel_matrix(g, rows), compute_uv=False)
    r = int(np.sum(sv > tol * sv[0]))
    if 2 * r > L:
        raise PronyError(
            "rank_overflow",
            f"Hankel rank {r} needs at least {2 * r} samples, only {L} available; decomposition not identifiable",
        )

    null = np.linalg.svd(_hankel_matrix(g, L - r)[:, : r + 1])[2][-1]
    null = null / np.max(np.abs(null))
    # trailing (highest-degree) coefficients that vanish are nodes at infinity
    n_inf = 0
    while n_inf < r and abs(null[r - n_inf]) <= tol ** 0.5:
        n_inf += 1
    if n_inf > 1:
        raise PronyError("confluent_nodes", "repeated node at infinity")
    poly = null[: r - n_inf + 1]
    roots = np.roots(poly[::-1]) if poly.size > 1 else np.zeros(0)
    if roots.size and np.any(np.abs(roots.imag) > imag_tol * (1.0 + np.abs(roots))):
        raise PronyError("complex_nodes", f"annihilating polynomial has non-real roots {roots}")
    z = np.sort(roots.real)
    if z.size > 1:
        gaps = np.diff(z)
        if np.any(gaps <= node_tol * (1.0 + np.max(np.abs(z)))):
            raise PronyError("confluent_nodes", f"nodes {z / c} are not separated")

    V = z[None, :] ** np.arange(L)[:, None]
    if n_inf:
        V = np.hstack([V, np.eye(L)[:, -1:]])
    w = np.linalg.lstsq(V, g, rcond=None)[0]
    inf_w = 0.0
    if n_inf:
        inf_w = float(w[-1] / powers[-1])
        w = w[:-1]
    nodes = z / c
    recon = (nodes[None, :] ** np.arange(L)[:, None]) @ w
    recon[-1] += inf_w
    residual = float(np.linalg.norm(recon - raw) / norm_h)
    return VandermondeDecomposition(nodes, w, h.dim, h.order, inf_w, residual, r, sv)


def inherit_reshape(
    h: GeneratingVector, q: int, p: int, construction: str = "node_power", tol: float = 1e-10
) -> SymmetricTensor:
    """Order-``qm``, dimension-``p`` Hankel tensor inherited from ``h`` (needs ``n - 1 = (p - 1) q``).

    ``construction="node_power"`` Prony-decomposes ``h`` and maps every node
    ``u`` to ``u**q`` with unchanged weights, i.e. builds
    ``sum_j w_j (1, u_j^q, ..., u_j^{(p-1)q})^{qm}``.
    ``construction="generating"`` reuses ``h`` itself as the generating vector
    of the order-``qm``, dimension-``p`` tensor; it keeps the original nodes.
    """
    q, p = int(q), int(p)
    if q < 2 or p < 3:
        raise ValueError(f"inheritance needs q >= 2 and p >= 3, got q={q}, p={p}")
    if h.dim - 1 != (p - 1) * q:
        raise ValueError(f"n - 1 = {h.dim - 1} is not (p - 1) q = {(p - 1) * q}")
    order = q * h.order
    if construction == "generating":
        return hankel_from_generating(GeneratingVector(h.values, order, p))
    if construction != "node_power":
        raise ValueError(f"unknown construction '{construction}'")
    dec = prony_decompose(h, tol=tol)
    return build_from_vandermonde(
        VandermondeDecomposition(dec.nodes**q, dec.weights, p, order, dec.infinity_weight)
    )


def schur_decomposed(decA: DecompositionList, decB: DecompositionList) -> DecompositionList:
    """Decomposition of the Hadamard product: all ``u_i * v_j`` with weights ``a_i b_j``."""
    if decA.dim != decB.dim:
        raise ValueError(f"dimension mismatch {decA.dim} vs {decB.dim}")
    vecs = (decA.vectors[:, None, :] * decB.vectors[None, :, :]).reshape(-1, decA.dim)
    weights = np.outer(decA.weights, decB.weights).reshape(-1)
    return DecompositionList(vecs, weights, cp_candidate=decA.cp_candidate and decB.cp_candidate)


def _span_svd(dec: DecompositionList):
    U = dec.vectors
    if U.shape[0] == 0:
        return np.zeros(0), np.eye(dec.dim)
    _, s, vt = np.linalg.svd(U, full_matrices=True)
    return s, vt


def spans(dec: DecompositionList, rtol: float = SPAN_RTOL) -> bool:
    """True iff the vectors have numerical rank ``n`` (sigma_min > rtol * sigma_max)."""
    s, _ = _span_svd(dec)
    if s.size < dec.dim or s[0] == 0.0:
        return False
    return bool(s[dec.dim - 1] > rtol * s[0])


def null_direction(dec: DecompositionList, rtol: float = SPAN_RTOL) -> np.ndarray | None:
    """Unit ``x`` orthogonal (numerically) to every vector, or ``None`` if they span."""
    if spans(dec, rtol):
        return None
    _, vt = _span_svd(dec)
    return vt[-1] / np.linalg.norm(vt[-1])
