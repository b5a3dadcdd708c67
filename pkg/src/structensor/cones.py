"""Cone membership checks with independently checkable certificates.

Two pairing conventions are in play and every report names the one it uses:

* ``full-index``: ``inner_full`` (sum over all index tuples).  Governs the
  CP/COP and CD/PSD dualities.
* ``coefficient``: the moment matrix ``M(B)`` is built from the raw entries
  ``b_alpha`` and paired with the *polynomial coefficients* of ``A``, i.e.
  ``<A, B> = sum_alpha coeff_alpha(A) * b_alpha = trace(G M(B))`` for any Gram
  matrix ``G`` of ``A``.  With this pairing ``SOS* = {B : M(B) PSD}`` and every
  CD tensor (raw entries) lies in ``SOS*``.

SOS-type checks precondition by the diagonal change of variables
``x_i -> d_i x_i`` with ``d_i = a_{m e_i}^{-1/m}`` followed by division by the
largest absolute entry.  Certificates are validated in those coordinates and
reported together with ``d`` and the divisor, plus their images in the
original coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .decomposition import (
    GeneratingVector,
    PronyError,
    hankel_from_generating,
    is_complete_hankel,
    prony_decompose,
    spans,
)
from .sdp import (
    AffineSystem,
    JacobiError,
    _shift_into_cone,
    barrier_max_min_eig,
    eig_sym,
    max_min_eig,
    min_eig,
    minimize_linear_over_spectrahedron,
    separation_direction,
    solve_feasibility,
)
from .spectral import copositive_min, numeric_pd_check
from .tensor import (
    DecompositionList,
    SymmetricTensor,
    _exponents,
    _monomials,
    _positions,
    _square_form,
    inner_coeff,
    inner_full,
    random_tensor,
    rank_one_pow,
    scale_variables,
    tensor_scale,
)

__all__ = [
    "HarnessReport",
    "MembershipReport",
    "MomentMatrix",
    "MonomialBasis",
    "Preconditioning",
    "check_cd_hankel",
    "check_cp_witness",
    "check_sos",
    "check_sos_star",
    "check_ssos",
    "cone_chain_harness",
    "gaussian_moments",
    "gram_system",
    "moment_matrix",
    "monomial_basis",
    "precondition",
    "validate_gram",
    "validate_separator",
]

DEFAULT_TOL = 1e-8
COEFF = "coefficient"
FULL = "full-index"
CD_HANKEL_ASSUMPTION = "assumes a CD Hankel tensor admits a complete Vandermonde decomposition"
EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# reports


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return obj


@dataclass
class MembershipReport:
    cone: str
    status: str  # In | Out | Inconclusive
    certificate: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    assumptions: list = field(default_factory=list)
    convention: str = COEFF
    tol: float = DEFAULT_TOL

    def to_dict(self) -> dict:
        return {
            "cone": self.cone,
            "status": self.status,
            "convention": self.convention,
            "tol": float(self.tol),
            "certificate": _jsonable(self.certificate),
            "residuals": _jsonable(self.residuals),
            "assumptions": list(self.assumptions),
        }


# ---------------------------------------------------------------------------
# monomials, Gram systems, moment matrices


@dataclass(frozen=True)
class MonomialBasis:
    n: int
    k: int
    exponents: np.ndarray

    @property
    def N(self) -> int:
        return self.exponents.shape[0]

    def evaluate(self, x) -> np.ndarray:
        """The vector of monomials ``x^beta``."""
        return _monomials(self.exponents, np.asarray(x, dtype=float))

    def labels(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.exponents]


def monomial_basis(n: int, k: int) -> MonomialBasis:
    """All degree-``k`` exponent vectors in ``n`` variables, graded-lex ordered."""
    if n < 1 or k < 0:
        raise ValueError(f"invalid monomial basis shape n={n}, k={k}")
    return MonomialBasis(int(n), int(k), _exponents(int(n), int(k)))


def _half_order(order: int) -> int:
    if order % 2:
        raise ValueError(f"order {order} is odd; Gram and moment matrices need even order")
    return order // 2


def _row_map(n: int, k: int) -> np.ndarray:
    E = _exponents(n, k)
    pos = _positions(n, 2 * k)
    N = E.shape[0]
    row_of = np.empty((N, N), dtype=np.int64)
    for i in range(N):
        for j in range(i, N):
            row_of[i, j] = row_of[j, i] = pos[tuple(int(v) for v in E[i] + E[j])]
    return row_of


def gram_system(A: SymmetricTensor) -> AffineSystem:
    """``{G : sum_{beta+gamma=alpha} G[beta, gamma] = coeff_alpha(A)}`` over the degree-``m/2`` basis."""
    k = _half_order(A.order)
    labels = [tuple(int(v) for v in row) for row in A.exponents]
    return AffineSystem(_row_map(A.dim, k), A.coefficients(), labels)


@dataclass(frozen=True)
class MomentMatrix:
    matrix: np.ndarray
    basis: MonomialBasis


def moment_matrix(B: SymmetricTensor) -> MomentMatrix:
    """``M(B)[beta, gamma] = b_{beta+gamma}`` from the raw entries of ``B``."""
    k = _half_order(B.order)
    return MomentMatrix(B.values[_row_map(B.dim, k)], monomial_basis(B.dim, k))


def gaussian_moments(order: int, dim: int) -> np.ndarray:
    """``E[x^alpha]`` for standard normal ``x``: a raw-entry vector with positive definite moment matrix."""
    E = _exponents(dim, order)

    def dfact(a):
        return 0.0 if a % 2 else float(prod(range(a - 1, 0, -2)))

    return np.array([prod(dfact(int(a)) for a in row) for row in E])


# ---------------------------------------------------------------------------
# preconditioning


@dataclass(frozen=True)
class Preconditioning:
    """``A_pre = scale_variables(A, d) / divisor``."""

    d: np.ndarray
    divisor: float
    tensor: SymmetricTensor

    def to_dict(self) -> dict:
        return {"d": [float(v) for v in self.d], "divisor": float(self.divisor)}

    def gram_to_original(self, G: np.ndarray) -> np.ndarray:
        """Gram matrix of the original tensor (congruence by ``diag(d^beta)^-1``)."""
        k = self.tensor.order // 2
        w = 1.0 / _monomials(_exponents(self.tensor.dim, k), self.d)
        return self.divisor * (w[:, None] * G * w[None, :])

    def separator_to_original(self, b: np.ndarray) -> np.ndarray:
        """Raw entries of the separator in original coordinates (same pairing sign)."""
        return np.asarray(b) * _monomials(self.tensor.exponents, self.d)


def _diagonal_positions(A: SymmetricTensor) -> list[int]:
    pos = _positions(A.dim, A.order)
    return [pos[tuple(int(v) for v in A.order * np.eye(A.dim, dtype=int)[i])] for i in range(A.dim)]


def precondition(A: SymmetricTensor) -> Preconditioning:
    """Diagonal equilibration ``d_i = a_{m e_i}^{-1/m}`` (1 where the diagonal entry is not positive)."""
    diag = A.values[_diagonal_positions(A)]
    d = np.where(diag > 0, diag, 1.0) ** (-1.0 / A.order)
    As = scale_variables(A, d)
    divisor = tensor_scale(As) or 1.0
    return Preconditioning(d, divisor, As / divisor)


# ---------------------------------------------------------------------------
# certificate validation (independent Jacobi eigensolver)


def _eig_min(M) -> tuple[float, np.ndarray, float]:
    """Smallest eigenvalue, its eigenvector and the spectral norm, by cyclic Jacobi."""
    M = np.asarray(M, dtype=float)
    try:
        w, V = eig_sym(M)
    except JacobiError:
        w, V = np.linalg.eigh(0.5 * (M + M.T))
    return float(w[0]), V[:, 0], float(np.max(np.abs(w), initial=0.0))


def validate_gram(sys: AffineSystem, G, tol: float = DEFAULT_TOL) -> dict:
    lam, _, norm = _eig_min(G)
    affine = sys.residual(G)
    return {
        "lambda_min": lam,
        "affine_residual": affine,
        "ok": bool(lam >= -tol * max(1.0, norm) and affine <= tol),
    }


def validate_separator(sys: AffineSystem, b, tol: float = DEFAULT_TOL) -> dict:
    """``M(b)`` PSD to ``tol * ||M||`` and ``<c, b> <= -tol * ||c|| ||b||``."""
    b = np.asarray(b, dtype=float)
    lam, _, norm = _eig_min(sys.adjoint(b))
    pairing = float(sys.c @ b)
    bound = tol * float(np.linalg.norm(sys.c) * np.linalg.norm(b))
    return {
        "lambda_min_moment": lam,
        "moment_norm": norm,
        "pairing": pairing,
        "pairing_bound": -bound,
        "ok": bool(norm > 0 and lam >= -tol * norm and pairing <= -bound),
    }


# ---------------------------------------------------------------------------
# SOS


def _zero_tensor_report(cone: str, A: SymmetricTensor, tol: float) -> MembershipReport:
    N = monomial_basis(A.dim, A.order // 2).N
    return MembershipReport(
        cone, "In", {"kind": "gram", "gram": np.zeros((N, N))}, {"lambda_min": 0.0, "affine_residual": 0.0}, tol=tol
    )


def _negative_diagonal(A: SymmetricTensor):
    diag = A.values[_diagonal_positions(A)]
    neg = np.flatnonzero(diag < 0)
    return int(neg[0]) if neg.size else None


def _diagonal_separator_report(cone: str, A: SymmetricTensor, i: int, tol: float) -> MembershipReport:
    # B = e_i^m (raw): M(B) has a single 1 on the diagonal, pairing = a_{m e_i} < 0
    B = rank_one_pow(np.eye(A.dim)[i], A.order)
    pairing = inner_full(A, B)
    return MembershipReport(
        cone,
        "Out",
        {"kind": "separator", "separator": B.to_dict(), "pairing": pairing, "reason": f"negative diagonal entry x{i + 1}"},
        {"lambda_min_moment": 0.0, "pairing": pairing},
        tol=tol,
    )


def _separator_candidates(sys, pre, outcome, seed, restarts, interior):
    """Yield raw-entry vectors ``b`` that may separate ``pre.tensor`` from SOS."""
    # 1. point evaluation at a negative witness: M(x^m) = v v^T, pairing = A x^m
    probe = numeric_pd_check(pre.tensor, restarts=restarts, seed=seed)
    if probe.status == "negative_witness":
        yield "point_evaluation", rank_one_pow(probe.argmin, pre.tensor.order).values
    # 2. minimal displacement between the affine set and the PSD cone
    start = outcome.primal if outcome is not None else None
    b = separation_direction(sys, start=start, iters=5000)
    if np.any(b):
        yield "projection_gap", b
    # 3. direct descent of <c, b> over trace-one moment matrices
    opt = minimize_linear_over_spectrahedron(sys.c, sys, interior, start=b if np.any(b) else None)
    yield "spectrahedron_descent", opt.dual


def check_sos(
    A: SymmetricTensor,
    tol: float = DEFAULT_TOL,
    max_iter: int = 50000,
    seed: int = 0,
    restarts: int | None = None,
) -> MembershipReport:
    """SOS membership with a Gram certificate (In) or a moment separator (Out)."""
    _half_order(A.order)
    if tensor_scale(A) == 0.0:
        return _zero_tensor_report("SOS", A, tol)
    i = _negative_diagonal(A)
    if i is not None:
        return _diagonal_separator_report("SOS", A, i, tol)
    pre = precondition(A)
    sys = gram_system(pre.tensor)
    scaling = pre.to_dict()

    def gram_report(G, method, iterations):
        check = validate_gram(sys, G, tol)
        if not check["ok"]:
            return None
        return MembershipReport(
            "SOS",
            "In",
            {
                "kind": "gram",
                "method": method,
                "basis": monomial_basis(A.dim, A.order // 2).labels(),
                "preconditioning": scaling,
                "gram": G,
                "gram_original": pre.gram_to_original(G),
            },
            {"lambda_min": check["lambda_min"], "affine_residual": check["affine_residual"], "iterations": iterations},
            tol=tol,
        )

    # 1. Dykstra with a small eigenvalue margin (strictly PSD certificates)
    outcome = solve_feasibility(sys, tol=tol, max_iter=max_iter, margin=1e3 * tol, accept=0.0)
    if outcome.status == "feasible":
        rep = gram_report(outcome.primal, "alternating_projections", outcome.iterations)
        if rep is not None:
            return rep
    # 2. barrier Newton on max lambda_min(G); its dual is a moment vector
    interior = gaussian_moments(A.order, A.dim)
    barrier = barrier_max_min_eig(sys, tol=tol)
    if barrier.value >= -tol:
        rep = gram_report(barrier.primal, "barrier", barrier.iterations)
        if rep is not None:
            return rep

    def candidates():
        yield "barrier_dual", _shift_into_cone(sys, barrier.dual, interior)
        yield from _separator_candidates(sys, pre, outcome, seed, restarts, interior)

    tried = {}
    for name, b in candidates():
        check = validate_separator(sys, b, tol)
        tried[name] = {"pairing": check["pairing"], "lambda_min_moment": check["lambda_min_moment"]}
        if check["ok"]:
            B_pre = SymmetricTensor(A.order, A.dim, b)
            return MembershipReport(
                "SOS",
                "Out",
                {
                    "kind": "separator",
                    "method": name,
                    "preconditioning": scaling,
                    "separator": B_pre.to_dict(),
                    "separator_original": SymmetricTensor(A.order, A.dim, pre.separator_to_original(b)).to_dict(),
                    "pairing": check["pairing"],
                },
                {"lambda_min_moment": check["lambda_min_moment"], "moment_norm": check["moment_norm"],
                 "pairing_bound": check["pairing_bound"], "barrier_t": barrier.value},
                tol=tol,
            )
    res = dict(outcome.residuals) if outcome is not None else {}
    res.pop("psd_iterate", None)
    res["barrier_t"] = barrier.value
    res["separator_attempts"] = tried
    return MembershipReport("SOS", "Inconclusive", {"preconditioning": scaling}, res, tol=tol)


# ---------------------------------------------------------------------------
# SSOS (interior of SOS)


def _perturbation_directions(sys: AffineSystem, count: int, seed: int) -> list[np.ndarray]:
    """Seeded random coefficient directions whose min-norm Gram correction has Frobenius norm 1."""
    out = []
    for j in range(count):
        e = np.random.default_rng([seed, j]).standard_normal(sys.K)
        out.append(e / np.sqrt(np.sum(e**2 / sys.counts)))
    return out


def check_ssos(
    A: SymmetricTensor,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    probes: int = 5,
    max_iter: int = 20000,
) -> MembershipReport:
    """SSOS: a Gram matrix with ``lambda_min(G) = t* > tol`` (preconditioned units).

    Perturbation probe: for seeded directions ``E`` normalized so that the
    least-norm Gram correction ``L^+(E)`` has Frobenius norm 1, and
    ``eps = t*/4``, ``check_sos(A_pre +- eps E)`` is run and recorded.
    Out carries a trace-one moment vector ``b`` with ``M(b)`` PSD and
    ``<c, b> <= tol``; by weak duality every Gram matrix then has
    ``lambda_min <= tol``.
    """
    _half_order(A.order)
    interior = gaussian_moments(A.order, A.dim)
    if tensor_scale(A) == 0.0:
        sys = gram_system(A)
        b = interior / float(sys.trace_vector() @ interior)
        return MembershipReport(
            "SSOS", "Out", {"kind": "dual_bound", "moment": b, "pairing": 0.0}, {"t_star": 0.0}, tol=tol
        )
    i = _negative_diagonal(A)
    if i is not None:
        rep = _diagonal_separator_report("SSOS", A, i, tol)
        return rep
    pre = precondition(A)
    sys = gram_system(pre.tensor)
    scaling = pre.to_dict()
    grams = []
    try:
        grams.append(max_min_eig(sys, tol=tol, max_iter=max_iter)[1])
    except ValueError:
        pass
    barrier = barrier_max_min_eig(sys, tol=tol)
    grams.append(barrier.primal)
    checks = [validate_gram(sys, G, tol) for G in grams]
    best = max(range(len(grams)), key=lambda j: (checks[j]["affine_residual"] <= tol, checks[j]["lambda_min"]))
    G, check = grams[best], checks[best]
    t_star = check["lambda_min"]
    if check["affine_residual"] > tol or t_star < -tol:
        sos = check_sos(A, tol=tol, seed=seed)
        status = "Out" if sos.status == "Out" else "Inconclusive"
        return MembershipReport("SSOS", status, sos.certificate, sos.residuals, tol=tol)
    residuals = {"t_star": t_star, "lambda_min": check["lambda_min"], "affine_residual": check["affine_residual"]}
    if t_star > tol and check["affine_residual"] <= tol:
        eps = t_star / 4.0
        results = []
        for j, E in enumerate(_perturbation_directions(sys, probes, seed)):
            for sign in (1.0, -1.0):
                P = SymmetricTensor.from_coefficients(A.order, A.dim, sys.c + sign * eps * E)
                results.append({"direction": j, "sign": int(sign), "status": check_sos(P, tol=tol, seed=seed).status})
        residuals["perturbation_eps"] = eps
        residuals["perturbations"] = results
        return MembershipReport(
            "SSOS",
            "In",
            {"kind": "gram", "preconditioning": scaling, "gram": G, "gram_original": pre.gram_to_original(G),
             "t_star": t_star},
            residuals,
            tol=tol,
        )
    opt = minimize_linear_over_spectrahedron(sys.c, sys, interior, tol=tol)
    b = opt.dual
    lam, _, norm = _eig_min(sys.adjoint(b))
    value = float(sys.c @ b)
    residuals.update({"dual_value": value, "lambda_min_moment": lam})
    if lam >= -tol * norm and value <= tol:
        return MembershipReport(
            "SSOS",
            "Out",
            {"kind": "dual_bound", "preconditioning": scaling, "moment": b, "pairing": value},
            residuals,
            tol=tol,
        )
    return MembershipReport("SSOS", "Inconclusive", {"preconditioning": scaling}, residuals, tol=tol)


# ---------------------------------------------------------------------------
# SOS* (dual cone)


def check_sos_star(B: SymmetricTensor, tol: float = DEFAULT_TOL) -> MembershipReport:
    """``B`` in SOS* iff ``M(B)`` is PSD; Out carries the square ``p^2`` of the violating eigenvector."""
    k = _half_order(B.order)
    M = moment_matrix(B)
    lam, vec, norm = _eig_min(M.matrix)
    if lam >= -tol * norm:
        return MembershipReport(
            "SOS*", "In", {"kind": "moment", "moment": M.matrix}, {"lambda_min_moment": lam, "moment_norm": norm}, tol=tol
        )
    square = SymmetricTensor(B.order, B.dim, _square_form(vec, B.dim, k))
    pairing = inner_coeff(square, B)
    return MembershipReport(
        "SOS*",
        "Out",
        {"kind": "square", "p": vec, "basis": M.basis.labels(), "square": square.to_dict(), "pairing": pairing},
        {"lambda_min_moment": lam, "moment_norm": norm},
        tol=tol,
    )


# ---------------------------------------------------------------------------
# CD for Hankel tensors


def check_cd_hankel(h: GeneratingVector, tol: float = DEFAULT_TOL, prony_tol: float = 1e-10) -> MembershipReport:
    """CD membership of the Hankel tensor generated by ``h``.

    Order: (1) odd order is always In; (2) a moment matrix ``M(A)`` with a
    certifiably negative eigenvalue proves ``A`` is not CD, because every CD
    tensor has ``M(A) = sum_j v_j v_j^T``; the certificate is the square
    ``p^2`` with ``inner_coeff(p^2, A) < 0``; (3) otherwise Prony: a complete
    decomposition is an In certificate, a negative weight gives Out resting on
    the CD => complete-Hankel assertion.  Prony failures are Inconclusive.
    """
    A = hankel_from_generating(h)
    if h.order % 2:
        return MembershipReport(
            "CD", "In", {"kind": "odd_order"}, {}, ["odd order: every symmetric tensor is CD"], FULL, tol
        )
    if tensor_scale(A) == 0.0:
        return MembershipReport("CD", "In", {"kind": "decomposition", "nodes": [], "weights": []}, {}, [], FULL, tol)
    residuals = {}
    # (2) moment test in equilibrated coordinates (congruence keeps inertia and CD status)
    pre = precondition(A)
    M = moment_matrix(pre.tensor)
    lam, vec, norm = _eig_min(M.matrix)
    err = 10.0 * M.basis.N * EPS * float(np.linalg.norm(M.matrix))
    residuals.update({"lambda_min_moment": lam, "rounding_bound": err})
    if lam < -err:
        k = h.order // 2
        w = _monomials(_exponents(h.dim, k), pre.d)
        square = SymmetricTensor(h.order, h.dim, _square_form(vec * w, h.dim, k))
        pairing = inner_coeff(square, A)
        return MembershipReport(
            "CD",
            "Out",
            {"kind": "moment_square", "preconditioning": pre.to_dict(), "p": vec * w,
             "square": square.to_dict(), "pairing": pairing, "pairing_preconditioned": lam},
            residuals,
            [],
            COEFF,
            tol,
        )
    # (3) Prony
    try:
        dec = prony_decompose(h, tol=prony_tol)
    except PronyError as exc:
        residuals["prony_error"] = {"reason": exc.reason, "message": str(exc)}
        return MembershipReport("CD", "Inconclusive", {}, residuals, [], FULL, tol)
    residuals["prony_residual"] = dec.residual
    if dec.residual > max(tol, prony_tol) * 10:
        return MembershipReport("CD", "Inconclusive", {"decomposition": dec}, residuals, [], FULL, tol)
    wmax = max(float(np.max(np.abs(dec.weights), initial=0.0)), abs(dec.infinity_weight))
    if is_complete_hankel(dec, tol * wmax):
        return MembershipReport("CD", "In", {"kind": "decomposition", "decomposition": dec}, residuals, [], FULL, tol)
    return MembershipReport(
        "CD", "Out", {"kind": "decomposition", "decomposition": dec}, residuals, [CD_HANKEL_ASSUMPTION], FULL, tol
    )


# ---------------------------------------------------------------------------
# CP witnesses


def check_cp_witness(dec: DecompositionList, order: int | None = None, tol: float = 0.0) -> MembershipReport:
    """In iff every vector and weight is nonnegative; interior iff it also spans with min coordinate > 0.

    A decomposition that is not a CP witness says nothing about CP membership
    of its tensor, so that case is Inconclusive.
    """
    vecs, weights = dec.vectors, dec.weights
    min_coord = float(np.min(vecs)) if vecs.size else 0.0
    nonneg = bool(min_coord >= -tol and np.all(weights >= -tol))
    spanning = spans(dec)
    cert = {"kind": "decomposition", "decomposition": dec.to_dict()}
    res = {"min_coordinate": min_coord, "spans": spanning}
    if not nonneg:
        return MembershipReport("CP", "Inconclusive", cert, res, ["decomposition is not a CP witness"], FULL, tol)
    interior = bool(spanning and min_coord > 0)
    res.update({"interior": interior, "epsilon": min_coord if interior else 0.0})
    return MembershipReport("CP", "In", cert, res, [], FULL, tol)


# ---------------------------------------------------------------------------
# cone chain and duality harness


@dataclass
class HarnessReport:
    order: int
    dim: int
    samples: int
    seed: int
    checks: dict
    violations: list

    @property
    def status(self) -> str:
        return "In" if not self.violations else "Out"

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "dim": self.dim,
            "samples": self.samples,
            "seed": self.seed,
            "status": self.status,
            "checks": _jsonable(self.checks),
            "violations": _jsonable(self.violations),
        }


def _sos_star_sample(m: int, n: int, rng) -> SymmetricTensor:
    """A random raw-entry tensor pushed into SOS* along the Gaussian moments."""
    B = SymmetricTensor(m, n, rng.standard_normal(len(_positions(n, m))))
    g = gaussian_moments(m, n)
    row_of = _row_map(n, m // 2)
    lam = min_eig(B.values[row_of])
    mu = min_eig(g[row_of])
    t = max(0.0, -lam / mu) * 1.01 + 1e-3
    return SymmetricTensor(m, n, B.values + t * g)


def cone_chain_harness(m: int, n: int, samples: int, seed: int = 0, tol: float = DEFAULT_TOL) -> HarnessReport:
    """Sampled checks of the chain CP in CD in SOS in PSD in COP and of the three dualities.

    Each sample ``i`` draws from seed ``[seed, i]``; violations record that
    seed pair for reproduction.
    """
    if m % 2:
        raise ValueError("the harness needs even order")
    counts = {k: 0 for k in ("cp_in_sos", "cp_copositive", "cd_in_sos", "cp_cop_duality", "cd_pd_duality",
                             "sos_sos_star_duality")}
    violations = []

    def record(name, i, detail):
        violations.append({"check": name, "seed": [seed, i], "detail": detail})

    for i in range(samples):
        s = int(np.random.default_rng([seed, i]).integers(2**31))
        rng = np.random.default_rng([seed, i, 1])
        CP, _ = random_tensor("cp", m, n, seed=s)
        CD, _ = random_tensor("cd", m, n, seed=s + 1)
        SOS, _ = random_tensor("sos", m, n, seed=s + 2)

        rep = check_sos(CP, tol=tol, seed=s)
        counts["cp_in_sos"] += 1
        if rep.status != "In":
            record("cp_in_sos", i, rep.status)
        probe = copositive_min(CP, seed=s)
        counts["cp_copositive"] += 1
        if probe.min_value < -tol * probe.scale:
            record("cp_copositive", i, probe.min_value)
        rep = check_sos(CD, tol=tol, seed=s)
        counts["cd_in_sos"] += 1
        if rep.status != "In":
            record("cd_in_sos", i, rep.status)

        # CP vs copositive-probe-passing tensors (full-index pairing)
        D = SymmetricTensor(m, n, rng.standard_normal(CP.size))
        if copositive_min(D, seed=s).status == "positive":
            counts["cp_cop_duality"] += 1
            v = inner_full(CP, D)
            if v < -tol * max(1.0, tensor_scale(CP) * tensor_scale(D)):
                record("cp_cop_duality", i, v)
        # CD vs PD-probe-passing tensors (full-index pairing)
        P = SymmetricTensor(m, n, rng.standard_normal(CP.size))
        if numeric_pd_check(P, seed=s).status == "positive":
            counts["cd_pd_duality"] += 1
            v = inner_full(CD, P)
            if v < -tol * max(1.0, tensor_scale(CD) * tensor_scale(P)):
                record("cd_pd_duality", i, v)
        # SOS vs SOS* (coefficient pairing)
        B = _sos_star_sample(m, n, rng)
        if check_sos_star(B, tol).status == "In":
            counts["sos_sos_star_duality"] += 1
            v = float(SOS.coefficients() @ B.values)
            if v < -tol * max(1.0, tensor_scale(SOS) * tensor_scale(B)):
                record("sos_sos_star_duality", i, v)
    return HarnessReport(m, n, samples, seed, counts, violations)
