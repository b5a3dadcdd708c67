"""Extremal H-eigenvalues and numerical positivity probes.

For even ``m`` the smallest H-eigenvalue equals the minimum of ``A x^m`` on
the unit m-norm sphere ``sum x_i^m = 1``.  It is found by batched multi-start
projected gradient (radial projection, Armijo backtracking), a BFGS pass on
the homogeneous ratio ``A x^m / sum x_i^m`` for narrow valleys, and Newton's
method on the KKT system ``A x^{m-1} = lambda x^[m-1]``.
Copositivity is probed the same way over the standard simplex, with an
additional coarse grid sweep.

These are probes, not proofs: only a negative witness is a certificate.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .tensor import SymmetricTensor, _grad_poly, _monomials, eval_tensor, grad, hessian, tensor_scale

__all__ = [
    "HEigenPair",
    "ProbeReport",
    "copositive_min",
    "min_h_eigenvalue",
    "numeric_pd_check",
    "project_simplex",
    "strict_cop_check",
]

REL_THRESHOLD = 1e-8
KKT_TOL = 1e-8
ARMIJO_SLOPE = 1e-4
MAX_PG_ITER = 5000
# local searches polished by BFGS + Newton after the projected-gradient pass
REFINE_COUNT = 4


@dataclass(frozen=True)
class HEigenPair:
    lambda_: float
    x: np.ndarray
    kkt_residual: float
    converged: bool
    restarts_used: int

    def to_dict(self) -> dict:
        return {
            "lambda": float(self.lambda_),
            "x": [float(v) for v in self.x],
            "kkt_residual": float(self.kkt_residual),
            "converged": bool(self.converged),
            "restarts_used": int(self.restarts_used),
        }


@dataclass(frozen=True)
class ProbeReport:
    min_value: float
    argmin: np.ndarray
    status: str  # positive | zero_boundary | negative_witness
    restarts_used: int
    scale: float = 1.0

    def to_dict(self) -> dict:
        return {
            "min_value": float(self.min_value),
            "argmin": [float(v) for v in self.argmin],
            "status": self.status,
            "restarts_used": int(self.restarts_used),
            "scale": float(self.scale),
        }


class _Poly:
    """``p(x) = sum coeffs * x^E`` evaluated on batches of points."""

    def __init__(self, A: SymmetricTensor, scale: float):
        self.E = A.exponents
        self.c = A.coefficients() / scale

    def value(self, X):
        return _monomials(self.E, X) @ self.c

    def grad(self, X):
        return _grad_poly(self.c, self.E, X)


def _sphere_project(X, m):
    # rows with zero norm come back as NaN so callers can reject them
    norms = np.sum(X**m, axis=-1) ** (1.0 / m)
    norms = np.where(norms > 0, norms, np.nan)
    return X / norms[..., None]


def project_simplex(V):
    """Euclidean projection of each row of ``V`` onto ``{x >= 0, sum x = 1}``."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    n = V.shape[1]
    U = -np.sort(-V, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    idx = np.arange(1, n + 1)
    cond = U - css / idx > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(V.shape[0]), rho] / (rho + 1)
    return np.maximum(V - theta[:, None], 0.0)


def _projected_gradient(poly: _Poly, X, project, max_iter=MAX_PG_ITER, gtol=1e-10, stall_window=50):
    """Batched projected gradient with per-start Armijo backtracking.

    The first trial step of each iteration is twice the last accepted one
    (capped at 1.0), so badly scaled problems do not pay a full backtracking
    cascade every iteration.  A start also stops once its objective has not
    dropped by more than 1e-12 (relative, floored at 1e-18 in scaled
    units) over ``stall_window`` iterations.
    """
    X = project(X)
    f = poly.value(X)
    step = np.ones(X.shape[0])
    active = np.ones(X.shape[0], dtype=bool)
    f_ref = f.copy()
    for it in range(1, max_iter + 1):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        g = poly.grad(X[idx])
        eta = np.minimum(2.0 * step[idx], 1.0)
        pending = np.ones(idx.size, dtype=bool)
        Xn = X[idx].copy()
        fn = f[idx].copy()
        for _ in range(80):
            if not pending.any():
                break
            p = np.flatnonzero(pending)
            trial = project(X[idx[p]] - eta[p, None] * g[p])
            ft = poly.value(trial)
            ok = np.isfinite(ft) & (ft <= f[idx[p]] + ARMIJO_SLOPE * np.sum(g[p] * (trial - X[idx[p]]), axis=1))
            good = p[ok]
            Xn[good], fn[good] = trial[ok], ft[ok]
            pending[good] = False
            eta[p[~ok]] *= 0.5
        moved = np.linalg.norm(Xn - X[idx], axis=1) / np.maximum(eta, 1e-300)
        X[idx], f[idx] = Xn, fn
        step[idx] = eta
        done = pending | (moved <= gtol)
        if it % stall_window == 0:
            done |= f_ref[idx] - fn <= 1e-12 * np.maximum(np.abs(fn), 1e-6)
            f_ref[idx] = fn
        active[idx[done]] = False
    return X, f


def _ratio_descent(poly: _Poly, x, m: int):
    """BFGS on the degree-zero ratio ``p(x) / sum x_i^m``; copes with narrow valleys."""

    def fun(y):
        s = np.sum(y**m)
        if not (np.isfinite(s) and s > 0):
            return np.inf, np.zeros_like(y)
        v = poly.value(y)
        return v / s, (poly.grad(y) * s - v * m * y ** (m - 1)) / s**2

    res = minimize(fun, x, jac=True, method="BFGS", options={"gtol": 1e-14, "maxiter": 2000})
    s = np.sum(res.x**m)
    if not (np.all(np.isfinite(res.x)) and np.isfinite(s) and s > 1e-200):
        return x
    y = _sphere_project(res.x, m)
    return y if poly.value(y) <= poly.value(x) else x


def _newton_kkt(A: SymmetricTensor, x, scale: float, iters: int = 60):
    m = A.order
    lam = eval_tensor(A, x) / scale

    def residual(x, lam):
        g = grad(A, x) / scale
        return np.concatenate([g - lam * x ** (m - 1), [(np.sum(x**m) - 1.0) / m]])

    F = residual(x, lam)
    for _ in range(iters):
        normF = np.linalg.norm(F)
        if normF <= 1e-15:
            break
        H = hessian(A, x) / scale
        n = x.size
        J = np.zeros((n + 1, n + 1))
        J[:n, :n] = (m - 1) * (H - lam * np.diag(x ** (m - 2)))
        J[:n, n] = -(x ** (m - 1))
        J[n, :n] = x ** (m - 1)
        try:
            delta = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(J, -F, rcond=None)[0]
        t = 1.0
        for _ in range(30):
            xn, ln = x + t * delta[:n], lam + t * delta[n]
            Fn = residual(xn, ln)
            if np.linalg.norm(Fn) < normF:
                break
            t *= 0.5
        else:
            break
        x, lam, F = xn, ln, Fn
    x = _sphere_project(x, m)
    lam = eval_tensor(A, x) / scale
    return x, lam


def _sphere_starts(n: int, restarts: int, seed: int) -> np.ndarray:
    half = restarts // 2
    starts = []
    eye = np.eye(n)
    signs = itertools.product((1.0, -1.0), repeat=n - 1)
    for k in range(restarts - half):
        if k < n:
            starts.append(eye[k])
        else:
            pattern = next(signs, None)
            if pattern is None:
                pattern = np.random.default_rng([seed, 10_000 + k]).choice([-1.0, 1.0], size=n - 1)
            starts.append(np.concatenate([[1.0], pattern]))
    for k in range(half):
        starts.append(np.random.default_rng([seed, k]).standard_normal(n))
    return np.array(starts, dtype=float)


def _lowest_distinct(X, f, count: int) -> list[np.ndarray]:
    """Up to ``count`` points with the lowest values, skipping duplicates up to sign."""
    picked: list[np.ndarray] = []
    for i in np.argsort(f, kind="stable"):
        x = X[i]
        if not np.all(np.isfinite(x)):
            continue
        if any(min(np.linalg.norm(x - y), np.linalg.norm(x + y)) <= 1e-6 for y in picked):
            continue
        picked.append(x)
        if len(picked) == count:
            break
    return picked


def min_h_eigenvalue(A: SymmetricTensor, restarts: int | None = None, seed: int = 0) -> HEigenPair:
    """Smallest H-eigenvalue of an even-order tensor (multi-start local search).

    The KKT residual is reported in the tensor's own units; ``converged``
    compares it against ``1e-8 * max(1, scale(A))``.
    """
    m, n = A.order, A.dim
    if m % 2:
        raise ValueError("H-eigenvalue search is supported for even order only")
    restarts = 8 * n if restarts is None else int(restarts)
    if restarts < 1:
        raise ValueError("need at least one restart")
    scale = tensor_scale(A)
    if scale == 0.0:
        x = _sphere_project(np.eye(n)[0], m)
        return HEigenPair(0.0, x, 0.0, True, restarts)
    poly = _Poly(A, scale)
    X0 = _sphere_starts(n, restarts, seed)
    X, f = _projected_gradient(poly, X0, lambda Y: _sphere_project(Y, m))
    best = None
    for x in _lowest_distinct(X, f, REFINE_COUNT):
        xr, lam = _newton_kkt(A, _ratio_descent(poly, x, m), scale)
        res = float(np.max(np.abs(grad(A, xr) - lam * scale * xr ** (m - 1))))
        ok = res <= KKT_TOL * max(1.0, scale)
        key = (not ok, lam)
        if best is None or key < best[0]:
            best = (key, xr, lam, res, ok)
    _, x, lam, res, ok = best
    return HEigenPair(float(lam * scale), x, res, ok, restarts)


def _classify(value: float, scale: float) -> str:
    if value > REL_THRESHOLD * scale:
        return "positive"
    if value < -REL_THRESHOLD * scale:
        return "negative_witness"
    return "zero_boundary"


def numeric_pd_check(A: SymmetricTensor, restarts: int | None = None, seed: int = 0) -> ProbeReport:
    """Probe ``min A x^m`` over the m-norm sphere; relative threshold 1e-8 * scale(A)."""
    if A.order % 2:
        raise ValueError("PD probing is supported for even order only")
    pair = min_h_eigenvalue(A, restarts, seed)
    scale = tensor_scale(A)
    status = _classify(pair.lambda_, scale)
    if status == "negative_witness" and not eval_tensor(A, pair.x) < 0:
        status = "zero_boundary"
    return ProbeReport(pair.lambda_, pair.x, status, pair.restarts_used, scale)


def _simplex_grid(n: int, steps: int = 8) -> np.ndarray:
    pts = []
    for combo in itertools.combinations_with_replacement(range(n), steps):
        p = np.zeros(n)
        for i in combo:
            p[i] += 1
        pts.append(p / steps)
    return np.array(pts)


def copositive_min(A: SymmetricTensor, restarts: int | None = None, seed: int = 0) -> ProbeReport:
    """Probe ``min A x^m`` over the standard simplex (grid sweep plus projected gradient)."""
    n = A.dim
    restarts = 8 * n if restarts is None else int(restarts)
    scale = tensor_scale(A)
    if scale == 0.0:
        x = np.full(n, 1.0 / n)
        return ProbeReport(0.0, x, "zero_boundary", restarts, 0.0)
    poly = _Poly(A, scale)
    grid = _simplex_grid(n)
    gvals = poly.value(grid)
    order = np.argsort(gvals)
    starts = [np.eye(n)[i] for i in range(n)] + [np.full(n, 1.0 / n)]
    starts += [grid[i] for i in order[: max(1, restarts // 2)]]
    for k in range(max(0, restarts - len(starts))):
        starts.append(np.random.default_rng([seed, k]).dirichlet(np.ones(n)))
    X, f = _projected_gradient(poly, np.array(starts), project_simplex)
    X = np.vstack([X, grid])
    f = np.concatenate([f, gvals])
    i = int(np.argmin(f))
    x = X[i]
    value = eval_tensor(A, x)
    status = _classify(value, scale)
    if status == "negative_witness" and not value < 0:
        status = "zero_boundary"
    return ProbeReport(value, x, status, len(starts), scale)


def strict_cop_check(A: SymmetricTensor, restarts: int | None = None, seed: int = 0) -> bool:
    """True iff the simplex minimum exceeds 1e-8 * scale(A).

    By homogeneity a positive simplex minimum ``mu`` gives
    ``A x^m >= mu * ||x||_1^m >= mu * ||x||^m`` on the orthant.
    """
    return copositive_min(A, restarts, seed).status == "positive"
