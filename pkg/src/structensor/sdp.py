"""Small dense semidefinite feasibility engine.

Everything here works on an :class:`AffineSystem`: a linear map ``L`` from
symmetric ``N x N`` matrices to ``K`` coefficients in which every matrix cell
``(i, j)`` feeds exactly one row.  Its adjoint sends a coefficient vector
``b`` to the matrix ``b[row_of]``, which for Gram systems is exactly the
moment matrix of ``b``.  That adjoint is what turns a stalled primal search
into a dual certificate.

Hot loops use LAPACK (``numpy.linalg.eigh``); :func:`eig_sym` is an
independent cyclic-Jacobi routine used to re-validate certificates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AffineSystem",
    "barrier_max_min_eig",
    "JacobiError",
    "SdpOutcome",
    "eig_sym",
    "max_min_eig",
    "minimize_linear_over_spectrahedron",
    "min_eig",
    "project_psd",
    "separation_direction",
    "solve_feasibility",
]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 50000


class JacobiError(RuntimeError):
    pass


def eig_sym(M, max_sweeps: int = 30, tol: float = 1e-15):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns.  Raises :class:`JacobiError` if the off-diagonal
    mass has not dropped below ``tol * ||M||_F`` after ``max_sweeps`` sweeps.
    """
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if n == 1 or norm == 0.0:
        return np.diag(A).copy(), V
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta == 0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    else:
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off > tol * norm:
            raise JacobiError(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})")
    w = np.diag(A)
    order = np.argsort(w)
    return w[order], V[:, order]


def min_eig(M) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def project_psd(M, margin: float = 0.0) -> np.ndarray:
    """Frobenius-nearest matrix with all eigenvalues >= ``margin`` (clipping)."""
    M = 0.5 * (np.asarray(M, dtype=float) + np.asarray(M, dtype=float).T)
    w, V = np.linalg.eigh(M)
    w = np.maximum(w, margin)
    return (V * w) @ V.T


class AffineSystem:
    """``{G symmetric : L(G) = c}`` with ``L(G)_r = sum of G_ij over cells with row_of[i, j] == r``."""

    def __init__(self, row_of, c, labels=None):
        row_of = np.asarray(row_of, dtype=np.int64)
        if row_of.ndim != 2 or row_of.shape[0] != row_of.shape[1]:
            raise ValueError("row_of must be a square index matrix")
        if not np.array_equal(row_of, row_of.T):
            raise ValueError("row_of must be symmetric")
        c = np.asarray(c, dtype=float).reshape(-1)
        counts = np.bincount(row_of.ravel(), minlength=c.size)
        if counts.size != c.size or np.any(counts == 0):
            raise ValueError(f"row map touches {counts.size} rows, target has {c.size}; every row needs a cell")
        self.row_of = row_of
        self.c = c
        self.counts = counts.astype(float)
        self.labels = labels

    @property
    def N(self) -> int:
        return self.row_of.shape[0]

    @property
    def K(self) -> int:
        return self.c.size

    def with_target(self, c) -> "AffineSystem":
        return AffineSystem(self.row_of, c, self.labels)

    def apply(self, G) -> np.ndarray:
        return np.bincount(self.row_of.ravel(), weights=np.asarray(G, dtype=float).ravel(), minlength=self.K)

    def adjoint(self, b) -> np.ndarray:
        return np.asarray(b, dtype=float)[self.row_of]

    def project(self, G) -> np.ndarray:
        """Frobenius projection onto the affine set; each row's cells shift equally."""
        r = (self.c - self.apply(G)) / self.counts
        return G + r[self.row_of]

    def residual(self, G) -> float:
        """``||L(G) - c|| / max(1, ||c||)``."""
        return float(np.linalg.norm(self.apply(G) - self.c) / max(1.0, np.linalg.norm(self.c)))

    def trace_vector(self) -> np.ndarray:
        """``e`` with ``e . b == trace(adjoint(b))``."""
        return self.apply(np.eye(self.N))


@dataclass
class SdpOutcome:
    status: str
    primal: np.ndarray | None = None
    dual: np.ndarray | None = None
    residuals: dict = field(default_factory=dict)
    iterations: int = 0
    value: float | None = None


def solve_feasibility(
    sys: AffineSystem,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    margin: float = 0.0,
    accept: float | None = None,
    window: int = 500,
    x0=None,
) -> SdpOutcome:
    """Dykstra alternating projections between ``{L(G) = c}`` and ``{G >= margin I}``.

    ``feasible`` is declared once an affine iterate has
    ``lambda_min >= accept``; by default ``accept = margin - tol * scale`` with
    ``scale = max(1, ||c||_inf)``.  Projecting with a small positive margin and
    accepting at zero yields strictly PSD certificates.  The returned Gram
    matrix satisfies the affine constraints to rounding.  A run whose projection gap stops shrinking
    over a full ``window`` comes back ``inconclusive`` with the last iterates;
    this routine never claims infeasibility.
    """
    scale = max(1.0, float(np.max(np.abs(sys.c), initial=0.0)))
    if accept is None:
        accept = margin - tol * scale
    X = sys.project(np.zeros((sys.N, sys.N)) if x0 is None else np.asarray(x0, dtype=float))
    Q = np.zeros_like(X)
    Y = X
    last_gap = np.inf
    best = (-np.inf, X)
    gap = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        lam = min_eig(X)
        if lam > best[0]:
            best = (lam, X)
        if lam >= accept:
            return SdpOutcome(
                "feasible",
                primal=X,
                residuals={"affine": sys.residual(X), "cone": max(0.0, -lam), "gap": float(gap)},
                iterations=it,
            )
        Z = X + Q
        Y = project_psd(Z, margin)
        Q = Z - Y
        X = sys.project(Y)
        gap = float(np.linalg.norm(X - Y))
        if it % window == 0:
            if gap > 0.995 * last_gap and gap > tol * scale:
                break
            last_gap = gap
    lam, X = best
    return SdpOutcome(
        "inconclusive",
        primal=X,
        residuals={"affine": sys.residual(X), "cone": max(0.0, -lam), "gap": float(gap), "psd_iterate": Y},
        iterations=it,
    )


def separation_direction(sys: AffineSystem, start=None, iters: int = 20000) -> np.ndarray:
    """Plain alternating projections from ``start``; returns ``b`` with ``adjoint(b) = Y - X``.

    When the affine set misses the PSD cone the gap ``Y - X`` converges to the
    minimal displacement, which is a PSD moment matrix ``M(b)`` with
    ``c . b = -||Y - X||^2 < 0``.
    """
    X = sys.project(np.zeros((sys.N, sys.N)) if start is None else start)
    b = np.zeros(sys.K)
    for _ in range(iters):
        Y = project_psd(X)
        r = (sys.c - sys.apply(Y)) / sys.counts
        b_new = -r
        X = Y + r[sys.row_of]
        if np.allclose(b_new, b, rtol=1e-13, atol=1e-300):
            b = b_new
            break
        b = b_new
    return b


def _shift_into_cone(sys: AffineSystem, b, interior) -> np.ndarray:
    """Add the smallest multiple of ``interior`` (whose moment matrix is PD) making ``M(b)`` PSD."""
    Mb = sys.adjoint(b)
    lam = min_eig(Mb)
    if lam >= 0:
        return b
    mu = min_eig(sys.adjoint(interior))
    delta = -lam / mu * (1.0 + 1e-6) + 1e-15
    return b + delta * interior


def minimize_linear_over_spectrahedron(
    objective,
    sys: AffineSystem,
    interior,
    tol: float = DEFAULT_TOL,
    max_iter: int = 2000,
    start=None,
    inner_iter: int = 200,
) -> SdpOutcome:
    """Projected gradient for ``min objective . b`` over ``{M(b) PSD, trace M(b) = 1}``.

    ``interior`` is a coefficient vector with positive definite ``M``; it seeds
    the search and repairs slight cone violations so every reported point is
    genuinely in the spectrahedron.  The returned ``dual`` is the best such
    point and ``value`` its objective; a negative value is a separation
    certificate for the caller to re-check.
    """
    obj = np.asarray(objective, dtype=float)
    e = sys.trace_vector()
    W = sys.counts

    def normalize(b):
        return b / float(e @ b)

    def project(b):
        # Dykstra in matrix space between moment-structured trace-one matrices and the PSD cone
        Z = sys.adjoint(b)
        Q = np.zeros_like(Z)
        for _ in range(inner_iter):
            Y = project_psd(Z + Q)
            Q = Z + Q - Y
            bb = sys.apply(Y) / W
            bb = bb + (1.0 - e @ bb) * (e / W) / float(e @ (e / W))
            Z = sys.adjoint(bb)
        return bb

    b = normalize(np.asarray(interior, dtype=float) if start is None else _shift_into_cone(sys, start, interior))
    best_b, best_val = b, float(obj @ b)
    step = 1.0 / max(1e-300, np.linalg.norm(obj / W))
    stall = 0
    it = 0
    for it in range(1, max_iter + 1):
        cand = project(b - step * obj / W)
        cand = normalize(_shift_into_cone(sys, cand, interior))
        val = float(obj @ cand)
        if val < best_val - tol * abs(best_val):
            best_b, best_val, stall = cand, val, 0
        else:
            stall += 1
            step *= 0.5
        b = cand
        if stall > 30:
            break
    return SdpOutcome(
        "optimal" if stall > 30 else "inconclusive",
        dual=best_b,
        value=best_val,
        iterations=it,
        residuals={"cone": max(0.0, -min_eig(sys.adjoint(best_b))), "trace": abs(float(e @ best_b) - 1.0)},
    )


def max_min_eig(sys: AffineSystem, tol: float = DEFAULT_TOL, max_iter: int = 20000, bisections: int = 40):
    """Largest ``t`` such that some ``G`` with ``L(G) = c`` has ``G - t I`` PSD.

    Bisection over Dykstra feasibility with eigenvalue margin ``t``.  Rows
    made of a single diagonal cell pin that Gram entry and bound ``t`` from
    above; without such rows the bracket is found by doubling.  Returns
    ``(t_star, G)`` where ``G`` attains ``lambda_min(G) = t_star`` and satisfies
    the affine constraints.  Raises ``ValueError`` if the base system is not
    found feasible.
    """
    scale = max(1.0, float(np.max(np.abs(sys.c), initial=0.0)))
    base = solve_feasibility(sys, tol=tol, max_iter=DEFAULT_MAX_ITER)
    if base.status != "feasible":
        raise ValueError("Gram system not found feasible; max_min_eig needs a feasible base system")
    G_best = base.primal
    t_lo = max(0.0, min_eig(G_best))

    def attempt(t, x0):
        out = solve_feasibility(sys, max_iter=max_iter, margin=t + max(1e-3 * t, tol * scale), accept=t, x0=x0)
        return out.primal if out.status == "feasible" else None

    diag_rows = sys.row_of[np.arange(sys.N), np.arange(sys.N)]
    pinned = diag_rows[sys.counts[diag_rows] == 1]
    if pinned.size:
        t_hi = float(np.min(sys.c[pinned]))
    else:
        t_hi = max(2.0 * t_lo, scale)
        for _ in range(60):
            G = attempt(t_hi, G_best)
            if G is None:
                break
            G_best, t_lo, t_hi = G, min_eig(G), 2.0 * t_hi
    t_hi = max(t_hi, t_lo)
    for _ in range(bisections):
        if t_hi - t_lo <= tol * scale:
            break
        t = 0.5 * (t_lo + t_hi)
        G = attempt(t, G_best)
        if G is not None:
            G_best, t_lo = G, max(t, min_eig(G))
        else:
            t_hi = t
    return float(min_eig(G_best)), G_best


def _null_basis(sys: AffineSystem):
    """Orthonormal basis (as matrices) of ``{G symmetric : L(G) = 0}``."""
    N = sys.N
    iu = np.triu_indices(N)
    P = iu[0].size
    Lmat = np.zeros((sys.K, P))
    w = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    Lmat[sys.row_of[iu], np.arange(P)] = w
    _, s, vt = np.linalg.svd(Lmat)
    rank = int(np.sum(s > 1e-12 * s[0])) if s.size else 0
    basis = []
    for v in vt[rank:]:
        Z = np.zeros((N, N))
        Z[iu] = v / w
        basis.append(Z + np.triu(Z, 1).T)
    return np.array(basis).reshape(-1, N, N)


def barrier_max_min_eig(sys: AffineSystem, tol: float = DEFAULT_TOL, max_newton: int = 100) -> SdpOutcome:
    """Log-barrier Newton method for ``max t`` s.t. ``L(G) = c``, ``G - t I`` PSD.

    ``G`` is parameterized over the null space of ``L``, so every iterate
    satisfies the affine constraints to rounding.  For barrier weight ``mu``
    the central point yields ``Z = mu (G - t I)^-1``: positive definite,
    trace one and orthogonal to the null space, i.e. ``Z = adjoint(b)`` for a
    coefficient vector ``b`` with ``c . b = t + N mu``.  A negative ``c . b``
    therefore separates ``c`` from the Gram-representable cone.  ``value`` is
    the final ``t``; ``dual`` is ``b``.
    """
    N = sys.N
    basis = _null_basis(sys)
    G0 = sys.project(np.zeros((N, N)))
    p = basis.shape[0]
    A = np.concatenate([basis, -np.eye(N)[None]], axis=0)
    z = np.zeros(p + 1)
    z[-1] = min_eig(G0) - 1.0

    def slack(z):
        return G0 + np.tensordot(z[:p], basis, axes=1) - z[-1] * np.eye(N)

    def phi(z, inv_mu):
        try:
            Lc = np.linalg.cholesky(slack(z))
        except np.linalg.LinAlgError:
            return np.inf, None
        return -inv_mu * z[-1] - 2.0 * np.sum(np.log(np.diag(Lc))), Lc

    mu = 1.0
    newton = 0
    while True:
        inv_mu = 1.0 / mu
        f, Lc = phi(z, inv_mu)
        for _ in range(max_newton):
            newton += 1
            Linv = np.linalg.inv(Lc)
            W = Linv @ A @ Linv.T
            g = np.trace(W, axis1=1, axis2=2) * -1.0
            g[-1] -= inv_mu
            Wf = W.reshape(p + 1, -1)
            H = Wf @ Wf.T
            try:
                dz = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                dz = -np.linalg.lstsq(H, g, rcond=None)[0]
            dec = float(-g @ dz)
            if dec <= 1e-18:
                break
            step = 1.0
            while step > 1e-12:
                fn, Ln = phi(z + step * dz, inv_mu)
                if fn <= f - 0.25 * step * dec:
                    break
                step *= 0.5
            else:
                break
            z, f, Lc = z + step * dz, fn, Ln
            if dec < 1e-10:
                break
        if N * mu <= 1e-2 * tol:
            break
        mu *= 0.1
    S = slack(z)
    Z = mu * np.linalg.inv(S)
    Z = 0.5 * (Z + Z.T)
    b = sys.apply(Z) / sys.counts
    G = S + z[-1] * np.eye(N)
    return SdpOutcome(
        "optimal",
        primal=G,
        dual=b,
        value=float(z[-1]),
        iterations=newton,
        residuals={"affine": sys.residual(G), "gap": float(N * mu), "dual_value": float(sys.c @ b)},
    )
