"""Completely positive factorization engines and the certificate verifier.

A certificate is a list of entrywise-nonnegative vectors x_t with
sum_t x_t x_t^T equal to the target. Every engine hands its candidate to
:func:`verify_certificate`; nothing is reported as certified otherwise.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DimensionError,
    NegativeSchurUpdate,
    NonPositiveScale,
    NotAForest,
    NotDiagonallyDominant,
    ZeroDiagonalNonzeroRow,
)
from .graph import SupportGraph, connected_components, is_forest, support_graph, two_coloring
from .matcore import (
    DEFAULT_TOL,
    SymMatrix,
    ToleranceConfig,
    check_permutation,
    eigenvalues,
    is_dnn,
)

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    CERTIFIED = "Certified"
    FAILED = "Failed"


@dataclass(frozen=True)
class CpCertificate:
    r: int
    vectors: np.ndarray  # shape (s, r); row t is x_t
    residual: float | None = None
    strategy: str = ""

    def __post_init__(self):
        x = np.array(self.vectors, dtype=float).reshape(-1, self.r)
        x.setflags(write=False)
        object.__setattr__(self, "vectors", x)

    @property
    def s(self) -> int:
        return self.vectors.shape[0]

    def gram(self) -> np.ndarray:
        return self.vectors.T @ self.vectors


@dataclass(frozen=True)
class FactorParams:
    max_iter: int = 10000  # rebalancing sweeps in the bipartite engine
    step_rule: str = "power"  # "power" (multiplicative rebalancing) or "perron"
    ap_columns: int | None = None  # default 2r + |edges|
    ap_max_iter: int = 5000
    ap_restarts: int = 20
    seed: int = 0
    polish: bool = True

    def __post_init__(self):
        if self.step_rule not in ("power", "perron"):
            raise ValueError(f"unknown step rule {self.step_rule!r}")


DEFAULT_PARAMS = FactorParams()


@dataclass(frozen=True)
class FactorOutcome:
    status: Status
    certificate: CpCertificate | None = None
    strategy: str = ""
    iterations: int = 0
    infeasibility: float = math.nan
    reason: str = ""
    attempts: tuple = field(default=())  # (strategy, infeasibility) of engines tried before

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED


def _target(S) -> np.ndarray:
    return S.entries if isinstance(S, SymMatrix) else np.asarray(S, dtype=float)


def verify_certificate(S, C: CpCertificate, tol: ToleranceConfig = DEFAULT_TOL):
    """Return ``(ok, residual)`` with residual ||S - sum x x^T||_F / max(1, ||S||_F)."""
    a = _target(S)
    if C.r != a.shape[0]:
        raise DimensionError(f"certificate has dimension {C.r}, matrix has {a.shape[0]}")
    residual = float(np.linalg.norm(a - C.gram()) / max(1.0, np.linalg.norm(a)))
    nonneg = C.s == 0 or float(C.vectors.min()) >= -tol.eps_nonneg
    return bool(residual <= tol.eps_residual and nonneg), residual


def _finish(S, vectors, strategy, tol, iterations=0) -> FactorOutcome:
    r = _target(S).shape[0]
    x = np.asarray(vectors, dtype=float).reshape(-1, r)
    x = np.maximum(x, 0.0)
    x = x[np.any(x > 0, axis=1)]
    cert = CpCertificate(r, x, strategy=strategy)
    ok, residual = verify_certificate(S, cert, tol)
    if ok:
        cert = CpCertificate(r, x, residual, strategy)
        return FactorOutcome(Status.CERTIFIED, cert, strategy, iterations, residual)
    return FactorOutcome(
        Status.FAILED, None, strategy, iterations, residual, reason="verification failed"
    )


def factor_forest(S: SymMatrix, G: SupportGraph | None = None,
                  tol: ToleranceConfig = DEFAULT_TOL) -> FactorOutcome:
    """Leaf elimination on a forest support graph; exact for DNN input."""
    if G is None:
        G = support_graph(S, tol.eps_zero)
    if not is_forest(G):
        raise NotAForest("support graph contains a cycle")
    a = np.array(S.entries)
    r = S.r
    floor = tol.eps_psd * max(1.0, float(np.max(np.abs(np.diag(a)))))
    nbrs = [set(adj) for adj in G.adjacency]
    alive = [True] * r
    vectors = []
    while True:
        leaf = next((i for i in range(r) if alive[i] and len(nbrs[i]) == 1), None)
        if leaf is None:
            break
        i = leaf
        (j,) = nbrs[i]
        aii, aij = a[i, i], a[i, j]
        if aii <= 0.0 or (aii <= tol.eps_zero and abs(aij) <= tol.eps_zero):
            if abs(aij) > tol.eps_zero:
                raise NegativeSchurUpdate(f"zero pivot at {i} with coupling {aij:.3g}")
        else:
            x = np.zeros(r)
            x[i] = math.sqrt(aii)
            x[j] = aij / x[i]
            vectors.append(x)
            a[j, j] -= aij * aij / aii
            if a[j, j] < -floor:
                raise NegativeSchurUpdate(f"Schur update left {a[j, j]:.3g} at vertex {j}")
            a[j, j] = max(a[j, j], 0.0)
        nbrs[j].discard(i)
        nbrs[i].clear()
        alive[i] = False
    for k in range(r):
        if alive[k]:
            if a[k, k] < -floor:
                raise NegativeSchurUpdate(f"negative diagonal {a[k, k]:.3g} at vertex {k}")
            if a[k, k] > 0.0:
                x = np.zeros(r)
                x[k] = math.sqrt(a[k, k])
                vectors.append(x)
    return _finish(S, vectors, "forest", tol, iterations=len(vectors))


def is_diag_dominant(S: SymMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    a = S.entries
    d = np.diag(a)
    return bool(np.all(d >= a.sum(axis=1) - d - tol.eps_zero))


def factor_diag_dominant(S: SymMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> FactorOutcome:
    """One vector sqrt(a_ij)(e_i + e_j) per edge plus the diagonal remainder."""
    if not is_diag_dominant(S, tol):
        raise NotDiagonallyDominant("some row has off-diagonal sum above its diagonal")
    a = S.entries
    r = S.r
    remainder = np.diag(a).copy()
    vectors = []
    for i in range(r):
        for j in range(i + 1, r):
            if a[i, j] > tol.eps_zero:
                x = np.zeros(r)
                x[i] = x[j] = math.sqrt(a[i, j])
                vectors.append(x)
                remainder[i] -= a[i, j]
                remainder[j] -= a[i, j]
    for i in range(r):
        if remainder[i] > 0.0:
            x = np.zeros(r)
            x[i] = math.sqrt(remainder[i])
            vectors.append(x)
    return _finish(S, vectors, "diag-dominant", tol)


# -- bipartite engine -------------------------------------------------------


def _edge_allocation(C, mask, labels, max_iter, step_rule, feas_tol):
    """Find column weights w > 0 so that the allocation
    v_ij = C_ij w_j / (C w)_i has unit row sums and column loads
    (C^T C w)_j / ((C w) w)_j <= 1.

    ``labels`` assigns every column with an edge to its component. Returns
    ``(v, loads, iterations)``; loads above 1 mean the system is infeasible.
    """
    p, q = C.shape
    rows = mask.any(axis=1)
    cols = mask.any(axis=0)

    # proportional start: u_e proportional to B_ij^2 within each row
    C2 = C * C
    rs = C2.sum(axis=1, keepdims=True)
    v = np.divide(C2, rs, out=np.zeros_like(C), where=rs > 0)
    loads = np.zeros(q)
    np.divide(C2, v, out=np.zeros_like(C), where=mask).sum(axis=0, out=loads)
    if not cols.any() or loads.max() <= 1.0 + feas_tol:
        return v, loads, 0

    def allocation(w):
        pw = C @ w
        v = np.divide(C * w[None, :], pw[:, None], out=np.zeros_like(C), where=rows[:, None])
        load = np.divide(C.T @ pw, w, out=np.zeros(q), where=cols)
        return v, load

    w = np.ones(q)
    it = 0
    if step_rule == "power":
        for it in range(1, max_iter + 1):
            v, loads = allocation(w)
            if loads.max() <= 1.0 + feas_tol:
                return v, loads, it
            # multiplicative rebalancing: overloaded columns gain weight
            w = np.where(cols, w * loads, 1.0)
            for lab in np.unique(labels[cols]):
                sel = labels == lab
                w[sel] /= w[sel].max()
    # Perron direction per component: the fixed point of the rebalancing
    w = np.ones(q)
    for lab in np.unique(labels[cols]):
        sel = np.flatnonzero(labels == lab)
        Cs = C[:, sel]
        _, vecs = np.linalg.eigh(Cs.T @ Cs)
        top = np.abs(vecs[:, -1])
        w[sel] = np.maximum(top / top.max(), np.finfo(float).tiny)
    v, loads = allocation(w)
    return v, loads, it + 1


def _factor_bipartite(d0, B, d1, tol: ToleranceConfig, params: FactorParams):
    """Factor [[diag d0, B], [B^T, diag d1]] by edge vectors plus diagonal slack.

    Returns ``(vectors, iterations, infeasibility)`` in the full coordinates.
    """
    d0 = np.asarray(d0, dtype=float)
    d1 = np.asarray(d1, dtype=float)
    B = np.asarray(B, dtype=float)
    p, q = B.shape
    edge = B > tol.eps_zero
    for d, axis, side in ((d0, 1, "top"), (d1, 0, "bottom")):
        for i in np.flatnonzero(d <= 0.0):
            if edge.take(i, axis=1 - axis).any():
                raise ZeroDiagonalNonzeroRow(f"{side} vertex {i} has zero diagonal but nonzero row")
    keep0 = d0 > 0.0
    keep1 = d1 > 0.0
    s0 = np.sqrt(np.where(keep0, d0, 1.0))
    s1 = np.sqrt(np.where(keep1, d1, 1.0))
    mask = edge & keep0[:, None] & keep1[None, :]
    C = np.where(mask, B / np.outer(s0, s1), 0.0)

    # component labels for the columns of the bipartite graph
    G = SupportGraph.from_edges(p + q, ((i, p + j) for i, j in zip(*np.nonzero(mask))))
    labels = np.full(q, -1)
    for k, comp in enumerate(connected_components(G)):
        for vtx in comp:
            if vtx >= p:
                labels[vtx - p] = k

    feas_tol = 0.1 * tol.eps_residual
    v, loads, iterations = _edge_allocation(C, mask, labels, params.max_iter,
                                            params.step_rule, feas_tol)
    infeasibility = max(0.0, float(loads.max(initial=0.0)) - 1.0)

    r = p + q
    vectors = []
    for i, j in zip(*np.nonzero(mask)):
        if v[i, j] <= 0.0:
            continue
        x = np.zeros(r)
        root = math.sqrt(v[i, j])
        x[i] = root * s0[i]
        x[p + j] = C[i, j] / root * s1[j]
        vectors.append(x)
    row_slack = np.where(keep0, 1.0 - v.sum(axis=1), 0.0) * d0
    col_slack = np.where(keep1, 1.0 - loads, 0.0) * d1
    for k, slack in enumerate(np.concatenate([row_slack, col_slack])):
        if slack > 0.0:
            x = np.zeros(r)
            x[k] = math.sqrt(slack)
            vectors.append(x)
    return vectors, iterations, infeasibility


def factor_bipartite_blockform(bf, tol: ToleranceConfig = DEFAULT_TOL,
                               params: FactorParams = DEFAULT_PARAMS) -> FactorOutcome:
    """Certificate for a DNN block form [[diag D0, B], [B^T, diag D1]]."""
    return _bipartite_outcome(bf.assemble(), bf.d0, bf.b, bf.d1, tol, params)


def _bipartite_outcome(target, d0, B, d1, tol, params) -> FactorOutcome:
    vectors, iterations, infeasibility = _factor_bipartite(d0, B, d1, tol, params)
    out = _finish(SymMatrix(np.asarray(target)), vectors, "bipartite-blockform", tol, iterations)
    if not out.certified:
        log.debug("bipartite engine failed: load excess %.3g, residual %.3g",
                  infeasibility, out.infeasibility)
        return FactorOutcome(Status.FAILED, None, out.strategy, iterations,
                             max(infeasibility, out.infeasibility), reason="infeasible allocation")
    return out


def factor_bipartite(S: SymMatrix, coloring, tol: ToleranceConfig = DEFAULT_TOL,
                     params: FactorParams = DEFAULT_PARAMS) -> FactorOutcome:
    """Bipartite engine on a matrix whose support graph two-colors as ``coloring``."""
    left, right = coloring.left, coloring.right
    order = np.array(left + right, dtype=int)
    a = S.entries[np.ix_(order, order)]
    p = len(left)
    out = _bipartite_outcome(a, np.diag(a)[:p], a[:p, p:], np.diag(a)[p:], tol, params)
    if not out.certified:
        return out
    # order[k] is the original index of permuted coordinate k
    cert = map_certificate_perm(out.certificate, order)
    ok, residual = verify_certificate(S, cert, tol)
    if not ok:
        return FactorOutcome(Status.FAILED, None, out.strategy, out.iterations, residual,
                             reason="verification failed")
    return FactorOutcome(Status.CERTIFIED, CpCertificate(S.r, cert.vectors, residual, out.strategy),
                         out.strategy, out.iterations, residual)


# -- alternating projection -------------------------------------------------


def _polish(Y, a, maxiter=3000):
    """Bound-constrained least squares refinement of ||Y Y^T - A||_F^2 over Y >= 0."""
    shape = Y.shape

    def fun(y):
        Yc = y.reshape(shape)
        R = Yc @ Yc.T - a
        return float(np.sum(R * R)), (4.0 * R @ Yc).ravel()

    res = minimize(fun, Y.ravel(), jac=True, method="L-BFGS-B",
                   bounds=[(0.0, None)] * Y.size,
                   options={"maxiter": maxiter, "ftol": 0.0, "gtol": 1e-14})
    return res.x.reshape(shape)


def factor_alternating_projection(S: SymMatrix, tol: ToleranceConfig = DEFAULT_TOL,
                                  params: FactorParams = DEFAULT_PARAMS) -> FactorOutcome:
    """Alternate between {X : X X^T = S} and the nonnegative orthant.

    The spectral step keeps X = L Q with S = L L^T and picks the orthogonal Q
    closest to the current nonnegative iterate (orthogonal Procrustes). Each
    restart draws its start from ``default_rng([seed, restart])``, restarts run
    in order and the first verified one wins.
    """
    a = S.entries
    r = S.r
    scale = max(1.0, float(np.linalg.norm(a)))
    if float(np.linalg.norm(a)) <= tol.eps_residual * scale:
        return _finish(S, np.zeros((0, r)), "alternating-projection", tol)
    w, V = np.linalg.eigh(a)
    L = V * np.sqrt(np.clip(w, 0.0, None))
    n_edges = int(np.count_nonzero(np.triu(a > tol.eps_zero, k=1)))
    s = params.ap_columns or 2 * r + n_edges
    s = max(s, r)
    Lp = np.zeros((r, s))
    Lp[:, :r] = L
    stop = 0.5 * tol.eps_residual
    best = math.inf
    total = 0
    for restart in range(params.ap_restarts):
        rng = np.random.default_rng([params.seed, restart])
        Q, _ = np.linalg.qr(rng.standard_normal((s, s)))
        Y = np.maximum(Lp @ Q, 0.0)
        prev = math.inf
        for it in range(params.ap_max_iter):
            U, _, Wt = np.linalg.svd(Lp.T @ Y)
            Y = np.maximum(Lp @ (U @ Wt), 0.0)
            if it % 20 == 19:
                res = np.linalg.norm(Y @ Y.T - a) / scale
                if res <= stop or res > 0.999 * prev:
                    break
                prev = res
        total += it + 1
        if params.polish:
            Y = _polish(Y, a)
        out = _finish(S, Y.T, "alternating-projection", tol, total)
        if out.certified:
            return out
        best = min(best, out.infeasibility)
    return FactorOutcome(Status.FAILED, None, "alternating-projection", total, best,
                         reason=f"no restart verified (best residual {best:.3g})")


# -- dispatch and certificate maps ------------------------------------------


def factor_auto(S: SymMatrix, tol: ToleranceConfig = DEFAULT_TOL,
                params: FactorParams = DEFAULT_PARAMS) -> FactorOutcome:
    """Try forest, diagonal dominance, bipartite and alternating projection in turn."""
    report = is_dnn(S, tol)
    if not report.verdict:
        return FactorOutcome(Status.FAILED, None, "none", reason="NotDnn")
    G = support_graph(S, tol.eps_zero)
    attempts = []

    def done(out):
        if out.certified:
            return FactorOutcome(out.status, out.certificate, out.strategy, out.iterations,
                                 out.infeasibility, out.reason, tuple(attempts))
        attempts.append((out.strategy, out.infeasibility))
        return None

    engines = []
    if is_forest(G):
        engines.append(lambda: factor_forest(S, G, tol))
    if is_diag_dominant(S, tol):
        engines.append(lambda: factor_diag_dominant(S, tol))
    coloring, _ = two_coloring(G)
    if coloring is not None:
        engines.append(lambda: factor_bipartite(S, coloring, tol, params))
    engines.append(lambda: factor_alternating_projection(S, tol, params))
    last = None
    for engine in engines:
        try:
            last = engine()
        except (NegativeSchurUpdate, ZeroDiagonalNonzeroRow) as exc:
            attempts.append((type(exc).__name__, math.nan))
            continue
        result = done(last)
        if result is not None:
            return result
    return FactorOutcome(Status.FAILED, None, last.strategy, last.iterations,
                         last.infeasibility, last.reason, tuple(attempts))


def map_certificate_perm(C: CpCertificate, perm) -> CpCertificate:
    """Certificate for P S P^T from one for S: coordinate k moves to ``perm[k]``."""
    p = check_permutation(perm, C.r)
    x = np.empty_like(C.vectors)
    x[:, p] = C.vectors
    return CpCertificate(C.r, x, C.residual, C.strategy)


def map_certificate_diag(C: CpCertificate, d) -> CpCertificate:
    """Certificate for diag(d) S diag(d) from one for S."""
    d = np.asarray(d, dtype=float)
    if d.shape != (C.r,):
        raise DimensionError(f"scale vector has shape {d.shape}, expected ({C.r},)")
    if not np.all(d > 0):
        raise NonPositiveScale("diagonal scaling requires strictly positive entries")
    return CpCertificate(C.r, C.vectors * d[None, :], None, C.strategy)


def certificate_is_dnn(C: CpCertificate, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return is_dnn(C.gram(), tol).verdict


__all__ = [
    "CpCertificate", "FactorOutcome", "FactorParams", "Status", "certificate_is_dnn",
    "eigenvalues", "factor_alternating_projection", "factor_auto", "factor_bipartite",
    "factor_bipartite_blockform", "factor_diag_dominant", "factor_forest",
    "is_diag_dominant", "map_certificate_diag", "map_certificate_perm", "verify_certificate",
]
