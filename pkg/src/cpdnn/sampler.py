"""Seeded instance generators.

Every generator draws from ``numpy.random.default_rng(seed)`` and nothing
else, so identical parameters give bit-identical output. Batches derive one
seed per instance from ``(seed, index)``; see :func:`derive`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .choi import BlockForm
from .cpfact import CpCertificate
from .errors import ConvergenceError, DimensionError
from .matcore import DEFAULT_TOL, ToleranceConfig, min_eigenvalue, sym_from_entries


@dataclass(frozen=True)
class SampleParams:
    seed: int = 0
    density: float = 0.5
    boundary_bias: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must lie in [0, 1], got {self.density}")
        if not 0.0 <= self.boundary_bias <= 1.0:
            raise ValueError(f"boundary_bias must lie in [0, 1], got {self.boundary_bias}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def derive(p: SampleParams, index: int) -> SampleParams:
    """Parameters for instance ``index`` of a batch; independent of batch order."""
    seed = int(np.random.SeedSequence([p.seed, index]).generate_state(1, np.uint64)[0])
    return replace(p, seed=seed)


def _psd_scale(build, hi=1.0, iters=60):
    """Largest t in [0, hi] with min_eigenvalue(build(t)) >= 0, by bisection."""
    if min_eigenvalue(build(hi)) >= 0.0:
        return hi
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if min_eigenvalue(build(mid)) >= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def sample_blockform_channel(n: int, p: SampleParams) -> BlockForm:
    """Random block form satisfying the qubit-output hypotheses (DNN, unit block traces)."""
    if n < 1:
        raise DimensionError("n must be at least 1")
    rng = p.rng()
    d0 = rng.uniform(0.0, 1.0, n)
    d1 = 1.0 - d0
    b = rng.uniform(0.0, 1.0, (n, n)) * (rng.uniform(0.0, 1.0, (n, n)) < p.density)
    boundary = rng.uniform() < p.boundary_bias
    shrink = rng.uniform(0.3, 0.95)

    def build(t):
        return BlockForm(d0, t * b, d1).assemble()

    if not b.any():
        return BlockForm(d0, b, d1)
    t_max = _psd_scale(build)
    if boundary:
        t = t_max
    elif t_max < 1.0:
        t = shrink * t_max
    else:
        t = 1.0
    return BlockForm(d0, t * b, d1)


def sample_cp(r: int, s: int, p: SampleParams):
    """Gram sum of ``s`` random nonnegative vectors, with its certificate."""
    if r < 1 or s < 0:
        raise DimensionError("need r >= 1 and s >= 0")
    rng = p.rng()
    x = rng.uniform(0.0, 1.0, (s, r)) * (rng.uniform(0.0, 1.0, (s, r)) < p.density)
    cert = CpCertificate(r, x, strategy="sampled")
    return sym_from_entries(cert.gram()), cert


def sample_dnn(r: int, p: SampleParams, tol: ToleranceConfig = DEFAULT_TOL,
               max_iter: int = 200, attempts: int = 10):
    """Random DNN matrix from a Gaussian Gram matrix pushed into both cones.

    Dykstra-style alternation between eigenvalue clipping and entry clipping,
    finished by an entry clip and a diagonal shift that restores a strictly
    positive spectrum, so the result is DNN with a small margin.
    """
    if r < 1:
        raise DimensionError("r must be at least 1")
    for attempt in range(attempts):
        rng = np.random.default_rng([p.seed, attempt])
        G = rng.standard_normal((r, r))
        a = G @ G.T / r
        correction = np.zeros_like(a)
        for _ in range(max_iter):
            w, V = np.linalg.eigh(a)
            a = (V * np.clip(w, 0.0, None)) @ V.T
            y = a + correction
            nonneg = np.maximum(y, 0.0)
            correction = y - nonneg
            a = 0.5 * (nonneg + nonneg.T)
            if a.min() >= 0.0 and min_eigenvalue(a) >= -tol.eps_psd:
                break
        # drop roughly (1 - density) of the surviving off-diagonal mass
        keep = np.triu(rng.uniform(0.0, 1.0, (r, r)) < max(p.density, 0.0), k=1)
        keep = keep | keep.T | np.eye(r, dtype=bool)
        a = np.where(keep, np.maximum(a, 0.0), 0.0)
        scale = max(1.0, float(np.abs(np.diag(a)).max()))
        lam = min_eigenvalue(a)
        margin = 1e-3 * scale
        if lam < margin:
            a = a + (margin - lam) * np.eye(r)
        S = sym_from_entries(a)
        if min_eigenvalue(S) >= 0.0 and S.entries.min() >= 0.0:
            return S
    raise ConvergenceError(f"sample_dnn failed after {attempts} attempts")


def sample_forest_dnn(r: int, p: SampleParams):
    """DNN matrix whose support graph is a random forest (a tree thinned by density)."""
    if r < 1:
        raise DimensionError("r must be at least 1")
    rng = p.rng()
    w = np.zeros((r, r))
    for k in range(1, r):
        parent = int(rng.integers(0, k))
        if rng.uniform() < p.density:
            w[k, parent] = w[parent, k] = rng.uniform(0.1, 1.0)
    diag = rng.uniform(0.2, 1.0, r)
    shrink = rng.uniform(0.3, 0.95)

    def build(t):
        return np.diag(diag) + t * w

    return sym_from_entries(build(shrink * _psd_scale(build)))


def sample_kraus_channel(n: int, m: int, k: int, p: SampleParams, complex_entries: bool = True):
    """Kraus operators sliced from a random isometry C^n -> C^(k m)."""
    if n < 1 or m < 1 or k < 1 or k * m < n:
        raise DimensionError(f"need k*m >= n for an isometry, got n={n}, m={m}, k={k}")
    rng = p.rng()
    g = rng.standard_normal((k * m, n))
    if complex_entries:
        g = g + 1j * rng.standard_normal((k * m, n))
    V, R = np.linalg.qr(g)
    # fix column phases so the isometry is a deterministic function of g
    phases = np.diag(R) / np.abs(np.diag(R))
    V = V * phases[None, :]
    return [V[t * m:(t + 1) * m, :] for t in range(k)]
