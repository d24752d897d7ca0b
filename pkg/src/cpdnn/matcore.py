"""Dense real symmetric matrices and tolerance-aware cone tests.

All indices are 0-based. A permutation ``perm`` is an integer array where
``perm[i]`` is the new position of old index ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetryError,
    ConvergenceError,
    DimensionError,
    InvalidPermutation,
    NonFiniteError,
    NonPositiveScale,
)


@dataclass(frozen=True)
class ToleranceConfig:
    eps_sym: float = 1e-10
    eps_psd: float = 1e-9
    eps_nonneg: float = 1e-10
    eps_zero: float = 1e-10
    eps_residual: float = 1e-8

    def __post_init__(self):
        for name in ("eps_sym", "eps_psd", "eps_nonneg", "eps_zero", "eps_residual"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Real symmetric matrix. Build with :func:`sym_from_entries`.

    ``entries`` is a read-only float64 array; ``asymmetry`` is the largest
    ``|M[i, j] - M[j, i]|`` seen in the raw input before symmetrization.
    """

    entries: np.ndarray
    asymmetry: float = 0.0

    @property
    def r(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"SymMatrix(r={self.r}, entries={self.entries.tolist()!r})"


def sym_from_entries(entries, tol: ToleranceConfig = DEFAULT_TOL) -> SymMatrix:
    """Symmetrize ``entries`` as (M + M^T)/2 after checking its asymmetry."""
    m = np.array(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a nonempty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("matrix has non-finite entries")
    asym = float(np.max(np.abs(m - m.T)))
    if asym > tol.eps_sym:
        raise AsymmetryError(f"asymmetry {asym:.3g} exceeds eps_sym={tol.eps_sym:.3g}")
    s = 0.5 * (m + m.T)
    s.setflags(write=False)
    return SymMatrix(s, asym)


def _as_array(S) -> np.ndarray:
    return S.entries if isinstance(S, SymMatrix) else np.asarray(S, dtype=float)


def _eigh(S):
    try:
        return np.linalg.eigh(_as_array(S))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver failed: {exc}") from exc


def eigenvalues(S) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(_as_array(S))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver failed: {exc}") from exc


def min_eigenvalue(S) -> float:
    return float(eigenvalues(S)[0])


def psd_floor(S, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Most negative eigenvalue still accepted as PSD (relative to the spectral radius)."""
    w = eigenvalues(S)
    return -tol.eps_psd * max(1.0, abs(float(w[-1])))


def _psd_verdict(w, v, tol):
    if w[0] >= -tol.eps_psd * max(1.0, abs(float(w[-1]))):
        return True, None
    witness = v[:, 0]
    # fix the sign so the witness is reproducible
    k = int(np.argmax(np.abs(witness)))
    if witness[k] < 0:
        witness = -witness
    return False, witness


def is_psd(S, tol: ToleranceConfig = DEFAULT_TOL):
    """Return ``(ok, witness)``; on failure ``witness`` is a unit vector v with v^T S v < 0."""
    return _psd_verdict(*_eigh(S), tol)


@dataclass(frozen=True)
class DnnReport:
    is_psd: bool
    min_eigenvalue: float
    is_nonneg: bool
    worst_entry: tuple[tuple[int, int], float]
    psd_witness: np.ndarray | None = None

    @property
    def verdict(self) -> bool:
        return self.is_psd and self.is_nonneg


def is_dnn(S, tol: ToleranceConfig = DEFAULT_TOL) -> DnnReport:
    a = _as_array(S)
    w, v = _eigh(a)
    psd, witness = _psd_verdict(w, v, tol)
    flat = int(np.argmin(a))
    i, j = divmod(flat, a.shape[1])
    if i > j:
        i, j = j, i
    worst = float(a[i, j])
    return DnnReport(
        is_psd=psd,
        min_eigenvalue=float(w[0]),
        is_nonneg=worst >= -tol.eps_nonneg,
        worst_entry=((i, j), worst),
        psd_witness=witness,
    )


def check_permutation(perm, r: int) -> np.ndarray:
    p = np.asarray(perm)
    if p.shape != (r,) or not np.issubdtype(p.dtype, np.integer):
        raise InvalidPermutation(f"expected {r} integer indices, got {perm!r}")
    if not np.array_equal(np.sort(p), np.arange(r)):
        raise InvalidPermutation(f"not a bijection on 0..{r - 1}: {perm!r}")
    return p


def invert_permutation(perm) -> np.ndarray:
    p = np.asarray(perm)
    inv = np.empty_like(p)
    inv[p] = np.arange(p.size)
    return inv


def permute_congruence(S: SymMatrix, perm) -> SymMatrix:
    """Return P S P^T, i.e. ``out[perm[i], perm[j]] == S[i, j]``."""
    p = check_permutation(perm, S.r)
    out = np.empty_like(S.entries)
    out[np.ix_(p, p)] = S.entries
    out.setflags(write=False)
    return SymMatrix(out, S.asymmetry)


def diag_congruence(S: SymMatrix, d) -> SymMatrix:
    """Return diag(d) S diag(d)."""
    d = np.asarray(d, dtype=float)
    if d.shape != (S.r,):
        raise DimensionError(f"scale vector has shape {d.shape}, expected ({S.r},)")
    if not np.all(d > 0):
        raise NonPositiveScale("diagonal scaling requires strictly positive entries")
    out = d[:, None] * S.entries * d[None, :]
    out.setflags(write=False)
    return SymMatrix(out, S.asymmetry)
