"""Choi matrices of maps M_n -> M_m and the qubit-output block form.

Basis order is (i, a) row-major with the output index ``a`` fastest, so
block (i, j) of J occupies rows ``i*m:(i+1)*m`` and columns ``j*m:(j+1)*m``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BlockSymmetryError,
    DimensionError,
    ForcedZeroViolation,
    HypothesisViolation,
    NonRealChoiError,
    NotQubitOutput,
)
from .matcore import (
    DEFAULT_TOL,
    SymMatrix,
    ToleranceConfig,
    invert_permutation,
    permute_congruence,
    sym_from_entries,
)


@dataclass(frozen=True)
class ChoiMatrix:
    n: int
    m: int
    S: SymMatrix

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.S.r != self.n * self.m:
            raise DimensionError(
                f"Choi matrix of size {self.S.r} does not match n={self.n}, m={self.m}"
            )

    @property
    def entries(self) -> np.ndarray:
        return self.S.entries

    def blocks(self) -> np.ndarray:
        """View as an (n, n, m, m) array with ``blocks()[i, j] == J_ij``."""
        n, m = self.n, self.m
        return self.S.entries.reshape(n, m, n, m).transpose(0, 2, 1, 3)


@dataclass(frozen=True)
class BlockForm:
    """The matrix [[diag(d0), b], [b^T, diag(d1)]] of size 2n."""

    d0: np.ndarray
    b: np.ndarray
    d1: np.ndarray

    def __post_init__(self):
        for name in ("d0", "b", "d1"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.d0.shape[0]
        if self.d0.shape != (n,) or self.d1.shape != (n,) or self.b.shape != (n, n):
            raise DimensionError(
                f"inconsistent block form shapes {self.d0.shape}, {self.b.shape}, {self.d1.shape}"
            )

    @property
    def n(self) -> int:
        return self.d0.shape[0]

    def assemble(self) -> np.ndarray:
        n = self.n
        a = np.zeros((2 * n, 2 * n))
        a[:n, :n] = np.diag(self.d0)
        a[n:, n:] = np.diag(self.d1)
        a[:n, n:] = self.b
        a[n:, :n] = self.b.T
        return a


def choi_from_blocks(n: int, m: int, blocks, tol: ToleranceConfig = DEFAULT_TOL) -> ChoiMatrix:
    blk = np.asarray(blocks, dtype=float)
    if blk.shape != (n, n, m, m):
        raise DimensionError(f"expected blocks of shape {(n, n, m, m)}, got {blk.shape}")
    dev = float(np.max(np.abs(blk - blk.transpose(1, 0, 3, 2))))
    if dev > tol.eps_sym:
        raise BlockSymmetryError(f"block(j, i) differs from block(i, j)^T by {dev:.3g}")
    full = blk.transpose(0, 2, 1, 3).reshape(n * m, n * m)
    return ChoiMatrix(n, m, sym_from_entries(full, tol))


def choi_from_kraus(n: int, m: int, kraus, tol: ToleranceConfig = DEFAULT_TOL) -> ChoiMatrix:
    """Choi matrix of X -> sum_k K X K^dagger; trace preservation is not assumed."""
    J = np.zeros((n * m, n * m), dtype=complex)
    for K in kraus:
        K = np.asarray(K, dtype=complex)
        if K.shape != (m, n):
            raise DimensionError(f"Kraus operator has shape {K.shape}, expected {(m, n)}")
        # J[(i,a),(j,b)] = sum_k K[a,i] conj(K[b,j])
        v = K.T.reshape(-1)
        J += np.outer(v, v.conj())
    imag = float(np.max(np.abs(J.imag))) if J.size else 0.0
    if imag > tol.eps_sym:
        raise NonRealChoiError(f"Choi matrix has imaginary parts up to {imag:.3g}")
    return ChoiMatrix(n, m, sym_from_entries(J.real, tol))


def block(J: ChoiMatrix, i: int, j: int) -> np.ndarray:
    if not (0 <= i < J.n and 0 <= j < J.n):
        raise IndexError(f"block ({i}, {j}) out of range for n={J.n}")
    m = J.m
    return J.entries[i * m:(i + 1) * m, j * m:(j + 1) * m].copy()


def check_trace_conditions(J: ChoiMatrix, tol: ToleranceConfig = DEFAULT_TOL):
    """Check tr(J_ij) == delta_ij. Returns ``(ok, (i, j, deviation))`` for the worst block."""
    traces = np.trace(J.blocks(), axis1=2, axis2=3)
    dev = np.abs(traces - np.eye(J.n))
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    worst = float(dev[i, j])
    return worst <= tol.eps_zero, (int(i), int(j), worst)


def interleave_to_block_perm(n: int) -> np.ndarray:
    """Permutation sending index 2i+a to i (a=0) or n+i (a=1)."""
    i = np.arange(n)
    perm = np.empty(2 * n, dtype=int)
    perm[2 * i] = i
    perm[2 * i + 1] = n + i
    return perm


def forced_zero_deviation(J: ChoiMatrix) -> float:
    """Largest |a_ij|, |d_ij| over i != j (the entries trace preservation forces to zero)."""
    blk = J.blocks()
    off = ~np.eye(J.n, dtype=bool)
    if not off.any():
        return 0.0
    return float(max(np.max(np.abs(blk[..., 0, 0][off])), np.max(np.abs(blk[..., 1, 1][off]))))


def to_block_form(J: ChoiMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> BlockForm:
    if J.m != 2:
        raise NotQubitOutput(f"block form needs output dimension 2, got m={J.m}")
    dev = forced_zero_deviation(J)
    if dev > tol.eps_zero:
        raise ForcedZeroViolation(
            f"off-diagonal a_ij/d_ij entries reach {dev:.3g} > eps_zero={tol.eps_zero:.3g}"
        )
    n = J.n
    A = permute_congruence(J.S, interleave_to_block_perm(n)).entries
    d0 = np.diag(A)[:n].copy()
    d1 = np.diag(A)[n:].copy()
    gap = float(np.max(np.abs(d0 + d1 - 1.0)))
    if gap > tol.eps_zero:
        raise HypothesisViolation(f"diagonal traces a_ii + d_ii deviate from 1 by {gap:.3g}")
    return BlockForm(d0, A[:n, n:].copy(), d1)


def from_block_form(bf: BlockForm, tol: ToleranceConfig = DEFAULT_TOL) -> ChoiMatrix:
    A = sym_from_entries(bf.assemble(), tol)
    back = invert_permutation(interleave_to_block_perm(bf.n))
    return ChoiMatrix(bf.n, 2, permute_congruence(A, back))
