"""Channel-level verdicts from the Choi matrix.

A map is CPDNN iff its Choi matrix is doubly nonnegative and CPCP iff the
Choi matrix is completely positive. For trace-preserving maps into a qubit
the two coincide, and :func:`qubit_output_pipeline` turns that argument into
a certificate: permute J to block form, observe the bipartite support graph,
factor, and permute the certificate back.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .choi import (
    ChoiMatrix,
    check_trace_conditions,
    forced_zero_deviation,
    interleave_to_block_perm,
    to_block_form,
)
from .cpfact import (
    DEFAULT_PARAMS,
    CpCertificate,
    FactorParams,
    factor_alternating_projection,
    factor_auto,
    factor_bipartite_blockform,
    map_certificate_perm,
    verify_certificate,
)
from .errors import ForcedZeroViolation, HypothesisViolation, PipelineExhausted
from .graph import LEFT, support_graph, two_coloring
from .matcore import DEFAULT_TOL, SymMatrix, ToleranceConfig, invert_permutation, is_dnn


class CpStatus(str, enum.Enum):
    CERTIFIED = "Certified"
    REFUTED = "Refuted"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Refutation:
    reason: str  # "NotPsd" or "NegativeEntry"
    witness: object  # eigenvector (NotPsd) or ((i, j), value) (NegativeEntry)


@dataclass(frozen=True)
class ClassificationReport:
    n: int
    m: int
    is_trace_preserving: bool
    trace_worst: tuple
    is_dnn: bool
    min_eigenvalue: float
    cp_status: CpStatus
    certificate: CpCertificate | None = None
    refutation: Refutation | None = None
    strategy: str = ""
    near_boundary: bool = False
    timings: dict = field(default_factory=dict, compare=False)


def refute_cp(S: SymMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> Refutation | None:
    """A reason S is not completely positive, or None if S is DNN (then nothing is claimed)."""
    rep = is_dnn(S, tol)
    if not rep.is_psd:
        return Refutation("NotPsd", rep.psd_witness)
    if not rep.is_nonneg:
        return Refutation("NegativeEntry", rep.worst_entry)
    return None


def near_boundary(min_eig: float, S: SymMatrix, tol: ToleranceConfig) -> bool:
    lam_max = float(np.linalg.eigvalsh(S.entries)[-1])
    return abs(min_eig) <= tol.eps_psd * max(1.0, abs(lam_max))


def qubit_output_pipeline(J: ChoiMatrix, tol: ToleranceConfig = DEFAULT_TOL,
                          params: FactorParams = DEFAULT_PARAMS,
                          boundary: bool | None = None) -> CpCertificate:
    """Certificate that a DNN, trace-preserving qubit-output Choi matrix is CP."""
    if J.m != 2:
        raise HypothesisViolation(f"output dimension is {J.m}, not 2")
    rep = is_dnn(J.S, tol)
    if not rep.verdict:
        raise HypothesisViolation("Choi matrix is not doubly nonnegative")
    tp, worst = check_trace_conditions(J, tol)
    if not tp:
        raise HypothesisViolation(f"trace condition fails at block {worst}")
    if boundary is None:
        boundary = near_boundary(rep.min_eigenvalue, J.S, tol)
    vtol = replace(tol, eps_residual=10 * tol.eps_residual) if boundary else tol

    try:
        bf = to_block_form(J, tol)
    except ForcedZeroViolation as exc:
        raise HypothesisViolation(str(exc)) from exc
    n = J.n
    A = SymMatrix(bf.assemble())
    coloring, cycle = two_coloring(support_graph(A, tol.eps_zero))
    if coloring is None or any(coloring.color[k] != LEFT for k in range(n)):
        raise PipelineExhausted(f"block form support graph is not split as expected: {cycle}")

    outcome = factor_bipartite_blockform(bf, vtol, params)
    if not outcome.certified:
        outcome = factor_alternating_projection(A, vtol, params)
    if not outcome.certified:
        raise PipelineExhausted(
            f"no engine certified the block form (infeasibility {outcome.infeasibility:.3g})"
        )
    # A = P J P^T, so J's certificate is the block one permuted by P^-1
    back = invert_permutation(interleave_to_block_perm(n))
    cert = map_certificate_perm(outcome.certificate, back)
    ok, residual = verify_certificate(J.S, cert, vtol)
    if not ok:
        raise PipelineExhausted(f"mapped certificate has residual {residual:.3g}")
    return CpCertificate(cert.r, cert.vectors, residual, outcome.strategy)


def classify_channel(J: ChoiMatrix, tol: ToleranceConfig = DEFAULT_TOL,
                     params: FactorParams = DEFAULT_PARAMS) -> ClassificationReport:
    timings = {}
    t0 = time.perf_counter()
    tp, worst = check_trace_conditions(J, tol)
    rep = is_dnn(J.S, tol)
    t1 = time.perf_counter()
    timings["checks"] = t1 - t0
    boundary = rep.verdict and near_boundary(rep.min_eigenvalue, J.S, tol)
    common = dict(n=J.n, m=J.m, is_trace_preserving=tp, trace_worst=worst,
                  is_dnn=rep.verdict, min_eigenvalue=rep.min_eigenvalue,
                  near_boundary=boundary, timings=timings)
    if not rep.verdict:
        return ClassificationReport(cp_status=CpStatus.REFUTED, refutation=refute_cp(J.S, tol),
                                    **common)
    if J.m == 2 and tp:
        cert = qubit_output_pipeline(J, tol, params, boundary=boundary)
        timings["factor"] = time.perf_counter() - t1
        return ClassificationReport(cp_status=CpStatus.CERTIFIED, certificate=cert,
                                    strategy=cert.strategy, **common)
    outcome = factor_auto(J.S, tol, params)
    timings["factor"] = time.perf_counter() - t1
    if outcome.certified:
        return ClassificationReport(cp_status=CpStatus.CERTIFIED,
                                    certificate=outcome.certificate,
                                    strategy=outcome.strategy, **common)
    return ClassificationReport(cp_status=CpStatus.UNKNOWN, strategy=outcome.strategy, **common)


__all__ = [
    "ClassificationReport", "CpStatus", "Refutation", "classify_channel",
    "forced_zero_deviation", "near_boundary", "qubit_output_pipeline", "refute_cp",
]
