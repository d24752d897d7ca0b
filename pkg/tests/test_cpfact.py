import math

import numpy as np
import pytest

from cpdnn.choi import BlockForm, interleave_to_block_perm
from cpdnn.cpfact import (
    CpCertificate,
    FactorParams,
    Status,
    factor_alternating_projection,
    factor_auto,
    factor_bipartite_blockform,
    factor_diag_dominant,
    factor_forest,
    map_certificate_diag,
    map_certificate_perm,
    verify_certificate,
)
from cpdnn.errors import DimensionError, NegativeSchurUpdate, NonPositiveScale, NotAForest, NotDiagonallyDominant, ZeroDiagonalNonzeroRow
from cpdnn.graph import SupportGraph
from cpdnn.matcore import invert_permutation, permute_congruence, sym_from_entries
from cpdnn.sampler import SampleParams, derive, sample_cp

TRIDIAG = [[1, .6, 0], [.6, 1, .6], [0, .6, 1]]


def gram_by_hand(vectors, r):
    out = np.zeros((r, r))
    for x in vectors:
        for i in range(r):
            for j in range(r):
                out[i, j] += x[i] * x[j]
    return out


def sorted_rows(x):
    return np.array(sorted(map(tuple, np.round(np.asarray(x), 12))))


def test_verify_exact_rank_one(J_id2):
    ok, res = verify_certificate(J_id2.S, CpCertificate(4, [[1, 0, 0, 1]]))
    assert ok and res == 0.0


def test_verify_A4_certificate(A4, A4_vectors):
    np.testing.assert_allclose(gram_by_hand(A4_vectors, 4), A4.entries, atol=1e-15)
    ok, res = verify_certificate(A4, CpCertificate(4, A4_vectors))
    assert ok and res <= 1e-15


def test_verify_rejects_partial_certificate(J_id2):
    ok, res = verify_certificate(J_id2.S, CpCertificate(4, [[1, 0, 0, 0]]))
    # ||J - E_11||_F / ||J||_F = sqrt(3) / 2
    assert not ok
    assert res == pytest.approx(math.sqrt(3) / 2, rel=1e-15)


def test_verify_rejects_negative_entries_and_bad_dims():
    S = sym_from_entries([[1, -1], [-1, 1]])
    assert not verify_certificate(S, CpCertificate(2, [[1, -1]]))[0]
    with pytest.raises(DimensionError):
        verify_certificate(S, CpCertificate(3, []))


def test_empty_certificate_certifies_zero():
    assert verify_certificate(sym_from_entries(np.zeros((3, 3))), CpCertificate(3, [])) == (True, 0.0)


def test_factor_forest_tridiagonal():
    out = factor_forest(sym_from_entries(TRIDIAG))
    assert out.status is Status.CERTIFIED and out.certificate.residual <= 1e-12
    expected = [[1, .6, 0], [0, .8, .75], [0, 0, math.sqrt(1 - .75 ** 2)]]
    np.testing.assert_allclose(sorted_rows(out.certificate.vectors), sorted_rows(expected), atol=1e-12)


def test_factor_forest_diagonal_and_single_edge():
    out = factor_forest(sym_from_entries(np.diag([4.0, 9.0])))
    np.testing.assert_array_equal(sorted_rows(out.certificate.vectors), [[0, 3], [2, 0]])
    out = factor_forest(sym_from_entries([[1, .5], [.5, 1]]))
    np.testing.assert_allclose(sorted_rows(out.certificate.vectors),
                               sorted_rows([[1, .5], [0, math.sqrt(.75)]]), atol=1e-15)


def test_factor_forest_errors(A4):
    with pytest.raises(NotAForest):
        factor_forest(A4)
    with pytest.raises(NegativeSchurUpdate):
        factor_forest(sym_from_entries([[1, 2], [2, 1]]))
    with pytest.raises(NegativeSchurUpdate):
        factor_forest(sym_from_entries([[0, 1], [1, 1]]))


def test_factor_forest_zero_pivot_is_dropped():
    S = sym_from_entries([[0, 0, 0], [0, 1, .5], [0, .5, 1]])
    out = factor_forest(S, SupportGraph.from_edges(3, [(1, 2)]))
    assert out.certified and out.certificate.s == 2


def test_factor_diag_dominant():
    out = factor_diag_dominant(sym_from_entries([[1, 1], [1, 1]]))
    np.testing.assert_allclose(out.certificate.vectors, [[1, 1]])
    out = factor_diag_dominant(sym_from_entries([[2, 1], [1, 2]]))
    np.testing.assert_allclose(sorted_rows(out.certificate.vectors), [[0, 1], [1, 0], [1, 1]])
    with pytest.raises(NotDiagonallyDominant):
        factor_diag_dominant(sym_from_entries([[1, .9, .9], [.9, 1, 0], [.9, 0, 1]]))


def test_bipartite_blockform_A4(A4, A4_vectors):
    bf = BlockForm([1, 1], [[.5, .5], [.5, .5]], [1, 1])
    np.testing.assert_array_equal(bf.assemble(), A4.entries)
    out = factor_bipartite_blockform(bf)
    assert out.certified and out.strategy == "bipartite-blockform"
    # u_e = 1/2 on each edge: edge vectors (1/sqrt2) e_i + (1/sqrt2) e_{n+j}
    np.testing.assert_allclose(sorted_rows(out.certificate.vectors), sorted_rows(A4_vectors), atol=1e-15)


def test_bipartite_blockform_single_edge():
    out = factor_bipartite_blockform(BlockForm([1], [[1]], [1]))
    np.testing.assert_allclose(out.certificate.vectors, [[1, 1]])


def test_bipartite_blockform_identity_b():
    out = factor_bipartite_blockform(BlockForm([1, 1], np.eye(2), [1, 1]))
    np.testing.assert_allclose(sorted_rows(out.certificate.vectors), [[0, 1, 0, 1], [1, 0, 1, 0]])


def test_bipartite_blockform_zero_diagonal_row():
    with pytest.raises(ZeroDiagonalNonzeroRow):
        factor_bipartite_blockform(BlockForm([0, 1], [[0.5, 0], [0, 0]], [1, 1]))
    out = factor_bipartite_blockform(BlockForm([0, 1], [[0, 0], [0.5, 0]], [1, 0]))
    assert out.certified


@pytest.mark.parametrize("step_rule", ["power", "perron"])
def test_bipartite_blockform_psd_boundary(step_rule):
    # a dense B rescaled so that the scaled coupling has spectral norm exactly 1
    rng = np.random.default_rng(4)
    n = 4
    d0 = rng.uniform(.2, .8, n)
    d1 = 1 - d0
    b = rng.uniform(size=(n, n))
    C = b / np.sqrt(np.outer(d0, d1))
    b = b / np.linalg.norm(C, 2)
    out = factor_bipartite_blockform(BlockForm(d0, b, d1), params=FactorParams(step_rule=step_rule))
    assert out.certified
    assert out.certificate.residual <= 1e-8


def test_alternating_projection_on_cp_samples():
    for idx in range(5):
        S, _ = sample_cp(4, 6, derive(SampleParams(seed=21, density=0.8), idx))
        out = factor_alternating_projection(S)
        assert out.certified and out.certificate.residual <= 1e-8


def test_alternating_projection_zero_matrix():
    out = factor_alternating_projection(sym_from_entries(np.zeros((3, 3))))
    assert out.certified and out.certificate.s == 0


def test_alternating_projection_is_deterministic():
    S, _ = sample_cp(5, 7, SampleParams(seed=8))
    a = factor_alternating_projection(S, params=FactorParams(seed=3))
    b = factor_alternating_projection(S, params=FactorParams(seed=3))
    np.testing.assert_array_equal(a.certificate.vectors, b.certificate.vectors)


def test_factor_auto_dispatch(A4):
    out = factor_auto(sym_from_entries(TRIDIAG))
    assert out.certified and out.strategy == "forest"
    out = factor_auto(A4)
    # A4 is diagonally dominant, so that engine fires before the bipartite one
    assert out.certified and out.strategy == "diag-dominant"
    out = factor_auto(sym_from_entries([[1, -.1], [-.1, 1]]))
    assert out.status is Status.FAILED and out.reason == "NotDnn"


def test_factor_auto_bipartite_path():
    # 4-cycle that is not diagonally dominant
    S = sym_from_entries([[1, 0, .6, .6], [0, 1, .6, .1], [.6, .6, 1, 0], [.6, .1, 0, 1]])
    out = factor_auto(S)
    assert out.certified and out.strategy == "bipartite-blockform"
    assert out.attempts == ()


def test_factor_auto_falls_back_to_alternating_projection():
    S, _ = sample_cp(5, 8, SampleParams(seed=2, density=1.0))
    out = factor_auto(S)
    assert out.certified and out.strategy == "alternating-projection"


def test_map_certificate_perm():
    C = CpCertificate(2, [[1, 0]])
    np.testing.assert_array_equal(map_certificate_perm(C, [0, 1]).vectors, C.vectors)
    np.testing.assert_array_equal(map_certificate_perm(C, [1, 0]).vectors, [[0, 1]])
    assert verify_certificate(sym_from_entries(np.diag([0.0, 1.0])), map_certificate_perm(C, [1, 0]))[0]


def test_map_certificate_perm_back_to_choi(A4, A4_vectors):
    shuffle = interleave_to_block_perm(2)
    back = invert_permutation(shuffle)
    C = map_certificate_perm(CpCertificate(4, A4_vectors), back)
    J = permute_congruence(A4, back)
    assert verify_certificate(J, C)[0]
    np.testing.assert_allclose(gram_by_hand(C.vectors, 4), J.entries, atol=1e-15)


def test_map_certificate_diag():
    C = CpCertificate(2, [[1, 1]])
    np.testing.assert_array_equal(map_certificate_diag(C, [1, 1]).vectors, C.vectors)
    D = map_certificate_diag(C, [2, 1])
    np.testing.assert_array_equal(D.vectors, [[2, 1]])
    assert verify_certificate(sym_from_entries([[4, 2], [2, 1]]), D)[0]
    d = np.array([3.0, 0.7])
    np.testing.assert_allclose(map_certificate_diag(map_certificate_diag(C, d), 1 / d).vectors,
                               C.vectors, rtol=1e-12)
    with pytest.raises(NonPositiveScale):
        map_certificate_diag(C, [1, -1])
