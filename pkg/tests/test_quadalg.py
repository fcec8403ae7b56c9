from math import comb

import numpy as np
import pytest

from elliptica.errors import DimensionMismatch, WorkspaceExceeded
from elliptica.quadalg import (RelationSpace, antisymmetric_relations, central_elements, graded_span,
                               hilbert_dims, membership_distance, row_span, subspace_compare, tensor)


def test_polynomial_ring_dims():
    for n in (2, 3, 4):
        rep = hilbert_dims(antisymmetric_relations(n), 4)
        assert rep.dims == [comb(n + a - 1, a) for a in range(1, 5)]
        assert rep.is_pbw


def test_free_algebra_is_not_pbw():
    L = RelationSpace(2, np.zeros((0, 4)))
    rep = hilbert_dims(L, 3)
    assert rep.dims == [2, 4, 8]
    assert not rep.is_pbw


def test_exterior_algebra_dims():
    # x_i x_j + x_j x_i and x_i^2
    n = 3
    rows = [tensor(n, [(1, i, j), (1, j, i)]) for i in range(n) for j in range(i, n)]
    rep = hilbert_dims(RelationSpace(n, np.array(rows)), 4)
    assert rep.dims == [3, 3, 1, 0]


def test_workspace_guard():
    with pytest.raises(WorkspaceExceeded):
        hilbert_dims(antisymmetric_relations(5), 7, workspace=1000)


def test_graded_span_dimension():
    W = graded_span(antisymmetric_relations(3), 3)
    assert W.shape == (27, 27 - 10)
    assert np.allclose(W.conj().T @ W, np.eye(W.shape[1]))


def test_polynomial_ring_center_is_everything():
    assert central_elements(antisymmetric_relations(2), 1).nullspace_dim == 2
    assert central_elements(antisymmetric_relations(3), 2).nullspace_dim == 6


def test_free_algebra_center_degree_two_is_empty():
    L = RelationSpace(2, np.zeros((0, 4)))
    assert central_elements(L, 2).nullspace_dim == 0


def test_quantum_plane_center():
    # x y = q y x with q generic: the center in degree 2 is zero
    q = np.exp(0.7j)
    L = RelationSpace(2, tensor(2, [(1, 0, 1), (-q, 1, 0)])[None, :])
    assert central_elements(L, 2).nullspace_dim == 0


def test_json_round_trip():
    L = antisymmetric_relations(3)
    L.label = "poly"
    M = RelationSpace.from_json(L.to_json())
    assert M.n == 3 and M.label == "poly"
    assert np.array_equal(M.rows, L.rows)


def test_json_rejects_inconsistent_r():
    text = antisymmetric_relations(2).to_json().replace('"r": 1', '"r": 2')
    with pytest.raises(DimensionMismatch):
        RelationSpace.from_json(text)


def test_wrong_width():
    with pytest.raises(DimensionMismatch):
        RelationSpace(3, np.zeros((1, 4)))


def test_subspace_tools(rng):
    A = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
    B = A @ np.array([[1, 2], [3, -1j]])
    assert subspace_compare(A, B) < 1e-12
    assert membership_distance(A[:, 0] + 2 * A[:, 1], B) < 1e-12
    e = np.zeros(6)
    e[0] = 1
    assert membership_distance(e, np.zeros((6, 0))) == 1.0
    with pytest.raises(DimensionMismatch):
        subspace_compare(A, np.eye(5))


def test_row_span_columns():
    L = antisymmetric_relations(3)
    assert row_span(L).shape == (9, 3)
