from math import comb

import numpy as np
import pytest

from elliptica import algebras as alg
from elliptica.algebras import (QnkParams, cubic_residual, shuffle_relation_terms, generator, qn_product, q3_basis,
                                q3_from_curve, qnk_relations)
from elliptica.errors import ConstraintViolated, DegenerateEta, InvalidPair, InvalidStructureConstants
from elliptica.multitheta import coprime_pairs
from elliptica.quadalg import central_elements, hilbert_dims, row_span, subspace_compare

ETA = 0.17 + 0.08j


def test_params_validation(curve):
    with pytest.raises(InvalidPair):
        QnkParams(4, 2, ETA)
    with pytest.raises(DegenerateEta):
        QnkParams(3, 1, 0.3 + 1.1j + 2)
    QnkParams(1, 1, 0.0)


@pytest.mark.parametrize("n, k", list(coprime_pairs(5)))
def test_qnk_pbw(n, k, curve):
    L = qnk_relations(QnkParams(n, k, ETA, curve))
    assert L.rank() == n * (n - 1) // 2
    rep = hilbert_dims(L, 4)
    assert rep.dims == [comb(n + a - 1, a) for a in range(1, 5)]
    assert min(rep.sigma_gap) >= 1e3


def test_q3_matches_q31(curve):
    p, q, L, kinv = q3_from_curve(curve, ETA)
    assert subspace_compare(row_span(L), row_span(qnk_relations(QnkParams(3, 1, ETA, curve)))) < 1e-10


def test_q3_points_lie_on_cubic(curve):
    _, _, _, kinv = q3_from_curve(curve, ETA)
    B = q3_basis(curve)
    for u in (0.1 + 0.2j, -0.4 + 0.9j):
        assert cubic_residual(kinv, [B(a, u) for a in range(3)]) < 1e-12


def test_q3_cubic_center(curve):
    _, _, L, _ = q3_from_curve(curve, ETA)
    rep = central_elements(L, 3)
    assert rep.nullspace_dim == 1
    assert max(rep.residuals) < 1e-7


def test_q4_quadratic_center(curve):
    rep = central_elements(qnk_relations(QnkParams(4, 1, ETA, curve)), 2)
    assert rep.nullspace_dim == 2


def test_sklyanin_pbw(rng):
    J = alg.random_sklyanin_J(rng)
    assert abs(alg.sklyanin_constraint(*J)) < 1e-12
    L = alg.sklyanin_relations(*J)
    assert hilbert_dims(L, 4).dims == [4, 10, 20, 35]
    assert central_elements(L, 2).nullspace_dim == 2


def test_sklyanin_constraint_enforced():
    with pytest.raises(ConstraintViolated):
        alg.sklyanin_relations(0.5, 0.5, 0.5)


def test_lie_projectivizations():
    for f in (alg.heisenberg_constants(), alg.sl2_constants()):
        assert hilbert_dims(alg.lie_projectivization_relations(f), 4).dims == [4, 10, 20, 35]


def test_bad_structure_constants():
    f = np.zeros((2, 2, 2))
    f[0, 1, 0] = 1
    with pytest.raises(InvalidStructureConstants):
        alg.lie_projectivization_relations(f)


def test_skew_polynomial(rng):
    Q = np.exp(2j * np.pi * rng.uniform(size=(3, 3)))
    assert hilbert_dims(alg.skew_polynomial_relations(Q), 4).dims == [3, 6, 10, 15]


def test_ogievetsky():
    L = alg.ogievetsky_relations()
    assert L.rank() == 3
    assert hilbert_dims(L, 4).dims == [3, 6, 10, 15]
    assert central_elements(L, 3).nullspace_dim >= 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_functional_realization_of_relations(n, curve, rng):
    for _ in range(3):
        i, j = rng.choice(n, 2, replace=False)
        z1, z2 = rng.normal(size=2) + 0.4j
        terms = shuffle_relation_terms(n, int(i), int(j), ETA, z1, z2, curve)
        assert abs(sum(terms)) < 1e-9 * max(abs(t) for t in terms)


def test_product_is_symmetric_and_quasi_periodic(curve, rng):
    n = 3
    f = qn_product(generator(0, n, curve), generator(1, n, curve), n, curve, ETA)
    assert f.symmetry_residual(rng) < 1e-12
    assert f.quasi_periodicity_residual(rng) < 1e-10
