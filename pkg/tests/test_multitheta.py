import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elliptica.errors import BoxTooSmall, InvalidPair
from elliptica.multitheta import (build_w_basis, continued_fraction, coprime_pairs, d_det, delta_pairing,
                                  dual_fraction, random_points, verify_w_exchange, verify_w_exchange_diagonal, w_basis)


@pytest.mark.parametrize("n, k, terms", [(3, 1, (3,)), (5, 2, (3, 2)), (5, 3, (2, 3)), (7, 3, (3, 2, 2)),
                                         (7, 4, (2, 4)), (4, 3, (2, 2, 2)), (13, 5, (3, 3, 2))])
def test_continued_fraction_terms(n, k, terms):
    f = continued_fraction(n, k)
    assert f.terms == terms
    assert f.value() == Fraction(n, k)


@pytest.mark.parametrize("n, k", [(4, 2), (3, 3), (3, 0), (5, 7), (1, 1)])
def test_invalid_pairs(n, k):
    with pytest.raises(InvalidPair):
        continued_fraction(n, k)


def test_d_det():
    assert d_det(()) == 1
    assert d_det((3, 2, 2)) == 7
    assert d_det((2, 2, 2)) == 4


def test_coprime_pairs_count():
    assert sum(1 for _ in coprime_pairs(5)) == 1 + 2 + 2 + 4
    assert sum(1 for _ in coprime_pairs(30)) == sum(sum(1 for k in range(1, n) if math.gcd(n, k) == 1)
                                                    for n in range(2, 31))


def test_dual_combinatorics_up_to_30():
    for n, k in coprime_pairs(30):
        d = dual_fraction(continued_fraction(n, k))
        assert all(d.checks.values()), (n, k, d.checks)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 400).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))))
def test_dual_combinatorics_property(pair):
    n, k = pair
    if math.gcd(n, k) != 1:
        return
    d = dual_fraction(continued_fraction(n, k))
    assert all(d.checks.values())
    assert d_det(d.primal.terms) == n and d_det(d.dual.terms) == n


@pytest.mark.parametrize("n, k", [(3, 1), (4, 1), (5, 2), (5, 3), (7, 3)])
def test_w_basis_relations_and_dimension(n, k, curve, rng):
    B = w_basis(n, k, curve)
    res = B.relation_residuals(random_points(rng, 8, B.p, curve))
    assert max(res.values()) < 1e-9, res
    assert B.numerical_dimension(rng) == n


def test_w_basis_single_point_returns_scalar(curve):
    B = w_basis(5, 2, curve)
    assert isinstance(B(0, np.array([0.1, 0.2j])), complex)
    assert B(0, np.zeros((3, 2))).shape == (3,)


def test_fixed_box_too_small(curve):
    with pytest.raises(BoxTooSmall):
        build_w_basis(continued_fraction(7, 3), curve, box=1)


@pytest.mark.parametrize("n, k", [(3, 1), (5, 2), (7, 3)])
def test_identities_31_35(n, k, curve, rng):
    f = continued_fraction(n, k)
    assert verify_w_exchange(f, curve, 8, rng).passed
    assert verify_w_exchange_diagonal(f, curve, 8, rng).passed


@pytest.mark.parametrize("n, k", [(3, 1), (5, 2)])
def test_delta_pairing_constant(n, k, curve, rng):
    d = delta_pairing(continued_fraction(n, k), curve, 20, rng)
    assert d.spread < 1e-8
    assert d.checks["tau_shift_residual"] < 1e-9
    assert d.checks["off_pairing_residual"] < 1e-9
    assert d.pairing_constant != 0
