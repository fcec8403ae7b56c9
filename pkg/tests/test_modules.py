import numpy as np
import pytest

from elliptica.algebras import QnkParams, q3_basis, q3_from_curve
from elliptica.errors import OffCurve
from elliptica.modules import (FunctionalModuleState, bosonization_deg2_check, exchange_coeff_identity_check,
                               exchange_Y_homomorphism_check, functional_module_apply, functional_module_check,
                               module_relation_residual, projective_distance, q3_linear_module_check,
                               q3_linear_module_step, qnk_linear_module_check)

ETA = 0.13 + 0.07j


def test_projective_distance():
    assert projective_distance([1, 2j, 0], [2j, -4, 0]) < 1e-15
    assert projective_distance([1, 0], [0, 1]) == pytest.approx(1.0)
    assert projective_distance([1, 0, 0], [1, 1, 0]) == pytest.approx(np.sqrt(0.5))


def test_q3_step_moves_by_eta(curve):
    p, q, _, _ = q3_from_curve(curve, ETA)
    B = q3_basis(curve)
    u = 0.3 + 0.2j
    nxt = q3_linear_module_step(p, q, [B(a, u) for a in range(3)])
    assert projective_distance(nxt, [B(a, u + ETA) for a in range(3)]) < 1e-12
    assert projective_distance(nxt, [B(a, u - ETA) for a in range(3)]) > 1e-2


def test_q3_step_rejects_off_curve(curve):
    p, q, _, _ = q3_from_curve(curve, ETA)
    with pytest.raises(OffCurve):
        q3_linear_module_step(p, q, [1.0, 0.3, 0.2])


def test_q3_orbit(curve, rng):
    assert q3_linear_module_check(curve, ETA, 4, 3, rng).passed


def test_module_action_shape(curve):
    st = FunctionalModuleState((0.1 + 0.3j, 0.5 + 0.4j), (0, 1))
    out = functional_module_apply(3, curve, ETA, st, lambda z: 1.0)
    assert set(out) == {(1, 1), (0, 2)}


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_functional_modules(n, p, curve, rng):
    rep = functional_module_check(n, p, curve, ETA, 4, rng)
    assert rep.passed, rep.summary_line()


def test_module_order_matters(curve):
    # the relation does not annihilate the module when the monomials are read with x_{i+r} acting first
    st = FunctionalModuleState((0.2 + 0.3j, -0.1 + 0.6j), (1, 0))
    assert module_relation_residual(3, curve, ETA, st, 0, 1) < 1e-10
    assert module_relation_residual(3, curve, ETA, st, 1, 0) < 1e-10


@pytest.mark.parametrize("n, p", [(3, 1), (3, 2), (4, 3)])
def test_bosonization(n, p, curve, rng):
    assert bosonization_deg2_check(n, p, curve, ETA, samples=4, rng=rng).passed


@pytest.mark.parametrize("n, k", [(5, 2), (5, 3), (7, 3)])
def test_linear_modules(n, k, curve, rng):
    assert qnk_linear_module_check(QnkParams(n, k, ETA, curve), 4, rng).passed


@pytest.mark.parametrize("n, k", [(3, 2), (5, 2), (4, 1)])
def test_exchange_algebra_checks(n, k, curve, rng):
    P = QnkParams(n, k, ETA, curve)
    assert exchange_coeff_identity_check(P, 4, rng).passed
    assert exchange_Y_homomorphism_check(P, 4, rng).passed
