import numpy as np
import pytest

from elliptica.algebras import QnkParams
from elliptica.errors import PoleAtArgument
from elliptica.multitheta import coprime_pairs
from elliptica.rmatrix import (RMatrixEvaluator, belavin_r, determinant_residual, kernel_at_minus_eta,
                               kernel_relation_angle, unitarity_residual, ybe_residual, ybe_sweep)

ETA = 0.17 + 0.08j


def test_trivial_size_one(curve):
    assert np.allclose(belavin_r(QnkParams(1, 1, ETA, curve), 0.3 + 0.1j), [[1]])


@pytest.mark.parametrize("n, k", list(coprime_pairs(4)))
def test_ybe_unitarity_determinant(n, k, curve, rng):
    P = QnkParams(n, k, ETA, curve)
    u, v, w = (complex(x) for x in rng.normal(size=3) * 0.3 + 1j * rng.uniform(0.1, 0.9, 3))
    assert ybe_residual(P, u, v, w) < 1e-10
    assert unitarity_residual(P, u - v) < 1e-10
    assert determinant_residual(P, u - w) < 1e-9


def test_determinant_large_imaginary_eta(curve):
    P = QnkParams(3, 1, 0.2 + 1.05j, curve)
    assert determinant_residual(P, 0.31 + 0.2j) < 1e-8


@pytest.mark.parametrize("n, k", list(coprime_pairs(5)))
def test_kernel_is_relation_space(n, k, curve):
    P = QnkParams(n, k, ETA, curve)
    ker, gap = kernel_at_minus_eta(P)
    assert ker.shape[1] == n * (n - 1) // 2
    assert gap >= 1e3
    assert kernel_relation_angle(P) < 1e-7


def test_pole_detected(curve):
    with pytest.raises(PoleAtArgument):
        belavin_r(QnkParams(3, 1, ETA, curve), 0.0)


def test_evaluator_and_sweep(curve, rng):
    P = QnkParams(2, 1, ETA, curve)
    R = RMatrixEvaluator(P)
    assert np.array_equal(R(0.2 + 0.3j), belavin_r(P, 0.2 + 0.3j))
    rep, rows = ybe_sweep(P, 4, rng)
    assert rep.passed and len(rows) == 4
    assert all(len(r) == 7 for r in rows)
