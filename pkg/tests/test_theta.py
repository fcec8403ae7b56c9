import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elliptica.errors import SampleDegenerate
from elliptica.theta import (EllipticCurveParams, ThetaBasis, ThetaSpaceSpec, check_translation_commutation,
                             natural_basis, normalized_residual, numerical_rank, quasi_periodicity_residual,
                             sample_generic, sample_parallelogram, series_product_agreement, theta1,
                             theta1_product, theta_alpha, theta_nc_basis, verify_one_var_identity)

# reference values from a 40-digit evaluation of the defining series, tau = 0.3 + 1.1i
THETA_REFERENCE = [
    (0.1 + 0.2j, 0.76858364412165316 - 0.17061841956415674j),
    (0.37 - 0.5j, 17.357570568927686 - 16.736148291547143j),
    (1.3 + 2.0j, -309.82225568308695 + 77.34091422983679j),
]
THETA_ALPHA_REFERENCE = [
    (0, 3, 0.1 + 0.2j, 1.0079919898086886 - 0.024808735544551237j),
    (1, 3, 0.1 + 0.2j, 1.4332712072644086 + 2.4661412039822278j),
    (2, 5, -0.2 + 0.4j, -0.30416467498238823 - 0.28302702267558101j),
    (3, 4, 0.05 - 0.3j, -3249.2070584829348 + 2008.0855954103834j),
]


@pytest.mark.parametrize("z, expected", THETA_REFERENCE)
def test_theta1_reference_values(z, expected):
    assert abs(theta1(z) - expected) < 1e-12 * abs(expected)


@pytest.mark.parametrize("alpha, n, z, expected", THETA_ALPHA_REFERENCE)
def test_theta_alpha_reference_values(alpha, n, z, expected):
    assert abs(theta_alpha(alpha, z, n) - expected) < 1e-11 * abs(expected)


def test_theta_zero_on_lattice():
    assert abs(theta1(0)) < 1e-15
    assert abs(theta1(1 + 0.3 + 1.1j)) < 1e-13


def test_theta_odd():
    z = np.array([0.1 + 0.2j, -0.4 + 0.7j])
    assert np.allclose(theta1(-z), -np.exp(-2j * np.pi * z) * theta1(z))


def test_series_matches_product(curve, rng):
    assert series_product_agreement(curve, 200, rng) < 1e-10
    z = 0.21 + 0.33j
    assert abs(theta1(z, curve) - theta1_product(z, curve)) < 1e-13


def test_curve_validation():
    with pytest.raises(ValueError):
        EllipticCurveParams(0.5 - 0.1j)
    with pytest.raises(ValueError):
        EllipticCurveParams(0.3 + 1.1j, truncation=0)
    with pytest.raises(ValueError):
        EllipticCurveParams(0.3 + 0.05j, truncation=3).check_tail(1e-16)
    EllipticCurveParams().check_tail(1e-16)


@pytest.mark.parametrize("n", range(1, 9))
def test_quasi_periodicity_and_dimension(n, curve, rng):
    z = sample_parallelogram(rng, 25, curve)
    for c in (None, 0.0, 0.5, 0.3 - 0.2j):
        B = ThetaBasis(curve, n, c)
        assert quasi_periodicity_residual(B, z) < 1e-9
        assert numerical_rank(B.matrix(sample_parallelogram(rng, 3 * n, curve))) == n


def test_natural_basis_is_theta_alpha(curve):
    B = natural_basis(4, curve)
    assert B.offset == 0
    assert abs(B(2, 0.3j) - theta_alpha(2, 0.3j, 4, curve)) == 0


def test_theta_three_zero_basis_offset(curve):
    B = theta_nc_basis(ThetaSpaceSpec(3, 0.0), curve)
    assert abs(B.offset - 1 / 3) < 1e-15


def test_theta_space_spec_rejects_order_zero():
    with pytest.raises(ValueError):
        ThetaSpaceSpec(0)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_translation_commutation(n, curve, rng):
    rep = check_translation_commutation(natural_basis(n, curve), 15, rng)
    assert rep.passed, rep.summary_line()


@pytest.mark.parametrize("ident, n", [("multiplication", 2), ("multiplication", 5), ("order_three", 3),
                                      ("exchange", 3), ("exchange", 4), ("exchange_diagonal", 2),
                                      ("exchange_diagonal", 5)])
def test_one_variable_identities(ident, n, curve, rng):
    rep = verify_one_var_identity(ident, n, curve, 25, rng)
    assert rep.passed, rep.summary_line()


def test_unknown_identity(curve):
    with pytest.raises(ValueError):
        verify_one_var_identity("nonsense", 3, curve)


def test_sample_generic_exhaustion(rng):
    with pytest.raises(SampleDegenerate):
        sample_generic(rng, lambda g: 0.0, lambda s: [s], budget=5)


def test_normalized_residual_uses_unit_floor():
    assert normalized_residual(1e-3, 0.0) == pytest.approx(1e-3)
    assert normalized_residual(10.0, 9.0) == pytest.approx(0.1)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-1.5, 1.5), st.integers(2, 6), st.integers(0, 5))
def test_theta_alpha_periodicity_property(x, y, n, alpha):
    z = complex(x, y)
    f = theta_alpha(alpha, z, n)
    assert abs(theta_alpha(alpha, z + 1, n) - f) <= 1e-9 * max(1.0, abs(f))
    # theta_alpha(z + 1/n) = e^{2 pi i alpha/n} theta_alpha(z)
    g = theta_alpha(alpha, z + 1 / n, n)
    assert abs(g - np.exp(2j * np.pi * alpha / n) * f) <= 1e-9 * max(1.0, abs(f))
