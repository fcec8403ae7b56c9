"""Numerical workbench for elliptic PBW algebras, theta functions and Belavin R-matrices."""

from .errors import EllipticaError
from .report import VerificationReport
from .theta import DEFAULT_CURVE, EllipticCurveParams, ThetaBasis, theta1, theta_alpha
from .multitheta import ContinuedFraction, continued_fraction, dual_fraction, w_basis
from .quadalg import RelationSpace, central_elements, hilbert_dims
from .algebras import QnkParams, qnk_relations
from .rmatrix import belavin_r

__version__ = "0.1.0"

__all__ = [
    "EllipticaError", "VerificationReport", "DEFAULT_CURVE", "EllipticCurveParams", "ThetaBasis", "theta1",
    "theta_alpha", "ContinuedFraction", "continued_fraction", "dual_fraction", "w_basis", "RelationSpace",
    "central_elements", "hilbert_dims", "QnkParams", "qnk_relations", "belavin_r",
]
