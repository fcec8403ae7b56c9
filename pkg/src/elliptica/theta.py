"""One-variable theta functions on E = C / (Z + tau Z).

Conventions
-----------
theta1(z)      = sum_a (-1)^a exp(2 pi i (a z + a(a-1)/2 tau)), zero exactly on the lattice.
theta_alpha(z) = exp(2 pi i (alpha z + alpha(alpha-n) tau/(2n) + alpha/(2n)))
                 * prod_j theta1(z + j/n + alpha tau/n),
which spans Theta_{n,(n-1)/2}. Members of Theta_{n,c} satisfy
f(z+1) = f(z) and f(z+tau) = (-1)^n exp(-2 pi i (n z - c)) f(z).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import SampleDegenerate
from .report import VerificationReport

TWO_PI_I = 2j * np.pi


@dataclass(frozen=True)
class EllipticCurveParams:
    tau: complex = 0.3 + 1.1j
    truncation: int = 30

    def __post_init__(self):
        if not complex(self.tau).imag > 0:
            raise ValueError("Im(tau) must be positive")
        if int(self.truncation) < 1:
            raise ValueError("truncation must be >= 1")
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "truncation", int(self.truncation))

    @property
    def nome(self) -> complex:
        return np.exp(TWO_PI_I * self.tau)

    def tail_bound(self) -> float:
        """|q|^{N(N-1)/2}: size of the first dropped series term relative to the leading one."""
        N = self.truncation
        return float(np.exp(-np.pi * self.tau.imag * N * (N - 1)))

    def check_tail(self, tol: float) -> None:
        if self.tail_bound() >= tol:
            raise ValueError(f"truncation {self.truncation} too small for tol {tol}")


DEFAULT_CURVE = EllipticCurveParams()


@dataclass(frozen=True)
class ThetaSpaceSpec:
    order: int
    shift: complex = 0.0

    def __post_init__(self):
        if int(self.order) < 1:
            raise ValueError("order must be >= 1")


def theta1(z, curve: EllipticCurveParams = DEFAULT_CURVE):
    """Truncated series for theta(z) with exact reduction of Im z into [0, Im tau)."""
    z = np.asarray(z, dtype=complex)
    tau = curve.tau
    m = np.floor(z.imag / tau.imag)
    z0 = z - m * tau
    # real part only affects phases; keep it small for accuracy
    shift = np.round(z0.real)
    z0 = z0 - shift
    N = curve.truncation
    a = np.arange(-N, N + 1)
    sign = np.where(a % 2 == 0, 1.0, -1.0)
    expo = TWO_PI_I * (a * z0[..., None] + a * (a - 1) / 2 * tau)
    s = (sign * np.exp(expo)).sum(-1)
    # theta(z0 + s) = theta(z0) for integer s; theta(x + m tau) = (-1)^m e^{-2 pi i (m x + m(m-1)/2 tau)} theta(x)
    x = z0 + shift
    factor = np.where(m % 2 == 0, 1.0, -1.0) * np.exp(-TWO_PI_I * (m * x + m * (m - 1) / 2 * tau))
    out = factor * s
    return out if out.ndim else complex(out)


def theta1_product(z, curve: EllipticCurveParams = DEFAULT_CURVE, terms: int = 60):
    """Jacobi triple product form, used as an independent oracle for theta1."""
    z = np.asarray(z, dtype=complex)
    q = curve.nome
    a = np.arange(1, terms + 1)
    qa = q ** a
    x = np.exp(TWO_PI_I * z)[..., None]
    out = np.prod(1 - qa) * (1 - x[..., 0]) * np.prod((1 - x * qa) * (1 - qa / x), axis=-1)
    return out if out.ndim else complex(out)


def theta_alpha(alpha: int, z, n: int, curve: EllipticCurveParams = DEFAULT_CURVE):
    z = np.asarray(z, dtype=complex)
    al = int(alpha) % n
    tau = curve.tau
    out = np.exp(TWO_PI_I * (al * z + al * (al - n) / (2 * n) * tau + al / (2 * n)))
    for j in range(n):
        out = out * theta1(z + j / n + al * tau / n, curve)
    return out if np.ndim(out) else complex(out)


@dataclass(frozen=True)
class ThetaBasis:
    """Basis theta_alpha(z + offset) of Theta_{n,c}; offset = (n-1)/(2n) - c/n."""

    curve: EllipticCurveParams
    order: int
    shift: complex = None  # the class c; None means the natural class (n-1)/2
    offset: complex = field(init=False)

    def __post_init__(self):
        n = self.order
        c = (n - 1) / 2 if self.shift is None else complex(self.shift)
        object.__setattr__(self, "shift", c)
        object.__setattr__(self, "offset", (n - 1) / (2 * n) - c / n)

    def __call__(self, alpha: int, z):
        return theta_alpha(alpha, np.asarray(z, dtype=complex) + self.offset, self.order, self.curve)

    def evaluator(self, alpha: int) -> Callable:
        return lambda z: self(alpha, z)

    def matrix(self, points: Sequence[complex]) -> np.ndarray:
        pts = np.asarray(points, dtype=complex)
        return np.array([self(a, pts) for a in range(self.order)])


def theta_nc_basis(spec: ThetaSpaceSpec, curve: EllipticCurveParams = DEFAULT_CURVE) -> ThetaBasis:
    return ThetaBasis(curve, int(spec.order), complex(spec.shift))


def natural_basis(n: int, curve: EllipticCurveParams = DEFAULT_CURVE) -> ThetaBasis:
    return ThetaBasis(curve, n, None)


def translate_1n(f: Callable, n: int) -> Callable:
    return lambda z: f(np.asarray(z, dtype=complex) + 1 / n)


def translate_taun(f: Callable, n: int, curve: EllipticCurveParams = DEFAULT_CURVE) -> Callable:
    tau = curve.tau

    def g(z):
        z = np.asarray(z, dtype=complex)
        return np.exp(TWO_PI_I * (z + 1 / (2 * n) - (n - 1) / (2 * n) * tau)) * f(z + tau / n)

    return g


# sampling

def sample_parallelogram(rng: np.random.Generator, size, curve: EllipticCurveParams = DEFAULT_CURVE):
    a = rng.uniform(0, 1, size)
    b = rng.uniform(0, 1, size)
    return a + b * curve.tau


def sample_generic(rng: np.random.Generator, draw: Callable[[np.random.Generator], object],
                   denominators: Callable[[object], Sequence[complex]], eps: float = 1e-3,
                   budget: int = 200):
    """Redraw until every denominator has modulus >= eps; returns (sample, rejections)."""
    for tries in range(budget):
        s = draw(rng)
        dens = np.abs(np.asarray(denominators(s), dtype=complex))
        if np.all(np.isfinite(dens)) and dens.min() >= eps:
            return s, tries
    raise SampleDegenerate(f"no admissible sample after {budget} draws")


def normalized_residual(lhs, rhs, terms: Sequence[complex] = ()) -> float:
    scale = max([1.0, abs(complex(lhs)), abs(complex(rhs))] + [abs(complex(t)) for t in terms])
    return abs(complex(lhs) - complex(rhs)) / scale


def numerical_rank(M: np.ndarray, rel: float = 1e-8) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    return int((s >= rel * s[0]).sum()) if s.size and s[0] > 0 else 0


# quasi-periodicity and operator checks

def quasi_periodicity_residual(basis: ThetaBasis, points) -> float:
    n, tau, c = basis.order, basis.curve.tau, basis.shift
    z = np.asarray(points, dtype=complex)
    worst = 0.0
    for a in range(basis.order):
        f = basis(a, z)
        f1 = basis(a, z + 1)
        ft = basis(a, z + tau)
        expected = (-1) ** n * np.exp(-TWO_PI_I * (n * z - c)) * f
        scale = np.maximum(1.0, np.maximum(np.abs(f1), np.abs(ft)))
        worst = max(worst, float(np.max(np.abs(f1 - f) / np.maximum(1.0, np.abs(f)))),
                    float(np.max(np.abs(ft - expected) / scale)))
    return worst


def check_translation_commutation(basis: ThetaBasis, samples: int = 20,
                                  rng: np.random.Generator | None = None,
                                  tol: float = 1e-9) -> VerificationReport:
    """T_{1/n} T_{tau/n} = e^{2 pi i/n} T_{tau/n} T_{1/n}, plus the action on theta_alpha."""
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    n, curve = basis.order, basis.curve
    z = sample_parallelogram(rng, samples, curve)
    worst = 0.0
    for a in range(n):
        f = basis.evaluator(a)
        ab = translate_1n(translate_taun(f, n, curve), n)(z)
        ba = translate_taun(translate_1n(f, n), n, curve)(z)
        scale = np.maximum(1.0, np.abs(ab))
        worst = max(worst, float(np.max(np.abs(ab - np.exp(TWO_PI_I / n) * ba) / scale)))
        if basis.offset == 0:
            # natural basis: eigenvalue and shift relations
            worst = max(worst, float(np.max(np.abs(translate_1n(f, n)(z) - np.exp(TWO_PI_I * a / n) * f(z))
                                            / np.maximum(1.0, np.abs(f(z))))))
            nxt = basis(a + 1, z)
            worst = max(worst, float(np.max(np.abs(translate_taun(f, n, curve)(z) - nxt)
                                            / np.maximum(1.0, np.abs(nxt)))))
    rep = VerificationReport.from_residual(
        "translation_commutation", "T_{1/n} T_{tau/n} = e^{2 pi i/n} T_{tau/n} T_{1/n} on theta_alpha",
        {"n": n, "tau": curve.tau, "samples": samples}, worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep


# identities

def _theta_constants(n: int, curve: EllipticCurveParams) -> complex:
    """(1/n) theta(1/n) ... theta((n-1)/n)."""
    return complex(np.prod([theta1(j / n, curve) for j in range(1, n)])) / n


def theta_multiplication_terms(n: int, z: complex, curve: EllipticCurveParams = DEFAULT_CURVE):
    lhs = theta1(n * z, curve)
    num = n * np.prod([theta_alpha(a, z, n, curve) for a in range(n)]) * np.exp(-TWO_PI_I * n * (n - 1) / 2 * z)
    den = np.prod([theta_alpha(a, 0, n, curve) for a in range(1, n)]) * np.prod(
        [theta1(j / n, curve) for j in range(1, n)])
    return complex(lhs), complex(num / den), [num / den]


def order_three_quadratic_terms(alpha: int, z: complex, eta: complex, curve: EllipticCurveParams = DEFAULT_CURVE):
    B = ThetaBasis(curve, 3, 0.0)
    a = alpha
    terms = [B(0, eta) * B(a, z + eta) * B(a, z),
             B(1, eta) * B(a + 2, z + eta) * B(a + 1, z),
             B(2, eta) * B(a + 1, z + eta) * B(a + 2, z)]
    return complex(sum(terms)), 0.0, terms


def exchange_identity_terms(n: int, alpha: int, beta: int, u, v, y, z, eta, curve: EllipticCurveParams = DEFAULT_CURVE):
    th = lambda s, x: theta_alpha(s, x, n, curve)
    t = lambda x: theta1(x, curve)
    left = [t(y - z + n * v - n * u) / (t(y - z) * t(n * v - n * u)) * th(alpha, y + u) * th(beta, z + v + eta),
            t(z - y + n * eta) / (t(z - y) * t(n * eta)) * th(alpha, z + u) * th(beta, y + v + eta)]
    C = _theta_constants(n, curve)
    right = [C * th(beta - alpha, v - u + eta) / (th(r, eta) * th(beta - alpha - r, v - u))
             * th(beta - r, y + v) * th(alpha + r, z + u + eta) for r in range(n)]
    return complex(sum(left)), complex(sum(right)), left + right


def exchange_diagonal_terms(n: int, alpha: int, beta: int, y, z, eta, curve: EllipticCurveParams = DEFAULT_CURVE):
    th = lambda s, x: theta_alpha(s, x, n, curve)
    t = lambda x: theta1(x, curve)
    pre = t(z - y + n * eta) / (t(z - y) * t(n * eta))
    a1 = pre * th(alpha, z + eta) * th(beta, y + eta)
    a2 = pre * th(alpha, y + eta) * th(beta, z + eta)
    C = _theta_constants(n, curve) * th(beta - alpha, 0)
    right = [C / (th(r, eta) * th(beta - alpha - r, -eta)) * th(beta - r, y) * th(alpha + r, z + 2 * eta)
             for r in range(n)]
    return complex(a1 - a2), complex(sum(right)), [a1, a2] + right


_STATEMENTS = {
    "multiplication": "theta(nz) as a product of the theta_alpha",
    "order_three": "three-term quadratic relation among order-three theta functions",
    "exchange": "two-term exchange identity for theta_alpha in two pairs of variables",
    "exchange_diagonal": "coincidence specialization u = v + eta of the exchange identity",
}


def verify_one_var_identity(ident: str, n: int, curve: EllipticCurveParams = DEFAULT_CURVE,
                            samples: int = 30, rng: np.random.Generator | None = None,
                            tol: float = 1e-8, eps: float = 1e-3) -> VerificationReport:
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    if ident not in _STATEMENTS:
        raise ValueError(f"unknown identity {ident}")
    if ident == "order_three":
        n = 3
    t = lambda x: theta1(x, curve)
    worst, rejected = 0.0, 0
    for _ in range(samples):
        if ident == "multiplication":
            z, rej = sample_generic(rng, lambda g: sample_parallelogram(g, None, curve), lambda z: [1.0], eps)
            lhs, rhs, terms = theta_multiplication_terms(n, complex(z), curve)
        elif ident == "order_three":
            draw = lambda g: (int(g.integers(3)), complex(sample_parallelogram(g, None, curve)),
                              complex(sample_parallelogram(g, None, curve)))
            (a, z, eta), rej = sample_generic(rng, draw, lambda s: [1.0], eps)
            lhs, rhs, terms = order_three_quadratic_terms(a, z, eta, curve)
        elif ident == "exchange":
            def draw(g):
                al, be = (int(x) for x in g.integers(n, size=2))
                return (al, be) + tuple(complex(x) for x in sample_parallelogram(g, 5, curve))

            def dens(s):
                al, be, u, v, y, z, eta = s
                out = [t(y - z), t(n * v - n * u), t(z - y), t(n * eta)]
                out += [theta_alpha(r, eta, n, curve) * theta_alpha(be - al - r, v - u, n, curve) for r in range(n)]
                return out

            s, rej = sample_generic(rng, draw, dens, eps)
            lhs, rhs, terms = exchange_identity_terms(n, *s, curve=curve)
        else:
            def draw(g):
                al, be = (int(x) for x in g.integers(n, size=2))
                return (al, be) + tuple(complex(x) for x in sample_parallelogram(g, 3, curve))

            def dens(s):
                al, be, y, z, eta = s
                out = [t(z - y), t(n * eta)]
                out += [theta_alpha(r, eta, n, curve) * theta_alpha(be - al - r, -eta, n, curve) for r in range(n)]
                return out

            s, rej = sample_generic(rng, draw, dens, eps)
            lhs, rhs, terms = exchange_diagonal_terms(n, *s, curve=curve)
        rejected += rej
        worst = max(worst, normalized_residual(lhs, rhs, terms))
    rep = VerificationReport.from_residual(
        f"theta_{ident}", _STATEMENTS[ident], {"n": n, "tau": curve.tau, "samples": samples},
        worst, tol, rejected=rejected)
    rep.wall_time = time.perf_counter() - t0
    return rep


def series_product_agreement(curve: EllipticCurveParams = DEFAULT_CURVE, samples: int = 100,
                             rng: np.random.Generator | None = None) -> float:
    """Max relative gap between series and product forms on |Re z| <= 1, |Im z| <= Im tau."""
    rng = rng or np.random.default_rng(0)
    z = rng.uniform(-1, 1, samples) + 1j * rng.uniform(-curve.tau.imag, curve.tau.imag, samples)
    s = theta1(z, curve)
    p = theta1_product(z, curve)
    return float(np.max(np.abs(s - p) / np.maximum(np.abs(p), math.ulp(1.0))))
