"""Quadratic Poisson brackets: the cubic bracket on C^3 and the eta-derivative bracket of q_n(E)."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebras import SymmetricFunctionElement, linear_element, qn_product
from .errors import DegreeCapExceeded
from .multitheta import random_points
from .report import VerificationReport
from .theta import DEFAULT_CURVE, EllipticCurveParams, sample_generic, theta1

Exponent = tuple  # (a0, a1, a2)
DEGREE_CAP = 12
H_ETA = 1e-3


@dataclass
class PolynomialC3:
    terms: dict = field(default_factory=dict)
    cap: int = DEGREE_CAP

    def __post_init__(self):
        self.terms = {tuple(e): complex(c) for e, c in self.terms.items() if c != 0}
        if self.degree > self.cap:
            raise DegreeCapExceeded(f"degree {self.degree} exceeds cap {self.cap}")

    @classmethod
    def var(cls, i: int, cap: int = DEGREE_CAP) -> "PolynomialC3":
        e = [0, 0, 0]
        e[i] = 1
        return cls({tuple(e): 1}, cap)

    @classmethod
    def const(cls, c: complex, cap: int = DEGREE_CAP) -> "PolynomialC3":
        return cls({(0, 0, 0): c}, cap)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PolynomialC3") -> "PolynomialC3":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return PolynomialC3(out, max(self.cap, other.cap))

    def __neg__(self) -> "PolynomialC3":
        return PolynomialC3({e: -c for e, c in self.terms.items()}, self.cap)

    def __sub__(self, other: "PolynomialC3") -> "PolynomialC3":
        return self + (-other)

    def scale(self, c: complex) -> "PolynomialC3":
        return PolynomialC3({e: c * v for e, v in self.terms.items()}, self.cap)

    def __mul__(self, other: "PolynomialC3") -> "PolynomialC3":
        cap = max(self.cap, other.cap)
        if self.degree + other.degree > cap:
            raise DegreeCapExceeded(f"product degree {self.degree + other.degree} exceeds cap {cap}")
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, 0) + c1 * c2
        return PolynomialC3(out, cap)

    def diff(self, i: int) -> "PolynomialC3":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return PolynomialC3(out, self.cap)

    def evaluate(self, x: Sequence[complex]) -> complex:
        return complex(sum(c * x[0] ** e[0] * x[1] ** e[1] * x[2] ** e[2] for e, c in self.terms.items()))

    def coefficients(self) -> dict:
        return dict(sorted(self.terms.items()))


def generator_brackets(k: complex, cap: int = DEGREE_CAP) -> dict:
    """{x_i, x_{i+1}} = x_{i+2}^2 + k x_i x_{i+1}, indices mod 3."""
    x = [PolynomialC3.var(i, cap) for i in range(3)]
    out = {}
    for i in range(3):
        j, l = (i + 1) % 3, (i + 2) % 3
        b = x[l] * x[l] + (x[i] * x[j]).scale(k)
        out[(i, j)] = b
        out[(j, i)] = -b
    return out


def bracket_c3(k: complex, f: PolynomialC3, g: PolynomialC3) -> PolynomialC3:
    """{f, g} = sum_{i != j} (df/dx_i)(dg/dx_j) {x_i, x_j}."""
    cap = max(f.cap, g.cap)
    if f.degree + g.degree > cap:
        raise DegreeCapExceeded(f"bracket degree {f.degree + g.degree} exceeds cap {cap}")
    gb = generator_brackets(k, cap)
    out = PolynomialC3({}, cap)
    for i in range(3):
        fi = f.diff(i)
        if fi.is_zero():
            continue
        for j in range(3):
            if i == j:
                continue
            gj = g.diff(j)
            if not gj.is_zero():
                out = out + fi * gj * gb[(i, j)]
    return out


def casimir(k: complex, cap: int = DEGREE_CAP) -> PolynomialC3:
    x = [PolynomialC3.var(i, cap) for i in range(3)]
    return x[0] * x[0] * x[0] + x[1] * x[1] * x[1] + x[2] * x[2] * x[2] + (x[0] * x[1] * x[2]).scale(3 * k)


def jacobiator(k: complex, f: PolynomialC3, g: PolynomialC3, h: PolynomialC3) -> PolynomialC3:
    b = lambda a, c: bracket_c3(k, a, c)
    return b(f, b(g, h)) + b(g, b(h, f)) + b(h, b(f, g))


def _max_coeff(p: PolynomialC3) -> float:
    return max((abs(c) for c in p.terms.values()), default=0.0)


def c3_identity_check(ks: Sequence[complex], tol: float = 0.0) -> VerificationReport:
    """Jacobi on generators and {x_i, C} = 0, coefficient-wise; tol 0 demands exact cancellation."""
    t0 = time.perf_counter()
    worst_j, worst_c = 0.0, 0.0
    x = [PolynomialC3.var(i) for i in range(3)]
    for k in ks:
        worst_j = max(worst_j, _max_coeff(jacobiator(k, x[0], x[1], x[2])))
        C = casimir(k)
        worst_c = max([worst_c] + [_max_coeff(bracket_c3(k, xi, C)) for xi in x])
    rep = VerificationReport.from_residual(
        "poisson_c3", "cubic Poisson bracket on C^3: Jacobi identity and Casimir",
        {"k_count": len(ks)}, max(worst_j, worst_c), tol, jacobi=worst_j, casimir=worst_c)
    rep.wall_time = time.perf_counter() - t0
    return rep


# the bracket of q_n(E)

def d4(F: Callable[[float], complex], x: float = 0.0, h: float = H_ETA) -> complex:
    """Fourth-order central difference."""
    return (-F(x + 2 * h) + 8 * F(x + h) - 8 * F(x - h) + F(x - 2 * h)) / (12 * h)


def _at_eta0(f: SymmetricFunctionElement) -> SymmetricFunctionElement:
    return SymmetricFunctionElement(f.arity, f.evaluator, f.n, f.c, 0.0)


def qn_bracket_element(f: SymmetricFunctionElement, g: SymmetricFunctionElement, n: int,
                       curve: EllipticCurveParams = DEFAULT_CURVE, h: float = H_ETA) -> SymmetricFunctionElement:
    """(d/d eta)(f * g - g * f) at eta = 0, as an element of arity f.arity + g.arity."""
    f0, g0 = _at_eta0(f), _at_eta0(g)

    def ev(*z):
        F = lambda e: qn_product(f0, g0, n, curve, e)(*z) - qn_product(g0, f0, n, curve, e)(*z)
        return d4(F, 0.0, h)

    return SymmetricFunctionElement(f.arity + g.arity, ev, n, f.c, 0.0)


def qn_bracket(n: int, curve: EllipticCurveParams, f: SymmetricFunctionElement, g: SymmetricFunctionElement,
               at: Sequence[complex], h: float = H_ETA) -> complex:
    return complex(qn_bracket_element(f, g, n, curve, h)(*at))


def commutative_product(f: SymmetricFunctionElement, g: SymmetricFunctionElement, n: int,
                        curve: EllipticCurveParams = DEFAULT_CURVE) -> SymmetricFunctionElement:
    return qn_product(_at_eta0(f), _at_eta0(g), n, curve, 0.0)


def _random_linear(rng, n, curve):
    return linear_element(rng.normal(size=n) + 1j * rng.normal(size=n), n, curve)


def _scale(values) -> float:
    return max(1.0, max(abs(v) for v in values))


def qn_bracket_checks(n: int, curve: EllipticCurveParams = DEFAULT_CURVE, samples: int = 5,
                      rng: np.random.Generator | None = None, h: float = H_ETA,
                      which=("antisymmetry", "self", "leibniz", "jacobi")) -> dict:
    """Residuals for antisymmetry, {f, f} = 0, Leibniz and Jacobi of the q_n bracket on linear elements.

    The finite-difference error is truncation-dominated at h = 1e-3 and scales as h^4.
    """
    rng = rng or np.random.default_rng(0)
    out = {key: 0.0 for key in which}
    for _ in range(samples):
        f, g, e = (_random_linear(rng, n, curve) for _ in range(3))
        z = [complex(x) for x in random_points(rng, 1, 3, curve)[0]]
        if "antisymmetry" in out or "self" in out:
            fg = qn_bracket(n, curve, f, g, z[:2], h)
            gf = qn_bracket(n, curve, g, f, z[:2], h)
            ff = qn_bracket(n, curve, f, f, z[:2], h)
            if "antisymmetry" in out:
                out["antisymmetry"] = max(out["antisymmetry"], abs(fg + gf) / _scale([fg, gf]))
            if "self" in out:
                out["self"] = max(out["self"], abs(ff) / _scale([fg]))
        if "leibniz" in out:
            # {f, g e} = {f, g} e + g {f, e}
            lhs = qn_bracket(n, curve, f, commutative_product(g, e, n, curve), z, h)
            t1 = commutative_product(qn_bracket_element(f, g, n, curve, h), e, n, curve)(*z)
            t2 = commutative_product(g, qn_bracket_element(f, e, n, curve, h), n, curve)(*z)
            out["leibniz"] = max(out["leibniz"], abs(lhs - t1 - t2) / _scale([lhs, t1, t2]))
        if "jacobi" in out:
            br = lambda a, b: qn_bracket_element(a, b, n, curve, h)
            parts = [br(f, br(g, e))(*z), br(g, br(e, f))(*z), br(e, br(f, g))(*z)]
            out["jacobi"] = max(out["jacobi"], abs(sum(parts)) / _scale(parts))
    return out


def _D(u: Sequence[complex], a: int, curve) -> complex:
    out = 1.0 + 0j
    for i in range(len(u)):
        if i != a:
            out *= theta1(u[a] - u[i], curve)
    return out


def psi_p_sides(n: int, u: Sequence[complex], f, g, curve: EllipticCurveParams = DEFAULT_CURVE,
                h: float = H_ETA, coincidence: float = 1e-4):
    """Coefficients of e_a e_b on both sides of {psi_p f, psi_p g} = psi_p {f, g}.

    psi_p(f) = sum_a f(u_a) / D_a(u) e_a, and the target bracket is
    {e_a, u_b} = -2 e_a, {e_a, u_a} = (n - 2) e_a, all other brackets zero.
    """
    p = len(u)
    u = list(u)
    s = lambda a: np.array([n - 2 if b == a else -2 for b in range(p)])

    def grad(F, a):
        gs = []
        for b in range(p):
            def G(x, b=b):
                uu = list(u)
                uu[b] = x
                return F(uu[a]) / _D(uu, a, curve)
            gs.append(d4(G, u[b], h))
        return np.array(gs)

    left = {}
    for a in range(p):
        for b in range(p):
            A = f(u[a]) / _D(u, a, curve)
            B = g(u[b]) / _D(u, b, curve)
            val = A * (s(a) @ grad(g, b)) - B * (s(b) @ grad(f, a))
            key = tuple(sorted((a, b)))
            left[key] = left.get(key, 0) + val
    hb = qn_bracket_element(f, g, n, curve, h)
    right = {}
    for a in range(p):
        for b in range(a + 1, p):
            right[(a, b)] = hb(u[a], u[b]) / (_D(u, a, curve) * _D(u, b, curve))
        # the bracket has a removable singularity on the diagonal: average across it
        diag = 0.5 * (hb(u[a], u[a] + coincidence) + hb(u[a], u[a] - coincidence))
        right[(a, a)] = 0.5 * diag / _D(u, a, curve) ** 2
    return left, right


def psi_p_check(n: int, p: int, curve: EllipticCurveParams = DEFAULT_CURVE, samples: int = 3,
                rng: np.random.Generator | None = None, tol: float = 1e-4, f=None, g=None) -> VerificationReport:
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    worst = 0.0
    for _ in range(samples):
        ff = f or _random_linear(rng, n, curve)
        gg = g or _random_linear(rng, n, curve)
        u, _ = sample_generic(rng, lambda gr: [complex(x) for x in random_points(gr, 1, p, curve)[0]],
                              lambda uu: [_D(uu, a, curve) for a in range(p)], 1e-2)
        left, right = psi_p_sides(n, u, ff, gg, curve)
        scale = max(max(abs(x) for x in left.values()), 1e-300)
        worst = max(worst, max(abs(left[key] - right[key]) for key in left) / scale)
    rep = VerificationReport.from_residual(
        "psi_p", "psi_p is a Poisson homomorphism from q_n(E) to b_{p,n}",
        {"n": n, "p": p, "samples": samples}, worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep
