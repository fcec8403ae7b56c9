"""Relation spaces for the named algebra families and the functional (shuffle) products."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConstraintViolated, DegenerateEta, InvalidPair, InvalidStructureConstants
from .quadalg import RelationSpace, tensor
from .theta import DEFAULT_CURVE, EllipticCurveParams, ThetaBasis, theta1, theta_alpha


@dataclass(frozen=True)
class QnkParams:
    n: int
    k: int
    eta: complex
    curve: EllipticCurveParams = DEFAULT_CURVE

    def __post_init__(self):
        if not (1 <= self.k < self.n) or math.gcd(self.n, self.k) != 1:
            if not (self.n == 1 and self.k == 1):
                raise InvalidPair(f"need coprime 1 <= k < n, got ({self.n}, {self.k})")
        tau = self.curve.tau
        eta = complex(self.eta)
        # distance from eta to the lattice Z + tau Z
        b = round(eta.imag / tau.imag)
        x = eta - b * tau
        if abs(x - round(x.real)) < 1e-6 and self.n > 1:
            raise DegenerateEta(f"eta = {eta} is within 1e-6 of a lattice point")


def qnk_coefficient(n: int, k: int, i: int, j: int, r: int, eta, curve=DEFAULT_CURVE) -> complex:
    th = lambda a, x: theta_alpha(a, x, n, curve)
    return th(j - i + r * (k - 1), 0) / (th(k * r, eta) * th(j - i - r, -eta))


def _check_denominators(n: int, k: int, eta, curve, floor: float = 1e-10) -> None:
    for r in range(n):
        for s in range(n):
            a = abs(theta_alpha(k * r, eta, n, curve))
            b = abs(theta_alpha(s, -eta, n, curve))
            if min(a, b) < floor:
                raise DegenerateEta(f"theta denominator {min(a, b):.2e} below {floor} at eta={eta}")


def qnk_row(n: int, k: int, i: int, j: int, eta, curve=DEFAULT_CURVE) -> np.ndarray:
    """sum_r theta_{j-i+r(k-1)}(0) / (theta_{kr}(eta) theta_{j-i-r}(-eta)) x_{j-r} x_{i+r}."""
    v = np.zeros((n, n), complex)
    for r in range(n):
        v[(j - r) % n, (i + r) % n] += qnk_coefficient(n, k, i, j, r, eta, curve)
    return v.ravel()


def qnk_relations(params: QnkParams, ordered: bool = False) -> RelationSpace:
    """One row per unordered pair i < j (both orders when `ordered`)."""
    n, k, eta, curve = params.n, params.k, complex(params.eta), params.curve
    _check_denominators(n, k, eta, curve)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j and (ordered or i < j)]
    rows = np.array([qnk_row(n, k, i, j, eta, curve) for i, j in pairs]) if pairs else np.zeros((0, n * n))
    return RelationSpace(n, rows, f"Q_{{{n},{k}}}")


def q3_basis(curve: EllipticCurveParams = DEFAULT_CURVE) -> ThetaBasis:
    """Basis theta_alpha(z + 1/3) of Theta_{3,0}."""
    return ThetaBasis(curve, 3, 0.0)


def q3_from_curve(curve: EllipticCurveParams = DEFAULT_CURVE, eta: complex = 0.17 + 0.08j):
    """Returns (p, q, relations x_i x_{i+1} - q x_{i+1} x_i - p x_{i+2}^2, k) for Q_3."""
    B = q3_basis(curve)
    d = B(2, eta)
    if abs(d) < 1e-10:
        raise DegenerateEta("theta_2(eta) vanishes")
    q = -B(1, eta) / d
    p = -B(0, eta) / d
    rows = np.array([tensor(3, [(1, i, i + 1), (-q, i + 1, i), (-p, i + 2, i + 2)]) for i in range(3)])
    kinv = (p ** 3 + q ** 3 - 1) / (p * q) if abs(p * q) > 0 else complex("nan")
    return complex(p), complex(q), RelationSpace(3, rows, "Q_3"), complex(kinv)


def cubic_residual(kinv: complex, point: Sequence[complex]) -> float:
    x, y, z = (complex(c) for c in point)
    scale = max(abs(x), abs(y), abs(z)) ** 3
    return abs(x ** 3 + y ** 3 + z ** 3 + kinv * x * y * z) / scale


def sklyanin_constraint(J12, J23, J31) -> complex:
    return J12 + J23 + J31 + J12 * J23 * J31


def random_sklyanin_J(rng: np.random.Generator):
    J12, J23 = rng.normal(size=2) + 1j * rng.normal(size=2)
    return complex(J12), complex(J23), complex(-(J12 + J23) / (1 + J12 * J23))


def sklyanin_relations(J12, J23, J31, tol: float = 1e-10) -> RelationSpace:
    """[S_a, S_0] = -i J_bc [S_b, S_c]_+ and [S_a, S_b] = i [S_0, S_c]_+ for cyclic (a, b, c)."""
    if abs(sklyanin_constraint(J12, J23, J31)) > tol:
        raise ConstraintViolated("J12 + J23 + J31 + J12 J23 J31 must vanish")
    J = {(2, 3): J23, (3, 1): J31, (1, 2): J12}
    rows = []
    for a, b, c in [(1, 2, 3), (2, 3, 1), (3, 1, 2)]:
        Jbc = J[(b, c)]
        rows.append(tensor(4, [(1, a, 0), (-1, 0, a), (1j * Jbc, b, c), (1j * Jbc, c, b)]))
        rows.append(tensor(4, [(1, a, b), (-1, b, a), (-1j, 0, c), (-1j, c, 0)]))
    return RelationSpace(4, np.array(rows), "Sklyanin")


def skew_polynomial_relations(qmatrix) -> RelationSpace:
    """x_i x_j = q_ij x_j x_i for i < j."""
    Q = np.asarray(qmatrix, dtype=complex)
    n = Q.shape[0]
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            if Q[i, j] == 0:
                raise ValueError("q_ij must be nonzero")
            rows.append(tensor(n, [(1, i, j), (-Q[i, j], j, i)]))
    return RelationSpace(n, np.array(rows), "skew")


def _check_lie(f: np.ndarray, tol: float = 1e-10) -> None:
    if np.max(np.abs(f + f.transpose(1, 0, 2)), initial=0) > tol:
        raise InvalidStructureConstants("structure constants are not antisymmetric")
    # sum_l f_ij^l f_lk^m + cyclic(i, j, k) = 0
    jac = (np.einsum("ijl,lkm->ijkm", f, f) + np.einsum("jkl,lim->ijkm", f, f)
           + np.einsum("kil,ljm->ijkm", f, f))
    if np.max(np.abs(jac), initial=0) > tol:
        raise InvalidStructureConstants("structure constants violate the Jacobi identity")


def lie_projectivization_relations(f) -> RelationSpace:
    """Generators (c, x_1, ..., x_m): c x_i = x_i c and x_i x_j - x_j x_i = c sum_l f_ij^l x_l."""
    f = np.asarray(f, dtype=complex)
    _check_lie(f)
    m = f.shape[0]
    n = m + 1
    rows = [tensor(n, [(1, 0, i + 1), (-1, i + 1, 0)]) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            rows.append(tensor(n, [(1, i + 1, j + 1), (-1, j + 1, i + 1)]
                               + [(-f[i, j, l], 0, l + 1) for l in range(m)]))
    return RelationSpace(n, np.array(rows), "Lie")


def heisenberg_constants() -> np.ndarray:
    f = np.zeros((3, 3, 3))
    f[0, 1, 2], f[1, 0, 2] = 1, -1
    return f


def sl2_constants() -> np.ndarray:
    """Basis (e, f, h): [e, f] = h, [h, e] = 2e, [h, f] = -2f."""
    f = np.zeros((3, 3, 3))
    f[0, 1, 2], f[1, 0, 2] = 1, -1
    f[2, 0, 0], f[0, 2, 0] = 2, -2
    f[2, 1, 1], f[1, 2, 1] = -2, 2
    return f


def ogievetsky_relations() -> RelationSpace:
    """The three-generator relations with eps = e^{2 pi i/9}; generators ordered (x, y, z)."""
    e = np.exp(2j * np.pi / 9)
    x, y, z = 0, 1, 2
    rows = [tensor(3, [(e, z, x), (e ** 5, y, y), (1, x, z)]),
            tensor(3, [(e ** 2, z, z), (1, y, x), (e ** 4, x, y)]),
            tensor(3, [(1, z, y), (e ** 7, y, z), (e ** 8, x, x)])]
    return RelationSpace(3, np.array(rows), "Ogievetsky")


# functional realization

@dataclass(frozen=True)
class SymmetricFunctionElement:
    arity: int
    evaluator: Callable[..., complex]
    n: int = 0
    c: complex = 0.0
    eta: complex = 0.0

    def __call__(self, *z) -> complex:
        if len(z) != self.arity:
            raise ValueError(f"expected {self.arity} arguments")
        return complex(self.evaluator(*z))

    def symmetry_residual(self, rng: np.random.Generator, samples: int = 5,
                          curve: EllipticCurveParams = DEFAULT_CURVE) -> float:
        worst = 0.0
        for _ in range(samples):
            z = list(rng.uniform(0, 1, self.arity) + rng.uniform(0, 1, self.arity) * curve.tau)
            v = self(*z)
            perm = list(rng.permutation(self.arity))
            worst = max(worst, abs(v - self(*[z[i] for i in perm])) / max(1.0, abs(v)))
        return worst

    def quasi_periodicity_residual(self, rng: np.random.Generator, samples: int = 5,
                                   curve: EllipticCurveParams = DEFAULT_CURVE) -> float:
        """f(z_1 + tau, ...) = (-1)^n e^{-2 pi i (n z_1 - c - (arity-1) n eta)} f."""
        worst = 0.0
        n, a, tau = self.n, self.arity, curve.tau
        cls = self.c + (a - 1) * n * self.eta
        for _ in range(samples):
            z = list(rng.uniform(0, 1, a) + rng.uniform(0, 1, a) * tau)
            v = self(*z)
            per = self(z[0] + 1, *z[1:])
            sh = self(z[0] + tau, *z[1:])
            expect = (-1) ** n * np.exp(-2j * np.pi * (n * z[0] - cls)) * v
            scale = max(1.0, abs(v), abs(sh))
            worst = max(worst, abs(per - v) / scale, abs(sh - expect) / scale)
        return worst


def generator(alpha: int, n: int, curve: EllipticCurveParams = DEFAULT_CURVE) -> SymmetricFunctionElement:
    """x_alpha = theta_alpha, an element of F_1 = Theta_{n,(n-1)/2}."""
    return SymmetricFunctionElement(1, lambda z: theta_alpha(alpha, z, n, curve), n, (n - 1) / 2)


def linear_element(coeffs: Sequence[complex], n: int, curve: EllipticCurveParams = DEFAULT_CURVE):
    coeffs = [complex(c) for c in coeffs]

    def f(z):
        return sum(c * theta_alpha(a, z, n, curve) for a, c in enumerate(coeffs) if c != 0)

    return SymmetricFunctionElement(1, f, n, (n - 1) / 2)


def shuffles(total: int, first: int):
    for S in itertools.combinations(range(total), first):
        chosen = set(S)
        yield list(S), [i for i in range(total) if i not in chosen]


def functional_product(lam: Callable[[complex, complex], complex], f: SymmetricFunctionElement,
                       g: SymmetricFunctionElement) -> SymmetricFunctionElement:
    """Symmetrized product with weight lam(u_i, u_j) over split pairs; one summand per shuffle."""
    a, b = f.arity, g.arity

    def h(*z):
        total = 0j
        for S, T in shuffles(a + b, a):
            val = f(*[z[i] for i in S]) * g(*[z[j] for j in T])
            for i in S:
                for j in T:
                    val *= lam(z[i], z[j])
            total += val
        return total

    return SymmetricFunctionElement(a + b, h, f.n, f.c)


def qn_product(f: SymmetricFunctionElement, g: SymmetricFunctionElement, n: int,
               curve: EllipticCurveParams = DEFAULT_CURVE, eta: complex = 0.0) -> SymmetricFunctionElement:
    """Elliptic shuffle product: g is shifted by -2 alpha eta, kernel theta(z_i - z_j - n eta) / theta(z_i - z_j)."""
    a, b = f.arity, g.arity
    th = lambda x: theta1(x, curve)

    def h(*z):
        total = 0j
        for S, T in shuffles(a + b, a):
            val = f(*[z[i] for i in S]) * g(*[z[j] - 2 * a * eta for j in T])
            for i in S:
                for j in T:
                    val *= th(z[i] - z[j] - n * eta) / th(z[i] - z[j])
            total += val
        return total

    return SymmetricFunctionElement(a + b, h, n, f.c, eta)


def shuffle_relation_terms(n: int, i: int, j: int, eta, z1, z2, curve: EllipticCurveParams = DEFAULT_CURVE):
    """Summands of sum_r x_{j-r} x_{i+r} / (theta_{j-i-r}(-eta) theta_r(eta)) evaluated at (z1, z2).

    The monomial x_a x_b is realized as the shuffle product x_b * x_a (see notes on ordering).
    """
    th = lambda s, x: theta_alpha(s, x, n, curve)
    out = []
    for r in range(n):
        c = 1 / (th(j - i - r, -eta) * th(r, eta))
        prod = qn_product(generator(i + r, n, curve), generator(j - r, n, curve), n, curve, eta)
        out.append(c * prod(z1, z2))
    return out
