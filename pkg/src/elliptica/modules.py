"""Linear modules, functional modules, bosonization and exchange-algebra homomorphism checks.

Ordering convention: in the functional modules and linear modules below, a monomial
x_a x_b of the relation space is applied with x_a acting first. This is the ordering under which the
shuffle-product realization reproduces the relation space (see shuffle_relation_terms in algebras).
Bosonization and the exchange-algebra image check use the plain left-to-right product.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebras import QnkParams, linear_element, qn_product, qnk_coefficient, qnk_relations
from .errors import DegenerateParameters, OffCurve, SingularSystem
from .multitheta import d_det, random_points, w_basis
from .quadalg import membership_distance, row_span
from .report import VerificationReport
from .theta import DEFAULT_CURVE, EllipticCurveParams, sample_generic, theta1, theta_alpha


def projective_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Sine of the angle between the lines: (1 - |<a,b>|^2 / (|a|^2 |b|^2))^{1/2}.

    Evaluated as |b - proj_a b| / |b|, which avoids the cancellation in 1 - c.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.linalg.norm(b - a * np.vdot(a, b)))


# linear modules of Q_3

def q3_step_matrix(p: complex, q: complex, point) -> np.ndarray:
    x, y, z = (complex(c) for c in point)
    return np.array([[y, -q * x, -p * z],
                     [-p * x, z, -q * y],
                     [-q * z, -p * y, x]])


def q3_linear_module_step(p: complex, q: complex, point, tol: float = 1e-8) -> np.ndarray:
    """Solve the three bilinear relations for the next point of a linear module."""
    pt = np.asarray(point, dtype=complex)
    pt = pt / np.linalg.norm(pt)
    kinv = (p ** 3 + q ** 3 - 1) / (p * q)
    x, y, z = pt
    if abs(x ** 3 + y ** 3 + z ** 3 + kinv * x * y * z) > tol * max(1.0, abs(kinv)):
        raise OffCurve("point is not on the cubic")
    A = q3_step_matrix(p, q, pt)
    _, s, vh = np.linalg.svd(A)
    if s[-1] > tol * s[0]:
        raise SingularSystem(f"relation system has no kernel (sigma_min/sigma_max = {s[-1] / s[0]:.2e})")
    if s[1] < 1e3 * max(s[-1], 1e-300) and s[1] < 1e-6 * s[0]:
        raise SingularSystem("kernel of the relation system is not one-dimensional")
    nxt = vh[-1].conj()
    return nxt / np.linalg.norm(nxt)


def q3_linear_module_check(curve: EllipticCurveParams = DEFAULT_CURVE, eta: complex = 0.17 + 0.08j,
                           steps: int = 5, samples: int = 5, rng: np.random.Generator | None = None,
                           tol: float = 1e-8) -> VerificationReport:
    """Iterate the linear-module step from a point of the cubic; successive points are B(u + m eta)."""
    from .algebras import q3_basis, q3_from_curve
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    p, q, _, _ = q3_from_curve(curve, eta)
    B = q3_basis(curve)
    worst = 0.0
    for _ in range(samples):
        u = complex(random_points(rng, 1, 1, curve)[0][0])
        pt = np.array([B(a, u) for a in range(3)])
        for m in range(1, steps + 1):
            pt = q3_linear_module_step(p, q, pt)
            worst = max(worst, projective_distance(pt, [B(a, u + m * eta) for a in range(3)]))
    rep = VerificationReport.from_residual(
        "q3_linear_module", "linear modules of Q_3 follow the translation by eta on the cubic",
        {"eta": eta, "steps": steps, "samples": samples}, worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep


# functional modules M_{v_1..v_p}

@dataclass(frozen=True)
class FunctionalModuleState:
    v: tuple
    alpha: tuple

    @property
    def p(self) -> int:
        return len(self.v)


def functional_module_apply(n: int, curve: EllipticCurveParams, eta: complex, state: FunctionalModuleState,
                            f: Callable[[complex], complex], floor: float = 1e-12) -> dict:
    """f v_alpha = sum_i c_i v_{alpha + e_i}; returns {successor alpha: c_i}."""
    v, al = state.v, state.alpha
    total = 2 * sum(al)
    out = {}
    for i in range(state.p):
        den = 1.0 + 0j
        for l in range(state.p):
            if l != i:
                den *= theta1(v[i] - v[l] - n * (al[i] - al[l]) * eta, curve)
        if abs(den) < floor:
            raise DegenerateParameters("module parameters hit a theta zero")
        nxt = list(al)
        nxt[i] += 1
        out[tuple(nxt)] = out.get(tuple(nxt), 0) + complex(f(v[i] + (total - n * al[i]) * eta)) / den
    return out


def module_relation_residual(n: int, curve: EllipticCurveParams, eta: complex, state: FunctionalModuleState,
                             i: int, j: int, k: int = 1) -> float:
    """Apply sum_r c_r x_{j-r} x_{i+r} to a state (x_{j-r} first), collecting coefficients per target."""
    gens = [(lambda a: (lambda z: theta_alpha(a, z, n, curve)))(a) for a in range(n)]
    acc, scale = {}, 0.0
    for r in range(n):
        c = 1 / (theta_alpha(j - i - r, -eta, n, curve) * theta_alpha(r, eta, n, curve))
        for mid, c1 in functional_module_apply(n, curve, eta, state, gens[(j - r) % n]).items():
            s1 = FunctionalModuleState(state.v, mid)
            for tgt, c2 in functional_module_apply(n, curve, eta, s1, gens[(i + r) % n]).items():
                t = c * c1 * c2
                acc[tgt] = acc.get(tgt, 0) + t
                scale = max(scale, abs(t))
    return max(abs(x) for x in acc.values()) / scale


def functional_module_check(n: int, p: int, curve: EllipticCurveParams = DEFAULT_CURVE,
                            eta: complex = 0.13 + 0.07j, samples: int = 10,
                            rng: np.random.Generator | None = None, tol: float = 1e-8,
                            max_index: int = 3) -> VerificationReport:
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    worst = 0.0
    for _ in range(samples):
        v = tuple(complex(x) for x in random_points(rng, 1, p, curve)[0])
        al = tuple(int(x) for x in rng.integers(0, max_index, p))
        i, j = (int(x) for x in rng.choice(n, 2, replace=False))
        worst = max(worst, module_relation_residual(n, curve, eta, FunctionalModuleState(v, al), i, j))
    rep = VerificationReport.from_residual(
        "functional_module", "relations annihilate the functional modules M_{v_1..v_p}",
        {"n": n, "p": p, "eta": eta, "samples": samples}, worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep


# bosonization in degree two

def _D(u: Sequence[complex], a: int, curve) -> complex:
    out = 1.0 + 0j
    for i in range(len(u)):
        if i != a:
            out *= theta1(u[a] - u[i], curve)
    return out


def _sigma(u: Sequence[complex], a: int, n: int, eta: complex) -> list:
    return [x + (n - 2) * eta if i == a else x - 2 * eta for i, x in enumerate(u)]


def bosonization_coefficients(n: int, curve, eta, f, g, u):
    """Both sides of phi_p(f) phi_p(g) = phi_p(f * g), as coefficients of unordered e_a e_b."""
    p = len(u)
    left = {}
    for a in range(p):
        us = _sigma(u, a, n, eta)
        for b in range(p):
            key = tuple(sorted((a, b)))
            left[key] = left.get(key, 0) + f(u[a]) / _D(u, a, curve) * g(us[b]) / _D(us, b, curve)
    fg = qn_product(f, g, n, curve, eta)
    th = lambda x: theta1(x, curve)
    right = {}
    for a in range(p):
        sa = _sigma(u, a, n, eta)
        for b in range(a + 1, p):
            right[(a, b)] = (th(u[a] - u[b]) / th(u[a] - u[b] - n * eta) * fg(u[a], u[b])
                             / (_D(u, a, curve) * _D(sa, b, curve)))
        right[(a, a)] = (th(-n * eta) / th(-2 * n * eta) * fg(u[a], u[a] + n * eta)
                         / (_D(u, a, curve) * _D(sa, a, curve)))
    return left, right


def bosonization_deg2_check(n: int, p: int, curve: EllipticCurveParams = DEFAULT_CURVE,
                            eta: complex = 0.13 + 0.07j, f=None, g=None, samples: int = 10,
                            rng: np.random.Generator | None = None, tol: float = 1e-8) -> VerificationReport:
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    if f is None:
        f = linear_element(rng.normal(size=n) + 1j * rng.normal(size=n), n, curve)
    if g is None:
        g = linear_element(rng.normal(size=n) + 1j * rng.normal(size=n), n, curve)
    th = lambda x: theta1(x, curve)

    def dens(u):
        out = [th(-n * eta), th(-2 * n * eta)]
        for a in range(p):
            out += [_D(u, a, curve), _D(_sigma(u, a, n, eta), a, curve)]
            for b in range(p):
                if a != b:
                    out += [th(u[a] - u[b] - n * eta), _D(_sigma(u, a, n, eta), b, curve)]
        return out

    worst = 0.0
    for _ in range(samples):
        u, _ = sample_generic(rng, lambda gr: [complex(x) for x in random_points(gr, 1, p, curve)[0]], dens)
        left, right = bosonization_coefficients(n, curve, eta, f, g, u)
        scale = max(max(abs(x) for x in left.values()), 1e-300)
        worst = max(worst, max(abs(left[key] - right[key]) for key in left) / scale)
    rep = VerificationReport.from_residual(
        "bosonization_deg2", "bosonization map respects the product in degree two",
        {"n": n, "p": p, "eta": eta, "samples": samples}, worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep


# linear modules of Q_{n,k}

def _eta_vector(terms, n: int, eta: complex) -> np.ndarray:
    q = len(terms)
    return np.array([n - d_det(terms[:j]) - d_det(terms[j + 1:]) for j in range(q)]) * eta


def linear_module_step(params: QnkParams, u: np.ndarray, step: int, generator: int) -> complex:
    """Coefficient of x_generator v_step = c v_{step+1} in the module L_{u_1..u_q}."""
    B = w_basis(params.n, params.k, params.curve)
    ev = _eta_vector(B.fraction.terms, params.n, complex(params.eta))
    return B(generator, np.asarray(u) - step * ev)


def qnk_linear_module_residual(params: QnkParams, u: np.ndarray, i: int, j: int) -> float:
    n, k, eta, curve = params.n, params.k, complex(params.eta), params.curve
    terms = []
    for r in range(n):
        a, b = (j - r) % n, (i + r) % n
        terms.append(qnk_coefficient(n, k, i, j, r, eta, curve)
                     * linear_module_step(params, u, 0, a) * linear_module_step(params, u, 1, b))
    return abs(sum(terms)) / max(abs(t) for t in terms)


def qnk_linear_module_check(params: QnkParams, samples: int = 10, rng: np.random.Generator | None = None,
                            tol: float = 1e-8) -> VerificationReport:
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    B = w_basis(params.n, params.k, params.curve)
    worst = 0.0
    for _ in range(samples):
        u = random_points(rng, 1, B.p, params.curve)[0]
        i, j = (int(x) for x in rng.choice(params.n, 2, replace=False))
        worst = max(worst, qnk_linear_module_residual(params, u, i, j))
    rep = VerificationReport.from_residual(
        "qnk_linear_module", "relations annihilate the linear modules L_{u_1..u_q}",
        {"n": params.n, "k": params.k, "eta": params.eta, "samples": samples}, worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep


# exchange algebras

@dataclass
class ExchangeCoefficients:
    Lambda: complex
    Lambda_steps: list = field(default_factory=list)


def exchange_coefficients(n: int, eta: complex, Ya: np.ndarray, Yb: np.ndarray,
                          curve: EllipticCurveParams = DEFAULT_CURVE) -> ExchangeCoefficients:
    th = lambda x: theta1(x, curve)
    q = len(Ya)
    front = np.exp(-2j * np.pi * n * eta) * th(Ya[0] - Yb[0]) / th(Ya[0] - Yb[0] - n * eta)
    lam = front * th(Ya[-1] - Yb[-1] + n * eta) / th(Ya[-1] - Yb[-1])
    steps = []
    for t in range(1, q):
        steps.append(front * th(n * eta) * th(Ya[t - 1] + Yb[t] - Yb[t - 1] - Ya[t])
                     / (th(Ya[t - 1] - Yb[t - 1]) * th(Yb[t] - Ya[t])))
    return ExchangeCoefficients(complex(lam), [complex(s) for s in steps])


def exchange_psi(params: QnkParams, Ya: np.ndarray, Yb: np.ndarray, i: int, j: int):
    """Terms of the psi coefficient; they sum to zero."""
    n, k, eta, curve = params.n, params.k, complex(params.eta), params.curve
    B = w_basis(n, k, curve)
    t = B.fraction.terms
    q = B.p
    shift = -np.array([d_det(t[:a]) + d_det(t[a + 1:]) for a in range(q)]) * eta
    ex = exchange_coefficients(n, eta, Ya, Yb, curve)
    out = []
    for r in range(n):
        A, C = (i + r) % n, (j - r) % n
        s = B(A, Ya) * B(C, Yb + shift) + ex.Lambda * B(A, Yb) * B(C, Ya + shift)
        for tt in range(1, q):
            X1 = np.concatenate([Yb[:tt], Ya[tt:]])
            X2 = np.concatenate([Ya[:tt], Yb[tt:]]) + shift
            s += ex.Lambda_steps[tt - 1] * B(A, X1) * B(C, X2)
        out.append(qnk_coefficient(n, k, i, j, r, eta, curve) * s)
    return out


def exchange_coeff_identity_check(params: QnkParams, samples: int = 10, rng: np.random.Generator | None = None,
                                  tol: float = 1e-8) -> VerificationReport:
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    q = w_basis(params.n, params.k, params.curve).p
    worst = 0.0
    for _ in range(samples):
        Ya, Yb = random_points(rng, 2, q, params.curve)
        i, j = (int(x) for x in rng.choice(params.n, 2, replace=False))
        terms = exchange_psi(params, Ya, Yb, i, j)
        worst = max(worst, abs(sum(terms)) / max(abs(x) for x in terms))
    rep = VerificationReport.from_residual(
        "exchange_psi", "psi coefficients of the exchange-algebra homomorphism vanish",
        {"n": params.n, "k": params.k, "eta": params.eta, "samples": samples}, worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep


def exchange_image_tensor(params: QnkParams, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Quadratic tensor obtained from one exchange relation of Y_{q'} in the dual variables."""
    n, k, eta, curve = params.n, params.k, complex(params.eta), params.curve
    Bd = w_basis(n, n - k, curve)
    tp, qq = Bd.fraction.terms, Bd.p
    th = lambda x: theta1(x, curve)
    mu = n * eta
    mus = np.array([d_det(tp[:a]) - d_det(tp[a + 1:]) for a in range(qq)]) * eta
    T = np.zeros((n, n), complex)
    wu = [Bd(a, u) for a in range(n)]
    wvm = [Bd(b, v + mus) for b in range(n)]
    wv = [Bd(a, v) for a in range(n)]
    wum = [Bd(b, u + mus) for b in range(n)]
    mixed = []
    for t in range(1, qq):
        X1 = np.concatenate([v[:t], u[t:]])
        X2 = np.concatenate([u[:t], v[t:]]) + mus
        wt = th(mu) * th(v[t - 1] - u[t - 1] + u[t] - v[t]) / (th(v[t - 1] - u[t - 1]) * th(u[t] - v[t]))
        mixed.append((wt, [Bd(a, X1) for a in range(n)], [Bd(b, X2) for b in range(n)]))
    first = th(v[0] - u[0] + mu) / th(v[0] - u[0])
    last = th(v[-1] - u[-1] + mu) / th(v[-1] - u[-1])
    for a in range(n):
        for b in range(n):
            c = first * wu[a] * wvm[b] - last * wv[a] * wum[b]
            for wt, A, C in mixed:
                c -= wt * A[a] * C[b]
            T[(1 - a) % n, (1 - b) % n] += c
    return T.ravel()


def exchange_Y_homomorphism_check(params: QnkParams, samples: int = 10, rng: np.random.Generator | None = None,
                                  tol: float = 1e-8) -> VerificationReport:
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    qq = w_basis(params.n, params.n - params.k, params.curve).p
    span = row_span(qnk_relations(params))
    worst = 0.0
    for _ in range(samples):
        u, v = random_points(rng, 2, qq, params.curve)
        worst = max(worst, membership_distance(exchange_image_tensor(params, u, v), span))
    rep = VerificationReport.from_residual(
        "exchange_Y_image", "image of the exchange relation lies in the relation space",
        {"n": params.n, "k": params.k, "eta": params.eta, "samples": samples}, worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep
