"""Continued fractions, the d-determinant, the spaces Theta_{n/k} and their duality pairing."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate

import numpy as np

from .errors import BoxTooSmall, InconsistentPairing, InvalidPair
from .report import VerificationReport
from .theta import (DEFAULT_CURVE, TWO_PI_I, EllipticCurveParams, normalized_residual,
                    numerical_rank, sample_generic, theta1, theta_alpha)


@dataclass(frozen=True)
class ContinuedFraction:
    n: int
    k: int
    terms: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.terms)

    def value(self) -> Fraction:
        x = Fraction(self.terms[-1])
        for t in reversed(self.terms[:-1]):
            x = t - 1 / x
        return x


def continued_fraction(n: int, k: int) -> ContinuedFraction:
    """n/k = n_1 - 1/(n_2 - 1/(... - 1/n_p)) with every n_i >= 2."""
    n, k = int(n), int(k)
    if not (1 <= k < n) or math.gcd(n, k) != 1:
        raise InvalidPair(f"need coprime 1 <= k < n, got ({n}, {k})")
    terms = []
    a, b = n, k
    while b:
        m = -(-a // b)
        terms.append(m)
        a, b = b, m * b - a
    return ContinuedFraction(n, k, tuple(terms))


def d_det(terms) -> int:
    """Tridiagonal determinant with diagonal `terms` and off-diagonal -1; d() = 1."""
    cur, prev = 1, 0
    for t in terms:
        cur, prev = int(t) * cur - prev, cur
    return cur


def coprime_pairs(nmax: int, nmin: int = 2):
    for n in range(nmin, nmax + 1):
        for k in range(1, n):
            if math.gcd(n, k) == 1:
                yield n, k


# dual fractions

@dataclass
class DualityData:
    primal: ContinuedFraction
    dual: ContinuedFraction
    pairing_constant: complex | None = None
    spread: float | None = None
    branch: int | None = None
    checks: dict = field(default_factory=dict)


def _staircase(terms) -> list[int]:
    return [s - 2 * a + 1 for a, s in enumerate(accumulate(terms), 1)]


def _staircase_matches(terms, dual_terms) -> bool:
    # n'_1 + ... + n'_a - 2a counts the steps n_1 + ... + n_b - 2b + 1 <= a with b < p
    steps = _staircase(terms)[:-1]
    sums = list(accumulate(dual_terms))
    return all(sums[a - 1] - 2 * a == sum(1 for s in steps if s <= a) for a in range(1, len(dual_terms) + 1))


def dual_fraction(fraction: ContinuedFraction) -> DualityData:
    dual = continued_fraction(fraction.n, fraction.n - fraction.k)
    t, p = fraction.terms, fraction.length
    checks = {
        "length": dual.length == sum(t) - 2 * p + 1,
        "sum_rule": sum(dual.terms) == 2 * sum(t) - 3 * p + 1,
        "transpose": _staircase_matches(t, dual.terms) and _staircase_matches(dual.terms, t),
        "reconstruction": fraction.value() == Fraction(fraction.n, fraction.k)
        and dual.value() == Fraction(dual.n, dual.k),
    }
    checks["involution"] = continued_fraction(dual.n, dual.n - dual.k) == fraction
    return DualityData(fraction, dual, checks=checks)


# the w basis

@dataclass
class WBasis:
    fraction: ContinuedFraction
    curve: EllipticCurveParams
    fourier_box: int
    phase_constant: complex
    m: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    _support: list = field(repr=False, default_factory=list)
    _logcoef: list = field(repr=False, default_factory=list)

    @property
    def n(self) -> int:
        return self.fraction.n

    @property
    def k(self) -> int:
        return self.fraction.k

    @property
    def p(self) -> int:
        return self.fraction.length

    def _reduce(self, z: np.ndarray):
        """Move every Im z_nu into [0, Im tau) using the defining quasi-periodicity."""
        tau, t = self.curve.tau, self.curve.tau.imag
        z = z - np.round(z.real - z.imag / t * tau.real)
        logf = np.zeros(z.shape[0], complex)
        terms = self.fraction.terms
        for nu in range(self.p):
            j = np.floor(z[:, nu].imag / t)
            z[:, nu] -= j * tau
            zl = z[:, nu - 1] if nu > 0 else 0
            zr = z[:, nu + 1] if nu < self.p - 1 else 0
            nn, dl = terms[nu], 1 if nu == 0 else 0
            logf += 1j * np.pi * j * nn - TWO_PI_I * (
                j * nn * z[:, nu] + nn * tau * j * (j - 1) / 2 - j * (zl + zr) - j * (dl - 1) * tau)
        return z - np.round(z.real), logf

    def __call__(self, alpha: int, z) -> np.ndarray | complex:
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        z = np.atleast_2d(z).copy()
        a = int(alpha) % self.n
        z, logf = self._reduce(z)
        G = self._support[a]
        S = np.exp(self._logcoef[a][None, :] + TWO_PI_I * (z @ G.T)).sum(1)
        out = np.exp(logf) * S
        return complex(out[0]) if single else out

    def t_1n(self, alpha: int, z):
        return self(alpha, np.asarray(z, dtype=complex) + self.r)

    def t_taun(self, alpha: int, z):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        return np.exp(TWO_PI_I * (z[:, 0] + self.phase_constant)) * self(alpha, z + self.r * self.curve.tau)

    def relation_residuals(self, points: np.ndarray) -> dict[str, float]:
        """Eigen and shift relations of the two translation operators, plus per-variable quasi-periodicity."""
        n, k, tau = self.n, self.k, self.curve.tau
        z = np.atleast_2d(points)
        eig = shift = qp = 0.0
        for a in range(n):
            w = self(a, z)
            scale = np.maximum(1.0, np.abs(w))
            eig = max(eig, float(np.max(np.abs(self.t_1n(a, z) - np.exp(TWO_PI_I * k * a / n) * w) / scale)))
            nxt = self(a + 1, z)
            shift = max(shift, float(np.max(np.abs(self.t_taun(a, z) - nxt) / np.maximum(1.0, np.abs(nxt)))))
            for nu in range(self.p):
                e = np.zeros(self.p)
                e[nu] = 1
                qp = max(qp, float(np.max(np.abs(self(a, z + e) - w) / scale)))
                f = quasi_factor(self.fraction.terms, z, nu, tau)
                wt = self(a, z + e * tau)
                qp = max(qp, float(np.max(np.abs(wt - f * w) / np.maximum(scale, np.abs(wt)))))
        return {"eigen": eig, "shift": shift, "quasi_periodicity": qp}

    def numerical_dimension(self, rng: np.random.Generator | None = None) -> int:
        rng = rng or np.random.default_rng(0)
        z = random_points(rng, self.n, self.p, self.curve)
        return numerical_rank(np.array([self(a, z) for a in range(self.n)]))


def quasi_factor(terms, z: np.ndarray, nu: int, tau: complex) -> np.ndarray:
    """Multiplier of f(z + tau e_nu) / f(z) for f in Theta_{n/k}."""
    p = len(terms)
    zl = z[:, nu - 1] if nu >= 1 else 0
    zr = z[:, nu + 1] if nu + 1 < p else 0
    dl = 1 if nu == 0 else 0
    return (-1) ** terms[nu] * np.exp(-TWO_PI_I * (terms[nu] * z[:, nu] - zl - zr - (dl - 1) * tau))


def random_points(rng: np.random.Generator, count: int, p: int,
                  curve: EllipticCurveParams = DEFAULT_CURVE) -> np.ndarray:
    a = rng.uniform(-0.5, 0.5, (count, p))
    b = rng.uniform(0, 1, (count, p))
    return a + b * curve.tau


class _Coefficients:
    """Closed-form Fourier coefficients of the w basis.

    log a_gamma = pi i tau g.M^-1.g + 2 pi i tau c.g + pi i g0.g, with M the tridiagonal matrix of
    the fraction, c = M^-1 b, b_nu = 1 - [nu = 1] - n_nu/2 and g0 = M^-1 (n_1, ..., n_p).
    """

    def __init__(self, fraction: ContinuedFraction, tau: complex):
        t = np.array(fraction.terms, float)
        p = len(t)
        M = np.diag(t)
        for i in range(p - 1):
            M[i, i + 1] = M[i + 1, i] = -1
        self.M, self.Mi = M, np.linalg.inv(M)
        self.b = np.array([1 - (a == 0) - t[a] / 2 for a in range(p)])
        self.c = self.Mi @ self.b
        self.g = self.Mi @ t
        self.m = np.array([d_det(fraction.terms[a + 1:]) for a in range(p)], float)
        self.r = self.m / fraction.n
        self.tau, self.n, self.p = tau, fraction.n, p
        self.phi = 0.0
        # phi makes T_{tau/n}^n = 1: the gamma = 0 coefficient of w_n equals that of w_0 (which is 1)
        self.phi = -self.log(self.n, np.zeros((1, p)))[0] / (TWO_PI_I * self.n)

    def _logq(self, G):
        Q = np.einsum("ij,jk,ik->i", G, self.Mi, G)
        return 1j * np.pi * self.tau * Q + TWO_PI_I * self.tau * (G @ self.c) + 1j * np.pi * (G @ self.g)

    def log(self, alpha: int, gamma: np.ndarray) -> np.ndarray:
        e1 = np.zeros(self.p)
        e1[0] = 1
        G = gamma - alpha * e1
        return (self._logq(G) + TWO_PI_I * (alpha * self.phi + alpha * (alpha - 1) / 2 * self.r[0] * self.tau)
                + TWO_PI_I * self.tau * alpha * (G @ self.r))


BOX_POINT_CAP = 2_000_000


def build_w_basis(fraction: ContinuedFraction, curve: EllipticCurveParams = DEFAULT_CURVE,
                  box: int | None = None, decay: float = 1e-17, keep: float = 1e-20) -> WBasis:
    """Fourier-series basis of Theta_{n/k}; box=None grows the radius until the boundary is negligible."""
    coef = _Coefficients(fraction, curve.tau)
    n, k, p = fraction.n, fraction.k, fraction.length
    center = np.round(-coef.b - coef.M @ np.full(p, 0.5)).astype(int)
    radius = box if box is not None else 4
    t = curve.tau.imag
    while True:
        if (2 * radius + 1) ** p > BOX_POINT_CAP:
            raise BoxTooSmall(f"box radius {radius} exceeds the point cap for p={p}")
        offsets = np.array(list(itertools.product(range(-radius, radius + 1), repeat=p)), int)
        G = offsets + center
        on_edge = np.abs(offsets).max(1) == radius
        cls = (G @ coef.m.astype(int)) % n
        support, logs, ok = [], [], True
        for a in range(n):
            sel = cls == (k * a) % n
            Ga = G[sel].astype(float)
            la = coef.log(a, Ga)
            # largest possible size of each term once Im z lies in [0, Im tau)
            mag = la.real + 2 * np.pi * t * np.maximum(-Ga, 0).sum(1)
            top = mag.max()
            if on_edge[sel].any() and mag[on_edge[sel]].max() > top + math.log(decay):
                ok = False
                break
            kept = mag > top + math.log(keep)
            support.append(Ga[kept])
            logs.append(la[kept])
        if ok:
            break
        if box is not None:
            raise BoxTooSmall(f"Fourier box radius {box} leaves coefficients above {decay}")
        radius += 2
    return WBasis(fraction, curve, radius, complex(coef.phi), coef.m, coef.r, support, logs)


_BASIS_CACHE: dict = {}


def w_basis(n: int, k: int, curve: EllipticCurveParams = DEFAULT_CURVE) -> WBasis:
    key = (n, k, curve)
    if key not in _BASIS_CACHE:
        _BASIS_CACHE[key] = build_w_basis(continued_fraction(n, k), curve)
    return _BASIS_CACHE[key]


# identities relating theta_alpha and the w basis

def _theta_constants(n: int, curve: EllipticCurveParams) -> complex:
    return complex(np.prod([theta1(j / n, curve) for j in range(1, n)])) / n


def w_exchange_terms(B: WBasis, alpha: int, beta: int, eta, u, v, y, z):
    n, k, p, curve = B.n, B.k, B.p, B.curve
    th = lambda s, x: theta_alpha(s, x, n, curve)
    t = lambda x: theta1(x, curve)
    m = B.m
    ell = np.array([d_det(B.fraction.terms[:a]) for a in range(p)]) * eta
    left = [t(y[0] - z[0] + n * v - n * u) / (t(n * v - n * u) * t(y[0] - z[0]))
            * B(alpha, y + m * u) * B(beta, z + m * v + ell)]
    for s in range(1, p):
        A = np.concatenate([z[:s], y[s:]])
        C = np.concatenate([y[:s], z[s:]])
        left.append(t(z[s - 1] - y[s - 1] + y[s] - z[s]) / (t(z[s - 1] - y[s - 1]) * t(y[s] - z[s]))
                    * B(alpha, A + m * u) * B(beta, C + m * v + ell))
    left.append(t(z[-1] - y[-1] + n * eta) / (t(z[-1] - y[-1]) * t(n * eta))
                * B(alpha, z + m * u) * B(beta, y + m * v + ell))
    K = _theta_constants(n, curve)
    right = [K * th(beta - alpha + r * (k - 1), v - u + eta) / (th(r * k, eta) * th(beta - alpha - r, v - u))
             * B(beta - r, y + m * v) * B(alpha + r, z + m * u + ell) for r in range(n)]
    return left, right


def w_exchange_diagonal_terms(B: WBasis, alpha: int, beta: int, eta, y, z):
    n, k, p, curve = B.n, B.k, B.p, B.curve
    th = lambda s, x: theta_alpha(s, x, n, curve)
    t = lambda x: theta1(x, curve)
    m = B.m
    ell = np.array([d_det(B.fraction.terms[:a]) for a in range(p)]) * eta
    left = [t(y[0] - z[0] - n * eta) / (t(-n * eta) * t(y[0] - z[0])) * B(alpha, y + m * eta) * B(beta, z + ell)]
    for s in range(1, p):
        A = np.concatenate([z[:s], y[s:]])
        C = np.concatenate([y[:s], z[s:]])
        left.append(t(z[s - 1] - y[s - 1] + y[s] - z[s]) / (t(z[s - 1] - y[s - 1]) * t(y[s] - z[s]))
                    * B(alpha, A + m * eta) * B(beta, C + ell))
    left.append(t(z[-1] - y[-1] + n * eta) / (t(z[-1] - y[-1]) * t(n * eta)) * B(alpha, z + m * eta) * B(beta, y + ell))
    K = _theta_constants(n, curve)
    right = [K * th(beta - alpha + r * (k - 1), 0) / (th(r * k, eta) * th(beta - alpha - r, -eta))
             * B(beta - r, y) * B(alpha + r, z + m * eta + ell) for r in range(n)]
    return left, right


def _identity_check(which: str, fraction: ContinuedFraction, curve: EllipticCurveParams, samples: int,
                    rng: np.random.Generator | None, tol: float, eps: float = 1e-3) -> VerificationReport:
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    B = w_basis(fraction.n, fraction.k, curve)
    n, k, p = B.n, B.k, B.p
    t = lambda x: theta1(x, curve)
    th = lambda s, x: theta_alpha(s, x, n, curve)

    def draw(g):
        al, be = (int(x) for x in g.integers(n, size=2))
        eta, u, v = random_points(g, 1, 3, curve)[0]
        y, z = random_points(g, 2, p, curve)
        return al, be, eta, u, v, y, z

    def dens(s):
        al, be, eta, u, v, y, z = s
        out = [t(y[0] - z[0]), t(z[-1] - y[-1]), t(n * eta)]
        out += [t(z[j - 1] - y[j - 1]) * t(y[j] - z[j]) for j in range(1, p)]
        if which == "exchange":
            out += [t(n * v - n * u)] + [th(r * k, eta) * th(be - al - r, v - u) for r in range(n)]
        else:
            out += [th(r * k, eta) * th(be - al - r, -eta) for r in range(n)]
        return out

    worst, rejected = 0.0, 0
    for _ in range(samples):
        (al, be, eta, u, v, y, z), rej = sample_generic(rng, draw, dens, eps)
        rejected += rej
        if which == "exchange":
            left, right = w_exchange_terms(B, al, be, eta, u, v, y, z)
        else:
            left, right = w_exchange_diagonal_terms(B, al, be, eta, y, z)
        worst = max(worst, normalized_residual(sum(left), sum(right), left + right))
    statement = ("exchange identity between theta_alpha and the w basis" if which == "exchange"
                 else "coincidence specialization u = v + eta of the w-basis exchange identity")
    rep = VerificationReport.from_residual(
        f"w_{which}", statement, {"n": n, "k": k, "tau": curve.tau, "samples": samples},
        worst, tol, rejected=rejected, fourier_box=B.fourier_box)
    rep.wall_time = time.perf_counter() - t0
    return rep


def verify_w_exchange(fraction: ContinuedFraction, curve: EllipticCurveParams = DEFAULT_CURVE,
                       samples: int = 20, rng: np.random.Generator | None = None,
                       tol: float = 1e-8) -> VerificationReport:
    return _identity_check("exchange", fraction, curve, samples, rng, tol)


def verify_w_exchange_diagonal(fraction: ContinuedFraction, curve: EllipticCurveParams = DEFAULT_CURVE,
                       samples: int = 20, rng: np.random.Generator | None = None,
                       tol: float = 1e-8) -> VerificationReport:
    return _identity_check("exchange_diagonal", fraction, curve, samples, rng, tol)


# the duality pairing

def delta_function(n: int, k: int, z, zp, curve: EllipticCurveParams = DEFAULT_CURVE) -> complex:
    """Product formula for the canonical element of Theta_{n/k} (x) Theta_{n/(n-k)}."""
    t = continued_fraction(n, k).terms
    tp = continued_fraction(n, n - k).terms
    p, pp = len(t), len(tp)
    th = lambda x: theta1(x, curve)
    out = np.exp(TWO_PI_I * zp[0]) * th(z[0] - zp[0]) * th(z[p - 1] + zp[pp - 1])
    for a in range(1, pp):
        out *= th(zp[a - 1] - zp[a] + z[sum(tp[:a]) - 2 * a])
    for b in range(1, p):
        out *= th(z[b - 1] - z[b] + zp[sum(t[:b]) - 2 * b])
    return complex(out)


def _pairing_sum(B: WBasis, Bd: WBasis, s: int, z, zp) -> complex:
    n = B.n
    return sum(np.exp(TWO_PI_I * s * a / n) * B(a, z) * Bd(1 - a, zp) for a in range(n))


def delta_pairing(fraction: ContinuedFraction, curve: EllipticCurveParams = DEFAULT_CURVE,
                  samples: int = 50, rng: np.random.Generator | None = None, tol: float = 1e-8,
                  calibration: int = 4) -> DualityData:
    """Estimate c_{n,k} as product formula / basis sum.

    The two bases are each fixed only up to an n-th root of unity in their shift operator. A branch
    s in Z/n (weight e^{2 pi i s alpha / n} on the alpha term) is selected on separate calibration
    points; the spread is then measured on fresh points.
    """
    rng = rng or np.random.default_rng(0)
    n, k = fraction.n, fraction.k
    data = dual_fraction(fraction)
    B, Bd = w_basis(n, k, curve), w_basis(n, n - k, curve)
    p, pp = B.p, Bd.p

    def spread(pts, s):
        rat = np.array([delta_function(n, k, z, zp, curve) / _pairing_sum(B, Bd, s, z, zp) for z, zp in pts])
        return float(np.std(rat) / abs(rat.mean())), complex(rat.mean())

    cal = [(random_points(rng, 1, p, curve)[0], random_points(rng, 1, pp, curve)[0]) for _ in range(calibration)]
    branch = min(range(n), key=lambda s: spread(cal, s)[0])
    pts = [(random_points(rng, 1, p, curve)[0], random_points(rng, 1, pp, curve)[0]) for _ in range(samples)]
    sp, mean = spread(pts, branch)

    t = fraction.terms
    td = data.dual.terms
    r = np.array([d_det(t[:a]) for a in range(p)]) / n
    rd = np.array([d_det(td[:a]) for a in range(pp)]) / n
    tau = curve.tau
    shift_res = proj_res = 0.0
    zeta = np.exp(TWO_PI_I / n)
    for z, zp in pts[:10]:
        D0 = delta_function(n, k, z, zp, curve)
        Dt = delta_function(n, k, z + r * tau, zp + rd * tau, curve)
        expected = -np.exp(TWO_PI_I * (tau / n - z[-1] - zp[-1])) * D0
        shift_res = max(shift_res, abs(Dt - expected) / max(abs(Dt), abs(expected), 1.0))
        vals = [delta_function(n, k, z + j * r, zp + j * rd, curve) for j in range(n)]
        for mm in range(n):
            if mm == 1 % n and n > 1:
                continue
            P = sum(zeta ** (-j * mm) * vals[j] for j in range(n)) / n
            proj_res = max(proj_res, abs(P) / max(abs(D0), 1.0))
    data.pairing_constant = mean
    data.spread = sp
    data.branch = branch
    data.checks.update({"tau_shift_residual": shift_res, "off_pairing_residual": proj_res, "samples": samples})
    if not sp < tol:
        raise InconsistentPairing(f"ratio spread {sp:.3e} exceeds {tol:.1e} for ({n},{k})")
    return data
