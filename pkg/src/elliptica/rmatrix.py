"""Belavin elliptic R-matrices R_{n,k}(eta)(u) acting on C^n (x) C^n.

The single argument is the difference u - v. Input index (i, j) -> i*n + j is x_i(u) (x) x_j(v);
output index (b, a) -> b*n + a is x_b(v) (x) x_a(u).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .algebras import QnkParams, qnk_relations
from .errors import IllConditioned, PoleAtArgument
from .quadalg import row_span, subspace_compare
from .report import VerificationReport
from .theta import sample_generic, sample_parallelogram, theta_alpha


def _th(params: QnkParams):
    n, curve = params.n, params.curve
    return lambda a, x: theta_alpha(a, x, n, curve)


def r_numerator(params: QnkParams, u: complex) -> np.ndarray:
    """The matrix before division by the scalar p(u - v)."""
    n, k, eta = params.n, params.k, complex(params.eta)
    th = _th(params)
    w = -complex(u)
    den = [th(s, w) for s in range(n)]
    if min(abs(d) for d in den) < 1e-12:
        raise PoleAtArgument(f"theta_s({w}) vanishes")
    num = {a: th(a, w + eta) for a in range(n)}
    kr = [th(k * r, eta) for r in range(n)]
    M = np.zeros((n * n, n * n), complex)
    for i in range(n):
        for j in range(n):
            for r in range(n):
                M[((j - r) % n) * n + (i + r) % n, i * n + j] += (
                    num[(j - i + r * (k - 1)) % n] / (kr[r] * den[(j - i - r) % n]))
    return M


def r_scalar(params: QnkParams, u: complex) -> complex:
    n, eta = params.n, complex(params.eta)
    th = _th(params)
    w = -complex(u)
    top = np.prod([th(s, 0) for s in range(1, n)]) * np.prod([th(s, w + eta) for s in range(n)])
    bottom = np.prod([th(s, eta) for s in range(n)]) * np.prod([th(s, w) for s in range(n)])
    if abs(top) < 1e-300:
        raise PoleAtArgument(f"normalizing scalar vanishes at u = {u}")
    return complex(top / bottom)


def belavin_r(params: QnkParams, u: complex) -> np.ndarray:
    return r_numerator(params, u) / r_scalar(params, u)


@dataclass(frozen=True)
class RMatrixEvaluator:
    params: QnkParams

    def __call__(self, u: complex) -> np.ndarray:
        return belavin_r(self.params, u)


def determinant_formula(params: QnkParams, u: complex) -> complex:
    """(-1)^N e^{2 pi i n^2 N eta} (prod_s theta_s(-u - eta) / prod_s theta_s(-u + eta))^N, N = n(n-1)/2."""
    n, eta = params.n, complex(params.eta)
    th = _th(params)
    w = -complex(u)
    N = n * (n - 1) // 2
    ratio = np.prod([th(s, w - eta) for s in range(n)]) / np.prod([th(s, w + eta) for s in range(n)])
    return complex((-1) ** N * np.exp(2j * np.pi * n * n * N * eta) * ratio ** N)


def _log_determinant_formula(params: QnkParams, u: complex) -> complex:
    n, eta = params.n, complex(params.eta)
    th = _th(params)
    w = -complex(u)
    N = n * (n - 1) // 2
    logs = sum(np.log(complex(th(s, w - eta))) - np.log(complex(th(s, w + eta))) for s in range(n))
    return 1j * np.pi * N + 2j * np.pi * n * n * N * eta + N * logs


def determinant_residual(params: QnkParams, u: complex) -> float:
    """|det R / formula - 1|, computed from logarithms so large |Im eta| cannot overflow."""
    sign, logabs = np.linalg.slogdet(belavin_r(params, u))
    return float(abs(sign * np.exp(logabs - _log_determinant_formula(params, u)) - 1))


def unitarity_residual(params: QnkParams, u: complex) -> float:
    n = params.n
    P = belavin_r(params, u) @ belavin_r(params, -u)
    return float(np.linalg.norm(P - np.eye(n * n)) / np.sqrt(n * n))


def ybe_residual(params: QnkParams, u: complex, v: complex, w: complex) -> float:
    n = params.n
    I = np.eye(n)
    R = lambda x: belavin_r(params, x)
    left = np.kron(R(v - w), I) @ np.kron(I, R(u - w)) @ np.kron(R(u - v), I)
    right = np.kron(I, R(u - v)) @ np.kron(R(u - w), I) @ np.kron(I, R(v - w))
    return float(np.linalg.norm(left - right) / np.linalg.norm(left))


def kernel_at_minus_eta(params: QnkParams, rel: float = 1e-8, min_gap: float = 1e3):
    """Orthonormal basis of ker R(-eta), computed from the numerator matrix; returns (basis, gap)."""
    M = r_numerator(params, -complex(params.eta))
    s = np.linalg.svd(M, compute_uv=False)
    ns = null_space(M, rcond=rel)
    dim = ns.shape[1]
    r = len(s) - dim
    gap = float(s[r - 1] / max(s[r], np.finfo(float).tiny)) if 0 < r < len(s) else np.inf
    if gap < min_gap:
        raise IllConditioned(f"kernel singular gap {gap:.2e} below {min_gap}")
    return ns, gap


def kernel_relation_angle(params: QnkParams) -> float:
    ker, _ = kernel_at_minus_eta(params)
    return subspace_compare(ker, row_span(qnk_relations(params)))


def _pole_free(params: QnkParams, args) -> list:
    th = _th(params)
    out = []
    for x in args:
        out += [th(s, -x) for s in range(params.n)] + [th(s, x) for s in range(params.n)]
    return out


def ybe_sweep(params: QnkParams, samples: int = 20, rng: np.random.Generator | None = None,
              tol: float = 1e-8):
    """Returns (report, rows) where rows hold (n, k, eta, u, v, w, residual) for CSV output."""
    t0 = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    curve = params.curve
    rows, worst = [], 0.0
    for _ in range(samples):
        draw = lambda g: tuple(complex(x) for x in sample_parallelogram(g, 3, curve))
        (u, v, w), _ = sample_generic(rng, draw, lambda s: _pole_free(params, [s[0] - s[1], s[0] - s[2],
                                                                                s[1] - s[2]]), 1e-3)
        res = ybe_residual(params, u, v, w)
        worst = max(worst, res)
        rows.append((params.n, params.k, complex(params.eta), u, v, w, res))
    rep = VerificationReport.from_residual(
        "rmatrix_ybe", "Yang-Baxter equation for the Belavin R-matrix",
        {"n": params.n, "k": params.k, "eta": params.eta, "samples": samples}, worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep, rows
