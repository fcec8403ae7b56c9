"""The acceptance suite: ten groups of checks, each returning VerificationReports."""

from __future__ import annotations

import itertools
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import algebras as alg
from .algebras import QnkParams, qnk_relations
from .errors import DegenerateEta, EllipticaError
from .modules import (bosonization_deg2_check, exchange_coeff_identity_check, exchange_Y_homomorphism_check,
                      functional_module_check, projective_distance, q3_linear_module_check,
                      qnk_linear_module_check)
from .multitheta import (continued_fraction, coprime_pairs, delta_pairing, dual_fraction, verify_w_exchange,
                         verify_w_exchange_diagonal)
from .poisson import c3_identity_check, psi_p_check, qn_bracket_checks
from .quadalg import RelationSpace, central_elements, hilbert_dims
from .report import VerificationReport, check_rng, reports_to_json
from .rmatrix import (_pole_free, determinant_residual, kernel_at_minus_eta, kernel_relation_angle,
                      unitarity_residual, ybe_sweep)
from .theta import (EllipticCurveParams, check_translation_commutation, natural_basis, numerical_rank,
                    quasi_periodicity_residual, sample_generic, sample_parallelogram, series_product_agreement,
                    ThetaBasis, verify_one_var_identity)


@dataclass(frozen=True)
class SuiteConfig:
    tau: complex = 0.3 + 1.1j
    eta: complex = 0.17 + 0.08j
    n: int = 3
    k: int = 1
    truncation: int = 30
    fourier_box: int | None = None
    tol: float | None = None
    samples: int | None = None
    seed: int = 20240601
    amax: int = 4

    def __post_init__(self):
        if not complex(self.tau).imag > 0:
            raise ValueError("tau must lie in the upper half plane")
        if self.truncation < 1 or self.amax < 2:
            raise ValueError("truncation must be >= 1 and amax >= 2")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def curve(self) -> EllipticCurveParams:
        return EllipticCurveParams(complex(self.tau), int(self.truncation))

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else float(self.tol)

    def count(self, default: int) -> int:
        return default if self.samples is None else int(self.samples)

    def to_dict(self) -> dict:
        return asdict(self)


def _exact(name: str, statement: str, params: dict, mismatches: int, **details) -> VerificationReport:
    return VerificationReport.from_residual(name, statement, params, float(mismatches), 0.0, **details)


def _timed(fn):
    def wrapped(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.wall_time = time.perf_counter() - t0
        return rep
    return wrapped


def validate_eta(cfg: SuiteConfig) -> None:
    """Reject a lattice eta up front (raises DegenerateEta)."""
    QnkParams(max(cfg.n, 2), 1, cfg.eta, cfg.curve)


#  1. theta foundations

def criterion_theta(cfg: SuiteConfig) -> list[VerificationReport]:
    curve = cfg.curve
    out = []
    rng = check_rng(cfg.seed, "theta.series")
    out.append(VerificationReport.from_residual(
        "theta_series_product", "series and product forms of theta agree",
        {"samples": cfg.count(100)}, series_product_agreement(curve, cfg.count(100), rng), cfg.tolerance(1e-10)))
    for n in range(1, 9):
        rng = check_rng(cfg.seed, f"theta.n{n}")
        z = sample_parallelogram(rng, cfg.count(30), curve)
        classes = [None, 0.0, 0.5, 0.25 + 0.1j]
        qp = max(quasi_periodicity_residual(ThetaBasis(curve, n, c), z) for c in classes)
        out.append(VerificationReport.from_residual(
            "theta_quasi_periodicity", "theta_alpha and Theta_{n,c} bases are quasi-periodic",
            {"n": n, "classes": [c for c in classes if c is not None]}, qp, cfg.tolerance(1e-9)))
        pts = sample_parallelogram(rng, 3 * n, curve)
        ranks = [numerical_rank(ThetaBasis(curve, n, c).matrix(pts)) for c in classes]
        out.append(_exact("theta_dimension", "dim Theta_{n,c} = n by a rank test", {"n": n},
                          sum(r != n for r in ranks), ranks=ranks))
        if n > 1:
            out.append(check_translation_commutation(natural_basis(n, curve), cfg.count(20), rng,
                                                     cfg.tolerance(1e-9)))
    return out


#  2. identities

IDENTITY_PAIRS = [(3, 1), (4, 1), (5, 2), (5, 3), (7, 3)]
ONE_VARIABLE_IDENTITIES = ("multiplication", "order_three", "exchange", "exchange_diagonal")


def criterion_identities(cfg: SuiteConfig) -> list[VerificationReport]:
    curve, out = cfg.curve, []
    for ident in ONE_VARIABLE_IDENTITIES:
        for n in ((3,) if ident == "order_three" else (2, 3, 4, 5)):
            rng = check_rng(cfg.seed, f"identity.{ident}.n{n}")
            out.append(verify_one_var_identity(ident, n, curve, cfg.count(100), rng, cfg.tolerance(1e-8)))
    for n, k in IDENTITY_PAIRS:
        f = continued_fraction(n, k)
        out.append(verify_w_exchange(f, curve, cfg.count(20), check_rng(cfg.seed, f"w_exchange.{n}.{k}"),
                                      cfg.tolerance(1e-8)))
        out.append(verify_w_exchange_diagonal(f, curve, cfg.count(20), check_rng(cfg.seed, f"w_exchange_diagonal.{n}.{k}"),
                                      cfg.tolerance(1e-8)))
    return out


#  3. PBW dimensions

MIN_GAP = 1e3


def generic_etas(cfg: SuiteConfig, count: int = 3) -> list[complex]:
    rng = check_rng(cfg.seed, "pbw.eta")
    etas = [complex(cfg.eta)]
    while len(etas) < count:
        e = complex(rng.uniform(0.05, 0.45) + 1j * rng.uniform(0.05, 0.45) * cfg.curve.tau.imag)
        etas.append(round(e.real, 6) + 1j * round(e.imag, 6))
    return etas


@_timed
def pbw_report(name: str, L: RelationSpace, amax: int, params: dict) -> VerificationReport:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = hilbert_dims(L, amax)
    gap = min(rep.sigma_gap)
    mismatches = sum(d != e for d, e in zip(rep.dims, rep.expected)) + int(not gap >= MIN_GAP)
    return _exact(name, "graded dimensions coincide with those of the polynomial ring", params, mismatches,
                  dims=rep.dims, expected=rep.expected, min_sigma_gap=gap, rank=L.rank())


def criterion_pbw(cfg: SuiteConfig) -> list[VerificationReport]:
    curve, out = cfg.curve, []
    for n, k in coprime_pairs(5):
        for eta in generic_etas(cfg):
            L = qnk_relations(QnkParams(n, k, eta, curve))
            out.append(pbw_report("pbw_qnk", L, cfg.amax, {"n": n, "k": k, "eta": eta}))
    rng = check_rng(cfg.seed, "pbw.others")
    qm = np.exp(2j * np.pi * rng.uniform(size=(4, 4))) * rng.uniform(0.5, 2.0, size=(4, 4))
    out.append(pbw_report("pbw_skew", alg.skew_polynomial_relations(qm), cfg.amax, {"n": 4}))
    out.append(pbw_report("pbw_heisenberg", alg.lie_projectivization_relations(alg.heisenberg_constants()),
                          cfg.amax, {"n": 4}))
    out.append(pbw_report("pbw_sl2", alg.lie_projectivization_relations(alg.sl2_constants()), cfg.amax,
                          {"n": 4}))
    J = alg.random_sklyanin_J(rng)
    out.append(pbw_report("pbw_sklyanin", alg.sklyanin_relations(*J), cfg.amax, {"J": list(J)}))
    out.append(pbw_report("pbw_ogievetsky", alg.ogievetsky_relations(), cfg.amax, {"n": 3}))
    return out


#  4. central elements

def cubic_tensor(kinv: complex) -> np.ndarray:
    """x_0^3 + x_1^3 + x_2^3 + k x_0 x_1 x_2 as a symmetric tensor."""
    T = np.zeros((3, 3, 3), complex)
    for i in range(3):
        T[i, i, i] = 1
    for perm in itertools.permutations(range(3)):
        T[perm] = kinv / 6
    return T.ravel()


def _central(name, statement, L, degree, expected, params, tol):
    t0 = time.perf_counter()
    rep = central_elements(L, degree)
    worst = max(rep.residuals, default=0.0)
    r = VerificationReport.from_residual(
        name, statement, params, float(abs(rep.nullspace_dim - expected)) + float(not worst < tol), 0.0,
        nullspace_dim=rep.nullspace_dim, expected=expected, commutator_residual=worst, sigma_gap=rep.sigma_gap)
    r.wall_time = time.perf_counter() - t0
    return r, rep


def criterion_central(cfg: SuiteConfig) -> list[VerificationReport]:
    curve, out = cfg.curve, []
    _, _, L3, _ = alg.q3_from_curve(curve, cfg.eta)
    out.append(_central("central_q3", "Q_3 has exactly one cubic central element", L3, 3, 1,
                        {"eta": cfg.eta}, 1e-7)[0])
    t0 = time.perf_counter()
    _, _, Ls, kinv = alg.q3_from_curve(curve, 1e-3)
    rep = central_elements(Ls, 3)
    dist = projective_distance(rep.basis[:, 0], cubic_tensor(kinv)) if rep.nullspace_dim == 1 else np.inf
    r = VerificationReport.from_residual(
        "central_q3_limit", "central cubic tends to the cubic of the curve as eta -> 0",
        {"eta": 1e-3}, dist, 1e-2, k=kinv, nullspace_dim=rep.nullspace_dim)
    r.wall_time = time.perf_counter() - t0
    out.append(r)
    L4 = qnk_relations(QnkParams(4, 1, cfg.eta, curve))
    out.append(_central("central_q4", "Q_4 has exactly two quadratic central elements", L4, 2, 2,
                        {"eta": cfg.eta}, 1e-7)[0])
    # recorded, not asserted
    t0 = time.perf_counter()
    og = central_elements(alg.ogievetsky_relations(), 3)
    r = VerificationReport("central_ogievetsky_record", "cubic central elements of the three-generator algebra",
                           {"degree": 3}, 0.0, 0.0, True, details={"nullspace_dim": og.nullspace_dim,
                                                                   "recorded_only": True})
    r.wall_time = time.perf_counter() - t0
    out.append(r)
    return out


#  5. R-matrix

def criterion_rmatrix(cfg: SuiteConfig) -> list[VerificationReport]:
    curve, out = cfg.curve, []
    for n, k in coprime_pairs(4):
        P = QnkParams(n, k, cfg.eta, curve)
        rng = check_rng(cfg.seed, f"rmatrix.{n}.{k}")
        out.append(ybe_sweep(P, cfg.count(20), rng, cfg.tolerance(1e-8))[0])
        t0 = time.perf_counter()
        uni = det = 0.0
        for _ in range(cfg.count(20)):
            u, _ = sample_generic(rng, lambda g: complex(sample_parallelogram(g, None, curve)),
                                  lambda x: _pole_free(P, [x, x + P.eta, x - P.eta]), 1e-3)
            uni = max(uni, unitarity_residual(P, u))
            det = max(det, determinant_residual(P, u))
        params = {"n": n, "k": k, "eta": cfg.eta, "samples": cfg.count(20)}
        r = VerificationReport.from_residual("rmatrix_unitarity", "R(u) R(-u) = 1", params, uni,
                                             cfg.tolerance(1e-8))
        r.wall_time = (time.perf_counter() - t0) / 2
        out.append(r)
        r = VerificationReport.from_residual("rmatrix_determinant", "closed form of det R(u)", params, det,
                                             cfg.tolerance(1e-7))
        r.wall_time = (time.perf_counter() - t0) / 2
        out.append(r)
    for n, k in coprime_pairs(5):
        P = QnkParams(n, k, cfg.eta, curve)
        t0 = time.perf_counter()
        ker, gap = kernel_at_minus_eta(P)
        angle = kernel_relation_angle(P)
        expected = n * (n - 1) // 2
        r = VerificationReport.from_residual(
            "rmatrix_kernel", "ker R(-eta) is the relation space", {"n": n, "k": k, "eta": cfg.eta},
            angle if ker.shape[1] == expected else np.inf, cfg.tolerance(1e-7),
            kernel_dim=ker.shape[1], expected_dim=expected, sigma_gap=gap)
        r.wall_time = time.perf_counter() - t0
        out.append(r)
    return out


#  6. representations

def criterion_modules(cfg: SuiteConfig) -> list[VerificationReport]:
    curve, tol, out = cfg.curve, cfg.tolerance(1e-8), []
    for n in (3, 4, 5):
        for p in (1, 2, 3):
            out.append(functional_module_check(n, p, curve, cfg.eta, cfg.count(10),
                                               check_rng(cfg.seed, f"fmod.{n}.{p}"), tol))
    for n, k in [(5, 2), (5, 3), (7, 3)]:
        out.append(qnk_linear_module_check(QnkParams(n, k, cfg.eta, curve), cfg.count(10),
                                           check_rng(cfg.seed, f"lmod.{n}.{k}"), tol))
    for n, p in [(3, 1), (3, 2), (4, 3), (5, 2)]:
        out.append(bosonization_deg2_check(n, p, curve, cfg.eta, samples=cfg.count(10),
                                           rng=check_rng(cfg.seed, f"bos.{n}.{p}"), tol=tol))
    out.append(q3_linear_module_check(curve, cfg.eta, 5, cfg.count(5), check_rng(cfg.seed, "q3mod"), tol))
    return out


#  7. exchange algebras

def criterion_exchange(cfg: SuiteConfig) -> list[VerificationReport]:
    curve, tol, out = cfg.curve, cfg.tolerance(1e-8), []
    for n, k in [(3, 2), (5, 2)]:
        P = QnkParams(n, k, cfg.eta, curve)
        out.append(exchange_coeff_identity_check(P, cfg.count(10), check_rng(cfg.seed, f"psi.{n}.{k}"), tol))
        out.append(exchange_Y_homomorphism_check(P, cfg.count(10), check_rng(cfg.seed, f"Y.{n}.{k}"), tol))
    return out


#  8. duality

def criterion_duality(cfg: SuiteConfig) -> list[VerificationReport]:
    curve, out = cfg.curve, []
    for n, k in [(3, 1), (5, 2)]:
        t0 = time.perf_counter()
        tol = cfg.tolerance(1e-8)
        try:
            d = delta_pairing(continued_fraction(n, k), curve, cfg.count(50), check_rng(cfg.seed, f"delta.{n}.{k}"),
                              tol)
            spread, extra = d.spread, {"c": d.pairing_constant, "branch": d.branch,
                                       "tau_shift_residual": d.checks["tau_shift_residual"],
                                       "off_pairing_residual": d.checks["off_pairing_residual"]}
        except EllipticaError as exc:
            spread, extra = np.inf, {"error": str(exc)}
        r = VerificationReport.from_residual("duality_constant", "Delta_{n,k} is a constant multiple of the "
                                             "canonical pairing", {"n": n, "k": k, "samples": cfg.count(50)},
                                             spread, tol, **extra)
        r.wall_time = time.perf_counter() - t0
        out.append(r)
    t0 = time.perf_counter()
    failures = []
    count = 0
    for n, k in coprime_pairs(30):
        count += 1
        checks = dual_fraction(continued_fraction(n, k)).checks
        bad = [name for name, ok in checks.items() if not ok]
        if bad:
            failures.append([n, k, bad])
    r = _exact("dual_fraction_combinatorics", "lengths, sum rule, transpose diagrams and involution of "
               "dual continued fractions", {"nmax": 30, "pairs": count}, len(failures), failures=failures)
    r.wall_time = time.perf_counter() - t0
    out.append(r)
    return out


#  9. Poisson

def criterion_poisson(cfg: SuiteConfig) -> list[VerificationReport]:
    curve, out = cfg.curve, []
    rng = check_rng(cfg.seed, "poisson.k")
    ks = [complex(*rng.normal(size=2)) for _ in range(20)]
    out.append(c3_identity_check(ks, 0.0))
    for n in (3, 5):
        t0 = time.perf_counter()
        res = qn_bracket_checks(n, curve, cfg.count(3), check_rng(cfg.seed, f"qnbracket.{n}"),
                                which=("antisymmetry", "self", "jacobi"))
        dt = (time.perf_counter() - t0) / 3
        for key, tol, statement in [("antisymmetry", 1e-8, "the q_n bracket is antisymmetric"),
                                    ("self", 1e-8, "{f, f} = 0"),
                                    ("jacobi", 1e-4, "Jacobi identity for the q_n bracket")]:
            r = VerificationReport.from_residual(f"qn_bracket_{key}", statement, {"n": n, "h": 1e-3}, res[key],
                                                 cfg.tolerance(tol) if key in ("antisymmetry", "self") else tol)
            r.wall_time = dt
            out.append(r)
    for n, p in [(3, 1), (5, 2)]:
        out.append(psi_p_check(n, p, curve, cfg.count(3), check_rng(cfg.seed, f"psi_p.{n}.{p}"), 1e-4))
    return out


# 10. determinism

DETERMINISM_PROBE = ("theta", "rmatrix", "duality")


def criterion_determinism(cfg: SuiteConfig) -> list[VerificationReport]:
    """Run a probe subset twice with the same config and seed and compare the JSON bytes."""
    t0 = time.perf_counter()
    probe = replace(cfg, samples=cfg.samples or 5)
    first = run_suite(probe, DETERMINISM_PROBE).to_json()
    second = run_suite(probe, DETERMINISM_PROBE).to_json()
    wrong = sum(a != b for a, b in zip(first.encode(), second.encode())) + abs(len(first) - len(second))
    r = _exact("determinism", "identical config and seed give byte-identical JSON",
               {"probe": list(DETERMINISM_PROBE), "samples": probe.samples}, wrong, bytes=len(first))
    r.wall_time = time.perf_counter() - t0
    return [r]


CRITERIA = {
    "theta": (1, criterion_theta),
    "identities": (2, criterion_identities),
    "pbw": (3, criterion_pbw),
    "central": (4, criterion_central),
    "rmatrix": (5, criterion_rmatrix),
    "modules": (6, criterion_modules),
    "exchange": (7, criterion_exchange),
    "duality": (8, criterion_duality),
    "poisson": (9, criterion_poisson),
    "determinism": (10, criterion_determinism),
}


@dataclass
class SuiteResult:
    config: SuiteConfig
    groups: dict

    @property
    def reports(self) -> list[VerificationReport]:
        return [r for reps in self.groups.values() for r in reps]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def group_passed(self, name: str) -> bool:
        return all(r.passed for r in self.groups[name])

    def to_json(self, include_timing: bool = False) -> str:
        return reports_to_json(self.reports, self.config.to_dict(), include_timing)

    def summary_lines(self) -> list[str]:
        lines = []
        for name, reps in self.groups.items():
            num = CRITERIA[name][0]
            flag = "PASS" if all(r.passed for r in reps) else "FAIL"
            failed = sum(not r.passed for r in reps)
            lines.append(f"[{flag}] criterion {num:2d} {name:<12} {len(reps) - failed}/{len(reps)} checks")
        return lines


def _run_group(args):
    name, cfg = args
    return name, CRITERIA[name][1](cfg)


def run_suite(cfg: SuiteConfig, only=None, jobs: int = 1) -> SuiteResult:
    """Run the selected groups; results are ordered by criterion number whatever the pool does."""
    names = list(CRITERIA) if not only else list(only)
    unknown = [n for n in names if n not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criterion group(s): {', '.join(unknown)}")
    validate_eta(cfg)
    names.sort(key=lambda n: CRITERIA[n][0])
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            done = dict(pool.map(_run_group, [(n, cfg) for n in names]))
    else:
        done = dict(map(_run_group, [(n, cfg) for n in names]))
    return SuiteResult(cfg, {n: done[n] for n in names})


__all__ = ["SuiteConfig", "SuiteResult", "CRITERIA", "run_suite", "validate_eta", "DegenerateEta"]
