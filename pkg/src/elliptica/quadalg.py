"""Quadratic graded algebras T(V)/(L) given by a numerical relation space.

Tensors are flattened row-major: x_{i1} ... x_{id} sits at index ((i1 * n + i2) * n + ...) + id.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.linalg import null_space, subspace_angles

from .errors import DimensionMismatch, IllConditioned, WorkspaceExceeded
from .report import decode_complex, encode

RANK_REL = 1e-8
WORKSPACE = 20000


@dataclass
class RelationSpace:
    n: int
    rows: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=complex))
        if self.rows.shape[1] != self.n * self.n:
            raise DimensionMismatch(f"rows must have n^2 = {self.n * self.n} columns")

    @property
    def r(self) -> int:
        return self.rows.shape[0]

    def rank(self) -> int:
        return _rank(self.rows)[0]

    def basis(self) -> np.ndarray:
        """Orthonormal rows spanning L."""
        if self.r == 0:
            return self.rows
        _, s, vh = np.linalg.svd(self.rows, full_matrices=False)
        return vh[: _count(s)]

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "r": self.r, "label": self.label, "rows": encode(self.rows)})

    @classmethod
    def from_json(cls, text: str) -> "RelationSpace":
        doc = json.loads(text)
        n = int(doc["n"])
        rows = np.array([[decode_complex(x) for x in row] for row in doc["rows"]], dtype=complex)
        if "r" in doc and int(doc["r"]) != rows.shape[0]:
            raise DimensionMismatch("declared r does not match the number of rows")
        return cls(n, rows.reshape(-1, n * n), doc.get("label", ""))


def _count(s: np.ndarray, rel: float = RANK_REL) -> int:
    return int((s >= rel * s[0]).sum()) if s.size and s[0] > 0 else 0


def _rank(M: np.ndarray, rel: float = RANK_REL):
    s = np.linalg.svd(M, compute_uv=False)
    r = _count(s, rel)
    gap = float(s[r - 1] / s[r]) if 0 < r < len(s) and s[r] > 0 else np.inf
    return r, gap, s


def tensor(n: int, terms) -> np.ndarray:
    """Quadratic tensor from (coefficient, i, j) triples."""
    v = np.zeros((n, n), complex)
    for c, i, j in terms:
        v[i % n, j % n] += c
    return v.ravel()


def _lifted(rows: np.ndarray, n: int, degree: int) -> np.ndarray:
    blocks = [np.kron(np.kron(np.eye(n ** i), rows), np.eye(n ** (degree - 2 - i))) for i in range(degree - 1)]
    return np.vstack(blocks)


def graded_span(L: RelationSpace, degree: int, workspace: int = WORKSPACE) -> np.ndarray:
    """Orthonormal columns spanning W_d = sum_i V^i (x) L (x) V^(d-2-i)."""
    n = L.n
    if degree < 2:
        return np.zeros((n ** max(degree, 0), 0), complex)
    if n ** degree > workspace:
        raise WorkspaceExceeded(f"n^{degree} = {n ** degree} exceeds {workspace}")
    M = _lifted(L.basis(), n, degree)
    u, s, _ = np.linalg.svd(M.T, full_matrices=False)
    return u[:, : _count(s)]


@dataclass
class GradedDimensionReport:
    dims: list[int]
    expected: list[int]
    pbw: list[bool]
    sigma_gap: list[float]

    @property
    def is_pbw(self) -> bool:
        return all(self.pbw)

    def to_dict(self) -> dict:
        return {"dims": self.dims, "expected": self.expected, "pbw": self.pbw, "sigma_gap": self.sigma_gap}


def hilbert_dims(L: RelationSpace, amax: int = 4, workspace: int = WORKSPACE,
                 warn_gap: float = 1e3) -> GradedDimensionReport:
    n = L.n
    B = L.basis()
    dims, gaps = [n], [np.inf]
    for a in range(2, amax + 1):
        if n ** a > workspace:
            raise WorkspaceExceeded(f"n^{a} = {n ** a} exceeds {workspace}")
        rk, gap, _ = _rank(_lifted(B, n, a))
        dims.append(n ** a - rk)
        gaps.append(gap)
        if gap < warn_gap:
            warnings.warn(f"degree {a}: singular gap {gap:.2e} is small", RuntimeWarning)
    expected = [comb(n + a - 1, a) for a in range(1, len(dims) + 1)]
    return GradedDimensionReport(dims, expected, [d == e for d, e in zip(dims, expected)], gaps)


@dataclass
class CentralElementReport:
    degree: int
    nullspace_dim: int
    basis: np.ndarray
    residuals: list[float]
    sigma_gap: float
    extra: dict = field(default_factory=dict)


def central_elements(L: RelationSpace, degree: int, tol: float = 1e-8, workspace: int = WORKSPACE,
                     min_gap: float = 1e2) -> CentralElementReport:
    """Elements c of the orthogonal complement of W_d with x_i c - c x_i in W_{d+1} for every generator."""
    n = L.n
    if n ** (degree + 1) > workspace:
        raise WorkspaceExceeded(f"n^{degree + 1} exceeds {workspace}")
    if degree >= 2:
        C = null_space(graded_span(L, degree, workspace).conj().T)
    else:
        C = np.eye(n ** degree, dtype=complex)
    Q = graded_span(L, degree + 1, workspace)
    P = np.eye(n ** (degree + 1)) - Q @ Q.conj().T
    E = np.eye(n)
    commutators = [np.kron(E[:, [i]], C) - np.kron(C, E[:, [i]]) for i in range(n)]
    A = np.vstack([P @ K for K in commutators])
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    s_full = np.concatenate([s, np.zeros(A.shape[1] - len(s))])
    # threshold relative to the unprojected commutator map, so an all-zero projection is detected
    scale = max(np.linalg.norm(np.vstack(commutators), 2), np.finfo(float).tiny)
    null_mask = s_full < tol * scale
    dim = int(null_mask.sum())
    kept = s_full[~null_mask]
    dropped = s_full[null_mask]
    gap = float(kept.min() / max(dropped.max(), np.finfo(float).tiny)) if kept.size and dropped.size else np.inf
    if dim and kept.size and gap < min_gap:
        raise IllConditioned(f"central-element gap {gap:.2e} below {min_gap}")
    coeffs = vh.conj().T[:, null_mask]
    basis = C @ coeffs
    basis = basis / np.linalg.norm(basis, axis=0, keepdims=True) if dim else basis
    residuals = []
    for j in range(dim):
        c = basis[:, [j]]
        residuals.append(max(membership_distance((np.kron(E[:, [i]], c) - np.kron(c, E[:, [i]])).ravel(), Q,
                                                 relative=False) for i in range(n)))
    return CentralElementReport(degree, dim, basis, residuals, gap)


def _as_columns(span: np.ndarray) -> np.ndarray:
    span = np.asarray(span, dtype=complex)
    return span[:, None] if span.ndim == 1 else span


def subspace_compare(A: np.ndarray, B: np.ndarray) -> float:
    """Largest principal angle between two column spaces."""
    A, B = _as_columns(A), _as_columns(B)
    if A.shape[0] != B.shape[0]:
        raise DimensionMismatch("ambient dimensions differ")
    return float(np.max(subspace_angles(A, B)))


def row_span(L: RelationSpace) -> np.ndarray:
    """Columns spanning L, as vectors in V (x) V."""
    return L.basis().T


def membership_distance(v: np.ndarray, W: np.ndarray, relative: bool = True) -> float:
    """|v - proj_W v| (divided by |v| when relative); W is any column spanning set."""
    v = np.asarray(v, dtype=complex).ravel()
    W = _as_columns(W)
    nv = np.linalg.norm(v)
    if nv == 0:
        return 0.0
    if W.shape[1] == 0:
        return 1.0 if relative else float(nv)
    u, s, _ = np.linalg.svd(W, full_matrices=False)
    Q = u[:, : _count(s)]
    d = float(np.linalg.norm(v - Q @ (Q.conj().T @ v)))
    return d / nv if relative else d


def antisymmetric_relations(n: int) -> RelationSpace:
    """x_i x_j - x_j x_i: the polynomial ring."""
    rows = [tensor(n, [(1, i, j), (-1, j, i)]) for i in range(n) for j in range(i + 1, n)]
    return RelationSpace(n, np.array(rows) if rows else np.zeros((0, n * n)), "commutative")
