"""Homogeneous polynomial maps, the equivariant nullspace solver and the cubic basis E_1..E_8.

A :class:`PolyMap` of degree ``d`` on R^n stores one coefficient row per
output coordinate against :func:`monomial_basis` (graded lex).  Equivariance
under a linear map ``g`` is the coefficient identity ``A T_g = g A`` where
``T_g`` re-expresses the monomials of ``g x`` in the monomials of ``x``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

import numpy as np
from scipy.stats import qmc

from .errors import DomainError
from .grouprep import RANK_TOL, nullspace

__all__ = [
    "PolyMap",
    "monomial_basis",
    "substitution_matrix",
    "equivariance_constraints",
    "equivariant_basis",
    "canonical_E",
    "canonical_basis_for",
    "evaluate",
    "sample_points",
    "equivariance_residual",
    "span_match",
    "identity_map",
]


@lru_cache(maxsize=None)
def monomial_basis(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of degree d in n variables, lexicographically descending."""
    if n < 1 or d < 0:
        raise DomainError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    assert len(out) == comb(n + d - 1, d)
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_index(n: int, d: int) -> dict[tuple[int, ...], int]:
    return {e: i for i, e in enumerate(monomial_basis(n, d))}


@lru_cache(maxsize=None)
def _exponent_array(n: int, d: int) -> np.ndarray:
    return np.array(monomial_basis(n, d), dtype=int).reshape(-1, n)


@dataclass
class PolyMap:
    n: int
    d: int
    coeffs: np.ndarray  # shape (n_out, number of monomials)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        expected = len(monomial_basis(self.n, self.d))
        if self.coeffs.ndim != 2 or self.coeffs.shape[1] != expected:
            raise DomainError(f"coeffs must have {expected} columns, got {self.coeffs.shape}")

    @property
    def n_out(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def zero(cls, n, d, n_out=None):
        return cls(n, d, np.zeros((n_out or n, len(monomial_basis(n, d)))))

    @classmethod
    def from_terms(cls, n, d, rows):
        """Build from rows of ``{exponent_tuple: value}``."""
        index = _monomial_index(n, d)
        coeffs = np.zeros((len(rows), len(index)))
        for i, row in enumerate(rows):
            for e, v in row.items():
                coeffs[i, index[tuple(e)]] += v
        return cls(n, d, coeffs)

    def monomials(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        exps = _exponent_array(self.n, self.d)
        return np.prod(x[..., None, :] ** exps, axis=-1)

    def __call__(self, x) -> np.ndarray:
        return self.monomials(x) @ self.coeffs.T

    def jacobian(self, x) -> np.ndarray:
        """Analytic derivative, shape (n_out, n)."""
        x = np.asarray(x, dtype=float)
        exps = _exponent_array(self.n, self.d)
        dm = np.zeros((exps.shape[0], self.n))
        for k in range(self.n):
            lowered = exps.copy()
            lowered[:, k] = np.maximum(lowered[:, k] - 1, 0)
            dm[:, k] = exps[:, k] * np.prod(x ** lowered, axis=1)
        return self.coeffs @ dm

    def __add__(self, other):
        self._check_compatible(other)
        return PolyMap(self.n, self.d, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_compatible(other)
        return PolyMap(self.n, self.d, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return PolyMap(self.n, self.d, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return PolyMap(self.n, self.d, -self.coeffs)

    def _check_compatible(self, other):
        if (self.n, self.d, self.n_out) != (other.n, other.d, other.n_out):
            raise DomainError("polynomial maps live in different spaces")

    def vector(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def substitute(self, matrix, out_matrix=None) -> "PolyMap":
        """The map y -> out_matrix @ P(matrix @ y)."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape[0] != self.n:
            raise DomainError("substitution matrix has wrong row count")
        t = substitution_matrix(matrix, self.d)
        coeffs = self.coeffs @ t
        if out_matrix is not None:
            coeffs = np.asarray(out_matrix, dtype=float) @ coeffs
        return PolyMap(matrix.shape[1], self.d, coeffs)

    # serialization ---------------------------------------------------------

    def to_json_obj(self) -> dict:
        exps = monomial_basis(self.n, self.d)
        terms = []
        for i, j in zip(*np.nonzero(self.coeffs)):
            v = float(self.coeffs[i, j])
            terms.append([int(i), list(exps[j]), int(v) if v.is_integer() else v])
        return {"n": self.n, "d": self.d, "n_out": self.n_out, "coeffs": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj) -> "PolyMap":
        n, d = int(obj["n"]), int(obj["d"])
        index = _monomial_index(n, d)
        coeffs = np.zeros((int(obj.get("n_out", n)), len(index)))
        for i, e, v in obj["coeffs"]:
            coeffs[int(i), index[tuple(e)]] = v
        return cls(n, d, coeffs)

    @classmethod
    def from_json(cls, text: str) -> "PolyMap":
        return cls.from_json_obj(json.loads(text))


def identity_map(n: int) -> PolyMap:
    rows = [{tuple(int(i == j) for i in range(n)): 1} for j in range(n)]
    return PolyMap.from_terms(n, 1, rows)


def evaluate(P: PolyMap, x) -> np.ndarray:
    return P(x)


# ------------------------------------------------------------- substitution

def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, v1 in p.items():
        for e2, v2 in q.items():
            e = tuple(i + j for i, j in zip(e1, e2))
            out[e] = out.get(e, 0.0) + v1 * v2
    return out


def substitution_matrix(matrix, d: int) -> np.ndarray:
    """T with monomials_n(A y) = T @ monomials_m(y) for A of shape (n, m).

    Each monomial of ``A y`` is expanded as a product of linear forms.
    """
    matrix = np.asarray(matrix, dtype=float)
    n, m = matrix.shape
    unit = [tuple(int(i == k) for i in range(m)) for k in range(m)]
    forms = [{unit[k]: matrix[j, k] for k in range(m) if matrix[j, k] != 0.0}
             for j in range(n)]
    target = _monomial_index(m, d)
    src = monomial_basis(n, d)
    t = np.zeros((len(src), len(target)))
    for row, e in enumerate(src):
        poly = {(0,) * m: 1.0}
        for j, power in enumerate(e):
            for _ in range(power):
                poly = _poly_mul(poly, forms[j])
        for exp, v in poly.items():
            t[row, target[exp]] += v
    return t


def equivariance_constraints(generators, n: int, d: int) -> np.ndarray:
    """Stacked linear system whose nullspace is the equivariant coefficient space."""
    mats = list(generators.values()) if isinstance(generators, dict) else list(generators)
    size = len(monomial_basis(n, d))
    eye_n, eye_m = np.eye(n), np.eye(size)
    blocks = []
    for g in mats:
        g = np.asarray(g, dtype=float)
        if g.shape != (n, n):
            raise DomainError(f"generator has shape {g.shape}, expected {(n, n)}")
        t = substitution_matrix(g, d)
        # row-major vec(A): vec(A T) = (I kron T^T) vec(A), vec(g A) = (g kron I) vec(A)
        blocks.append(np.kron(eye_n, t.T) - np.kron(g, eye_m))
    return np.vstack(blocks)


def equivariant_basis(generators, n: int, d: int, tol: float = RANK_TOL) -> list[PolyMap]:
    """Orthonormal basis (in coefficient space) of degree-d equivariant maps."""
    system = equivariance_constraints(generators, n, d)
    null = nullspace(system, tol, f"equivariants of degree {d}")
    size = len(monomial_basis(n, d))
    return [PolyMap(n, d, v.reshape(n, size)) for v in null.T]


# ------------------------------------------------------------ cubic basis

# E1..E4: row i is (sum of squares of a coordinate pair) * x_i.
_PAIR_ROWS = {
    1: [(1, 2), (1, 2), (3, 4), (3, 4), (5, 6), (5, 6), (7, 8), (7, 8)],
    2: [(3, 4), (3, 4), (1, 2), (1, 2), (7, 8), (7, 8), (5, 6), (5, 6)],
    3: [(5, 6), (5, 6), (7, 8), (7, 8), (3, 4), (3, 4), (1, 2), (1, 2)],
    4: [(7, 8), (7, 8), (5, 6), (5, 6), (1, 2), (1, 2), (3, 4), (3, 4)],
}

_TERM_ROWS = {
    5: [
        "-x3x5x7 - x3x6x8 - x4x5x8 + x4x6x7",
        "x3x5x8 - x3x6x7 - x4x5x7 - x4x6x8",
        "-x1x5x7 - x1x6x8 + x2x5x8 - x2x6x7",
        "-x1x5x8 + x1x6x7 - x2x5x7 - x2x6x8",
        "x1x3x7 + x1x4x8 - x2x3x8 + x2x4x7",
        "x1x3x8 - x1x4x7 + x2x3x7 + x2x4x8",
        "x1x3x5 - x1x4x6 + x2x3x6 + x2x4x5",
        "x1x3x6 + x1x4x5 - x2x3x5 + x2x4x6",
    ],
    6: [
        "-x1x3x6 + x1x4x5 + x2x3x5 + x2x4x6",
        "x1x3x5 + x1x4x6 + x2x3x6 - x2x4x5",
        "-x1x3x8 + x1x4x7 + x2x3x7 + x2x4x8",
        "x1x3x7 + x1x4x8 + x2x3x8 - x2x4x7",
        "x3x5x8 + x3x6x7 + x4x5x7 - x4x6x8",
        "x3x5x7 - x3x6x8 - x4x5x8 - x4x6x7",
        "-x1x5x8 - x1x6x7 - x2x5x7 + x2x6x8",
        "-x1x5x7 + x1x6x8 + x2x5x8 + x2x6x7",
    ],
    7: [
        "-2x5x7x8 - x6x7^2 + x6x8^2",
        "-x5x7^2 + x5x8^2 + 2x6x7x8",
        "x5^2x8 + 2x5x6x7 - x6^2x8",
        "x5^2x7 - 2x5x6x8 - x6^2x7",
        "x1^2x4 + 2x1x2x3 - x2^2x4",
        "-x1^2x3 + 2x1x2x4 + x2^2x3",
        "2x1x3x4 + x2x3^2 - x2x4^2",
        "-x1x3^2 + x1x4^2 + 2x2x3x4",
    ],
    8: [
        "x3^2x8 - 2x3x4x7 - x4^2x8",
        "-x3^2x7 - 2x3x4x8 + x4^2x7",
        "x1^2x6 - 2x1x2x5 - x2^2x6",
        "-x1^2x5 - 2x1x2x6 + x2^2x5",
        "2x1x7x8 + x2x7^2 - x2x8^2",
        "x1x7^2 - x1x8^2 - 2x2x7x8",
        "-2x3x5x6 - x4x5^2 + x4x6^2",
        "-x3x5^2 + x3x6^2 + 2x4x5x6",
    ],
}

_TERM = re.compile(r"([+-]?)\s*(\d*)((?:x\d(?:\^\d)?)+)")
_FACTOR = re.compile(r"x(\d)(?:\^(\d))?")


def _parse_row(text: str, n: int = 8) -> dict[tuple[int, ...], int]:
    row: dict[tuple[int, ...], int] = {}
    compact = text.replace(" ", "")
    consumed = 0
    for match in _TERM.finditer(compact):
        sign, mult, body = match.groups()
        e = [0] * n
        for var, power in _FACTOR.findall(body):
            e[int(var) - 1] += int(power or 1)
        value = (-1 if sign == "-" else 1) * int(mult or 1)
        row[tuple(e)] = row.get(tuple(e), 0) + value
        consumed += len(match.group(0))
    if consumed != len(compact):
        raise ValueError(f"unparsed characters in {text!r}")
    return row


def _pair_row(pair, i, n=8):
    row = {}
    for j in pair:
        e = [0] * n
        e[j - 1] += 2
        e[i] += 1
        row[tuple(e)] = 1
    return row


def canonical_E(i: int, as_printed: bool = False) -> PolyMap:
    """The cubic equivariant E_i of G_{5,b} on R^8 (1 <= i <= 8).

    The reference listing of E_6, E_7, E_8 carries rows 5-8 with the opposite
    sign; read literally those maps satisfy E(Vx) = -V E(x) for the generator
    V.  The default result flips those rows, which makes all eight maps
    equivariant.  ``as_printed=True`` returns the listing verbatim.
    """
    if not 1 <= i <= 8:
        raise DomainError(f"E_{i} does not exist (1 <= i <= 8)")
    if i <= 4:
        rows = [_pair_row(pair, r) for r, pair in enumerate(_PAIR_ROWS[i])]
    else:
        rows = [_parse_row(t) for t in _TERM_ROWS[i]]
        if i >= 6 and not as_printed:
            rows = rows[:4] + [{e: -v for e, v in row.items()} for row in rows[4:]]
    return PolyMap.from_terms(8, 3, rows)


def canonical_basis_for(a: int) -> list[PolyMap]:
    """E_1..E_8 when a = 5, otherwise E_1..E_5."""
    return [canonical_E(i) for i in range(1, 9 if a == 5 else 6)]


# ----------------------------------------------------------------- checks

@lru_cache(maxsize=None)
def sample_points(n: int, count: int = 64, seed: int = 0) -> np.ndarray:
    """Deterministic scrambled-Sobol points inside the unit ball of R^n."""
    sobol = qmc.Sobol(d=n, scramble=True, seed=seed)
    pts = 2.0 * sobol.random(count) - 1.0
    pts = pts / np.sqrt(n)
    pts.setflags(write=False)
    return pts


def equivariance_residual(P: PolyMap, g) -> float:
    """max over 64 sample points of ||P(g x) - g P(x)||."""
    g = np.asarray(g, dtype=float)
    x = sample_points(P.n)
    lhs = P(x @ g.T)
    rhs = P(x) @ g.T
    return float(np.max(np.linalg.norm(lhs - rhs, axis=1)))


def _orthonormal_rows(maps, tol):
    mat = np.array([p.vector() for p in maps])
    if mat.size == 0:
        return mat
    _, sv, vt = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.count_nonzero(sv > tol * sv[0]))
    return vt[:rank]


def span_match(basis_a, basis_b, tol: float = RANK_TOL) -> bool:
    """True iff the two families span the same coefficient space."""
    basis_a, basis_b = list(basis_a), list(basis_b)
    if not basis_a or not basis_b:
        return not basis_a and not basis_b
    if (basis_a[0].n, basis_a[0].d) != (basis_b[0].n, basis_b[0].d):
        raise DomainError("bases live in different polynomial spaces")
    qa = _orthonormal_rows(basis_a, tol)
    qb = _orthonormal_rows(basis_b, tol)
    if qa.shape[0] != qb.shape[0]:
        return False

    def residual(q_from, q_onto):
        return np.max(np.linalg.norm(q_from - (q_from @ q_onto.T) @ q_onto, axis=1))

    return bool(residual(qa, qb) < tol and residual(qb, qa) < tol)
