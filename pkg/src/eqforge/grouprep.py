"""Exact arithmetic and matrix realizations for H_{a,b} < SO(4) and G_{a,b} < O(8).

Elements are normal-form exponent tuples ``(k1, k2, l1, l2, m)`` standing for

    c^k1 d^k2 q^l1 s^l2          (family ``"H4"``, m is always 0)
    C^k1 D^k2 Q^l1 S^l2 V^m      (family ``"G8"``)

with k1 mod a, k2 mod b, l1 mod 4, l2 mod 2, m mod 2.  Products are reduced
with the defining relations only; matrices serve as an independent oracle.

Relations used by the reduction:

* commuting pairs: cd = dc, cq = qc, ds = sd, qs = sq
* s c = c^-1 s and q d = d^-1 q
* c^a = d^b = s^2 = q^2 (q^2 = -1 is central, q^4 = 1)
* V C V^-1 = C^rho, V Q V^-1 = Q^3, V commutes with D and S, V^2 = S
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalAmbiguityError
from .modular import is_in_A, rho_for

__all__ = [
    "GroupParams",
    "GroupElement",
    "IDENTITY",
    "MATRIX_TOL",
    "RANK_TOL",
    "rotation",
    "generator_matrices_h",
    "generator_matrices_g",
    "generator_matrices",
    "generator_elements",
    "nf_multiply",
    "nf_inverse",
    "nf_power",
    "element_order",
    "element_matrix",
    "enumerate_group",
    "commutant_dimension",
    "nullspace",
    "lie_generator_D",
    "lie_generator_C_tilde",
    "relation_checks",
]

MATRIX_TOL = 1e-9
RANK_TOL = 1e-8

H4 = "H4"
G8 = "G8"


class GroupElement(NamedTuple):
    k1: int = 0
    k2: int = 0
    l1: int = 0
    l2: int = 0
    m: int = 0


IDENTITY = GroupElement()


@dataclass(frozen=True)
class GroupParams:
    a: int
    b: int
    rho: int | None = None
    family: str = H4

    def __post_init__(self):
        if self.family not in (H4, G8):
            raise DomainError(f"unknown family {self.family!r}")
        for name, v in (("a", self.a), ("b", self.b)):
            if v < 1 or v % 2 == 0:
                raise DomainError(f"{name}={v} must be an odd positive integer")
        if gcd(self.a, self.b) != 1:
            raise DomainError(f"gcd(a, b) = {gcd(self.a, self.b)} != 1")
        if self.family == G8:
            if self.a < 2 or not is_in_A(self.a):
                raise DomainError(f"a={self.a} ∉ 𝔸: needs all prime factors = 1 mod 4")
            if self.rho is None:
                raise DomainError("family G8 requires rho")
            if self.rho % 2 == 0 or (self.rho**2 + 1) % self.a:
                raise DomainError(f"rho={self.rho} is not an odd root of -1 mod {self.a}")

    @classmethod
    def h(cls, a: int, b: int) -> "GroupParams":
        return cls(a, b, None, H4)

    @classmethod
    def g(cls, a: int, b: int, rho: int | None = None) -> "GroupParams":
        if rho is None:
            if a < 2 or not is_in_A(a):
                raise DomainError(f"a={a} ∉ 𝔸: needs all prime factors = 1 mod 4")
            rho = rho_for(a).rho
        return cls(a, b, rho, G8)

    @property
    def dim(self) -> int:
        return 4 if self.family == H4 else 8

    @property
    def order(self) -> int:
        return (8 if self.family == H4 else 16) * self.a * self.b

    def validate(self, e: GroupElement) -> GroupElement:
        e = GroupElement(*e)
        ok = (0 <= e.k1 < self.a and 0 <= e.k2 < self.b and 0 <= e.l1 < 4
              and 0 <= e.l2 < 2 and 0 <= e.m < 2)
        if not ok or (self.family == H4 and e.m):
            raise DomainError(f"{tuple(e)} is not a normal form for {self}")
        return e

    def __str__(self):
        name = "H" if self.family == H4 else "G"
        return f"{name}_{{{self.a},{self.b}}}"


# ---------------------------------------------------------------- exact part

def _reduce(params: GroupParams, k1: int, k2: int, l1: int, l2: int, m: int = 0) -> GroupElement:
    """Normal form of c^k1 d^k2 q^l1 s^l2 V^m for arbitrary integer exponents.

    Each overflow of c^a, d^b or s^2 contributes a central q^2.
    """
    t1, k1 = divmod(k1, params.a)
    t2, k2 = divmod(k2, params.b)
    t3, l2 = divmod(l2, 2)
    l1 = (l1 + 2 * (t1 + t2 + t3)) % 4
    return GroupElement(k1, k2, l1, l2, m)


def _mul_h(params, x: GroupElement, y: GroupElement) -> GroupElement:
    # c^k1 d^k2 q^l1 s^l2 . c^K1 d^K2 q^L1 s^L2
    #   = c^(k1 + (-1)^l2 K1) d^(k2 + (-1)^l1 K2) q^(l1+L1) s^(l2+L2)
    k1 = x.k1 + (-y.k1 if x.l2 else y.k1)
    k2 = x.k2 + (-y.k2 if x.l1 % 2 else y.k2)
    return _reduce(params, k1, k2, x.l1 + y.l1, x.l2 + y.l2)


def _twist(params, h: GroupElement) -> GroupElement:
    """V h V^-1 for h in the block-diagonal part."""
    return _reduce(params, params.rho * h.k1, h.k2, 3 * h.l1, h.l2)


_S = GroupElement(0, 0, 0, 1, 0)


def nf_multiply(e1, e2, params: GroupParams) -> GroupElement:
    e1 = GroupElement(*e1)
    e2 = GroupElement(*e2)
    h2 = e2._replace(m=0)
    if e1.m:
        h2 = _twist(params, h2)
    h = _mul_h(params, e1._replace(m=0), h2)
    m = e1.m + e2.m
    if m == 2:
        h = _mul_h(params, h, _S)
        m = 0
    return h._replace(m=m)


def nf_inverse(e, params: GroupParams) -> GroupElement:
    e = GroupElement(*e)
    # (c^k1 d^k2 q^l1 s^l2)^-1 = s^-l2 q^-l1 d^-k2 c^-k1
    parts = [
        _reduce(params, 0, 0, 0, -e.l2),
        _reduce(params, 0, 0, -e.l1, 0),
        _reduce(params, 0, -e.k2, 0, 0),
        _reduce(params, -e.k1, 0, 0, 0),
    ]
    inv = IDENTITY
    for p in parts:
        inv = _mul_h(params, inv, p)
    if e.m:
        # (h V)^-1 = V^-1 h^-1 = S^-1 (V h^-1 V^-1) V
        s_inv = _reduce(params, 0, 0, 0, -1)
        inv = _mul_h(params, s_inv, _twist(params, inv))._replace(m=1)
    return inv


def nf_power(e, n: int, params: GroupParams) -> GroupElement:
    if n < 0:
        return nf_power(nf_inverse(e, params), -n, params)
    result = IDENTITY
    base = GroupElement(*e)
    while n:
        if n & 1:
            result = nf_multiply(result, base, params)
        base = nf_multiply(base, base, params)
        n >>= 1
    return result


def element_order(e, params: GroupParams) -> int:
    x = GroupElement(*e)
    n = 1
    while x != IDENTITY:
        x = nf_multiply(x, e, params)
        n += 1
    return n


def generator_elements(params: GroupParams) -> dict[str, GroupElement]:
    gens = {
        "c": GroupElement(1 % params.a, 0, 0, 0, 0),
        "d": GroupElement(0, 1 % params.b, 0, 0, 0),
        "q": GroupElement(0, 0, 1, 0, 0),
        "s": GroupElement(0, 0, 0, 1, 0),
    }
    if params.a == 1:
        gens["c"] = _reduce(params, 1, 0, 0, 0)
    if params.b == 1:
        gens["d"] = _reduce(params, 0, 1, 0, 0)
    if params.family == G8:
        gens = {k.upper(): v for k, v in gens.items()}
        gens["V"] = GroupElement(0, 0, 0, 0, 1)
    return gens


def enumerate_group(params: GroupParams) -> list[GroupElement]:
    """All normal forms in lexicographic order, m varying fastest."""
    ms = (0,) if params.family == H4 else (0, 1)
    return [GroupElement(*t) for t in
            product(range(params.a), range(params.b), range(4), range(2), ms)]


# --------------------------------------------------------------- matrix part

def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


_Q4 = np.array([[0, 0, 1, 0],
                [0, 0, 0, 1],
                [-1, 0, 0, 0],
                [0, -1, 0, 0]], dtype=float)
_S4 = np.array([[0, 0, -1, 0],
                [0, 0, 0, 1],
                [1, 0, 0, 0],
                [0, -1, 0, 0]], dtype=float)


def _c4(phi):
    return scipy.linalg.block_diag(rotation(phi), rotation(phi))


def _d4(psi):
    return scipy.linalg.block_diag(rotation(-psi), rotation(psi))


def generator_matrices_h(params: GroupParams) -> dict[str, np.ndarray]:
    return {
        "c": _c4(np.pi / params.a),
        "d": _d4(np.pi / params.b),
        "q": _Q4.copy(),
        "s": _S4.copy(),
    }


def generator_matrices_g(params: GroupParams) -> dict[str, np.ndarray]:
    if params.rho is None:
        raise DomainError("G8 generators need rho")
    h = generator_matrices_h(params)
    c_rho = _c4(params.rho * np.pi / params.a)
    z = np.zeros((4, 4))
    return {
        "C": scipy.linalg.block_diag(h["c"], c_rho),
        "D": scipy.linalg.block_diag(h["d"], h["d"]),
        "Q": scipy.linalg.block_diag(h["q"], -h["q"]),
        "S": scipy.linalg.block_diag(h["s"], h["s"]),
        "V": np.block([[z, np.eye(4)], [h["s"], z]]),
    }


def generator_matrices(params: GroupParams) -> dict[str, np.ndarray]:
    if params.family == H4:
        return generator_matrices_h(params)
    return generator_matrices_g(params)


def lie_generator_D(psi: float) -> np.ndarray:
    """8x8 rotation D(psi) = diag(d(psi), d(psi)); D(pi/b) is the generator D."""
    d = _d4(psi)
    return scipy.linalg.block_diag(d, d)


def lie_generator_C_tilde(phi: float, phi2: float) -> np.ndarray:
    """diag(c(phi), c(phi2)) with c(phi) the matrix of [exp(i phi), 1]."""
    return scipy.linalg.block_diag(_c4(phi), _c4(phi2))


class _MatrixCache:
    """Generator powers for one parameter set; element matrices are products."""

    def __init__(self, params: GroupParams):
        self.params = params
        gens = generator_matrices(params)
        names = list(gens)
        mp = np.linalg.matrix_power
        self.c = [mp(gens[names[0]], k) for k in range(params.a)]
        self.d = [mp(gens[names[1]], k) for k in range(params.b)]
        self.q = [mp(gens[names[2]], k) for k in range(4)]
        self.s = [mp(gens[names[3]], k) for k in range(2)]
        n = params.dim
        self.v = [np.eye(n)] + ([gens["V"]] if params.family == G8 else [])

    def __call__(self, e: GroupElement) -> np.ndarray:
        return self.c[e.k1] @ self.d[e.k2] @ self.q[e.l1] @ self.s[e.l2] @ self.v[e.m]


_CACHES: dict[GroupParams, _MatrixCache] = {}


def element_matrix(e, params: GroupParams) -> np.ndarray:
    e = params.validate(e)
    cache = _CACHES.get(params)
    if cache is None:
        cache = _CACHES.setdefault(params, _MatrixCache(params))
    return cache(e)


# ------------------------------------------------------------ linear algebra

def nullspace(matrix: np.ndarray, tol: float = RANK_TOL, what: str = "nullspace") -> np.ndarray:
    """Orthonormal nullspace basis (columns) with a relative rank cut.

    Singular values below ``tol * smax`` count as zero; any singular value
    in ``[tol, 10 tol] * smax`` makes the rank decision ambiguous.
    """
    matrix = np.atleast_2d(matrix)
    ncols = matrix.shape[1]
    if matrix.size == 0:
        return np.eye(ncols)
    _, sv, vt = np.linalg.svd(matrix, full_matrices=matrix.shape[0] < ncols)
    smax = sv[0] if sv.size else 0.0
    if smax == 0.0:
        return np.eye(ncols)
    scaled = sv / smax
    band = (scaled >= tol) & (scaled <= 10 * tol)
    if band.any():
        raise NumericalAmbiguityError(
            f"{what}: singular values {sv[band]} fall in the ambiguous band", sv)
    rank = int(np.count_nonzero(scaled >= tol))
    return vt[rank:].T.copy()


def commutant_dimension(generator_matrices, dim: int | None = None, tol: float = RANK_TOL) -> int:
    """Dimension of {L : L g = g L for every generator g}."""
    mats = list(generator_matrices.values()) if isinstance(generator_matrices, dict) \
        else list(generator_matrices)
    n = dim or mats[0].shape[0]
    eye = np.eye(n)
    # row-major vec: vec(L g) = (I kron g^T) vec(L), vec(g L) = (g kron I) vec(L)
    system = np.vstack([np.kron(eye, g.T) - np.kron(g, eye) for g in mats])
    return nullspace(system, tol, "commutant").shape[1]


# ---------------------------------------------------------------- relations

def relation_checks(params: GroupParams, tol: float = 1e-12) -> list[tuple[str, bool]]:
    """Every defining relation checked as a matrix identity."""
    gm = generator_matrices(params)
    mp = np.linalg.matrix_power
    a, b = params.a, params.b
    if params.family == H4:
        c, d, q, s = gm["c"], gm["d"], gm["q"], gm["s"]
        n = 4
    else:
        c, d, q, s = gm["C"], gm["D"], gm["Q"], gm["S"]
        n = 8
    eye = np.eye(n)
    rels = [
        ("cd = dc", c @ d, d @ c),
        ("cq = qc", c @ q, q @ c),
        ("ds = sd", d @ s, s @ d),
        ("qs = sq", q @ s, s @ q),
        ("q^4 = 1", mp(q, 4), eye),
        ("s^4 = 1", mp(s, 4), eye),
        ("cs = s c^(2a-1)", c @ s, s @ mp(c, 2 * a - 1)),
        ("dq = q d^(2b-1)", d @ q, q @ mp(d, 2 * b - 1)),
        ("c^a = q^2", mp(c, a), q @ q),
        ("d^b = q^2", mp(d, b), q @ q),
        ("s^2 = q^2", s @ s, q @ q),
    ]
    if params.family == G8:
        rels = [(name.replace("c", "C").replace("d", "D").replace("q", "Q").replace("s", "S"), x, y)
                for name, x, y in rels]
        v, rho = gm["V"], params.rho
        rels += [
            ("VC = C^rho V", v @ c, mp(c, rho) @ v),
            ("CV = V C^(2a-rho)", c @ v, v @ mp(c, (2 * a - rho) % (2 * a))),
            ("VD = DV", v @ d, d @ v),
            ("VQ = Q^3 V", v @ q, mp(q, 3) @ v),
            ("VS = SV", v @ s, s @ v),
            ("V^8 = 1", mp(v, 8), eye),
            ("V^2 = S", v @ v, s),
        ]
    return [(name, bool(np.max(np.abs(x - y)) < tol)) for name, x, y in rels]
