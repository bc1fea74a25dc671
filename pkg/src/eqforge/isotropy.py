"""Fixed-point spaces and conjugacy classes of isotropy subgroups."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalAmbiguityError
from .grouprep import (
    IDENTITY,
    RANK_TOL,
    GroupElement,
    GroupParams,
    element_matrix,
    enumerate_group,
    nf_inverse,
    nf_multiply,
)

__all__ = [
    "FixedSpace",
    "IsotropyClass",
    "fixed_space",
    "canonical_basis",
    "fixed_space_formula_h",
    "principal_angles",
    "fixer_pattern",
    "nontrivial_fixers",
    "cyclic_subgroup",
    "classify_isotropy",
    "conjugacy_witness",
]


@dataclass(frozen=True)
class FixedSpace:
    element: GroupElement
    basis: np.ndarray  # rows are orthonormal vectors

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


@dataclass
class IsotropyClass:
    representative: GroupElement
    members: list[GroupElement]
    fixed_dim: int
    conjugator_witnesses: dict[GroupElement, GroupElement] = field(default_factory=dict)

    def __len__(self):
        return len(self.members)


def canonical_basis(columns: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Deterministic orthonormal basis of span(columns), returned as rows.

    Projects e_1, e_2, ... onto the subspace and Gram-Schmidts the survivors,
    so the output depends only on the subspace.  Each vector has its first
    nonzero coordinate positive.
    """
    n, k = columns.shape
    if k == 0:
        return np.zeros((0, n))
    proj = columns @ columns.T
    basis: list[np.ndarray] = []
    for i in range(n):
        v = proj[:, i].copy()
        for u in basis:
            v -= (u @ v) * u
        norm = np.linalg.norm(v)
        if norm > tol:
            v /= norm
            lead = v[np.flatnonzero(np.abs(v) > tol)[0]]
            basis.append(v if lead > 0 else -v)
        if len(basis) == k:
            break
    return np.array(basis)


def fixed_space(e, params: GroupParams, tol: float = RANK_TOL) -> FixedSpace:
    """Orthonormal basis of ker(g - I) from the singular values of g - I."""
    e = params.validate(e)
    g = element_matrix(e, params)
    n = params.dim
    _, sv, vt = np.linalg.svd(g - np.eye(n))
    cut = tol * n
    band = (sv >= cut) & (sv <= 10 * cut)
    if band.any():
        raise NumericalAmbiguityError(f"fixed space of {tuple(e)}: ambiguous rank", sv)
    kernel = vt[sv < cut].T
    return FixedSpace(e, canonical_basis(kernel))


def fixed_space_formula_h(k1: int, k2: int, l1: int, params: GroupParams) -> np.ndarray:
    """Closed-form fixed-space basis of c^k1 d^k2 q^l1 s, as two rows.

    For l1 = 1 the two vectors are rotations by half the angle differences
    (k1/a -+ k2/b) pi / 2 in the planes (x1, x2) and (x3, x4); l1 = 3 adds a
    quarter turn to both.
    """
    if l1 not in (1, 3):
        raise DomainError(f"l1={l1} must be 1 or 3")
    shift = 0 if l1 == 1 else 1
    t1 = 0.5 * (k1 / params.a - k2 / params.b + shift) * np.pi
    t2 = 0.5 * (k1 / params.a + k2 / params.b + shift) * np.pi
    return np.array([
        [np.cos(t1), np.sin(t1), 0.0, 0.0],
        [0.0, 0.0, np.cos(t2), np.sin(t2)],
    ])


def principal_angles(rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    # sine-based; arccos of cosines loses half the digits near zero
    return scipy.linalg.subspace_angles(np.asarray(rows_a).T, np.asarray(rows_b).T)


def fixer_pattern(e: GroupElement) -> bool:
    """Exponent pattern of the elements with a nonzero fixed vector."""
    return e.l1 in (1, 3) and e.l2 == 1 and e.m == 0


def nontrivial_fixers(params: GroupParams, tol: float = RANK_TOL) -> list[GroupElement]:
    """Non-identity elements with nonzero fixed space, found by a kernel sweep."""
    return [e for e in enumerate_group(params)
            if e != IDENTITY and fixed_space(e, params, tol).dim > 0]


def cyclic_subgroup(e, params: GroupParams) -> frozenset[GroupElement]:
    elems = {IDENTITY}
    x = GroupElement(*e)
    while x not in elems:
        elems.add(x)
        x = nf_multiply(x, e, params)
    return frozenset(elems)


def _conjugate(w, e, params, w_inv=None):
    w_inv = nf_inverse(w, params) if w_inv is None else w_inv
    return nf_multiply(nf_multiply(w, e, params), w_inv, params)


def conjugacy_witness(e_from, e_to, params: GroupParams) -> GroupElement | None:
    """First w (enumeration order) with w e_from w^-1 = e_to, or None."""
    e_from = params.validate(e_from)
    e_to = params.validate(e_to)
    for w in enumerate_group(params):
        if _conjugate(w, e_from, params) == e_to:
            return w
    return None


def classify_isotropy(params: GroupParams, tol: float = RANK_TOL) -> list[IsotropyClass]:
    """Conjugacy classes of the cyclic isotropy subgroups <e>, e a nontrivial fixer.

    Each class is represented by its lexicographically smallest generator.
    Members are the fixers generating a subgroup in the class; witnesses
    map the representative onto a generator of each member's subgroup.
    """
    fixers = nontrivial_fixers(params, tol)
    group = enumerate_group(params)
    inverses = {w: nf_inverse(w, params) for w in group}
    subgroup_of = {e: cyclic_subgroup(e, params) for e in fixers}
    remaining = sorted(fixers)
    classes = []
    while remaining:
        rep = remaining[0]
        witnesses: dict[GroupElement, GroupElement] = {}
        for w in group:
            image = _conjugate(w, rep, params, inverses[w])
            if image in subgroup_of and image not in witnesses:
                witnesses[image] = w
        # <e> lies in the class when some conjugate of rep generates <e>
        for e in remaining:
            if e in witnesses:
                continue
            for image, w in list(witnesses.items()):
                if subgroup_of[image] == subgroup_of[e]:
                    witnesses[e] = w
                    break
        members = [e for e in remaining if e in witnesses]
        witnesses = {e: witnesses[e] for e in members}
        dims = {fixed_space(e, params, tol).dim for e in members}
        if len(dims) != 1:
            raise AssertionError(f"class of {rep} mixes fixed dimensions {dims}")
        classes.append(IsotropyClass(rep, members, dims.pop(), witnesses))
        remaining = [e for e in remaining if e not in witnesses]
    return classes
