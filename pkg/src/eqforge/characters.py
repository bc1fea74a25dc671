"""Characters and low-degree Molien coefficients via Sattinger's formula.

For d <= 3 the symmetric-power characters are

    chi_(1) = chi
    chi_(2) = (chi(g^2) + chi(g)^2) / 2
    chi_(3) = chi(g)^3 / 6 + chi(g) chi(g^2) / 2 + chi(g^3) / 3

and the coefficient counts are group averages:

    R_d = mean_g chi_(d)(g) chi(g)      (equivariant maps of degree d)
    r_d = mean_g chi_(d)(g)             (invariant polynomials of degree d)
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi

import numpy as np

from .errors import DomainError, NumericalInconsistencyError
from .grouprep import (
    G8,
    GroupElement,
    GroupParams,
    element_matrix,
    enumerate_group,
    nf_power,
)

__all__ = [
    "MolienReport",
    "ROUNDING_TOL",
    "character",
    "character_closed_form",
    "character_trace",
    "chi_d",
    "chi_2",
    "chi_3",
    "molien_equivariant",
    "molien_invariant",
    "molien_report",
    "sector_sums",
    "cosine_sum",
]

ROUNDING_TOL = 1e-6


def character_closed_form(e, params: GroupParams) -> float:
    """Trace of the representing matrix from the exponents alone.

    Nonzero only for l1 in {0, 2} and l2 = m = 0, where with
    eta = k1 pi / a and nu = k2 pi / b

        H4:  (-1)^(l1/2) 4 cos(eta) cos(nu)
        G8:  (-1)^(l1/2) 4 (cos(eta) + cos(rho eta)) cos(nu)
    """
    e = GroupElement(*e)
    if e.l1 % 2 or e.l2 or e.m:
        return 0.0
    sign = -1.0 if e.l1 == 2 else 1.0
    eta = e.k1 * pi / params.a
    nu = e.k2 * pi / params.b
    if params.family == G8:
        return sign * 4.0 * (cos(eta) + cos(params.rho * eta)) * cos(nu)
    return sign * 4.0 * cos(eta) * cos(nu)


def character_trace(e, params: GroupParams) -> float:
    return float(np.trace(element_matrix(e, params)))


def character(e, params: GroupParams, method: str = "closed") -> float:
    if method == "closed":
        return character_closed_form(e, params)
    if method == "trace":
        return character_trace(e, params)
    raise DomainError(f"unknown character method {method!r}")


def chi_2(e, params: GroupParams, method: str = "closed") -> float:
    x = character(e, params, method)
    x2 = character(nf_power(e, 2, params), params, method)
    return 0.5 * (x2 + x * x)


def chi_3(e, params: GroupParams, method: str = "closed") -> float:
    x = character(e, params, method)
    x2 = character(nf_power(e, 2, params), params, method)
    x3 = character(nf_power(e, 3, params), params, method)
    return x**3 / 6.0 + 0.5 * x * x2 + x3 / 3.0


def chi_d(e, params: GroupParams, d: int, method: str = "closed") -> float:
    if d == 0:
        return 1.0
    if d == 1:
        return character(e, params, method)
    if d == 2:
        return chi_2(e, params, method)
    if d == 3:
        return chi_3(e, params, method)
    raise DomainError(f"degree {d} not supported (d <= 3)")


def _round(raw: float, what: str, tol: float = ROUNDING_TOL) -> int:
    n = round(raw)
    if abs(raw - n) >= tol:
        raise NumericalInconsistencyError(f"{what} = {raw!r} is not an integer")
    return int(n)


def _raw_sums(params: GroupParams, d: int, method: str) -> tuple[float, float]:
    equi = inv = 0.0
    elements = enumerate_group(params)
    for e in elements:
        x = character(e, params, method)
        xd = chi_d(e, params, d, method)
        equi += xd * x
        inv += xd
    n = len(elements)
    return equi / n, inv / n


def molien_equivariant(params: GroupParams, d: int, method: str = "closed") -> int:
    if d not in (1, 2, 3):
        raise DomainError(f"equivariant degree {d} not supported (1 <= d <= 3)")
    raw, _ = _raw_sums(params, d, method)
    return _round(raw, f"R_{d}")


def molien_invariant(params: GroupParams, d: int, method: str = "closed") -> int:
    if d not in (0, 1, 2, 3):
        raise DomainError(f"invariant degree {d} not supported (0 <= d <= 3)")
    _, raw = _raw_sums(params, d, method)
    return _round(raw, f"r_{d}")


@dataclass(frozen=True)
class MolienReport:
    params: GroupParams
    degree: int
    R_d: int
    r_d: int
    raw_sums: tuple[float, float]


def molien_report(params: GroupParams, d: int, method: str = "closed",
                  tol: float = ROUNDING_TOL) -> MolienReport:
    if d not in (0, 1, 2, 3):
        raise DomainError(f"degree {d} not supported (0 <= d <= 3)")
    raw = _raw_sums(params, d, method)
    return MolienReport(params, d, _round(raw[0], f"R_{d}", tol), _round(raw[1], f"r_{d}", tol), raw)


def sector_sums(params: GroupParams, d: int, method: str = "closed") -> dict[int, float]:
    """Unnormalized sums of chi_(d) chi over the l1 = 0 and l1 = 2 sectors (l2 = m = 0)."""
    sums = {0: 0.0, 2: 0.0}
    for e in enumerate_group(params):
        if e.l2 == 0 and e.m == 0 and e.l1 in sums:
            sums[e.l1] += chi_d(e, params, d, method) * character(e, params, method)
    return sums


def cosine_sum(w: int, l: int) -> float:
    """sum_{k=0}^{w-1} cos(2 l k pi / w); equals w if w | l and 0 otherwise."""
    if w < 1:
        raise DomainError("w must be >= 1")
    k = np.arange(w)
    return float(np.sum(np.cos(2.0 * l * k * np.pi / w)))
