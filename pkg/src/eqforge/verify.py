"""Self-check suites run by ``eqforge verify``.

Each check returns a :class:`CheckResult`; the suite runs them on a thread
pool whose size comes from the ``EQFORGE_THREADS`` environment variable.
Results are reported in registration order regardless of completion order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bifurcation import CubicTruncation, branch_continuation, genericity_check, phase_jacobian_at_y0
from .characters import character_closed_form, character_trace, molien_report, sector_sums
from .equivariants import canonical_basis_for, equivariant_basis, equivariance_residual, span_match
from .grouprep import (
    MATRIX_TOL,
    RANK_TOL,
    GroupParams,
    commutant_dimension,
    element_matrix,
    enumerate_group,
    generator_matrices,
    nf_multiply,
    relation_checks,
)
from .isotropy import classify_isotropy
from .modular import admissible_up_to, rho_for

__all__ = ["CheckResult", "Tolerances", "build_checks", "run_suite", "worker_count"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_json_obj(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class Tolerances:
    matrix: float = MATRIX_TOL
    rank: float = RANK_TOL
    genericity: float = 1e-12


@dataclass
class _Check:
    name: str
    fn: object
    args: tuple = field(default_factory=tuple)


def worker_count() -> int:
    raw = os.environ.get("EQFORGE_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _order(params: GroupParams, tol: Tolerances) -> tuple[bool, str]:
    n = len(enumerate_group(params))
    return n == params.order, f"{n} elements, expected {params.order}"


def _relations(params, tol):
    bad = [name for name, ok in relation_checks(params) if not ok]
    return not bad, "failed: " + ", ".join(bad) if bad else "all relations hold"


def _commutant(params, tol):
    dim = commutant_dimension(generator_matrices(params), params.dim, tol.rank)
    return dim == 1, f"commutant dimension {dim}"


def _oracle(params, tol, pairs):
    worst = 0.0
    for e1, e2 in pairs:
        lhs = element_matrix(nf_multiply(e1, e2, params), params)
        rhs = element_matrix(e1, params) @ element_matrix(e2, params)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst < tol.matrix, f"{len(pairs)} products, max deviation {worst:.3e}"


def _random_pairs(params, count, seed=0):
    group = enumerate_group(params)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(group), size=(count, 2))
    return [(group[i], group[j]) for i, j in idx]


def _isotropy(params, tol):
    classes = classify_isotropy(params, tol.rank)
    expected = (2, 2) if params.family == "H4" else (1, 4)
    got = (len(classes), classes[0].fixed_dim if classes else 0)
    dims = sorted({c.fixed_dim for c in classes})
    return got == expected and len(dims) == 1, f"{len(classes)} classes, fixed dims {dims}"


def _characters(params, tol):
    worst = max(abs(character_closed_form(e, params) - character_trace(e, params))
                for e in enumerate_group(params))
    sectors = sector_sums(params, 2)
    cancel = abs(sectors[0] + sectors[2])
    ok = worst < tol.matrix and cancel < 1e-9
    return ok, f"closed vs trace {worst:.3e}, d=2 sector imbalance {cancel:.3e}"


def _molien_vs_solver(params, tol):
    gens = generator_matrices(params)
    got = []
    for d in (1, 2, 3):
        rep = molien_report(params, d)
        dim = len(equivariant_basis(gens, params.dim, d, tol.rank))
        got.append((rep.R_d, dim))
    ok = all(r == n for r, n in got)
    return ok, "R_d vs nullspace dim: " + ", ".join(f"{r}/{n}" for r, n in got)


def _canonical_span(params, tol, fault):
    basis = canonical_basis_for(params.a)
    if fault:
        # negative control: perturb a single basis coefficient
        broken = basis[1].coeffs.copy()
        row, col = np.argwhere(broken != 0)[0]
        broken[row, col] += 1.0
        basis[1] = type(basis[1])(basis[1].n, basis[1].d, broken)
    solver = equivariant_basis(generator_matrices(params), 8, 3, tol.rank)
    match = span_match(solver, basis, tol.rank)
    worst = max(equivariance_residual(E, g) for E in basis for g in generator_matrices(params).values())
    return match and worst < tol.matrix, f"span_match={match}, max residual {worst:.3e}"


def _spectrum(params, tol):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(25):
        R = CubicTruncation(tuple(rng.uniform(-2, 2, 5)))
        if not genericity_check(R, tol.genericity):
            continue
        rep = phase_jacobian_at_y0(R)
        worst = max(worst, float(np.max(np.abs(np.sort(rep.eigenvalues.real) - rep.expected))))
    return worst < 1e-8, f"max eigenvalue deviation {worst:.3e}"


def _branch(params, tol):
    n = 8 if params.a == 5 else 5
    R = CubicTruncation(tuple(np.random.default_rng(11).uniform(-1.5, 1.5, n)))
    if not genericity_check(R, tol.genericity):
        return False, "sampled truncation is not generic"
    pts = branch_continuation(R, 1.0, 100)
    law = max(abs(p.lam + R.alpha * p.r**2) for p in pts)
    res = max(p.residual for p in pts)
    off = max(p.off_fix for p in pts)
    ok = law < 1e-9 and res < 1e-10 and off < 1e-12
    return ok, f"|lambda + alpha r^2| {law:.3e}, residual {res:.3e}, off-Fix {off:.3e}"


def _number_theory(limit):
    bad = []
    for a in admissible_up_to(limit):
        w = rho_for(a)
        if w.rho % 2 == 0 or (w.rho * w.rho + 1) % a:
            bad.append(a)
    return not bad, f"{len(admissible_up_to(limit))} values of a checked" + (f", failures {bad}" if bad else "")


def build_checks(pairs, quick=False, inject_fault=False, tol: Tolerances | None = None) -> list[_Check]:
    tol = tol or Tolerances()
    checks = [_Check("rho_for up to 1000", lambda: _number_theory(1000))]
    for a, b in pairs:
        groups = [GroupParams.h(a, b), GroupParams.g(a, b)]
        for p in groups:
            for label, fn in (("order", _order), ("relations", _relations),
                              ("commutant", _commutant), ("isotropy", _isotropy),
                              ("characters", _characters)):
                checks.append(_Check(f"{p} {label}", fn, (p, tol)))
        h, g = groups
        if not quick:
            sweep = [(x, y) for x in enumerate_group(h) for y in enumerate_group(h)]
            checks.append(_Check(f"{h} normal form oracle (full)", _oracle, (h, tol, sweep)))
        checks.append(_Check(f"{g} normal form oracle (sample)", _oracle,
                             (g, tol, _random_pairs(g, 500 if quick else 2000))))
        checks.append(_Check(f"{g} molien vs solver", _molien_vs_solver, (g, tol)))
        checks.append(_Check(f"{g} canonical basis span", _canonical_span, (g, tol, inject_fault)))
        checks.append(_Check(f"{g} branch continuation", _branch, (g, tol)))
    checks.append(_Check("y0 spectrum formula", _spectrum, (None, tol)))
    return checks


def _run(check: _Check) -> CheckResult:
    try:
        ok, detail = check.fn(*check.args)
    except Exception as exc:  # a crashing check is a failing check
        return CheckResult(check.name, False, f"{type(exc).__name__}: {exc}")
    return CheckResult(check.name, bool(ok), detail)


def run_suite(pairs=((5, 3), (13, 3)), quick=False, inject_fault=False,
              tol: Tolerances | None = None, workers: int | None = None) -> list[CheckResult]:
    checks = build_checks(pairs, quick, inject_fault, tol)
    with ThreadPoolExecutor(max_workers=workers or worker_count()) as pool:
        return list(pool.map(_run, checks))
