"""Command-line interface: ``eqforge <command> [options]``.

Exit codes: 0 success, 1 failed verification, 2 invalid parameters,
3 genericity violation, 4 numerical ambiguity.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bifurcation import (
    CubicTruncation,
    branch_continuation,
    branch_csv,
    genericity_check,
    phase_jacobian_at_y0,
)
from .characters import ROUNDING_TOL, molien_report
from .equivariants import canonical_basis_for, equivariant_basis, equivariance_residual, span_match
from .errors import DomainError, NumericalAmbiguityError, NumericalInconsistencyError
from .grouprep import G8, MATRIX_TOL, RANK_TOL, GroupParams, generator_matrices, relation_checks
from .isotropy import classify_isotropy, fixed_space
from .verify import Tolerances, run_suite

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NONGENERIC, EXIT_AMBIGUOUS = 0, 1, 2, 3, 4
SPEC_VERSION = "1"
COMMANDS = ("group", "isotropy", "molien", "equivariants", "bifurcate", "verify")


class GenericityViolation(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: str = "g"
    a: int = 5
    b: int = 3
    degree: int | None = None
    coefficients: tuple[float, ...] = ()
    output_path: str | None = None
    csv_path: str | None = None
    format: str = "json"
    r_max: float = 1.0
    steps: int = 100
    quick: bool = False
    inject_fault: bool = False
    cross_check: bool = True
    pairs: tuple[tuple[int, int], ...] = ((5, 3), (13, 3))
    matrix_tol: float = MATRIX_TOL
    rank_tol: float = RANK_TOL
    rounding_tol: float = ROUNDING_TOL
    genericity_tol: float = 1e-12
    extra: dict = field(default_factory=dict)

    def params(self) -> GroupParams:
        if self.family == "h":
            return GroupParams.h(self.a, self.b)
        return GroupParams.g(self.a, self.b)


# ------------------------------------------------------------------- output

def _encode(obj, indent: int, level: int = 0) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(k), indent)}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_encode(v, indent) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"non-finite float {x} in report")
        if x == 0.0:
            x = 0.0  # drop the sign of -0.0
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits, trailing newline."""
    return _encode({"specversion": SPEC_VERSION, **report}, 2) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _matrix(m) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(m)]


# ----------------------------------------------------------------- commands

def cmd_group(cfg: RunConfig) -> dict:
    params = cfg.params()
    return {
        "command": "group",
        "group": str(params),
        "a": params.a,
        "b": params.b,
        "order": params.order,
        "rho": params.rho,
        "generator_matrices": {k: _matrix(v) for k, v in generator_matrices(params).items()},
        "relation_check": [{"relation": name, "result": "pass" if ok else "fail"}
                           for name, ok in relation_checks(params)],
    }


def cmd_isotropy(cfg: RunConfig) -> dict:
    params = cfg.params()
    classes = []
    for c in classify_isotropy(params, cfg.rank_tol):
        classes.append({
            "representative": list(c.representative),
            "size": len(c),
            "fixed_dim": c.fixed_dim,
            "fixed_basis": _matrix(fixed_space(c.representative, params, cfg.rank_tol).basis),
            "members": [list(e) for e in c.members],
            "witnesses": [{"member": list(e), "conjugator": list(w)}
                          for e, w in c.conjugator_witnesses.items()],
        })
    return {"command": "isotropy", "group": str(params), "class_count": len(classes), "classes": classes}


def cmd_molien(cfg: RunConfig) -> dict:
    params = cfg.params()
    top = 3 if cfg.degree is None else cfg.degree
    if not 1 <= top <= 3:
        raise DomainError(f"unsupported degree {top}: only 1 <= d <= 3")
    reports = [molien_report(params, d, tol=cfg.rounding_tol) for d in range(0, top + 1)]
    out = {"command": "molien", "group": str(params)}
    out["R"] = [r.R_d for r in reports[1:]]
    for r in reports:
        if r.degree:
            out[f"R_{r.degree}"] = r.R_d
        out[f"r_{r.degree}"] = r.r_d
    out["raw_sums"] = {f"d={r.degree}": list(r.raw_sums) for r in reports}
    if cfg.cross_check:
        gens = generator_matrices(params)
        dims = [len(equivariant_basis(gens, params.dim, d, cfg.rank_tol)) for d in range(1, top + 1)]
        out["cross_check"] = {"nullspace_dims": dims, "agree": dims == out["R"]}
    return out


def cmd_equivariants(cfg: RunConfig) -> dict:
    params = cfg.params()
    d = 3 if cfg.degree is None else cfg.degree
    if not 1 <= d <= 3:
        raise DomainError(f"unsupported degree {d}: only 1 <= d <= 3")
    gens = generator_matrices(params)
    basis = equivariant_basis(gens, params.dim, d, cfg.rank_tol)
    out = {
        "command": "equivariants",
        "group": str(params),
        "degree": d,
        "dimension": len(basis),
        "basis": [P.to_json_obj() for P in basis],
    }
    if params.family == G8 and d == 3:
        canon = canonical_basis_for(params.a)
        out["canonical"] = {
            "names": [f"E{i}" for i in range(1, len(canon) + 1)],
            "span_match": span_match(basis, canon, cfg.rank_tol),
            "max_residual": max(equivariance_residual(E, g) for E in canon for g in gens.values()),
        }
    return out


def cmd_bifurcate(cfg: RunConfig) -> dict:
    params = GroupParams.g(cfg.a, cfg.b)
    n = len(cfg.coefficients)
    if n not in (5, 8) or (n == 8 and params.a != 5):
        raise DomainError(f"need 5 coefficients (or 8 when a = 5), got {n}")
    R = CubicTruncation(tuple(cfg.coefficients))
    check = genericity_check(R, cfg.genericity_tol)
    if not check:
        raise GenericityViolation("non-generic coefficients: " + ", ".join(check.violations))
    report = phase_jacobian_at_y0(R)
    points = branch_continuation(R, cfg.r_max, cfg.steps)
    if cfg.csv_path:
        _emit(branch_csv(points), cfg.csv_path)
    out = {
        "command": "bifurcate",
        "group": str(params),
        "coefficients": list(R.coefficients),
        "phase_field": report.to_json_obj(),
        "branch": {
            "steps": len(points),
            "r_max": cfg.r_max,
            "max_lambda_law_deviation": max(abs(p.lam + R.alpha * p.r**2) for p in points),
            "max_residual": max(p.residual for p in points),
            "max_off_fix": max(p.off_fix for p in points),
            "csv": cfg.csv_path,
        },
    }
    if cfg.format == "csv":
        out["_csv_text"] = branch_csv(points)
    return out


def cmd_verify(cfg: RunConfig) -> dict:
    tol = Tolerances(cfg.matrix_tol, cfg.rank_tol, cfg.genericity_tol)
    results = run_suite(cfg.pairs, cfg.quick, cfg.inject_fault, tol)
    return {
        "command": "verify",
        "quick": cfg.quick,
        "inject_fault": cfg.inject_fault,
        "passed": all(r.passed for r in results),
        "checks": [r.to_json_obj() for r in results],
    }


_DISPATCH = {
    "group": cmd_group,
    "isotropy": cmd_isotropy,
    "molien": cmd_molien,
    "equivariants": cmd_equivariants,
    "bifurcate": cmd_bifurcate,
    "verify": cmd_verify,
}


# ------------------------------------------------------------------ parsing

def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.replace(",", " ").split())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad coefficient list {text!r}") from exc


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a,b but got {text!r}") from exc
    return a, b


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"eqforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=True, degree=False):
        if family:
            p.add_argument("--family", choices=("h", "g"), default="g",
                           help="h: H_{a,b} in SO(4); g: G_{a,b} in O(8) (default)")
        p.add_argument("--a", type=int, default=5)
        p.add_argument("--b", type=int, default=3)
        if degree:
            p.add_argument("--degree", type=int, default=None)
        p.add_argument("--output", "-o", default=None, help="write JSON here instead of stdout")
        p.add_argument("--matrix-tol", type=float, default=MATRIX_TOL)
        p.add_argument("--rank-tol", type=float, default=RANK_TOL)

    common(sub.add_parser("group", help="orders, generators and relation checks"))
    common(sub.add_parser("isotropy", help="isotropy classes of nontrivial fixers"))
    p = sub.add_parser("molien", help="Molien coefficients R_d and r_d for d <= 3")
    common(p, degree=True)
    p.add_argument("--rounding-tol", type=float, default=ROUNDING_TOL)
    p.add_argument("--no-cross-check", dest="cross_check", action="store_false",
                   help="skip the nullspace-dimension comparison")
    common(sub.add_parser("equivariants", help="equivariant polynomial basis"), degree=True)

    p = sub.add_parser("bifurcate", help="phase-field spectrum at y0 and branch continuation")
    common(p, family=False)
    p.add_argument("--coefficients", type=_float_list, required=True,
                   help="alpha,beta,gamma,delta,epsilon (plus alpha6..alpha8 when a=5)")
    p.add_argument("--csv", dest="csv_path", default=None, help="write the branch CSV here")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="what goes to --output/stdout")
    p.add_argument("--r-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--genericity-tol", type=float, default=1e-12)

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--quick", action="store_true", help="skip the full H_{a,b} product sweep")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--pair", dest="pairs", type=_pair, action="append", default=None,
                   help="(a,b) to check, repeatable; default 5,3 and 13,3")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--matrix-tol", type=float, default=MATRIX_TOL)
    p.add_argument("--rank-tol", type=float, default=RANK_TOL)
    p.add_argument("--genericity-tol", type=float, default=1e-12)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    for name in ("family", "a", "b", "degree", "coefficients", "csv_path", "format", "r_max",
                 "steps", "quick", "inject_fault", "cross_check", "matrix_tol", "rank_tol",
                 "rounding_tol", "genericity_tol"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    cfg.output_path = ns.output
    if getattr(ns, "pairs", None):
        cfg.pairs = tuple(ns.pairs)
    return cfg


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a command; returns (exit code, text to emit)."""
    report = _DISPATCH[cfg.command](cfg)
    csv_text = report.pop("_csv_text", None)
    text = csv_text if csv_text is not None else dumps(report)
    code = EXIT_FAILED if report.get("passed") is False else EXIT_OK
    return code, text


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = config_from_args(ns)
    try:
        code, text = run(cfg)
    except GenericityViolation as exc:
        print(f"eqforge: {exc}", file=sys.stderr)
        return EXIT_NONGENERIC
    except (NumericalAmbiguityError, NumericalInconsistencyError) as exc:
        print(f"eqforge: numerical ambiguity: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except DomainError as exc:
        print(f"eqforge: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(text, cfg.output_path)
    return code


if __name__ == "__main__":
    sys.exit(main())
