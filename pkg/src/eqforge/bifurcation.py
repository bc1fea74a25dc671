"""Cubic truncations restricted to Fix(<QS>), phase vector fields and the bifurcating branch.

Fix(K) for K = <QS> is the coordinate subspace x2 = x4 = x5 = x7 = 0; a point
there is written y = (x1, x3, x6, x8).  For R = sum_i alpha_i E_i the phase
field P_R(y) = R(y) - <R(y), y> y vanishes at y0 = (0, 0, 0, 1), and the
ambient Jacobian at y0 has eigenvalues -alpha+delta, -alpha+gamma,
-alpha+beta, -2 alpha.  Since R(y0) = alpha y0, the branch through y0 is
x(r) = r y0, lambda(r) = -alpha r^2.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .equivariants import PolyMap, canonical_E, sample_points
from .errors import ContinuationError, DomainError

__all__ = [
    "FIX_K_COORDS",
    "Y0",
    "CubicTruncation",
    "PhaseFieldReport",
    "BranchPoint",
    "SphereZero",
    "GenericityResult",
    "fix_K_projection",
    "embed",
    "extract",
    "restrict_to_fix",
    "phase_field",
    "phase_field_ambient",
    "phase_field_8",
    "phase_jacobian",
    "phase_jacobian_fd",
    "phase_jacobian_at_y0",
    "expected_spectrum",
    "genericity_check",
    "branch_continuation",
    "branch_csv",
    "sphere_zero_search",
    "HYPERBOLIC_TOL",
]

FIX_K_COORDS = (0, 2, 5, 7)
Y0 = np.array([0.0, 0.0, 0.0, 1.0])
HYPERBOLIC_TOL = 1e-8
UNIT_TOL = 1e-9

_EMBED = np.zeros((8, 4))
_EMBED[list(FIX_K_COORDS), range(4)] = 1.0
_EMBED.setflags(write=False)


def fix_K_projection() -> tuple[np.ndarray, np.ndarray]:
    """(embedding R^4 -> R^8, extraction R^8 -> R^4) as matrices."""
    return _EMBED.copy(), _EMBED.T.copy()


def embed(y) -> np.ndarray:
    return np.asarray(y, dtype=float) @ _EMBED.T


def extract(x) -> np.ndarray:
    return np.asarray(x, dtype=float) @ _EMBED


@dataclass(frozen=True)
class CubicTruncation:
    """R = sum_i coefficients[i] E_{i+1}; 5 coefficients (a > 5) or 8 (a = 5)."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if len(coeffs) not in (5, 8):
            raise DomainError(f"need 5 or 8 coefficients, got {len(coeffs)}")
        if not all(np.isfinite(coeffs)):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def of(cls, *coefficients) -> "CubicTruncation":
        return cls(tuple(coefficients))

    alpha = property(lambda self: self.coefficients[0])
    beta = property(lambda self: self.coefficients[1])
    gamma = property(lambda self: self.coefficients[2])
    delta = property(lambda self: self.coefficients[3])
    epsilon = property(lambda self: self.coefficients[4])

    @property
    def extended(self) -> bool:
        return len(self.coefficients) == 8

    @cached_property
    def polymap(self) -> PolyMap:
        total = PolyMap.zero(8, 3)
        for i, c in enumerate(self.coefficients, start=1):
            if c:
                total = total + c * canonical_E(i)
        return total

    @cached_property
    def restricted(self) -> PolyMap:
        return restrict_to_fix(self)

    def __call__(self, x):
        return self.polymap(x)


def restrict_to_fix(R) -> PolyMap:
    """The cubic map y -> extract(R(embed(y))) on R^4.

    Raises RuntimeError if R does not map Fix(K) into itself, which would
    contradict equivariance.
    """
    P = R.polymap if isinstance(R, CubicTruncation) else R
    full = P.substitute(_EMBED)
    off = [i for i in range(8) if i not in FIX_K_COORDS]
    scale = max(1.0, float(np.abs(full.coeffs).max(initial=0.0)))
    if np.abs(full.coeffs[off]).max(initial=0.0) > 1e-12 * scale:
        raise RuntimeError("cubic map does not preserve Fix(K)")
    return PolyMap(4, P.d, full.coeffs[list(FIX_K_COORDS)])


def _as_restricted(R) -> PolyMap:
    if isinstance(R, CubicTruncation):
        return R.restricted
    if isinstance(R, PolyMap):
        return R if R.n == 4 else restrict_to_fix(R)
    return CubicTruncation(tuple(R)).restricted


def phase_field_ambient(P4: PolyMap, y) -> np.ndarray:
    """P(y) - <P(y), y> y without the unit-sphere check."""
    y = np.asarray(y, dtype=float)
    v = P4(y)
    return v - np.sum(v * y, axis=-1, keepdims=True) * y


def phase_field(R, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if abs(np.linalg.norm(y) - 1.0) > UNIT_TOL:
        raise DomainError(f"|y| = {np.linalg.norm(y)!r} is not on the unit sphere")
    return phase_field_ambient(_as_restricted(R), y)


def phase_field_8(R, x) -> np.ndarray:
    """Phase field of the full 8-dimensional cubic map."""
    P = R.polymap if isinstance(R, CubicTruncation) else R
    x = np.asarray(x, dtype=float)
    v = P(x)
    return v - np.sum(v * x, axis=-1, keepdims=True) * x


def phase_jacobian(R, y) -> np.ndarray:
    """Analytic ambient Jacobian of y -> P(y) - <P(y), y> y."""
    P4 = _as_restricted(R)
    y = np.asarray(y, dtype=float)
    v = P4(y)
    dp = P4.jacobian(y)
    grad = dp.T @ y + v  # gradient of <P(y), y>
    return dp - np.outer(y, grad) - float(v @ y) * np.eye(len(y))


def phase_jacobian_fd(R, y, step: float = 1e-5) -> np.ndarray:
    P4 = _as_restricted(R)
    y = np.asarray(y, dtype=float)
    n = len(y)
    jac = np.empty((n, n))
    for k in range(n):
        h = np.zeros(n)
        h[k] = step
        jac[:, k] = (phase_field_ambient(P4, y + h) - phase_field_ambient(P4, y - h)) / (2 * step)
    return jac


def expected_spectrum(R: CubicTruncation) -> np.ndarray:
    """Closed-form eigenvalues at y0, sorted: -a+b, -a+g, -a+d, -2a."""
    a, b, g, d = R.coefficients[:4]
    return np.sort([-a + d, -a + g, -a + b, -2 * a])


def _is_hyperbolic(eigs, tol=HYPERBOLIC_TOL) -> bool:
    return bool(np.all(np.abs(np.real(eigs)) > tol))


@dataclass
class PhaseFieldReport:
    zero: np.ndarray
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    hyperbolic: bool
    jacobian_fd: np.ndarray | None = None
    expected: np.ndarray | None = None
    phase_residual: float | None = None

    def to_json_obj(self) -> dict:
        eigs = sorted(self.eigenvalues, key=lambda z: (z.real, z.imag))
        obj = {
            "zero": [float(v) for v in self.zero],
            "jacobian": [[float(v) for v in row] for row in self.jacobian],
            "eigenvalues": [[float(z.real), float(z.imag)] for z in eigs],
            "hyperbolic": bool(self.hyperbolic),
        }
        if self.phase_residual is not None:
            obj["phase_residual"] = float(self.phase_residual)
        if self.jacobian_fd is not None:
            obj["jacobian_fd_deviation"] = float(np.max(np.abs(self.jacobian - self.jacobian_fd)))
        if self.expected is not None:
            obj["expected_eigenvalues"] = [float(v) for v in self.expected]
        return obj


def phase_jacobian_at_y0(R: CubicTruncation) -> PhaseFieldReport:
    """Spectrum of the phase-field Jacobian at y0, analytic and finite-difference."""
    if not isinstance(R, CubicTruncation):
        R = CubicTruncation(tuple(R))
    residual = np.linalg.norm(phase_field(R, Y0))
    if residual > 1e-10:
        raise RuntimeError(f"y0 is not a zero of the phase field (|P(y0)| = {residual})")
    jac = phase_jacobian(R, Y0)
    jac_fd = phase_jacobian_fd(R, Y0)
    if np.max(np.abs(jac - jac_fd)) > 1e-6:
        raise RuntimeError("analytic and finite-difference Jacobians disagree")
    eigs = np.linalg.eigvals(jac)
    expected = None if R.extended else expected_spectrum(R)
    return PhaseFieldReport(Y0.copy(), jac, eigs, _is_hyperbolic(eigs), jac_fd, expected,
                            float(residual))


@dataclass(frozen=True)
class GenericityResult:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def genericity_check(R, tol: float = 1e-12) -> GenericityResult:
    """Exact-coefficient conditions for y0 to be a hyperbolic zero.

    Five coefficients: alpha != 0, beta, gamma, delta.  With eight, E_7 and
    E_8 couple the y1/y3 directions through the block
    [[delta - alpha, alpha_7], [alpha_8, beta - alpha]], which must have
    no eigenvalue on the imaginary axis.
    """
    if not isinstance(R, CubicTruncation):
        R = CubicTruncation(tuple(R))
    a, b, g, d = R.coefficients[:4]
    violations = []
    if abs(a) <= tol:
        violations.append("α = 0")
    coupling = R.coefficients[6] * R.coefficients[7] if R.extended else 0.0
    if coupling == 0.0:
        for name, other in (("β", b), ("γ", g), ("δ", d)):
            if abs(a - other) <= tol:
                violations.append(f"α = {name}")
    else:
        if abs(a - g) <= tol:
            violations.append("α = γ")
        det = (d - a) * (b - a) - coupling
        trace = (d - a) + (b - a)
        if abs(det) <= tol:
            violations.append("(δ-α)(β-α) = α7·α8")
        elif det > 0 and abs(trace) <= tol:
            violations.append("β + δ = 2α")
    return GenericityResult(not violations, tuple(violations))


@dataclass
class BranchPoint:
    r: float
    lam: float
    x: np.ndarray
    residual: float
    fix_eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def off_fix(self) -> float:
        off = [i for i in range(8) if i not in FIX_K_COORDS]
        return float(np.max(np.abs(self.x[off])))


def _branch_residual(R: CubicTruncation, lam: float, x: np.ndarray) -> float:
    return float(np.linalg.norm(lam * x + R.polymap(x)))


def branch_continuation(R, r_max: float = 1.0, steps: int = 100,
                        max_iter: int = 50, tol: float = 1e-14) -> list[BranchPoint]:
    """Newton continuation of lambda x + R(x) = 0 inside Fix(K) along |x| = r.

    Unknowns are (y, lambda) in Fix(K) x R with the constraint |y| = r;
    the predictor scales the previous point, starting from r y0 and
    lambda = -alpha r^2.
    """
    if not isinstance(R, CubicTruncation):
        R = CubicTruncation(tuple(R))
    check = genericity_check(R)
    if not check:
        raise DomainError("non-generic truncation: " + ", ".join(check.violations))
    if steps < 1 or r_max <= 0:
        raise DomainError("need steps >= 1 and r_max > 0")
    P4 = R.restricted
    points = []
    y_prev, lam_prev, r_prev = Y0.copy(), -R.alpha, 1.0
    for k in range(1, steps + 1):
        r = r_max * k / steps
        y = y_prev * (r / r_prev)
        lam = lam_prev * (r / r_prev) ** 2
        for it in range(max_iter + 1):
            res = np.concatenate([lam * y + P4(y), [0.5 * (y @ y - r * r)]])
            if np.linalg.norm(res) <= tol * max(1.0, r**3):
                break
            if it == max_iter:
                last = float(np.linalg.norm(res))
                raise ContinuationError(
                    f"Newton did not converge at r={r} (residual {last:.3e})", last)
            jac = np.zeros((5, 5))
            jac[:4, :4] = lam * np.eye(4) + P4.jacobian(y)
            jac[:4, 4] = y
            jac[4, :4] = y
            delta = np.linalg.solve(jac, -res)
            y = y + delta[:4]
            lam = lam + delta[4]
        x = embed(y)
        eigs = np.linalg.eigvals(lam * np.eye(4) + P4.jacobian(y))
        points.append(BranchPoint(r, float(lam), x, _branch_residual(R, lam, x), eigs))
        y_prev, lam_prev, r_prev = y, lam, r
    return points


def branch_csv(points) -> str:
    """CSV text: header r,lambda,x1..x8,residual; LF line endings; 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "lambda"] + [f"x{i}" for i in range(1, 9)] + ["residual"])
    for p in points:
        row = [p.r, p.lam, *p.x, p.residual]
        writer.writerow([format(float(v), ".17g") for v in row])
    return buf.getvalue()


@dataclass
class SphereZero:
    y: np.ndarray
    eigenvalues: np.ndarray

    @property
    def hyperbolic(self) -> bool:
        return _is_hyperbolic(self.eigenvalues)


def _sphere_newton(P4, y, max_iter=100, tol=1e-13):
    y = y / np.linalg.norm(y)
    mu = float(P4(y) @ y)
    for _ in range(max_iter):
        res = np.concatenate([P4(y) - mu * y, [0.5 * (y @ y - 1.0)]])
        if np.linalg.norm(res) < tol:
            return y / np.linalg.norm(y)
        jac = np.zeros((5, 5))
        jac[:4, :4] = P4.jacobian(y) - mu * np.eye(4)
        jac[:4, 4] = -y
        jac[4, :4] = y
        step = np.linalg.lstsq(jac, -res, rcond=None)[0]
        y = y + step[:4]
        mu = mu + step[4]
    return None


def sphere_zero_search(R, seed_count: int = 64) -> list[SphereZero]:
    """Zeros of the phase field on S^3 from deterministic seeds (plus +-e_i)."""
    P4 = _as_restricted(R)
    seeds = list(sample_points(4, seed_count, seed=1)) + list(np.eye(4)) + list(-np.eye(4))
    found: list[np.ndarray] = []

    def add(y):
        if all(np.linalg.norm(y - z) > 1e-6 for z in found):
            found.append(y)

    for seed in seeds:
        if np.linalg.norm(seed) == 0:
            continue
        y = _sphere_newton(P4, np.asarray(seed, dtype=float))
        if y is None or np.linalg.norm(phase_field_ambient(P4, y)) > 1e-10:
            continue
        add(y)
        add(-y)
    found.sort(key=lambda z: tuple(np.round(-z, 9)))
    return [SphereZero(y, np.linalg.eigvals(phase_jacobian(P4, y))) for y in found]
