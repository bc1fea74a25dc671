import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqforge.bifurcation import (
    FIX_K_COORDS,
    Y0,
    CubicTruncation,
    branch_continuation,
    branch_csv,
    embed,
    expected_spectrum,
    extract,
    fix_K_projection,
    genericity_check,
    phase_field,
    phase_field_8,
    phase_jacobian,
    phase_jacobian_at_y0,
    phase_jacobian_fd,
    restrict_to_fix,
    sphere_zero_search,
)
from eqforge.equivariants import PolyMap, canonical_E, sample_points
from eqforge.errors import ContinuationError, DomainError
from eqforge.grouprep import GroupParams, element_matrix, enumerate_group

coef = st.floats(-3, 3, allow_nan=False)


def unit(v):
    return np.asarray(v, float) / np.linalg.norm(v)


def random_unit(rng, n=4):
    return unit(rng.normal(size=n))


def test_projection_pair(g53):
    emb, ext = fix_K_projection()
    assert np.allclose(embed([1, 0, 0, 0]), np.eye(8)[0])
    assert np.allclose(ext @ emb, np.eye(4))
    qs = element_matrix((0, 0, 1, 1, 0), g53)
    y = np.array([0.3, -1.2, 0.7, 2.0])
    assert np.allclose(qs @ embed(y), embed(y))
    assert np.allclose(extract(embed(y)), y)


def test_restriction_agrees_with_ambient():
    rng = np.random.default_rng(0)
    R = CubicTruncation.of(*rng.normal(size=8))
    P4 = restrict_to_fix(R)
    for y in rng.normal(size=(10, 4)):
        assert np.allclose(embed(P4(y)), R(embed(y)), atol=1e-12)
    assert np.allclose(restrict_to_fix(PolyMap.zero(8, 3)).coeffs, 0)


def test_restriction_rejects_map_leaving_fix():
    bad = PolyMap.zero(8, 3)
    bad.coeffs[1, 0] = 1.0   # x1^3 in the second output
    with pytest.raises(RuntimeError):
        restrict_to_fix(bad)


def test_e1_restriction_pointwise():
    P4 = restrict_to_fix(canonical_E(1))
    rng = np.random.default_rng(2)
    for y in rng.normal(size=(5, 4)):
        assert np.allclose(P4(y), extract(canonical_E(1)(embed(y))))


def test_phase_examples():
    E5 = CubicTruncation.of(0, 0, 0, 0, 1)
    y = np.full(4, 0.5)
    p = phase_field(E5, y)
    assert np.allclose(p, [-1 / 8, -1 / 8, 1 / 8, 1 / 8])
    # tangential part of the closed-form E_5 row
    row = np.array([-y[1] * y[2] * y[3], -y[0] * y[2] * y[3], y[0] * y[1] * y[3], y[0] * y[1] * y[2]])
    assert np.allclose(p, row - (row @ y) * y)
    assert np.allclose(phase_field((1, 0, 0, 0, 0), [1, 0, 0, 0]), 0)
    assert np.allclose(phase_field((1.3, -2, 0.4, 7, 9), Y0), 0)


def test_phase_requires_unit_vector():
    with pytest.raises(DomainError):
        phase_field((1, 0, 0, 0, 0), [1.0, 1.0, 0, 0])


def test_tangency_and_linearity():
    rng = np.random.default_rng(4)
    for _ in range(1000 // 10):
        c = rng.normal(size=5)
        R = CubicTruncation(tuple(c))
        for _ in range(10):
            y = random_unit(rng)
            p = phase_field(R, y)
            assert abs(p @ y) < 1e-10
    y = random_unit(rng)
    c = rng.normal(size=5)
    parts = sum(ci * phase_field(tuple(np.eye(5)[i]), y) for i, ci in enumerate(c))
    assert np.allclose(phase_field(tuple(c), y), parts)


def test_phase_field_equivariance_g133(g133):
    rng = np.random.default_rng(9)
    group = enumerate_group(g133)
    sample = [group[i] for i in rng.choice(len(group), 32, replace=False)]
    R = CubicTruncation(tuple(rng.normal(size=5)))
    xs = np.array([unit(x) for x in sample_points(8)[:16]])
    for e in sample:
        g = element_matrix(e, g133)
        diff = phase_field_8(R, xs @ g.T) - phase_field_8(R, xs) @ g.T
        assert np.max(np.abs(diff)) < 1e-9


def test_analytic_vs_fd_jacobian():
    rng = np.random.default_rng(6)
    for _ in range(100):
        R = CubicTruncation(tuple(rng.normal(size=5)))
        y = random_unit(rng)
        assert np.max(np.abs(phase_jacobian(R, y) - phase_jacobian_fd(R, y))) < 1e-6


@pytest.mark.parametrize("c, expected", [
    ((1, 0, 0, 0, 0), [-2, -1, -1, -1]),
    ((1, 2, 3, 4, 5), [-2, 1, 2, 3]),
])
def test_y0_spectrum_examples(c, expected):
    rep = phase_jacobian_at_y0(CubicTruncation(c))
    assert np.allclose(np.sort(rep.eigenvalues.real), expected, atol=1e-8)
    assert np.allclose(rep.eigenvalues.imag, 0)
    assert rep.hyperbolic


def test_y0_spectrum_degenerate():
    rep = phase_jacobian_at_y0(CubicTruncation((0, 1, 2, 3, 4)))
    assert np.min(np.abs(rep.eigenvalues)) < 1e-12
    assert not rep.hyperbolic


@settings(max_examples=100, deadline=None)
@given(st.tuples(coef, coef, coef, coef, coef))
def test_y0_spectrum_formula(c):
    R = CubicTruncation(c)
    rep = phase_jacobian_at_y0(R)
    assert np.allclose(np.sort(rep.eigenvalues.real), expected_spectrum(R), atol=1e-8)
    assert np.linalg.norm(rep.zero) == pytest.approx(1.0, abs=1e-12)


def test_epsilon_does_not_enter_spectrum():
    a = phase_jacobian_at_y0(CubicTruncation((1, 2, 3, 4, 0))).eigenvalues
    b = phase_jacobian_at_y0(CubicTruncation((1, 2, 3, 4, 100))).eigenvalues
    assert np.allclose(np.sort(a.real), np.sort(b.real))


def test_report_json():
    obj = phase_jacobian_at_y0(CubicTruncation((1, 2, 3, 4, 5))).to_json_obj()
    assert obj["hyperbolic"] is True and obj["zero"] == [0, 0, 0, 1]
    assert obj["eigenvalues"] == [[-2, 0], [1, 0], [2, 0], [3, 0]]
    assert obj["phase_residual"] == 0.0


@pytest.mark.parametrize("c, violations", [
    ((1, 0, 0, 0, 0), ()),
    ((1, 1, 0, 0, 0), ("α = β",)),
    ((0, 1, 1, 1, 1), ("α = 0",)),
    ((2, 0, 2, 0, 0), ("α = γ",)),
    ((2, 0, 0, 2, 0), ("α = δ",)),
    ((1, 1, 1, 1, 0), ("α = β", "α = γ", "α = δ")),
])
def test_genericity(c, violations):
    res = genericity_check(c)
    assert res.violations == violations
    assert bool(res) == (not violations)


def test_genericity_tolerance():
    assert not genericity_check((1, 1 + 1e-13, 0, 0, 0))
    assert genericity_check((1, 1 + 1e-9, 0, 0, 0))


def test_genericity_eight_coefficients():
    # coupling alpha7 * alpha8 moves the (y1, y3) block off the diagonal
    assert genericity_check((1, 1, 0, 0, 0, 0, 0, 0)).violations == ("α = β",)
    assert genericity_check((1, 1, 0, 3, 0, 0, 1, 1))
    res = genericity_check((1, 2, 0, 2, 0, 0, 1, 1))
    assert res.violations == ("(δ-α)(β-α) = α7·α8",)
    res = genericity_check((1, 0, 0, 2, 0, 0, 1, -2))
    assert res.violations == ("β + δ = 2α",)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=8, max_size=8))
def test_eight_coefficient_genericity_matches_spectrum(c):
    R = CubicTruncation(tuple(c))
    rep = phase_jacobian_at_y0(R)
    if genericity_check(R, tol=1e-6):
        assert np.min(np.abs(rep.eigenvalues.real)) > 1e-9


@pytest.mark.parametrize("alpha, r, lam", [(1.0, 0.1, -0.01), (-2.0, 0.5, 0.5)])
def test_branch_examples(alpha, r, lam):
    pts = branch_continuation((alpha, 0.3, 0.7, -0.4, 1.1), r_max=r, steps=10)
    last = pts[-1]
    assert last.r == pytest.approx(r)
    assert last.lam == pytest.approx(lam, abs=1e-12)
    assert np.allclose(last.x, r * np.eye(8)[7], atol=1e-12)


def test_branch_law_and_confinement():
    rng = np.random.default_rng(12)
    for n in (5, 8):
        R = CubicTruncation(tuple(rng.uniform(-2, 2, n)))
        pts = branch_continuation(R, 1.0, 100)
        assert len(pts) == 100
        assert max(abs(p.lam + R.alpha * p.r**2) for p in pts) < 1e-9
        assert max(p.residual for p in pts) < 1e-10
        assert max(p.off_fix for p in pts) < 1e-12
        assert pts[0].r == pytest.approx(0.01)
        assert abs(pts[0].lam) < 1e-3 and np.linalg.norm(pts[0].x) < 0.011


def test_branch_fix_eigenvalues_reported():
    pts = branch_continuation((1, 2, 3, 4, 5), 1.0, 4)
    # at x = r y0: lambda + DR = r^2 (diag(delta, gamma, beta, 3 alpha) - alpha)
    for p in pts:
        assert np.allclose(np.sort(p.fix_eigenvalues.real), p.r**2 * np.array([1, 2, 2, 3]))


def test_branch_rejects_nongeneric():
    with pytest.raises(DomainError):
        branch_continuation((1, 1, 0, 0, 0))
    with pytest.raises(DomainError):
        branch_continuation((1, 0, 0, 0, 0), steps=0)


def test_branch_non_convergence():
    with pytest.raises(ContinuationError) as info:
        # an unreachable tolerance forces the iteration cap
        branch_continuation((1, 2, 3, 4, 5), 1.0, 3, max_iter=5, tol=-1.0)
    assert info.value.residual is not None


def test_branch_csv_format():
    pts = branch_continuation((1, 2, 3, 4, 5), 1.0, 3)
    text = branch_csv(pts)
    lines = text.split("\n")
    assert lines[0] == "r,lambda,x1,x2,x3,x4,x5,x6,x7,x8,residual"
    assert len(lines) == 5 and lines[-1] == "" and "\r" not in text
    assert [float(v) for v in lines[3].split(",")][:2] == [1.0, -1.0]


def test_sphere_zero_search_contains_pm_y0():
    zeros = sphere_zero_search((1, 2, 3, 4, 5))
    ys = np.array([z.y for z in zeros])
    for target in (Y0, -Y0):
        assert np.min(np.linalg.norm(ys - target, axis=1)) < 1e-9
    for i, a in enumerate(ys):
        assert np.min(np.linalg.norm(ys + a, axis=1)) < 1e-6
        for b in ys[i + 1:]:
            assert np.linalg.norm(a - b) > 1e-6
    for z in zeros:
        assert np.linalg.norm(phase_field((1, 2, 3, 4, 5), z.y)) < 1e-10
        assert z.eigenvalues.shape == (4,)


def test_sphere_zero_search_e1_axes():
    ys = np.array([z.y for z in sphere_zero_search((1, 0, 0, 0, 0))])
    for e in np.vstack([np.eye(4), -np.eye(4)]):
        assert np.min(np.linalg.norm(ys - e, axis=1)) < 1e-9


def test_truncation_validation():
    with pytest.raises(DomainError):
        CubicTruncation((1, 2, 3))
    with pytest.raises(DomainError):
        CubicTruncation((1, 2, 3, 4, float("nan")))
    R = CubicTruncation.of(1, 2, 3, 4, 5)
    assert (R.alpha, R.beta, R.gamma, R.delta, R.epsilon) == (1, 2, 3, 4, 5)
    assert not R.extended and CubicTruncation((0,) * 8).extended
    assert FIX_K_COORDS == (0, 2, 5, 7)
