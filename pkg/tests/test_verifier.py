import dataclasses
import warnings
import zlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactsoliton.frame_geometry import StructureFunctions
from contactsoliton.model_spaces import ChartPoint, SasakianModel, euclidean_chart, heisenberg_chart, nonsasakian_model, sasakian_model
from contactsoliton.soliton_solver import Affine, delta_coefficients, solve_potential, solve_sasakian_potential
from contactsoliton.verifier import (
    Coordinates,
    FDConfig,
    FDInstabilityWarning,
    ResidualReport,
    Scheme,
    axis_residual,
    chart_residual_field,
    chart_soliton_residual,
    frame_connection_fd,
    frame_killing_form,
    frame_ricci_fd,
    lie_derivative_fd,
    origin_residual,
    soliton_frame_residual,
    system_residuals,
    to_frame,
)

GRID = np.linspace(-2, 2, 41)
ORIGIN = ChartPoint(0.0, 0.0, 0.0)


def _smooth_field(x):
    return np.array([np.sin(x[0] + 2 * x[2]), np.exp(0.5 * x[1]) * np.cos(x[2]), x[0] * x[1] * np.sin(x[2])])


def _smooth_field_killing(x):
    """Analytic d_a v_b + d_b v_a for the flat metric."""
    u1, u2, t = x
    J = np.array([
        [np.cos(u1 + 2 * t), 0, 2 * np.cos(u1 + 2 * t)],
        [0, 0.5 * np.exp(0.5 * u2) * np.cos(t), -np.exp(0.5 * u2) * np.sin(t)],
        [u2 * np.sin(t), u1 * np.sin(t), u1 * u2 * np.cos(t)],
    ])
    return J + J.T


def test_residual_report_pass_flag():
    r = ResidualReport("x", {"a": 0.5, "b": 1e-3}, tolerance=1.0)
    assert r.passed and r.max_residual == 0.5
    assert not ResidualReport("x", {"a": 1.0}, tolerance=1.0).passed


def test_fd_config_validation():
    with pytest.raises(ValueError):
        FDConfig(step=0.0)
    with pytest.raises(ValueError):
        FDConfig(tolerance=-1.0)


def test_frame_residual_xi_xi_is_independent_of_field():
    sf, ric = nonsasakian_model(0.5, 1.0)
    rng = np.random.default_rng(0)
    for _ in range(10):
        f = rng.normal(size=2)
        df = rng.normal(size=(3, 2))
        rep = soliton_frame_residual(sf, ric, f, df, lam=0.3)
        assert rep.values["xi,xi"] == pytest.approx(2 * (1 - 0.25) - 0.3, abs=1e-15)
    assert soliton_frame_residual(sf, ric, f, df, lam=1.5).values["xi,xi"] == 0


def test_frame_residual_e1_e2_component():
    sf = StructureFunctions(0.3, 0.0, 0.0, 0.5)
    _, ric = nonsasakian_model(0.5, -0.6)
    df = np.array([[0.0, 0.7], [-0.2, 0.0], [0.0, 0.0]])
    rep = soliton_frame_residual(sf, ric, (1.0, 2.0), df, 1.5)
    assert rep.values["e1,e2"] == pytest.approx(0.5 * (0.7 - 0.2))


def test_frame_residual_zero_field_on_heisenberg():
    conn, ric, _ = sasakian_model(0.0)
    rep = soliton_frame_residual(SasakianModel(0.0).structure(), ric, (0, 0), np.zeros((3, 2)), 2.0)
    assert rep.values["e1,e1"] == -4.0
    assert rep.values["e2,e2"] == -4.0
    assert not rep.passed


@settings(max_examples=100)
@given(st.floats(0.05, 3), st.floats(-4, 4), st.lists(st.floats(-3, 3), min_size=8, max_size=8))
def test_frame_assembly_agrees_with_first_order_system(mu, beta, nums):
    # the two routes agree up to the 1/2 on the mixed components
    sf, ric = nonsasakian_model(mu, beta)
    p = delta_coefficients(mu, beta)
    f = np.array(nums[:2])
    df = np.array(nums[2:]).reshape(3, 2)
    rep = soliton_frame_residual(sf, ric, f, df, p.lam)
    sys_r = system_residuals(p, f, df)
    got = [2 * rep.values["e1,e2"], rep.values["e1,e1"], rep.values["e2,e2"], 2 * rep.values["xi,e1"], 2 * rep.values["xi,e2"]]
    np.testing.assert_allclose(got, sys_r, atol=1e-12)
    assert rep.values["xi,xi"] == pytest.approx(0, abs=1e-12)


def test_frame_assembly_for_sasakian_matches_group_system():
    rng = np.random.default_rng(4)
    for c1 in (-1.0, 0.0, 2.0, 4.0):
        _, ric, _ = sasakian_model(c1)
        sf = SasakianModel(c1).structure()
        f = rng.normal(size=2)
        df = rng.normal(size=(3, 2))
        rep = soliton_frame_residual(sf, ric, f, df, 2.0)
        k = 4 - 2 * c1
        assert rep.values["e1,e1"] == pytest.approx(df[0, 0] - k)
        assert rep.values["e2,e2"] == pytest.approx(df[1, 1] - k)
        assert 2 * rep.values["xi,e1"] == pytest.approx(df[2, 0] - (c1 - 2) * f[1])
        assert 2 * rep.values["xi,e2"] == pytest.approx(df[2, 1] + (c1 - 2) * f[0])


def _cases():
    for mu in (0.5, 1.0, 2.0):
        for beta in (-4.0, -1.0, 0.0, 1.0):
            yield f"mu={mu},beta={beta}", (lambda C, D, mu=mu, beta=beta: solve_potential(mu, beta, C, D)), delta_coefficients(mu, beta)
    for c1 in (-1.0, 0.0, 2.0, 4.0):
        yield f"c1={c1}", (lambda C, D, c1=c1: solve_sasakian_potential(c1, C, D)), SasakianModel(c1)


@pytest.mark.parametrize("label, make, params", list(_cases()), ids=[c[0] for c in _cases()])
def test_every_family_passes_origin_and_axis(label, make, params):
    rng = np.random.default_rng(zlib.crc32(label.encode()))
    for C, D in rng.uniform(-3, 3, (100, 2)):
        pf = make(C, D)
        o = origin_residual(pf, params)
        a = axis_residual(pf, params, GRID)
        assert o.passed and o.max_residual < 1e-10, (C, D, o.residuals)
        assert a.passed and a.max_residual < 1e-9, (C, D, a.residuals)
        assert a.points_checked == 41


def test_perturbed_constant_fails():
    p = delta_coefficients(0.5, 0.0)
    pf = solve_potential(0.5, 0.0, 1.0, 0.0)
    bad = dataclasses.replace(pf, A1=pf.A1.shifted(0.1))
    rep = origin_residual(bad, p)
    assert not rep.passed
    # xi(f2) + delta4 f1 picks up delta4 * 0.1
    assert rep.max_residual >= 0.1 * abs(p.delta4) - 1e-15


def test_zero_field_residuals():
    pf = solve_potential(2.0, 0.0, 0.0, 0.0)
    nil = Affine(0.0, 0.0, 0.0)
    zero = dataclasses.replace(pf, A1=nil, A2=nil, B1=nil, B2=nil)
    rep = origin_residual(zero, delta_coefficients(2.0, 0.0))
    assert list(rep.residuals.values()) == [0.0, 6.0, 6.0, 0.0, 0.0]


def test_param_mismatch_rejected():
    pf = solve_potential(0.5, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        origin_residual(pf, delta_coefficients(2.0, 0.0))
    with pytest.raises(ValueError):
        origin_residual(pf, SasakianModel(0.0))
    with pytest.raises(ValueError):
        origin_residual(solve_sasakian_potential(0.0, 1, 0), SasakianModel(1.0))


def test_axis_flat_special_is_exact():
    pf = solve_potential(1.0, 0.0, 5.0, 1.0)
    rep = axis_residual(pf, delta_coefficients(1.0, 0.0), [-1.0, 0.0, 1.0])
    assert rep.max_residual == 0.0


def test_axis_rejects_nonfinite_grid():
    pf = solve_potential(1.0, 0.0, 5.0, 1.0)
    with pytest.raises(ValueError):
        axis_residual(pf, delta_coefficients(1.0, 0.0), [0.0, float("inf")])


def test_lie_derivative_euclidean_homothety():
    L = lie_derivative_fd(euclidean_chart(), lambda x: np.asarray(x, float), ChartPoint(0.4, -1.0, 2.0))
    np.testing.assert_allclose(L, 2 * np.eye(3), atol=1e-9)


def test_lie_derivative_second_order_convergence():
    chart = euclidean_chart()
    x = np.array([0.3, -0.4, 0.7])
    exact = _smooth_field_killing(x)
    errs = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FDInstabilityWarning)
        for h in (2e-2, 1e-2, 5e-3):
            errs.append(np.max(np.abs(lie_derivative_fd(chart, _smooth_field, x, FDConfig(step=h)) - exact)))
            assert np.max(np.abs(lie_derivative_fd(chart, _smooth_field, x, FDConfig(step=h, scheme=Scheme.RICHARDSON_4)) - exact)) < errs[-1]
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_lie_derivative_flags_large_step():
    with pytest.warns(FDInstabilityWarning):
        lie_derivative_fd(euclidean_chart(), _smooth_field, [0.3, -0.4, 0.7], FDConfig(step=0.2))


def test_reeb_field_is_killing():
    chart = heisenberg_chart()
    xi = lambda x: chart.frame(x)[2]  # noqa: E731
    for p in np.random.default_rng(5).uniform(-2, 2, (100, 3)):
        assert np.max(np.abs(lie_derivative_fd(chart, xi, p))) < 1e-6


def test_lie_derivative_of_e1_matches_frame_side():
    chart = heisenberg_chart()
    conn, _, _ = sasakian_model(0.0)
    e1 = lambda x: chart.frame(x)[0]  # noqa: E731
    chart_side = to_frame(chart, [0, 0, 0], lie_derivative_fd(chart, e1, ORIGIN))
    frame_side = frame_killing_form(conn, (1.0, 0.0), np.zeros((3, 2)))
    np.testing.assert_allclose(chart_side, frame_side, atol=1e-6)


def test_fd_ricci_on_heisenberg():
    ric = frame_ricci_fd(heisenberg_chart(), [0.0, 0.0, 0.0])
    np.testing.assert_allclose(ric, np.diag([-2.0, -2.0, 2.0]), atol=1e-4)
    # left invariance: same frame values elsewhere
    ric = frame_ricci_fd(heisenberg_chart(), [1.0, -2.0, 0.5], FDConfig(scheme=Scheme.RICHARDSON_4))
    np.testing.assert_allclose(ric, np.diag([-2.0, -2.0, 2.0]), atol=1e-4)


def test_frame_connection_from_chart_is_left_invariant():
    conn, _, _ = sasakian_model(0.0)
    for p in ([1.0, 2.0, 3.0], [-0.5, 0.25, -4.0]):
        np.testing.assert_allclose(frame_connection_fd(heisenberg_chart(), p), conn.gamma, atol=1e-6)


def test_chart_residual_origin_passes_for_closed_form_field():
    chart = heisenberg_chart()
    rng = np.random.default_rng(9)
    for C, D in rng.uniform(-3, 3, (5, 2)):
        pf = solve_sasakian_potential(0.0, C, D)
        rep = chart_soliton_residual(chart, pf, 2.0, ORIGIN)
        assert rep.passed and rep.max_residual < 1e-5
        assert rep.flags == []


def test_chart_residual_agrees_with_frame_oracle_at_origin():
    # frame-side oracle: soliton_frame_residual with the closed-form partials
    chart = heisenberg_chart()
    _, ric, _ = sasakian_model(0.0)
    pf = solve_sasakian_potential(0.0, 1.1, -0.3)
    fv = pf.evaluate(0, 0, 0)
    for lam in (2.0, 2.1, 0.0):
        chart_rep = chart_soliton_residual(chart, pf, lam, ORIGIN)
        frame = soliton_frame_residual(SasakianModel(0.0).structure(), ric, fv.f, np.vstack([fv.du1, fv.du2, fv.dt]), lam)
        for k, v in frame.values.items():
            assert chart_rep.values[k] == pytest.approx(v, abs=1e-5)


def test_chart_residual_lambda_shift():
    chart = heisenberg_chart()
    pf = solve_sasakian_potential(0.0, 0.4, 1.7)
    base = chart_soliton_residual(chart, pf, 2.0, ORIGIN).values["xi,xi"]
    shifted = chart_soliton_residual(chart, pf, 2.1, ORIGIN).values["xi,xi"]
    assert shifted - base == pytest.approx(-0.1, abs=1e-5)
    assert chart_soliton_residual(chart, pf, 0.0, ORIGIN).values["xi,xi"] == pytest.approx(2.0, abs=1e-5)


def test_chart_residual_zero_field():
    rep = chart_soliton_residual(heisenberg_chart(), None, 2.0, ORIGIN)
    got = [rep.values["e1,e1"], rep.values["e2,e2"], rep.values["xi,xi"]]
    np.testing.assert_allclose(got, [-4.0, -4.0, 0.0], atol=1e-5)


def test_literal_chart_coordinates_do_not_solve_at_origin():
    # feeding matrix coordinates straight into the field doubles every frame derivative
    chart = heisenberg_chart()
    pf = solve_sasakian_potential(0.0, 1.0, 0.0)
    rep = chart_soliton_residual(chart, pf, 2.0, ORIGIN, coordinates=Coordinates.CHART)
    assert rep.values["e1,e1"] == pytest.approx(4.0, abs=1e-5)
    assert not rep.passed


def test_residual_field_is_reported():
    pf = solve_sasakian_potential(0.0, 1.0, 0.5)
    out = chart_residual_field(heisenberg_chart(), pf, 2.0, [(0, 0, 0), (0.5, 0, 0), (0, 0, 1.0)])
    assert len(out) == 3
    assert out[0][1] < 1e-5
    assert all(m >= 0 for _, m in out)
