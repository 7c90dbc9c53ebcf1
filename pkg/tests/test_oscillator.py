import json

import numpy as np
import pytest

from phaselock import bundled_path
from phaselock.errors import ConfigError, DegenerateOrbit, GridMismatch, InsufficientSamples
from phaselock.oscillator import (
    AdjointSolution,
    InteractionFunction,
    VectorField,
    compute_H,
    diffusive_coupling,
    eval_H,
    eval_H_prime,
    eval_H_third,
    fd_jacobian,
    find_limit_cycle,
    fit_fourier,
    hopf_normal_form,
    load_oscillator_config,
    morris_lecar,
    normalization_integral,
    parse_oscillator_config,
    period_defect,
    sample_H,
    solve_adjoint,
    zero_coupling,
)


@pytest.fixture(scope="module")
def hopf_reduction():
    vf = hopf_normal_form()
    lc = find_limit_cycle(vf, (1.5, 0.0), t_transient=60.0)
    adj = solve_adjoint(vf, lc)
    return vf, lc, adj


def test_hopf_cycle_is_unit_circle(hopf_reduction):
    vf, lc, _ = hopf_reduction
    assert abs(lc.period - 2 * np.pi) < 1e-4
    assert np.max(np.abs(np.hypot(lc.samples[:, 0], lc.samples[:, 1]) - 1.0)) < 1e-6
    assert lc.closure_defect() < 1e-6


def test_hopf_cycle_returns_after_one_period(hopf_reduction):
    from scipy.integrate import solve_ivp

    vf, lc, _ = hopf_reduction
    sol = solve_ivp(lambda t, y: vf(y) / lc.Omega, (0, 2 * np.pi), lc.samples[0],
                    rtol=1e-11, atol=1e-12)
    assert np.max(np.abs(sol.y[:, -1] - lc.samples[0])) < 1e-5


def test_hopf_adjoint_matches_closed_form(hopf_reduction):
    vf, lc, adj = hopf_reduction
    # closed form is written in the cycle's own phase, which starts at angle theta0
    theta = np.arctan2(lc.samples[:, 1], lc.samples[:, 0])
    expected = np.column_stack([-np.sin(theta), np.cos(theta)])
    assert np.max(np.abs(adj.samples - expected)) < 1e-4
    assert abs(normalization_integral(vf, lc, adj) - 1.0) < 1e-4
    assert period_defect(adj, lc, vf) < 1e-5


def test_hopf_interaction_is_half_sine(hopf_reduction):
    _, lc, adj = hopf_reduction
    h = compute_H(lc, adj, diffusive_coupling(2), n_phi=64)
    assert abs(h.b[0] - 0.5) < 1e-3
    others = np.concatenate([h.a, h.b[1:]])
    assert np.max(np.abs(others)) < 1e-3


def test_zero_coupling_gives_zero_H(hopf_reduction):
    _, lc, adj = hopf_reduction
    h = compute_H(lc, adj, zero_coupling(2), n_phi=32)
    assert np.all(h.a == 0) and np.all(h.b == 0)


def test_H_is_linear_in_coupling(hopf_reduction):
    _, lc, adj = hopf_reduction
    g = diffusive_coupling(2)
    _, once = sample_H(lc, adj, g, 16)
    _, twice = sample_H(lc, adj, g.scaled(2.0), 16)
    assert np.allclose(twice, 2 * once, rtol=0, atol=1e-14)


def test_H_does_not_depend_on_sample_origin(hopf_reduction):
    _, lc, adj = hopf_reduction
    g = diffusive_coupling(2)
    base = compute_H(lc, adj, g, n_phi=32)
    k = 137
    moved = compute_H(lc.shifted(k), AdjointSolution(np.roll(adj.samples, -k, axis=0)), g, n_phi=32)
    assert np.max(np.abs(base.a - moved.a)) < 1e-6
    assert np.max(np.abs(base.b - moved.b)) < 1e-6


def test_grid_mismatch(hopf_reduction):
    vf, lc, adj = hopf_reduction
    short = AdjointSolution(adj.samples[::2])
    with pytest.raises(GridMismatch):
        compute_H(lc, short, diffusive_coupling(2))
    with pytest.raises(GridMismatch):
        normalization_integral(vf, lc, short)


def test_stable_focus_is_degenerate():
    # mu < 0: the origin attracts everything, there is no cycle
    vf = hopf_normal_form(mu=-0.5)
    with pytest.raises(DegenerateOrbit):
        find_limit_cycle(vf, (1.0, 0.0), t_transient=80.0)


def test_jacobians_agree_with_finite_differences(rng):
    models = [hopf_normal_form(),
              morris_lecar(json.loads(bundled_path("morris_lecar_example").read_text())["params"])]
    for vf in models:
        for _ in range(20):
            x = rng.uniform(-0.5, 0.5, size=2)
            exact = vf.jacobian(x)
            approx = fd_jacobian(vf.rhs, x)
            assert np.allclose(approx, exact, rtol=1e-5, atol=1e-7)


def test_eval_H_at_zero_for_set_one(h_one):
    # direct sum of the cosine coefficients
    assert abs(eval_H(h_one, 0.0) - (-0.006216)) < 1e-6
    assert eval_H(h_one, 0.0) == pytest.approx(float(np.sum(h_one.a)), abs=1e-15)


def test_eval_pure_sine(pure_sine):
    assert eval_H(pure_sine, np.pi / 2) == pytest.approx(1.0, abs=1e-15)
    assert eval_H_prime(pure_sine, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert eval_H_third(pure_sine, 0.0) == pytest.approx(-1.0, abs=1e-15)


def test_periodicity_and_derivative_consistency(h_two, rng):
    phi = rng.uniform(-10, 10, size=100)
    # the argument is reduced mod 2*pi, so only the rounding of phi + 2*pi remains
    assert np.max(np.abs(eval_H(h_two, phi) - eval_H(h_two, phi + 2 * np.pi))) < 1e-13
    step = 1e-5
    centered = (eval_H(h_two, phi + step) - eval_H(h_two, phi - step)) / (2 * step)
    assert np.max(np.abs(centered - eval_H_prime(h_two, phi))) < 1e-6
    d2 = (eval_H_prime(h_two, phi + step) - eval_H_prime(h_two, phi - step)) / (2 * step)
    assert np.max(np.abs(d2 - h_two.second(phi))) < 1e-6


def test_fit_sine_and_aliasing():
    phi = 2 * np.pi * np.arange(32) / 32
    h = fit_fourier(phi, np.sin(phi), K=4)
    assert abs(h.b[0] - 1) < 1e-12
    assert np.max(np.abs(np.concatenate([h.a, h.b[1:]]))) < 1e-12
    # a mode above the basis is orthogonal to it on this grid
    h6 = fit_fourier(phi, np.sin(6 * phi), K=4)
    assert np.max(np.abs(np.concatenate([h6.a, h6.b]))) < 1e-12


def test_fit_round_trips_printed_coefficients(h_one):
    phi = 2 * np.pi * np.arange(64) / 64
    back = fit_fourier(phi, eval_H(h_one, phi), K=4)
    assert np.max(np.abs(back.a - h_one.a)) < 1e-10
    assert np.max(np.abs(back.b - h_one.b)) < 1e-10
    dense = np.linspace(0, 2 * np.pi, 1000)
    rmse = np.sqrt(np.mean((eval_H(back, dense) - eval_H(h_one, dense)) ** 2))
    assert rmse < 1e-10


def test_fit_needs_enough_samples():
    phi = 2 * np.pi * np.arange(8) / 8
    with pytest.raises(InsufficientSamples):
        fit_fourier(phi, np.sin(phi), K=4)


def test_json_round_trip(tmp_path, h_two):
    path = tmp_path / "h.json"
    h_two.save(path)
    back = InteractionFunction.load(path)
    assert np.array_equal(back.a, h_two.a) and np.array_equal(back.b, h_two.b)


class TestConfig:
    def test_bundled_hopf(self):
        cfg = load_oscillator_config(bundled_path("hopf"))
        assert cfg.model == "hopf"
        assert isinstance(cfg.vector_field(), VectorField)

    def test_templates_refuse_to_load(self):
        with pytest.raises(ConfigError) as info:
            load_oscillator_config(bundled_path("morris_lecar_I"))
        assert info.value.field.startswith("params.")

    @pytest.mark.parametrize("data, field", [
        ({"model": "fitzhugh"}, "model"),
        ({"model": "hopf", "params": {"mu": "one"}}, "params.mu"),
        ({"model": "hopf", "coupling": "gap"}, "coupling"),
        ({"model": "morris_lecar", "params": {"g_K": 2.0}}, "params"),
        ({"model": "hopf", "guess": [1.0]}, "guess"),
        ([1, 2], "$"),
    ])
    def test_malformed(self, data, field):
        with pytest.raises(ConfigError) as info:
            parse_oscillator_config(data)
        assert info.value.field == field

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{model: hopf")
        with pytest.raises(ConfigError):
            load_oscillator_config(path)
