import math

import numpy as np
import pytest

from jcrabi import dynamics, params

G = params.khz_to_rad_per_us(47.0)


def make_params(**kw):
    base = dict(g_ph=G, delta=0.0, z_max=1.0, z_omega=1.0)
    base.update(kw)
    return params.PhysicalParams(**base)


def test_time_grid_row_count():
    t = dynamics.time_grid(100, 0.25)
    assert t.size == 401 and t[0] == 0.0 and t[-1] == pytest.approx(100.0)


def test_vacuum_irreducible_at_zero():
    sig = dynamics.w_vacuum_irreducible(make_params(), 1.0, dynamics.time_grid(10, 0.5))
    assert sig.samples[0] == 0.5


def test_vacuum_irreducible_quarter_period():
    t = np.array([0.0, math.pi / (2 * G)])
    sig = dynamics.w_vacuum_irreducible(make_params(), 1.0, t)
    assert sig.samples[1] == pytest.approx(-0.5, abs=1e-12)


def test_vacuum_irreducible_detuned_node():
    # Delta = 2g, zeta = 1: amplitude 1/2 and rate g*sqrt(2), so the
    # kernel reaches 1/2 at t = pi/(2 g sqrt(2)) and w crosses zero
    p = make_params(delta=2 * G)
    t = np.array([0.0, math.pi / (2 * G * math.sqrt(2))])
    sig = dynamics.w_vacuum_irreducible(p, 1.0, t)
    assert sig.samples[1] == pytest.approx(0.0, abs=1e-12)


def test_vacuum_irreducible_zeta_range():
    with pytest.raises(ValueError):
        dynamics.w_vacuum_irreducible(make_params(), 1.5, dynamics.time_grid(1, 0.5))


def test_reducible_single_oscillator_half_z():
    # two-term sum, s = 0 drops out, s = 1 carries weight 1/2 and
    # occupation 1/(Z N) = 2, so the rate is sqrt(2) g_ph (equivalently
    # the bare coupling g = g_ph/sqrt(Z) at s/N = 1)
    p = make_params(z_max=0.5, z_omega=0.5, n_osc=1)
    t = dynamics.time_grid(50, 0.1)
    sig = dynamics.w_vacuum_reducible(p, t)
    expect = 0.5 - 0.5 * np.sin(math.sqrt(2.0) * G * t) ** 2
    assert np.max(np.abs(sig.samples - expect)) < 1e-12


def test_reducible_degenerate_z_equals_irreducible_bitwise():
    t = dynamics.time_grid(200, 0.25)
    w1 = dynamics.w_vacuum_reducible(make_params(n_osc=1), t).samples
    w7 = dynamics.w_vacuum_reducible(make_params(n_osc=7), t).samples
    wi = dynamics.w_vacuum_irreducible(make_params(), 1.0, t).samples
    assert np.array_equal(w1, w7)
    assert np.array_equal(w1, wi)


def test_limit_chi_one_equals_irreducible_bitwise():
    t = dynamics.time_grid(100, 0.25)
    wl = dynamics.w_vacuum_limit(make_params(), t).samples
    wi = dynamics.w_vacuum_irreducible(make_params(), 1.0, t).samples
    assert np.array_equal(wl, wi)


def test_limit_needs_no_finite_n():
    p = make_params(n_osc=params.INFINITE, z_max=0.1, z_omega=0.1)
    sig = dynamics.w_vacuum_limit(p, dynamics.time_grid(10, 0.5))
    assert sig.model == dynamics.LIMIT_N_INF
    with pytest.raises(ValueError):
        dynamics.w_vacuum_reducible(p, dynamics.time_grid(10, 0.5))


def test_ground_state_constant():
    t = dynamics.time_grid(1000, 10.0)
    sig = dynamics.w_ground_state(t)
    assert np.all(sig.samples == -0.5)


def test_thermal_zero_temperature_reduces_to_vacuum_bitwise():
    p = make_params(n_osc=40, z_max=0.1, z_omega=0.1)
    t = dynamics.time_grid(120, 0.25)
    wv = dynamics.w_vacuum_reducible(p, t).samples
    wt = dynamics.w_thermal_reducible(p, 0.0, t).samples
    assert np.array_equal(wv, wt)


def test_coherent_zero_amplitude_reduces_to_vacuum_bitwise():
    p = make_params(n_osc=40, z_max=0.1, z_omega=0.1)
    t = dynamics.time_grid(120, 0.25)
    wv = dynamics.w_vacuum_reducible(p, t).samples
    wc = dynamics.w_coherent_reducible(p, 0.0, t).samples
    assert np.array_equal(wv, wc)


def test_thermal_initial_value_is_mixture_bias():
    p = make_params(n_osc=40, z_max=0.1, z_omega=0.1, p_plus=0.99, p_minus=0.01)
    sig = dynamics.w_thermal_reducible(p, 0.05, dynamics.time_grid(10, 0.5))
    assert sig.samples[0] == pytest.approx(0.49, abs=1e-15)


def test_thermal_limit_zero_temperature_chi_one():
    p = make_params()
    t = dynamics.time_grid(80, 0.25)
    wt = dynamics.w_thermal_limit(p, 0.0, t).samples
    wi = dynamics.w_vacuum_irreducible(p, 1.0, t).samples
    assert np.array_equal(wt, wi)


def test_coherent_limit_zero_amplitude_chi_one():
    p = make_params()
    t = dynamics.time_grid(80, 0.25)
    wc = dynamics.w_coherent_limit(p, 0.0, t).samples
    wi = dynamics.w_vacuum_irreducible(p, 1.0, t).samples
    assert np.array_equal(wc, wi)


def test_coherent_initial_value():
    p = make_params(n_osc=60, z_max=0.1, z_omega=0.1)
    sig = dynamics.w_coherent_reducible(p, 0.4, dynamics.time_grid(10, 0.5))
    assert sig.samples[0] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("op,extra", [
    (dynamics.w_vacuum_reducible, ()),
    (dynamics.w_thermal_reducible, (0.05,)),
    (dynamics.w_coherent_reducible, (0.4,)),
])
def test_undamped_bounds(op, extra):
    p = make_params(n_osc=120, z_max=0.1, z_omega=0.1, p_plus=0.99, p_minus=0.01)
    sig = op(p, *extra, dynamics.time_grid(400, 0.2))
    assert np.min(sig.samples) >= -0.5 - 1e-9
    assert np.max(sig.samples) <= 0.5 + 1e-9


def test_weak_coupling_is_nearly_constant():
    p = make_params(g_ph=1e-6, delta=0.1, n_osc=30, z_max=0.1, z_omega=0.1)
    sig = dynamics.w_vacuum_reducible(p, dynamics.time_grid(100, 1.0))
    assert np.max(np.abs(sig.samples - sig.samples[0])) < 1e-7


def test_large_detuning_amplitude_bound():
    p = make_params(delta=20 * G)
    sig = dynamics.w_vacuum_irreducible(p, 1.0, dynamics.time_grid(300, 0.05))
    bound = 2 * G**2 / ((20 * G) ** 2 / 4 + G**2)
    assert np.max(sig.samples) - np.min(sig.samples) <= bound + 1e-12


def test_gaussian_weights_option_close_to_binomial():
    p = make_params(n_osc=280, z_max=0.1, z_omega=0.1)
    t = dynamics.time_grid(90, 0.25)
    wb = dynamics.w_vacuum_reducible(p, t).samples
    wg = dynamics.w_vacuum_reducible(p, t, use_gaussian=True).samples
    assert np.max(np.abs(wb - wg)) < 0.05
    assert np.max(np.abs(wb - wg)) > 0.0


def test_deterministic_reruns_bitwise():
    p = make_params(n_osc=280, z_max=0.1, z_omega=0.1)
    t = dynamics.time_grid(200, 0.25)
    a = dynamics.w_thermal_reducible(p, 0.05, t).samples
    b = dynamics.w_thermal_reducible(p, 0.05, t).samples
    assert np.array_equal(a, b)


def test_nonuniform_grid_rejected():
    with pytest.raises(ValueError):
        dynamics.w_ground_state(np.array([0.0, 1.0, 3.0]))


def test_damping_identity_at_zero_and_limit():
    p = make_params(n_osc=40, z_max=0.1, z_omega=0.1)
    sig = dynamics.w_vacuum_reducible(p, dynamics.time_grid(2000, 0.5))
    damped = dynamics.apply_damping(sig, 50.0)
    assert damped.samples[0] == sig.samples[0]
    mean = np.asarray(sig.samples).mean()
    assert damped.samples[-1] == pytest.approx(mean, abs=1e-3)


def test_damping_constant_signal_unchanged():
    sig = dynamics.w_ground_state(dynamics.time_grid(100, 1.0))
    damped = dynamics.apply_damping(sig, 10.0)
    assert np.array_equal(damped.samples, sig.samples)


def test_damping_explicit_baseline():
    sig = dynamics.w_ground_state(dynamics.time_grid(100, 1.0))
    damped = dynamics.apply_damping(sig, 10.0, baseline=0.25)
    assert damped.samples[-1] == pytest.approx(0.25, abs=1e-4)


def test_damping_rejects_bad_lifetime():
    sig = dynamics.w_ground_state(dynamics.time_grid(10, 1.0))
    with pytest.raises(dynamics.NonPositiveLifetime):
        dynamics.apply_damping(sig, 0.0)


def test_nz_surrogate_tracks_binomial_model():
    p = make_params(n_osc=280, z_max=0.1, z_omega=0.1, p_plus=0.99, p_minus=0.01)
    t = dynamics.time_grid(90, 0.5)
    exact = dynamics.w_thermal_reducible(p, 0.05, t).samples
    surrogate = dynamics.w_thermal_nz(p, 0.05, 28.0, t).samples
    assert np.max(np.abs(exact - surrogate)) < 0.05


def test_signal_metadata():
    p = make_params(n_osc=12, z_max=0.5, z_omega=0.5)
    sig = dynamics.w_vacuum_reducible(p, dynamics.time_grid(10, 0.5))
    assert sig.model == dynamics.REDUCIBLE_FINITE_N
    assert sig.state.kind == "vacuum"
    assert sig.dt == 0.5 and sig.t0 == 0.0
    assert len(sig.params_digest) == 16
