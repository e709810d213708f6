import math

import numpy as np
import pytest

from jcrabi import analysis, dynamics, params

G = params.khz_to_rad_per_us(47.0)


def make_signal(samples, dt):
    return dynamics.InversionSignal(0.0, dt, samples, dynamics.IRREDUCIBLE,
                                    params.FieldState.vacuum(), "test")


def test_envelope_pure_tone_no_collapse():
    t = np.arange(0, 400, 0.5)
    sig = make_signal(0.5 - np.sin(G * t) ** 2, 0.5)
    rep = analysis.envelope(sig, theta=0.5)
    assert rep.collapse_time is None
    assert rep.revival is None
    assert rep.initial_amplitude == pytest.approx(0.5, rel=5e-3)


def test_envelope_damped_sinusoid_collapse_time():
    t_cav = 80.0
    t = np.arange(0, 600, 0.25)
    w = 0.5 * np.exp(-t / t_cav) * np.cos(2 * G * t)
    rep = analysis.envelope(make_signal(w, 0.25), theta=0.5)
    expect = t_cav * math.log(2.0)
    assert rep.collapse_time == pytest.approx(expect, rel=0.10)


def test_envelope_insufficient_sampling():
    t = np.arange(0, 40, 5.0)  # far below 16 points/period
    sig = make_signal(np.sin(2 * G * t), 5.0)
    with pytest.raises(analysis.InsufficientSampling):
        analysis.envelope(sig)


def test_envelope_bounded_by_sup_norm():
    t = np.arange(0, 400, 0.5)
    x = 0.5 - np.sin(G * t) ** 2
    rep = analysis.envelope(make_signal(x, 0.5))
    sup = np.max(np.abs(x - x.mean()))
    assert np.max(rep.amplitude) <= sup + 1e-12


def test_envelope_detects_beat_revival():
    p = params.PhysicalParams(g_ph=G, n_osc=280, z_max=0.1, z_omega=0.1)
    sig = dynamics.w_vacuum_reducible(p, dynamics.time_grid(1500, 0.25))
    rep = analysis.envelope(sig, theta=0.5)
    assert rep.collapse_time is not None and rep.collapse_time < 300
    assert rep.revival is not None
    t_rev, frac = rep.revival
    assert 500 < t_rev < 1500
    assert frac >= 0.5
    assert rep.collapse_time <= t_rev


def _tone_signal():
    # window an exact number of oscillation periods so the line sits on
    # a frequency bin (no scalloping loss)
    n, periods = 4096, 64
    dt = periods * (math.pi / G) / n
    t = dt * np.arange(n)
    return make_signal(np.sin(G * t) ** 2, dt), dt * n


def test_spectrum_single_tone_peak():
    sig, window = _tone_signal()
    spec = analysis.spectrum(sig)
    top_freq, top_amp = spec.peaks()[0]
    # sin^2(gt) oscillates at cyclic frequency g/pi (in MHz), i.e. 94 kHz
    expect = G / math.pi * 1e3
    assert top_freq == pytest.approx(expect, abs=1e3 / window)
    assert top_amp == pytest.approx(0.5, rel=0.01)


def test_spectrum_symmetrize_even_signal_same_peak():
    sig, window = _tone_signal()
    plain = analysis.spectrum(sig).peaks()[0]
    sym = analysis.spectrum(sig, symmetrize=True).peaks()[0]
    assert sym[0] == pytest.approx(plain[0], abs=1e3 / window)
    assert sym[1] == pytest.approx(plain[1], rel=0.02)


def test_spectrum_linearity():
    t = np.arange(0, 100, 0.25)
    x = np.sin(2 * G * t) + 0.3 * np.sin(5 * G * t)
    a = analysis.spectrum(make_signal(x, 0.25)).amplitude
    b = analysis.spectrum(make_signal(3.0 * x, 0.25)).amplitude
    assert np.allclose(b, 3.0 * a, rtol=1e-12, atol=1e-15)


def test_spectrum_coherent_lines_poissonian():
    p = params.PhysicalParams(g_ph=G, z_max=1.0, z_omega=1.0)
    sig = dynamics.w_coherent_limit(p, 0.85, dynamics.time_grid(400, 0.05))
    spec = analysis.spectrum(sig, symmetrize=True)
    df = 1e3 / 400
    expected = [(2 * G * math.sqrt(n + 1) / (2 * math.pi) * 1e3,
                 math.exp(-0.85) * 0.85**n / math.factorial(n) / 2)
                for n in range(4)]
    peaks = spec.peaks(min_fraction=0.01)
    found = []
    for f_expect, a_expect in expected:
        near = [pk for pk in peaks if abs(pk[0] - f_expect) <= 1.5 * df]
        assert near, f"no spectral line near {f_expect:.1f} kHz"
        found.append(max(near, key=lambda pk: pk[1]))
    amps = [a for _, a in found]
    # Poissonian ordering and magnitude within leakage allowances
    assert amps[0] > amps[1] > amps[2] > amps[3]
    for (_, a_expect), a in zip(expected, amps):
        assert 0.5 * a_expect <= a <= 1.1 * a_expect


def fit_template(prm):
    def model(x, t):
        w = dynamics.thermal_nz_samples(prm, 0.05, x[0], t)
        return dynamics.damp_samples(w, t, x[1])
    return model


def test_fit_zero_noise_roundtrip_exact():
    prm = params.PhysicalParams(g_ph=G, z_max=0.1, z_omega=0.1,
                                p_plus=0.99, p_minus=0.01)
    t = np.linspace(0, 90, 100)
    model = fit_template(prm)
    truth = model([28.0, 220.0], t)
    res = analysis.fit(t, truth, model, x0=[20.0, 300.0],
                       bounds=[(1.0, 1e6), (1.0, 1e7)], names=("NZ", "T_cav"))
    assert res.converged
    assert res.values[0] == pytest.approx(28.0, rel=1e-4)
    assert res.values[1] == pytest.approx(220.0, rel=1e-4)
    assert res.rss < 1e-12


def test_fit_deterministic():
    prm = params.PhysicalParams(g_ph=G, z_max=0.1, z_omega=0.1,
                                p_plus=0.99, p_minus=0.01)
    t = np.linspace(0, 90, 100)
    model = fit_template(prm)
    data = model([28.0, 220.0], t) + 0.01 * np.random.default_rng(1).standard_normal(t.size)
    r1 = analysis.fit(t, data, model, x0=[20.0, 300.0], names=("NZ", "T_cav"))
    r2 = analysis.fit(t, data, model, x0=[20.0, 300.0], names=("NZ", "T_cav"))
    assert np.array_equal(r1.values, r2.values)
    assert r1.iterations == r2.iterations


def test_fit_residual_not_worse_than_start():
    prm = params.PhysicalParams(g_ph=G, z_max=0.1, z_omega=0.1,
                                p_plus=0.99, p_minus=0.01)
    t = np.linspace(0, 90, 100)
    model = fit_template(prm)
    data = model([28.0, 220.0], t) + 0.01 * np.random.default_rng(4).standard_normal(t.size)
    x0 = np.array([20.0, 300.0])
    start_rss = float(np.sum((model(x0, t) - data) ** 2))
    res = analysis.fit(t, data, model, x0=x0, names=("NZ", "T_cav"))
    assert res.rss <= start_rss


def test_fit_insufficient_data():
    with pytest.raises(analysis.InsufficientData):
        analysis.fit([], [], lambda x, t: t, x0=[1.0])
    with pytest.raises(analysis.InsufficientData):
        analysis.fit([1.0, 2.0, 3.0], [0.1, 0.2, 0.3],
                     lambda x, t: x[0] * t + x[1], x0=[1.0, 0.0])


def test_fit_singular_jacobian_for_dead_parameter():
    t = np.linspace(0, 10, 30)
    data = 2.0 * t

    def model(x, tt):
        return x[0] * tt  # x[1] has no effect

    with pytest.raises(analysis.SingularJacobian):
        analysis.fit(t, data, model, x0=[1.0, 5.0], names=("slope", "dead"))


def test_fit_no_convergence_iteration_cap():
    t = np.linspace(0, 90, 100)
    prm = params.PhysicalParams(g_ph=G, z_max=0.1, z_omega=0.1,
                                p_plus=0.99, p_minus=0.01)
    model = fit_template(prm)
    data = model([28.0, 220.0], t)
    with pytest.raises(analysis.NoConvergence):
        analysis.fit(t, data, model, x0=[300.0, 5.0], names=("NZ", "T_cav"),
                     max_iter=1)
