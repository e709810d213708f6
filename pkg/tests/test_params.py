import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jcrabi import params


def test_angular_conversion_is_identity_scale():
    p = params.normalize({"g_ph_khz": 47, "freq_convention": "angular"})
    assert p.g_ph == pytest.approx(0.047, abs=1e-15)


def test_cyclic_conversion():
    p = params.normalize({"g_ph_khz": 47})
    assert p.freq_convention == params.CYCLIC
    assert p.g_ph == pytest.approx(2 * math.pi * 0.047, abs=1e-15)
    assert p.g_ph == pytest.approx(0.29531, abs=1e-5)


def test_chi_omega_above_one_rejected():
    with pytest.raises(params.OutOfRange) as err:
        params.normalize({"g_ph_khz": 47, "z_omega": 0.2, "z_max": 0.1})
    assert "z_omega" in str(err.value)


def test_missing_coupling():
    with pytest.raises(params.MissingKey):
        params.normalize({"z_max": 0.1})


def test_inconsistent_mixture():
    with pytest.raises(params.InconsistentMixture):
        params.normalize({"g_ph_khz": 47, "p_plus": 0.6, "p_minus": 0.6})


def test_mixture_defaults():
    p = params.normalize({"g_ph_khz": 47, "p_plus": 0.99})
    assert p.p_minus == pytest.approx(0.01, abs=1e-15)


def test_unknown_key_rejected():
    with pytest.raises(params.OutOfRange):
        params.normalize({"g_ph_khz": 47, "gph_khz": 3})


def test_unparseable_value_names_key():
    with pytest.raises(params.OutOfRange) as err:
        params.normalize({"g_ph_khz": "forty-seven"})
    assert "g_ph_khz" in str(err.value)


def test_n_osc_infinite_marker():
    p = params.normalize({"g_ph_khz": 47, "n_osc": "inf"})
    assert p.n_osc == params.INFINITE
    assert not p.is_finite
    p2 = params.normalize({"g_ph_khz": 47, "n_osc": 280})
    assert p2.n_osc == 280 and p2.is_finite


def test_t_cav_none_and_positive():
    p = params.normalize({"g_ph_khz": 47, "t_cav_us": "none"})
    assert p.t_cav_us is None
    with pytest.raises(params.OutOfRange):
        params.normalize({"g_ph_khz": 47, "t_cav_us": -3})


def test_round_trip_bit_for_bit():
    p = params.normalize({"g_ph_khz": 47, "delta_khz": 1.5, "n_osc": 280,
                          "z_max": 0.1, "p_plus": 0.99, "t_cav_us": 220})
    q = params.normalize(params.to_config(p))
    assert q == p


def test_normalize_idempotent_on_normalized_config():
    cfg = params.to_config(params.normalize({"g_ph_khz": 47, "z_max": 0.25}))
    assert params.to_config(params.normalize(cfg)) == cfg


@settings(max_examples=60, deadline=None)
@given(
    g=st.floats(0.1, 1e4),
    z_max=st.floats(1e-6, 1.0),
    chi=st.floats(1e-6, 1.0),
    p_plus=st.floats(0.0, 1.0),
)
def test_round_trip_property(g, z_max, chi, p_plus):
    p = params.PhysicalParams(g_ph=g, z_max=z_max, z_omega=chi * z_max,
                              p_plus=p_plus, p_minus=1.0 - p_plus)
    assert params.normalize(params.to_config(p)) == p


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# experiment defaults\n"
                    "g_ph_khz = 47   # coupling\n"
                    "z_max = 0.1\n"
                    "n_osc = 280\n")
    raw = params.parse_config_file(path)
    p = params.normalize(raw)
    assert p.n_osc == 280 and p.z_max == 0.1


def test_config_file_bad_line(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("g_ph_khz 47\n")
    with pytest.raises(params.OutOfRange):
        params.parse_config_file(path)


def test_field_state_validation():
    assert params.FieldState.vacuum().kind == "vacuum"
    assert params.FieldState.thermal(0.05).n_bar == 0.05
    assert params.FieldState.coherent(0.4).n_coh == 0.4
    with pytest.raises(params.OutOfRange):
        params.FieldState.thermal(-1.0)
    with pytest.raises(params.OutOfRange):
        params.FieldState("squeezed")


def test_digest_stable_and_distinct():
    p = params.normalize({"g_ph_khz": 47})
    q = params.normalize({"g_ph_khz": 48})
    assert p.digest() == p.digest()
    assert p.digest() != q.digest()
    assert p.digest("a") != p.digest("b")
