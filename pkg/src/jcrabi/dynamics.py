"""Closed-form atomic inversion signals w(t) for the Jaynes-Cummings model.

Every signal is a weighted sum of one elementary kernel,

    T(kappa, t) = g^2*kappa * sin^2(t*sqrt(D^2/4 + g^2*kappa)) / (D^2/4 + g^2*kappa),

with T(0, t) = 0 by continuity, where g is the physical coupling and D
the detuning (both rad/us).  The three model families differ only in
which occupation factors kappa appear and how they are weighted:

* irreducible representation: a single kappa equal to the central
  parameter of the commutator,
* finite-N reducible representation: kappa = (n+1)*s/(Z*N) summed over
  binomial sector weights B(s; N, Z_omega) and photon numbers n,
* N -> infinity limit: kappa = (n+1)*chi_omega with chi_omega = Z_omega/Z.

Sums are evaluated with precomputed weight tables in a deterministic
order (sector-major, then photon number) using a fixed pairwise
cascade, so repeated runs produce bit-identical samples.  Cavity loss
is a classical envelope applied after the fact by `apply_damping`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .params import INFINITE, FieldState, PhysicalParams
from .weights import (
    binomial_weights,
    gaussian_approx_weights,
    gaussian_nz_weights,
    pairwise_fold,
    pairwise_sum,
    poisson_weights,
    thermal_weights,
)

IRREDUCIBLE = "irreducible"
REDUCIBLE_FINITE_N = "reducible_finite_n"
LIMIT_N_INF = "limit_n_inf"

_CHUNK_ELEMS = 4_000_000


class NonPositiveLifetime(ValueError):
    """Damping requested with a non-positive cavity lifetime."""


@dataclass(frozen=True)
class InversionSignal:
    """Uniformly sampled inversion w(t) = <R3>(t), with provenance tags."""

    t0: float
    dt: float
    samples: np.ndarray
    model: str
    state: FieldState
    params_digest: str

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ValueError("signal needs at least one sample")
        if not (self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def n(self):
        return self.samples.size


def time_grid(t_max_us, dt_us, t0_us=0.0):
    """Uniform grid from t0 to t_max inclusive (within half a step)."""
    if not (dt_us > 0 and t_max_us > 0 and dt_us <= t_max_us):
        raise ValueError("need 0 < dt_us <= t_max_us")
    count = int(np.floor((t_max_us - t0_us) / dt_us + 0.5)) + 1
    return t0_us + dt_us * np.arange(count)


def _grid_step(times):
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("times must be a non-empty 1-D array")
    if t.size == 1:
        return t, 1.0
    steps = np.diff(t)
    dt = steps[0]
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-9 * max(abs(dt), 1.0):
        raise ValueError("times must be a uniform increasing grid")
    return t, float(dt)


def rabi_kernel(g, delta, kappas, times):
    """Evaluate T(kappa, t) on a (kappa, t) grid.

    Rows with kappa = 0 are identically zero, including on resonance
    where the prefactor becomes 0/0 in the naive expression.
    """
    kap = np.atleast_1d(np.asarray(kappas, dtype=float))
    t = np.asarray(times, dtype=float)
    x = (g * g) * kap
    denom = (delta * delta) / 4.0 + x
    amp = np.divide(x, denom, out=np.zeros_like(x), where=denom > 0)
    rate = np.sqrt(denom)
    sins = np.sin(rate[:, None] * t[None, :])
    return amp[:, None] * (sins * sins)


def _sum_signal(const, coeffs, kappas, g, delta, times):
    """w(t) = const + sum_j coeffs[j] * T(kappas[j], t), pairwise-folded.

    Terms with an exactly zero coefficient are dropped; this leaves the
    mathematical value unchanged (they would contribute a signed zero)
    and makes point-mass weight tables collapse to the single surviving
    term regardless of the nominal support size.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    kappas = np.asarray(kappas, dtype=float)
    keep = coeffs != 0.0
    coeffs = coeffs[keep]
    kappas = kappas[keep]
    t = np.asarray(times, dtype=float)
    out = np.full(t.shape, const, dtype=float)
    if coeffs.size == 0:
        return out
    chunk = max(1, _CHUNK_ELEMS // coeffs.size)
    for i0 in range(0, t.size, chunk):
        tt = t[i0:i0 + chunk]
        block = coeffs[:, None] * rabi_kernel(g, delta, kappas, tt)
        out[i0:i0 + chunk] += pairwise_fold(block)
    return out


def _require_finite(params):
    if params.n_osc == INFINITE:
        raise ValueError("this model needs a finite n_osc; use the limit variant")
    return int(params.n_osc)


def _signal(times, samples, model, state, digest):
    t, dt = _grid_step(times)
    return InversionSignal(float(t[0]), dt, samples, model, state, digest)


def w_vacuum_irreducible(params, zeta, times):
    """Vacuum inversion in an irreducible representation with central
    parameter ``zeta``: w(t) = 1/2 - T(zeta, t)."""
    if not (0.0 < zeta <= 1.0):
        raise ValueError(f"zeta must lie in (0, 1], got {zeta}")
    w = _sum_signal(0.5, np.array([-1.0]), np.array([zeta]),
                    params.g_ph, params.delta, times)
    return _signal(times, w, IRREDUCIBLE, FieldState.vacuum(),
                   params.digest(IRREDUCIBLE, "vacuum", zeta))


def w_vacuum_reducible(params, times, use_gaussian=False):
    """Vacuum inversion for N oscillators:
    w(t) = 1/2 - sum_s B(s; N, Z_omega) T(s/(Z*N), t).

    The s = 0 sector carries no interaction and contributes nothing.
    ``use_gaussian`` substitutes the Gaussian-approximated sector
    weights for the exact binomial table.
    """
    n = _require_finite(params)
    tbl = gaussian_approx_weights(n, params.z_omega) if use_gaussian \
        else binomial_weights(n, params.z_omega)
    s = tbl.support.astype(float)
    zn = params.z_max * n
    w = _sum_signal(0.5, -tbl.values, s / zn, params.g_ph, params.delta, times)
    return _signal(times, w, REDUCIBLE_FINITE_N, FieldState.vacuum(),
                   params.digest(REDUCIBLE_FINITE_N, "vacuum", use_gaussian))


def w_vacuum_limit(params, times):
    """N -> infinity vacuum inversion: w(t) = 1/2 - T(chi_omega, t)."""
    w = _sum_signal(0.5, np.array([-1.0]), np.array([params.chi_omega]),
                    params.g_ph, params.delta, times)
    return _signal(times, w, LIMIT_N_INF, FieldState.vacuum(),
                   params.digest(LIMIT_N_INF, "vacuum"))


def w_ground_state(times, model=IRREDUCIBLE):
    """Atom prepared in the ground state with no photons: w(t) = -1/2."""
    t = np.asarray(times, dtype=float)
    return _signal(times, np.full(t.shape, -0.5), model,
                   FieldState.vacuum(), "ground-state")


def _thermal_terms(s_vals, s_wts, n_bar, tail_eps, p_plus, p_minus, zn_or_chi, limit):
    """Joint (coefficient, kappa) arrays for a thermal mixture, sector-major."""
    ntbl = thermal_weights(n_bar, tail_eps)
    nvals = ntbl.support.astype(float)
    fac = p_minus * n_bar / (1.0 + n_bar) - p_plus
    coeffs = (s_wts[:, None] * (ntbl.values * fac)[None, :]).ravel()
    if limit:
        kap = np.broadcast_to((nvals + 1.0) * zn_or_chi, (s_vals.size, nvals.size)).ravel()
    else:
        kap = (((nvals + 1.0)[None, :] * s_vals[:, None]) / zn_or_chi).ravel()
    return coeffs, kap


def w_thermal_reducible(params, n_bar, times, tail_eps=1e-12):
    """Thermal-field inversion for N oscillators and atomic mixture (p+, p-):

    w(t) = (p+ - p-)/2 + sum_s B(s) sum_n P(n) (p- nbar/(1+nbar) - p+)
                         * T((n+1) s/(Z N), t).

    The photon sum is truncated by the mass rule of `thermal_weights`.
    """
    n = _require_finite(params)
    tbl = binomial_weights(n, params.z_omega)
    s = tbl.support.astype(float)
    coeffs, kap = _thermal_terms(s, tbl.values, n_bar, tail_eps,
                                 params.p_plus, params.p_minus,
                                 params.z_max * n, limit=False)
    const = (params.p_plus - params.p_minus) / 2.0
    w = _sum_signal(const, coeffs, kap, params.g_ph, params.delta, times)
    return _signal(times, w, REDUCIBLE_FINITE_N, FieldState.thermal(n_bar),
                   params.digest(REDUCIBLE_FINITE_N, "thermal", n_bar, tail_eps))


def w_thermal_limit(params, n_bar, times, tail_eps=1e-12):
    """N -> infinity thermal inversion:
    w(t) = (p+ - p-)/2 + sum_n P(n) (p- nbar/(1+nbar) - p+) T((n+1) chi, t)."""
    coeffs, kap = _thermal_terms(np.zeros(1), np.ones(1), n_bar, tail_eps,
                                 params.p_plus, params.p_minus,
                                 params.chi_omega, limit=True)
    const = (params.p_plus - params.p_minus) / 2.0
    w = _sum_signal(const, coeffs, kap, params.g_ph, params.delta, times)
    return _signal(times, w, LIMIT_N_INF, FieldState.thermal(n_bar),
                   params.digest(LIMIT_N_INF, "thermal", n_bar, tail_eps))


def _coherent_terms(s_vals, s_wts, means, p_plus, p_minus, kappa_scale, tail_eps):
    """Joint terms for a coherent state, both atomic branches.

    The excited branch couples photon number n to kappa = (n+1)*scale_s,
    the ground branch to kappa = n*scale_s; each sector s carries a
    Poisson table with its own mean.
    """
    coeffs = []
    kappas = []
    plus_tabs = [poisson_weights(m, tail_eps) for m in means]
    for s_i in range(s_vals.size):
        ptbl = plus_tabs[s_i]
        nvals = ptbl.support.astype(float)
        base = s_wts[s_i] * ptbl.values
        coeffs.append(-p_plus * base)
        kappas.append((nvals + 1.0) * kappa_scale[s_i])
    for s_i in range(s_vals.size):
        ptbl = plus_tabs[s_i]
        nvals = ptbl.support.astype(float)
        base = s_wts[s_i] * ptbl.values
        coeffs.append(p_minus * base)
        kappas.append(nvals * kappa_scale[s_i])
    return np.concatenate(coeffs), np.concatenate(kappas)


def w_coherent_reducible(params, n_coh, times, tail_eps=1e-12):
    """Coherent-field inversion for N oscillators.

    The displacement is chosen so the limiting mean photon number is
    n_coh*chi_omega, i.e. |z|^2 = n_coh/Z; sector s then sees Poisson
    photon statistics with mean |z|^2 * s/N and kappa = (n+1) s/(Z N)
    on the excited branch (n s/(Z N) on the ground branch of a mixture).
    """
    n = _require_finite(params)
    tbl = binomial_weights(n, params.z_omega)
    s = tbl.support.astype(float)
    zsq = n_coh / params.z_max
    means = zsq * s / n
    scale = s / (params.z_max * n)
    coeffs, kap = _coherent_terms(s, tbl.values, means,
                                  params.p_plus, params.p_minus, scale, tail_eps)
    const = (params.p_plus - params.p_minus) / 2.0
    w = _sum_signal(const, coeffs, kap, params.g_ph, params.delta, times)
    return _signal(times, w, REDUCIBLE_FINITE_N, FieldState.coherent(n_coh),
                   params.digest(REDUCIBLE_FINITE_N, "coherent", n_coh, tail_eps))


def w_coherent_limit(params, n_coh, times, tail_eps=1e-12):
    """N -> infinity coherent inversion with Poisson mean n_coh*chi_omega:
    w(t) = 1/2 - sum_n Pois(n) T((n+1) chi, t) for the excited atom,
    extended to mixtures by the affine ground-branch combination."""
    chi = params.chi_omega
    coeffs, kap = _coherent_terms(np.zeros(1), np.ones(1),
                                  np.array([n_coh * chi]),
                                  params.p_plus, params.p_minus,
                                  np.array([chi]), tail_eps)
    const = (params.p_plus - params.p_minus) / 2.0
    w = _sum_signal(const, coeffs, kap, params.g_ph, params.delta, times)
    return _signal(times, w, LIMIT_N_INF, FieldState.coherent(n_coh),
                   params.digest(LIMIT_N_INF, "coherent", n_coh, tail_eps))


def thermal_nz_samples(params, n_bar, nz, times, tail_eps=1e-12):
    """Grid-free thermal inversion for a continuous product parameter NZ.

    Sector weights are the Gaussian surrogate of the binomial (variance
    NZ*(1-Z) with Z pinned at params.z_max) and kappa = (n+1)*s/NZ, so
    the value varies smoothly in NZ.  ``times`` may be any array; this
    is the evaluator fitting loops call.
    """
    tbl = gaussian_nz_weights(nz, z=params.z_max)
    s = tbl.support.astype(float)
    coeffs, kap = _thermal_terms(s, tbl.values, n_bar, tail_eps,
                                 params.p_plus, params.p_minus,
                                 float(nz), limit=False)
    const = (params.p_plus - params.p_minus) / 2.0
    return _sum_signal(const, coeffs, kap, params.g_ph, params.delta, times)


def coherent_nz_samples(params, n_coh, nz, times, tail_eps=1e-12):
    """Grid-free coherent inversion for a continuous product parameter NZ."""
    tbl = gaussian_nz_weights(nz, z=params.z_max)
    s = tbl.support.astype(float)
    means = n_coh * s / float(nz)
    scale = s / float(nz)
    coeffs, kap = _coherent_terms(s, tbl.values, means,
                                  params.p_plus, params.p_minus, scale, tail_eps)
    const = (params.p_plus - params.p_minus) / 2.0
    return _sum_signal(const, coeffs, kap, params.g_ph, params.delta, times)


def w_thermal_nz(params, n_bar, nz, times, tail_eps=1e-12):
    """Signal wrapper around :func:`thermal_nz_samples` (uniform grid)."""
    w = thermal_nz_samples(params, n_bar, nz, times, tail_eps)
    return _signal(times, w, REDUCIBLE_FINITE_N, FieldState.thermal(n_bar),
                   params.digest(REDUCIBLE_FINITE_N, "thermal-nz", n_bar, nz, tail_eps))


def w_coherent_nz(params, n_coh, nz, times, tail_eps=1e-12):
    """Signal wrapper around :func:`coherent_nz_samples` (uniform grid)."""
    w = coherent_nz_samples(params, n_coh, nz, times, tail_eps)
    return _signal(times, w, REDUCIBLE_FINITE_N, FieldState.coherent(n_coh),
                   params.digest(REDUCIBLE_FINITE_N, "coherent-nz", n_coh, nz, tail_eps))


LONG_TIME_MEAN = "mean"


def damp_samples(samples, times, t_cav_us, baseline=LONG_TIME_MEAN):
    """Exponential-envelope damping of raw samples toward a baseline."""
    if not (t_cav_us is not None and t_cav_us > 0):
        raise NonPositiveLifetime(f"t_cav_us must be positive, got {t_cav_us}")
    w = np.asarray(samples, dtype=float)
    t = np.asarray(times, dtype=float)
    if baseline == LONG_TIME_MEAN:
        b = pairwise_sum(w) / w.size
    else:
        b = float(baseline)
    return b + (w - b) * np.exp(-t / t_cav_us)


def apply_damping(signal, t_cav_us, baseline=LONG_TIME_MEAN):
    """Damp the deviation from a baseline with the cavity envelope:

        w_d(t) = b + (w(t) - b) * exp(-t/T_cav).

    ``baseline`` is either the string ``"mean"`` (time average of the
    undamped signal over its own window) or an explicit number.  The
    envelope multiplies the deviation rather than the signal itself so
    the damped curve relaxes toward a meaningful level instead of 0.
    """
    damped = damp_samples(signal.samples, signal.times, t_cav_us, baseline)
    return replace(signal, samples=damped,
                   params_digest=signal.params_digest + f"|damped:{t_cav_us!r}:{baseline!r}")
