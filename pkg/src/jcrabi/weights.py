"""Discrete probability weights entering the inversion sums.

Four families are provided:

* binomial weights over the sector index s (N Bernoulli trials with
  success probability Z_omega),
* their Gaussian approximation (small-Z form, shape controlled by the
  product N*Z),
* thermal photon-number weights P(n) = nbar^n / (1+nbar)^(n+1),
* scaled Poisson weights for coherent-state photon numbers.

Binomial tables are evaluated in log space via the log-gamma function
so that oscillator numbers up to 1e6 stay finite, and all tables are
reduced with a fixed-order pairwise cascade so results are reproducible
run to run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, pdtrc

BINOMIAL = "binomial"
GAUSSIAN_APPROX = "gaussian_approx"
THERMAL = "thermal"
POISSON_SCALED = "poisson_scaled"
JOINT = "joint"


class DegenerateWidth(ValueError):
    """Gaussian approximation requested where N*Z_omega < 1."""


def pairwise_sum(values):
    """Sum a 1-D array with a fixed-order pairwise cascade.

    The reduction tree depends only on the length of the input, so the
    result is bit-for-bit reproducible for a given input regardless of
    how the caller chunks surrounding work.
    """
    a = np.asarray(values, dtype=float)
    if a.ndim != 1:
        raise ValueError("pairwise_sum expects a 1-D array")
    return float(pairwise_fold(a[:, None])[0])


def pairwise_fold(matrix):
    """Pairwise-cascade reduction of a 2-D array along axis 0.

    Adjacent rows are added pairwise; an odd trailing row is carried to
    the next round unchanged.  Returns a 1-D array of column sums.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2:
        raise ValueError("pairwise_fold expects a 2-D array")
    if a.shape[0] == 0:
        return np.zeros(a.shape[1])
    while a.shape[0] > 1:
        even = (a.shape[0] // 2) * 2
        folded = a[0:even:2] + a[1:even:2]
        if a.shape[0] % 2:
            folded = np.concatenate([folded, a[-1:]], axis=0)
        a = folded
    return a[0].copy()


@dataclass(frozen=True)
class WeightTable:
    """Non-negative weights on an integer support.

    ``tail_mass`` is the analytically known probability mass outside
    the truncated support (zero for full-support tables).  For the
    Gaussian approximation ``prenorm_defect`` records how far the raw
    table was from unit mass before renormalization.
    """

    kind: str
    support: np.ndarray
    values: np.ndarray
    tail_mass: float = 0.0
    prenorm_defect: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "support", np.asarray(self.support))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or len(self.support) != len(self.values):
            raise ValueError("support and values must be 1-D and equally long")
        if np.any(self.values < 0):
            raise ValueError("weights must be non-negative")

    def total_mass(self):
        return pairwise_sum(self.values)

    def mean(self):
        return pairwise_sum(self.support * self.values)


def binomial_weights(n_osc, z_omega):
    """Binomial table B(s; N, Z_omega) over the full support s = 0..N.

    Computed as exp(lgamma terms + s*log Z + (N-s)*log(1-Z)); the
    degenerate ends Z_omega = 0 or 1 produce exact point masses.
    """
    n = int(n_osc)
    if n < 1:
        raise ValueError(f"n_osc must be >= 1, got {n_osc}")
    if not (0.0 <= z_omega <= 1.0):
        raise ValueError(f"z_omega must lie in [0, 1], got {z_omega}")
    s = np.arange(n + 1)
    if z_omega == 1.0 or z_omega == 0.0:
        values = np.zeros(n + 1)
        values[n if z_omega == 1.0 else 0] = 1.0
        return WeightTable(BINOMIAL, s, values)
    logc = gammaln(n + 1.0) - gammaln(s + 1.0) - gammaln(n - s + 1.0)
    logw = logc + s * np.log(z_omega) + (n - s) * np.log1p(-z_omega)
    return WeightTable(BINOMIAL, s, np.exp(logw))


def gaussian_approx_weights(n_osc, z_omega):
    """Small-Z Gaussian stand-in for the binomial table.

    Weight at s is proportional to exp(-(s - NZ)^2 / (2 NZ)) with
    NZ = n_osc*z_omega; the table is renormalized to unit mass and the
    raw mass defect is reported on the table.  Requires NZ >= 1.
    """
    n = int(n_osc)
    nz = n * z_omega
    if nz < 1.0:
        raise DegenerateWidth(f"need n_osc*z_omega >= 1, got {nz:g}")
    s = np.arange(n + 1)
    raw = np.exp(-((s - nz) ** 2) / (2.0 * nz)) / np.sqrt(2.0 * np.pi * nz)
    mass = pairwise_sum(raw)
    return WeightTable(GAUSSIAN_APPROX, s, raw / mass, prenorm_defect=1.0 - mass)


def gaussian_nz_weights(nz, z=0.1, n_sigmas=8.5):
    """Gaussian sector weights for a continuous product parameter NZ.

    Full-width form: variance NZ*(1-z) (the binomial variance with z
    pinned), support 0..ceil(NZ + n_sigmas*sigma).  This is the smooth
    surrogate used when NZ is varied continuously, e.g. during fitting,
    where an integer oscillator number would make the objective
    piecewise constant.
    """
    if nz <= 0:
        raise DegenerateWidth(f"need NZ > 0, got {nz:g}")
    var = nz * (1.0 - z)
    if var <= 0:
        raise DegenerateWidth(f"need z < 1 for a nonzero width, got z={z:g}")
    s_max = int(np.ceil(nz + n_sigmas * np.sqrt(var)))
    s = np.arange(s_max + 1)
    raw = np.exp(-((s - nz) ** 2) / (2.0 * var))
    mass = pairwise_sum(raw)
    return WeightTable(GAUSSIAN_APPROX, s, raw / mass, prenorm_defect=None)


def thermal_weights(n_bar, tail_eps=1e-12):
    """Thermal photon statistics P(n) = nbar^n/(1+nbar)^(n+1), truncated.

    The support 0..n_max is the smallest one whose retained mass is at
    least 1 - tail_eps; the true tail mass (nbar/(1+nbar))^(n_max+1) is
    recorded exactly.
    """
    if n_bar < 0:
        raise ValueError(f"n_bar must be >= 0, got {n_bar}")
    if not (0.0 < tail_eps < 1.0):
        raise ValueError(f"tail_eps must lie in (0, 1), got {tail_eps}")
    if n_bar == 0.0:
        return WeightTable(THERMAL, np.arange(1), np.array([1.0]), tail_mass=0.0)
    ratio = n_bar / (1.0 + n_bar)
    # geometric tail: mass above n_max is ratio**(n_max+1)
    n_max = max(0, int(np.ceil(np.log(tail_eps) / np.log(ratio))) - 1)
    while ratio ** (n_max + 1) > tail_eps:
        n_max += 1
    while n_max > 0 and ratio ** n_max <= tail_eps:
        n_max -= 1
    n = np.arange(n_max + 1)
    values = np.exp(n * np.log(ratio)) / (1.0 + n_bar)
    return WeightTable(THERMAL, n, values, tail_mass=ratio ** (n_max + 1))


def poisson_weights(mean, tail_eps=1e-12):
    """Poisson table over n = 0..n_max with mass-based truncation."""
    if mean < 0:
        raise ValueError(f"mean must be >= 0, got {mean}")
    if not (0.0 < tail_eps < 1.0):
        raise ValueError(f"tail_eps must lie in (0, 1), got {tail_eps}")
    if mean == 0.0:
        return WeightTable(POISSON_SCALED, np.arange(1), np.array([1.0]), tail_mass=0.0)
    n_max = max(1, int(mean))
    while pdtrc(n_max, mean) > tail_eps:
        n_max += 1
    while n_max > 0 and pdtrc(n_max - 1, mean) <= tail_eps:
        n_max -= 1
    n = np.arange(n_max + 1)
    values = np.exp(n * np.log(mean) - mean - gammaln(n + 1.0))
    return WeightTable(POISSON_SCALED, n, values, tail_mass=float(pdtrc(n_max, mean)))


def coherent_weights(n_coh, s_over_n, tail_eps=1e-12):
    """Photon-number weights of a coherent sector: Poisson with mean
    ``n_coh * s_over_n``.

    ``s_over_n`` is the sector frequency s/N; any renormalization of
    the amplitude (for instance dividing by Z) is folded into ``n_coh``
    by the caller.
    """
    if n_coh < 0:
        raise ValueError(f"n_coh must be >= 0, got {n_coh}")
    if not (0.0 <= s_over_n <= 1.0):
        raise ValueError(f"s_over_n must lie in [0, 1], got {s_over_n}")
    return poisson_weights(n_coh * s_over_n, tail_eps)
