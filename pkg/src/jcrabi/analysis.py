"""Signal analysis and least-squares parameter fitting.

`envelope` extracts the oscillation envelope through the analytic
signal and locates collapse and revival times.  `spectrum` is a plain
discrete Fourier magnitude with optional time symmetrization (the
mean-removed series reflected about t = 0 before transforming).  `fit`
is a damped (Levenberg-Marquardt) least-squares loop with a
finite-difference Jacobian, deterministic for a fixed starting point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .weights import pairwise_sum


class InsufficientSampling(ValueError):
    """Envelope extraction needs >= 8 periods at >= 16 points/period."""


class InsufficientData(ValueError):
    """Fewer data points than the fit can determine parameters from."""


class NoConvergence(RuntimeError):
    def __init__(self, iterations, message="no convergence"):
        self.iterations = iterations
        super().__init__(f"{message} after {iterations} iterations")


class SingularJacobian(RuntimeError):
    """The fit Jacobian lost rank (a parameter has no effect on the model)."""


@dataclass(frozen=True)
class EnvelopeReport:
    """Envelope of an oscillating signal plus collapse/revival markers.

    ``collapse_time`` is the first time the envelope drops below
    ``theta`` times the initial amplitude (None if it never does);
    ``revival`` is ``(t_rev, recovered_fraction)`` for the strongest
    post-collapse envelope peak when it recovers at least the revival
    threshold, else None.
    """

    times: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    amplitude: np.ndarray
    initial_amplitude: float
    period_estimate: float
    collapse_time: float | None
    revival: tuple[float, float] | None


def _dominant_period(samples, dt):
    x = samples - pairwise_sum(samples) / samples.size
    mags = np.abs(np.fft.rfft(x))
    if mags.size < 2:
        raise InsufficientSampling("signal too short for a period estimate")
    k = 1 + int(np.argmax(mags[1:]))
    return samples.size * dt / k


def envelope(signal, theta=0.5, revival_threshold=0.5):
    """Analytic-signal envelope with collapse and revival detection.

    The initial amplitude is taken as the raw peak deviation from the
    mean over the first two oscillation periods, which is immune to the
    edge transient of the Hilbert transform.  Raises
    :class:`InsufficientSampling` unless the window covers at least 8
    periods with at least 16 samples per period.
    """
    w = signal.samples
    dt = signal.dt
    period = _dominant_period(w, dt)
    duration = dt * (w.size - 1)
    if duration < 8.0 * period or dt > period / 16.0:
        raise InsufficientSampling(
            f"need >= 8 periods at >= 16 points/period (period ~ {period:.3g}, "
            f"window {duration:.3g}, dt {dt:.3g})")

    mean = pairwise_sum(w) / w.size
    x = w - mean
    env = np.abs(hilbert(x))
    # the analytic signal overshoots near the window edges; a bounded
    # signal cannot have an envelope above its own sup-norm
    env = np.minimum(env, np.max(np.abs(x)))
    per_samples = max(2, int(round(period / dt)))
    a0 = float(np.max(np.abs(x[: 2 * per_samples])))
    if a0 == 0.0:
        a0 = float(np.max(env))

    t = signal.times
    # skip one period of Hilbert edge transient at both window ends
    start = per_samples
    stop = max(start + 1, env.size - per_samples)
    below = np.nonzero(env[start:stop] < theta * a0)[0]
    collapse_time = float(t[start + below[0]]) if below.size else None

    revival = None
    if collapse_time is not None:
        after = start + below[0]
        if after < stop - 1:
            rel = int(np.argmax(env[after:stop]))
            frac = float(env[after + rel] / a0)
            if frac >= revival_threshold:
                revival = (float(t[after + rel]), frac)

    return EnvelopeReport(
        times=t, upper=mean + env, lower=mean - env, amplitude=env,
        initial_amplitude=a0, period_estimate=period,
        collapse_time=collapse_time, revival=revival,
    )


@dataclass(frozen=True)
class Spectrum:
    """One-sided Fourier magnitude of a mean-removed signal."""

    freq_khz: np.ndarray
    amplitude: np.ndarray

    def peaks(self, min_fraction=1e-3):
        """Local maxima above ``min_fraction`` of the strongest line,
        as (freq_khz, amplitude) pairs sorted by amplitude, descending."""
        a = self.amplitude
        floor = min_fraction * np.max(a) if a.size else 0.0
        idx = [i for i in range(1, a.size - 1)
               if a[i] >= a[i - 1] and a[i] > a[i + 1] and a[i] >= floor]
        idx.sort(key=lambda i: -a[i])
        return [(float(self.freq_khz[i]), float(a[i])) for i in idx]


def spectrum(signal, symmetrize=False):
    """Discrete Fourier magnitude of the mean-removed signal.

    With ``symmetrize`` the series is reflected about t = 0 first
    (even extension), which turns a beat-like signal into a manifestly
    even one.  Frequencies are cyclic and reported in kHz (time is in
    us, so bin k maps to 1000*k/(n*dt) kHz); amplitudes are normalized
    so a pure cosine of amplitude A yields a line of height A.
    """
    x = signal.samples - pairwise_sum(signal.samples) / signal.n
    if symmetrize:
        x = np.concatenate([x[::-1], x[1:]])
    mags = np.abs(np.fft.rfft(x)) * (2.0 / x.size)
    freq = np.fft.rfftfreq(x.size, d=signal.dt) * 1e3
    return Spectrum(freq_khz=freq, amplitude=mags)


@dataclass(frozen=True)
class FitResult:
    names: tuple
    values: np.ndarray
    stderr: np.ndarray
    rss: float
    iterations: int
    converged: bool

    def as_dict(self):
        return dict(zip(self.names, self.values))

    def summary(self):
        lines = [
            f"  {name} = {value:.6g} +/- {err:.2g}"
            for name, value, err in zip(self.names, self.values, self.stderr)
        ]
        lines.append(f"  rss = {self.rss:.6g}  iterations = {self.iterations}"
                     f"  converged = {self.converged}")
        return "\n".join(lines)


def _fd_jacobian(residual_fn, x, r0, rel_step):
    m, n = r0.size, x.size
    jac = np.empty((m, n))
    for j in range(n):
        step = rel_step * max(abs(x[j]), 1e-8)
        xp = x.copy()
        xp[j] += step
        jac[:, j] = (residual_fn(xp) - r0) / step
    return jac


def fit(times, data_w, model, x0, bounds=None, names=None, max_iter=200,
        ftol=1e-10, xtol=1e-10, rel_step=1e-6):
    """Damped least squares (Levenberg-Marquardt) on w(t) data.

    Parameters
    ----------
    times, data_w : arrays
        Sample times (us) and measured inversion values w = P_e - 1/2.
    model : callable
        ``model(x, times) -> w`` for a parameter vector x.
    x0 : array
        Starting point; the algorithm is deterministic given x0.
    bounds : optional list of (lo, hi)
        Box constraints; proposals are clipped into the box.
    names : optional parameter names for reporting.

    The normal equations are damped with lambda*diag(J^T J); lambda
    shrinks on accepted steps and grows on rejected ones, so the
    residual norm is non-increasing across accepted iterations.
    Raises :class:`InsufficientData`, :class:`SingularJacobian`, or
    :class:`NoConvergence`.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(data_w, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    n_par = x.size
    if names is None:
        names = tuple(f"p{j}" for j in range(n_par))
    if t.size != y.size or t.size < 2 * n_par:
        raise InsufficientData(
            f"need at least {2 * n_par} points for {n_par} parameters, got {t.size}")
    if bounds is not None:
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
        x = np.clip(x, lo, hi)

    def residual(xv):
        return model(xv, t) - y

    r = residual(x)
    cost = float(r @ r)
    lam = 1e-3
    iterations = 0
    converged = False
    jac = None
    while iterations < max_iter:
        iterations += 1
        jac = _fd_jacobian(residual, x, r, rel_step)
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        if np.any(diag <= 0):
            dead = [names[j] for j in range(n_par) if diag[j] <= 0]
            raise SingularJacobian(f"parameters with no effect on the model: {dead}")
        jtr = jac.T @ r
        accepted = False
        for _ in range(50):
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -jtr)
            except np.linalg.LinAlgError:
                raise SingularJacobian("damped normal equations are singular") from None
            x_new = x + step
            if bounds is not None:
                x_new = np.clip(x_new, lo, hi)
            r_new = residual(x_new)
            cost_new = float(r_new @ r_new)
            if cost_new <= cost:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            raise NoConvergence(iterations, "damping exhausted without descent")
        dx = np.linalg.norm(x_new - x)
        improvement = cost - cost_new
        x, r, cost = x_new, r_new, cost_new
        lam = max(lam / 10.0, 1e-12)
        if improvement <= ftol * max(cost, 1e-300) or dx <= xtol * (np.linalg.norm(x) + xtol):
            converged = True
            break
    if not converged:
        raise NoConvergence(iterations)

    dof = max(1, t.size - n_par)
    sigma2 = cost / dof
    try:
        cov = sigma2 * np.linalg.inv(jac.T @ jac)
        stderr = np.sqrt(np.maximum(np.diag(cov), 0.0))
    except np.linalg.LinAlgError:
        stderr = np.full(n_par, np.nan)
    return FitResult(tuple(names), x, stderr, cost, iterations, converged)
