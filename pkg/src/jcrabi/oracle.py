"""Brute-force matrix realization of the finite-N reducible representation.

The model lives on (C^2)_atom x (C^M x C^F)^N: each of the N
oscillators carries a mode label k = 0..M-1 and a Fock index 0..F-1.
Collective operators are built literally from their definitions,

    a(k) = (1/sqrt(N)) sum_i a_k^(i),      I(k) = (1/N) sum_i 1_k^(i),

the vacuum is the N-fold tensor power of a normalized wavepacket
|O> = sum_k O(k) |k, 0>, and the Jaynes-Cummings Hamiltonian couples
the atom to the collective mode of a chosen resonant label.  Everything
is dense and small (hard dimension cap), so the identities of the
formalism can be checked directly by matrix arithmetic, and the exact
Schroedinger evolution serves as an independent oracle for the
closed-form inversion signals.

Fock truncation inevitably breaks ladder identities on the top level,
so every commutator check is restricted to the subspace with at most
F-2 quanta per oscillator, and time evolution demands that the initial
state put negligible weight beyond that subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.linalg import eigh, expm

from .dynamics import REDUCIBLE_FINITE_N, InversionSignal, _grid_step
from .params import CYCLIC, FieldState, PhysicalParams
from .weights import binomial_weights

_DIM_CAP = 2000
_LEVEL_WINDOW = 0.2


class DimensionCap(ValueError):
    """Requested truncated Hilbert space exceeds the hard size cap."""


class UnnormalizedProfile(ValueError):
    """Vacuum profile amplitudes do not square-sum to one."""


class TruncationLeak(RuntimeError):
    """Initial state carries non-negligible weight at the Fock cutoff."""


class FactorizationMismatch(RuntimeError):
    """Full-Hamiltonian and interaction-only evolutions disagree."""


@dataclass
class CheckReport:
    name: str
    max_dev: float
    tol: float
    passed: bool
    details: dict = field(default_factory=dict)

    def __str__(self):
        status = "ok" if self.passed else "FAIL"
        return f"{self.name}: max deviation {self.max_dev:.3e} (tol {self.tol:g}) {status}"


def default_profile(n_modes, z_omega, resonant_index=0):
    """Vacuum amplitudes with |O(resonant)|^2 = z_omega and the rest equal."""
    if n_modes == 1:
        if abs(z_omega - 1.0) > 1e-12:
            raise UnnormalizedProfile("a single mode forces z_omega = 1")
        return np.array([1.0])
    prof = np.full(n_modes, np.sqrt((1.0 - z_omega) / (n_modes - 1)))
    prof[resonant_index] = np.sqrt(z_omega)
    return prof


def _op_norm(a):
    return float(np.linalg.norm(a, 2))


class OracleModel:
    """Dense operators of the N-oscillator model; built by `build_model`."""

    def __init__(self, n_osc, n_modes, fock_cutoff, vacuum_profile, mode_freqs,
                 resonant_index, g, delta):
        self.n_osc = n_osc
        self.n_modes = n_modes
        self.fock_cutoff = fock_cutoff
        self.resonant_index = resonant_index
        self.vacuum_profile = np.asarray(vacuum_profile, dtype=float)
        self.mode_freqs = np.asarray(mode_freqs, dtype=float)
        self.g = g
        self.delta = delta

        M, F, N = n_modes, fock_cutoff, n_osc
        self.dim_single = M * F
        self.dim_field = self.dim_single ** N
        self.dim = 2 * self.dim_field

        a_tr = np.diag(np.sqrt(np.arange(1.0, F)), 1)
        num_tr = np.diag(np.arange(F, dtype=float))
        mode_proj = [np.zeros((M, M)) for _ in range(M)]
        for k in range(M):
            mode_proj[k][k, k] = 1.0
        self._a1 = [np.kron(mode_proj[k], a_tr) for k in range(M)]
        self._i1 = [np.kron(mode_proj[k], np.eye(F)) for k in range(M)]

        # collective operators; the 1/sqrt(N) and 1/N scalings are the
        # defining feature of the representation
        self.a_coll = [sum(self._embed(self._a1[k], i) for i in range(N)) / np.sqrt(N)
                       for k in range(M)]
        self.i_coll = [sum(self._embed(self._i1[k], i) for i in range(N)) / N
                       for k in range(M)]
        self.a_omega = self.a_coll[resonant_index]
        self.i_omega = self.i_coll[resonant_index]

        v1 = np.zeros(self.dim_single)
        for k in range(M):
            v1[k * F] = self.vacuum_profile[k]
        vac = v1
        for _ in range(N - 1):
            vac = np.kron(vac, v1)
        self.vacuum = vac

        # sector projectors of the frequency-of-success operator I_omega
        p_res = self._i1[resonant_index]
        p_other = np.eye(self.dim_single) - p_res
        self.sector_projectors = []
        for s in range(N + 1):
            tot = np.zeros((self.dim_field, self.dim_field))
            for bits in product((0, 1), repeat=N):
                if sum(bits) != s:
                    continue
                op = np.array([[1.0]])
                for b in bits:
                    op = np.kron(op, p_res if b else p_other)
                tot += op
            self.sector_projectors.append(tot)

        h1 = sum(self.mode_freqs[k] * (self._a1[k].T @ self._a1[k]) for k in range(M))
        self.h0_field = sum(self._embed(h1, i) for i in range(N))
        n_res_1 = np.kron(mode_proj[resonant_index], num_tr)
        self.n_omega_field = sum(self._embed(n_res_1, i) for i in range(N))

        sz = np.diag([0.5, -0.5])
        rp = np.array([[0.0, 1.0], [0.0, 0.0]])
        eye_f = np.eye(self.dim_field)
        eye2 = np.eye(2)
        self.r3 = np.kron(sz, eye_f)
        self.r3_diag = np.diag(self.r3).copy()
        self.r_plus = np.kron(rp, eye_f)
        self.r_minus = np.kron(rp.T, eye_f)

        omega = self.mode_freqs[resonant_index]
        inter = g * (np.kron(rp, self.a_omega) + np.kron(rp.T, self.a_omega.T))
        self.omega_op = delta * self.r3 + inter
        self.h = (omega + delta) * self.r3 + np.kron(eye2, self.h0_field) + inter
        self.n_const = self.r3 + np.kron(eye2, self.n_omega_field)
        self.m_const = self.r3 @ np.kron(eye2, self.i_omega) \
            + np.kron(eye2, self.a_omega.T @ self.a_omega)
        self.x_op = self.m_const + 0.5 * np.kron(eye2, self.i_omega)

        # mask of field basis states with <= F-2 quanta in every oscillator
        keep1 = np.ones(self.dim_single)
        for k in range(M):
            keep1[k * F + (F - 1)] = 0.0
        keep = keep1
        for _ in range(N - 1):
            keep = np.kron(keep, keep1)
        self.safe_mask_field = keep.astype(bool)
        self.safe_field = np.diag(keep)
        self.safe_full = np.kron(eye2, self.safe_field)

        self._pi_cache = {}

    def _embed(self, op, slot):
        out = np.array([[1.0]])
        for i in range(self.n_osc):
            out = np.kron(out, op if i == slot else np.eye(self.dim_single))
        return out

    # -- spectral structure within a sector ------------------------------

    def sector_annihilator(self, s):
        """a(s) = a_omega P(s/N) on the field space."""
        return self.a_omega @ self.sector_projectors[s]

    def pi_projectors(self, s):
        """Spectral projectors Pi(n, s) of a(s)^dag a(s), n = 0..F-2.

        Eigenvalues sit at n*s/N; levels touching the Fock cutoff are
        distorted and fall outside the grouping window or above F-2,
        so they are excluded.
        """
        if s in self._pi_cache:
            return self._pi_cache[s]
        n_top = self.fock_cutoff - 2
        proj = {}
        if s == 0:
            proj[0] = self.sector_projectors[0].copy()
        else:
            # orthonormal basis of the sector, so the zero eigenvalue of
            # a(s)^dag a(s) is not polluted by states outside P(s/N)
            p_evals, p_evecs = eigh(self.sector_projectors[s])
            basis = p_evecs[:, p_evals > 0.5]
            a_s = self.sector_annihilator(s)
            num = basis.T @ (a_s.T @ a_s) @ basis
            evals, evecs = eigh(num)
            ratio = evals / (s / self.n_osc)
            safe = self.safe_mask_field.astype(float)
            sel = np.abs(ratio - n_top) < _LEVEL_WINDOW
            top = basis @ evecs[:, sel]
            # the top level may mix exact ladder states with cutoff-broken
            # ones at the same eigenvalue; keep the sub-eigenspace fully
            # inside the safe occupation range
            overlap = top.T @ (safe[:, None] * top)
            o_evals, o_evecs = eigh(overlap)
            top = top @ o_evecs[:, o_evals > 1.0 - 1e-10]
            # lower levels descend by the exact ladder, so every level is
            # built over the same set of spectator backgrounds; dropping a
            # background at one level but not its neighbor would fake a
            # commutator violation
            if top.shape[1] > 0:
                proj[n_top] = top @ top.T
                u = top
                for n in range(n_top - 1, -1, -1):
                    u, _ = np.linalg.qr(a_s @ u)
                    proj[n] = u @ u.T
        self._pi_cache[s] = proj
        return proj

    def pi_hat(self, n, s, swapped=False):
        """Spectral projectors of X(s): |+><+| Pi(n-1, s) + |-><-| Pi(n, s).

        ``swapped`` deliberately exchanges the two atomic blocks; the
        swapped object is *not* conserved and serves as a negative
        control.
        """
        proj = self.pi_projectors(s)
        zero = np.zeros((self.dim_field, self.dim_field))
        pi_n = proj.get(n, zero)
        pi_nm1 = proj.get(n - 1, zero) if n > 0 else zero
        if swapped:
            pi_n, pi_nm1 = pi_nm1, pi_n
        return np.kron(np.diag([1.0, 0.0]), pi_nm1) + np.kron(np.diag([0.0, 1.0]), pi_n)

    def displacement(self, z):
        """exp(z a_omega^dag - z a_omega) on the field space (real z)."""
        gen = z * (self.a_omega.T - self.a_omega)
        return expm(gen)

    def cutoff_leak(self, field_vec):
        """Probability mass beyond F-2 quanta in any oscillator."""
        p = np.abs(field_vec) ** 2
        return float(np.sum(p[~self.safe_mask_field]))

    def matching_params(self, p_plus=1.0, freq_convention=CYCLIC):
        """PhysicalParams whose closed-form signals this model realizes."""
        z_max = float(np.max(self.vacuum_profile ** 2))
        z_omega = float(self.vacuum_profile[self.resonant_index] ** 2)
        return PhysicalParams(
            g_ph=self.g * np.sqrt(z_max), delta=self.delta, n_osc=self.n_osc,
            z_max=z_max, z_omega=z_omega, p_plus=p_plus, p_minus=1.0 - p_plus,
            freq_convention=freq_convention,
        )


def build_model(n_osc, n_modes, fock_cutoff, g, delta=0.0, z_omega=0.5,
                vacuum_profile=None, mode_freqs=None, resonant_index=0):
    """Construct an :class:`OracleModel`, enforcing the size caps.

    ``g`` and ``delta`` are the bare coupling and detuning in rad/us.
    The vacuum profile defaults to sqrt(z_omega) on the resonant mode
    with the remaining mass spread evenly.  Mode frequencies default to
    order-one values; the inversion signal is independent of them, and
    keeping them comparable to the coupling keeps the eigensolve well
    conditioned over experiment-scale time windows.
    """
    if not (1 <= n_osc <= 3):
        raise DimensionCap(f"n_osc must be 1..3, got {n_osc}")
    if not (1 <= n_modes <= 4):
        raise DimensionCap(f"n_modes must be 1..4, got {n_modes}")
    if fock_cutoff < 2:
        raise DimensionCap(f"fock_cutoff must be >= 2, got {fock_cutoff}")
    dim = 2 * (n_modes * fock_cutoff) ** n_osc
    if dim > _DIM_CAP:
        raise DimensionCap(f"total dimension {dim} exceeds cap {_DIM_CAP}")
    if vacuum_profile is None:
        vacuum_profile = default_profile(n_modes, z_omega, resonant_index)
    vacuum_profile = np.asarray(vacuum_profile, dtype=float)
    if vacuum_profile.shape != (n_modes,):
        raise UnnormalizedProfile(f"profile must have {n_modes} amplitudes")
    if abs(np.sum(vacuum_profile ** 2) - 1.0) > 1e-12:
        raise UnnormalizedProfile("profile amplitudes must square-sum to 1")
    if mode_freqs is None:
        mode_freqs = 1.0 + 0.7 * np.arange(n_modes)
    return OracleModel(n_osc, n_modes, fock_cutoff, vacuum_profile,
                       np.asarray(mode_freqs, dtype=float), resonant_index, g, delta)


# -- verification suite ----------------------------------------------------

def verify_ccr(model, tol=1e-13, corrupt=False):
    """Check [a(k), a(k')^dag] = delta_kk' I(k) away from the cutoff row,
    and that the vacuum is annihilated by every a(k).

    ``corrupt`` rescales the collective ladder operators by 1/sqrt(2),
    which for N = 2 is exactly the wrong 1/N normalization in place of
    1/sqrt(N); the commutator then misses its target by a factor 2.
    """
    R = model.safe_field
    scale = 1.0 / np.sqrt(2.0) if corrupt else 1.0
    devs = {}
    for k in range(model.n_modes):
        ak = scale * model.a_coll[k]
        for kp in range(model.n_modes):
            akp = scale * model.a_coll[kp]
            comm = ak @ akp.T - akp.T @ ak
            target = model.i_coll[k] if k == kp else np.zeros_like(comm)
            devs[(k, kp)] = _op_norm(R @ (comm - target) @ R)
    vac_dev = max(float(np.linalg.norm(model.a_coll[k] @ model.vacuum))
                  for k in range(model.n_modes))
    max_dev = max(max(devs.values()), vac_dev)
    return CheckReport("ccr", max_dev, tol, max_dev < tol,
                       {"vacuum_annihilation": vac_dev})


def verify_projectors(model, tol=1e-12, corrupt=False):
    """Spectral-projector identities, sector by sector:

    Pi(m,s) a(s) Pi(n,s) = 0 for m != n-1;  a(s) Pi(0,s) = 0;
    [R+ a(s), PiHat(n,s)] = [R- a(s)^dag, PiHat(n,s)] = [Omega(s), PiHat(n,s)] = 0.

    ``corrupt`` uses the swapped PiHat blocks (negative control).
    """
    n_top = model.fock_cutoff - 2
    max_dev = 0.0
    details = {}
    eye2 = np.eye(2)
    for s in range(model.n_osc + 1):
        a_s = model.sector_annihilator(s)
        proj = model.pi_projectors(s)
        if s > 0 and 0 in proj:
            max_dev = max(max_dev, _op_norm(a_s @ proj[0]))
        for m in proj:
            for n in proj:
                if m == n - 1:
                    continue
                max_dev = max(max_dev, _op_norm(proj[m] @ a_s @ proj[n]))
        a_s_full = np.kron(eye2, a_s)
        p_s_full = np.kron(eye2, model.sector_projectors[s])
        omega_s = model.omega_op @ p_s_full
        for n in range(n_top + 1):
            hat = model.pi_hat(n, s, swapped=corrupt)
            for op in (model.r_plus @ a_s_full, model.r_minus @ a_s_full.T, omega_s):
                comm = op @ hat - hat @ op
                max_dev = max(max_dev, _op_norm(comm))
        details[f"sector_{s}_levels"] = sorted(proj)
    return CheckReport("projectors", max_dev, tol, max_dev < tol, details)


def verify_constants_of_motion(model, tol=1e-12, corrupt=False):
    """[M, H] and [N, H] vanish within the cutoff; their difference
    generally does not, which is what distinguishes the reducible
    representation, so |M - N| is reported alongside.

    ``corrupt`` flips the sign of the photon-number part of N, which
    fails to commute with the interaction for every model size.
    """
    R = model.safe_full
    m_op = model.m_const
    n_op = model.n_const
    if corrupt:
        n_op = model.r3 - np.kron(np.eye(2), model.n_omega_field)
    dev_m = _op_norm(R @ (m_op @ model.h - model.h @ m_op) @ R)
    dev_n = _op_norm(R @ (n_op @ model.h - model.h @ n_op) @ R)
    diff = _op_norm(R @ (model.m_const - model.n_const) @ R)
    max_dev = max(dev_m, dev_n)
    return CheckReport("constants_of_motion", max_dev, tol, max_dev < tol,
                       {"comm_M_H": dev_m, "comm_N_H": dev_n, "norm_M_minus_N": diff})


def coherent_overlaps(model, z, tol=1e-10, corrupt=False):
    """Compare <z| Pi(n,s) |z> against the Poisson x binomial product.

    The closed form has Poisson mean |z|^2 s/N in sector s; the
    ``corrupt`` control drops the s/N scaling of the mean, which is
    wrong in every sector with s < N.  Row sums over n are also checked
    against the binomial sector masses.
    """
    N = model.n_osc
    zket = model.displacement(z) @ model.vacuum
    btab = binomial_weights(N, float(model.vacuum_profile[model.resonant_index] ** 2))
    max_dev = 0.0
    rows = {}
    for s in range(N + 1):
        proj = model.pi_projectors(s)
        total = 0.0
        for n, pi in proj.items():
            got = float(zket @ pi @ zket)
            mean = z * z if corrupt else z * z * s / N
            if mean > 0:
                expect = btab.values[s] * np.exp(-mean) * mean ** n / math.factorial(n)
            else:
                expect = btab.values[s] * (1.0 if n == 0 else 0.0)
            max_dev = max(max_dev, abs(got - expect))
            total += got
        row_target = float(zket @ model.sector_projectors[s] @ zket)
        rows[s] = (total, row_target, float(btab.values[s]))
        max_dev = max(max_dev, abs(row_target - btab.values[s]))
    return CheckReport("coherent_overlaps", max_dev, tol, max_dev < tol, {"rows": rows})


def run_all_checks(model, z=0.1, corrupt=False):
    return [
        verify_ccr(model, corrupt=corrupt),
        verify_projectors(model, corrupt=corrupt),
        verify_constants_of_motion(model, corrupt=corrupt),
        coherent_overlaps(model, z, corrupt=corrupt),
    ]


# -- exact evolution --------------------------------------------------------

def _evolve_expectation(h, psi0, r3_diag, times):
    evals, evecs = eigh(h)
    c0 = evecs.T @ psi0
    phases = np.exp(-1j * np.outer(evals, times))
    psi_t = evecs @ (phases * c0[:, None])
    return r3_diag @ (np.abs(psi_t) ** 2)


def evolve_exact(model, times, atom="plus", z=0.0, leak_tol=1e-10,
                 factorization_tol=1e-12):
    """Exact inversion signal by dense eigen-evolution.

    ``atom`` is "plus", "minus", or a pair (p_plus, p_minus) of mixture
    weights; ``z`` displaces the collective resonant mode of the vacuum.
    The expectation is evaluated twice, under the full Hamiltonian and
    under the interaction part alone; the inversion commutes with the
    remaining free parts, so the two must agree and a mismatch beyond
    ``factorization_tol`` raises :class:`FactorizationMismatch`.
    Raises :class:`TruncationLeak` when the initial field state puts
    more than ``leak_tol`` probability beyond F-2 quanta per oscillator.
    """
    t, dt = _grid_step(times)
    field_vec = model.vacuum if z == 0.0 else model.displacement(z) @ model.vacuum
    leak = model.cutoff_leak(field_vec)
    if leak > leak_tol:
        raise TruncationLeak(
            f"initial occupancy beyond the safe Fock range is {leak:.3e} "
            f"(allowed {leak_tol:g}); raise fock_cutoff or shrink the displacement")

    if atom == "plus":
        mixture = [(1.0, np.kron([1.0, 0.0], field_vec))]
    elif atom == "minus":
        mixture = [(1.0, np.kron([0.0, 1.0], field_vec))]
    else:
        p_plus, p_minus = atom
        mixture = [(p_plus, np.kron([1.0, 0.0], field_vec)),
                   (p_minus, np.kron([0.0, 1.0], field_vec))]

    w_h = np.zeros(t.shape)
    w_v = np.zeros(t.shape)
    for weight, psi0 in mixture:
        if weight == 0.0:
            continue
        w_h += weight * _evolve_expectation(model.h, psi0, model.r3_diag, t)
        w_v += weight * _evolve_expectation(model.omega_op, psi0, model.r3_diag, t)
    fact_dev = float(np.max(np.abs(w_h - w_v)))
    if fact_dev > factorization_tol:
        raise FactorizationMismatch(
            f"evolution factorization check failed: deviation {fact_dev:.3e}")

    if z != 0.0:
        z_max = float(np.max(model.vacuum_profile ** 2))
        state = FieldState.coherent(z * z * z_max)
    else:
        state = FieldState.vacuum()
    signal = InversionSignal(float(t[0]), dt, w_v, REDUCIBLE_FINITE_N, state,
                             f"oracle|N={model.n_osc}|z={z!r}|atom={atom!r}")
    return signal, {"factorization_dev": fact_dev, "cutoff_leak": leak}
