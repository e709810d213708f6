#!/usr/bin/env python3
"""Spectral lines of coherent-state Rabi oscillations.

A coherent field with 0.85 photons on average drives the atom at the
discrete Rabi frequencies 2 g sqrt(n+1); the Fourier magnitude of the
time-symmetrized inversion shows one line per photon number with
near-Poissonian weights.

Run:
    python demos/coherent_spectrum.py
"""
import math
import os

from jcrabi import analysis, dynamics, params

G_KHZ = 47.0
N_COH = 0.85
WINDOW_US = 400.0
DT_US = 0.05

OUT_DIR = os.path.join(os.path.dirname(__file__), "output")


def main():
    prm = params.normalize({"g_ph_khz": G_KHZ, "z_max": 1.0, "z_omega": 1.0})
    sig = dynamics.w_coherent_limit(prm, N_COH, dynamics.time_grid(WINDOW_US, DT_US))
    spec = analysis.spectrum(sig, symmetrize=True)

    print("photon-number lines (2 g sqrt(n+1), cyclic kHz):")
    print("  n   expected f   Poisson/2   nearest measured peak")
    peaks = spec.peaks(min_fraction=0.01)
    for n in range(4):
        f_expect = 2 * prm.g_ph * math.sqrt(n + 1) / (2 * math.pi) * 1e3
        a_expect = math.exp(-N_COH) * N_COH**n / math.factorial(n) / 2
        near = min(peaks, key=lambda pk: abs(pk[0] - f_expect))
        print(f"  {n}   {f_expect:8.2f}    {a_expect:.4f}      "
              f"{near[0]:8.2f} kHz, {near[1]:.4f}")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plots")
        return

    os.makedirs(OUT_DIR, exist_ok=True)
    fig, ax = plt.subplots(figsize=(9, 4))
    keep = spec.freq_khz <= 300
    ax.plot(spec.freq_khz[keep], spec.amplitude[keep], lw=0.9)
    for n in range(4):
        ax.axvline(2 * prm.g_ph * math.sqrt(n + 1) / (2 * math.pi) * 1e3,
                   color="r", ls=":", lw=0.8)
    ax.set_xlabel("frequency [kHz]")
    ax.set_ylabel("amplitude")
    ax.set_title(f"coherent field, {N_COH} photons on average")
    fig.tight_layout()
    path = os.path.join(OUT_DIR, "coherent_spectrum.png")
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
