#!/usr/bin/env python3
"""Correspondence between finite-N fields and the standard limit.

With the resonant-mode probability held fixed, growing the oscillator
number N drives the finite-N inversion toward the limiting closed form
(the law of large numbers for the binomial sector weights).  Over any
fixed window the two agree once N is large enough; over longer windows
they separate again, which is where experiments could tell finite N
from infinite N.

Run:
    python demos/representation_correspondence.py
"""
import os

import numpy as np

from jcrabi import dynamics, params

G_KHZ = 47.0
Z_OMEGA = 0.1      # resonant-mode probability, chi = Z_omega here (Z = 1)
N_SWEEP = (100, 1000, 10000)

OUT_DIR = os.path.join(os.path.dirname(__file__), "output")


def main():
    base = {"g_ph_khz": G_KHZ, "z_max": 1.0, "z_omega": Z_OMEGA}
    prm_inf = params.normalize(base)
    window = 20 * np.pi / prm_inf.g_ph
    t = np.linspace(0.0, window, 4000)
    w_inf = dynamics.w_vacuum_limit(prm_inf, t).samples

    print(f"window [0, {window:.1f}] us, chi_omega = {prm_inf.chi_omega:g}")
    curves = {}
    for n in N_SWEEP:
        prm = params.normalize({**base, "n_osc": n})
        w = dynamics.w_vacuum_reducible(prm, t).samples
        curves[n] = w
        print(f"  N = {n:>6d}: sup |w_N - w_inf| = {np.max(np.abs(w - w_inf)):.4f}")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plots")
        return

    os.makedirs(OUT_DIR, exist_ok=True)
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(t, w_inf, "k", lw=1.5, label="limit")
    for n, w in curves.items():
        ax.plot(t, w, lw=0.8, alpha=0.8, label=f"N = {n}")
    ax.set_xlabel("t [us]")
    ax.set_ylabel("w(t)")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(OUT_DIR, "correspondence.png")
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
