"""Command-line interface: simulate | fit | oracle | spectrum.

All outputs are plot-ready CSV (comma-separated, one header line,
floats with 12 significant digits, LF line endings).  Exit codes:

* 0 success
* 1 a verification identity failed
* 2 configuration or input-data error (message names the key or line)
* 3 I/O failure
* 4 fit did not converge
* 5 oracle truncation leak

Named presets ``fig1``, ``fig3`` .. ``fig11`` bundle the experiment
reproduction parameter sets (47 kHz coupling in the cyclic convention,
resonance, Z = 0.1); a preset may emit several series, one CSV each.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import analysis, dynamics, oracle, params, weights

_FMT = "%.12g"


class DataFormatError(ValueError):
    pass


def _fmt(x):
    return _FMT % (x,)


def write_signal_csv(path, signal, p_excited=False):
    header = "t_us,p_excited" if p_excited else "t_us,w"
    values = signal.samples + 0.5 if p_excited else signal.samples
    lines = [header]
    for t, v in zip(signal.times, values):
        lines.append(f"{_fmt(t)},{_fmt(v)}")
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def read_signal_csv(path):
    """Read a two-column CSV of (t_us, w) or (t_us, p_excited).

    ``#`` comment lines are skipped; a leading non-numeric row is taken
    as the header.  P_e columns are mapped onto w = P_e - 1/2.
    Raises :class:`DataFormatError` naming the offending line.
    """
    ts, ys = [], []
    is_p_excited = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            cells = text.split(",")
            if len(cells) != 2:
                raise DataFormatError(f"{path}: line {lineno}: expected 2 columns")
            try:
                t, y = float(cells[0]), float(cells[1])
            except ValueError:
                if not ts and lineno <= 2:
                    is_p_excited = "p_excited" in text
                    continue
                raise DataFormatError(
                    f"{path}: line {lineno}: cannot parse {text!r}") from None
            ts.append(t)
            ys.append(y)
    t = np.asarray(ts)
    y = np.asarray(ys)
    if is_p_excited:
        y = y - 0.5
    return t, y


def _params_from_args(args, defaults=None):
    raw = dict(defaults or {})
    if getattr(args, "config", None):
        raw.update(params.parse_config_file(args.config))
    flag_map = {
        "g_khz": "g_ph_khz", "delta_khz": "delta_khz", "convention": "freq_convention",
        "N": "n_osc", "Z": "z_max", "Z_omega": "z_omega",
        "p_plus": "p_plus", "tcav_us": "t_cav_us",
    }
    for attr, key in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            raw[key] = value
    return params.normalize(raw)


def _simulate_signal(model, state, prm, args_like):
    times = dynamics.time_grid(args_like["t_max_us"], args_like["dt_us"])
    tail = args_like.get("tail_eps", 1e-12)
    if state == "ground":
        sig = dynamics.w_ground_state(times)
    elif model == "irreducible":
        if state == "vacuum":
            sig = dynamics.w_vacuum_irreducible(prm, args_like.get("zeta", 1.0), times)
        elif state == "thermal":
            sig = dynamics.w_thermal_limit(prm, args_like.get("nbar", 0.0), times, tail)
        else:
            sig = dynamics.w_coherent_limit(prm, args_like.get("ncoh", 0.0), times, tail)
    elif model == "reducible":
        if not prm.is_finite:
            raise params.OutOfRange("n_osc", "the reducible model needs --N")
        if state == "vacuum":
            sig = dynamics.w_vacuum_reducible(prm, times)
        elif state == "thermal":
            sig = dynamics.w_thermal_reducible(prm, args_like.get("nbar", 0.0), times, tail)
        else:
            sig = dynamics.w_coherent_reducible(prm, args_like.get("ncoh", 0.0), times, tail)
    elif model == "limit":
        if state == "vacuum":
            sig = dynamics.w_vacuum_limit(prm, times)
        elif state == "thermal":
            sig = dynamics.w_thermal_limit(prm, args_like.get("nbar", 0.0), times, tail)
        else:
            sig = dynamics.w_coherent_limit(prm, args_like.get("ncoh", 0.0), times, tail)
    else:
        raise params.OutOfRange("model", f"unknown model {model!r}")
    if prm.t_cav_us is not None and state != "ground":
        sig = dynamics.apply_damping(sig, prm.t_cav_us)
    return sig


# -- figure-reproduction presets --------------------------------------------
# Caption parameters: g_ph = 47 kHz (cyclic), resonance, Z = Z_omega = 0.1.
# Series suffixes name the cavity lifetime or oscillator number of each curve.

def _preset(model, state, series, t_max_us, dt_us, **extra):
    base = {"model": model, "state": state, "g_ph_khz": 47.0, "z_max": 0.1,
            "t_max_us": t_max_us, "dt_us": dt_us}
    base.update(extra)
    return {"base": base, "series": series}


PRESETS = {
    "fig1": _preset("limit", "thermal", [("tcav220", {"t_cav_us": 220.0}),
                                         ("tcav45", {"t_cav_us": 45.0})],
                    90.0, 0.25, nbar=0.05, p_plus=0.99),
    "fig3": _preset("reducible", "thermal", [("ideal", {}),
                                             ("tcav220", {"t_cav_us": 220.0})],
                    90.0, 0.25, n_osc=280, nbar=0.05, p_plus=0.99),
    "fig4": _preset("reducible", "vacuum", [("ideal", {})],
                    1500.0, 0.25, n_osc=280),
    "fig5": _preset("reducible", "vacuum", [("tcav500", {"t_cav_us": 500.0})],
                    1500.0, 0.25, n_osc=280),
    "fig6": _preset("reducible", "vacuum", [("ideal", {})],
                    50000.0, 0.5, n_osc=10000),
    "fig7": _preset("limit", "coherent", [("tcav50", {"t_cav_us": 50.0}),
                                          ("tcav220", {"t_cav_us": 220.0}),
                                          ("ideal", {})],
                    90.0, 0.25, ncoh=0.4, p_plus=0.97),
    "fig8": _preset("reducible", "coherent", [("tcav220", {"t_cav_us": 220.0})],
                    90.0, 0.25, n_osc=420, ncoh=0.4, p_plus=0.97),
    "fig9": _preset("limit", "coherent", [("tcav50", {"t_cav_us": 50.0}),
                                          ("tcav220", {"t_cav_us": 220.0}),
                                          ("ideal", {})],
                    90.0, 0.25, ncoh=0.85, p_plus=0.99),
    "fig10": _preset("reducible", "coherent", [("tcav220", {"t_cav_us": 220.0})],
                     90.0, 0.25, n_osc=420, ncoh=0.85, p_plus=0.99),
    "fig11": _preset("reducible", "coherent", [("n200", {"n_osc": 200}),
                                               ("n2000", {"n_osc": 2000}),
                                               ("n10000", {"n_osc": 10000})],
                     90.0, 0.25, ncoh=0.85, p_plus=1.0),
}

_PARAM_KEYS = ("g_ph_khz", "delta_khz", "n_osc", "z_max", "z_omega",
               "p_plus", "p_minus", "t_cav_us", "freq_convention")


def preset_files(name, out_dir):
    """File names a preset will write, in emission order."""
    preset = PRESETS[name]
    if len(preset["series"]) == 1:
        return [f"{out_dir}/{name}.csv"]
    return [f"{out_dir}/{name}_{suffix}.csv" for suffix, _ in preset["series"]]


def run_preset(name, out_dir, p_excited=False):
    os.makedirs(out_dir, exist_ok=True)
    preset = PRESETS[name]
    paths = preset_files(name, out_dir)
    for path, (suffix, overrides) in zip(paths, preset["series"]):
        scenario = dict(preset["base"])
        scenario.update(overrides)
        raw = {k: scenario[k] for k in _PARAM_KEYS if k in scenario}
        prm = params.normalize(raw)
        sig = _simulate_signal(scenario["model"], scenario["state"], prm, scenario)
        write_signal_csv(path, sig, p_excited=p_excited)
    return paths


def cmd_simulate(args):
    if args.preset:
        if args.preset not in PRESETS:
            raise params.OutOfRange("preset", f"unknown preset {args.preset!r}")
        for path in run_preset(args.preset, args.out_dir, p_excited=args.p_excited):
            print(path)
        return 0
    if args.model is None or args.state is None:
        raise params.MissingKey("model/state")
    if args.t_max_us is None or args.dt_us is None:
        raise params.MissingKey("t_max_us/dt_us")
    prm = _params_from_args(args)
    scenario = {"t_max_us": args.t_max_us, "dt_us": args.dt_us, "zeta": args.zeta,
                "nbar": args.nbar or 0.0, "ncoh": args.ncoh or 0.0,
                "tail_eps": args.tail_eps}
    sig = _simulate_signal(args.model, args.state, prm, scenario)
    write_signal_csv(args.out, sig, p_excited=args.p_excited)
    return 0


_FREE_CHOICES = ("NZ", "T_cav", "p_plus", "nbar", "ncoh")


def build_fit_model(state, prm, fixed):
    """Forward model w(theta; t) for the NZ-parameterized fit templates.

    ``fixed`` holds NZ, T_cav, p_plus, nbar, ncoh defaults; free
    parameters override entries by name at evaluation time.
    """
    def model(values, names, t):
        cfg = dict(fixed)
        for name, val in zip(names, values):
            cfg[name] = val
        prm_eval = params.PhysicalParams(
            g_ph=prm.g_ph, delta=prm.delta, n_osc=prm.n_osc,
            z_max=prm.z_max, z_omega=prm.z_omega,
            p_plus=min(max(cfg["p_plus"], 0.0), 1.0),
            p_minus=1.0 - min(max(cfg["p_plus"], 0.0), 1.0),
            t_cav_us=None, freq_convention=prm.freq_convention)
        if state == "coherent":
            w = dynamics.coherent_nz_samples(prm_eval, cfg["ncoh"], cfg["NZ"], t)
        else:
            w = dynamics.thermal_nz_samples(prm_eval, cfg["nbar"], cfg["NZ"], t)
        if cfg.get("T_cav") is not None:
            w = dynamics.damp_samples(w, t, cfg["T_cav"])
        return w
    return model


_FIT_BOUNDS = {"NZ": (1.0, 1e6), "T_cav": (1.0, 1e7), "p_plus": (0.0, 1.0),
               "nbar": (0.0, 100.0), "ncoh": (0.0, 1000.0)}


def cmd_fit(args):
    free = [name.strip() for name in args.free.split(",") if name.strip()]
    for name in free:
        if name not in _FREE_CHOICES:
            raise params.OutOfRange("free", f"unknown parameter {name!r}; "
                                            f"choose from {_FREE_CHOICES}")
    t, w = read_signal_csv(args.data)
    if t.size == 0:
        raise analysis.InsufficientData("data file holds no points")
    prm = _params_from_args(args)
    fixed = {"NZ": args.nz, "T_cav": args.tcav_us, "p_plus": args.p_plus
             if args.p_plus is not None else 1.0,
             "nbar": args.nbar or 0.0, "ncoh": args.ncoh or 0.0}
    template = build_fit_model(args.state, prm, fixed)
    x0 = np.array([fixed[name] if fixed[name] is not None else 100.0 for name in free])
    bounds = [_FIT_BOUNDS[name] for name in free]

    def model(x, tt):
        return template(x, free, tt)

    result = analysis.fit(t, w, model, x0, bounds=bounds, names=free,
                          max_iter=args.max_iter)
    print("fit result:")
    print(result.summary())
    if args.out:
        lines = ["param,value,stderr"]
        for name, val, err in zip(result.names, result.values, result.stderr):
            lines.append(f"{name},{_fmt(val)},{_fmt(err)}")
        lines.append(f"rss,{_fmt(result.rss)},")
        lines.append(f"iterations,{result.iterations},")
        lines.append(f"converged,{int(result.converged)},")
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def cmd_oracle(args):
    profile = oracle.default_profile(args.modes, args.z_omega)
    z_max = float(np.max(profile ** 2))
    g_ph = params.khz_to_rad_per_us(args.g_khz, args.convention or params.CYCLIC)
    delta = params.khz_to_rad_per_us(args.delta_khz or 0.0,
                                     args.convention or params.CYCLIC)
    model = oracle.build_model(args.n_osc, args.modes, args.fock,
                               g=g_ph / np.sqrt(z_max), delta=delta,
                               z_omega=args.z_omega)
    reports = oracle.run_all_checks(model, z=0.1, corrupt=args.negative_control)
    for report in reports:
        print(report)

    times = dynamics.time_grid(args.t_max_us, args.dt_us)
    sig_oracle, info = oracle.evolve_exact(model, times, atom="plus",
                                           z=args.displacement)
    prm = model.matching_params()
    if args.displacement == 0.0:
        sig_closed = dynamics.w_vacuum_reducible(prm, times)
    else:
        n_coh = args.displacement ** 2 * z_max
        sig_closed = dynamics.w_coherent_reducible(prm, n_coh, times)
    dev = float(np.max(np.abs(sig_oracle.samples - sig_closed.samples)))
    tol = 1e-10 if args.displacement == 0.0 else 1e-8
    ok = dev < tol
    print(f"closed-form agreement: max deviation {dev:.3e} (tol {tol:g}) "
          f"{'ok' if ok else 'FAIL'}")
    print(f"factorization check: deviation {info['factorization_dev']:.3e} ok")
    all_ok = ok and all(r.passed for r in reports)
    return 0 if all_ok else 1


def cmd_spectrum(args):
    t, w = read_signal_csv(args.input)
    if t.size < 2:
        raise DataFormatError(f"{args.input}: need at least two samples")
    steps = np.diff(t)
    if np.max(np.abs(steps - steps[0])) > 1e-9 * max(abs(steps[0]), 1.0):
        raise DataFormatError(f"{args.input}: time grid is not uniform")
    sig = dynamics.InversionSignal(float(t[0]), float(steps[0]), w,
                                   dynamics.IRREDUCIBLE,
                                   params.FieldState.vacuum(), "csv")
    spec = analysis.spectrum(sig, symmetrize=args.symmetrize)
    lines = ["freq_khz,amplitude"]
    for f, a in zip(spec.freq_khz, spec.amplitude):
        lines.append(f"{_fmt(f)},{_fmt(a)}")
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def _add_param_flags(sub):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--g-khz", dest="g_khz", type=float, help="coupling in kHz")
    sub.add_argument("--delta-khz", dest="delta_khz", type=float, help="detuning in kHz")
    sub.add_argument("--convention", choices=(params.CYCLIC, params.ANGULAR),
                     help="kHz reading (default cyclic)")
    sub.add_argument("--N", dest="N", type=int, help="oscillator number")
    sub.add_argument("--Z", dest="Z", type=float, help="invariant vacuum probability Z")
    sub.add_argument("--Z-omega", dest="Z_omega", type=float,
                     help="resonant-mode vacuum probability (default Z)")
    sub.add_argument("--p-plus", dest="p_plus", type=float,
                     help="excited-state weight of the atomic mixture")
    sub.add_argument("--tcav-us", dest="tcav_us", type=float,
                     help="cavity lifetime in us (omit for an ideal cavity)")
    sub.add_argument("--nbar", type=float, help="mean thermal photon number")
    sub.add_argument("--ncoh", type=float, help="mean coherent photon number")


def _parser():
    parser = argparse.ArgumentParser(
        prog="jcrabi",
        description="Jaynes-Cummings inversion dynamics across CCR representations")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="generate an inversion signal CSV")
    _add_param_flags(sim)
    sim.add_argument("--model", choices=("irreducible", "reducible", "limit"))
    sim.add_argument("--state", choices=("vacuum", "thermal", "coherent", "ground"))
    sim.add_argument("--zeta", type=float, default=1.0,
                     help="central parameter of the irreducible representation")
    sim.add_argument("--t-max-us", dest="t_max_us", type=float)
    sim.add_argument("--dt-us", dest="dt_us", type=float)
    sim.add_argument("--tail-eps", dest="tail_eps", type=float, default=1e-12)
    sim.add_argument("--p-excited", action="store_true",
                     help="emit p_excited = w + 1/2 instead of w")
    sim.add_argument("--out", default="-", help="output CSV path (default stdout)")
    sim.add_argument("--preset", help="named figure preset (fig1, fig3..fig11)")
    sim.add_argument("--out-dir", dest="out_dir", default=".",
                     help="output directory for preset series")
    sim.set_defaults(func=cmd_simulate)

    fit_p = subs.add_parser("fit", help="least-squares fit to (t_us, P_e) data")
    _add_param_flags(fit_p)
    fit_p.add_argument("--data", required=True, help="CSV of t_us,p_excited")
    fit_p.add_argument("--free", required=True,
                       help=f"comma list from {_FREE_CHOICES}")
    fit_p.add_argument("--state", choices=("thermal", "coherent"), default="thermal")
    fit_p.add_argument("--nz", type=float, default=30.0, help="initial NZ")
    fit_p.add_argument("--max-iter", dest="max_iter", type=int, default=200)
    fit_p.add_argument("--out", help="optional CSV for the fit result")
    fit_p.set_defaults(func=cmd_fit)

    orc = subs.add_parser("oracle", help="run the matrix-oracle identity checks")
    orc.add_argument("--n-osc", dest="n_osc", type=int, default=2)
    orc.add_argument("--modes", type=int, default=2)
    orc.add_argument("--fock", type=int, default=5)
    orc.add_argument("--z-omega", dest="z_omega", type=float, default=0.5)
    orc.add_argument("--g-khz", dest="g_khz", type=float, default=47.0)
    orc.add_argument("--delta-khz", dest="delta_khz", type=float, default=0.0)
    orc.add_argument("--convention", choices=(params.CYCLIC, params.ANGULAR))
    orc.add_argument("--displacement", type=float, default=0.0,
                     help="collective-mode displacement amplitude z")
    orc.add_argument("--t-max-us", dest="t_max_us", type=float, default=200.0)
    orc.add_argument("--dt-us", dest="dt_us", type=float, default=0.5)
    orc.add_argument("--negative-control", dest="negative_control",
                     action="store_true",
                     help="inject known defects; the checks must then fail")
    orc.set_defaults(func=cmd_oracle)

    spec = subs.add_parser("spectrum", help="Fourier magnitude of a signal CSV")
    spec.add_argument("--in", dest="input", required=True)
    spec.add_argument("--symmetrize", action="store_true",
                      help="reflect the series about t=0 before transforming")
    spec.add_argument("--out", default="-")
    spec.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None):
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (params.ParamError, weights.DegenerateWidth, DataFormatError,
            analysis.InsufficientData, analysis.InsufficientSampling,
            oracle.DimensionCap, oracle.UnnormalizedProfile) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except analysis.NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except oracle.TruncationLeak as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
