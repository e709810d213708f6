"""Physical and numerical parameters, validation, and unit conversion.

Unit conventions
----------------
Time is measured in microseconds and angular frequencies in rad/us
throughout the package.  User-facing inputs (config files, CLI flags)
give frequencies in kHz; the ``freq_convention`` key controls how a
kHz figure is mapped onto the internal angular value:

* ``cyclic``  : f kHz -> 2*pi*f*1e-3 rad/us  (f is a cycles-per-second figure)
* ``angular`` : f kHz -> f*1e-3 rad/us       (f is already an angular figure)

The default is ``cyclic``.  Serialized configs store the internal
rad/us values directly so that a round trip is bit-for-bit exact.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields

CYCLIC = "cyclic"
ANGULAR = "angular"

#: Marker for the N -> infinity limit models.
INFINITE = math.inf

_MIXTURE_TOL = 1e-12


class ParamError(ValueError):
    """Base class for parameter validation failures."""


class MissingKey(ParamError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"missing required config key: {key}")


class OutOfRange(ParamError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"config key {key}: {message}")


class InconsistentMixture(ParamError):
    def __init__(self, p_plus, p_minus):
        super().__init__(
            f"atomic mixture weights must sum to 1 (got p_plus={p_plus!r}, "
            f"p_minus={p_minus!r})"
        )


def khz_to_rad_per_us(f_khz, convention=CYCLIC):
    """Convert a kHz frequency figure to the internal rad/us value."""
    if convention == CYCLIC:
        return 2.0 * math.pi * f_khz * 1e-3
    if convention == ANGULAR:
        return f_khz * 1e-3
    raise OutOfRange("freq_convention", f"unknown convention {convention!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Validated model parameters in internal units (rad/us, us).

    ``g_ph`` is the physical (renormalized) coupling magnitude and
    ``delta`` the detuning, both as angular frequencies.  ``n_osc`` is
    the oscillator number of the reducible representation (``INFINITE``
    selects the limit models).  ``z_max`` is the invariant maximum Z of
    the vacuum probability profile and ``z_omega`` the probability of
    the resonant mode; their ratio ``chi_omega`` is the cut-off value
    at the resonant frequency.
    """

    g_ph: float
    delta: float = 0.0
    n_osc: float = INFINITE
    z_max: float = 0.1
    z_omega: float = 0.1
    p_plus: float = 1.0
    p_minus: float = 0.0
    t_cav_us: float | None = None
    freq_convention: str = CYCLIC

    def __post_init__(self):
        if not (self.g_ph > 0):
            raise OutOfRange("g_ph_khz", f"coupling must be positive, got {self.g_ph}")
        if not (0.0 < self.z_max <= 1.0):
            raise OutOfRange("z_max", f"must lie in (0, 1], got {self.z_max}")
        if not (0.0 < self.z_omega <= 1.0):
            raise OutOfRange("z_omega", f"must lie in (0, 1], got {self.z_omega}")
        if self.z_omega > self.z_max:
            raise OutOfRange(
                "z_omega",
                f"chi_omega = z_omega/z_max = {self.z_omega / self.z_max:g} exceeds 1",
            )
        if self.n_osc != INFINITE:
            if self.n_osc != int(self.n_osc) or self.n_osc < 1:
                raise OutOfRange("n_osc", f"must be a positive integer, got {self.n_osc}")
        if not (0.0 <= self.p_plus <= 1.0):
            raise OutOfRange("p_plus", f"must lie in [0, 1], got {self.p_plus}")
        if not (0.0 <= self.p_minus <= 1.0):
            raise OutOfRange("p_minus", f"must lie in [0, 1], got {self.p_minus}")
        if abs(self.p_plus + self.p_minus - 1.0) > _MIXTURE_TOL:
            raise InconsistentMixture(self.p_plus, self.p_minus)
        if self.t_cav_us is not None and not (self.t_cav_us > 0):
            raise OutOfRange("t_cav_us", f"lifetime must be positive, got {self.t_cav_us}")
        if self.freq_convention not in (CYCLIC, ANGULAR):
            raise OutOfRange("freq_convention", f"unknown convention {self.freq_convention!r}")

    @property
    def chi_omega(self):
        return self.z_omega / self.z_max

    @property
    def is_finite(self):
        return self.n_osc != INFINITE

    def digest(self, *extra):
        """Short opaque identifier for this parameter set (plus extras)."""
        parts = [f"{f.name}={getattr(self, f.name)!r}" for f in fields(self)]
        parts.extend(repr(e) for e in extra)
        return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class FieldState:
    """Initial field condition: vacuum, thermal mixture, or coherent state."""

    VACUUM = "vacuum"
    THERMAL = "thermal"
    COHERENT = "coherent"

    kind: str
    n_bar: float = 0.0
    n_coh: float = 0.0

    def __post_init__(self):
        if self.kind not in (self.VACUUM, self.THERMAL, self.COHERENT):
            raise OutOfRange("state", f"unknown field state {self.kind!r}")
        if self.n_bar < 0:
            raise OutOfRange("nbar", f"mean thermal photon number must be >= 0, got {self.n_bar}")
        if self.n_coh < 0:
            raise OutOfRange("ncoh", f"mean coherent photon number must be >= 0, got {self.n_coh}")

    @classmethod
    def vacuum(cls):
        return cls(cls.VACUUM)

    @classmethod
    def thermal(cls, n_bar):
        return cls(cls.THERMAL, n_bar=float(n_bar))

    @classmethod
    def coherent(cls, n_coh):
        return cls(cls.COHERENT, n_coh=float(n_coh))


_USER_KEYS = {
    "g_ph_khz", "delta_khz", "n_osc", "z_max", "z_omega",
    "p_plus", "p_minus", "t_cav_us", "freq_convention",
    "g_ph_rad_per_us", "delta_rad_per_us",
}


def _as_float(raw, key):
    try:
        return float(raw[key])
    except (TypeError, ValueError):
        raise OutOfRange(key, f"cannot parse {raw[key]!r} as a number") from None


def normalize(raw):
    """Validate a flat key/value config and return :class:`PhysicalParams`.

    ``raw`` maps strings to strings or numbers.  The coupling is
    required, either as ``g_ph_khz`` (converted per ``freq_convention``)
    or as an already-normalized ``g_ph_rad_per_us``; everything else
    has defaults.  Raises :class:`MissingKey`, :class:`OutOfRange`, or
    :class:`InconsistentMixture` on bad input.
    """
    for key in raw:
        if key not in _USER_KEYS:
            raise OutOfRange(key, "unknown config key")

    convention = str(raw.get("freq_convention", CYCLIC)).lower()
    if convention not in (CYCLIC, ANGULAR):
        raise OutOfRange("freq_convention", f"unknown convention {convention!r}")

    if "g_ph_rad_per_us" in raw:
        g_ph = _as_float(raw, "g_ph_rad_per_us")
    elif "g_ph_khz" in raw:
        g_ph = khz_to_rad_per_us(_as_float(raw, "g_ph_khz"), convention)
    else:
        raise MissingKey("g_ph_khz")

    if "delta_rad_per_us" in raw:
        delta = _as_float(raw, "delta_rad_per_us")
    elif "delta_khz" in raw:
        delta = khz_to_rad_per_us(_as_float(raw, "delta_khz"), convention)
    else:
        delta = 0.0

    n_osc = INFINITE
    if "n_osc" in raw:
        text = str(raw["n_osc"]).strip().lower()
        if text in ("inf", "infinite"):
            n_osc = INFINITE
        else:
            try:
                n_osc = int(text)
            except ValueError:
                raise OutOfRange("n_osc", f"cannot parse {raw['n_osc']!r}") from None

    z_max = _as_float(raw, "z_max") if "z_max" in raw else 0.1
    z_omega = _as_float(raw, "z_omega") if "z_omega" in raw else z_max

    p_plus = _as_float(raw, "p_plus") if "p_plus" in raw else 1.0
    p_minus = _as_float(raw, "p_minus") if "p_minus" in raw else 1.0 - p_plus

    t_cav = None
    if "t_cav_us" in raw:
        text = str(raw["t_cav_us"]).strip().lower()
        if text not in ("none", ""):
            t_cav = _as_float(raw, "t_cav_us")

    return PhysicalParams(
        g_ph=g_ph, delta=delta, n_osc=n_osc, z_max=z_max, z_omega=z_omega,
        p_plus=p_plus, p_minus=p_minus, t_cav_us=t_cav,
        freq_convention=convention,
    )


def to_config(params):
    """Serialize params to a flat config dict that re-normalizes bit-for-bit.

    Frequencies are emitted in internal rad/us (``repr`` round-trips
    doubles exactly), so ``normalize(to_config(p)) == p``.
    """
    cfg = {
        "g_ph_rad_per_us": repr(params.g_ph),
        "delta_rad_per_us": repr(params.delta),
        "n_osc": "inf" if params.n_osc == INFINITE else str(int(params.n_osc)),
        "z_max": repr(params.z_max),
        "z_omega": repr(params.z_omega),
        "p_plus": repr(params.p_plus),
        "p_minus": repr(params.p_minus),
        "t_cav_us": "none" if params.t_cav_us is None else repr(params.t_cav_us),
        "freq_convention": params.freq_convention,
    }
    return cfg


def parse_config_file(path):
    """Read a flat ``key = value`` config file; ``#`` starts a comment."""
    raw = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise OutOfRange(f"line {lineno}", f"expected key=value, got {line.strip()!r}")
            key, value = text.split("=", 1)
            raw[key.strip()] = value.strip()
    return raw


def write_config_file(path, cfg):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in cfg.items():
            fh.write(f"{key} = {value}\n")
