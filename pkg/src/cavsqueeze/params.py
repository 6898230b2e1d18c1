"""Physical parameter bundles and config-file ingestion.

Conventions used throughout the package:

  * every frequency-like quantity is angular (rad/s); config files and the
    CLI accept plain Hz and the 2*pi is applied here, at the boundary,
  * the collective spin S describes N = 2S two-level atoms,
  * the dispersive cavity shift per unit S_z is Omega = 2 g^2 / |Delta|
    (single-photon Rabi frequency 2g, detuning Delta),
  * single-atom cooperativity eta = 4 g^2 / (kappa Gamma),
  * a drive pulse is summarised by p0, the mean photon number transmitted
    at S_z = 0 during the pulse time t, with p0 = |beta|^2 kappa t / 2, and
    by the dimensionless shearing strength Q = S p0 (2 Omega / kappa)^2.
"""

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi

# Rb D2 population decay rate 2*pi * 6.07 MHz.  Worked examples in this
# domain usually quote only Delta/Gamma, so Gamma is a configurable default
# that gets echoed into every serialized report.
DEFAULT_GAMMA = TWO_PI * 6.07e6


def _two_s(total_spin):
    two_s = 2.0 * total_spin
    if two_s < 1.0 or two_s != round(two_s):
        raise ValueError(f"total spin must be a positive half-integer, got {total_spin!r}")
    return round(two_s)


@dataclass(frozen=True)
class EnsembleSpec:
    """Collective spin S of an ensemble of N = 2S identical two-level atoms."""

    total_spin: float
    atom_count: int = field(init=False)
    dicke_dim: int = field(init=False)

    def __post_init__(self):
        two_s = _two_s(self.total_spin)
        object.__setattr__(self, "total_spin", float(self.total_spin))
        object.__setattr__(self, "atom_count", two_s)
        object.__setattr__(self, "dicke_dim", two_s + 1)

    @classmethod
    def from_atom_count(cls, n_atoms):
        return cls(total_spin=n_atoms / 2.0)


@dataclass(frozen=True)
class CavityAtomParams:
    """Cavity-atom coupling parameters, all angular frequencies in rad/s.

    Attributes
    ----------
    g : float
        Atom-cavity coupling; the single-photon Rabi frequency is 2g.
    kappa : float
        Cavity linewidth (FWHM).
    gamma : float
        Excited-state population decay rate.
    delta : float
        Laser-atom detuning, sign carried.
    omega_shift : float
        Derived dispersive shift per unit S_z, 2 g^2 / |delta|.
    eta : float
        Derived single-atom cooperativity 4 g^2 / (kappa gamma).
    """

    g: float
    kappa: float
    gamma: float
    delta: float
    omega_shift: float = field(init=False)
    eta: float = field(init=False)

    def __post_init__(self):
        if self.g <= 0.0 or self.kappa <= 0.0 or self.gamma <= 0.0:
            raise ValueError("g, kappa and gamma must all be positive")
        if self.delta == 0.0:
            raise ValueError("detuning must be nonzero")
        object.__setattr__(self, "omega_shift", 2.0 * self.g * self.g / abs(self.delta))
        object.__setattr__(self, "eta", 4.0 * self.g * self.g / (self.kappa * self.gamma))

    @classmethod
    def from_hz(cls, g_hz, kappa_hz, gamma_hz=None, delta_hz=None, delta_over_gamma=None):
        """Build from plain-Hz inputs; exactly one of delta_hz/delta_over_gamma."""
        gamma = TWO_PI * gamma_hz if gamma_hz is not None else DEFAULT_GAMMA
        if (delta_hz is None) == (delta_over_gamma is None):
            raise ValueError("give exactly one of delta_hz or delta_over_gamma")
        delta = TWO_PI * delta_hz if delta_hz is not None else delta_over_gamma * gamma
        return cls(g=TWO_PI * g_hz, kappa=TWO_PI * kappa_hz, gamma=gamma, delta=delta)

    def as_dict(self):
        return {
            "g_rad_s": self.g,
            "kappa_rad_s": self.kappa,
            "gamma_rad_s": self.gamma,
            "delta_rad_s": self.delta,
            "omega_shift_rad_s": self.omega_shift,
            "eta": self.eta,
        }


@dataclass(frozen=True)
class DrivePulse:
    """Drive pulse: photon budget p0 over pulse_time, with derived rate and Q.

    p0 is the mean photon number transmitted at S_z = 0, drive_rate is
    |beta|^2 = 2 p0 / (kappa t) in photons/s, and shearing_q is
    Q = S p0 (2 Omega / kappa)^2 for the system the pulse was built against.
    """

    p0: float
    pulse_time: float
    drive_rate: float
    shearing_q: float

    def __post_init__(self):
        if self.p0 < 0.0:
            raise ValueError("p0 must be nonnegative")
        if self.pulse_time <= 0.0:
            raise ValueError("pulse_time must be positive")
        if self.shearing_q < 0.0:
            raise ValueError("shearing strength must be nonnegative")

    @classmethod
    def from_photon_budget(cls, p0, pulse_time, ensemble, params):
        if pulse_time <= 0.0:
            raise ValueError("pulse_time must be positive")
        q = ensemble.total_spin * p0 * (2.0 * params.omega_shift / params.kappa) ** 2
        rate = 2.0 * p0 / (params.kappa * pulse_time)
        return cls(p0=p0, pulse_time=pulse_time, drive_rate=rate, shearing_q=q)

    @classmethod
    def from_shearing(cls, q, pulse_time, ensemble, params):
        p0 = q / (ensemble.total_spin * (2.0 * params.omega_shift / params.kappa) ** 2)
        return cls.from_photon_budget(p0, pulse_time, ensemble, params)

    def as_dict(self):
        return {
            "p0": self.p0,
            "pulse_time_s": self.pulse_time,
            "drive_rate_photons_s": self.drive_rate,
            "shearing_q": self.shearing_q,
        }


@dataclass(frozen=True)
class RegimeThresholds:
    """Pass/fail thresholds for the operating-regime checks."""

    max_excited_pop: float = 1e-5       # low saturation, epsilon <= this
    min_kappa_t: float = 10.0           # resolve the cavity line, kappa t >> 1
    max_linearity_ratio: float = 0.1    # Omega sqrt(S/2) / kappa small
    min_detuning_margin: float = 10.0   # |Delta| >> kappa, Gamma, g

    def as_dict(self):
        return {
            "max_excited_pop": self.max_excited_pop,
            "min_kappa_t": self.min_kappa_t,
            "max_linearity_ratio": self.max_linearity_ratio,
            "min_detuning_margin": self.min_detuning_margin,
        }


# Config file schema: flat "key = value" lines, '#' comments.  Frequencies in
# Hz.  Exactly one of delta_over_gamma / delta_hz; gamma_hz optional (default
# DEFAULT_GAMMA).  p0 and t_s describe the drive pulse.
CONFIG_KEYS = ("S", "g_hz", "kappa_hz", "gamma_hz", "delta_over_gamma", "delta_hz", "p0", "t_s")
_REQUIRED_KEYS = ("S", "g_hz", "kappa_hz", "p0", "t_s")


def load_config(path):
    """Parse a flat key = value config file into a dict of floats."""
    cfg = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r} (known: {', '.join(CONFIG_KEYS)})")
            try:
                cfg[key] = float(value.strip())
            except ValueError:
                raise ValueError(f"{path}:{lineno}: value for {key!r} is not a number") from None
    missing = [k for k in _REQUIRED_KEYS if k not in cfg]
    if missing:
        raise ValueError(f"{path}: missing required keys: {', '.join(missing)}")
    return cfg


def system_from_config(cfg):
    """Build (EnsembleSpec, CavityAtomParams, DrivePulse) from a config dict."""
    ensemble = EnsembleSpec(total_spin=cfg["S"])
    params = CavityAtomParams.from_hz(
        g_hz=cfg["g_hz"],
        kappa_hz=cfg["kappa_hz"],
        gamma_hz=cfg.get("gamma_hz"),
        delta_hz=cfg.get("delta_hz"),
        delta_over_gamma=cfg.get("delta_over_gamma"),
    )
    drive = DrivePulse.from_photon_budget(cfg["p0"], cfg["t_s"], ensemble, params)
    return ensemble, params, drive
