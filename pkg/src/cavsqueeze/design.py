"""Operating-point calculator: squeezing limits, optima and design reports.

Two mechanisms floor the attainable normalized variance:

  * Bloch-sphere curvature (no scattering):
      sigma_curv^2 = (5/4) 6^{-1/5} S^{-2/5}  at  Q_curv = 6^{1/5} S^{2/5},
    the analytic minimizer of the two-term form 1/Q + Q^4/(24 S^2),
  * free-space Raman scattering (curvature negligible):
      sigma^2 = 2/sqrt(3 S eta)  at  Q_scatt = sqrt(3 S eta),
      r_opt = sqrt(3/(16 S eta)),  with the identity Q = 4 S eta r.

Curvature wins (is the binding limit) iff S eta^5 >= 1; both floors are
asymptotic, so the recommended operating point comes from numerical
minimization of the full modified curve, with the closed forms reported
alongside.
"""

import math
import warnings
from dataclasses import dataclass, field

from .cavity import kappa_t_required, validate_regime
from .params import DrivePulse, RegimeThresholds
from .raman import modified_min_variance

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(f, lo, hi, tol=1e-12, max_iter=300):
    """Golden-section minimum of a unimodal f on [lo, hi]; returns (x, f(x)).

    tol is the relative width of the final bracket.
    """
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if (b - a) <= tol * (abs(a) + abs(b)) / 2.0:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def curvature_optimum(total_spin):
    """(Q_curv, sigma_curv_sq): closed-form optimum of 1/Q + Q^4/(24 S^2)."""
    if total_spin < 1.0:
        raise ValueError("curvature optimum needs S >= 1")
    s = float(total_spin)
    q_curv = 6.0 ** 0.2 * s ** 0.4
    sigma_curv_sq = 1.25 * 6.0 ** (-0.2) * s ** (-0.4)
    return q_curv, sigma_curv_sq


def scattering_optimum(total_spin, eta):
    """(Q_scatt, r_opt, sigma_sq): closed-form optimum of 1/Q + Q/(3 S eta).

    Warns when r_opt >= 0.3, where the small-r expansion behind the
    two-term form stops being trustworthy.
    """
    s_eta = total_spin * eta
    if s_eta <= 0.0:
        raise ValueError("collective cooperativity S*eta must be positive")
    q_scatt = math.sqrt(3.0 * s_eta)
    r_opt = math.sqrt(3.0 / (16.0 * s_eta))
    sigma_sq = 2.0 / math.sqrt(3.0 * s_eta)
    if r_opt >= 0.3:
        warnings.warn(
            f"r_opt = {r_opt:.3g} is not small; the low-scattering expansion "
            "behind this optimum is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    return q_scatt, r_opt, sigma_sq


@dataclass(frozen=True)
class RegimeClassification:
    """Which floor binds, with both candidate values for direct comparison."""

    regime: str  # "curvature" | "scattering"
    s_eta5: float
    sigma_curv_sq: float
    sigma_scatt_sq: float
    near_boundary: bool

    def as_dict(self):
        return {
            "regime": self.regime,
            "s_eta5": self.s_eta5,
            "sigma_curv_sq": self.sigma_curv_sq,
            "sigma_scatt_sq": self.sigma_scatt_sq,
            "near_boundary": self.near_boundary,
        }


def classify_regime(total_spin, eta, boundary=1.0, boundary_band=3.0):
    """Curvature-limited iff S eta^5 >= boundary (exactly 1 by convention).

    The criterion is an order-of-magnitude rule; points with S eta^5 within
    a factor boundary_band^5 of the threshold (i.e. eta within a factor
    boundary_band of the boundary coupling) carry near_boundary = True.
    """
    if total_spin <= 0.0 or eta <= 0.0:
        raise ValueError("S and eta must be positive")
    s_eta5 = total_spin * eta ** 5
    _, sigma_curv_sq = curvature_optimum(max(total_spin, 1.0))
    sigma_scatt_sq = 2.0 / math.sqrt(3.0 * total_spin * eta)
    regime = "curvature" if s_eta5 >= boundary else "scattering"
    band = boundary_band ** 5
    near = boundary / band <= s_eta5 <= boundary * band
    return RegimeClassification(
        regime=regime,
        s_eta5=s_eta5,
        sigma_curv_sq=sigma_curv_sq,
        sigma_scatt_sq=sigma_scatt_sq,
        near_boundary=near,
    )


def full_curve_minimum(total_spin, eta, q_lo=None, q_hi=None, tol=1e-12, scan_points=64):
    """Numerical minimum over Q of the full scattering-modified curve.

    Returns (q_min, sigma_min_sq).  The default bracket spans the closed-form
    optima with a wide margin while staying inside the G-factor domain
    (Q_eff <= Q < (pi/2) S).  A coarse logarithmic scan brackets the minimum
    first: the curve saturates at sigma^2 = 1 for very large Q, and a plain
    golden section can lose an interior minimum against that plateau.
    """
    s = float(total_spin)
    if q_lo is None or q_hi is None:
        q_curv, _ = curvature_optimum(max(s, 1.0))
        q_scatt = math.sqrt(3.0 * s * eta)
        guess = max(q_curv, q_scatt, 10.0)
        q_lo = q_lo if q_lo is not None else min(0.05 * guess, 1.0)
        q_hi = q_hi if q_hi is not None else min(4.0 * guess, 1.4 * s)

    def f(q):
        return modified_min_variance(s, eta, q)

    grid = [q_lo * (q_hi / q_lo) ** (i / (scan_points - 1)) for i in range(scan_points)]
    values = [f(q) for q in grid]
    best = min(range(scan_points), key=values.__getitem__)
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, scan_points - 1)]
    return golden_section_min(f, lo, hi, tol=tol)


@dataclass(frozen=True)
class DesignTargets:
    """Experiment-design constraints and optional overrides."""

    max_excited_pop: float = 1e-5
    q_target: float = None  # None: recommend from the full-curve minimum
    thresholds: RegimeThresholds = field(default_factory=RegimeThresholds)


@dataclass(frozen=True)
class SqueezeReport:
    """Complete operating-point report for one parameter set."""

    q_curv: float
    sigma_curv_sq: float
    q_scatt: float
    r_opt: float
    sigma_scatt_sq: float
    limiting_regime: str
    near_boundary: bool
    q_recommended: float
    sigma_recommended_sq: float
    r_recommended: float
    spin_shortening_flag: bool  # r beyond ~0.1: neglected vector shortening suspect
    p0_required: float
    t_constraints: dict
    validity: object  # RegimeReport
    provenance: dict

    def as_dict(self):
        return {
            "q_curv": self.q_curv,
            "sigma_curv_sq": self.sigma_curv_sq,
            "q_scatt": self.q_scatt,
            "r_opt": self.r_opt,
            "sigma_scatt_sq": self.sigma_scatt_sq,
            "limiting_regime": self.limiting_regime,
            "near_boundary": self.near_boundary,
            "q_recommended": self.q_recommended,
            "sigma_recommended_sq": self.sigma_recommended_sq,
            "r_recommended": self.r_recommended,
            "spin_shortening_flag": self.spin_shortening_flag,
            "p0_required": self.p0_required,
            "t_constraints": dict(self.t_constraints),
            "validity": self.validity.as_dict(),
            "provenance": dict(self.provenance),
        }


def design_report(ensemble, params, pulse_time, targets=None):
    """Aggregate limits, optima and validity into one SqueezeReport.

    The recommended Q is min(full-curve minimizer, Q_curv); a q_target of
    zero is rejected ("no shearing requested"), any other positive value
    overrides the recommendation.
    """
    targets = targets if targets is not None else DesignTargets()
    s = ensemble.total_spin
    eta = params.eta

    q_curv, sigma_curv_sq = curvature_optimum(max(s, 1.0))
    q_scatt, r_opt, sigma_scatt_sq = scattering_optimum(s, eta)
    classification = classify_regime(s, eta)

    if targets.q_target is not None:
        if targets.q_target <= 0.0:
            raise ValueError("no shearing requested: q_target must be positive")
        q_rec = float(targets.q_target)
        sigma_rec = modified_min_variance(s, eta, q_rec)
    else:
        q_full, sigma_full = full_curve_minimum(s, eta)
        q_rec = min(q_full, q_curv)
        sigma_rec = modified_min_variance(s, eta, q_rec)
    r_rec = q_rec / (4.0 * s * eta)

    p0_required = q_rec / (s * (2.0 * params.omega_shift / params.kappa) ** 2)
    drive = DrivePulse.from_shearing(q_rec, pulse_time, ensemble, params)
    validity = validate_regime(ensemble, params, drive, targets.thresholds)

    kt_saturation = kappa_t_required(ensemble, params, q_rec, targets.max_excited_pop)
    kt_resolve = targets.thresholds.min_kappa_t
    kt_actual = params.kappa * pulse_time
    t_constraints = {
        "kappa_t_actual": kt_actual,
        "kappa_t_min_resolve": kt_resolve,
        "kappa_t_min_saturation": kt_saturation,
        "t_min_seconds": max(kt_saturation, kt_resolve) / params.kappa,
        "satisfied": kt_actual >= max(kt_saturation, kt_resolve),
    }

    from . import __version__
    from .serialize import SCHEMA_VERSION

    provenance = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "total_spin": s,
        "atom_count": ensemble.atom_count,
        "eta": eta,
        "pulse_time_s": pulse_time,
        "max_excited_pop": targets.max_excited_pop,
        "params": params.as_dict(),
    }
    return SqueezeReport(
        q_curv=q_curv,
        sigma_curv_sq=sigma_curv_sq,
        q_scatt=q_scatt,
        r_opt=r_opt,
        sigma_scatt_sq=sigma_scatt_sq,
        limiting_regime=classification.regime,
        near_boundary=classification.near_boundary,
        q_recommended=q_rec,
        sigma_recommended_sq=sigma_rec,
        r_recommended=r_rec,
        spin_shortening_flag=r_rec > 0.1,
        p0_required=p0_required,
        t_constraints=t_constraints,
        validity=validity,
        provenance=provenance,
    )
