"""Closed-form second moments of the cavity-sheared collective spin.

After the pulse, in the frame rotated back about z by the S_z = 0 light
shift, the coherence moments of the sheared spin on a CSS along +x are
(exact finite sums of the binomial amplitudes, evaluated in closed form):

    <S~_+>   =  S G(Q/2) e^{i Q/(2S)}
    <S~_+^2> = (S(2S-1)/2) cos^{2S-2}(Q/S) e^{-Q/S} e^{i Q/S}
    <S~_y^2> =  S^2/2 + S/4 - (S^2/2 - S/4) e^{-Q/S} G(Q)
    W = <{S~_y, S_z}> = (2S^2 - S) sin(Q/(2S)) G(Q/2)

with G(u) = cos^{2S-1}(u/S) and Q the dimensionless shearing strength.
The e^{-Q/S} damping is photon shot noise on the second coherence; the
G factors carry the Bloch-sphere curvature.  The residual mean rotation
Q/(2S) makes <S~_y> = S G(Q/2) sin(Q/(2S)) slightly nonzero, and the
variance proper subtracts it:  Delta S~_y^2 = <S~_y^2> - <S~_y>^2.  The
subtraction is O(1/S) relative at large S but matters for exact-oracle
agreement at small S.

The variance of the spin component measured after rotating the state about
x by -alpha is

    sigma^2(alpha) = (V+ - sqrt(V-^2 + W^2) cos[2(alpha - alpha_0)]) / 2,

V+- = Delta S~_y^2 +- Delta S_z^2, tan(2 alpha_0) = W / V-; the measured
quadrature at angle alpha is cos(alpha) S_z - sin(alpha) S~_y.
"""

import cmath
import math
import warnings
from dataclasses import dataclass

# Direct signed integer cosine powers below this spin (valid for any
# argument); log-space evaluation above (principal branch only, raises
# outside it).  cos^19999 underflows in naive evaluation, hence the split.
_DIRECT_POWER_MAX_SPIN = 50.0


def _cos_power(x, power):
    """cos(x)**power for integer power >= 0, stable for large powers."""
    power = int(power)
    if power < 0:
        raise ValueError("power must be a nonnegative integer")
    if power == 0:
        return 1.0
    if power <= 2 * _DIRECT_POWER_MAX_SPIN:
        return math.cos(x) ** power
    if math.cos(x) <= 0.0:
        raise ValueError(f"cos({x!r}) <= 0: outside the principal branch of the log-space power")
    # ln cos x through 1 - cos x = 2 sin^2(x/2): full relative precision at
    # small x, where cos(x) - 1 would vanish into the last bits of 1.0
    half_sin = math.sin(x / 2.0)
    return math.exp(power * math.log1p(-2.0 * half_sin * half_sin))


def g_factor(total_spin, u):
    """Binomial coherence factor G(u) = cos^{2S-1}(u/S).

    For S <= 50 the integer power is evaluated directly and stays valid for
    any argument; for larger S the value is exp((2S-1) ln cos(u/S)), which
    requires cos(u/S) > 0 and raises ValueError otherwise.  G(0) = 1 for any
    S, and G == 1 identically at S = 1/2 (exponent zero).
    """
    s = float(total_spin)
    return _cos_power(u / s, round(2.0 * s) - 1)


@dataclass(frozen=True)
class CoherenceCoefficient:
    """Evolution rate f_n of the n-th spin coherence <S_+^n> (rad/s).

    Complex: Re accumulates phase, Im damps.  At S_z = 0 the damping part is
    Im f_n = n^2 Omega^2 |beta|^2 / kappa.
    """

    n: int
    value: complex


def coherence_coefficient(n, sz, params, drive):
    """f_n(S_z) = n Omega |beta|^2 (1 + n(i-1) Omega/kappa + 2(Omega/kappa) S_z).

    Valid to lowest order in (Omega/kappa)|S_z| and for n up to ~sqrt(S);
    out-of-regime inputs warn rather than raise.
    """
    if n < 1:
        raise ValueError("coherence order n must be a positive integer")
    omega = params.omega_shift
    ratio = omega / params.kappa
    if ratio * abs(sz) >= 1.0:
        warnings.warn(
            f"(Omega/kappa)|S_z| = {ratio * abs(sz):.3g} is not small; "
            "the linearized coherence rate is unreliable here",
            RuntimeWarning,
            stacklevel=2,
        )
    value = n * omega * drive.drive_rate * (1.0 + n * (1j - 1.0) * ratio + 2.0 * ratio * sz)
    return CoherenceCoefficient(n=int(n), value=complex(value))


@dataclass(frozen=True)
class MomentSet:
    """Second moments of one sheared state, in raw spin units.

    var_y is the mean-subtracted Delta S~_y^2, var_z = S/2, cov_w the
    symmetrized <{S~_y, S_z}>.  mean_sp / mean_sp2 are the complex coherence
    moments behind them.
    """

    total_spin: float
    shearing_q: float
    mean_sp: complex
    mean_sp2: complex
    var_y: float
    var_z: float
    cov_w: float


def mean_sheared_sp(total_spin, q):
    """<S~_+> on the CSS: S G(Q/2) e^{i Q/(2S)}."""
    s = float(total_spin)
    return s * g_factor(s, q / 2.0) * cmath.exp(1j * q / (2.0 * s))


def mean_sheared_sp2(total_spin, q):
    """<S~_+^2> on the CSS: (S(2S-1)/2) cos^{2S-2}(Q/S) e^{-(Q - iQ)/S}."""
    s = float(total_spin)
    two_s = round(2.0 * s)
    if two_s < 2:
        return 0j  # S_+^2 vanishes identically on a single spin-1/2
    mag = (s * (two_s - 1) / 2.0) * _cos_power(q / s, two_s - 2) * math.exp(-q / s)
    return mag * cmath.exp(1j * q / s)


def sheared_y_second_moment(total_spin, q):
    """<S~_y^2> = S^2/2 + S/4 - (S^2/2 - S/4) e^{-Q/S} G(Q), exact."""
    s = float(total_spin)
    return s * s / 2.0 + s / 4.0 - (s * s / 2.0 - s / 4.0) * math.exp(-q / s) * g_factor(s, q)


def sheared_cov_w(total_spin, q):
    """<{S~_y, S_z}> = (2S^2 - S) sin(Q/(2S)) G(Q/2), exact; zero for a CSS."""
    s = float(total_spin)
    return (2.0 * s * s - s) * math.sin(q / (2.0 * s)) * g_factor(s, q / 2.0)


def analytic_moments(total_spin, q):
    """Closed-form MomentSet for one (S, Q); Q >= 0, Q/S inside the G domain."""
    if q < 0.0:
        raise ValueError("shearing strength must be nonnegative")
    s = float(total_spin)
    mean_sp = mean_sheared_sp(s, q)
    mean_sp2 = mean_sheared_sp2(s, q)
    var_y = sheared_y_second_moment(s, q) - mean_sp.imag ** 2
    return MomentSet(
        total_spin=s,
        shearing_q=float(q),
        mean_sp=mean_sp,
        mean_sp2=mean_sp2,
        var_y=var_y,
        var_z=s / 2.0,
        cov_w=sheared_cov_w(s, q),
    )


def large_s_variance(total_spin, q):
    """Large-ensemble limit (S/2)(1 + Q + Q^2): CSS + shot noise + feedback."""
    return (total_spin / 2.0) * (1.0 + q + q * q)


@dataclass(frozen=True)
class RotatedVariance:
    """Extrema of sigma^2(alpha) over the measurement angle.

    sigma_min_sq / sigma_max_sq are normalized to the CSS variance S/2;
    v_plus, v_minus and w are the raw intermediates.  degenerate marks the
    isotropic case V- = W = 0, where alpha0 is returned as 0.
    """

    alpha0: float
    sigma_min_sq: float
    sigma_max_sq: float
    v_plus: float
    v_minus: float
    w: float
    degenerate: bool = False


def extremal_variances(moments):
    """Principal axes of the sheared uncertainty ellipse in the y-z plane.

    alpha0 = atan2(W, V-)/2, the quadrant-correct branch on which the cosine
    term is subtracted at the minimum.
    """
    v_plus = moments.var_y + moments.var_z
    v_minus = moments.var_y - moments.var_z
    w = moments.cov_w
    radius = math.hypot(v_minus, w)
    degenerate = radius <= 1e-15 * max(v_plus, 1e-300)
    alpha0 = 0.0 if degenerate else 0.5 * math.atan2(w, v_minus)
    half_css = moments.total_spin / 2.0
    return RotatedVariance(
        alpha0=alpha0,
        sigma_min_sq=0.5 * (v_plus - radius) / half_css,
        sigma_max_sq=0.5 * (v_plus + radius) / half_css,
        v_plus=v_plus,
        v_minus=v_minus,
        w=w,
        degenerate=degenerate,
    )


def rotated_variance(moments, alpha):
    """sigma^2(alpha) in raw spin units; period pi in alpha."""
    ext = extremal_variances(moments)
    radius = math.hypot(ext.v_minus, ext.w)
    return 0.5 * (ext.v_plus - radius * math.cos(2.0 * (alpha - ext.alpha0)))


def curvature_corrected_min(total_spin, q):
    """Two-term normalized minimum 1/Q + Q^4/(24 S^2).

    Shot-noise floor plus the leading Bloch-sphere curvature penalty; its
    minimizer is Q = 6^{1/5} S^{2/5}.
    """
    if q <= 0.0:
        raise ValueError("shearing strength must be positive")
    s = float(total_spin)
    return 1.0 / q + q ** 4 / (24.0 * s * s)
