"""Brute-force validation engine for the sheared-moment closed forms.

Two independent numerical routes to the same moments:

  * oracle_moments_sum: explicit finite sums over Dicke amplitudes of the
    sheared coherence moments, with the S_z-dependent phase factor standing
    to the LEFT of the powers of S_+ (matrix element at the higher m),
  * apply_feedback_channel: a Schroedinger-picture map on the density
    matrix multiplying each coherence <m|rho|m'> (n = m' - m > 0) by
    exp(-(n^2-n)(1+i)Q/(2S)) exp(i n Q m'/S), the unique matrix-element
    assignment that reproduces those sums on arbitrary states.

Numerical care: for S <= 200 the binomial weights are exact integers and
the oscillatory phases are evaluated in extended precision (long double),
which keeps the sums' cancellation error ~1e-12 relative even at Q = S/2;
beyond that a log-space (lgamma) path covers ensembles up to S ~ 1e5.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dicke import DENSITY_DIM_CAP, build_operators, m_values, make_css
from .params import EnsembleSpec

# Longest amplitude sum we allow (S <= 1e5); far beyond the matrix caps.
ORACLE_SUM_CAP = 200_001
# Exact integer-binomial weights stay inside float range up to 2S = 400.
_EXACT_WEIGHT_MAX_TWO_S = 400

_LD = np.longdouble


@dataclass(frozen=True)
class OracleMoments:
    """Moments of one sheared state obtained by brute force."""

    total_spin: float
    shearing_q: float
    mean_sp: complex
    mean_sp2: complex
    var_y: float
    var_z: float
    cov_w: float


def _sum_complex(weights, phases):
    """sum(w * e^{i phi}) with longdouble accumulation, returned as complex."""
    re = float(np.sum(weights * np.cos(phases)))
    im = float(np.sum(weights * np.sin(phases)))
    return complex(re, im)


def _css_weights(total_spin):
    """Amplitudes (long double) of the +x CSS, ordered by k = S + m ascending."""
    two_s = round(2.0 * total_spin)
    if two_s <= _EXACT_WEIGHT_MAX_TWO_S:
        binoms = [math.comb(two_s, k) for k in range(two_s + 1)]
        a = np.array([math.sqrt(float(b)) for b in binoms], dtype=_LD)
        return a * _LD(2.0) ** _LD(-float(total_spin))
    lg = math.lgamma(two_s + 1)
    log_binom = lg - np.array(
        [math.lgamma(k + 1) + math.lgamma(two_s - k + 1) for k in range(two_s + 1)]
    )
    return np.exp(_LD(0.5) * log_binom.astype(_LD) - _LD(total_spin) * _LD(math.log(2.0)))


def oracle_moments_sum(total_spin, q, dim_cap=ORACLE_SUM_CAP):
    """Sheared-state moments on a CSS by explicit Dicke sums.

    Computes <e^{iQ S_z/S} S_+>, e^{-(1+i)Q/S} <e^{2iQ S_z/S} S_+^2> and the
    anticommutator sum behind the y-z covariance term by term; assembles
    Delta S~_y^2 = <S~_y^2> - <S~_y>^2 through the conserved
    S_+S_- + S_-S_+ = 2(S(S+1) - S_z^2), with conjugate moments taken as
    Hermitian conjugates.  var_z = S/2 (S_z is a constant of motion).
    """
    s = float(total_spin)
    two_s = round(2.0 * s)
    if two_s + 1 > dim_cap:
        raise ValueError(f"Dicke dimension {two_s + 1} exceeds oracle cap {dim_cap}")
    if q < 0.0:
        raise ValueError("shearing strength must be nonnegative")

    a = _css_weights(s)
    k = np.arange(two_s + 1)
    m = k.astype(_LD) - _LD(s)
    u = _LD(q) / _LD(s)

    # first coherence: a_{m+1} a_m sqrt((S-m)(S+m+1)) e^{iQ(m+1)/S}
    kk = k[:-1].astype(_LD)
    c1 = np.sqrt((_LD(two_s) - kk) * (kk + _LD(1.0)))
    w1 = a[1:] * a[:-1] * c1
    ph1 = u * (m[:-1] + _LD(1.0))
    mean_sp = _sum_complex(w1, ph1)
    cov_w = float(np.sum(w1 * (2.0 * m[:-1] + _LD(1.0)) * np.sin(ph1)))

    # second coherence: a_{m+2} a_m c_m c_{m+1} e^{2iQ(m+2)/S}, then the
    # S_z-independent photon shot-noise factor e^{-(1+i)Q/S}
    kk2 = k[:-2].astype(_LD)
    c2 = np.sqrt(
        (_LD(two_s) - kk2)
        * (kk2 + _LD(1.0))
        * (_LD(two_s) - kk2 - _LD(1.0))
        * (kk2 + _LD(2.0))
    )
    w2 = a[2:] * a[:-2] * c2
    ph2 = 2.0 * u * (m[:-2] + _LD(2.0))
    raw_sp2 = _sum_complex(w2, ph2)
    shot = complex(math.exp(-q / s)) * complex(math.cos(q / s), -math.sin(q / s))
    mean_sp2 = raw_sp2 * shot

    sz_sq = float(np.sum(a * a * m * m))
    second_y = (s * (s + 1.0) - sz_sq) / 2.0 - mean_sp2.real / 2.0
    var_y = second_y - mean_sp.imag ** 2

    return OracleMoments(
        total_spin=s,
        shearing_q=float(q),
        mean_sp=mean_sp,
        mean_sp2=mean_sp2,
        var_y=var_y,
        var_z=s / 2.0,
        cov_w=cov_w,
    )


def channel_factors(total_spin, q, dim=None):
    """Element-wise coherence factors of the feedback map.

    <m|rho|m'> with n = m' - m > 0 picks up exp(-(n^2-n)(1+i)Q/(2S)) times
    exp(i n Q m'/S); the n < 0 elements are the Hermitian mirror and the
    diagonal is untouched.  All magnitudes are <= 1; anything larger is a
    sign/ordering bug and raises.
    """
    s = float(total_spin)
    if dim is None:
        dim = round(2.0 * s) + 1
    m = m_values(s)
    m_row = m[:, None]
    m_col = m[None, :]
    n = m_col - m_row
    n_abs = np.abs(n)
    m_big = np.maximum(m_row, m_col)
    damp = np.exp(-(n_abs * n_abs - n_abs) * q / (2.0 * s))
    phase = n * q * m_big / s - np.sign(n) * (n_abs * n_abs - n_abs) * q / (2.0 * s)
    factors = damp * np.exp(1j * phase)
    if np.any(np.abs(factors) > 1.0 + 1e-12):
        raise RuntimeError("channel factor exceeds unit magnitude: sign/ordering bug")
    return factors


def apply_feedback_channel(rho, total_spin, q):
    """Apply the coherence-wise feedback map to a density matrix.

    Diagonal populations are untouched (S_z is conserved) and Hermiticity is
    preserved by the conjugate action on the lower triangle.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = round(2.0 * total_spin) + 1
    if rho.shape != (dim, dim):
        raise ValueError(f"density matrix must be {dim}x{dim} for S = {total_spin}")
    return channel_factors(total_spin, q, dim) * rho


def validate_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-12, eig_floor=-1e-10):
    """Raise ValueError unless rho is Hermitian, unit-trace and near-PSD."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace is {tr!r}, expected 1")
    eigmin = float(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)))
    if eigmin < eig_floor:
        raise ValueError(f"negative eigenvalue {eigmin:.3e}")
    return rho


def css_density_matrix(total_spin):
    """|CSS_+x><CSS_+x| as a dense matrix (density-matrix cap applies)."""
    spec = EnsembleSpec(total_spin=total_spin)
    if spec.dicke_dim > DENSITY_DIM_CAP:
        raise ValueError(f"Dicke dimension {spec.dicke_dim} exceeds cap {DENSITY_DIM_CAP}")
    amps = make_css(spec).amplitudes
    return np.outer(amps, amps.conj())


def channel_moments(total_spin, q):
    """Moments via the density-matrix channel, assembled from matrix traces.

    Fully matrix-based (operators from build_operators, traces of products),
    so it shares no arithmetic with oracle_moments_sum beyond the CSS
    amplitudes; the two routes cross-validate each other.
    """
    spec = EnsembleSpec(total_spin=total_spin)
    rho = apply_feedback_channel(css_density_matrix(total_spin), total_spin, q)
    ops = build_operators(spec, dim_cap=DENSITY_DIM_CAP)

    def tr(op):
        return complex(np.trace(rho @ op))

    mean_sp = tr(ops.sp)
    mean_sp2 = tr(ops.sp @ ops.sp)
    mean_y = tr(ops.sy).real
    mean_z = tr(ops.sz).real
    var_y = tr(ops.sy @ ops.sy).real - mean_y * mean_y
    var_z = tr(ops.sz @ ops.sz).real - mean_z * mean_z
    cov_w = tr(ops.sy @ ops.sz + ops.sz @ ops.sy).real
    return OracleMoments(
        total_spin=float(total_spin),
        shearing_q=float(q),
        mean_sp=mean_sp,
        mean_sp2=mean_sp2,
        var_y=var_y,
        var_z=var_z,
        cov_w=cov_w,
    )


def _quadrature_variance(moments, alpha):
    """Var(cos(a) S_z - sin(a) S~_y) from oracle moments."""
    sa, ca = math.sin(alpha), math.cos(alpha)
    return ca * ca * moments.var_z + sa * sa * moments.var_y - sa * ca * moments.cov_w


def brute_force_min_variance(total_spin, q, grid_points=720):
    """Minimum normalized quadrature variance by grid scan plus refinement.

    Scans alpha over [0, pi) on a uniform grid (sigma^2(alpha) is a pure
    cosine in 2 alpha, so the grid guards against branch errors), then
    ternary-searches the bracketing interval down to 1e-10 rad.  Returns
    (alpha_min, sigma_min_sq) with the variance normalized to S/2.
    """
    moments = oracle_moments_sum(total_spin, q)
    alphas = np.linspace(0.0, math.pi, grid_points, endpoint=False)
    values = [_quadrature_variance(moments, a) for a in alphas]
    best = int(np.argmin(values))
    step = math.pi / grid_points
    lo = alphas[best] - step
    hi = alphas[best] + step
    while hi - lo > 1e-10:
        third = (hi - lo) / 3.0
        m1, m2 = lo + third, hi - third
        if _quadrature_variance(moments, m1) <= _quadrature_variance(moments, m2):
            hi = m2
        else:
            lo = m1
    alpha_min = math.fmod((lo + hi) / 2.0, math.pi)
    if alpha_min < 0.0:
        alpha_min += math.pi
    sigma_min_sq = _quadrature_variance(moments, alpha_min) / (total_spin / 2.0)
    return alpha_min, sigma_min_sq
