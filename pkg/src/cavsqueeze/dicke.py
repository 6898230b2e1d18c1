"""Dicke-basis states and collective spin operators.

Index convention (used everywhere in this package): vectors and matrices in
the S_z eigenbasis are indexed by m = +S down to -S, i.e. row/column 0 holds
m = +S.  This fixes the sign conventions of sy and of the y-z covariance.

Coherent-spin-state amplitudes are binomial, sqrt(C(2S, S+m)) 2^-S, and are
computed in log space (lgamma) so ensembles up to S ~ 1e6 construct without
overflow.
"""

import math
from dataclasses import dataclass

import numpy as np

# Desk-scale memory caps: 4001 (S <= 2000) for state-vector work,
# 401 (S <= 200) for density matrices.
STATE_DIM_CAP = 4001
DENSITY_DIM_CAP = 401


def m_values(total_spin):
    """Eigenvalues of S_z ordered +S..-S (the storage order)."""
    two_s = round(2.0 * total_spin)
    return total_spin - np.arange(two_s + 1)


@dataclass(frozen=True)
class DickeState:
    """Pure state in the Dicke basis |S, m>, amplitudes ordered m = +S..-S."""

    total_spin: float
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (round(2.0 * self.total_spin) + 1,):
            raise ValueError("amplitude vector length must be 2S+1")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state not normalized: sum |a|^2 = {norm!r}")


@dataclass(frozen=True)
class SpinOperators:
    """Dense collective spin matrices of dimension (2S+1) x (2S+1)."""

    total_spin: float
    sz: np.ndarray
    sp: np.ndarray
    sm: np.ndarray
    sx: np.ndarray
    sy: np.ndarray


def build_operators(spec, dim_cap=STATE_DIM_CAP):
    """Construct S_z, S_+/-, S_x, S_y for the given ensemble.

    Standard angular-momentum matrix elements,
    S_+|m> = sqrt((S-m)(S+m+1)) |m+1>, in the m-descending storage order.
    Raises ValueError when 2S+1 exceeds dim_cap.
    """
    dim = spec.dicke_dim
    if dim > dim_cap:
        raise ValueError(f"Dicke dimension {dim} exceeds cap {dim_cap}")
    s = spec.total_spin
    m = m_values(s)
    sz = np.diag(m).astype(complex)
    # raising operator: |m> -> |m+1> moves one row up in m-descending storage
    c = np.sqrt((s - m[1:]) * (s + m[1:] + 1.0))
    sp = np.zeros((dim, dim), dtype=complex)
    sp[np.arange(dim - 1), np.arange(1, dim)] = c
    sm = sp.conj().T.copy()
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2j
    return SpinOperators(total_spin=s, sz=sz, sp=sp, sm=sm, sx=sx, sy=sy)


def css_log_amplitudes(total_spin):
    """log of the CSS(+x) amplitudes, ordered m = +S..-S."""
    two_s = round(2.0 * total_spin)
    k = two_s - np.arange(two_s + 1)  # k = S + m in storage order
    lg = math.lgamma(two_s + 1)
    log_binom = lg - np.array([math.lgamma(kk + 1) + math.lgamma(two_s - kk + 1) for kk in k])
    return 0.5 * log_binom - total_spin * math.log(2.0)


def make_css(spec, axis="+x"):
    """Coherent spin state along +x or -x, satisfying <S_x> = +-S.

    Amplitude at m is sqrt(C(2S, S+m)) 2^-S, with a (-1)^(S-m) sign for the
    -x state.
    """
    if axis not in ("+x", "-x"):
        raise ValueError(f"axis must be '+x' or '-x', got {axis!r}")
    s = spec.total_spin
    amps = np.exp(css_log_amplitudes(s)).astype(complex)
    # lgamma roundoff leaves the norm off by ~S*eps at large S; renormalize
    amps /= math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    if axis == "-x":
        signs = np.where(np.arange(spec.dicke_dim) % 2 == 0, 1.0, -1.0)  # (-1)^(S-m)
        amps = amps * signs
    return DickeState(total_spin=s, amplitudes=amps)


def expectation(state, op):
    """<psi|op|psi> for a DickeState and a dense operator."""
    v = state.amplitudes
    return complex(v.conj() @ (op @ v))


def variance(state, op):
    """<op^2> - <op>^2 on a pure state (op Hermitian)."""
    v = state.amplitudes
    ov = op @ v
    second = float(np.real(ov.conj() @ ov))
    mean = float(np.real(v.conj() @ ov))
    return second - mean * mean
