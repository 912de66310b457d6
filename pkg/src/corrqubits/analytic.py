"""Closed-form solutions of the two-qubit generators.

These serve both as fast evaluation paths for figure data and as oracles for
the numeric integrator.  Conventions: hbar = 1, rates in 1/us, the
computational basis is ordered (uu, ud, du, dd), and the concurrence
formulas assume the initial states stated in each docstring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rates

__all__ = [
    "DephasingParams",
    "MarkovianParams",
    "dephasing_factors",
    "concurrence_sym_exchange",
    "concurrence_dm",
    "concurrence_classical_1f_bell",
    "concurrence_quantum_1f",
    "coherence_rotation_1f",
    "residual_entanglement",
]


@dataclass(frozen=True)
class DephasingParams:
    """1/f pure-dephasing configuration.

    ``sigma`` is the noise amplitude over hbar (rad/us), ``omega_low`` the
    infrared cutoff, ``theta`` the constant phase of the cross spectrum, and
    ``quantum_regime`` selects whether the quantum spectrum matches the
    classical one (low temperature) or vanishes (classical noise only).
    """

    sigma: float
    omega_low: float
    theta: float = 0.0
    quantum_regime: bool = True

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise ValueError("sigma must be > 0")
        if not (self.omega_low > 0.0):
            raise ValueError("omega_low must be > 0")


@dataclass(frozen=True)
class MarkovianParams:
    """Constant transverse-noise parameters.

    ``gamma_down`` and ``gamma_12`` are the local and correlated decay rates
    (the phase of the correlated rate is assumed absorbed, so both are real
    with 0 <= gamma_12 <= gamma_down).  ``exchange`` and ``dm`` are the real
    and imaginary parts of the coherent coupling (symmetric exchange and
    Dzyaloshinskii-Moriya strengths).
    """

    gamma_down: float
    gamma_12: float
    exchange: float = 0.0
    dm: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.gamma_12 <= self.gamma_down):
            raise ValueError("require 0 <= gamma_12 <= gamma_down")


class WrongRegimeError(ValueError):
    """A closed form was asked outside the regime it solves."""


def dephasing_factors(t, params: DephasingParams) -> np.ndarray:
    """Multiplicative decay factors of the density-matrix elements under
    correlated 1/f dephasing.

    Returns a 4x4 complex array F with rho(t)_ab = F_ab * rho(0)_ab;
    diagonal entries are exactly 1.  In the quantum regime the
    single-excitation coherences also rotate with the accumulated
    sigma_z sigma_z phase.
    """
    t = float(t)
    if t < 0.0:
        raise ValueError("t must be >= 0")
    gz_int = rates.integrated_dephasing_1f(t, params.sigma, params.omega_low)
    cos_t = np.cos(params.theta)
    if params.quantum_regime:
        sin_t = np.sin(params.theta)
        v_int = rates.ising_phase_1f(t, params.sigma, params.theta)
    else:
        sin_t = 0.0
        v_int = 0.0

    f = np.ones((4, 4), dtype=complex)
    single_up = np.exp(-2.0 * (1.0 - 1j * sin_t) * gz_int - 2j * v_int)
    single_dn = np.exp(-2.0 * (1.0 + 1j * sin_t) * gz_int - 2j * v_int)
    f[0, 1] = single_up                 # uu <-> ud
    f[0, 2] = single_dn                 # uu <-> du
    f[1, 3] = np.conj(single_dn)        # ud <-> dd
    f[2, 3] = np.conj(single_up)        # du <-> dd
    f[1, 2] = np.exp(-4.0 * (1.0 - cos_t) * gz_int)   # ud <-> du
    f[0, 3] = np.exp(-4.0 * (1.0 + cos_t) * gz_int)   # uu <-> dd
    lower = np.tril_indices(4, -1)
    f[lower] = np.conj(f.T[lower])
    return f


def concurrence_sym_exchange(t, params: MarkovianParams):
    """Concurrence from the (ud) product state under symmetric exchange.

    exp(-gamma_down t) sqrt(sinh^2(gamma_12 t) + sin^2(2 exchange t)); valid
    for dm = 0 and zero absorption.
    """
    if params.dm != 0.0:
        raise WrongRegimeError("closed form requires dm = 0")
    arr = np.asarray(t, dtype=float)
    out = np.exp(-params.gamma_down * arr) * np.sqrt(
        np.sinh(params.gamma_12 * arr) ** 2
        + np.sin(2.0 * params.exchange * arr) ** 2
    )
    return float(out) if out.ndim == 0 else out


def concurrence_dm(t, params: MarkovianParams):
    """Concurrence from the (ud) product state under the DM interaction.

    Three regimes depending on 2|dm| vs gamma_12 (underdamped oscillation,
    critical t e^(-gamma t) growth-decay, overdamped sinh): valid for
    exchange = 0 and zero absorption.  The formulas are written in the gauge
    with non-negative couplings, so only |dm| enters.
    """
    if params.exchange != 0.0:
        raise WrongRegimeError("closed form requires exchange = 0")
    arr = np.asarray(t, dtype=float)
    g12 = params.gamma_12
    d = abs(params.dm)
    envelope = np.exp(-params.gamma_down * arr)
    delta = 4.0 * d**2 - g12**2
    scale = max(g12, 2.0 * d, 1.0)
    if abs(delta) <= 1e-12 * scale**2:
        out = envelope * 2.0 * g12 * arr
    elif delta > 0.0:
        osc = np.sqrt(delta)
        out = envelope * np.abs((g12 + 2.0 * d) * np.sin(osc * arr)) / osc
    else:
        kappa = np.sqrt(-delta)
        out = envelope * (g12 + 2.0 * d) * np.sinh(kappa * arr) / kappa
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def concurrence_classical_1f_bell(gamma_integral):
    """Concurrence decay of the Bell state (ud + i du)/sqrt(2) under
    classical 1/f noise with full spatial correlation.

    Takes the running integral of the decay rate; the raw expression can dip
    below zero at large arguments and is clamped at 0.
    """
    g = np.asarray(gamma_integral, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("the integrated rate must be >= 0")
    e6 = np.exp(-6.0 * g)
    raw = (np.sqrt(4.0 * e6 * np.sinh(3.0 * g) ** 2 + 9.0 * np.exp(-4.0 * g))
           + e6 - 1.0) / 3.0
    out = np.maximum(raw, 0.0)
    return float(out) if out.ndim == 0 else out


def coherence_rotation_1f(t, sigma, Omega):
    """Rotation angle accumulated by the triplet-singlet coherence under the
    1/f transverse coupling.

    The coherence precesses at twice the coupling strength, so this is twice
    the coupling's time integral: 4 pi sigma^2 (cos(Omega t) - 1) / Omega^2.
    """
    return 2.0 * np.asarray(rates.transverse_phase_1f(t, sigma, Omega))


def concurrence_quantum_1f(gamma_down_integral, phase, initial: str = "bell"):
    """Concurrence under quantum 1/f noise with full spatial correlation.

    ``gamma_down_integral`` is the running integral of the decay rate and
    ``phase`` the accumulated triplet-singlet rotation angle (see
    ``coherence_rotation_1f``).  With the Bell state (ud + i du)/sqrt(2):
    exp(-G) sqrt(sinh^2 G + cos^2 phase); with the (ud) product state the
    cosine becomes a sine.  Both saturate at 1/2.
    """
    g = np.asarray(gamma_down_integral, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("the integrated decay rate must be >= 0")
    ph = np.asarray(phase, dtype=float)
    if initial == "bell":
        trig = np.cos(ph)
    elif initial == "product":
        trig = np.sin(ph)
    else:
        raise ValueError("initial must be 'bell' or 'product'")
    out = np.exp(-g) * np.sqrt(np.sinh(g) ** 2 + trig**2)
    return float(out) if out.ndim == 0 else out


def residual_entanglement(beta, omega):
    """Steady-state concurrence under fully correlated transverse noise at
    inverse temperature beta and drive frequency omega.

    1/2 - 3 / (4 cosh(beta omega) + 2): zero in the classical limit and 1/2
    at zero temperature.
    """
    x = np.asarray(beta, dtype=float) * np.asarray(omega, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("beta * omega must be >= 0")
    with np.errstate(over="ignore"):
        denom = 4.0 * np.cosh(x) + 2.0
    out = 0.5 - 3.0 / denom
    return float(out) if out.ndim == 0 else out
