"""Noise power spectral densities.

Local spectra, the classical/quantum (symmetrized/antisymmetrized) split, and
spatial correlation factors relating the cross spectrum of two qubit sites to
the local one.

Units: hbar = 1; frequencies are angular (rad/us), times are in us, distances
in um, sound speeds in um/us.  The 1/f amplitude ``sigma`` is the noise
standard deviation divided by hbar, i.e. a rate in rad/us ("hbar/sigma =
500 ns" means sigma = 2 /us).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .specfun import bessel_j0, bose_einstein

__all__ = [
    "OneOverF",
    "LinearDispersion",
    "Tabulated",
    "SpectrumModel",
    "CorrelationGeometry",
    "local_spectrum",
    "spatial_factor",
    "classical_part",
    "quantum_part",
    "cross_spectrum",
    "load_tabulated",
]


@dataclass(frozen=True)
class OneOverF:
    """1/f spectrum: 2 pi sigma^2 / |omega| above the low-frequency cutoff.

    ``sigma`` is the noise amplitude over hbar (rad/us); ``omega_low`` is the
    infrared cutoff set by the measurement time (rad/us).  The value is the
    classical (symmetrized) spectrum; whether an equally strong quantum part
    accompanies it is a regime choice made by the consumer.
    """

    sigma: float
    omega_low: float

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise ValueError("OneOverF requires sigma > 0")
        if not (self.omega_low > 0.0):
            raise ValueError("OneOverF requires omega_low > 0")


@dataclass(frozen=True)
class LinearDispersion:
    """Thermal spectrum of a linear-dispersion (acoustic) environment.

    S(omega) = amplitude * |omega| * (n_B + 1) on the emission side
    (omega > 0) and amplitude * |omega| * n_B on the absorption side
    (omega < 0), with n_B the thermal occupation at |omega|.  The overall
    |omega| factor is a density-of-states convention; every consumer in this
    package depends only on ratios (fluctuation-dissipation, detailed
    balance) or on the spatial factor, which are prefactor-independent.
    """

    amplitude: float
    sound_speed: float
    beta: float

    def __post_init__(self):
        if not (self.amplitude > 0.0):
            raise ValueError("LinearDispersion requires amplitude > 0")
        if not (self.sound_speed > 0.0):
            raise ValueError("LinearDispersion requires sound_speed > 0")
        if not (self.beta > 0.0):
            raise ValueError("LinearDispersion requires beta > 0")


class Tabulated:
    """Spectrum sampled on a frequency grid, linearly interpolated.

    The grid must be strictly increasing.  Queries outside the grid raise
    (no extrapolation).  If the grid covers only omega >= 0, negative
    frequencies are served from the mirrored positive value, i.e. the
    spectrum is treated as classical/symmetric.
    """

    def __init__(self, grid, values):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=complex)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("Tabulated grid needs at least two nodes")
        if values.shape != grid.shape:
            raise ValueError("Tabulated grid and values must match in length")
        if not np.all(np.diff(grid) > 0.0):
            raise ValueError("Tabulated grid must be strictly increasing")
        self.grid = grid
        self.values = values

    def __call__(self, omega: float) -> complex:
        lo, hi = self.grid[0], self.grid[-1]
        w = float(omega)
        if w < lo and lo >= 0.0 and -w <= hi and -w >= lo:
            w = -w  # symmetric fallback for one-sided tables
        if w < lo or w > hi:
            raise ValueError(
                f"frequency {omega} outside tabulated range [{lo}, {hi}]"
            )
        re = np.interp(w, self.grid, self.values.real)
        im = np.interp(w, self.grid, self.values.imag)
        return complex(re, im)


SpectrumModel = Union[OneOverF, LinearDispersion, Tabulated]


@dataclass(frozen=True)
class CorrelationGeometry:
    """Spatial arrangement and cross-spectrum convention for the qubit pair.

    ``mode`` selects how the cross spectrum relates to the local one:
    "idealized" uses a constant complex factor correlation_scale *
    exp(i * phase_theta) (the strongly correlated regime), while "geometric"
    uses the dimension-dependent spatial factor at kd = |omega| d / c_s.
    """

    dimension: int = 2
    distance: float = 0.0
    sound_speed: float = 1.0
    phase_theta: float = 0.0
    correlation_scale: float = 1.0
    mode: str = "idealized"

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        if self.distance < 0.0:
            raise ValueError("distance must be >= 0")
        if not (0.0 <= self.correlation_scale <= 1.0):
            raise ValueError("correlation_scale must lie in [0, 1]")
        if self.mode not in ("idealized", "geometric"):
            raise ValueError("mode must be 'idealized' or 'geometric'")


def local_spectrum(model: SpectrumModel, omega: float):
    """Local (on-site) noise spectral density S_ii(omega).

    For OneOverF this is the classical spectrum, zero inside the cutoff
    window |omega| <= omega_low.  For LinearDispersion it is the full
    asymmetric thermal spectrum.  Tabulated models return the stored value.
    """
    if isinstance(model, OneOverF):
        w = np.abs(np.asarray(omega, dtype=float))
        with np.errstate(divide="ignore"):
            val = np.where(w > model.omega_low,
                           2.0 * np.pi * model.sigma**2 / np.where(w > 0, w, 1.0),
                           0.0)
        return float(val) if val.ndim == 0 else val
    if isinstance(model, LinearDispersion):
        w = np.asarray(omega, dtype=float)
        aw = np.abs(w)
        occ = np.where(aw > 0, bose_einstein(np.where(aw > 0, aw, 1.0), model.beta), 0.0)
        val = model.amplitude * np.where(
            aw > 0,
            aw * np.where(w > 0, occ + 1.0, occ),
            1.0 / model.beta,  # continuous omega -> 0 limit
        )
        return float(val) if val.ndim == 0 else val
    if isinstance(model, Tabulated):
        return model(omega)
    raise TypeError(f"unknown spectrum model {type(model).__name__}")


def spatial_factor(dimension: int, kd):
    """Ratio S_12 / S_ii for an isotropic linear-dispersion environment.

    cos(kd) in 1D, J0(kd) in 2D, sin(kd)/kd in 3D; bounded by 1 in magnitude
    and equal to 1 at kd = 0.
    """
    kd_arr = np.asarray(kd, dtype=float)
    if np.any(kd_arr < 0.0):
        raise ValueError("kd must be >= 0")
    if dimension == 1:
        out = np.cos(kd_arr)
    elif dimension == 2:
        out = np.asarray(bessel_j0(kd_arr))
    elif dimension == 3:
        out = np.sinc(kd_arr / np.pi)
    else:
        raise ValueError("dimension must be 1, 2 or 3")
    return float(out) if out.ndim == 0 else out


def classical_part(s_plus: complex, s_minus_transposed: complex) -> complex:
    """Symmetrized (classical) component (S_ij(w) + S_ji(-w)) / 2."""
    return (complex(s_plus) + complex(s_minus_transposed)) / 2.0


def quantum_part(s_plus: complex, s_minus_transposed: complex) -> complex:
    """Antisymmetrized (quantum) component (S_ij(w) - S_ji(-w)) / 2."""
    return (complex(s_plus) - complex(s_minus_transposed)) / 2.0


def cross_spectrum(model: SpectrumModel, geom: CorrelationGeometry, omega,
                   swap_order: bool = False):
    """Cross noise spectral density S_12(omega) (S_21 with ``swap_order``).

    "idealized" mode: correlation_scale * exp(i theta) * S_ii(omega).
    "geometric" mode: spatial_factor(dimension, |omega| d / c_s) * S_ii(omega).
    The magnitude never exceeds the local spectrum.
    """
    s_local = local_spectrum(model, omega)
    if geom.mode == "idealized":
        theta = -geom.phase_theta if swap_order else geom.phase_theta
        return geom.correlation_scale * np.exp(1j * theta) * s_local
    if geom.sound_speed <= 0.0:
        raise ValueError("geometric mode requires sound_speed > 0")
    kd = np.abs(np.asarray(omega, dtype=float)) * geom.distance / geom.sound_speed
    factor = spatial_factor(geom.dimension, kd)
    out = np.asarray(factor) * np.asarray(s_local)
    return complex(out) if out.ndim == 0 else out.astype(complex)


def load_tabulated(path) -> Tabulated:
    """Load a tabulated spectrum from CSV.

    Two columns (omega, Re S) or three columns (omega, Re S, Im S); omega in
    rad/us; '#' starts a comment line.
    """
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] == 2:
        values = data[:, 1].astype(complex)
    elif data.shape[1] == 3:
        values = data[:, 1] + 1j * data[:, 2]
    else:
        raise ValueError(
            f"expected 2 or 3 columns (omega, Re S[, Im S]), got {data.shape[1]}"
        )
    return Tabulated(data[:, 0], values)
