"""Filter functions and the time-dependent rates and couplings of the
time-local generators.

Closed forms are provided for the 1/f spectrum; ``generic_rate`` integrates
an arbitrary spectrum against a filter function and serves as the
independent numeric route.  All quantities are in hbar = 1 units with
angular frequencies in rad/us and times in us.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .specfun import cos_integral, sin_integral

__all__ = [
    "CoefficientSet",
    "CutoffTimeWarning",
    "NumericError",
    "filter_fc",
    "filter_fs",
    "ising_coupling_1f",
    "ising_phase_1f",
    "dephasing_rate_1f",
    "integrated_dephasing_1f",
    "classical_rate_1f",
    "quantum_decay_rate_1f",
    "transverse_coupling_1f",
    "transverse_phase_1f",
    "generic_rate",
    "markovian_rates",
    "integrated",
    "cumulative_integral",
]


class CutoffTimeWarning(UserWarning):
    """Raised when omega_low * t > 1, outside the 1/f formulas' comfort zone."""


class NumericError(RuntimeError):
    """Quadrature failed to converge to the requested tolerance."""


def _zeros2() -> np.ndarray:
    return np.zeros((2, 2), dtype=complex)


@dataclass
class CoefficientSet:
    """Rates and couplings entering a time-local generator at one instant.

    ``ising`` is the real sigma_z sigma_z coupling strength, ``coupling`` the
    complex transverse coupling (real part: symmetric exchange; imaginary
    part: Dzyaloshinskii-Moriya).  The gamma matrices are 2x2 and Hermitian
    with real diagonals: index 0/1 is the qubit, diagonals are local rates,
    off-diagonals the correlated ones.
    """

    time: float = 0.0
    ising: float = 0.0
    coupling: complex = 0j
    gamma_z: np.ndarray = field(default_factory=_zeros2)
    gamma_down: np.ndarray = field(default_factory=_zeros2)
    gamma_up: np.ndarray = field(default_factory=_zeros2)

    def validate(self, tol: float = 1e-12) -> None:
        for name in ("gamma_z", "gamma_down", "gamma_up"):
            g = np.asarray(getattr(self, name), dtype=complex)
            if g.shape != (2, 2):
                raise ValueError(f"{name} must be a 2x2 matrix")
            scale = max(1.0, float(np.max(np.abs(g))))
            if np.max(np.abs(g - g.conj().T)) > tol * scale:
                raise ValueError(f"{name} must be Hermitian")
        if abs(complex(self.ising).imag) > tol * max(1.0, abs(self.ising)):
            raise ValueError("ising coupling must be real")


# ---------------------------------------------------------------------------
# filter functions
# ---------------------------------------------------------------------------

def filter_fc(omega, t):
    """Cosine filter (cos(omega t) - 1) / omega, with the value 0 at omega = 0.

    Evaluated as -2 sin^2(omega t / 2) / omega, which is exact and avoids
    cancellation at small arguments.
    """
    w = np.asarray(omega, dtype=float)
    safe = np.where(w == 0.0, 1.0, w)
    out = np.where(w == 0.0, 0.0, -2.0 * np.sin(safe * t / 2.0) ** 2 / safe)
    return float(out) if out.ndim == 0 else out


def filter_fs(omega, t):
    """Sine filter sin(omega t) / omega, with the value t at omega = 0."""
    w = np.asarray(omega, dtype=float)
    out = t * np.sinc(w * t / np.pi)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# 1/f closed forms
# ---------------------------------------------------------------------------

def _time_array(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("t must be >= 0")
    return arr


def _ci_safe(x: np.ndarray) -> np.ndarray:
    """Ci(x) with zeros substituted where x == 0 (callers mask those)."""
    return np.asarray(cos_integral(np.where(x > 0.0, x, 1.0)))


def _warn_cutoff(omega_low: float, t: np.ndarray) -> None:
    if np.any(omega_low * t > 1.0):
        warnings.warn(
            "omega_low * t exceeds 1; the 1/f closed forms assume times well "
            "inside the low-frequency-cutoff window",
            CutoffTimeWarning,
            stacklevel=3,
        )


def ising_coupling_1f(t, sigma, theta):
    """sigma_z sigma_z coupling from real correlated quantum 1/f noise.

    Linear in time: -2 pi sigma^2 cos(theta) t.
    """
    arr = _time_array(t)
    out = -2.0 * np.pi * sigma**2 * np.cos(theta) * arr
    return float(out) if out.ndim == 0 else out


def ising_phase_1f(t, sigma, theta):
    """Time integral of ``ising_coupling_1f``: -pi sigma^2 t^2 cos(theta)."""
    arr = _time_array(t)
    out = -np.pi * sigma**2 * np.cos(theta) * arr**2
    return float(out) if out.ndim == 0 else out


def dephasing_rate_1f(t, sigma, omega_low):
    """Local dephasing rate 4 sigma^2 t [1 - Ci(omega_low t)] of 1/f noise.

    Returns 0 at t = 0 (the t ln t limit) and warns when omega_low * t > 1,
    where the formula leaves its derivation regime but stays evaluable.
    """
    arr = _time_array(t)
    _warn_cutoff(omega_low, arr)
    x = omega_low * arr
    out = np.where(x > 0.0, 4.0 * sigma**2 * arr * (1.0 - _ci_safe(x)), 0.0)
    return float(out) if out.ndim == 0 else out


def integrated_dephasing_1f(t, sigma, omega_low):
    """Exact time integral of ``dephasing_rate_1f``.

    2 sigma^2 [ t^2 (1 - Ci(x)) + (cos x + x sin x - 1) / omega_low^2 ] with
    x = omega_low t; reduces to sigma^2 t^2 [3 - 2 gamma_E - 2 ln x] for
    x << 1.
    """
    arr = _time_array(t)
    x = omega_low * arr
    # series below x ~ 1e-3 avoids cancellation in cos x + x sin x - 1
    small = x < 1e-3
    bracket = np.where(
        small,
        x**2 / 2.0 - x**4 / 8.0,
        np.cos(x) + x * np.sin(x) - 1.0,
    )
    out = np.where(
        x > 0.0,
        2.0 * sigma**2 * (arr**2 * (1.0 - _ci_safe(x)) + bracket / omega_low**2),
        0.0,
    )
    return float(out) if out.ndim == 0 else out


def classical_rate_1f(t, sigma, omega_low, Omega):
    """Decay (= absorption) rate of driven qubits under classical 1/f noise.

    4 sigma^2 / Omega [ Si(Omega t) - sin(Omega t) Ci(omega_low t) ]; takes
    negative values on finite intervals while its running integral stays
    non-negative.
    """
    arr = _time_array(t)
    x = omega_low * arr
    si = np.asarray(sin_integral(Omega * arr))
    out = np.where(
        x > 0.0,
        4.0 * sigma**2 / Omega * (si - np.sin(Omega * arr) * _ci_safe(x)),
        0.0,
    )
    return float(out) if out.ndim == 0 else out


def quantum_decay_rate_1f(t, sigma, omega_low, Omega):
    """Decay rate of driven qubits when quantum 1/f noise matches classical.

    4 sigma^2 / Omega [ pi (1 - cos Omega t)/2 - sin(Omega t) Ci(omega_low t)
    + Si(Omega t) ].
    """
    arr = _time_array(t)
    x = omega_low * arr
    si = np.asarray(sin_integral(Omega * arr))
    out = np.where(
        x > 0.0,
        4.0 * sigma**2 / Omega * (
            np.pi * (1.0 - np.cos(Omega * arr)) / 2.0
            - np.sin(Omega * arr) * _ci_safe(x)
            + si
        ),
        0.0,
    )
    return float(out) if out.ndim == 0 else out


def transverse_coupling_1f(t, sigma, Omega):
    """Transverse exchange coupling -2 pi sigma^2 sin(Omega t) / Omega."""
    arr = _time_array(t)
    out = -2.0 * np.pi * sigma**2 * np.sin(Omega * arr) / Omega
    return float(out) if out.ndim == 0 else out


def transverse_phase_1f(t, sigma, Omega):
    """Time integral of ``transverse_coupling_1f``:
    2 pi sigma^2 (cos(Omega t) - 1) / Omega^2."""
    arr = _time_array(t)
    out = 2.0 * np.pi * sigma**2 * (np.cos(Omega * arr) - 1.0) / Omega**2
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# generic quadrature route
# ---------------------------------------------------------------------------

def _eval_spectrum(spectrum, w: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(spectrum(w), dtype=complex)
        if vals.shape == w.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([complex(spectrum(float(x))) for x in w.ravel()],
                    dtype=complex).reshape(w.shape)


def _panel_integral(spectrum, filt, shift, t, edges: np.ndarray,
                    n_panels: int, order: int = 10) -> complex:
    """Gauss-Legendre integration on oscillation-scale panels."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        bounds = np.linspace(a, b, n_panels + 1)
        mid = (bounds[1:] + bounds[:-1]) / 2.0
        half = (bounds[1:] - bounds[:-1]) / 2.0
        w = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        f = _eval_spectrum(spectrum, w) * filt(w - shift, t)
        f = f.reshape(-1, order)
        total += np.sum(half * (f @ weights))
    return total / (2.0 * np.pi)


def generic_rate(spectrum, filter_kind: str, shift: float, t: float, *,
                 omega_min: float = 0.0, omega_max: float | None = None,
                 rel_tol: float = 1e-6, exclude: float | None = None,
                 exclusion_width: float | None = None) -> complex:
    """Quadrature of  integral domega/2pi  S(omega) F(omega - shift, t).

    ``filter_kind`` selects the cosine or sine filter ("cos"/"sin").  The
    upper cutoff defaults to max(1e4 / t, 100 |shift|), beyond which the
    spectra used here contribute below the tolerance (verified by doubling
    in the test suite).  ``exclude`` enables a principal-value treatment: a
    symmetric interval around that frequency is removed and the result
    extrapolated to zero exclusion width.

    Panels are sized to the filter oscillation period and refined until the
    estimate is stable to ``rel_tol``; failure raises ``NumericError``.
    """
    if filter_kind in ("cos", "fc"):
        filt = filter_fc
    elif filter_kind in ("sin", "fs"):
        filt = filter_fs
    else:
        raise ValueError("filter_kind must be 'cos' or 'sin'")
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0j
    if omega_max is None:
        omega_max = max(1e4 / t, 100.0 * abs(shift), 2.0 * omega_min + 1.0)
    if omega_max <= omega_min:
        raise ValueError("omega_max must exceed omega_min")

    breakpoints = [omega_min, omega_max]
    if omega_min < shift < omega_max:
        breakpoints.insert(1, shift)

    def run(edges: np.ndarray) -> complex:
        spans = np.diff(edges)
        panels = [max(16, int(np.ceil(span * t / np.pi))) for span in spans]
        last = None
        for refine in range(6):
            est = sum(
                _panel_integral(spectrum, filt, shift, t,
                                np.array([a, b]), n * 2**refine)
                for (a, b), n in zip(zip(edges[:-1], edges[1:]), panels)
            )
            if last is not None:
                err = abs(est - last)
                if err <= rel_tol * max(abs(est), 1e-300):
                    return est
            last = est
        raise NumericError(
            f"quadrature did not stabilize to {rel_tol} on "
            f"[{edges[0]}, {edges[-1]}] (last estimate {last})"
        )

    if exclude is None:
        return run(np.asarray(breakpoints, dtype=float))

    if not (omega_min < exclude < omega_max):
        raise ValueError("exclusion frequency must lie inside the domain")
    width = exclusion_width or min(np.pi / (4.0 * t),
                                   (omega_max - omega_min) / 100.0,
                                   (exclude - omega_min) / 2.0,
                                   (omega_max - exclude) / 2.0)
    estimates = []
    for eps in (width, width / 2.0, width / 4.0):
        left = np.asarray([omega_min, exclude - eps], dtype=float)
        right = np.asarray([exclude + eps, omega_max], dtype=float)
        estimates.append(run(left) + run(right))
    # exclusion error is linear in eps to leading order; extrapolate twice
    l1 = 2.0 * estimates[1] - estimates[0]
    l2 = 2.0 * estimates[2] - estimates[1]
    return (4.0 * l2 - l1) / 3.0


def markovian_rates(s_c_at_omega: complex, s_q_at_omega: complex):
    """Long-time decay and absorption rates from the spectra at the drive
    frequency.

    gamma_down_ij = S^C_ij + S^Q_ij; gamma_up_ij picks up the transposed pair
    ordering, which for Hermitian spectra is the complex conjugate:
    conj(S^C_ij - S^Q_ij).
    """
    s_c = complex(s_c_at_omega)
    s_q = complex(s_q_at_omega)
    return s_c + s_q, np.conj(s_c - s_q)


# ---------------------------------------------------------------------------
# time integrals
# ---------------------------------------------------------------------------

def _eval_time_function(fn, ts: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(fn(ts), dtype=float)
        if vals.shape == ts.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(float(x))) for x in ts], dtype=float)


def integrated(fn, t: float, n_points: int | None = None,
               rel_tol: float = 1e-10) -> float:
    """Composite-Simpson integral of ``fn`` over [0, t] with a Richardson
    convergence check.

    The panel count doubles until two successive estimates agree to
    ``rel_tol`` (relative, with a small absolute floor); the extrapolated
    value is returned.
    """
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0.0
    n = n_points or 64
    n += n % 2
    prev = None
    for _ in range(16):
        ts = np.linspace(0.0, t, n + 1)
        ys = _eval_time_function(fn, ts)
        h = t / n
        est = h / 3.0 * (ys[0] + ys[-1] + 4.0 * np.sum(ys[1:-1:2])
                         + 2.0 * np.sum(ys[2:-2:2]))
        if prev is not None:
            if abs(est - prev) <= rel_tol * max(abs(est), 1e-300) + 1e-300:
                return (16.0 * est - prev) / 15.0
        prev = est
        n *= 2
    raise NumericError(f"time integral over [0, {t}] did not converge")


def cumulative_integral(fn, t_grid, order: int = 8) -> np.ndarray:
    """Running integral of ``fn`` from t_grid[0] along the grid.

    Per-interval Gauss-Legendre of the given order, accumulated; exact for
    smooth integrands sampled well below their oscillation period.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size < 2:
        raise ValueError("t_grid must be a 1-d array with at least 2 points")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    mid = (ts[1:] + ts[:-1]) / 2.0
    half = (ts[1:] - ts[:-1]) / 2.0
    sample = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    vals = _eval_time_function(fn, sample).reshape(-1, order)
    per_interval = half * (vals @ weights)
    out = np.empty_like(ts)
    out[0] = 0.0
    np.cumsum(per_interval, out=out[1:])
    return out
