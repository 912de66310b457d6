"""Special functions entering the closed-form rate and coupling formulas.

Thin, contract-enforcing wrappers around scipy.special.  All functions accept
scalars or arrays and return a matching shape; hbar = 1 throughout the
package, so ``bose_einstein`` takes the product ``beta * omega`` implicitly
through its two arguments.
"""

from __future__ import annotations

import numpy as np
from scipy import special

__all__ = ["sin_integral", "cos_integral", "bessel_j0", "bose_einstein"]


def _as_finite_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return arr


def _scalar_or_array(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def sin_integral(x):
    """Sine integral Si(x) = integral of sin(u)/u from 0 to x (odd in x)."""
    arr = _as_finite_array(x, "x")
    return _scalar_or_array(special.sici(arr)[0])


def cos_integral(x):
    """Cosine integral Ci(x) for x > 0.

    Ci(x) = euler_gamma + ln(x) + sum_k (-x^2)^k / (2k (2k)!); it diverges
    logarithmically at 0 and has a branch cut on the negative axis, so
    non-positive arguments are rejected.
    """
    arr = _as_finite_array(x, "x")
    if np.any(arr <= 0.0):
        raise ValueError("cos_integral requires x > 0 (branch cut at x <= 0)")
    return _scalar_or_array(special.sici(arr)[1])


def bessel_j0(x):
    """Bessel function of the first kind J0(x); even, with |J0(x)| <= 1."""
    arr = _as_finite_array(x, "x")
    return _scalar_or_array(special.j0(arr))


def bose_einstein(omega, beta):
    """Thermal occupation 1 / (exp(beta * omega) - 1).

    Evaluated in a form that neither overflows for large beta * omega nor
    loses precision for small |beta * omega|.  beta * omega = 0 diverges and
    raises.
    """
    w = _as_finite_array(omega, "omega")
    b = _as_finite_array(beta, "beta")
    x = b * w
    if np.any(x == 0.0):
        raise ZeroDivisionError("bose_einstein diverges at beta * omega = 0")
    pos = x > 0
    with np.errstate(over="ignore"):
        # x > 0: exp(-x) / (1 - exp(-x)) avoids overflow of exp(x)
        safe_pos = np.where(pos, x, 1.0)
        n_pos = np.exp(-safe_pos) / (-np.expm1(-safe_pos))
        safe_neg = np.where(pos, -1.0, x)
        n_neg = 1.0 / np.expm1(safe_neg)
    return _scalar_or_array(np.where(pos, n_pos, n_neg))
