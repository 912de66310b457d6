"""Two-qubit entanglement measures.

Wootters concurrence via the spin-flipped-overlap spectrum, entanglement of
formation, the singlet-fidelity lower bound, and the fast triplet/singlet
shortcut valid for states whose coherences live in the single-excitation
block.

States are 4x4 density matrices in the computational basis ordered
(uu, ud, du, dd); sigma_y uses the standard convention with -i above the
diagonal, and conjugation is entrywise in this basis.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "concurrence",
    "concurrence_ts_form",
    "entanglement_of_formation",
    "werner_lower_bound",
    "singlet_fidelity",
]

# sigma_y (x) sigma_y in the computational basis: antidiagonal (-1, 1, 1, -1)
_SPIN_FLIP = np.array(
    [[0, 0, 0, -1],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [-1, 0, 0, 0]], dtype=complex
)

_SINGLET = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)


def concurrence(rho):
    """Wootters concurrence of a two-qubit density matrix in [0, 1].

    Accepts a single 4x4 matrix or a stacked (..., 4, 4) array.  The
    eigenvalues of rho (sy x sy) rho* (sy x sy) are obtained through the
    Hermitian product sqrt(rho) (sy x sy) rho* (sy x sy) sqrt(rho), which is
    numerically stable for positive rho; states with eigenvalues below
    -1e-12 fall back to the general complex eigensolver.  Tiny negative
    eigenvalues (above -1e-10) are clamped before the square root.
    """
    arr = np.asarray(rho, dtype=complex)
    if arr.shape[-2:] != (4, 4):
        raise ValueError("expected a (..., 4, 4) density matrix")
    single = arr.ndim == 2
    stack = arr.reshape(-1, 4, 4)

    evals, evecs = np.linalg.eigh(stack)
    flipped = _SPIN_FLIP @ stack.conj() @ _SPIN_FLIP

    out = np.empty(stack.shape[0])
    hermitian_ok = evals[:, 0] >= -1e-12
    if np.any(hermitian_ok):
        lam = np.clip(evals[hermitian_ok], 0.0, None)
        v = evecs[hermitian_ok]
        sqrt_rho = (v * np.sqrt(lam)[:, None, :]) @ v.conj().swapaxes(-1, -2)
        m = sqrt_rho @ flipped[hermitian_ok] @ sqrt_rho
        mu = np.linalg.eigvalsh(m)
        if np.any(mu < -1e-10):
            raise ArithmeticError("spin-flip spectrum is significantly negative")
        lam_sqrt = np.sqrt(np.clip(mu, 0.0, None))
        diffs = lam_sqrt[:, 3] - lam_sqrt[:, 2] - lam_sqrt[:, 1] - lam_sqrt[:, 0]
        out[hermitian_ok] = np.maximum(0.0, diffs)
    if np.any(~hermitian_ok):
        for idx in np.nonzero(~hermitian_ok)[0]:
            mu = np.linalg.eigvals(stack[idx] @ flipped[idx])
            mu = np.real(mu)
            if np.any(mu < -1e-10):
                raise ArithmeticError(
                    "spin-flip spectrum is significantly negative"
                )
            lam_sqrt = np.sort(np.sqrt(np.clip(mu, 0.0, None)))
            out[idx] = max(0.0, lam_sqrt[3] - lam_sqrt[2] - lam_sqrt[1]
                           - lam_sqrt[0])
    return float(out[0]) if single else out.reshape(arr.shape[:-2])


def concurrence_ts_form(g_t, g_s, im_g_ts, g11, g44):
    """Concurrence from triplet/singlet populations and coherence.

    max{0, |g_t - g_s - 2i im_g_ts| - 2 sqrt(g11 g44)}; equals the full
    Wootters concurrence whenever the only off-diagonal elements of the
    state sit in the (ud, du) block (plus the four corner populations).
    """
    mod = np.abs(np.asarray(g_t) - np.asarray(g_s) - 2j * np.asarray(im_g_ts))
    corner = 2.0 * np.sqrt(np.clip(np.asarray(g11) * np.asarray(g44), 0.0, None))
    out = np.maximum(0.0, mod - corner)
    return float(out) if out.ndim == 0 else out


def _binary_entropy(x):
    x = np.asarray(x, dtype=float)
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)
    return np.where((x == 0.0) | (x == 1.0), 0.0, h)


def entanglement_of_formation(c):
    """Entanglement of formation as a monotone function of the concurrence.

    h((1 + sqrt(1 - C^2)) / 2) with the binary entropy h; maps [0, 1] onto
    [0, 1] monotonically.
    """
    arr = np.asarray(c, dtype=float)
    if np.any(arr < -1e-9) or np.any(arr > 1.0 + 1e-9):
        raise ValueError("concurrence must lie in [0, 1]")
    arr = np.clip(arr, 0.0, 1.0)
    out = _binary_entropy((1.0 + np.sqrt(1.0 - arr**2)) / 2.0)
    return float(out) if out.ndim == 0 else out


def werner_lower_bound(f):
    """Lower bound on the entanglement of formation from the singlet fidelity.

    h(1/2 + sqrt(F (1 - F))) for F > 1/2 and 0 otherwise; for any state with
    singlet fidelity F this bounds the entanglement of formation from below.
    """
    arr = np.asarray(f, dtype=float)
    if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-12):
        raise ValueError("fidelity must lie in [0, 1]")
    arr = np.clip(arr, 0.0, 1.0)
    out = np.where(arr > 0.5,
                   _binary_entropy(0.5 + np.sqrt(arr * (1.0 - arr))),
                   0.0)
    return float(out) if out.ndim == 0 else out


def singlet_fidelity(rho) -> float:
    """Overlap of the state with the two-qubit singlet, in [0, 1]."""
    arr = np.asarray(rho, dtype=complex)
    if arr.shape[-2:] != (4, 4):
        raise ValueError("expected a (..., 4, 4) density matrix")
    val = np.real(np.einsum("i,...ij,j->...", _SINGLET.conj(), arr, _SINGLET))
    return float(val) if np.ndim(val) == 0 else val
