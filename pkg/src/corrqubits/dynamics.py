"""Two-qubit states and time evolution under the time-local generators.

States are dense 4x4 complex density matrices in the computational basis
(uu, ud, du, dd).  Two generator kinds exist: "dephasing" (sigma_z coupling
and sigma_z dissipators) and "transverse" (excitation exchange plus decay and
absorption dissipators).  ``generator_apply`` is the direct operator-algebra
reference; the integrator applies the same generator through a precomputed
16x16 superoperator basis, and the two routes are cross-checked in the test
suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import rates as _rates
from .analytic import DephasingParams, MarkovianParams
from .entanglement import concurrence as _concurrence
from .rates import CoefficientSet

__all__ = [
    "IntegrationError",
    "UnsupportedGeneratorError",
    "StateDiagnostics",
    "GeneratorSpec",
    "Trajectory",
    "named_state",
    "NAMED_STATES",
    "ket_to_density",
    "validate_state",
    "generator_apply",
    "evolve",
    "steady_state",
    "steady_state_nullspace",
    "dephasing_1f_generator",
    "transverse_1f_generator",
    "markovian_generator",
    "markovian_classical_generator",
    "constant_generator",
    "absorb_correlated_phase",
    "triplet_singlet_measures",
]


class IntegrationError(RuntimeError):
    """Evolution failed; ``time`` carries the offending instant."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class UnsupportedGeneratorError(ValueError):
    """The requested operation needs a Markovian transverse generator."""


# ---------------------------------------------------------------------------
# operators and states
# ---------------------------------------------------------------------------

_I2 = np.eye(2, dtype=complex)
_SP = np.array([[0, 1], [0, 0]], dtype=complex)
_SM = _SP.conj().T
_SZ = np.diag([1.0, -1.0]).astype(complex)

_SZ1 = np.kron(_SZ, _I2)
_SZ2 = np.kron(_I2, _SZ)
_SP1 = np.kron(_SP, _I2)
_SM1 = np.kron(_SM, _I2)
_SP2 = np.kron(_I2, _SP)
_SM2 = np.kron(_I2, _SM)
_SZZ = _SZ1 @ _SZ2
_EXCHANGE = _SP1 @ _SM2          # raises qubit 1, lowers qubit 2

_Z_OPS = (_SZ1, _SZ2)
_SP_OPS = (_SP1, _SP2)
_SM_OPS = (_SM1, _SM2)

_KET_UU = np.array([1, 0, 0, 0], dtype=complex)
_KET_UD = np.array([0, 1, 0, 0], dtype=complex)
_KET_DU = np.array([0, 0, 1, 0], dtype=complex)
_KET_DD = np.array([0, 0, 0, 1], dtype=complex)
TRIPLET_KET = (_KET_UD + _KET_DU) / np.sqrt(2.0)
SINGLET_KET = (_KET_UD - _KET_DU) / np.sqrt(2.0)

_NAMED_KETS = {
    "up_down": _KET_UD,
    "bell_psi_plus": TRIPLET_KET,
    "bell_phi_plus": (_KET_UU + _KET_DD) / np.sqrt(2.0),
    "bell_i": (_KET_UD + 1j * _KET_DU) / np.sqrt(2.0),
    "plus_plus": np.full(4, 0.5, dtype=complex),
}
NAMED_STATES = tuple(sorted(_NAMED_KETS))


def ket_to_density(ket) -> np.ndarray:
    """Projector |ket><ket| normalized to unit trace."""
    v = np.asarray(ket, dtype=complex).reshape(4)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def named_state(name: str) -> np.ndarray:
    """Density matrix of one of the named initial states."""
    try:
        return ket_to_density(_NAMED_KETS[name])
    except KeyError:
        raise ValueError(
            f"unknown state {name!r}; valid names: {', '.join(NAMED_STATES)}"
        ) from None


@dataclass(frozen=True)
class StateDiagnostics:
    """Deviation of a matrix from a physical density matrix."""

    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    passed: bool


def validate_state(rho, herm_tol: float = 1e-12, trace_tol: float = 1e-10,
                   eig_floor: float = -1e-8) -> StateDiagnostics:
    """Report Hermiticity defect, trace defect and minimum eigenvalue."""
    arr = np.asarray(rho, dtype=complex)
    if arr.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    herm = float(np.max(np.abs(arr - arr.conj().T)))
    trace = float(abs(arr.trace() - 1.0))
    min_eig = float(np.linalg.eigvalsh((arr + arr.conj().T) / 2.0)[0])
    ok = herm <= herm_tol and trace <= trace_tol and min_eig >= eig_floor
    return StateDiagnostics(herm, trace, min_eig, ok)


def triplet_singlet_measures(states: np.ndarray) -> dict:
    """Populations and coherence in the triplet/singlet basis.

    ``states`` is (..., 4, 4); returns arrays g_t, g_s, g_ts (complex),
    g11, g44.
    """
    r = np.asarray(states, dtype=complex)
    r11, r12 = r[..., 1, 1], r[..., 1, 2]
    r21, r22 = r[..., 2, 1], r[..., 2, 2]
    return {
        "g_t": 0.5 * np.real(r11 + r12 + r21 + r22),
        "g_s": 0.5 * np.real(r11 - r12 - r21 + r22),
        "g_ts": 0.5 * (r11 - r12 + r21 - r22),
        "g11": np.real(r[..., 0, 0]),
        "g44": np.real(r[..., 3, 3]),
    }


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def _commutator_block(h: np.ndarray) -> np.ndarray:
    eye = np.eye(4, dtype=complex)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


def _dissipator_block(a_i: np.ndarray, a_j: np.ndarray) -> np.ndarray:
    """Superoperator of  a_j rho a_i^dag - {a_i^dag a_j, rho}/2."""
    eye = np.eye(4, dtype=complex)
    aa = a_i.conj().T @ a_j
    return (np.kron(a_j, a_i.conj())
            - 0.5 * np.kron(aa, eye)
            - 0.5 * np.kron(eye, aa.T))


def _build_blocks():
    deph = [_commutator_block(_SZZ)]
    for i in range(2):
        for j in range(2):
            deph.append(_dissipator_block(_Z_OPS[i], _Z_OPS[j]))
    trans = [_commutator_block(_EXCHANGE),
             _commutator_block(_EXCHANGE.conj().T)]
    for i in range(2):
        for j in range(2):
            trans.append(_dissipator_block(_SM_OPS[i], _SM_OPS[j]))
    for i in range(2):
        for j in range(2):
            trans.append(_dissipator_block(_SP_OPS[i], _SP_OPS[j]))
    return np.stack(deph), np.stack(trans)


_DEPH_BLOCKS, _TRANS_BLOCKS = _build_blocks()


def _dephasing_weights(c: CoefficientSet) -> np.ndarray:
    g = np.asarray(c.gamma_z, dtype=complex)
    return np.array([c.ising, g[0, 0], g[0, 1], g[1, 0], g[1, 1]],
                    dtype=complex)


def _transverse_weights(c: CoefficientSet) -> np.ndarray:
    gd = np.asarray(c.gamma_down, dtype=complex)
    gu = np.asarray(c.gamma_up, dtype=complex)
    j = complex(c.coupling)
    return np.array([j, np.conj(j),
                     gd[0, 0], gd[0, 1], gd[1, 0], gd[1, 1],
                     gu[0, 0], gu[0, 1], gu[1, 0], gu[1, 1]], dtype=complex)


_KIND_TABLE = {
    "dephasing": (_DEPH_BLOCKS, _dephasing_weights),
    "transverse": (_TRANS_BLOCKS, _transverse_weights),
}


def superoperator(coeffs: CoefficientSet, kind: str) -> np.ndarray:
    """16x16 matrix acting on row-major vectorized density matrices."""
    try:
        blocks, weight_fn = _KIND_TABLE[kind]
    except KeyError:
        raise ValueError(f"unknown generator kind {kind!r}") from None
    return np.tensordot(weight_fn(coeffs), blocks, axes=(0, 0))


def generator_apply(rho, coeffs: CoefficientSet, kind: str) -> np.ndarray:
    """Right-hand side d rho / dt of the requested generator.

    Direct operator-algebra evaluation; traceless and Hermiticity-preserving
    for Hermitian input.  This is the reference the superoperator route is
    tested against.
    """
    r = np.asarray(rho, dtype=complex)
    if r.shape != (4, 4):
        raise ValueError("expected a 4x4 density matrix")
    coeffs.validate()
    out = np.zeros((4, 4), dtype=complex)
    if kind == "dephasing":
        h = coeffs.ising * _SZZ
        out += -1j * (h @ r - r @ h)
        g = np.asarray(coeffs.gamma_z, dtype=complex)
        for i in range(2):
            zi = _Z_OPS[i]
            for j in range(2):
                zj = _Z_OPS[j]
                zz = zi @ zj
                out += g[i, j] * (zj @ r @ zi - 0.5 * (zz @ r + r @ zz))
    elif kind == "transverse":
        j_c = complex(coeffs.coupling)
        h = j_c * _EXCHANGE + np.conj(j_c) * _EXCHANGE.conj().T
        out += -1j * (h @ r - r @ h)
        gd = np.asarray(coeffs.gamma_down, dtype=complex)
        gu = np.asarray(coeffs.gamma_up, dtype=complex)
        for i in range(2):
            for j in range(2):
                pd = _SP_OPS[i] @ _SM_OPS[j]
                out += gd[i, j] * (_SM_OPS[j] @ r @ _SP_OPS[i]
                                   - 0.5 * (pd @ r + r @ pd))
                pu = _SM_OPS[i] @ _SP_OPS[j]
                out += gu[i, j] * (_SP_OPS[j] @ r @ _SM_OPS[i]
                                   - 0.5 * (pu @ r + r @ pu))
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return out


@dataclass
class GeneratorSpec:
    """A generator kind plus its time-dependent coefficients.

    ``coefficients`` maps a time to a CoefficientSet.  ``markovian`` marks
    constant coefficients (evaluated once); a Markovian transverse generator
    must have correlated decay no stronger than local decay.  ``timescale``
    optionally announces the fastest coefficient oscillation period so the
    integrator can start with a resolving step.
    """

    kind: str
    coefficients: Callable[[float], CoefficientSet]
    markovian: bool = False
    params: Optional[MarkovianParams] = None
    frame_phase: float = 0.0
    timescale: Optional[float] = None
    # vectorized weight table (times -> (n, n_weights) in the kind's weight
    # order); optional fast path used by the integrator for sweeps
    vector_weights: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.kind not in _KIND_TABLE:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        sample = self.coefficients(0.0)
        sample.validate()
        if self.markovian and self.kind == "transverse":
            gd = np.asarray(sample.gamma_down, dtype=complex)
            local = min(gd[0, 0].real, gd[1, 1].real)
            if abs(gd[0, 1]) > local + 1e-12:
                raise ValueError(
                    "correlated decay must not exceed local decay"
                )


def dephasing_1f_generator(params: DephasingParams,
                           cross_scale: float = 1.0) -> GeneratorSpec:
    """Pure-dephasing generator for 1/f noise with correlated cross spectrum.

    ``cross_scale`` multiplies the correlated terms (0 gives local noise
    only); the closed-form element factors assume cross_scale = 1.
    """
    sigma, wl, theta = params.sigma, params.omega_low, params.theta
    quantum = params.quantum_regime
    cross_phase = (np.exp(1j * theta) if quantum else np.cos(theta)) * cross_scale

    def coeffs(t: float) -> CoefficientSet:
        gz = float(_rates.dephasing_rate_1f(t, sigma, wl))
        cross = cross_phase * gz
        gamma_z = np.array([[gz, cross], [np.conj(cross), gz]], dtype=complex)
        ising = (float(_rates.ising_coupling_1f(t, sigma, theta)) * cross_scale
                 if quantum else 0.0)
        return CoefficientSet(time=t, ising=ising, gamma_z=gamma_z)

    def weights(ts: np.ndarray) -> np.ndarray:
        gz = np.asarray(_rates.dephasing_rate_1f(ts, sigma, wl))
        w = np.zeros((ts.size, 5), dtype=complex)
        if quantum:
            w[:, 0] = cross_scale * np.asarray(
                _rates.ising_coupling_1f(ts, sigma, theta))
        w[:, 1] = gz
        w[:, 2] = cross_phase * gz
        w[:, 3] = np.conj(cross_phase) * gz
        w[:, 4] = gz
        return w

    return GeneratorSpec(kind="dephasing", coefficients=coeffs,
                         vector_weights=weights)


def transverse_1f_generator(sigma: float, omega_low: float, rabi: float,
                            quantum: bool = True,
                            cross_scale: float = 1.0) -> GeneratorSpec:
    """Transverse generator for resonantly driven qubits under 1/f noise.

    ``quantum`` selects the low-temperature regime (quantum spectrum equal
    to the classical one, zero absorption, finite coherent coupling); the
    classical regime has equal decay and absorption and no coupling.  The
    cross spectrum is real and ``cross_scale`` times the local one.
    """

    def coeffs(t: float) -> CoefficientSet:
        if quantum:
            g = float(_rates.quantum_decay_rate_1f(t, sigma, omega_low, rabi))
            coupling = complex(
                cross_scale * _rates.transverse_coupling_1f(t, sigma, rabi))
            gamma_up = np.zeros((2, 2), dtype=complex)
        else:
            g = float(_rates.classical_rate_1f(t, sigma, omega_low, rabi))
            coupling = 0j
            gamma_up = g * np.array([[1.0, cross_scale],
                                     [cross_scale, 1.0]], dtype=complex)
        gamma_down = g * np.array([[1.0, cross_scale],
                                   [cross_scale, 1.0]], dtype=complex)
        return CoefficientSet(time=t, coupling=coupling,
                              gamma_down=gamma_down, gamma_up=gamma_up)

    def weights(ts: np.ndarray) -> np.ndarray:
        w = np.zeros((ts.size, 10), dtype=complex)
        if quantum:
            g = np.asarray(_rates.quantum_decay_rate_1f(ts, sigma, omega_low,
                                                        rabi))
            j = cross_scale * np.asarray(
                _rates.transverse_coupling_1f(ts, sigma, rabi))
            w[:, 0] = j
            w[:, 1] = np.conj(j)
        else:
            g = np.asarray(_rates.classical_rate_1f(ts, sigma, omega_low,
                                                    rabi))
            w[:, 6] = g
            w[:, 7] = cross_scale * g
            w[:, 8] = cross_scale * g
            w[:, 9] = g
        w[:, 2] = g
        w[:, 3] = cross_scale * g
        w[:, 4] = cross_scale * g
        w[:, 5] = g
        return w

    return GeneratorSpec(kind="transverse", coefficients=coeffs,
                         timescale=2.0 * np.pi / rabi,
                         vector_weights=weights)


def markovian_generator(params: MarkovianParams,
                        absorption_ratio: float = 0.0) -> GeneratorSpec:
    """Constant transverse generator from Markovian parameters.

    ``absorption_ratio`` is exp(-beta Omega): the detailed-balance ratio of
    absorption to decay (0 at zero temperature).
    """
    if not (0.0 <= absorption_ratio <= 1.0):
        raise ValueError("absorption_ratio must lie in [0, 1]")
    gd = np.array([[params.gamma_down, params.gamma_12],
                   [params.gamma_12, params.gamma_down]], dtype=complex)
    coeff = CoefficientSet(
        time=0.0,
        coupling=params.exchange + 1j * params.dm,
        gamma_down=gd,
        gamma_up=absorption_ratio * gd,
    )
    return GeneratorSpec(kind="transverse", coefficients=lambda t: coeff,
                         markovian=True, params=params)


def markovian_classical_generator(gamma_bar: float,
                                  gamma_bar_12: float) -> GeneratorSpec:
    """Constant transverse generator for purely classical Markovian noise:
    equal decay and absorption, no coherent coupling."""
    if not (0.0 <= gamma_bar_12 <= gamma_bar):
        raise ValueError("require 0 <= gamma_bar_12 <= gamma_bar")
    g = np.array([[gamma_bar, gamma_bar_12],
                  [gamma_bar_12, gamma_bar]], dtype=complex)
    coeff = CoefficientSet(time=0.0, gamma_down=g, gamma_up=g.copy())
    return GeneratorSpec(kind="transverse", coefficients=lambda t: coeff,
                         markovian=True)


def constant_generator(kind: str, coeffs: CoefficientSet,
                       markovian: bool = True) -> GeneratorSpec:
    """Wrap a fixed CoefficientSet as a generator."""
    return GeneratorSpec(kind=kind, coefficients=lambda t: coeffs,
                         markovian=markovian)


def absorb_correlated_phase(gamma_12: complex, coupling: complex):
    """Rotate the phase of the correlated decay rate into the coupling.

    Returns (|gamma_12|, coupling * exp(-i phase), phase); the rotation is a
    local unitary on qubit 2 and is logged on the resulting trajectory.
    """
    g = complex(gamma_12)
    phase = float(np.angle(g)) if g != 0 else 0.0
    return abs(g), complex(coupling) * np.exp(-1j * phase), phase


# ---------------------------------------------------------------------------
# time evolution
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """Time grid with per-time states, coefficients and derived measures.

    ``states`` is (n, 4, 4); ``measures`` holds arrays g_t, g_s, re_g_ts,
    im_g_ts, g11, g44 and concurrence; ``frame_phase`` records the local
    rotation absorbed into the operators before evolution (0 if none).
    """

    times: np.ndarray
    states: np.ndarray
    coefficients: list
    measures: dict
    frame_phase: float = 0.0

    def __post_init__(self):
        n = len(self.times)
        if self.states.shape != (n, 4, 4) or len(self.coefficients) != n:
            raise ValueError("trajectory fields must share one length")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("times must be strictly increasing")

    def to_csv(self, path, selectors=None, header_comments=()) -> None:
        """Write the trajectory as CSV.

        ``selectors`` picks column groups out of {"entries", "populations",
        "concurrence", "coefficients"} (all by default).  Floats are written
        with fixed precision so repeated runs are byte-identical.
        """
        groups = ("entries", "populations", "concurrence", "coefficients")
        chosen = groups if selectors is None else tuple(selectors)
        unknown = set(chosen) - set(groups)
        if unknown:
            raise ValueError(f"unknown column selectors: {sorted(unknown)}")

        labels = ("uu", "ud", "du", "dd")
        columns: list[tuple[str, np.ndarray]] = [("t", self.times)]
        if "entries" in chosen:
            for a in range(4):
                for b in range(4):
                    columns.append((f"re_{labels[a]}_{labels[b]}",
                                    self.states[:, a, b].real))
                    columns.append((f"im_{labels[a]}_{labels[b]}",
                                    self.states[:, a, b].imag))
        if "populations" in chosen:
            m = self.measures
            columns += [("g_t", m["g_t"]), ("g_s", m["g_s"]),
                        ("re_g_ts", m["re_g_ts"]), ("im_g_ts", m["im_g_ts"]),
                        ("g11", m["g11"]), ("g44", m["g44"])]
        if "concurrence" in chosen:
            columns.append(("concurrence", self.measures["concurrence"]))
        if "coefficients" in chosen:
            names = ["ising", "re_coupling", "im_coupling"]
            grids = [
                np.array([c.ising for c in self.coefficients], dtype=float),
                np.array([complex(c.coupling).real for c in self.coefficients]),
                np.array([complex(c.coupling).imag for c in self.coefficients]),
            ]
            for attr in ("gamma_z", "gamma_down", "gamma_up"):
                mats = np.array([np.asarray(getattr(c, attr))
                                 for c in self.coefficients], dtype=complex)
                names += [f"{attr}_1", f"{attr}_2",
                          f"re_{attr}_12", f"im_{attr}_12"]
                grids += [mats[:, 0, 0].real, mats[:, 1, 1].real,
                          mats[:, 0, 1].real, mats[:, 0, 1].imag]
            columns += list(zip(names, grids))

        lines = [f"# {comment}" for comment in header_comments]
        lines.append(",".join(name for name, _ in columns))
        data = np.column_stack([col for _, col in columns])
        for row in data:
            lines.append(",".join(f"{x:.12e}" for x in row))
        text = "\n".join(lines) + "\n"
        if hasattr(path, "write"):
            path.write(text)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)


def _estimate_initial_step(gen: GeneratorSpec, t_grid: np.ndarray) -> float:
    span = float(t_grid[-1] - t_grid[0])
    samples = np.linspace(t_grid[0], t_grid[-1], 9)
    max_rate = 0.0
    max_coupling = 0.0
    for t in samples:
        c = gen.coefficients(float(t))
        for attr in ("gamma_z", "gamma_down", "gamma_up"):
            max_rate = max(max_rate, float(np.max(np.abs(
                np.asarray(getattr(c, attr), dtype=complex)))))
        max_coupling = max(max_coupling, abs(complex(c.coupling)),
                           abs(float(c.ising)))
        if gen.markovian:
            break
    h = span / 1000.0
    if max_rate > 0.0:
        h = min(h, 1.0 / (50.0 * max_rate))
    if max_coupling > 0.0:
        h = min(h, 1.0 / (50.0 * max_coupling))
    if gen.timescale:
        h = min(h, gen.timescale / 20.0)
    return h


def _symmetrized(v: np.ndarray) -> np.ndarray:
    m = v.reshape(4, 4)
    return ((m + m.conj().T) / 2.0).reshape(16)


def _rk4_span(v: np.ndarray, hs: np.ndarray, l_bounds: np.ndarray,
              l_mids: np.ndarray) -> np.ndarray:
    """Advance through len(l_mids) steps with per-step sizes ``hs``."""
    for s in range(len(l_mids)):
        h = hs[s]
        l_start, l_mid, l_end = l_bounds[s], l_mids[s], l_bounds[s + 1]
        k1 = l_start @ v
        k2 = l_mid @ (v + (h / 2.0) * k1)
        k3 = l_mid @ (v + (h / 2.0) * k2)
        k4 = l_end @ (v + h * k3)
        v = _symmetrized(v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    return v


def _substep_bounds(t0: float, t1: float, h_target: float,
                    graded: bool) -> np.ndarray:
    n_sub = max(1, math.ceil((t1 - t0) / h_target))
    u = np.linspace(0.0, 1.0, n_sub + 1)
    if graded:
        # rates with t ln t behavior at the origin spoil the step order
        # there; a quadratically graded mesh restores it
        u = u**2
    return t0 + (t1 - t0) * u


def _run_grid(gen: GeneratorSpec, v0: np.ndarray, t_grid: np.ndarray,
              h_target: float) -> np.ndarray:
    blocks, weight_fn = _KIND_TABLE[gen.kind]
    chunk = 2048

    if gen.markovian:
        lmat = np.tensordot(weight_fn(gen.coefficients(0.0)), blocks, (0, 0))
        lrep = np.broadcast_to(lmat, (chunk + 1, 16, 16))

    def tabulated(ts: np.ndarray) -> np.ndarray:
        if gen.vector_weights is not None:
            w = np.asarray(gen.vector_weights(ts), dtype=complex)
        else:
            w = np.stack([weight_fn(gen.coefficients(float(t))) for t in ts])
        return np.tensordot(w, blocks, axes=(1, 0))

    out = np.empty((len(t_grid), 16), dtype=complex)
    out[0] = v0
    v = v0.copy()
    for k in range(len(t_grid) - 1):
        t0, t1 = float(t_grid[k]), float(t_grid[k + 1])
        graded = (k == 0) and (t0 == 0.0) and not gen.markovian
        bounds = _substep_bounds(t0, t1, h_target, graded)
        hs = np.diff(bounds)
        for start in range(0, len(hs), chunk):
            stop = min(start + chunk, len(hs))
            if gen.markovian:
                v = _rk4_span(v, hs[start:stop], lrep[: stop - start + 1],
                              lrep[: stop - start])
            else:
                b = bounds[start:stop + 1]
                mids = (b[:-1] + b[1:]) / 2.0
                v = _rk4_span(v, hs[start:stop], tabulated(b),
                              tabulated(mids))
        if not np.all(np.isfinite(v)):
            raise IntegrationError(f"state became non-finite at t = {t1}",
                                   time=t1)
        out[k + 1] = v
    return out


def evolve(rho0, gen: GeneratorSpec, t_grid, tolerance: float = 1e-8,
           max_halvings: int = 12, initial_step: float | None = None,
           herm_tol: float = 1e-12, trace_tol: float = 1e-10,
           eig_floor: float = -1e-8) -> Trajectory:
    """Integrate the generator with classical fixed-step 4th-order steps.

    The step is halved until two successive full trajectories differ by less
    than ``tolerance`` in max-abs over all grid points and matrix entries
    (at most ``max_halvings`` times, then IntegrationError).  Every output
    state is validated against the density-matrix tolerances; a violation
    raises IntegrationError carrying the offending time.
    """
    t_arr = np.asarray(t_grid, dtype=float)
    if t_arr.ndim != 1 or t_arr.size < 2:
        raise ValueError("t_grid must contain at least two times")
    if np.any(np.diff(t_arr) <= 0.0):
        raise ValueError("t_grid must be strictly increasing")
    if t_arr[0] < 0.0:
        raise ValueError("times must be >= 0")

    rho_arr = np.asarray(rho0, dtype=complex)
    diag0 = validate_state(rho_arr, herm_tol=1e-9, trace_tol=1e-9,
                           eig_floor=-1e-7)
    if not diag0.passed:
        raise ValueError(f"initial state is not a density matrix: {diag0}")

    h = initial_step or _estimate_initial_step(gen, t_arr)
    h = min(h, float(np.min(np.diff(t_arr))))
    v0 = rho_arr.reshape(16)

    prev = _run_grid(gen, v0, t_arr, h)
    accepted = None
    for _ in range(max_halvings):
        h /= 2.0
        cur = _run_grid(gen, v0, t_arr, h)
        if float(np.max(np.abs(cur - prev))) < tolerance:
            accepted = cur
            break
        prev = cur
    if accepted is None:
        raise IntegrationError(
            f"step halving did not converge below {tolerance} within "
            f"{max_halvings} halvings", time=float(t_arr[-1]))

    states = accepted.reshape(-1, 4, 4)
    for idx in range(len(t_arr)):
        diag = validate_state(states[idx], herm_tol=herm_tol,
                              trace_tol=trace_tol, eig_floor=eig_floor)
        if not diag.passed:
            raise IntegrationError(
                f"state validation failed at t = {t_arr[idx]}: {diag}",
                time=float(t_arr[idx]))

    ts_meas = triplet_singlet_measures(states)
    measures = {
        "g_t": ts_meas["g_t"],
        "g_s": ts_meas["g_s"],
        "re_g_ts": ts_meas["g_ts"].real,
        "im_g_ts": ts_meas["g_ts"].imag,
        "g11": ts_meas["g11"],
        "g44": ts_meas["g44"],
        "concurrence": _concurrence(states),
    }
    coeff_log = [gen.coefficients(float(t)) for t in t_arr]
    return Trajectory(times=t_arr.copy(), states=states,
                      coefficients=coeff_log, measures=measures,
                      frame_phase=gen.frame_phase)


# ---------------------------------------------------------------------------
# steady states
# ---------------------------------------------------------------------------

def steady_state(params, beta_omega: float) -> np.ndarray:
    """Closed-form steady state when the correlated decay equals the local
    one and detailed balance holds at exp(-beta_omega).

    Half the weight sits in the dark singlet; the rest is thermally
    distributed over the bright ladder (uu, triplet, dd).  Accepts
    MarkovianParams or a Markovian transverse GeneratorSpec.
    """
    if isinstance(params, GeneratorSpec):
        if (params.kind != "transverse" or not params.markovian
                or params.params is None):
            raise UnsupportedGeneratorError(
                "steady state requires a Markovian transverse generator"
            )
        params = params.params
    if not isinstance(params, MarkovianParams):
        raise UnsupportedGeneratorError(
            "steady state requires Markovian transverse parameters"
        )
    if abs(params.gamma_12 - params.gamma_down) > 1e-9 * params.gamma_down:
        raise ValueError(
            "closed-form steady state assumes gamma_12 = gamma_down"
        )
    if beta_omega < 0.0:
        raise ValueError("beta_omega must be >= 0")
    alpha = float(np.exp(-beta_omega))
    g44 = 1.0 / (2.0 * (1.0 + alpha + alpha**2))
    g_t = alpha * g44
    g11 = alpha**2 * g44
    rho = (0.5 * np.outer(SINGLET_KET, SINGLET_KET.conj())
           + g_t * np.outer(TRIPLET_KET, TRIPLET_KET.conj())
           + np.diag([g11, 0.0, 0.0, g44]).astype(complex))
    return rho


def steady_state_nullspace(params: MarkovianParams, beta_omega: float,
                           singlet_weight: float | None = None) -> np.ndarray:
    """Steady state from the null space of the full 16x16 generator matrix.

    Works for any Markovian transverse parameters.  When the correlated and
    local decay coincide the singlet population is conserved and the null
    space is two-dimensional; the combination with the requested
    ``singlet_weight`` (default 1/2) is returned.
    """
    from scipy.linalg import null_space

    gen = markovian_generator(params, absorption_ratio=float(np.exp(-beta_omega)))
    lmat = superoperator(gen.coefficients(0.0), "transverse")
    basis = null_space(lmat, rcond=1e-10)
    if basis.shape[1] == 0:
        raise _rates.NumericError("empty null space; generator is not a "
                                  "valid Lindblad matrix")

    # hermitize candidates; the null space of a physical generator is closed
    # under conjugate transposition
    candidates = []
    for k in range(basis.shape[1]):
        m = basis[:, k].reshape(4, 4)
        for cand in ((m + m.conj().T) / 2.0, (m - m.conj().T) / 2j):
            norm = np.linalg.norm(cand)
            if norm > 1e-10:
                candidates.append(cand / norm)
    hermitian_basis: list[np.ndarray] = []
    for cand in candidates:
        vec = cand.reshape(16)
        for prev in hermitian_basis:
            vec = vec - np.vdot(prev.reshape(16), vec) * prev.reshape(16)
        if np.linalg.norm(vec) > 1e-8:
            hermitian_basis.append(vec.reshape(4, 4) / np.linalg.norm(vec))

    if len(hermitian_basis) == 1:
        rho = hermitian_basis[0]
        rho = rho / rho.trace().real
        return rho
    if len(hermitian_basis) == 2:
        target = 0.5 if singlet_weight is None else float(singlet_weight)
        h1, h2 = hermitian_basis
        s = SINGLET_KET
        a_mat = np.array([
            [h1.trace().real, h2.trace().real],
            [np.real(s.conj() @ h1 @ s), np.real(s.conj() @ h2 @ s)],
        ])
        coeffs = np.linalg.solve(a_mat, np.array([1.0, target]))
        rho = coeffs[0] * h1 + coeffs[1] * h2
        return (rho + rho.conj().T) / 2.0
    raise _rates.NumericError(
        f"null space dimension {len(hermitian_basis)} > 2; steady state is "
        "not determined by the singlet weight alone"
    )
