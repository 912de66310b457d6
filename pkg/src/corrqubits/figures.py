"""Deterministic CSV data behind each figure.

Every writer emits parameter-stamped CSV files (comment rows record all
inputs) with fixed-precision floats, so repeated runs are byte-identical.
Sweeps fan out over a process pool sized by the CORRQUBITS_WORKERS
environment variable (serial by default); cells are pure functions gathered
in deterministic order.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

import numpy as np

from . import analytic, dynamics, rates
from .entanglement import concurrence
from .noise import spatial_factor

__all__ = ["FIGURES", "write_figure"]

# shared 1/f parameters of the non-Markovian figures:
# hbar/sigma = 100 ns, omega_l / 2 pi = 1 MHz, Omega / 2 pi = 1 GHz
_SIGMA_FAST = 10.0
_OMEGA_LOW = 2.0 * np.pi
_RABI = 2.0 * np.pi * 1e3

# Markovian figure parameters: gamma_down = 1 /us, gamma_12 = 0.9 gamma_down
_GAMMA_DOWN = 1.0
_GAMMA_12 = 0.9

_SOUND_SPEED = 5.0e3   # 5 km/s in um/us


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("CORRQUBITS_WORKERS", "1")))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    workers = _worker_count()
    if workers <= 1 or len(items) < 4:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _write_csv(path: Path, stamps: list[str], names: list[str],
               columns: list[np.ndarray]) -> Path:
    lengths = {len(c) for c in columns}
    if len(lengths) != 1:
        raise ValueError("columns must share one length")
    lines = [f"# {s}" for s in stamps]
    lines.append(",".join(names))
    data = np.column_stack(columns)
    for row in data:
        lines.append(",".join(f"{x:.12e}" for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# correlated-noise geometry (fig2)
# ---------------------------------------------------------------------------

def fig2(out_dir: Path, grid: int | None = None) -> list[Path]:
    """Cross-to-local spectrum ratio vs frequency and qubit separation."""
    n = grid or 201
    freqs = np.linspace(0.05, 5.0, n) * 2.0 * np.pi * 1e3   # 0.05-5 GHz
    dists = np.linspace(0.0, 5.0, n)                        # um
    kd = np.outer(freqs, dists) / _SOUND_SPEED
    ratio = spatial_factor(2, kd)
    stamps = [
        "fig2a: cross/local spectrum ratio in 2d",
        f"sound_speed_um_per_us={_SOUND_SPEED}",
        f"omega_grid_rad_per_us=[{freqs[0]:.6e},{freqs[-1]:.6e}]x{n}",
        f"distance_grid_um=[{dists[0]:.6e},{dists[-1]:.6e}]x{n}",
    ]
    omega_col = np.repeat(freqs, n)
    dist_col = np.tile(dists, n)
    path_a = _write_csv(out_dir / "fig2a.csv", stamps,
                        ["omega_rad_per_us", "distance_um", "ratio"],
                        [omega_col, dist_col, ratio.ravel()])

    omega_1ghz = 2.0 * np.pi * 1e3
    dists_b = np.linspace(0.0, 5.0, 2 * n - 1)
    kd_b = omega_1ghz * dists_b / _SOUND_SPEED
    cols = [dists_b] + [spatial_factor(dim, kd_b) for dim in (1, 2, 3)]
    stamps_b = [
        "fig2b: cross/local ratio vs distance per dimension",
        f"omega_rad_per_us={omega_1ghz!r}",
        f"sound_speed_um_per_us={_SOUND_SPEED}",
    ]
    path_b = _write_csv(out_dir / "fig2b.csv", stamps_b,
                        ["distance_um", "ratio_1d", "ratio_2d", "ratio_3d"],
                        cols)
    return [path_a, path_b]


# ---------------------------------------------------------------------------
# pure dephasing (fig3)
# ---------------------------------------------------------------------------

def _dephasing_concurrence_grid(ts: np.ndarray, thetas: np.ndarray,
                                sigma: float, omega_low: float,
                                quantum: bool, rho0: np.ndarray) -> np.ndarray:
    """Concurrence of rho0 under dephasing on a (theta, t) grid, vectorized.

    Mirrors analytic.dephasing_factors; cross-checked against it in the
    tests.
    """
    gz = np.asarray(rates.integrated_dephasing_1f(ts, sigma, omega_low))
    out = np.empty((thetas.size, ts.size))
    for i, theta in enumerate(thetas):
        sin_t = np.sin(theta) if quantum else 0.0
        cos_t = np.cos(theta)
        v = (np.asarray(rates.ising_phase_1f(ts, sigma, theta))
             if quantum else np.zeros_like(ts))
        f = np.ones((ts.size, 4, 4), dtype=complex)
        up = np.exp(-2.0 * (1.0 - 1j * sin_t) * gz - 2j * v)
        dn = np.exp(-2.0 * (1.0 + 1j * sin_t) * gz - 2j * v)
        f[:, 0, 1] = up
        f[:, 0, 2] = dn
        f[:, 1, 3] = np.conj(dn)
        f[:, 2, 3] = np.conj(up)
        f[:, 1, 2] = np.exp(-4.0 * (1.0 - cos_t) * gz)
        f[:, 0, 3] = np.exp(-4.0 * (1.0 + cos_t) * gz)
        for a in range(1, 4):
            for b in range(a):
                f[:, a, b] = np.conj(f[:, b, a])
        out[i] = concurrence(f * rho0)
    return out


def fig3a(out_dir: Path, grid: int | None = None) -> list[Path]:
    """Entanglement decay of the two Bell states under dephasing:
    local noise only vs correlated classical noise at theta = pi/3."""
    n = grid or 501
    ts = np.linspace(0.0, 0.5, n)
    theta = np.pi / 3.0
    rho_psi = dynamics.named_state("bell_psi_plus")
    rho_phi = dynamics.named_state("bell_phi_plus")

    # local-only case: cross terms removed; correlated case: classical
    # cross spectrum at theta = pi/3
    gen_local = dynamics.dephasing_1f_generator(
        analytic.DephasingParams(2.0, _OMEGA_LOW, 0.0, quantum_regime=False),
        cross_scale=0.0)
    gen_corr = dynamics.dephasing_1f_generator(
        analytic.DephasingParams(2.0, _OMEGA_LOW, theta,
                                 quantum_regime=False))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", rates.CutoffTimeWarning)
        c_psi_local = dynamics.evolve(rho_psi, gen_local, ts,
                                      tolerance=1e-9).measures["concurrence"]
        c_phi_local = dynamics.evolve(rho_phi, gen_local, ts,
                                      tolerance=1e-9).measures["concurrence"]
        c_psi_corr = dynamics.evolve(rho_psi, gen_corr, ts,
                                     tolerance=1e-9).measures["concurrence"]
        c_phi_corr = dynamics.evolve(rho_phi, gen_corr, ts,
                                     tolerance=1e-9).measures["concurrence"]

    stamps = [
        "fig3a: bell-state entanglement decay under dephasing",
        "sigma_per_us=2.0 (hbar/sigma = 500 ns)",
        "omega_low_rad_per_us=6.283185307179586 (1 MHz)",
        "theta_rad=1.0471975511965976 (pi/3, classical correlated case)",
    ]
    return [_write_csv(out_dir / "fig3a.csv", stamps,
                       ["t_us", "c_psi_local", "c_phi_local",
                        "c_psi_corr", "c_phi_corr"],
                       [ts, c_psi_local, c_phi_local, c_psi_corr, c_phi_corr])]


def fig3b(out_dir: Path, grid: int | None = None) -> list[Path]:
    """Concurrence from the (++) product state on a (theta, t) grid in the
    quantum regime."""
    n_theta = grid or 201
    n_t = 2 * n_theta - 1
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta)
    ts = np.linspace(0.0, 0.5, n_t)
    rho0 = dynamics.named_state("plus_plus")
    conc = _dephasing_concurrence_grid(ts, thetas, 2.0, _OMEGA_LOW, True, rho0)
    stamps = [
        "fig3b: concurrence from (++) vs time and cross-spectrum phase",
        "sigma_per_us=2.0 (hbar/sigma = 500 ns)",
        "omega_low_rad_per_us=6.283185307179586 (1 MHz)",
        f"theta_points={n_theta}, time_points={n_t}",
    ]
    theta_col = np.repeat(thetas, n_t)
    t_col = np.tile(ts, n_theta)
    return [_write_csv(out_dir / "fig3b.csv", stamps,
                       ["theta_rad", "t_us", "concurrence"],
                       [theta_col, t_col, conc.ravel()])]


# ---------------------------------------------------------------------------
# Markovian transverse noise (fig4, fig5)
# ---------------------------------------------------------------------------

def _markovian_trace(exchange: float, dm: float, ts: np.ndarray) -> dict:
    params = analytic.MarkovianParams(_GAMMA_DOWN, _GAMMA_12,
                                      exchange=exchange, dm=dm)
    traj = dynamics.evolve(dynamics.named_state("up_down"),
                           dynamics.markovian_generator(params), ts,
                           tolerance=1e-9)
    return traj.measures


def fig4(out_dir: Path, grid: int | None = None) -> list[Path]:
    """Populations, coherences, and concurrence for the exchange-only and
    DM-only cases."""
    n = grid or 501
    ts = np.linspace(0.0, 5.0, n)
    paths = []
    for tag, sweep, key in (
        ("exchange", (0.0, 1.0, 5.0), "exchange"),
        ("dm", (0.2, 0.45, 5.0), "dm"),
    ):
        names = ["t_us"]
        cols = [ts]
        for value in sweep:
            m = _markovian_trace(value if key == "exchange" else 0.0,
                                 value if key == "dm" else 0.0, ts)
            suffix = f"{tag}_{str(value).replace('.', 'p')}"
            for field in ("g_t", "g_s", "re_g_ts", "im_g_ts", "concurrence"):
                names.append(f"{field}_{suffix}")
                cols.append(m[field])
        stamps = [
            f"fig4 ({tag} sweep): driven qubits from the (ud) state",
            f"gamma_down_per_us={_GAMMA_DOWN}, gamma_12_per_us={_GAMMA_12}",
            f"{key}_values_per_us={sweep}",
        ]
        paths.append(_write_csv(out_dir / f"fig4_{tag}.csv", stamps, names,
                                cols))
    return paths


def _fig5_cell(dm: float, ts: tuple) -> np.ndarray:
    params = analytic.MarkovianParams(_GAMMA_DOWN, _GAMMA_12, dm=dm)
    return np.asarray(analytic.concurrence_dm(np.asarray(ts), params))


def fig5(out_dir: Path, grid: int | None = None) -> list[Path]:
    """Concurrence vs time and DM strength (closed-form sweep)."""
    n_dm = grid or 101
    n_t = 401
    dms = np.linspace(0.0, 1.0, n_dm)
    ts = np.linspace(0.0, 5.0, n_t)
    rows = _map_ordered(partial(_fig5_cell, ts=tuple(ts)), list(dms))
    conc = np.stack(rows)
    stamps = [
        "fig5: concurrence vs time and dm coupling",
        f"gamma_down_per_us={_GAMMA_DOWN}, gamma_12_per_us={_GAMMA_12}",
        f"dm_grid_per_us=[{dms[0]},{dms[-1]}]x{n_dm}, "
        f"critical_dm_per_us={_GAMMA_12 / 2.0}",
    ]
    return [_write_csv(out_dir / "fig5.csv", stamps,
                       ["dm_per_us", "t_us", "concurrence"],
                       [np.repeat(dms, n_t), np.tile(ts, n_dm), conc.ravel()])]


# ---------------------------------------------------------------------------
# non-Markovian 1/f (fig6, fig7)
# ---------------------------------------------------------------------------

def fig6(out_dir: Path, grid: int | None = None) -> list[Path]:
    """Classical 1/f: decay rate, its running integral, and entanglement."""
    n = grid or 2001
    ts = np.linspace(0.0, 0.05, n)
    gamma = np.asarray(rates.classical_rate_1f(ts, _SIGMA_FAST, _OMEGA_LOW,
                                               _RABI))
    big_gamma = rates.cumulative_integral(
        lambda s: rates.classical_rate_1f(s, _SIGMA_FAST, _OMEGA_LOW, _RABI),
        ts)
    c_bell = np.asarray(analytic.concurrence_classical_1f_bell(big_gamma))
    gen = dynamics.transverse_1f_generator(_SIGMA_FAST, _OMEGA_LOW, _RABI,
                                           quantum=False)
    c_up_down = dynamics.evolve(dynamics.named_state("up_down"), gen,
                                ts[1:], tolerance=1e-8).measures["concurrence"]
    c_up_down = np.concatenate(([0.0], c_up_down))
    stamps = [
        "fig6: classical 1/f noise on driven qubits",
        f"sigma_per_us={_SIGMA_FAST} (hbar/sigma = 100 ns)",
        "omega_low_rad_per_us=6.283185307179586 (1 MHz)",
        f"rabi_rad_per_us={_RABI!r} (1 GHz)",
    ]
    return [_write_csv(out_dir / "fig6.csv", stamps,
                       ["t_us", "gamma_per_us", "big_gamma", "c_bell",
                        "c_up_down"],
                       [ts, gamma, big_gamma, c_bell, c_up_down])]


def _fig7_residual_cell(beta_omega: float) -> float:
    return float(analytic.residual_entanglement(beta_omega, 1.0))


def fig7(out_dir: Path, grid: int | None = None) -> list[Path]:
    """Quantum 1/f: rate, coupling, entanglement curves, and the
    steady-state entanglement vs temperature."""
    n = grid or 2001
    ts = np.linspace(0.0, 0.05, n)
    gamma_down = np.asarray(rates.quantum_decay_rate_1f(
        ts, _SIGMA_FAST, _OMEGA_LOW, _RABI))
    big_gamma = rates.cumulative_integral(
        lambda s: rates.quantum_decay_rate_1f(s, _SIGMA_FAST, _OMEGA_LOW,
                                              _RABI), ts)
    coupling = np.asarray(rates.transverse_coupling_1f(ts, _SIGMA_FAST,
                                                       _RABI))
    rotation = np.asarray(analytic.coherence_rotation_1f(ts, _SIGMA_FAST,
                                                         _RABI))
    c_bell_quantum = np.asarray(
        analytic.concurrence_quantum_1f(big_gamma, rotation, "bell"))
    c_up_down_quantum = np.asarray(
        analytic.concurrence_quantum_1f(big_gamma, rotation, "product"))
    big_gamma_classical = rates.cumulative_integral(
        lambda s: rates.classical_rate_1f(s, _SIGMA_FAST, _OMEGA_LOW, _RABI),
        ts)
    c_bell_classical = np.asarray(
        analytic.concurrence_classical_1f_bell(big_gamma_classical))
    stamps = [
        "fig7 dynamics: quantum 1/f noise on driven qubits",
        f"sigma_per_us={_SIGMA_FAST} (hbar/sigma = 100 ns)",
        "omega_low_rad_per_us=6.283185307179586 (1 MHz)",
        f"rabi_rad_per_us={_RABI!r} (1 GHz)",
    ]
    path_dyn = _write_csv(
        out_dir / "fig7_dynamics.csv", stamps,
        ["t_us", "gamma_down_per_us", "big_gamma_down", "coupling_per_us",
         "c_bell_quantum", "c_bell_classical", "c_up_down_quantum"],
        [ts, gamma_down, big_gamma, coupling, c_bell_quantum,
         c_bell_classical, c_up_down_quantum])

    beta_omegas = np.geomspace(0.1, 10.0, 101)
    residual = np.array(_map_ordered(_fig7_residual_cell, list(beta_omegas)))
    stamps_r = [
        "fig7 inset: steady-state entanglement vs inverse temperature",
        "beta_omega is the dimensionless product of inverse temperature and "
        "drive frequency",
    ]
    path_res = _write_csv(out_dir / "fig7_residual.csv", stamps_r,
                          ["beta_omega", "residual_concurrence"],
                          [beta_omegas, residual])
    return [path_dyn, path_res]


FIGURES = {
    "fig2": fig2,
    "fig3a": fig3a,
    "fig3b": fig3b,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
}


def write_figure(name: str, out_dir, grid: int | None = None) -> list[Path]:
    """Write the data files behind the named figure; returns their paths."""
    try:
        fn = FIGURES[name]
    except KeyError:
        raise KeyError(
            f"unknown figure {name!r}; choose from {', '.join(sorted(FIGURES))}"
        ) from None
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return fn(out, grid=grid)
