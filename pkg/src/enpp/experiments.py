"""Run orchestration: single simulations, the iteration mode and the
vanishing-viscosity rate experiment, plus all file outputs."""

from __future__ import annotations

import csv
import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig
from .diagnostics import blowup_monitor, invariant_report, report_to_csv
from .dynamics import (
    NormIndices,
    SimState,
    Trajectory,
    cfl_limit,
    picard_solve,
    simulate,
)
from .errors import ConfigError, EnppError
from .littlewood_paley import timespace_besov_norm, get_partition
from .operators import solve_potential
from .presets import initial_state
from .snapshots import (
    read_manifest,
    read_snapshot,
    snapshot_name,
    write_manifest,
    write_snapshot,
)
from .spectral import Field, VectorField, make_grid

__all__ = [
    "RateFit",
    "SimulationResult",
    "build_initial_state",
    "run_simulation",
    "run_iteration",
    "inviscid_experiment",
    "load_trajectory",
]


def build_initial_state(config: RunConfig, nu: float | None = None) -> SimState:
    grid = make_grid(config.d, config.N, config.L)
    state = initial_state(
        config.preset, grid,
        nu=config.nu if nu is None else nu,
        amplitude=config.amplitude,
        charge_amplitude=config.charge_amplitude,
        seed=config.seed,
        n_mean=config.n_mean,
        p_mean=config.p_mean,
        width=config.blob_width,
    )
    # fail fast on charge imbalance; renormalize shifts p to match means
    _, _ = solve_potential(state.n, state.p,
                           renormalize=config.renormalize_charge)
    if config.renormalize_charge:
        from .spectral import mean

        imbalance = mean(state.n) - mean(state.p)
        p_fixed = Field(grid, values=state.p.values + imbalance)
        state = SimState(state.u, state.n, p_fixed, state.t, state.nu)
    return state


def resolve_steps(config: RunConfig, state: SimState):
    """Final (steps, dt) honoring an explicit dt or the CFL bound, with the
    cadence dividing the step count."""
    if config.dt is not None:
        steps = round(config.T / config.dt)
        if steps < 1 or abs(steps * config.dt - config.T) > 1e-9 * config.T:
            raise ConfigError(
                f"field 'dt': {config.dt} does not evenly divide T = {config.T}")
        if steps % config.cadence != 0:
            raise ConfigError(
                f"field 'cadence': {config.cadence} does not divide the "
                f"step count {steps}")
        return steps, config.dt
    dt0 = 0.9 * cfl_limit(state, config.c_cfl)
    steps = max(1, math.ceil(config.T / dt0))
    steps = config.cadence * math.ceil(steps / config.cadence)
    return steps, config.T / steps


def write_trajectory(directory, trajectory: Trajectory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, s in enumerate(trajectory):
        write_snapshot(directory / snapshot_name(i),
                       [*s.u.components, s.n, s.p])
    write_manifest(directory, [s.t for s in trajectory], trajectory[0].nu)


def load_trajectory(directory) -> Trajectory:
    directory = Path(directory)
    times, nu = read_manifest(directory)
    states = []
    for i, t in enumerate(times):
        grid, fields = read_snapshot(directory / snapshot_name(i))
        if len(fields) != grid.d + 2:
            raise EnppError(
                f"snapshot {i} holds {len(fields)} fields, expected {grid.d + 2}")
        u = VectorField(fields[: grid.d])
        states.append(SimState(u, fields[grid.d], fields[grid.d + 1], t, nu))
    return Trajectory(states)


@dataclass
class SimulationResult:
    trajectory: Trajectory
    report: object
    monitor: object
    steps: int
    dt: float

    @property
    def violations(self):
        return self.report.violations


def run_simulation(config: RunConfig, out_dir) -> SimulationResult:
    """Step from 0 to T, writing snapshots, the invariant report CSV and
    returning the in-memory result."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state = build_initial_state(config)
    steps, dt = resolve_steps(config, state)
    trajectory = simulate(state, steps, dt, driver=config.driver,
                          cadence=config.cadence)
    report = invariant_report(trajectory, besov_specs=config.besov_specs,
                              steps_per_sample=config.cadence)
    monitor = blowup_monitor(trajectory)
    write_trajectory(out / "snapshots", trajectory)
    report_to_csv(report, out / "report.csv")
    return SimulationResult(trajectory=trajectory, report=report,
                            monitor=monitor, steps=steps, dt=dt)


def run_iteration(config: RunConfig, out_dir):
    """Iteration mode: repeated linear solves from the configured data."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state = build_initial_state(config, nu=0.0)
    steps, dt = resolve_steps(config, state)
    trajectory, report = picard_solve(
        state.u, state.n, state.p, config.T, dt,
        m_max=config.m_max, tol=config.tol, indices=_indices(config))
    write_trajectory(out / "snapshots", trajectory)
    with open(out / "iterations.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iterate", "energy", "diff", "ratio"])
        for m, energy in enumerate(report.energies):
            diff = report.diffs[m] if m < len(report.diffs) else ""
            ratio = report.ratios[m - 1] if 0 < m <= len(report.ratios) else ""
            writer.writerow([m, repr(float(energy)),
                             repr(float(diff)) if diff != "" else "",
                             repr(float(ratio)) if ratio != "" else ""])
    return trajectory, report


@dataclass
class RateFit:
    """Least-squares power-law fit of sweep errors against viscosity."""

    viscosities: tuple
    err_u: tuple
    err_n: tuple
    err_p: tuple
    err_total: tuple
    slope: float
    intercept: float
    residual: float
    degenerate: bool = False

    def __post_init__(self):
        if len(self.viscosities) < 3:
            raise EnppError("rate fit needs at least three viscosities")
        if any(b >= a for a, b in zip(self.viscosities, self.viscosities[1:])):
            raise EnppError("viscosities must be strictly decreasing")


def _indices(config: RunConfig) -> NormIndices:
    if config.indices is None:
        return NormIndices()
    s1, p1, r1, s2, p2, r2 = config.indices
    return NormIndices(s1=s1, p1=p1, r1=r1, s2=s2, p2=p2, r2=r2)


def _config_digest(config: RunConfig, steps: int, dt: float) -> str:
    parts = [config.d, config.N, config.L, config.preset, config.amplitude,
             config.charge_amplitude, config.seed, config.n_mean,
             config.p_mean, config.blob_width, config.T, config.driver,
             config.cadence, steps, dt]
    return hashlib.sha256(repr(parts).encode()).hexdigest()


def _sweep_errors(config: RunConfig, nu: float, steps: int, dt: float,
                  ref_dir: str):
    """Run one sweep member and measure its distance to the reference."""
    reference = load_trajectory(ref_dir)
    state = build_initial_state(config, nu=nu)
    traj = simulate(state, steps, dt, driver=config.driver,
                    cadence=config.cadence)
    idx = _indices(config)
    spacing = traj.sample_spacing if len(traj) > 1 else dt
    part = get_partition(state.grid)
    du = [a.u - b.u for a, b in zip(traj, reference)]
    dn = [a.n - b.n for a, b in zip(traj, reference)]
    dp = [a.p - b.p for a, b in zip(traj, reference)]
    err_u = timespace_besov_norm(du, spacing, math.inf, idx.velocity_low(), part)
    err_n = timespace_besov_norm(dn, spacing, math.inf, idx.charge(-1.0), part)
    err_p = timespace_besov_norm(dp, spacing, math.inf, idx.charge(-1.0), part)
    return err_u, err_n, err_p


def inviscid_experiment(config: RunConfig, out_dir) -> RateFit:
    """Sweep the viscosity list against a shared inviscid reference run and
    fit the log-log error slope.

    The reference trajectory is cached under ``out_dir/reference`` keyed by
    a digest of the run parameters; re-running with the cache present
    recomputes an identical fit.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    nus = tuple(config.nu_list)
    if len(nus) < 3:
        raise ConfigError("field 'nu_list': need at least three viscosities")

    state0 = build_initial_state(config, nu=0.0)
    steps, dt = resolve_steps(config, state0)
    digest = _config_digest(config, steps, dt)

    ref_dir = out / "reference"
    stamp = ref_dir / "digest.txt"
    if not (stamp.exists() and stamp.read_text().strip() == digest):
        reference = simulate(state0, steps, dt, driver=config.driver,
                             cadence=config.cadence)
        write_trajectory(ref_dir, reference)
        stamp.write_text(digest + "\n")

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_sweep_errors, config, nu, steps, dt,
                                   str(ref_dir)) for nu in nus]
            triplets = [f.result() for f in futures]
    else:
        triplets = [_sweep_errors(config, nu, steps, dt, str(ref_dir))
                    for nu in nus]

    err_u, err_n, err_p = (tuple(t[i] for t in triplets) for i in range(3))
    err_total = tuple(a + b + c for a, b, c in zip(err_u, err_n, err_p))

    degenerate = any(not (e > 0 and math.isfinite(e)) for e in err_total)
    if degenerate:
        slope = intercept = residual = float("nan")
    else:
        x = np.log(np.array(nus))
        y = np.log(np.array(err_total))
        slope, intercept = np.polyfit(x, y, 1)
        residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))

    fit = RateFit(viscosities=nus, err_u=err_u, err_n=err_n, err_p=err_p,
                  err_total=err_total, slope=float(slope),
                  intercept=float(intercept), residual=float(residual),
                  degenerate=degenerate)
    _write_rates(fit, out)
    return fit


def _write_rates(fit: RateFit, out: Path) -> None:
    with open(out / "rates.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["nu", "err_u", "err_n", "err_p", "err_total"])
        for i, nu in enumerate(fit.viscosities):
            writer.writerow([repr(float(nu)), repr(float(fit.err_u[i])),
                             repr(float(fit.err_n[i])), repr(float(fit.err_p[i])),
                             repr(float(fit.err_total[i]))])
    lines = [f"nu = {nu:.6e}  err_total = {err:.12e}"
             for nu, err in zip(fit.viscosities, fit.err_total)]
    if fit.degenerate:
        lines.append("fit: degenerate (zero or nonfinite errors)")
    lines.append(f"slope = {fit.slope:.6f}")
    lines.append(f"intercept = {fit.intercept:.6f}")
    lines.append(f"residual = {fit.residual:.6e}")
    (out / "ratefit.txt").write_text("\n".join(lines) + "\n")
