"""Turn trajectories into monitored time series and CSV reports.

All reductions are pure functions of the trajectory (recomputing yields
bit-identical results) and use the left-endpoint rectangle rule for time
integrals, matching the mixed time-space norms.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as _dc_field

import numpy as np

from .littlewood_paley import besov_norm, get_partition, timespace_besov_norm
from .operators import solve_potential
from .spectral import (
    Field,
    VectorField,
    derivative,
    divergence,
    lp_norm,
    lp_norm_vector,
    mean,
)

__all__ = [
    "ReportThresholds",
    "InvariantReport",
    "BlowupMonitor",
    "BesovTrajectory",
    "invariant_report",
    "report_to_csv",
    "blowup_monitor",
    "besov_trajectory",
    "grad_linf",
]

LP_EXPONENTS = (2, 4)


def grad_linf(u: VectorField) -> float:
    """Grid max of the Frobenius norm of the velocity gradient."""
    total = None
    for i in range(u.grid.d):
        for j in range(u.grid.d):
            sq = derivative(u[j], i).values ** 2
            total = sq if total is None else total + sq
    return float(np.sqrt(total).max())


@dataclass(frozen=True)
class ReportThresholds:
    """Tolerances behind the violation flags."""

    div_rel: float = 1e-8
    mass_rel: float = 1e-10
    positivity_factor: float = 1e-6
    lp_slack_per_step: float = 1e-6
    grad_phi_rel_slack: float = 1e-12


@dataclass
class InvariantReport:
    times: np.ndarray
    div_u: np.ndarray
    min_n: np.ndarray
    min_p: np.ndarray
    mass_n: np.ndarray
    mass_p: np.ndarray
    lp_sums: dict
    grad_phi_l2: np.ndarray
    grad_phi_linf: np.ndarray
    kinetic_energy: np.ndarray
    grad_u_linf: np.ndarray
    sup_u_linf: np.ndarray
    blowup_integral: np.ndarray
    besov: dict
    violations: list = _dc_field(default_factory=list)

    @property
    def first_violation_time(self):
        return self.violations[0][1] if self.violations else None

    @property
    def ok(self) -> bool:
        return not self.violations


def _charge_l2(state) -> float:
    return lp_norm(state.n - state.p, 2.0)


def invariant_report(trajectory, besov_specs=(), thresholds=ReportThresholds(),
                     steps_per_sample: int = 1) -> InvariantReport:
    """Measure every monitored quantity along the trajectory and flag
    breaches of the dynamics invariants (reporting never aborts)."""
    states = list(trajectory)
    times = np.array([s.t for s in states])
    if len(times) > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("sample times must be strictly increasing")
    part = get_partition(states[0].grid) if besov_specs else None

    div_u, min_n, min_p, mass_n, mass_p = [], [], [], [], []
    grad_phi_l2, grad_phi_linf, kinetic, g_linf, u_linf = [], [], [], [], []
    charge_l2 = []
    lp_sums = {a: [] for a in LP_EXPONENTS}
    besov = {(spec, label): [] for spec in besov_specs for label in ("u", "n", "p")}

    for s in states:
        div_u.append(lp_norm(divergence(s.u), 2.0))
        min_n.append(float(s.n.values.min()))
        min_p.append(float(s.p.values.min()))
        mass_n.append(mean(s.n) * s.grid.L**s.grid.d)
        mass_p.append(mean(s.p) * s.grid.L**s.grid.d)
        for a in LP_EXPONENTS:
            lp_sums[a].append(lp_norm(s.n, a) ** a + lp_norm(s.p, a) ** a)
        _, gphi = solve_potential(s.n, s.p, renormalize=True)
        grad_phi_l2.append(lp_norm_vector(gphi, 2.0))
        grad_phi_linf.append(lp_norm_vector(gphi, math.inf))
        charge_l2.append(_charge_l2(s))
        kinetic.append(0.5 * lp_norm_vector(s.u, 2.0) ** 2)
        g_linf.append(grad_linf(s.u))
        u_linf.append(lp_norm_vector(s.u, math.inf))
        for spec in besov_specs:
            besov[(spec, "u")].append(besov_norm(s.u, spec, part))
            besov[(spec, "n")].append(besov_norm(s.n, spec, part))
            besov[(spec, "p")].append(besov_norm(s.p, spec, part))

    integral = np.concatenate(
        [[0.0], np.cumsum(np.asarray(g_linf)[:-1] * np.diff(times))]
    ) if len(times) > 1 else np.zeros(1)

    report = InvariantReport(
        times=times,
        div_u=np.array(div_u),
        min_n=np.array(min_n),
        min_p=np.array(min_p),
        mass_n=np.array(mass_n),
        mass_p=np.array(mass_p),
        lp_sums={a: np.array(v) for a, v in lp_sums.items()},
        grad_phi_l2=np.array(grad_phi_l2),
        grad_phi_linf=np.array(grad_phi_linf),
        kinetic_energy=np.array(kinetic),
        grad_u_linf=np.array(g_linf),
        sup_u_linf=np.maximum.accumulate(np.array(u_linf)),
        blowup_integral=integral,
        besov={k: np.array(v) for k, v in besov.items()},
    )
    _flag_violations(report, states, thresholds, steps_per_sample,
                     np.array(charge_l2))
    return report


def _flag_violations(report, states, th: ReportThresholds,
                     steps_per_sample: int, charge_l2: np.ndarray):
    viol = report.violations
    times = report.times
    u_scale = np.array([max(lp_norm_vector(s.u, 2.0), 1e-300) for s in states])
    for i, t in enumerate(times):
        if report.div_u[i] > th.div_rel * u_scale[i]:
            viol.append(("div_u", float(t),
                         f"|div u| = {report.div_u[i]:.3e} exceeds "
                         f"{th.div_rel:.0e} x {u_scale[i]:.3e}"))

    s0 = states[0]
    rms = {"n": lp_norm(s0.n, 2.0) / s0.grid.L ** (s0.grid.d / 2.0),
           "p": lp_norm(s0.p, 2.0) / s0.grid.L ** (s0.grid.d / 2.0)}
    for label, series in (("n", report.mass_n), ("p", report.mass_p)):
        scale = max(abs(series[0]), rms[label], 1e-300)
        for i, t in enumerate(times):
            if abs(series[i] - series[0]) > th.mass_rel * scale:
                viol.append((f"mass_{label}", float(t),
                             f"mass drifted by {series[i] - series[0]:.3e}"))

    amp0 = max(float(s0.n.values.max()), float(s0.p.values.max()), 0.0)
    nonneg0 = float(s0.n.values.min()) >= 0.0 and float(s0.p.values.min()) >= 0.0
    if nonneg0 and amp0 > 0:
        floor = -th.positivity_factor * amp0
        for label, series in (("min_n", report.min_n), ("min_p", report.min_p)):
            for i, t in enumerate(times):
                if series[i] < floor:
                    viol.append((label, float(t),
                                 f"{label} = {series[i]:.3e} below {floor:.3e}"))

    slack = th.lp_slack_per_step * max(steps_per_sample, 1)
    for a, series in report.lp_sums.items():
        for i in range(1, len(series)):
            if series[i] > series[i - 1] * (1.0 + slack) + 1e-300:
                viol.append((f"lp{a}_sum", float(times[i]),
                             f"increased {series[i - 1]:.6e} -> {series[i]:.6e}"))

    for i, t in enumerate(times):
        bound = charge_l2[i] * (1.0 + th.grad_phi_rel_slack) + 1e-300
        if report.grad_phi_l2[i] > bound:
            viol.append(("grad_phi_l2", float(t),
                         f"{report.grad_phi_l2[i]:.3e} exceeds |n - p| bound "
                         f"{charge_l2[i]:.3e}"))

    viol.sort(key=lambda v: v[1])


def report_to_csv(report: InvariantReport, path) -> None:
    """One row per sample time, one column per metric, RFC 4180 quoting."""
    headers = ["time", "div_u", "min_n", "min_p", "mass_n", "mass_p"]
    headers += [f"lp{a}_sum" for a in LP_EXPONENTS]
    headers += ["grad_phi_l2", "grad_phi_linf", "kinetic_energy",
                "grad_u_linf", "sup_u_linf", "blowup_integral"]
    besov_keys = sorted(report.besov, key=lambda k: (k[1], k[0].s, k[0].p, k[0].r))
    headers += [f"besov_{label}_s{spec.s:g}_p{spec.p:g}_r{spec.r:g}"
                for spec, label in besov_keys]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        for i in range(len(report.times)):
            row = [report.times[i], report.div_u[i], report.min_n[i],
                   report.min_p[i], report.mass_n[i], report.mass_p[i]]
            row += [report.lp_sums[a][i] for a in LP_EXPONENTS]
            row += [report.grad_phi_l2[i], report.grad_phi_linf[i],
                    report.kinetic_energy[i], report.grad_u_linf[i],
                    report.sup_u_linf[i], report.blowup_integral[i]]
            row += [report.besov[k][i] for k in besov_keys]
            writer.writerow([repr(float(x)) for x in row])


@dataclass
class BlowupMonitor:
    """Running continuation-criterion functional along a trajectory."""

    times: np.ndarray
    grad_u_linf: np.ndarray
    integral: np.ndarray
    sup_u_linf: np.ndarray
    threshold: float | None = None

    @property
    def final_integral(self) -> float:
        return float(self.integral[-1])

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.integral))
                    and np.all(np.isfinite(self.sup_u_linf)))

    @property
    def exceeded_at(self):
        if self.threshold is None:
            return None
        over = np.nonzero(self.integral > self.threshold)[0]
        return float(self.times[over[0]]) if len(over) else None


def blowup_monitor(trajectory, threshold: float | None = None) -> BlowupMonitor:
    """Accumulate ``int ||grad u||_inf dt`` (left rectangle rule) and the
    running sup of ``||u||_inf``; both branches of the continuation
    criterion are reported."""
    states = list(trajectory)
    if not states:
        raise ValueError("trajectory must be nonempty")
    times = np.array([s.t for s in states])
    g = np.array([grad_linf(s.u) for s in states])
    u_inf = np.maximum.accumulate(
        np.array([lp_norm_vector(s.u, math.inf) for s in states]))
    if len(times) > 1:
        integral = np.concatenate([[0.0], np.cumsum(g[:-1] * np.diff(times))])
    else:
        integral = np.zeros(1)
    return BlowupMonitor(times=times, grad_u_linf=g, integral=integral,
                         sup_u_linf=u_inf, threshold=threshold)


@dataclass
class BesovTrajectory:
    times: np.ndarray
    rho: float
    series: dict
    aggregates: dict


def besov_trajectory(trajectory, specs, rho: float) -> BesovTrajectory:
    """Instantaneous Besov norms per spec and field plus the mixed
    time-space aggregate at exponent ``rho``."""
    specs = list(specs)
    if not specs:
        raise ValueError("need at least one Besov spec")
    states = list(trajectory)
    part = get_partition(states[0].grid)
    times = np.array([s.t for s in states])
    dt = float(times[1] - times[0]) if len(times) > 1 else 1.0

    series = {}
    aggregates = {}
    for spec in specs:
        for label, extract in (("u", lambda s: s.u), ("n", lambda s: s.n),
                               ("p", lambda s: s.p)):
            fields = [extract(s) for s in states]
            series[(spec, label)] = np.array(
                [besov_norm(f, spec, part) for f in fields])
            aggregates[(spec, label)] = timespace_besov_norm(
                fields, dt, rho, spec, part)
    return BesovTrajectory(times=times, rho=rho, series=series,
                           aggregates=aggregates)
