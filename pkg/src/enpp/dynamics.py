"""Time evolution of the coupled velocity / charge-transport system.

Two equivalent right-hand-side assemblies are provided: ``rhs_enpp`` keeps
the original form (advection, Lorentz force ``(n - p) grad phi``, Leray
projection of the momentum tendency) and ``rhs_modified`` the
paraproduct-split form whose momentum equation closes through the
pressure-encoding bilinear operator. Time integration treats diffusion
exactly in Fourier space (integrating factor) and advances the remaining
terms with Heun's two-stage scheme, giving second order overall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CflError, EnppError
from .littlewood_paley import (
    BesovSpec,
    DyadicPartition,
    besov_norm,
    get_partition,
    timespace_besov_norm,
)
from .operators import (
    advect,
    grad_inv_laplacian,
    leray_project,
    paraproduct,
    pi_bilinear,
    remainder,
    solve_potential,
)
from .spectral import (
    Field,
    VectorField,
    apply_multiplier,
    derivative,
    divergence,
    laplacian,
    lp_norm,
    lp_norm_vector,
    product,
)

__all__ = [
    "SimState",
    "Tendencies",
    "Trajectory",
    "IterationReport",
    "NormIndices",
    "rhs_enpp",
    "rhs_modified",
    "step",
    "simulate",
    "cfl_limit",
    "heat_propagate",
    "picard_solve",
    "lifespan_lower_bound",
]


@dataclass(frozen=True)
class SimState:
    """Velocity, charge densities, time and viscosity of one snapshot."""

    u: VectorField
    n: Field
    p: Field
    t: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        g = self.u.grid
        if self.n.grid != g or self.p.grid != g:
            raise EnppError("state fields live on different grids")
        if self.nu < 0:
            raise EnppError(f"viscosity must be nonnegative, got {self.nu}")

    @property
    def grid(self):
        return self.u.grid


@dataclass(frozen=True)
class Tendencies:
    du: VectorField
    dn: Field
    dp: Field


@dataclass
class Trajectory:
    """Uniformly sampled sequence of states."""

    states: list

    def __post_init__(self):
        if not self.states:
            raise EnppError("trajectory must be nonempty")

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def sample_spacing(self) -> float:
        ts = self.times
        if len(ts) < 2:
            return 0.0
        gaps = np.diff(ts)
        if not np.allclose(gaps, gaps[0], rtol=1e-9, atol=1e-12):
            raise EnppError("trajectory samples are not uniformly spaced")
        return float(gaps[0])

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __iter__(self):
        return iter(self.states)


def _lorentz_force(n: Field, p: Field):
    """Charge force ``(n - p) grad phi`` and the potential gradient."""
    phi, grad_phi = solve_potential(n, p)
    charge = n - p
    force = VectorField([product(charge, grad_phi[i]) for i in range(n.grid.d)])
    return force, grad_phi


def _nonstiff_enpp(state: SimState) -> Tendencies:
    u, n, p = state.u, state.n, state.p
    d = state.grid.d
    force, grad_phi = _lorentz_force(n, p)
    du = leray_project(-advect(u, u) + force)
    dn = -_scalar_advection(u, n) - divergence(
        VectorField([product(n, grad_phi[i]) for i in range(d)]))
    dp = -_scalar_advection(u, p) + divergence(
        VectorField([product(p, grad_phi[i]) for i in range(d)]))
    return Tendencies(du, dn, dp)


def _scalar_advection(u: VectorField, f: Field) -> Field:
    out = product(u[0], derivative(f, 0))
    for m in range(1, u.grid.d):
        out = out + product(u[m], derivative(f, m))
    return out


def rhs_enpp(state: SimState) -> Tendencies:
    """Full tendencies of the original system, diffusion included."""
    base = _nonstiff_enpp(state)
    du = VectorField([base.du[i] + state.nu * laplacian(state.u[i])
                      for i in range(state.grid.d)])
    return Tendencies(du, base.dn + laplacian(state.n), base.dp + laplacian(state.p))


def _transport_pieces(u: VectorField, f: Field, part: DyadicPartition):
    """Paraproduct splitting of ``u . grad f`` in divergence-remainder form:
    ``T_u grad f + T_{grad f} u + div R(u f)``."""
    d = u.grid.d
    para_low = None
    para_high = None
    rem_div = None
    for i in range(d):
        dfi = derivative(f, i)
        t1 = paraproduct(u[i], dfi, part)
        t2 = paraproduct(dfi, u[i], part)
        t3 = derivative(remainder(u[i], f, part), i)
        para_low = t1 if para_low is None else para_low + t1
        para_high = t2 if para_high is None else para_high + t2
        rem_div = t3 if rem_div is None else rem_div + t3
    return para_low, para_high, rem_div


def _nonstiff_modified(state: SimState, part: DyadicPartition):
    u, n, p = state.u, state.n, state.p
    d = state.grid.d
    phi, psi = solve_potential(n, p)
    charge = n - p
    force = leray_project(
        VectorField([product(charge, psi[i]) for i in range(d)]))
    pi_uu = pi_bilinear(u, u, part)
    du = -advect(u, u) - pi_uu + force

    pieces = {"pi": pi_uu, "force": force, "psi": psi}
    tends = {}
    for label, f, sign in (("n", n, -1.0), ("p", p, +1.0)):
        para_low, para_high, rem_div = _transport_pieces(u, f, part)
        electro = divergence(VectorField([product(f, psi[i]) for i in range(d)]))
        tends[label] = -(para_low + para_high + rem_div) + sign * electro
        pieces[f"paraproduct_low_{label}"] = para_low
        pieces[f"paraproduct_high_{label}"] = para_high
        pieces[f"remainder_div_{label}"] = rem_div
        pieces[f"electro_div_{label}"] = electro
    return Tendencies(du, tends["n"], tends["p"]), pieces


def rhs_modified(state: SimState):
    """Tendencies of the paraproduct-split system plus its pieces.

    Returns ``(Tendencies, pieces)`` where ``pieces`` maps names of the
    individual paraproduct / remainder / electro terms to fields for
    inspection. Viscous and diffusive terms are included in the tendencies.
    """
    part = get_partition(state.grid)
    base, pieces = _nonstiff_modified(state, part)
    du = VectorField([base.du[i] + state.nu * laplacian(state.u[i])
                      for i in range(state.grid.d)])
    return (
        Tendencies(du, base.dn + laplacian(state.n), base.dp + laplacian(state.p)),
        pieces,
    )


def _nonstiff(state: SimState, driver: str) -> Tendencies:
    if driver == "enpp":
        return _nonstiff_enpp(state)
    if driver == "modified":
        return _nonstiff_modified(state, get_partition(state.grid))[0]
    raise ValueError(f"unknown driver {driver!r}")


def cfl_limit(state: SimState, c_cfl: float = 0.5) -> float:
    """Advective timestep bound ``c_cfl * (L/N) / max(|u|_inf, 1)``."""
    umax = lp_norm_vector(state.u, math.inf)
    return c_cfl * state.grid.spacing / max(umax, 1.0)


def heat_propagate(f: Field, t: float) -> Field:
    """Exact heat semigroup: multiplier ``exp(-t |k|^2)``."""
    if t < 0:
        raise ValueError(f"heat propagation time must be nonnegative, got {t}")
    return apply_multiplier(f, np.exp(-t * f.grid.k_sq))


def step(state: SimState, dt: float, driver: str = "enpp",
         c_cfl: float = 0.5) -> SimState:
    """Advance one step: exact diffusion via integrating factor, Heun for
    the rest, dealiasing inside every product, Leray projection re-applied
    at the end."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    limit = cfl_limit(state, c_cfl)
    if dt > limit * (1.0 + 1e-12):
        raise CflError(f"dt = {dt:.3e} exceeds CFL bound {limit:.3e}")

    g = state.grid
    e_u = np.exp(-state.nu * dt * g.k_sq)
    e_s = np.exp(-dt * g.k_sq)

    k1 = _nonstiff(state, driver)
    u_star = VectorField(
        [apply_multiplier(state.u[i] + dt * k1.du[i], e_u) for i in range(g.d)])
    n_star = apply_multiplier(state.n + dt * k1.dn, e_s)
    p_star = apply_multiplier(state.p + dt * k1.dp, e_s)
    mid = SimState(u_star, n_star, p_star, state.t + dt, state.nu)
    k2 = _nonstiff(mid, driver)

    half = 0.5 * dt
    u_new = VectorField([
        apply_multiplier(state.u[i], e_u)
        + half * (apply_multiplier(k1.du[i], e_u) + k2.du[i])
        for i in range(g.d)])
    n_new = apply_multiplier(state.n, e_s) + half * (
        apply_multiplier(k1.dn, e_s) + k2.dn)
    p_new = apply_multiplier(state.p, e_s) + half * (
        apply_multiplier(k1.dp, e_s) + k2.dp)
    return SimState(leray_project(u_new), n_new, p_new, state.t + dt, state.nu)


def simulate(state: SimState, steps: int, dt: float, driver: str = "enpp",
             cadence: int = 1) -> Trajectory:
    """Run ``steps`` steps, recording the initial state and every
    ``cadence``-th step thereafter (``cadence`` must divide ``steps``)."""
    if steps <= 0:
        raise ValueError(f"steps must be positive, got {steps}")
    if cadence <= 0 or steps % cadence != 0:
        raise ValueError(
            f"cadence must be positive and divide steps ({cadence} vs {steps})")
    samples = [state]
    current = state
    for i in range(1, steps + 1):
        current = step(current, dt, driver=driver)
        if i % cadence == 0:
            samples.append(current)
    return Trajectory(samples)


# ---------------------------------------------------------------------------
# Iteration scheme: solve a linear transport-diffusion system per iterate,
# coefficients frozen from the previous iterate's stored trajectory.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormIndices:
    """Besov measurement indices for the iteration energies.

    Defaults: velocity measured in (2.6, 2, 2), charges in (1.6, 2, 2);
    the contraction norm for the velocity drops one derivative.
    """

    s1: float = 2.6
    p1: float = 2.0
    r1: float = 2.0
    s2: float = 1.6
    p2: float = 2.0
    r2: float = 2.0

    @property
    def s1_prime(self) -> float:
        return self.s1 - 1.0

    def velocity(self) -> BesovSpec:
        return BesovSpec(self.s1, self.p1, self.r1)

    def velocity_low(self) -> BesovSpec:
        return BesovSpec(self.s1_prime, self.p1, self.r1)

    def charge(self, shift: float = 0.0) -> BesovSpec:
        return BesovSpec(self.s2 + shift, self.p2, self.r2)


@dataclass
class IterationReport:
    energies: list
    diffs: list
    ratios: list
    converged: bool
    iterations: int
    non_contraction: bool


@dataclass(frozen=True)
class _Frozen:
    u_adv: VectorField
    src_u: VectorField
    src_n: Field
    src_p: Field


def _freeze(sample: SimState, part: DyadicPartition) -> _Frozen:
    u, n, p = sample.u, sample.n, sample.p
    d = sample.grid.d
    phi, psi = solve_potential(n, p)
    charge = n - p
    force = leray_project(
        VectorField([product(charge, psi[i]) for i in range(d)]))
    src_u = force - pi_bilinear(u, u, part)
    sources = {}
    for label, f, sign in (("n", n, -1.0), ("p", p, +1.0)):
        para_low, para_high, rem_div = _transport_pieces(u, f, part)
        electro = divergence(VectorField([product(f, psi[i]) for i in range(d)]))
        sources[label] = -(para_low + para_high + rem_div) + sign * electro
    return _Frozen(u_adv=u, src_u=src_u, src_n=sources["n"], src_p=sources["p"])


def _linear_step(y: SimState, dt: float, c0: _Frozen, c1: _Frozen,
                 e_s: np.ndarray) -> SimState:
    g = y.grid
    k1u = -advect(c0.u_adv, y.u) + c0.src_u
    u_star = VectorField([y.u[i] + dt * k1u[i] for i in range(g.d)])
    k2u = -advect(c1.u_adv, u_star) + c1.src_u
    u_new = VectorField(
        [y.u[i] + 0.5 * dt * (k1u[i] + k2u[i]) for i in range(g.d)])
    u_new = leray_project(u_new)

    n_new = apply_multiplier(y.n, e_s) + 0.5 * dt * (
        apply_multiplier(c0.src_n, e_s) + c1.src_n)
    p_new = apply_multiplier(y.p, e_s) + 0.5 * dt * (
        apply_multiplier(c0.src_p, e_s) + c1.src_p)
    return SimState(u_new, n_new, p_new, y.t + dt, y.nu)


def _pair_norm(series, dt: float, spec_sup: BesovSpec, spec_int: BesovSpec,
               part: DyadicPartition) -> float:
    """Intersection-space norm: max of the sup-in-time and the L^1-in-time
    mixed norms."""
    sup = timespace_besov_norm(series, dt, math.inf, spec_sup, part)
    bar = timespace_besov_norm(series, dt, 1.0, spec_int, part)
    return max(sup, bar)


def _energy(traj: Trajectory, dt: float, idx: NormIndices,
            part: DyadicPartition) -> float:
    u_series = [s.u for s in traj]
    return (
        timespace_besov_norm(u_series, dt, math.inf, idx.velocity(), part)
        + _pair_norm([s.n for s in traj], dt, idx.charge(), idx.charge(2.0), part)
        + _pair_norm([s.p for s in traj], dt, idx.charge(), idx.charge(2.0), part)
    )


def _difference(a: Trajectory, b: Trajectory, dt: float, idx: NormIndices,
                part: DyadicPartition) -> float:
    du = [sa.u - sb.u for sa, sb in zip(a, b)]
    dn = [sa.n - sb.n for sa, sb in zip(a, b)]
    dp = [sa.p - sb.p for sa, sb in zip(a, b)]
    return (
        timespace_besov_norm(du, dt, math.inf, idx.velocity_low(), part)
        + _pair_norm(dn, dt, idx.charge(-1.0), idx.charge(1.0), part)
        + _pair_norm(dp, dt, idx.charge(-1.0), idx.charge(1.0), part)
    )


def contraction_flags(diffs) -> bool:
    """True when the difference sequence fails to contract for three
    consecutive ratios."""
    run = 0
    for prev, cur in zip(diffs, diffs[1:]):
        if prev > 0 and cur / prev >= 1.0:
            run += 1
            if run >= 3:
                return True
        else:
            run = 0
    return False


def picard_solve(u0: VectorField, n0: Field, p0: Field, T: float, dt: float,
                 m_max: int = 10, tol: float = 1e-6,
                 indices: NormIndices = NormIndices()):
    """Fixed-point construction of the solution by repeated linear solves.

    Iterate 0 is the initial velocity held constant in time alongside the
    heat flow of the charges; iterate m+1 integrates the linear system whose
    advecting velocity and all source terms are frozen from iterate m's
    stored trajectory (evaluated at each stage's sample). Stops when the
    successive-difference norm drops below ``tol`` or after ``m_max``
    solves. Non-contraction is reported, not fatal.
    """
    if T <= 0 or dt <= 0:
        raise ValueError("T and dt must be positive")
    g = u0.grid
    part = get_partition(g)
    div0 = lp_norm(divergence(u0), 2.0)
    scale0 = max(lp_norm_vector(u0, 2.0), 1e-300)
    if div0 > 1e-8 * scale0:
        raise EnppError(f"initial velocity is not solenoidal (|div| = {div0:.3e})")
    solve_potential(n0, p0)  # electroneutrality check up front

    steps = max(1, round(T / dt))
    dt = T / steps
    e_s = np.exp(-dt * g.k_sq)
    times = [i * dt for i in range(steps + 1)]

    base = [SimState(u0, heat_propagate(n0, t), heat_propagate(p0, t), t, 0.0)
            for t in times]
    current = Trajectory(base)

    energies = [_energy(current, dt, indices, part)]
    diffs = []
    ratios = []
    converged = False
    iterations = 0

    for _ in range(m_max):
        frozen = [None] * (steps + 1)
        frozen[0] = _freeze(current[0], part)
        y = SimState(u0, n0, p0, 0.0, 0.0)
        new_states = [y]
        for i in range(steps):
            if frozen[i + 1] is None:
                frozen[i + 1] = _freeze(current[i + 1], part)
            y = _linear_step(y, dt, frozen[i], frozen[i + 1], e_s)
            new_states.append(y)
        new = Trajectory(new_states)
        iterations += 1

        f_m = _difference(new, current, dt, indices, part)
        diffs.append(f_m)
        if len(diffs) >= 2 and diffs[-2] > 0:
            ratios.append(diffs[-1] / diffs[-2])
        energies.append(_energy(new, dt, indices, part))
        current = new
        if f_m < tol:
            converged = True
            break

    report = IterationReport(
        energies=energies,
        diffs=diffs,
        ratios=ratios,
        converged=converged,
        iterations=iterations,
        non_contraction=contraction_flags(diffs),
    )
    return current, report


def lifespan_lower_bound(u0: VectorField, n0: Field, p0: Field, c: float,
                         r: float, indices: NormIndices = NormIndices()) -> float:
    """Guaranteed-existence time ``c / (1 + E0^r)`` with ``E0`` the sum of
    the initial Besov norms in the configured indices."""
    if c <= 0:
        raise ValueError(f"constant c must be positive, got {c}")
    if r < 4:
        raise ValueError(f"exponent r must be at least 4, got {r}")
    part = get_partition(u0.grid)
    e0 = (
        besov_norm(u0, indices.velocity(), part)
        + besov_norm(n0, indices.charge(), part)
        + besov_norm(p0, indices.charge(), part)
    )
    return c / (1.0 + e0**r)
