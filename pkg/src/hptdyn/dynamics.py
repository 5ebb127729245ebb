"""Replicator dynamics over heuristic payoff tables.

A strategy's share grows in proportion to its fitness advantage over its
population's average: dx_i/dt = (f_i - x.f) * x_i, with the fitness vector
coming from the exact table formulas (or the legacy baseline for
comparisons).  This module evaluates the vector field on batches of states,
integrates trajectories with a fixed-step classical 4th-order scheme,
samples direction fields on plot lattices, and locates/classifies stationary
points with a damped Newton search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .legacy import decompose_asymmetric
from .payoff import ensure_valid
from .tables import (
    AsymmetricHpt,
    Hpt,
    SymmetricHpt,
    UnsupportedShapeError,
    as_profile,
    co_player_multinomial,
    compositions,
    multinomial,
)

State = tuple[np.ndarray, ...]

RESIDUAL_TOL = 1e-9
DEDUP_TOL = 1e-4
STABILITY_TOL = 1e-6
JACOBIAN_EPS = 1e-6
DRIFT_TOL = 1e-12


class IntegrationError(RuntimeError):
    """Trajectory integration hit a non-finite state."""


def rd_velocity_single(x, fitness) -> np.ndarray:
    """Single-population replicator velocity: v_i = (f_i - x.f) * x_i."""
    x = np.asarray(x, dtype=float)
    f = np.asarray(fitness, dtype=float)
    average = float(x @ f)
    return (f - average) * x


def rd_velocity_two(x, y, fitness1, fitness2) -> tuple[np.ndarray, np.ndarray]:
    """Two-population replicator velocities, one selection equation per side."""
    return rd_velocity_single(x, fitness1), rd_velocity_single(y, fitness2)


def _batch_velocity(xb: np.ndarray, fb: np.ndarray) -> np.ndarray:
    average = np.sum(xb * fb, axis=-1, keepdims=True)
    return (fb - average) * xb


def _compile_symmetric_fitness(table: SymmetricHpt) -> Callable[[np.ndarray], np.ndarray]:
    """Precompute exponent/weight stacks so fitness is a few array ops per call."""
    k = table.strategies
    exponents = []
    weights = []
    selector_rows = []
    for i in range(k):
        for j in range(table.num_rows):
            if table.counts[j, i] == 0:
                continue
            e = table.counts[j].copy()
            e[i] -= 1
            exponents.append(e)
            weights.append(co_player_multinomial(table.counts[j], i, table.players)
                           * table.payoffs[j, i])
            selector_rows.append(i)
    e_all = np.array(exponents, dtype=np.int64)
    w_all = np.array(weights, dtype=float)
    select = np.zeros((len(selector_rows), k))
    for r, i in enumerate(selector_rows):
        select[r, i] = 1.0

    def fitness(xb: np.ndarray) -> np.ndarray:
        p = np.prod(np.power(xb[..., None, :], e_all), axis=-1)
        return (p * w_all) @ select

    return fitness


def _compile_asymmetric_fitness(table: AsymmetricHpt, population: int) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    k = table.strategies
    own_counts = table.counts1 if population == 1 else table.counts2
    other_counts = table.counts2 if population == 1 else table.counts1
    payoffs = table.payoffs1 if population == 1 else table.payoffs2
    own_total = table.pop1_players if population == 1 else table.pop2_players
    exponents_own = []
    exponents_other = []
    weights = []
    selector_rows = []
    for i in range(k):
        for j in range(table.num_rows):
            if own_counts[j, i] == 0:
                continue
            e = own_counts[j].copy()
            e[i] -= 1
            exponents_own.append(e)
            exponents_other.append(other_counts[j])
            weights.append(co_player_multinomial(own_counts[j], i, own_total)
                           * multinomial(other_counts[j])
                           * payoffs[j, i])
            selector_rows.append(i)
    e_own = np.array(exponents_own, dtype=np.int64)
    e_other = np.array(exponents_other, dtype=np.int64)
    w_all = np.array(weights, dtype=float)
    select = np.zeros((len(selector_rows), k))
    for r, i in enumerate(selector_rows):
        select[r, i] = 1.0

    def fitness(own_b: np.ndarray, other_b: np.ndarray) -> np.ndarray:
        p = (np.prod(np.power(own_b[..., None, :], e_own), axis=-1)
             * np.prod(np.power(other_b[..., None, :], e_other), axis=-1))
        return (p * w_all) @ select

    return fitness


def _compile_legacy_fitness(table: SymmetricHpt) -> Callable[[np.ndarray], np.ndarray]:
    """Legacy fitness, batch form; degenerate components (x_i = 0) evaluate to 0."""
    n = table.players
    coeffs = np.array([multinomial(table.counts[j], n) for j in range(table.num_rows)], dtype=float)
    counts = table.counts.astype(np.int64)
    payoffs = np.asarray(table.payoffs)

    def fitness(xb: np.ndarray) -> np.ndarray:
        p = coeffs * np.prod(np.power(xb[..., None, :], counts), axis=-1)
        numerator = p @ payoffs
        denominator = 1.0 - (1.0 - xb) ** n
        return np.divide(numerator, denominator,
                         out=np.zeros_like(numerator), where=denominator != 0.0)

    return fitness


@dataclass
class ReplicatorField:
    """Velocity field of the replicator dynamics for one table and method.

    `velocity` accepts per-population arrays with any broadcastable leading
    batch shape and returns matching arrays; evaluations are independent
    across batch entries.
    """

    table: Hpt
    method: str
    populations: int
    strategies: int
    _fitness: Callable[..., tuple[np.ndarray, ...]]

    def fitness(self, state: Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
        return self._fitness(*state)

    def velocity(self, state: Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
        fits = self._fitness(*state)
        return tuple(_batch_velocity(np.asarray(x, dtype=float), f)
                     for x, f in zip(state, fits))


def make_field(table: Hpt, method: str = "ours") -> ReplicatorField:
    """Build the replicator field for a table under the exact or legacy formulas."""
    if method not in ("ours", "legacy"):
        raise ValueError(f"method must be 'ours' or 'legacy', got {method!r}")
    ensure_valid(table)
    if isinstance(table, SymmetricHpt):
        fit = (_compile_symmetric_fitness(table) if method == "ours"
               else _compile_legacy_fitness(table))

        def fitness_single(x):
            return (fit(np.asarray(x, dtype=float)),)

        return ReplicatorField(table, method, 1, table.strategies, fitness_single)

    if isinstance(table, AsymmetricHpt):
        if method == "ours":
            fit1 = _compile_asymmetric_fitness(table, 1)
            fit2 = _compile_asymmetric_fitness(table, 2)

            def fitness_pair(x, y):
                x = np.asarray(x, dtype=float)
                y = np.asarray(y, dtype=float)
                return fit1(x, y), fit2(y, x)

            return ReplicatorField(table, method, 2, table.strategies, fitness_pair)

        if table.pop1_players != 1 or table.pop2_players != 1:
            raise UnsupportedShapeError(
                "the legacy pipeline cannot handle multiplayer two-population tables"
                " (no decomposition rule exists beyond 1-vs-1)")
        pair = decompose_asymmetric(table)
        leg1 = _compile_legacy_fitness(pair.pop1_table)
        leg2 = _compile_legacy_fitness(pair.pop2_table)

        def fitness_selfplay(x, y):
            return leg1(np.asarray(x, dtype=float)), leg2(np.asarray(y, dtype=float))

        return ReplicatorField(table, method, 2, table.strategies, fitness_selfplay)

    raise TypeError(f"not an HPT: {type(table)!r}")


def _as_field(table_or_field, method: str) -> ReplicatorField:
    if isinstance(table_or_field, ReplicatorField):
        return table_or_field
    return make_field(table_or_field, method)


def _normalize_state(field: ReplicatorField, initial) -> State:
    if isinstance(initial, np.ndarray) and initial.ndim == 1:
        initial = (initial,)
    elif isinstance(initial, Sequence) and initial and np.isscalar(initial[0]):
        initial = (np.asarray(initial, dtype=float),)
    components = tuple(np.asarray(c, dtype=float) for c in initial)
    if len(components) != field.populations:
        raise ValueError(f"state needs {field.populations} population profile(s),"
                         f" got {len(components)}")
    return tuple(as_profile(c, field.strategies).copy() for c in components)


@dataclass
class Trajectory:
    """Uniformly sampled solution of the replicator ODE.

    `components[p][s]` is population p's profile at sample s; times are
    0, step, 2*step, ...  `max_raw_drift` is the largest |sum - 1| any raw
    integration step produced before the simplex projection corrected it.
    """

    step: float
    times: np.ndarray
    components: tuple[np.ndarray, ...]
    max_raw_drift: float = 0.0

    @property
    def num_samples(self) -> int:
        return self.times.shape[0]

    def state_at(self, index: int) -> State:
        return tuple(c[index] for c in self.components)

    def final_state(self) -> State:
        return self.state_at(-1)


def _rk4_step(field: ReplicatorField, state: State, h: float) -> State:
    k1 = field.velocity(state)
    s2 = tuple(x + 0.5 * h * k for x, k in zip(state, k1))
    k2 = field.velocity(s2)
    s3 = tuple(x + 0.5 * h * k for x, k in zip(state, k2))
    k3 = field.velocity(s3)
    s4 = tuple(x + h * k for x, k in zip(state, k3))
    k4 = field.velocity(s4)
    return tuple(x + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
                 for x, a, b, c, d in zip(state, k1, k2, k3, k4))


def _project_simplex(x: np.ndarray) -> np.ndarray:
    """Clip to [0, 1] and renormalize only when the sum drifts measurably.

    Exact zeros are preserved: clipping keeps them, and renormalization
    divides them by a positive sum.
    """
    x = np.clip(x, 0.0, 1.0)
    s = np.sum(x, axis=-1, keepdims=True)
    needs = np.abs(s - 1.0) > DRIFT_TOL
    if np.any(needs):
        x = np.where(needs, x / s, x)
    return x


def integrate_trajectory(table_or_field, initial, horizon: float, step: float = 0.01,
                         method: str = "ours") -> Trajectory:
    """Fixed-step classical 4th-order integration of the replicator field.

    After each step, components are clipped to [0, 1] and renormalized if the
    simplex sum drifts beyond 1e-12; coordinates that start exactly at 0 stay
    exactly 0 (simplex faces are invariant).
    """
    if not 0.0 < step <= 0.1:
        raise ValueError(f"step must be in (0, 0.1], got {step}")
    if horizon < step:
        raise ValueError(f"horizon {horizon} shorter than one step {step}")
    field = _as_field(table_or_field, method)
    state = _normalize_state(field, initial)
    n_steps = int(round(horizon / step))
    samples = tuple(np.empty((n_steps + 1, field.strategies)) for _ in state)
    for arr, comp in zip(samples, state):
        arr[0] = comp
    max_raw_drift = 0.0
    for s in range(1, n_steps + 1):
        state = _rk4_step(field, state, step)
        for comp in state:
            max_raw_drift = max(max_raw_drift, abs(float(comp.sum()) - 1.0))
        state = tuple(_project_simplex(x) for x in state)
        for comp in state:
            if not np.all(np.isfinite(comp)):
                raise IntegrationError(
                    f"non-finite state at step {s} (t={s * step:.6g}): {comp.tolist()}")
        for arr, comp in zip(samples, state):
            arr[s] = comp
    times = np.arange(n_steps + 1) * step
    return Trajectory(step, times, samples, max_raw_drift)


def integrate_final_states(table_or_field, initials: Sequence, horizon: float,
                           step: float = 0.01, method: str = "ours") -> tuple[np.ndarray, ...]:
    """Integrate a batch of starts at once, returning only the final states.

    `initials` holds one (batch, k) array per population; evaluations across
    the batch are independent, so this matches running integrate_trajectory
    per start while sharing the array work.
    """
    if not 0.0 < step <= 0.1:
        raise ValueError(f"step must be in (0, 0.1], got {step}")
    if horizon < step:
        raise ValueError(f"horizon {horizon} shorter than one step {step}")
    field = _as_field(table_or_field, method)
    state = tuple(np.array(c, dtype=float) for c in initials)
    if len(state) != field.populations:
        raise ValueError(f"need {field.populations} batched components")
    n_steps = int(round(horizon / step))
    for s in range(n_steps):
        state = _rk4_step(field, state, step)
        state = tuple(_project_simplex(x) for x in state)
        for comp in state:
            if not np.all(np.isfinite(comp)):
                raise IntegrationError(f"non-finite state at step {s + 1}")
    return state


@dataclass
class DirectionField:
    """Replicator velocities sampled on a plot lattice, in plot coordinates."""

    axes: tuple[str, ...]
    states: np.ndarray
    velocities: np.ndarray
    resolution: int

    @property
    def num_points(self) -> int:
        return self.states.shape[0]


def direction_field(table_or_field, resolution: int, method: str = "ours") -> DirectionField:
    """Sample the field on the unit-square lattice (two populations, two
    strategies each), the 1-simplex (one population, two strategies), or the
    triangular 2-simplex lattice (one population, three strategies)."""
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    field = _as_field(table_or_field, method)
    k = field.strategies
    ticks = np.linspace(0.0, 1.0, resolution)
    if field.populations == 2:
        if k != 2:
            raise UnsupportedShapeError(
                "direction fields for two populations are drawable only with 2 strategies"
                " per side (unit-square parametrization)")
        uu, vv = np.meshgrid(ticks, ticks, indexing="ij")
        u = uu.ravel()
        v = vv.ravel()
        x = np.stack([u, 1.0 - u], axis=-1)
        y = np.stack([v, 1.0 - v], axis=-1)
        vx, vy = field.velocity((x, y))
        states = np.stack([u, v], axis=-1)
        velocities = np.stack([vx[:, 0], vy[:, 0]], axis=-1)
        return DirectionField(("x1", "y1"), states, velocities, resolution)
    if k == 2:
        x = np.stack([ticks, 1.0 - ticks], axis=-1)
        (vx,) = field.velocity((x,))
        return DirectionField(("x1",), ticks[:, None], vx[:, :1], resolution)
    if k == 3:
        pts = []
        denom = resolution - 1
        for a in range(resolution):
            for b in range(resolution - a):
                pts.append((a / denom, b / denom, (denom - a - b) / denom))
        x = np.array(pts)
        (vx,) = field.velocity((x,))
        return DirectionField(("x1", "x2", "x3"), x, vx, resolution)
    raise UnsupportedShapeError(
        "direction fields are drawable for single populations with 2 or 3 strategies"
        " or two populations with 2 strategies each")


@dataclass
class Equilibrium:
    """Stationary point of the field with its linearized classification."""

    components: tuple[np.ndarray, ...]
    residual: float
    classification: str
    eigenvalues: np.ndarray

    @property
    def real_parts(self) -> list[float]:
        return [float(v) for v in np.real(self.eigenvalues)]


@dataclass
class EquilibriumSearch:
    equilibria: list[Equilibrium]
    seeds_total: int = 0
    seeds_converged: int = 0
    seeds_dropped: int = 0


def _reduced_to_state(field: ReplicatorField, u: np.ndarray) -> State:
    k = field.strategies
    comps = []
    offset = 0
    for _ in range(field.populations):
        head = u[offset:offset + k - 1]
        comps.append(np.concatenate([head, [1.0 - float(np.sum(head))]]))
        offset += k - 1
    return tuple(comps)


def _state_to_reduced(state: State) -> np.ndarray:
    return np.concatenate([c[:-1] for c in state])


def _reduced_velocity(field: ReplicatorField, u: np.ndarray) -> np.ndarray:
    vel = field.velocity(_reduced_to_state(field, u))
    return np.concatenate([v[:-1] for v in vel])


def _full_residual(field: ReplicatorField, state: State) -> float:
    vel = field.velocity(state)
    return max(float(np.max(np.abs(v))) for v in vel)


def _fd_jacobian(func: Callable[[np.ndarray], np.ndarray], u: np.ndarray,
                 eps: float = JACOBIAN_EPS) -> np.ndarray:
    f0 = func(u)
    dim = u.shape[0]
    jac = np.empty((f0.shape[0], dim))
    for c in range(dim):
        up = u.copy()
        up[c] += eps
        um = u.copy()
        um[c] -= eps
        jac[:, c] = (func(up) - func(um)) / (2.0 * eps)
    return jac


def _classify(field: ReplicatorField, u: np.ndarray,
              stability_tol: float) -> tuple[str, np.ndarray]:
    jac = _fd_jacobian(lambda w: _reduced_velocity(field, w), u)
    eigenvalues = np.linalg.eigvals(jac)
    real = eigenvalues.real
    if np.all(real < -stability_tol):
        return "stable", eigenvalues
    if np.all(real > stability_tol):
        return "unstable", eigenvalues
    if np.any(real < -stability_tol) and np.any(real > stability_tol):
        return "saddle", eigenvalues
    return "inconclusive", eigenvalues


def default_seed_grid(field: ReplicatorField, grid: int = 11) -> list[State]:
    """Uniform lattice over each population's simplex, combined across
    populations; includes every vertex."""
    k = field.strategies
    per_pop = [np.array(c, dtype=float) / (grid - 1) for c in compositions(grid - 1, k)]
    seeds: list[State] = []

    def build(prefix: list[np.ndarray], pop: int):
        if pop == field.populations:
            seeds.append(tuple(np.array(p) for p in prefix))
            return
        for point in per_pop:
            build(prefix + [point], pop + 1)

    build([], 0)
    return seeds


def _newton_refine(field: ReplicatorField, u0: np.ndarray, residual_tol: float,
                   max_iterations: int = 60) -> np.ndarray | None:
    u = u0.astype(float).copy()
    norm = float(np.max(np.abs(_reduced_velocity(field, u))))
    for _ in range(max_iterations):
        if norm < residual_tol * 0.5:
            return u
        jac = _fd_jacobian(lambda w: _reduced_velocity(field, w), u)
        rhs = -_reduced_velocity(field, u)
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, rhs, rcond=None)
        if not np.all(np.isfinite(step)):
            return None
        for damping in (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125):
            candidate = u + damping * step
            cand_norm = float(np.max(np.abs(_reduced_velocity(field, candidate))))
            if cand_norm < norm:
                u, norm = candidate, cand_norm
                break
        else:
            return None
    return u if norm < residual_tol * 0.5 else None


def find_equilibria(table_or_field, seeds: Sequence[State] | None = None,
                    method: str = "ours", grid: int = 11,
                    residual_tol: float = RESIDUAL_TOL,
                    dedup_tol: float = DEDUP_TOL,
                    stability_tol: float = STABILITY_TOL) -> EquilibriumSearch:
    """Locate stationary points of the field and classify their stability.

    Damped-Newton refinement runs from every seed (default: a uniform lattice
    over the simplex product, vertices included); converged points with
    residual below `residual_tol` are deduplicated within `dedup_tol`
    (max-norm) and classified through the eigenvalues of the finite-difference
    Jacobian in simplex tangent coordinates.  Non-convergent seeds are dropped
    and counted.
    """
    field = _as_field(table_or_field, method)
    if seeds is None:
        seed_states = default_seed_grid(field, grid)
    else:
        seed_states = [_normalize_state(field, s) for s in seeds]

    k = field.strategies
    candidates: list[tuple[np.ndarray, State, float]] = []

    # Vertices are exactly stationary for replicator dynamics; include them
    # directly so the report always carries them with residual 0.
    def vertex_states(pop: int, prefix: list[np.ndarray]):
        if pop == field.populations:
            state = tuple(np.array(p) for p in prefix)
            u = _state_to_reduced(state)
            candidates.append((u, state, _full_residual(field, state)))
            return
        for i in range(k):
            one_hot = np.zeros(k)
            one_hot[i] = 1.0
            vertex_states(pop + 1, prefix + [one_hot])

    vertex_states(0, [])

    converged = 0
    dropped = 0
    for seed in seed_states:
        u = _newton_refine(field, _state_to_reduced(seed), residual_tol)
        if u is None:
            dropped += 1
            continue
        state = _reduced_to_state(field, u)
        if any(np.any(c < -1e-6) or np.any(c > 1.0 + 1e-6) for c in state):
            dropped += 1
            continue
        state = tuple(_project_simplex(c) for c in state)
        residual = _full_residual(field, state)
        if residual >= residual_tol:
            dropped += 1
            continue
        converged += 1
        candidates.append((_state_to_reduced(state), state, residual))

    candidates.sort(key=lambda item: (item[2], tuple(np.round(item[0], 9))))
    accepted: list[tuple[np.ndarray, State, float]] = []
    for u, state, residual in candidates:
        flat = np.concatenate(state)
        duplicate = any(np.max(np.abs(flat - np.concatenate(other_state))) < dedup_tol
                        for _, other_state, _ in accepted)
        if not duplicate:
            accepted.append((u, state, residual))

    equilibria = []
    for u, state, residual in accepted:
        classification, eigenvalues = _classify(field, u, stability_tol)
        equilibria.append(Equilibrium(state, residual, classification, eigenvalues))
    equilibria.sort(key=lambda e: tuple(np.round(np.concatenate(e.components), 9)))
    return EquilibriumSearch(equilibria, len(seed_states), converged, dropped)
