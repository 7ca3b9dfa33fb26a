"""Distance-driven agent layout.

Each agent carries a position and radius; the engine advances positions so
that displayed pairwise distances approach an ideal distance matrix. Per
tick every agent receives a velocity summing, over all other agents, the
distance error (ideal minus displayed) along the unit line between the two
centers. Optional behaviors (collision avoidance, viewport clamping)
transform velocities before integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


class LayoutError(ValueError):
    """Raised for inconsistent layout configuration or state."""


class AgentKind(str, Enum):
    WORD = "word"
    ARTICLE = "article"


@dataclass(frozen=True)
class Agent:
    """One visual entity: a word or an opened article.

    Pinned agents never move, neither by the velocity rule nor by behaviors.
    """

    id: str
    position: tuple[float, float]
    radius: float
    kind: AgentKind = AgentKind.WORD
    pinned: bool = False

    def __post_init__(self):
        if self.radius <= 0:
            raise LayoutError(f"agent {self.id!r}: radius must be > 0, got {self.radius}")
        if not all(math.isfinite(c) for c in self.position):
            raise LayoutError(f"agent {self.id!r}: non-finite position {self.position}")


@dataclass(frozen=True)
class Viewport:
    x_min: float = 0.0
    y_min: float = 0.0
    x_max: float = 1000.0
    y_max: float = 1000.0

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise LayoutError("viewport is degenerate")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def contains_circle(self, position: tuple[float, float], radius: float, tol: float = 1e-9) -> bool:
        x, y = position
        return (
            x - radius >= self.x_min - tol
            and x + radius <= self.x_max + tol
            and y - radius >= self.y_min - tol
            and y + radius <= self.y_max + tol
        )


BEHAVIOR_COLLISION = "collision_avoidance"
BEHAVIOR_BOUNDS = "bounds_clamp"


@dataclass(frozen=True)
class LayoutParams:
    """Tuning knobs for one layout run.

    ``max_displacement`` is the per-tick displacement cap in display units;
    when left ``None`` it defaults to 5% of the viewport diagonal.
    """

    speed_coefficient: float = 0.1
    timestep: float = 1.0
    max_displacement: float | None = None
    viewport: Viewport = field(default_factory=Viewport)
    stability_threshold: float = 0.05
    behaviors: tuple[str, ...] = (BEHAVIOR_COLLISION, BEHAVIOR_BOUNDS)
    separation_slack: float = 0.0
    avoidance_gain: float = 0.5

    def __post_init__(self):
        if self.speed_coefficient <= 0:
            raise LayoutError("speed_coefficient must be > 0")
        if self.timestep <= 0:
            raise LayoutError("timestep must be > 0")
        if self.max_displacement is not None and self.max_displacement <= 0:
            raise LayoutError("max_displacement must be > 0 when set")
        if self.stability_threshold < 0:
            raise LayoutError("stability_threshold must be >= 0")
        if self.separation_slack < 0:
            raise LayoutError("separation_slack must be >= 0")
        if self.avoidance_gain < 0:
            raise LayoutError("avoidance_gain must be >= 0")
        for name in self.behaviors:
            if name not in _BEHAVIORS:
                raise LayoutError(f"unknown behavior {name!r}")

    @property
    def displacement_limit(self) -> float:
        if self.max_displacement is not None:
            return self.max_displacement
        return 0.05 * self.viewport.diagonal


def validate_distance_matrix(matrix: np.ndarray, n: int | None = None) -> np.ndarray:
    """Check that ``matrix`` is a square, symmetric, zero-diagonal,
    finite, nonnegative distance matrix and return it as float64."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise LayoutError(f"distance matrix must be square, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise LayoutError(f"distance matrix is {m.shape[0]}x{m.shape[0]}, expected {n}x{n}")
    if m.size:
        if not np.all(np.isfinite(m)):
            raise LayoutError("distance matrix has non-finite entries")
        if np.any(m < 0):
            raise LayoutError("distance matrix has negative entries")
        if np.any(np.diagonal(m) != 0):
            raise LayoutError("distance matrix diagonal must be zero")
        if not np.array_equal(m, m.T):
            raise LayoutError("distance matrix must be symmetric")
    return m


@dataclass(frozen=True, eq=False)
class LayoutState:
    """Agents plus the ideal distance matrix over the same ordering."""

    agents: tuple[Agent, ...]
    ideal: np.ndarray
    tick: int = 0

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise LayoutError("agent ids must be unique")
        matrix = validate_distance_matrix(self.ideal, n=len(self.agents))
        matrix.setflags(write=False)
        object.__setattr__(self, "ideal", matrix)

    def index_of(self, agent_id: str) -> int:
        for k, agent in enumerate(self.agents):
            if agent.id == agent_id:
                return k
        raise LayoutError(f"no agent with id {agent_id!r}")


def positions(agents: tuple[Agent, ...] | list[Agent]) -> np.ndarray:
    return np.array([a.position for a in agents], dtype=float).reshape(len(agents), 2)


def displayed_distances(agents: tuple[Agent, ...] | list[Agent]) -> np.ndarray:
    """Pairwise Euclidean distances between agent centers (n x n)."""
    pos = positions(agents)
    diff = pos[:, None, :] - pos[None, :, :]
    return np.linalg.norm(diff, axis=2)


def delta_matrix(state: LayoutState) -> np.ndarray:
    """Ideal minus displayed distances. Entries may be negative."""
    return state.ideal - displayed_distances(state.agents)


def _unit_directions(pos: np.ndarray) -> np.ndarray:
    """Unit vectors u[i,j] from agent j toward agent i; zero on the diagonal.

    Coincident distinct agents get a fixed antisymmetric fallback direction
    along +x so the result stays deterministic and free of NaNs.
    """
    n = pos.shape[0]
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    unit = np.zeros_like(diff)
    nz = dist > 0
    unit[nz] = diff[nz] / dist[nz, None]
    coincident = ~nz & ~np.eye(n, dtype=bool)
    if coincident.any():
        ii, jj = np.nonzero(coincident)
        unit[ii, jj, 0] = np.where(ii < jj, 1.0, -1.0)
    return unit


def raw_velocities(state: LayoutState, params: LayoutParams) -> np.ndarray:
    """Velocity of each agent from the distance-error rule.

    v_i = coefficient * sum_j (ideal[i,j] - displayed[i,j]) * u_ij / n,
    with u_ij the unit vector from agent j toward agent i. A positive error
    (too close) pushes the pair apart; a negative one pulls it together.
    Pinned agents get zero velocity.
    """
    n = len(state.agents)
    if n == 0:
        return np.zeros((0, 2))
    pos = positions(state.agents)
    delta = state.ideal - displayed_distances(state.agents)
    vel = params.speed_coefficient * np.einsum("ij,ijk->ik", delta, _unit_directions(pos)) / n
    pinned = np.array([a.pinned for a in state.agents], dtype=bool)
    vel[pinned] = 0.0
    return vel


def _behavior_bounds_clamp(state: LayoutState, velocities: np.ndarray, params: LayoutParams) -> np.ndarray:
    """Reduce velocity components that would carry an agent's circle past the
    viewport edge this tick; a circle wider than the viewport is held at the
    axis midpoint."""
    out = velocities.copy()
    dt = params.timestep
    vp = params.viewport
    pos = positions(state.agents)
    radii = np.array([a.radius for a in state.agents])
    pinned = np.array([a.pinned for a in state.agents], dtype=bool)
    for axis, (edge_lo, edge_hi) in enumerate(((vp.x_min, vp.x_max), (vp.y_min, vp.y_max))):
        lo = edge_lo + radii
        hi = edge_hi - radii
        target = pos[:, axis] + out[:, axis] * dt
        clamped = np.clip(target, np.minimum(lo, hi), np.maximum(lo, hi))
        clamped = np.where(lo > hi, 0.5 * (edge_lo + edge_hi), clamped)
        out[:, axis] = (clamped - pos[:, axis]) / dt
    out[pinned] = velocities[pinned]
    return out


def _behavior_collision_avoidance(state: LayoutState, velocities: np.ndarray, params: LayoutParams) -> np.ndarray:
    """Add equal-and-opposite separating components for every pair closer
    than its ideal distance minus the separation slack, scaled by the
    violation depth and averaged over the agent count (matching the
    velocity rule's normalization, which keeps the correction contractive
    as clusters grow)."""
    n = len(state.agents)
    if n < 2:
        return velocities
    pos = positions(state.agents)
    dist = displayed_distances(state.agents)
    violation = (state.ideal - params.separation_slack) - dist
    violation[violation < 0] = 0.0
    np.fill_diagonal(violation, 0.0)
    push = params.avoidance_gain * np.einsum("ij,ijk->ik", violation, _unit_directions(pos)) / n
    out = velocities + push
    pinned = np.array([a.pinned for a in state.agents], dtype=bool)
    out[pinned] = velocities[pinned]
    return out


_BEHAVIORS = {
    BEHAVIOR_BOUNDS: _behavior_bounds_clamp,
    BEHAVIOR_COLLISION: _behavior_collision_avoidance,
}


def apply_behavior(name: str, state: LayoutState, velocities: np.ndarray, params: LayoutParams) -> np.ndarray:
    try:
        behavior = _BEHAVIORS[name]
    except KeyError:
        raise LayoutError(f"unknown behavior {name!r}") from None
    return behavior(state, np.asarray(velocities, dtype=float), params)


def step(state: LayoutState, params: LayoutParams) -> tuple[LayoutState, np.ndarray]:
    """Advance one tick.

    Returns the new state and the effective velocities, i.e. the realized
    per-agent displacement divided by the timestep (after behaviors and the
    per-tick displacement cap).
    """
    n = len(state.agents)
    if state.ideal.shape != (n, n):
        raise LayoutError(f"ideal matrix is {state.ideal.shape}, expected ({n}, {n})")
    if n == 0:
        return replace(state, tick=state.tick + 1), np.zeros((0, 2))

    vel = raw_velocities(state, params)
    for name in params.behaviors:
        vel = apply_behavior(name, state, vel, params)

    disp = vel * params.timestep
    limit = params.displacement_limit
    mag = np.linalg.norm(disp, axis=1)
    over = mag > limit
    if over.any():
        disp[over] *= (limit / mag[over])[:, None]

    pos = positions(state.agents) + disp
    agents = tuple(
        replace(agent, position=(float(x), float(y)))
        for agent, (x, y) in zip(state.agents, pos)
    )
    new_state = LayoutState(agents=agents, ideal=state.ideal, tick=state.tick + 1)
    return new_state, disp / params.timestep


def agent_stress(delta_row: np.ndarray, n: int) -> float:
    """Mean absolute distance error of one agent: sum_j |delta[i,j]| / n."""
    if n < 1:
        raise LayoutError("agent_stress needs n >= 1")
    return float(np.abs(np.asarray(delta_row, dtype=float)).sum() / n)


def stress_values(delta: np.ndarray) -> np.ndarray:
    """agent_stress for every row of a delta matrix."""
    d = np.asarray(delta, dtype=float)
    n = d.shape[0]
    if n == 0:
        return np.zeros(0)
    return np.abs(d).sum(axis=1) / n


def mean_speed(velocities: np.ndarray) -> float:
    """Mean Euclidean magnitude of the velocities; 0 for an empty set."""
    v = np.asarray(velocities, dtype=float).reshape(-1, 2)
    if v.shape[0] == 0:
        return 0.0
    return float(np.linalg.norm(v, axis=1).mean())


def is_stable(mean: float, params: LayoutParams) -> bool:
    return mean < params.stability_threshold


def add_agent(state: LayoutState, agent: Agent, ideal_row: np.ndarray) -> LayoutState:
    """Append an agent along with its ideal-distance row (self entry last
    and zero). Existing positions and matrix entries are untouched."""
    n = len(state.agents)
    if any(a.id == agent.id for a in state.agents):
        raise LayoutError(f"duplicate agent id {agent.id!r}")
    row = np.asarray(ideal_row, dtype=float)
    if row.shape != (n + 1,):
        raise LayoutError(f"ideal_row must have length {n + 1}, got {row.shape}")
    if not np.all(np.isfinite(row)) or np.any(row < 0):
        raise LayoutError("ideal_row entries must be finite and >= 0")
    if row[n] != 0:
        raise LayoutError("ideal_row self entry must be zero")
    ideal = np.zeros((n + 1, n + 1))
    ideal[:n, :n] = state.ideal
    ideal[:n, n] = row[:n]
    ideal[n, :n] = row[:n]
    return LayoutState(agents=state.agents + (agent,), ideal=ideal, tick=state.tick)


def remove_agent(state: LayoutState, agent_id: str) -> LayoutState:
    """Drop an agent and its ideal row/column."""
    k = state.index_of(agent_id)
    agents = state.agents[:k] + state.agents[k + 1:]
    ideal = np.delete(np.delete(state.ideal, k, axis=0), k, axis=1)
    return LayoutState(agents=agents, ideal=ideal, tick=state.tick)
