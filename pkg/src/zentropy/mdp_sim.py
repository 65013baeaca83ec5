"""Stochastic grid-world MDP with an exact push-forward oracle.

The noise model is deliberately minimal: a move succeeds with probability
1-slip and otherwise the agent stays put; moves into walls or borders
resolve to "stay"; the goal cell is absorbing. Everything hand-checkable on
1xN corridors, which is where the golden numbers come from.

Cells are (x, y) tuples with (0, 0) top-left; the flat index is y*width+x.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import cumulative_rows, cumulative_vector, walk_outcomes
from .entropic_potential import (
    EstimatorConfig,
    Event,
    Horizon,
    SystemModel,
    ZEstimate,
    rank_events,
)
from .entropy_core import Distribution
from .errors import CellIsWallError, InvalidDistributionError

ACTIONS = ("up", "down", "left", "right")
_DELTAS = {"up": (0, -1), "down": (0, 1), "left": (-1, 0), "right": (1, 0)}

Cell = tuple  # (x, y)

MAX_CELLS = 4096  # exact push-forward stays the universal oracle below this


@dataclass(frozen=True)
class GridWorld:
    width: int
    height: int
    goal: Cell
    start: Cell
    slip: float = 0.0
    walls: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "walls", frozenset(tuple(c) for c in self.walls))
        object.__setattr__(self, "goal", tuple(self.goal))
        object.__setattr__(self, "start", tuple(self.start))
        if self.width < 1 or self.height < 1 or self.width * self.height > MAX_CELLS:
            raise ValueError(f"grid must have 1..{MAX_CELLS} cells")
        if not (0.0 <= self.slip < 1.0):
            raise ValueError(f"slip must be in [0, 1), got {self.slip}")
        for name, cell in (("goal", self.goal), ("start", self.start)):
            if not self._in_bounds(cell):
                raise ValueError(f"{name} cell {cell} out of bounds")
            if cell in self.walls:
                raise ValueError(f"{name} cell {cell} is a wall")
        for w in self.walls:
            if not self._in_bounds(w):
                raise ValueError(f"wall {w} out of bounds")

    def _in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def index_of(self, cell: Cell) -> int:
        x, y = cell
        return y * self.width + x

    def cell_of(self, idx: int) -> Cell:
        return (idx % self.width, idx // self.width)

    def free_cells(self) -> list[Cell]:
        """Non-wall cells in flat-index order; the outcome space of state
        distributions."""
        return [self.cell_of(i) for i in range(self.n_cells)
                if self.cell_of(i) not in self.walls]

    def move_target(self, cell: Cell, action: str) -> Cell:
        dx, dy = _DELTAS[action]
        nxt = (cell[0] + dx, cell[1] + dy)
        if not self._in_bounds(nxt) or nxt in self.walls:
            return cell
        return nxt


def corridor_world(length: int = 5, slip: float = 0.2) -> GridWorld:
    """1xN corridor with the goal at the right end; the golden-value testbed."""
    return GridWorld(width=length, height=1, goal=(length - 1, 0), start=(0, 0), slip=slip)


def render_ascii(g: GridWorld) -> str:
    rows = []
    for y in range(g.height):
        row = []
        for x in range(g.width):
            c = (x, y)
            row.append("#" if c in g.walls else "G" if c == g.goal
                       else "S" if c == g.start else ".")
        rows.append("".join(row))
    return "\n".join(rows)


# -- policies ---------------------------------------------------------------

def always_policy(g: GridWorld, action: str) -> dict:
    """Point-mass policy: the same action in every free cell."""
    d = Distribution.point(action, ACTIONS)
    return {c: d for c in g.free_cells()}

def uniform_policy(g: GridWorld) -> dict:
    d = Distribution.uniform(ACTIONS)
    return {c: d for c in g.free_cells()}


def _policy_matrix(g: GridWorld, policy: dict) -> np.ndarray:
    """Validated (n_cells, 4) action-probability matrix, zero rows on walls."""
    m = np.zeros((g.n_cells, 4))
    for c in g.free_cells():
        if c not in policy:
            raise InvalidDistributionError(f"policy does not cover cell {c}")
        dist = policy[c]
        row = np.zeros(4)
        for label, p in zip(dist.outcomes, dist.probs):
            row[ACTIONS.index(label)] = p
        m[g.index_of(c)] = row
    return m


def _target_table(g: GridWorld) -> np.ndarray:
    """(4, n_cells) flat indices of the successful-move destination."""
    t = np.empty((4, g.n_cells), dtype=np.int64)
    for a, action in enumerate(ACTIONS):
        for i in range(g.n_cells):
            c = g.cell_of(i)
            t[a, i] = i if c in g.walls else g.index_of(g.move_target(c, action))
    return t


def _step_flat(g: GridWorld, targets: np.ndarray, d: np.ndarray,
               pol: np.ndarray) -> np.ndarray:
    """One exact push-forward step of a flat cell distribution under pol."""
    out = np.zeros_like(d)
    gi = g.index_of(g.goal)
    out[gi] = d[gi]  # absorbing, kept exact
    active = d.copy()
    active[gi] = 0.0
    for a in range(4):
        w = active * pol[:, a]
        np.add.at(out, targets[a], w * (1.0 - g.slip))
        out += w * g.slip
    return out


def _action_matrix(action: str) -> np.ndarray:
    m = np.zeros((1, 4))
    m[0, ACTIONS.index(action)] = 1.0
    return m


def _dist_to_flat(g: GridWorld, d: Distribution) -> np.ndarray:
    flat = np.zeros(g.n_cells)
    for label, p in zip(d.outcomes, d.probs):
        cell = tuple(label)
        if cell in g.walls:
            if p > 0.0:
                raise CellIsWallError(f"distribution puts mass on wall {cell}")
            continue
        flat[g.index_of(cell)] = p
    return flat


def _flat_to_dist(g: GridWorld, flat: np.ndarray) -> Distribution:
    free = g.free_cells()
    return Distribution(free, [flat[g.index_of(c)] for c in free])


def transition_kernel(g: GridWorld, cell: Cell, action: str) -> Distribution:
    """One-step law of the next cell for a single (cell, action) pair."""
    cell = tuple(cell)
    if cell in g.walls:
        raise CellIsWallError(f"cell {cell} is a wall")
    if action not in ACTIONS:
        raise ValueError(f"unknown action {action!r}")
    d = np.zeros(g.n_cells)
    d[g.index_of(cell)] = 1.0
    pol = np.broadcast_to(_action_matrix(action), (g.n_cells, 4))
    out = _step_flat(g, _target_table(g), d, pol)
    return _flat_to_dist(g, out)


def push_forward(g: GridWorld, d: Distribution, policy_or_action) -> Distribution:
    """Exact one-step evolution of a state distribution.

    policy_or_action is an action name (applied everywhere) or a policy dict.
    """
    flat = _dist_to_flat(g, d)
    if isinstance(policy_or_action, str):
        pol = np.broadcast_to(_action_matrix(policy_or_action), (g.n_cells, 4))
    else:
        pol = _policy_matrix(g, policy_or_action)
    return _flat_to_dist(g, _step_flat(g, _target_table(g), flat, pol))


def future_state_distribution(g: GridWorld, start: Distribution,
                              first: str | None, follow: dict, k: int) -> Distribution:
    """Exact law of the cell k steps ahead: optional first action, then the
    follow-on policy for the remaining k-1 steps."""
    if k < 1:
        raise ValueError("horizon must be >= 1 step")
    targets = _target_table(g)
    flat = _dist_to_flat(g, start)
    pol_follow = _policy_matrix(g, follow)
    remaining = k
    if first is not None:
        flat = _step_flat(g, targets, flat,
                          np.broadcast_to(_action_matrix(first), (g.n_cells, 4)))
        remaining -= 1
    for _ in range(remaining):
        flat = _step_flat(g, targets, flat, pol_follow)
    return _flat_to_dist(g, flat)


class GridWorldModel(SystemModel):
    """SystemModel adapter: events are actions taken at t0 from a start cell,
    the follow-on policy owns everything between t0 and T."""

    def __init__(self, grid: GridWorld, start, follow: dict,
                 actions: tuple = ACTIONS):
        self.grid = grid
        if isinstance(start, Distribution):
            self.start = start
        else:
            self.start = Distribution.point(tuple(start), grid.free_cells())
        self.follow = follow
        bad = [a for a in actions if a not in ACTIONS]
        if bad:
            raise ValueError(f"unknown actions {bad}")
        self.actions = tuple(a for a in ACTIONS if a in actions)
        self._dense: dict = {}

    def event_space(self) -> list[Event]:
        return [Event(a, f"take action {a} at t0") for a in self.actions]

    def exact_future_distribution(self, event, horizon: Horizon) -> Distribution:
        first = event.id if event is not None else None
        return future_state_distribution(self.grid, self.start, first,
                                         self.follow, horizon.steps)

    # dense cumulative matrices, built lazily for the sampling path
    def _cum_matrix(self, key) -> np.ndarray:
        if key not in self._dense:
            g = self.grid
            n = g.n_cells
            targets = _target_table(g)
            if key == "__policy__":
                pol = _policy_matrix(g, self.follow)
            else:
                pol = np.broadcast_to(_action_matrix(key), (n, 4))
            m = np.zeros((n, n))
            gi = g.index_of(g.goal)
            idx = np.arange(n)
            for a in range(4):
                w = pol[:, a].copy()
                w[gi] = 0.0
                np.add.at(m, (idx, targets[a]), w * (1.0 - g.slip))
                m[idx, idx] += w * g.slip
            m[gi, gi] = 1.0
            wall_idx = [g.index_of(c) for c in g.walls]
            for wi in wall_idx:
                m[wi] = 0.0
                m[wi, wi] = 1.0
            self._dense[key] = cumulative_rows(m)
        return self._dense[key]

    def sample_future_outcomes(self, event, horizon: Horizon, n: int,
                               rng: np.random.Generator) -> list:
        g = self.grid
        start_flat = _dist_to_flat(g, self.start)
        cum_start = cumulative_vector(start_flat)
        cum_rest = self._cum_matrix("__policy__")
        if event is None:
            n_first, cum_first, n_rest = 0, cum_rest, horizon.steps
        else:
            n_first, cum_first, n_rest = 1, self._cum_matrix(event.id), horizon.steps - 1
        u = rng.random((n, 1 + n_first + n_rest))
        idx = walk_outcomes(cum_start, cum_first, n_first, cum_rest, n_rest, u)
        return [g.cell_of(i) for i in idx]


def sample_trajectory(g: GridWorld, start: Cell, first: str | None,
                      follow: dict, k: int, seed) -> Cell:
    """One sampled terminal cell at horizon k; fully determined by the seed."""
    if k < 1:
        raise ValueError("horizon must be >= 1 step")
    model = GridWorldModel(g, start, follow)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    event = Event(first) if first is not None else None
    return model.sample_future_outcomes(event, Horizon(0, k), 1, rng)[0]


def action_z_scores(g: GridWorld, cell: Cell, follow: dict, k: int,
                    estimator: EstimatorConfig = EstimatorConfig(),
                    actions: tuple = ACTIONS) -> list[tuple[str, ZEstimate]]:
    """Entropic potential of each admissible action at `cell`, most beneficial
    first. Each action is scored against a uniform baseline over the others."""
    cell = tuple(cell)
    if cell in g.walls:
        raise CellIsWallError(f"cell {cell} is a wall")
    model = GridWorldModel(g, cell, follow, actions=actions)
    ranked = rank_events(model, model.event_space(), "vs-rest", Horizon(0, k), estimator)
    return [(ev.id, z) for ev, z in ranked]
