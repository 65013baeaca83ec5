"""Finite Markov chains as SystemModels, with exact push-forward enumeration.

Events are instantaneous kernels applied to the state at t0 (clamp,
randomize, permute, ...); afterwards the chain runs its base dynamics for
horizon.steps steps. The exact path is plain matrix-vector propagation and
doubles as the brute-force oracle for the Monte Carlo path.
"""

from __future__ import annotations

import numpy as np

from ._kernels import cumulative_rows, cumulative_vector, walk_outcomes
from .entropic_potential import Event, Horizon, SystemModel
from .entropy_core import Distribution
from .errors import InvalidDistributionError

_ROW_TOL = 1e-9


def _validate_stochastic(m: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidDistributionError(f"{what} must be a square matrix")
    if np.any(m < 0.0):
        raise InvalidDistributionError(f"{what} has negative entries")
    sums = m.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > _ROW_TOL):
        raise InvalidDistributionError(f"{what} rows must sum to 1")
    return m / sums[:, None]


class MarkovChainModel(SystemModel):
    """States 0..S-1 (or custom labels), base dynamics P, event kernels E_a."""

    def __init__(self, transition, event_kernels: dict, start, labels=None):
        self.transition = _validate_stochastic(transition, "transition matrix")
        s = self.transition.shape[0]
        self.event_kernels = {
            key: _validate_stochastic(k, f"event kernel {key!r}")
            for key, k in event_kernels.items()
        }
        for key, k in self.event_kernels.items():
            if k.shape[0] != s:
                raise InvalidDistributionError(f"event kernel {key!r} has wrong size")
        self.labels = tuple(labels) if labels is not None else tuple(range(s))
        self.start = Distribution(self.labels, start)
        self._cum_cache: dict = {}

    def event_space(self) -> list[Event]:
        return [Event(key) for key in sorted(self.event_kernels)]

    def exact_future_distribution(self, event, horizon: Horizon) -> Distribution:
        d = self.start.probs.copy()
        if event is not None:
            d = d @ self.event_kernels[event.id]
        for _ in range(horizon.steps):
            d = d @ self.transition
        return Distribution(self.labels, d)

    def _cum(self, key):
        if key not in self._cum_cache:
            if key is None:
                self._cum_cache[key] = cumulative_rows(self.transition)
            elif key == "__start__":
                self._cum_cache[key] = cumulative_vector(self.start.probs)
            else:
                self._cum_cache[key] = cumulative_rows(self.event_kernels[key])
        return self._cum_cache[key]

    def sample_future_outcomes(self, event, horizon: Horizon, n: int,
                               rng: np.random.Generator) -> list:
        cum_rest = self._cum(None)
        if event is None:
            n_first = 0
            cum_first = cum_rest
        else:
            n_first = 1
            cum_first = self._cum(event.id)
        u = rng.random((n, 1 + n_first + horizon.steps))
        idx = walk_outcomes(self._cum("__start__"), cum_first, n_first,
                            cum_rest, horizon.steps, u)
        return [self.labels[i] for i in idx]


def two_state_flip_chain(flip: float = 0.1, start=(0.5, 0.5)) -> MarkovChainModel:
    """The hand-checkable two-state symmetric chain.

    Events: clamp0 forces state 0, randomize replaces the state with a fair
    coin. From a uniform start, clamp0 at horizon 1 yields Z = h(flip) - 1.
    """
    p = [[1.0 - flip, flip], [flip, 1.0 - flip]]
    kernels = {
        "clamp0": [[1.0, 0.0], [1.0, 0.0]],
        "randomize": [[0.5, 0.5], [0.5, 0.5]],
    }
    return MarkovChainModel(p, kernels, start)


def random_chain_model(n_states: int, n_events: int, rng: np.random.Generator,
                       deterministic: bool = False) -> MarkovChainModel:
    """Random test model; deterministic=True makes every transition a point mass."""
    if deterministic:
        def kernel():
            m = np.zeros((n_states, n_states))
            m[np.arange(n_states), rng.integers(0, n_states, n_states)] = 1.0
            return m
        start = np.zeros(n_states)
        start[rng.integers(0, n_states)] = 1.0
    else:
        def kernel():
            m = rng.random((n_states, n_states)) + 1e-3
            return m / m.sum(axis=1, keepdims=True)
        start = rng.random(n_states) + 1e-3
        start /= start.sum()
    transition = kernel()
    kernels = {f"e{i}": kernel() for i in range(n_events)}
    return MarkovChainModel(transition, kernels, start)
