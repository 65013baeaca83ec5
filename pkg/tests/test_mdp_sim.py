import numpy as np
import pytest

from zentropy.entropic_potential import EstimatorConfig, Event, Horizon
from zentropy.entropy_core import Distribution
from zentropy.errors import CellIsWallError, InvalidDistributionError
from zentropy.mdp_sim import (
    ACTIONS,
    GridWorld,
    GridWorldModel,
    action_z_scores,
    always_policy,
    corridor_world,
    future_state_distribution,
    push_forward,
    render_ascii,
    sample_trajectory,
    transition_kernel,
    uniform_policy,
)

from oracles import corridor_future, entropy_bits

EXACT = EstimatorConfig(backend="exact")


class TestGridWorld:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridWorld(0, 3, goal=(0, 0), start=(0, 0))
        with pytest.raises(ValueError):
            GridWorld(65, 64, goal=(0, 0), start=(1, 0))  # > 4096 cells
        with pytest.raises(ValueError):
            GridWorld(3, 3, goal=(5, 5), start=(0, 0))
        with pytest.raises(ValueError):
            GridWorld(3, 3, goal=(1, 1), start=(0, 0), walls={(1, 1)})
        with pytest.raises(ValueError):
            GridWorld(3, 3, goal=(1, 1), start=(0, 0), slip=1.0)

    def test_move_target_blocks_on_walls_and_borders(self):
        g = GridWorld(3, 3, goal=(2, 2), start=(0, 0), walls={(1, 0)})
        assert g.move_target((0, 0), "right") == (0, 0)   # wall at (1,0)
        assert g.move_target((0, 0), "up") == (0, 0)      # border
        assert g.move_target((0, 0), "down") == (0, 1)

    def test_render_ascii(self):
        g = GridWorld(3, 2, goal=(2, 1), start=(0, 0), walls={(1, 0)})
        assert render_ascii(g) == "S#.\n..G"


class TestTransitionKernel:
    def test_slip_zero_point_mass(self):
        g = GridWorld(3, 3, goal=(2, 2), start=(0, 0), slip=0.0)
        d = transition_kernel(g, (1, 1), "right")
        assert d.as_dict()[(2, 1)] == pytest.approx(1.0)

    def test_goal_absorbing(self):
        g = corridor_world(5, 0.2)
        for a in ACTIONS:
            d = transition_kernel(g, (4, 0), a)
            assert d.prob_of((4, 0)) == 1.0

    def test_corridor_probabilities(self):
        g = corridor_world(5, 0.2)
        d = transition_kernel(g, (3, 0), "right").as_dict()
        assert d[(4, 0)] == pytest.approx(0.8)
        assert d[(3, 0)] == pytest.approx(0.2)

    def test_wall_cell_rejected(self):
        g = GridWorld(3, 3, goal=(2, 2), start=(0, 0), walls={(1, 1)})
        with pytest.raises(CellIsWallError):
            transition_kernel(g, (1, 1), "up")

    def test_unknown_action_rejected(self):
        g = corridor_world(3, 0.0)
        with pytest.raises(ValueError):
            transition_kernel(g, (0, 0), "jump")


class TestPushForward:
    def test_deterministic_point_mass(self):
        g = corridor_world(4, 0.0)
        d = Distribution.point((1, 0), g.free_cells())
        out = push_forward(g, d, always_policy(g, "right"))
        assert out.prob_of((2, 0)) == pytest.approx(1.0)

    def test_goal_mass_unchanged(self):
        g = corridor_world(4, 0.3)
        d = Distribution.point((3, 0), g.free_cells())
        out = push_forward(g, d, uniform_policy(g))
        assert out.prob_of((3, 0)) == 1.0

    def test_all_absorbing_world_unchanged(self):
        g = GridWorld(1, 1, goal=(0, 0), start=(0, 0), slip=0.0)
        d = Distribution.uniform(g.free_cells())
        out = push_forward(g, d, uniform_policy(g))
        assert out.as_dict() == d.as_dict()

    def test_corridor_single_step(self):
        g = corridor_world(5, 0.2)
        d = Distribution.point((3, 0), g.free_cells())
        out = push_forward(g, d, "right").as_dict()
        assert out[(4, 0)] == pytest.approx(0.8)
        assert out[(3, 0)] == pytest.approx(0.2)

    def test_mass_conservation(self):
        rng = np.random.default_rng(5)
        g = GridWorld(6, 5, goal=(5, 4), start=(0, 0), slip=0.37,
                      walls={(2, 2), (3, 1)})
        w = rng.random(len(g.free_cells()))
        d = Distribution(g.free_cells(), w / w.sum())
        pol = uniform_policy(g)
        for _ in range(4):
            d = push_forward(g, d, pol)
            assert abs(d.probs.sum() - 1.0) <= 1e-12

    def test_policy_must_cover_cells(self):
        g = corridor_world(3, 0.0)
        partial = {(0, 0): Distribution.point("right", ACTIONS)}
        d = Distribution.point((0, 0), g.free_cells())
        with pytest.raises(InvalidDistributionError):
            push_forward(g, d, partial)


class TestFutureStateDistribution:
    def test_corridor_right_branch_golden(self):
        g = corridor_world(5, 0.2)
        start = Distribution.point((3, 0), g.free_cells())
        d = future_state_distribution(g, start, "right", always_policy(g, "right"), 2)
        want = corridor_future(3, "right", 2)
        for cell, p in d.as_dict().items():
            assert p == pytest.approx(want.get(cell[0], 0.0), abs=1e-12)
        assert d.prob_of((4, 0)) == pytest.approx(0.96)
        assert d.prob_of((3, 0)) == pytest.approx(0.04)

    def test_corridor_left_branch_golden(self):
        g = corridor_world(5, 0.2)
        start = Distribution.point((3, 0), g.free_cells())
        d = future_state_distribution(g, start, "left", always_policy(g, "right"), 2)
        assert d.prob_of((3, 0)) == pytest.approx(0.68)
        assert d.prob_of((2, 0)) == pytest.approx(0.16)
        assert d.prob_of((4, 0)) == pytest.approx(0.16)

    def test_slip_free_is_point_mass(self):
        g = corridor_world(5, 0.0)
        start = Distribution.point((0, 0), g.free_cells())
        d = future_state_distribution(g, start, "right", always_policy(g, "right"), 3)
        assert d.support_size == 1
        assert d.prob_of((3, 0)) == 1.0

    def test_horizon_must_be_positive(self):
        g = corridor_world(3, 0.0)
        start = Distribution.point((0, 0), g.free_cells())
        with pytest.raises(ValueError):
            future_state_distribution(g, start, None, uniform_policy(g), 0)

    def test_absorption_monotone_in_horizon(self):
        g = corridor_world(6, 0.25)
        start = Distribution.point((1, 0), g.free_cells())
        pol = always_policy(g, "right")
        last = 0.0
        for k in range(1, 12):
            p_goal = future_state_distribution(g, start, None, pol, k).prob_of((5, 0))
            assert p_goal >= last - 1e-12
            last = p_goal


class TestSampleTrajectory:
    def test_slip_free_terminal(self):
        g = corridor_world(5, 0.0)
        cell = sample_trajectory(g, (0, 0), "right", always_policy(g, "right"), 4, 0)
        assert cell == (4, 0)

    def test_seed_reproducibility(self):
        g = corridor_world(5, 0.3)
        pol = always_policy(g, "right")
        a = sample_trajectory(g, (0, 0), "right", pol, 3, 99)
        b = sample_trajectory(g, (0, 0), "right", pol, 3, 99)
        assert a == b

    def test_empirical_matches_exact(self):
        g = corridor_world(5, 0.2)
        model = GridWorldModel(g, (3, 0), always_policy(g, "right"))
        rng = np.random.default_rng(2024)
        cells = model.sample_future_outcomes(Event("right"), Horizon(0, 2),
                                             100_000, rng)
        p_goal = cells.count((4, 0)) / 100_000
        assert abs(p_goal - 0.96) <= 0.005
        # total variation against the exact push-forward
        exact = model.exact_future_distribution(Event("right"), Horizon(0, 2))
        tv = 0.5 * sum(abs(cells.count(c) / 100_000 - exact.prob_of(c))
                       for c in exact.outcomes)
        assert tv <= 0.01


class TestActionZScores:
    def test_corridor_goldens(self):
        g = corridor_world(5, 0.2)
        scores = dict(action_z_scores(g, (3, 0), always_policy(g, "right"), 2,
                                      EXACT, actions=("left", "right")))
        # oracle: exact two-step enumeration of both branches
        right = entropy_bits(corridor_future(3, "right", 2).values())
        left = entropy_bits(corridor_future(3, "left", 2).values())
        assert scores["right"].value == pytest.approx(right - left, abs=1e-12)
        assert scores["left"].value == pytest.approx(left - right, abs=1e-12)

    def test_two_action_antisymmetry_everywhere(self):
        g = corridor_world(5, 0.2)
        pol = always_policy(g, "right")
        for x in range(4):
            scores = dict(action_z_scores(g, (x, 0), pol, 4, EXACT,
                                          actions=("left", "right")))
            assert scores["right"].value == pytest.approx(
                -scores["left"].value, abs=1e-12)

    def test_slip_free_all_zero(self):
        g = corridor_world(4, 0.0)
        scores = action_z_scores(g, (1, 0), always_policy(g, "right"), 2, EXACT)
        assert [a for a, _ in scores] == ["down", "left", "right", "up"]
        assert all(z.value == 0.0 for _, z in scores)

    def test_goal_cell_all_zero(self):
        g = corridor_world(5, 0.2)
        scores = action_z_scores(g, (4, 0), always_policy(g, "right"), 3, EXACT)
        assert all(z.value == 0.0 for _, z in scores)

    def test_wall_cell_rejected(self):
        g = GridWorld(3, 3, goal=(2, 2), start=(0, 0), walls={(1, 1)})
        with pytest.raises(CellIsWallError):
            action_z_scores(g, (1, 1), uniform_policy(g), 2, EXACT)


class TestGridWorldModel:
    def test_event_space_respects_restriction(self):
        g = corridor_world(5, 0.2)
        m = GridWorldModel(g, (3, 0), always_policy(g, "right"),
                           actions=("right", "left"))
        assert [e.id for e in m.event_space()] == ["left", "right"]

    def test_rejects_unknown_actions(self):
        g = corridor_world(5, 0.2)
        with pytest.raises(ValueError):
            GridWorldModel(g, (3, 0), always_policy(g, "right"), actions=("jump",))

    def test_distribution_start(self):
        g = corridor_world(4, 0.0)
        start = Distribution.uniform(g.free_cells()[:2])
        m = GridWorldModel(g, start, always_policy(g, "right"))
        d = m.exact_future_distribution(None, Horizon(0, 1))
        assert d.prob_of((1, 0)) == pytest.approx(0.5)
        assert d.prob_of((2, 0)) == pytest.approx(0.5)
