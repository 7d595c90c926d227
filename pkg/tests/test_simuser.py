"""Scripted operator: axis projection, press scheduling, RNG discipline."""

import math

import numpy as np
import pytest

from shared_dof.control import classic_mapping
from shared_dof.errors import InvalidModeError
from shared_dof.geometry import Pose, goal_twist, weighted_dot
from shared_dof.intent import MappingSuggestion
from shared_dof.scene import Phase
from shared_dof.simuser import (
    ACCEPT_MARGIN,
    LOW_PROJECTION,
    MIN_AXIS,
    SessionView,
    UserPolicy,
    decide,
)


def make_view(gripper, subgoal, variant="classic", tick=0, columns=None,
              exposed=None):
    if columns is None:
        columns = classic_mapping(1).columns
    return SessionView(tick=tick, gripper=gripper, subgoal=subgoal,
                       phase=Phase.APPROACH, mapping_columns=columns,
                       variant=variant, exposed=exposed)


def pose(x=0.0, y=0.0, z=0.0, aperture=1.0):
    return Pose(position=np.array([x, y, z]),
                orientation=np.array([1.0, 0.0, 0.0, 0.0]),
                aperture=aperture)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


class TestPolicyConfig:
    def test_unknown_kind(self):
        with pytest.raises(InvalidModeError):
            UserPolicy(kind="oracle")

    def test_negative_delay(self):
        with pytest.raises(ValueError):
            UserPolicy(reaction_delay_ticks=-1)

    def test_reset_clears_queue(self):
        p = UserPolicy()
        p._pending.append((3, "accept"))
        p.reset()
        assert p._pending == []


class TestGreedyAxes:
    def test_axes_are_projections(self, rng):
        view = make_view(pose(), pose(x=0.3, y=0.4))
        frame = decide(UserPolicy(), view, rng)
        desired = goal_twist(view.gripper, view.subgoal)
        assert frame.axis0 == pytest.approx(
            weighted_dot(desired, view.mapping_columns[0]))
        assert frame.axis1 == pytest.approx(
            weighted_dot(desired, view.mapping_columns[1]))
        # moving toward (0.3, 0.4): the direction itself is unit, so the
        # two axes trace its xy components
        assert frame.axis0 == pytest.approx(0.6)
        assert frame.axis1 == pytest.approx(0.8)

    def test_deadband_zeroes_tiny_components(self, rng):
        # almost straight along x: y component under the deadband
        view = make_view(pose(), pose(x=1.0, y=0.01))
        frame = decide(UserPolicy(), view, rng)
        assert abs(frame.axis1) < MIN_AXIS or frame.axis1 == 0.0
        assert frame.axis1 == 0.0
        assert frame.axis0 == pytest.approx(1.0, abs=1e-4)

    def test_single_column_mapping_uses_axis0_only(self, rng):
        view = make_view(pose(aperture=1.0), pose(aperture=0.0),
                         columns=classic_mapping(4).columns)
        frame = decide(UserPolicy(), view, rng)
        assert frame.axis0 == pytest.approx(-1.0)
        assert frame.axis1 == 0.0

    def test_at_subgoal_goes_idle(self, rng):
        here = pose(x=0.1)
        view = make_view(here, here.copy())
        frame = decide(UserPolicy(), view, rng)
        assert frame.idle
        assert frame.source == "simulated"


class TestPressScheduling:
    def test_classic_low_projection_schedules_mode_switch(self, rng):
        # subgoal straight down: orthogonal to the xy columns of M1
        policy = UserPolicy(reaction_delay_ticks=4)
        view = make_view(pose(z=0.5), pose(z=0.0), tick=10)
        frame = decide(policy, view, rng)
        assert not frame.mode_switch  # not due yet
        assert policy._pending == [(14, "mode_switch")]
        # press fires once the tick catches up, queue drains
        for t in range(11, 15):
            frame = decide(policy, make_view(pose(z=0.5), pose(z=0.0),
                                             tick=t), rng)
        assert frame.mode_switch
        assert policy._pending == []

    def test_single_press_in_flight(self, rng):
        policy = UserPolicy(reaction_delay_ticks=10)
        for t in range(5):
            decide(policy, make_view(pose(z=0.5), pose(z=0.0), tick=t), rng)
        assert len(policy._pending) == 1
        assert policy._pending[0] == (10, "mode_switch")

    def test_good_projection_never_schedules(self, rng):
        policy = UserPolicy()
        view = make_view(pose(), pose(x=1.0))
        decide(policy, view, rng)
        assert policy._pending == []

    def test_request_variant_presses_request(self, rng):
        policy = UserPolicy(reaction_delay_ticks=0)
        view = make_view(pose(z=0.5), pose(z=0.0), variant="admc_request")
        frame = decide(policy, view, rng)
        assert frame.request and not frame.mode_switch

    def test_idle_variant_never_presses(self, rng):
        policy = UserPolicy(reaction_delay_ticks=0)
        view = make_view(pose(z=0.5), pose(z=0.0), variant="admc_idle")
        frame = decide(policy, view, rng)
        assert not frame.any_button
        assert policy._pending == []


class TestAcceptRule:
    def suggestion(self, view):
        rank1 = goal_twist(view.gripper, view.subgoal)
        return MappingSuggestion(epoch=1, ranked=(rank1,), confidence=0.9,
                                 top_candidate_id="block")

    def test_accepts_when_gain_clears_margin(self, rng):
        policy = UserPolicy(reaction_delay_ticks=0)
        view = make_view(pose(z=0.5), pose(z=0.0), variant="admc_continuous")
        view = make_view(pose(z=0.5), pose(z=0.0), variant="admc_continuous",
                         exposed=self.suggestion(view))
        frame = decide(policy, view, rng)
        # active span projection ~0 vs suggested gain ~1
        assert frame.accept

    def test_no_accept_without_exposure(self, rng):
        policy = UserPolicy(reaction_delay_ticks=0)
        view = make_view(pose(z=0.5), pose(z=0.0), variant="admc_continuous")
        frame = decide(policy, view, rng)
        assert not frame.accept
        assert policy._pending == []

    def test_no_accept_when_gain_marginal(self, rng):
        # desired along x, already served by M1; suggestion parallel to it
        policy = UserPolicy(reaction_delay_ticks=0)
        view = make_view(pose(), pose(x=1.0), variant="admc_continuous")
        suggestion = self.suggestion(view)
        view = make_view(pose(), pose(x=1.0), variant="admc_continuous",
                         exposed=suggestion)
        frame = decide(policy, view, rng)
        assert not frame.accept  # gain 1.0 vs projection 1.0 + margin

    def test_margin_arithmetic(self):
        # the rule compares |<d, s1>| against projection + margin
        assert ACCEPT_MARGIN == 0.05
        assert LOW_PROJECTION == 0.2


class TestRngDiscipline:
    def test_greedy_never_draws(self):
        rng = np.random.default_rng(123)
        baseline = rng.bit_generator.state
        view = make_view(pose(z=0.5), pose(z=0.0))
        decide(UserPolicy(), view, rng)
        assert rng.bit_generator.state == baseline

    def test_noisy_draws_and_perturbs(self):
        rng = np.random.default_rng(123)
        view = make_view(pose(), pose(x=0.3, y=0.4))
        clean = decide(UserPolicy(), view, np.random.default_rng(123))
        noisy = decide(UserPolicy(kind="noisy", noise_std=0.05), view, rng)
        assert rng.bit_generator.state != np.random.default_rng(
            123).bit_generator.state
        assert noisy.axis0 != clean.axis0 or noisy.axis1 != clean.axis1

    def test_noisy_reproducible_per_seed(self):
        view = make_view(pose(), pose(x=0.3, y=0.4))
        a = decide(UserPolicy(kind="noisy"), view, np.random.default_rng(9))
        b = decide(UserPolicy(kind="noisy"), view, np.random.default_rng(9))
        assert (a.axis0, a.axis1) == (b.axis0, b.axis1)
