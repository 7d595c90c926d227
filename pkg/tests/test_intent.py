"""Sensing cone, scoring, nudging, suggestions, perspective changes."""

import math

import numpy as np
import pytest

from shared_dof.errors import NoIntentError
from shared_dof.geometry import (
    Pose,
    Twist,
    axis_twist,
    weighted_dot,
    weighted_norm,
    yaw_quat,
)
from shared_dof.intent import (
    Candidate,
    IntentConfig,
    IntentDistribution,
    change_perspective,
    nudge_confidence,
    perspective_offset,
    score,
    sense,
    suggest,
)
from shared_dof.scene import (
    Phase,
    initial_task,
    scenario_from_dict,
)

from test_scene import minimal_raw

SIGMOID_2 = 1.0 / (1.0 + math.exp(-2.0))  # 0.8807970779778824


def cand(cid, pos, dist, cos, kind="object"):
    return Candidate(cid, kind, np.asarray(pos, dtype=float), dist, cos)


class TestSense:
    def test_canonical_start_sees_block(self, canonical):
        found = sense(canonical.start_pose, canonical, Phase.APPROACH)
        assert [c.id for c in found] == ["block_blue"]
        c = found[0]
        # independent recheck of distance and bearing
        delta = canonical.objects[0].position - canonical.start_pose.position
        assert math.isclose(c.distance, np.linalg.norm(delta), rel_tol=1e-12)
        axis = np.array([math.sqrt(0.5), 0.0, -math.sqrt(0.5)])
        expect_cos = float(delta @ axis / np.linalg.norm(delta))
        assert math.isclose(c.bearing_cos, expect_cos, rel_tol=1e-12)

    def test_sorted_by_id_and_symmetric(self, deadlock):
        found = sense(deadlock.start_pose, deadlock, Phase.APPROACH)
        assert [c.id for c in found] == ["block_a", "block_b"]
        a, b = found
        # mirror symmetry must be exact; the distance itself is only as
        # round as the coordinates in the scenario file
        assert a.distance == b.distance
        assert math.isclose(a.distance, 0.5, abs_tol=1e-5)
        assert a.bearing_cos == b.bearing_cos

    def test_phase_selects_kind(self, canonical):
        zones = sense(canonical.start_pose, canonical, Phase.TRANSPORT)
        assert all(c.kind == "zone" for c in zones)
        nothing = sense(canonical.start_pose, canonical, Phase.DONE)
        assert nothing == []

    def test_range_filter(self):
        raw = minimal_raw()
        raw["limits"]["max"] = [5, 5, 5]
        raw["objects"][0]["position"] = [3.0, 0.0, 0.0]  # beyond 1.5 m
        sc = scenario_from_dict(raw)
        assert sense(sc.start_pose, sc, Phase.APPROACH) == []

    def test_cone_filter_excludes_behind(self):
        raw = minimal_raw()
        raw["limits"]["min"] = [-1, -1, -1]
        raw["objects"][0]["position"] = [-0.3, 0.0, 0.2]  # behind the camera
        sc = scenario_from_dict(raw)
        assert sense(sc.start_pose, sc, Phase.APPROACH) == []

    def test_apex_coincident_counts_ahead(self):
        raw = minimal_raw()
        raw["objects"][0]["position"] = [0.0, 0.0, 0.2]  # at the start pose
        sc = scenario_from_dict(raw)
        found = sense(sc.start_pose, sc, Phase.APPROACH)
        assert found[0].distance == 0.0 and found[0].bearing_cos == 1.0

    def test_attached_objects_invisible(self, canonical):
        world = canonical.fresh_world()
        world.objects[0].attached = True
        assert sense(world.start_pose, world, Phase.APPROACH) == []


class TestScore:
    def test_softmax_hand_example(self):
        # scores 0.75 and 0.35 at T=0.2: logit gap 2 -> sigmoid(2)
        cands = [cand("a", [1, 0, 0], 0.75, 1.0),
                 cand("b", [0, 1, 0], 0.75, 0.2)]
        dist = score(cands, IntentConfig())
        assert math.isclose(dist.prob_of("a"), SIGMOID_2, abs_tol=1e-15)
        assert math.isclose(dist.prob_of("a") + dist.prob_of("b"), 1.0,
                            abs_tol=1e-15)

    def test_temperature_scale_invariance(self):
        cands = [cand("a", [1, 0, 0], 0.3, 0.9),
                 cand("b", [0, 1, 0], 0.8, 0.4)]
        base = score(cands, IntentConfig())
        scaled = score(cands, IntentConfig(w_dist=1.0, w_bearing=1.0,
                                           temperature=0.4))
        for (i1, p1), (i2, p2) in zip(base.entries, scaled.entries):
            assert i1 == i2
            assert math.isclose(p1, p2, rel_tol=1e-12)

    def test_empty_raises(self):
        with pytest.raises(NoIntentError):
            score([], IntentConfig())

    def test_tie_break_smallest_id(self):
        dist = IntentDistribution(entries=(("a", 0.5), ("b", 0.5)),
                                  positions={})
        assert dist.top() == ("a", 0.5)

    def test_entries_sorted_by_id(self):
        cands = [cand("zz", [1, 0, 0], 0.5, 0.5),
                 cand("aa", [0, 1, 0], 0.5, 0.5)]
        dist = score(cands, IntentConfig())
        assert [cid for cid, _ in dist.entries] == ["aa", "zz"]


class TestNudge:
    def two_sided(self):
        return IntentDistribution(
            entries=(("left", 0.5), ("right", 0.5)),
            positions={"left": np.array([-1.0, 0.0, 0.0]),
                       "right": np.array([1.0, 0.0, 0.0])})

    def test_opposite_candidates_hand_example(self):
        # push straight at "right" with eta=1: odds shift by e^2
        dist = self.two_sided()
        out = nudge_confidence(dist, Twist(linear=[0.4, 0, 0]),
                               Pose.identity(), eta=1.0)
        assert math.isclose(out.prob_of("right"), SIGMOID_2, abs_tol=1e-15)

    def test_zero_linear_is_identity(self):
        dist = self.two_sided()
        out = nudge_confidence(dist, Twist(angular=[0, 0, 3.0]),
                               Pose.identity(), eta=1.0)
        assert out is dist

    def test_orthogonal_direction_changes_nothing(self):
        dist = self.two_sided()
        out = nudge_confidence(dist, Twist(linear=[0, 1.0, 0]),
                               Pose.identity(), eta=1.0)
        assert math.isclose(out.prob_of("left"), 0.5, abs_tol=1e-15)

    def test_default_eta_comes_from_config(self):
        dist = self.two_sided()
        cfg = IntentConfig(eta=0.0)
        out = nudge_confidence(dist, Twist(linear=[1, 0, 0]),
                               Pose.identity(), cfg=cfg)
        assert math.isclose(out.prob_of("right"), 0.5, abs_tol=1e-15)

    def test_probabilities_stay_normalized(self, rng):
        dist = self.two_sided()
        for _ in range(20):
            dist = nudge_confidence(dist, Twist(linear=rng.normal(size=3)),
                                    Pose.identity(), eta=0.3)
            total = sum(p for _, p in dist.entries)
            assert math.isclose(total, 1.0, abs_tol=1e-12)


class TestSuggest:
    def test_approach_rank1_points_at_pregrasp(self, canonical):
        task = initial_task(canonical)
        dist = score(sense(canonical.start_pose, canonical, Phase.APPROACH),
                     IntentConfig())
        s = suggest(canonical.start_pose, canonical, task, dist, 0)
        assert s.epoch == 1
        assert s.top_candidate_id == "block_blue"
        assert s.confidence == 1.0  # only candidate in view
        assert len(s.ranked) == 2
        # rank 1 is the unit goal direction toward the approach subgoal
        from shared_dof.geometry import goal_twist
        expect = goal_twist(canonical.start_pose, task.subgoal)
        assert weighted_dot(s.ranked[0], expect) > 1.0 - 1e-12

    def test_ranked_pair_is_orthonormal(self, canonical, deadlock):
        for sc in (canonical, deadlock):
            task = initial_task(sc)
            dist = score(sense(sc.start_pose, sc, Phase.APPROACH),
                         IntentConfig())
            s = suggest(sc.start_pose, sc, task, dist, 41)
            assert s.epoch == 42
            assert math.isclose(weighted_norm(s.ranked[0]), 1.0,
                                abs_tol=1e-12)
            if len(s.ranked) == 2:
                assert math.isclose(weighted_norm(s.ranked[1]), 1.0,
                                    abs_tol=1e-12)
                assert abs(weighted_dot(*s.ranked)) < 1e-12

    def test_two_candidates_rank2_is_runner_up(self, deadlock):
        task = initial_task(deadlock)
        gripper = change_perspective(deadlock.start_pose, 0)  # break the tie
        dist = score(sense(gripper, deadlock, Phase.APPROACH), IntentConfig())
        s = suggest(gripper, deadlock, task, dist, 0)
        top_id, _ = dist.top()
        other = "block_b" if top_id == "block_a" else "block_a"
        from shared_dof.geometry import goal_twist
        from shared_dof.scene import approach_subgoal
        alt = goal_twist(gripper, approach_subgoal(
            deadlock.object_by_id(other)))
        # rank 2 = runner-up direction minus its rank-1 component
        residual = weighted_dot(s.ranked[1], alt)
        assert residual > 0.1

    def test_single_candidate_rank2_anticipates_descent(self, canonical):
        task = initial_task(canonical)
        dist = score(sense(canonical.start_pose, canonical, Phase.APPROACH),
                     IntentConfig())
        s = suggest(canonical.start_pose, canonical, task, dist, 0)
        # next phase from the pregrasp hover: descend and close
        assert s.ranked[1].linear[2] < 0.0
        assert s.ranked[1].aperture_rate < 0.0

    def test_grasp_within_tolerance_closes(self, canonical):
        world = canonical.fresh_world()
        task = initial_task(world)
        obj = world.objects[0]
        task.phase = Phase.GRASP
        from shared_dof.scene import grasp_subgoal
        task.subgoal = grasp_subgoal(obj)
        gripper = Pose(obj.position.copy(), obj.orientation.copy(), 0.8)
        dist = score(sense(gripper, world, Phase.GRASP), IntentConfig())
        s = suggest(gripper, world, task, dist, 0)
        close = axis_twist(6, -1.0)
        assert weighted_dot(s.ranked[0], close) > 1.0 - 1e-12

    def test_release_suggests_opening(self, canonical):
        world = canonical.fresh_world()
        task = initial_task(world)
        task.phase = Phase.RELEASE
        gripper = Pose(np.array([0.10, -0.30, 0.08]),
                       yaw_quat(-math.pi / 2), 0.1)
        from shared_dof.scene import release_subgoal
        task.subgoal = release_subgoal(gripper)
        dist = score(sense(gripper, world, Phase.RELEASE), IntentConfig())
        s = suggest(gripper, world, task, dist, 0)
        opening = axis_twist(6, 1.0)
        assert weighted_dot(s.ranked[0], opening) > 1.0 - 1e-12

    def test_empty_distribution_raises(self, canonical):
        task = initial_task(canonical)
        with pytest.raises(NoIntentError):
            suggest(canonical.start_pose, canonical, task,
                    IntentDistribution(), 0)


class TestPerspective:
    def test_offset_schedule(self):
        degs = [math.degrees(perspective_offset(i)) for i in range(4)]
        np.testing.assert_allclose(degs, [15.0, -30.0, 45.0, -60.0],
                                   atol=1e-12)

    def test_change_keeps_position_bits(self, rng):
        from conftest import random_pose
        pose = random_pose(rng)
        out = change_perspective(pose, 2)
        assert np.array_equal(out.position, pose.position)
        assert out.aperture == pose.aperture

    def test_change_left_multiplies_world_yaw(self):
        pose = Pose(np.array([0.3, 0.1, 0.2]), yaw_quat(0.7), 0.5)
        out = change_perspective(pose, 0)
        from shared_dof import kernels
        ref = kernels.quat_canonical(kernels.quat_mul(
            yaw_quat(math.radians(15)), pose.orientation))
        np.testing.assert_allclose(out.orientation, ref, atol=1e-15)

    def test_breaks_deadlock_tie(self, deadlock):
        base = score(sense(deadlock.start_pose, deadlock, Phase.APPROACH),
                     IntentConfig())
        assert base.prob_of("block_a") == base.prob_of("block_b") == 0.5
        turned = change_perspective(deadlock.start_pose, 0)
        dist = score(sense(turned, deadlock, Phase.APPROACH), IntentConfig())
        top_id, top_p = dist.top()
        assert top_p > 0.5
