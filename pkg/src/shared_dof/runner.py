"""Headless session execution for benchmarks and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .control import (
    ControllerConfig,
    SessionState,
    advance,
    exposed_suggestion,
    initial_state,
)
from .scene import Phase, Scenario
from .simuser import SessionView, UserPolicy, decide
from .telemetry import Metrics, RunningMetrics, TickRecord

DEFAULT_MAX_TICKS = 10_000


@dataclass
class RunResult:
    records: list  # empty unless keep_records
    metrics: Metrics
    state: SessionState
    scenario: Scenario


def make_record(state: SessionState, twist, events, dt: float) -> TickRecord:
    """Snapshot the post-advance state under the pre-increment tick index."""
    tick = state.tick - 1
    pending = state.pending_suggestion
    return TickRecord(
        tick=tick,
        sim_time_s=round(tick * dt, 9),
        gripper=state.gripper,
        twist=twist,
        mapping_source=dict(state.mapping.source),
        suggestion_epoch=None if pending is None else pending.epoch,
        suggestion_confidence=None if pending is None else
        round(pending.confidence, 9),
        events=tuple(events),
        phase=state.task.phase.value,
    )


def run_headless(scenario: Scenario, config: ControllerConfig,
                 policy: UserPolicy | None = None, seed: int | None = None,
                 max_ticks: int = DEFAULT_MAX_TICKS,
                 keep_records: bool = True) -> RunResult:
    """Drive one session with a simulated operator until done or max_ticks.

    The scenario is not mutated; each run steps a fresh world copy.
    The RNG is seeded once per run and only the noisy policy draws from
    it, so greedy runs are bitwise seed-independent.
    """
    if policy is None:
        policy = UserPolicy()
    policy.reset()
    world = scenario.fresh_world()
    state = initial_state(world, config, seed=seed)
    rng = np.random.default_rng(state.rng_seed)
    dt = world.tick_dt
    metrics = RunningMetrics(variant=config.variant, scenario=world.name,
                             seed=state.rng_seed, policy=policy.kind)
    records: list = []
    for _ in range(max_ticks):
        if state.task.phase is Phase.DONE:
            break
        view = SessionView(
            tick=state.tick,
            gripper=state.gripper,
            subgoal=state.task.subgoal,
            phase=state.task.phase,
            mapping_columns=state.mapping.columns,
            variant=config.variant,
            exposed=exposed_suggestion(state, config),
        )
        frame = decide(policy, view, rng,
                       config.lambda_rot, config.lambda_grip)
        twist, events = advance(state, frame, world, config)
        record = make_record(state, twist, events, dt)
        metrics.observe(record, dt)
        if keep_records:
            records.append(record)
    return RunResult(records=records, metrics=metrics.finish(),
                     state=state, scenario=world)
