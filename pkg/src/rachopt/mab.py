"""Cross-entropy multi-armed bandit over access-probability action spaces.

Each pull samples an action from a distribution ``p_as``, simulates ``t``
slots, turns the empirical throughputs into a scalar reward (scaled, and
penalized by ``rho`` when the low class misses its floor), and folds the
reward into a running per-action mean Q.  After every batch the
cross-entropy step re-fits ``p_as`` toward the actions holding the highest
Q snapshots seen during the batch, smoothed by ``alpha``.

Nothing resets on a load change, which is what lets a running bandit track a
non-stationary network; only the reward scale is re-derived per phase.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .actionspace import ActionSpace, CompactKind
from .exact import scaling_reference
from .model import NetworkConfig, ThroughputPair
from .simulate import sim_throughput

__all__ = [
    "MabConfig",
    "MabState",
    "PullRecord",
    "MabResult",
    "reward",
    "q_update",
    "ce_update",
    "smooth",
    "run",
    "run_nonstationary",
    "estimate_load",
    "mae_trace",
    "save_mab_trace",
    "load_mab_trace",
]

log = logging.getLogger(__name__)

ThroughputFn = Callable[[NetworkConfig, object, int, int], ThroughputPair]


@dataclass(frozen=True)
class MabConfig:
    """Bandit hyperparameters.

    ``runs`` pulls are consumed in ``runs // batch_size`` whole batches;
    leftovers are dropped.  ``elite_fraction`` of each batch feeds the
    cross-entropy refit and ``alpha`` blends it into the sampling
    distribution.
    """

    gamma: float = 0.0
    rho: float = 0.0
    t: int = 1000
    runs: int = 15000
    batch_size: int = 500
    elite_fraction: float = 0.1
    alpha: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.batch_size < 1 or self.runs < self.batch_size:
            raise ValueError(
                f"need runs >= batch_size >= 1, got {self.runs}, {self.batch_size}"
            )
        if not 0 < self.elite_fraction <= 1:
            raise ValueError(f"elite_fraction {self.elite_fraction} outside (0, 1]")
        if self.elite_size < 1:
            raise ValueError("elite_fraction keeps no records per batch")
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha {self.alpha} outside [0, 1]")
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")
        if self.rho < 0 or self.gamma < 0:
            raise ValueError("rho and gamma must be >= 0")

    @property
    def n_batches(self) -> int:
        return self.runs // self.batch_size

    @property
    def elite_size(self) -> int:
        return int(self.elite_fraction * self.batch_size)


@dataclass
class MabState:
    """Running per-action statistics: mean reward q, pull counts v, and the
    action-sampling distribution."""

    q: np.ndarray
    v: np.ndarray
    p_as: np.ndarray

    @staticmethod
    def fresh(size: int) -> "MabState":
        return MabState(
            q=np.zeros(size),
            v=np.zeros(size, dtype=np.int64),
            p_as=np.full(size, 1.0 / size),
        )


@dataclass(frozen=True)
class PullRecord:
    pull: int
    action_index: int
    mu_h_t: float
    mu_l_t: float
    reward: float


@dataclass
class MabResult:
    """Trace and final statistics of one bandit run."""

    trace: tuple[PullRecord, ...]
    state: MabState
    best_index: int
    batch_size: int

    @property
    def q(self) -> np.ndarray:
        return self.state.q

    @property
    def v(self) -> np.ndarray:
        return self.state.v


def reward(mu_h_t: float, mu_l_t: float, gamma: float, rho: float, scale: float) -> float:
    """Scaled high-class throughput, cut to a fraction ``rho`` when the
    empirical low-class throughput misses the floor."""
    r = mu_h_t if mu_l_t >= gamma else rho * mu_h_t
    return r / scale


def q_update(state: MabState, idx: int, r: float) -> float:
    """Fold one reward into the running mean of action ``idx``; returns the
    updated q value."""
    state.v[idx] += 1
    state.q[idx] += (r - state.q[idx]) / state.v[idx]
    return float(state.q[idx])


def ce_update(size: int, elite: int, records: Sequence[tuple[int, float]]) -> np.ndarray:
    """Refit distribution from a batch of (action_index, q_snapshot) records.

    Records are ranked by snapshot descending -- earlier records win ties,
    which the stable sort provides -- and the top ``elite`` of them vote with
    equal weight.
    """
    if elite < 1 or elite > len(records):
        raise ValueError(f"elite {elite} outside 1..{len(records)}")
    ranked = sorted(records, key=lambda rec: -rec[1])
    p = np.zeros(size)
    for idx, _ in ranked[:elite]:
        p[idx] += 1.0
    return p / elite


def smooth(p: np.ndarray, p_new: np.ndarray, alpha: float) -> np.ndarray:
    """Convex blend keeping some mass on previously favored actions."""
    return (1.0 - alpha) * p + alpha * p_new


def _phase_scale(cfg: NetworkConfig) -> float:
    try:
        return scaling_reference(cfg)
    except ValueError as exc:
        log.warning("rewards left unscaled for %s: %s", cfg, exc)
        return 1.0


def _sim_seed(master_seed: int, pull: int) -> int:
    words = np.random.SeedSequence(
        entropy=master_seed, spawn_key=(1, pull)
    ).generate_state(2, dtype=np.uint64)
    return int(words[0]) | (int(words[1]) << 64)


def run_nonstationary(
    space: ActionSpace,
    schedule: Sequence[tuple[int, NetworkConfig]],
    mcfg: MabConfig,
    throughput_fn: Optional[ThroughputFn] = None,
) -> MabResult:
    """Run the bandit while the true load follows ``schedule``.

    ``schedule`` lists (first_pull, cfg) entries, starting at pull 0 with
    strictly increasing switch points.  State is carried across switches
    untouched; the reward scale is re-derived for each phase.
    """
    if not schedule or schedule[0][0] != 0:
        raise ValueError("schedule must start at pull 0")
    switches = [s for s, _ in schedule]
    if any(b <= a for a, b in zip(switches, switches[1:])):
        raise ValueError("schedule switch points must be strictly increasing")
    for _, cfg in schedule:
        if cfg.m != _space_m(space):
            raise ValueError(f"schedule cfg {cfg} does not match space m")
    sim = throughput_fn if throughput_fn is not None else sim_throughput

    size = len(space)
    state = MabState.fresh(size)
    action_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=mcfg.seed, spawn_key=(0,))
    )
    trace: list[PullRecord] = []

    phase = -1
    cfg = schedule[0][1]
    scale = 1.0
    pull = 0
    for _batch in range(mcfg.n_batches):
        cum = np.cumsum(state.p_as)
        cum[-1] = 1.0
        uniforms = action_rng.random(mcfg.batch_size)
        records: list[tuple[int, float]] = []
        for u in uniforms:
            while phase + 1 < len(schedule) and pull >= schedule[phase + 1][0]:
                phase += 1
                cfg = schedule[phase][1]
                scale = _phase_scale(cfg)
            idx = int(np.searchsorted(cum, u, side="right"))
            if idx >= size:
                idx = size - 1
            mu = sim(cfg, space.actions[idx].pair, mcfg.t, _sim_seed(mcfg.seed, pull))
            r = reward(mu.mu_h, mu.mu_l, mcfg.gamma, mcfg.rho, scale)
            snapshot = q_update(state, idx, r)
            records.append((idx, snapshot))
            trace.append(PullRecord(pull, idx, mu.mu_h, mu.mu_l, r))
            pull += 1
        p_new = ce_update(size, mcfg.elite_size, records)
        state.p_as = smooth(state.p_as, p_new, mcfg.alpha)
    best = int(np.argmax(state.q))
    return MabResult(
        trace=tuple(trace), state=state, best_index=best, batch_size=mcfg.batch_size
    )


def run(
    space: ActionSpace,
    cfg: NetworkConfig,
    mcfg: MabConfig,
    throughput_fn: Optional[ThroughputFn] = None,
) -> MabResult:
    """Stationary-load bandit run."""
    return run_nonstationary(space, [(0, cfg)], mcfg, throughput_fn)


def _space_m(space: ActionSpace) -> int:
    return space.actions[0].pair.m


def estimate_load(space: ActionSpace, result: MabResult) -> tuple[int, int]:
    """Read the load estimate off a compact-space run: the cell label of the
    best action."""
    if not isinstance(space.kind, CompactKind) or space.entries is None:
        raise TypeError("load estimation needs a compact space")
    entry = space.entries[result.best_index]
    return entry.n_h, entry.n_l


def mae_trace(
    space: ActionSpace, result: MabResult, true_cfg: NetworkConfig
) -> np.ndarray:
    """Mean absolute load-estimation error after every pull.

    Replays the q evolution from the trace; the estimate at pull p is the
    cell of the best action so far (ties toward the lowest index).
    """
    if not isinstance(space.kind, CompactKind) or space.entries is None:
        raise TypeError("load estimation needs a compact space")
    q = np.zeros(len(space))
    v = np.zeros(len(space), dtype=np.int64)
    out = np.empty(len(result.trace))
    for i, rec in enumerate(result.trace):
        v[rec.action_index] += 1
        q[rec.action_index] += (rec.reward - q[rec.action_index]) / v[rec.action_index]
        entry = space.entries[int(np.argmax(q))]
        out[i] = 0.5 * (
            abs(entry.n_h - true_cfg.n_h) + abs(entry.n_l - true_cfg.n_l)
        )
    return out


def save_mab_trace(result: MabResult, path: Union[str, Path]) -> None:
    """CSV trace, one row per pull, with batch boundaries as comments."""
    with open(path, "w", newline="") as fh:
        fh.write("pull,action_index,mu_h_T,mu_l_T,reward\n")
        writer = csv.writer(fh)
        for i, rec in enumerate(result.trace):
            if i % result.batch_size == 0:
                fh.write(f"# batch {i // result.batch_size}\n")
            writer.writerow(
                [rec.pull, rec.action_index, repr(rec.mu_h_t), repr(rec.mu_l_t), repr(rec.reward)]
            )


def load_mab_trace(path: Union[str, Path]) -> list[PullRecord]:
    """Read back a pull trace, skipping comment lines."""
    records: list[PullRecord] = []
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != "pull,action_index,mu_h_T,mu_l_T,reward":
            raise ValueError(f"unrecognized trace header {header!r}")
        for row in csv.reader(line for line in fh if not line.startswith("#")):
            if not row:
                continue
            records.append(
                PullRecord(
                    int(row[0]), int(row[1]), float(row[2]), float(row[3]), float(row[4])
                )
            )
    return records
