"""Action spaces for bandit-based access-probability selection.

Two families:

* discretized -- every pair of probability vectors on the grid
  {0, 1/q, ..., 1} with exact unit sum, optionally reduced to one
  representative per joint-rotation orbit (rotating both vectors by the same
  offset relabels RBs without changing any throughput);
* compact -- a lookup table of optimizer solutions indexed by candidate load
  (n_h, n_l), so the bandit searches over loads instead of raw vectors.

Grid actions carry exact integer numerators; all deduplication compares
numerators, never floats.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .exact import compositions, throughput_closed_form
from .model import (
    AccessProbabilityPair,
    NetworkConfig,
    ThroughputPair,
    min_rotation_shift,
)

__all__ = [
    "DEFAULT_ACTION_CAP",
    "GridSpec",
    "Action",
    "DiscretizedKind",
    "CompactKind",
    "CompactEntry",
    "ActionSpace",
    "full_space_size",
    "generate_discretized",
    "reduce_circular",
    "is_circular_shift",
    "build_compact",
    "save_compact",
    "load_compact",
    "exact_throughputs",
]

# Refuse to materialize more grid actions than this.
DEFAULT_ACTION_CAP = 1_000_000

# Stored throughputs must match a fresh exact evaluation this tightly.
_TABLE_MU_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Probability grid with step d = 1/q over m RBs."""

    m: int
    d: float

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        q = round(1.0 / self.d)
        if q < 1 or abs(1.0 / self.d - q) > 1e-9:
            raise ValueError(f"grid step {self.d} is not the inverse of an integer")

    @property
    def q(self) -> int:
        return round(1.0 / self.d)


@dataclass(frozen=True)
class Action:
    """One selectable access-probability pair.

    Grid actions keep their integer numerators (over the common denominator
    q) so equality and rotation checks stay exact.
    """

    pair: AccessProbabilityPair
    num_h: Optional[tuple[int, ...]] = None
    num_l: Optional[tuple[int, ...]] = None
    q: Optional[int] = None

    def key(self) -> tuple:
        if self.num_h is not None:
            return (self.num_h, self.num_l)
        return (self.pair.p_h, self.pair.p_l)


@dataclass(frozen=True)
class DiscretizedKind:
    m: int
    d: float
    reduced: bool


@dataclass(frozen=True)
class CompactKind:
    m: int
    n_h_max: int
    n_l_max: int
    gamma: float


@dataclass(frozen=True)
class CompactEntry:
    """One compact-table cell: the stored allocation for a candidate load."""

    n_h: int
    n_l: int
    pair: AccessProbabilityPair
    mu_h: float
    mu_l: float


@dataclass
class ActionSpace:
    """Ordered collection of actions plus a key -> position map.

    Discretized spaces key actions by their exact numerators (canonical
    numerators when reduced); compact spaces key by the (n_h, n_l) cell.
    """

    kind: Union[DiscretizedKind, CompactKind]
    actions: tuple[Action, ...]
    index: dict
    entries: Optional[tuple[CompactEntry, ...]] = None

    @property
    def size(self) -> int:
        return len(self.actions)

    def __len__(self) -> int:
        return len(self.actions)

    def __getitem__(self, i: int) -> Action:
        return self.actions[i]

    def position_of(self, action: Action) -> int:
        """Position of an action, canonicalizing grid numerators when the
        space stores orbit representatives."""
        if isinstance(self.kind, DiscretizedKind) and action.num_h is not None:
            key = (action.num_h, action.num_l)
            if self.kind.reduced:
                key = _canonical_numerators(action.num_h, action.num_l)
            return self.index[key]
        return self.index[action.key()]

    def infeasible_cells(self) -> frozenset[tuple[int, int]]:
        """Compact cells whose stored allocation misses the low-class floor."""
        if not isinstance(self.kind, CompactKind) or self.entries is None:
            return frozenset()
        gamma = self.kind.gamma
        return frozenset(
            (e.n_h, e.n_l) for e in self.entries if e.mu_l < gamma - 1e-6
        )


def _canonical_numerators(
    num_h: Sequence[int], num_l: Sequence[int]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    s = min_rotation_shift(num_h, num_l)
    m = len(num_h)
    return (
        tuple(num_h[(i + s) % m] for i in range(m)),
        tuple(num_l[(i + s) % m] for i in range(m)),
    )


def _grid_action(num_h: tuple[int, ...], num_l: tuple[int, ...], q: int) -> Action:
    pair = AccessProbabilityPair(
        tuple(n / q for n in num_h), tuple(n / q for n in num_l)
    )
    return Action(pair, num_h, num_l, q)


def full_space_size(spec: GridSpec) -> int:
    """Number of grid pairs before any reduction."""
    per_vector = math.comb(spec.q + spec.m - 1, spec.m - 1)
    return per_vector * per_vector


def generate_discretized(
    spec: GridSpec, reduced: bool = False, cap: int = DEFAULT_ACTION_CAP
) -> ActionSpace:
    """Materialize the grid space in lexicographic numerator order.

    With ``reduced`` each joint-rotation orbit keeps only its
    lexicographically smallest member, which preserves the overall ordering
    and makes the result independent of generation order.
    """
    total = full_space_size(spec)
    if total > cap:
        raise ValueError(f"{total} grid actions exceeds cap {cap}")
    comps = [tuple(c) for c in compositions(spec.q, spec.m)]
    actions: list[Action] = []
    index: dict = {}
    for u in comps:
        for v in comps:
            if reduced and min_rotation_shift(u, v) != 0:
                continue
            pos = len(actions)
            actions.append(_grid_action(u, v, spec.q))
            index[(u, v)] = pos
    return ActionSpace(
        kind=DiscretizedKind(spec.m, spec.d, reduced),
        actions=tuple(actions),
        index=index,
    )


def reduce_circular(space: ActionSpace) -> ActionSpace:
    """Collapse a discretized space to joint-rotation orbit representatives."""
    if not isinstance(space.kind, DiscretizedKind):
        raise TypeError("reduce_circular expects a discretized space")
    if space.kind.reduced:
        return space
    seen: dict = {}
    for action in space.actions:
        key = _canonical_numerators(action.num_h, action.num_l)
        if key not in seen:
            seen[key] = key
    actions = []
    index: dict = {}
    for key in sorted(seen):
        num_h, num_l = key
        index[key] = len(actions)
        actions.append(_grid_action(num_h, num_l, space.actions[0].q))
    return ActionSpace(
        kind=DiscretizedKind(space.kind.m, space.kind.d, True),
        actions=tuple(actions),
        index=index,
    )


def is_circular_shift(candidate: Action, existing: Iterable[Action]) -> bool:
    """True iff some joint rotation of ``candidate`` equals a member of
    ``existing`` (exact comparison, numerators when available)."""
    keys = {a.key() for a in existing}
    if candidate.num_h is not None:
        row_h: Sequence = candidate.num_h
        row_l: Sequence = candidate.num_l
    else:
        row_h, row_l = candidate.pair.p_h, candidate.pair.p_l
    m = len(row_h)
    for s in range(m):
        rot = (
            tuple(row_h[(i + s) % m] for i in range(m)),
            tuple(row_l[(i + s) % m] for i in range(m)),
        )
        if rot in keys:
            return True
    return False


# ------------------------------------------------------------- compact table


def build_compact(
    m: int,
    n_h_max: int,
    n_l_max: int,
    gamma: float,
    opt: Optional[Callable[[NetworkConfig, float], "object"]] = None,
) -> ActionSpace:
    """Solve the constrained allocation problem for every candidate load in
    [0, n_h_max] x [0, n_l_max] and store the solutions as a lookup table.

    ``opt`` maps (cfg, gamma) to an optimizer result carrying ``pair`` and
    ``mu`` attributes; the default is :func:`rachopt.optimize.solve`.  Cells
    with n_h = 0 have identically zero objective, so any feasible vector
    works and p_h is stored uniform by convention.  Cells where the
    constraint cannot be met (n_l = 0 with gamma > 0) keep the best-attained
    allocation and are reported by :meth:`ActionSpace.infeasible_cells`.
    """
    if opt is None:
        from .optimize import solve as opt  # deferred: optimize imports exact too

    entries: list[CompactEntry] = []
    actions: list[Action] = []
    index: dict = {}
    uniform = AccessProbabilityPair.uniform(m)
    for n_h in range(n_h_max + 1):
        for n_l in range(n_l_max + 1):
            cfg = NetworkConfig(n_h, n_l, m)
            if n_h == 0 and (n_l == 0 or gamma == 0.0):
                pair = uniform
            else:
                result = opt(cfg, gamma)
                pair = result.pair
                if n_h == 0:
                    # objective is identically zero and p_h does not touch
                    # mu_l, so normalize the stored vector
                    pair = AccessProbabilityPair(uniform.p_h, pair.p_l)
            mu = throughput_closed_form(cfg, pair)
            pos = len(actions)
            index[(n_h, n_l)] = pos
            actions.append(Action(pair))
            entries.append(CompactEntry(n_h, n_l, pair, mu.mu_h, mu.mu_l))
    return ActionSpace(
        kind=CompactKind(m, n_h_max, n_l_max, gamma),
        actions=tuple(actions),
        index=index,
        entries=tuple(entries),
    )


def save_compact(space: ActionSpace, path: Union[str, Path]) -> None:
    """Write a compact table as CSV with 12-significant-digit values."""
    if not isinstance(space.kind, CompactKind) or space.entries is None:
        raise TypeError("save_compact expects a compact space")
    m = space.kind.m
    header = (
        ["m", "n_h", "n_l", "gamma"]
        + [f"p_h_{i + 1}" for i in range(m)]
        + [f"p_l_{i + 1}" for i in range(m)]
        + ["mu_h", "mu_l"]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for e in space.entries:
            row = [m, e.n_h, e.n_l, f"{space.kind.gamma:.12g}"]
            row += [f"{x:.12g}" for x in e.pair.p_h]
            row += [f"{x:.12g}" for x in e.pair.p_l]
            row += [f"{e.mu_h:.12g}", f"{e.mu_l:.12g}"]
            writer.writerow(row)


def load_compact(path: Union[str, Path]) -> ActionSpace:
    """Read a compact table, revalidating every stored throughput against a
    fresh exact evaluation."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    if len(header) < 6 or header[:4] != ["m", "n_h", "n_l", "gamma"]:
        raise ValueError(f"unrecognized compact-table header in {path}")
    m = (len(header) - 6) // 2
    if len(header) != 6 + 2 * m:
        raise ValueError(f"malformed compact-table header in {path}")

    entries: list[CompactEntry] = []
    actions: list[Action] = []
    index: dict = {}
    gamma = None
    for r in rows:
        row_m = int(r[0])
        if row_m != m:
            raise ValueError(f"row m={row_m} disagrees with header m={m}")
        n_h, n_l = int(r[1]), int(r[2])
        row_gamma = float(r[3])
        if gamma is None:
            gamma = row_gamma
        elif row_gamma != gamma:
            raise ValueError("rows disagree on gamma")
        p_h = tuple(float(x) for x in r[4 : 4 + m])
        p_l = tuple(float(x) for x in r[4 + m : 4 + 2 * m])
        pair = AccessProbabilityPair(p_h, p_l)
        mu_h, mu_l = float(r[4 + 2 * m]), float(r[5 + 2 * m])
        mu = throughput_closed_form(NetworkConfig(n_h, n_l, m), pair)
        if abs(mu.mu_h - mu_h) > _TABLE_MU_TOL or abs(mu.mu_l - mu_l) > _TABLE_MU_TOL:
            raise ValueError(
                f"stored throughput for cell ({n_h}, {n_l}) fails revalidation"
            )
        if (n_h, n_l) in index:
            raise ValueError(f"duplicate cell ({n_h}, {n_l})")
        index[(n_h, n_l)] = len(actions)
        actions.append(Action(pair))
        entries.append(CompactEntry(n_h, n_l, pair, mu_h, mu_l))
    if gamma is None:
        raise ValueError(f"empty compact table in {path}")
    n_h_max = max(e.n_h for e in entries)
    n_l_max = max(e.n_l for e in entries)
    if len(entries) != (n_h_max + 1) * (n_l_max + 1):
        raise ValueError("compact table does not cover a full load rectangle")
    return ActionSpace(
        kind=CompactKind(m, n_h_max, n_l_max, gamma),
        actions=tuple(actions),
        index=index,
        entries=tuple(entries),
    )


def exact_throughputs(space: ActionSpace, cfg: NetworkConfig) -> np.ndarray:
    """Exact (mu_h, mu_l) for every action under ``cfg``, vectorized.

    Returns an array of shape (size, 2) in action order.
    """
    a = np.array([act.pair.p_h for act in space.actions], dtype=float)
    b = np.array([act.pair.p_l for act in space.actions], dtype=float)
    n_h, n_l = cfg.n_h, cfg.n_l
    if n_h:
        mu_h = (n_h * a * (1.0 - a) ** (n_h - 1) * (1.0 - b) ** n_l).sum(axis=1)
    else:
        mu_h = np.zeros(len(space.actions))
    if n_l:
        mu_l = (n_l * b * (1.0 - b) ** (n_l - 1) * (1.0 - a) ** n_h).sum(axis=1)
    else:
        mu_l = np.zeros(len(space.actions))
    return np.stack([mu_h, mu_l], axis=1)
