"""Exact throughput computation for the two-priority random-access channel.

Two independent routes to the same quantity:

* :func:`throughput_closed_form` -- per-RB success probabilities summed over
  RBs; O(m) and used everywhere by default.
* :func:`throughput_by_pattern_sum` -- enumerate every feasible access
  pattern, weight its success counts by the pattern probability obtained from
  multinomial occupancy sums.  Exponential in m; kept as a cross-check.

Both treat ``0 ** 0`` as 1 (an RB with zero access probability is simply
never chosen).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .model import (
    AccessPattern,
    AccessProbabilityPair,
    NetworkConfig,
    SlotEvent,
    ThroughputPair,
)

__all__ = [
    "ENUMERATION_CAP",
    "EnumerationCapExceeded",
    "PatternSet",
    "compositions",
    "multinomial_pmf",
    "throughput_closed_form",
    "enumerate_patterns",
    "pattern_probability",
    "throughput_by_pattern_sum",
    "scaling_allocation",
    "scaling_reference",
]

# Hard ceiling on occupancy-pair enumeration work for the pattern-sum route.
ENUMERATION_CAP = 10_000_000

# Multinomial coefficients are computed as exact integers up to this n;
# larger populations fall back to log-gamma.
_EXACT_COEF_MAX_N = 20


class EnumerationCapExceeded(RuntimeError):
    """Pattern-sum enumeration would exceed the configured cap."""


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` non-negative ints summing to ``total``, in
    lexicographic order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in compositions(total - head, parts - 1):
            yield (head,) + rest


def _log_multinomial_coef(n: int, counts: Sequence[int]) -> float:
    return math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in counts)


def _multinomial_coef(n: int, counts: Sequence[int]) -> int:
    coef = 1
    remaining = n
    for c in counts:
        coef *= math.comb(remaining, c)
        remaining -= c
    return coef


def multinomial_pmf(n: int, counts: Sequence[int], probs: Sequence[float]) -> float:
    """P(multinomial(n, probs) == counts).

    Exact integer coefficients for n <= 20, log-space beyond.  A zero
    probability with a positive count gives 0 exactly.
    """
    if sum(counts) != n:
        raise ValueError(f"counts sum to {sum(counts)}, expected {n}")
    if len(counts) != len(probs):
        raise ValueError("counts and probs must have equal length")
    if n == 0:
        return 1.0
    for c, p in zip(counts, probs):
        if c > 0 and p == 0.0:
            return 0.0
    if n <= _EXACT_COEF_MAX_N:
        prob = float(_multinomial_coef(n, counts))
        for c, p in zip(counts, probs):
            if c:
                prob *= p**c
        return prob
    log_prob = _log_multinomial_coef(n, counts)
    log_prob += sum(c * math.log(p) for c, p in zip(counts, probs) if c)
    return math.exp(log_prob)


def throughput_closed_form(
    cfg: NetworkConfig, pair: AccessProbabilityPair
) -> ThroughputPair:
    """Expected successes per slot for each class.

    RB ``i`` carries a high success iff exactly one of the n_h devices picks
    it and no low-priority device does; summing the per-RB probabilities over
    i gives the slot expectation.  fsum keeps the result invariant under any
    joint permutation of the RBs.
    """
    if pair.m != cfg.m:
        raise ValueError(f"pair has m={pair.m}, config has m={cfg.m}")
    n_h, n_l = cfg.n_h, cfg.n_l
    a, b = pair.p_h, pair.p_l
    if n_h == 0:
        mu_h = 0.0
    else:
        mu_h = math.fsum(
            n_h * a[i] * (1.0 - a[i]) ** (n_h - 1) * (1.0 - b[i]) ** n_l
            for i in range(cfg.m)
        )
    if n_l == 0:
        mu_l = 0.0
    else:
        mu_l = math.fsum(
            n_l * b[i] * (1.0 - b[i]) ** (n_l - 1) * (1.0 - a[i]) ** n_h
            for i in range(cfg.m)
        )
    return ThroughputPair(mu_h, mu_l)


@dataclass(frozen=True)
class PatternSet:
    """Every access pattern a configuration can produce, in lexicographic
    order of the pattern's character serialization."""

    cfg: NetworkConfig
    patterns: tuple[AccessPattern, ...]

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)


def _feasible_counts(cfg: NetworkConfig, n_high: int, n_low: int, n_coll: int) -> bool:
    # Devices not accounted for by singleton successes must fill the
    # collision RBs, at least two per collision.
    if n_high > cfg.n_h or n_low > cfg.n_l:
        return False
    rest = cfg.n - n_high - n_low
    if rest < 2 * n_coll:
        return False
    return (rest == 0) == (n_coll == 0)


# Recursion order gives lexicographic serialization order: h < l < o < x.
_TAG_ORDER = (
    SlotEvent.HIGH_SUCCESS,
    SlotEvent.LOW_SUCCESS,
    SlotEvent.EMPTY,
    SlotEvent.COLLISION,
)


def enumerate_patterns(cfg: NetworkConfig) -> PatternSet:
    """All feasible patterns for ``cfg``; every device transmits, so leftover
    devices force collisions and empty slots are only possible when the
    singleton successes absorb the whole population."""
    out: list[AccessPattern] = []
    prefix: list[SlotEvent] = []

    def rec(i: int, n_high: int, n_low: int, n_coll: int) -> None:
        if n_high > cfg.n_h or n_low > cfg.n_l:
            return
        if i == cfg.m:
            if _feasible_counts(cfg, n_high, n_low, n_coll):
                out.append(AccessPattern(tuple(prefix)))
            return
        for tag in _TAG_ORDER:
            prefix.append(tag)
            rec(
                i + 1,
                n_high + (tag is SlotEvent.HIGH_SUCCESS),
                n_low + (tag is SlotEvent.LOW_SUCCESS),
                n_coll + (tag is SlotEvent.COLLISION),
            )
            prefix.pop()

    rec(0, 0, 0, 0)
    return PatternSet(cfg, tuple(out))


def pattern_probability(
    cfg: NetworkConfig, pair: AccessProbabilityPair, pattern: AccessPattern
) -> float:
    """P(slot produces ``pattern``) under independent per-device RB choices.

    Sums the joint multinomial probability over every occupancy consistent
    with the pattern: success RBs pin their counts, empty RBs pin zero, and
    the leftover devices of both classes spread over the collision RBs with
    at least two transmitters per collision.
    """
    if pattern.m != cfg.m or pair.m != cfg.m:
        raise ValueError("pattern/pair length must match config m")
    high = pattern.high_rbs
    low = pattern.low_rbs
    coll = pattern.collision_rbs
    r_h = cfg.n_h - len(high)
    r_l = cfg.n_l - len(low)
    if r_h < 0 or r_l < 0:
        return 0.0
    if not coll:
        if r_h or r_l:
            return 0.0
        c_h = [0] * cfg.m
        c_l = [0] * cfg.m
        for i in high:
            c_h[i] = 1
        for i in low:
            c_l[i] = 1
        return multinomial_pmf(cfg.n_h, c_h, pair.p_h) * multinomial_pmf(
            cfg.n_l, c_l, pair.p_l
        )

    base_h = [0] * cfg.m
    base_l = [0] * cfg.m
    for i in high:
        base_h[i] = 1
    for i in low:
        base_l[i] = 1

    total = 0.0
    k = len(coll)
    for spread_h in compositions(r_h, k):
        c_h = list(base_h)
        for i, extra in zip(coll, spread_h):
            c_h[i] = extra
        pmf_h = multinomial_pmf(cfg.n_h, c_h, pair.p_h)
        if pmf_h == 0.0:
            continue
        for spread_l in compositions(r_l, k):
            if any(a + b < 2 for a, b in zip(spread_h, spread_l)):
                continue
            c_l = list(base_l)
            for i, extra in zip(coll, spread_l):
                c_l[i] = extra
            total += pmf_h * multinomial_pmf(cfg.n_l, c_l, pair.p_l)
    return total


def throughput_by_pattern_sum(
    cfg: NetworkConfig, pair: AccessProbabilityPair, cap: int = ENUMERATION_CAP
) -> ThroughputPair:
    """Throughput as sum over patterns of success count times probability.

    Exponential in m; refuses configurations whose occupancy enumeration
    would exceed ``cap`` pairs.
    """
    work = math.comb(cfg.n_h + cfg.m - 1, cfg.m - 1) * math.comb(
        cfg.n_l + cfg.m - 1, cfg.m - 1
    )
    if work > cap:
        raise EnumerationCapExceeded(
            f"{work} occupancy pairs exceeds cap {cap} for cfg {cfg}"
        )
    mu_h_terms: list[float] = []
    mu_l_terms: list[float] = []
    for pattern in enumerate_patterns(cfg):
        prob = pattern_probability(cfg, pair, pattern)
        n_high = len(pattern.high_rbs)
        n_low = len(pattern.low_rbs)
        if n_high:
            mu_h_terms.append(n_high * prob)
        if n_low:
            mu_l_terms.append(n_low * prob)
    return ThroughputPair(math.fsum(mu_h_terms), math.fsum(mu_l_terms))


def scaling_allocation(m: int) -> AccessProbabilityPair:
    """Reference allocation used for reward normalization: the high class
    spreads uniformly over the first m-1 RBs, the low class occupies the
    last RB alone."""
    if m < 2:
        raise ValueError(f"reference allocation needs m >= 2, got {m}")
    share = 1.0 / (m - 1)
    p_h = (share,) * (m - 1) + (0.0,)
    p_l = (0.0,) * (m - 1) + (1.0,)
    return AccessProbabilityPair(p_h, p_l)


def scaling_reference(cfg: NetworkConfig) -> float:
    """High-class throughput of :func:`scaling_allocation`, in closed form:
    ``n_h * (1 - 1/(m-1)) ** (n_h - 1)``.

    Raises when undefined (m < 2, n_h = 0) or degenerate (value 0, which
    happens for m = 2 with n_h >= 2); callers that scale by this value must
    fall back to unscaled rewards in those cases.
    """
    if cfg.m < 2:
        raise ValueError(f"scaling reference undefined for m={cfg.m}")
    if cfg.n_h == 0:
        raise ValueError("scaling reference undefined for n_h=0")
    ref = cfg.n_h * (1.0 - 1.0 / (cfg.m - 1)) ** (cfg.n_h - 1)
    if ref <= 0.0:
        raise ValueError(
            f"scaling reference degenerates to 0 for n_h={cfg.n_h}, m={cfg.m}"
        )
    return ref
