"""Compute per-class throughput three ways and watch them agree.

A small two-priority network: every device picks one resource block per
slot from its class's probability vector, and a block carries a success
only when exactly one device chose it.  The closed-form expression, the
exhaustive sum over allocation patterns, and a long Monte-Carlo run must
all land on the same (mu_h, mu_l).
"""

from rachopt import AccessProbabilityPair, NetworkConfig
from rachopt.exact import throughput_by_pattern_sum, throughput_closed_form
from rachopt.simulate import sim_throughput


def main() -> None:
    cfg = NetworkConfig(n_h=2, n_l=3, m=3)
    pair = AccessProbabilityPair(p_h=(0.5, 0.3, 0.2), p_l=(0.1, 0.2, 0.7))

    closed = throughput_closed_form(cfg, pair)
    summed = throughput_by_pattern_sum(cfg, pair)
    sampled = sim_throughput(cfg, pair, t=200_000, seed=7)

    print(f"network: {cfg.n_h} high-priority + {cfg.n_l} low-priority devices, "
          f"{cfg.m} resource blocks")
    print(f"high-class vector {pair.p_h}, low-class vector {pair.p_l}")
    print()
    print(f"closed form:            mu_h={closed.mu_h:.6f}  mu_l={closed.mu_l:.6f}")
    print(f"pattern enumeration:    mu_h={summed.mu_h:.6f}  mu_l={summed.mu_l:.6f}")
    print(f"simulation (200k slots): mu_h={sampled.mu_h:.6f}  mu_l={sampled.mu_l:.6f}")
    print()
    gap = max(abs(closed.mu_h - summed.mu_h), abs(closed.mu_l - summed.mu_l))
    print(f"closed form vs enumeration agree to {gap:.2e}; "
          f"the simulation wobbles at the 1/sqrt(T) scale.")


if __name__ == "__main__":
    main()
