"""Watch the bandit cope when the load changes under it mid-run.

The true load switches partway through while the bandit's value estimates,
pull counts, and sampling distribution all carry over untouched.  That
carryover is the interesting part: value estimates are lifetime running
means, so rewards earned under the old load keep steering choices after
the switch and re-discovery takes far longer than learning from scratch --
visible here in the trailing windows.
"""

import numpy as np

from rachopt.actionspace import build_compact, exact_throughputs
from rachopt.mab import MabConfig, mae_trace, run_nonstationary
from rachopt.model import NetworkConfig


def window_mean(values: np.ndarray, lo: int, hi: int) -> float:
    return float(np.mean(values[lo:hi]))


def main() -> None:
    gamma = 0.4
    space = build_compact(m=5, n_h_max=6, n_l_max=6, gamma=gamma)
    cfg_a = NetworkConfig(n_h=2, n_l=1, m=5)
    cfg_b = NetworkConfig(n_h=4, n_l=5, m=5)
    switch, total = 2000, 12000
    print(f"compact space at M=5: {len(space)} load cells")
    print(f"load starts at ({cfg_a.n_h}, {cfg_a.n_l}), switches to "
          f"({cfg_b.n_h}, {cfg_b.n_l}) at pull {switch} of {total}")

    mab_cfg = MabConfig(gamma=gamma, rho=0.1, t=100, runs=total,
                        batch_size=200, elite_fraction=0.1, alpha=0.1, seed=5)
    result = run_nonstationary(space, [(0, cfg_a), (switch, cfg_b)], mab_cfg)

    chosen = np.array([rec.action_index for rec in result.trace])
    mu_b = exact_throughputs(space, cfg_b)
    print()
    print("exact (mu_h, mu_l) of the chosen action, scored against the "
          "post-switch load:")
    windows = [(0, switch), (switch, 4000), (4000, 8000), (total - 2000, total)]
    for lo, hi in windows:
        h = window_mean(mu_b[chosen, 0], lo, hi)
        l = window_mean(mu_b[chosen, 1], lo, hi)
        print(f"  pulls {lo:>5}-{hi:>5}: mean ({h:.4f}, {l:.4f})")
    opt = mu_b[space.index[(cfg_b.n_h, cfg_b.n_l)]]
    print(f"  post-switch optimum: ({opt[0]:.4f}, {opt[1]:.4f})")

    final = mu_b[result.best_index]
    print()
    print("the favorites learned in the first phase keep a deceptively high")
    print("mu_h on the new load but park the low class where it self-collides,")
    print("so their mu_l collapses and the floor check fails; the shaped reward")
    print("punishes that and play drifts back toward the constrained optimum,")
    print("thousands of pulls late because lifetime running means dilute new")
    print("evidence with the stale past.")
    print()
    print(f"the lifetime leaderboard lags even further: its final argmax-Q cell "
          f"earns only ({final[0]:.4f}, {final[1]:.4f})")
    print("on the new load -- what the bandit plays recovers long before what")
    print("its leaderboard says, which is why adaptation is judged on trailing")
    print("play windows.")


if __name__ == "__main__":
    main()
