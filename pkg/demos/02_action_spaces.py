"""Build the two action spaces the bandit can search.

The discretized space grids each probability vector with resolution d and
keeps one representative per joint cyclic rotation (throughput is invariant
under rotating both vectors together), shrinking the space severalfold.
The compact space instead stores one pre-optimized allocation per assumed
load (n_h, n_l), so its size is just the number of load cells.
"""

from rachopt.actionspace import (
    GridSpec,
    build_compact,
    full_space_size,
    generate_discretized,
)


def main() -> None:
    print("discretized spaces (full grid vs rotation-reduced):")
    for m in (3, 4, 5, 6):
        for d in (0.25, 0.2):
            spec = GridSpec(m=m, d=d)
            full = full_space_size(spec)
            reduced = len(generate_discretized(spec, reduced=True))
            print(f"  M={m} d={d}: full {full:>6,} -> reduced {reduced:>6,} "
                  f"({full / reduced:.2f}x smaller)")

    print()
    print("compact space: one optimized allocation per assumed load")
    space = build_compact(m=4, n_h_max=3, n_l_max=3, gamma=0.4)
    print(f"  M=4, loads up to (3, 3), mu_l floor 0.4 -> {len(space)} cells")
    for entry in space.entries:
        p_h = tuple(round(x, 3) for x in entry.pair.p_h)
        p_l = tuple(round(x, 3) for x in entry.pair.p_l)
        print(f"  load ({entry.n_h}, {entry.n_l}): p_h={p_h} p_l={p_l} "
              f"-> mu=({entry.mu_h:.3f}, {entry.mu_l:.3f})")
    infeasible = space.infeasible_cells()
    if infeasible:
        print(f"  cells where no allocation meets the floor: {sorted(infeasible)}")


if __name__ == "__main__":
    main()
