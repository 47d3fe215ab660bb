"""Two-priority random-access channel analysis and tuning toolkit."""

from .model import (
    AccessPattern,
    AccessProbabilityPair,
    NetworkConfig,
    OccupancyPair,
    SlotEvent,
    ThroughputPair,
    canonical_rotation,
    count_successes,
    pattern_from_string,
    pattern_of_occupancy,
    pattern_to_string,
)
from .exact import (
    enumerate_patterns,
    pattern_probability,
    scaling_allocation,
    scaling_reference,
    throughput_by_pattern_sum,
    throughput_closed_form,
)
from .actionspace import (
    ActionSpace,
    CompactKind,
    DiscretizedKind,
    GridSpec,
    build_compact,
    full_space_size,
    generate_discretized,
    load_compact,
    reduce_circular,
    save_compact,
)
from .baselines import acb_admission, acb_throughput
from .simulate import (
    SimTrace,
    empirical_throughput,
    load_trace,
    save_trace,
    sim_throughput,
    simulate,
)
from .optimize import OptResult, SolverOptions, solve, structural_unconstrained
from .mab import (
    MabConfig,
    MabResult,
    estimate_load,
    mae_trace,
    run,
    run_nonstationary,
)
from .bench import (
    ExperimentSpec,
    TableReport,
    load_experiment,
    published_pair,
    reproduce,
    run_experiment,
)

__version__ = "0.1.0"
