"""Reproduction harness: published reference tables and experiment runner.

``reproduce`` reruns the pipeline behind each published reference table and
reports computed-versus-published values with pass/fail per the documented
tolerances.  ``run_experiment`` executes a configured experiment (baseline,
exact optimizer, or bandit) and writes result records, pull traces, and
plot-ready CSV files.
"""

from __future__ import annotations

import configparser
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .actionspace import (
    ActionSpace,
    CompactKind,
    GridSpec,
    build_compact,
    exact_throughputs,
    full_space_size,
    generate_discretized,
    load_compact,
)
from .baselines import acb_admission, acb_throughput, uniform_pair
from .exact import throughput_closed_form
from .mab import (
    MabConfig,
    MabResult,
    estimate_load,
    mae_trace,
    run,
    run_nonstationary,
    save_mab_trace,
)
from .model import AccessProbabilityPair, NetworkConfig
from .optimize import SolverOptions, solve

__all__ = [
    "ReportLine",
    "TableReport",
    "reproduce",
    "ExperimentSpec",
    "load_experiment",
    "run_experiment",
    "load_plot_data",
    "REFERENCE_SPACE_SIZES",
    "REFERENCE_ACB",
    "REFERENCE_UNCONSTRAINED",
    "REFERENCE_CONSTRAINED",
    "REFERENCE_SOLVER_SECONDS",
    "REFERENCE_UNCONSTRAINED_PAIRS",
    "REFERENCE_CONSTRAINED_PAIRS",
    "published_pair",
    "REFERENCE_MAB_UNCONSTRAINED",
    "REFERENCE_MAB_CONSTRAINED",
    "DISCRETIZED_MAB_DEFAULTS",
    "COMPACT_MAB_DEFAULTS",
]

# published reference values, keyed by (m, d) or m; throughputs as printed
REFERENCE_SPACE_SIZES: dict[tuple[int, float], tuple[int, int]] = {
    (2, 0.5): (9, 5),
    (2, 0.2): (36, 18),
    (2, 0.1): (121, 61),
    (3, 0.5): (36, 12),
    (3, 0.2): (441, 147),
    (3, 0.1): (3844, 1452),
    (4, 0.5): (100, 26),
    (4, 0.2): (3136, 784),
    (5, 0.5): (225, 45),
    (5, 0.2): (15876, 3176),
}
# the printed full size for (3, 0.1) disagrees with the combinatorial count
SPACE_SIZE_DISCREPANCY = (3, 0.1)

REFERENCE_ACB: dict[int, tuple[float, float]] = {
    3: (0.44, 0.89),
    4: (0.42, 1.27),
    5: (0.82, 1.23),
    6: (0.80, 1.60),
}

REFERENCE_UNCONSTRAINED: dict[int, tuple[float, float]] = {
    3: (0.84, 0.0),
    4: (1.27, 0.0),
    5: (1.68, 0.0),
    6: (2.05, 0.0),
}

REFERENCE_CONSTRAINED: dict[int, tuple[float, float]] = {
    3: (0.43, 0.4),
    4: (0.85, 0.4),
    5: (1.28, 0.4),
    6: (1.7, 0.4),
}

# Published wall-clock seconds for the exhaustive-search runs behind the
# optimizer tables, keyed by mu_l floor then M.  Absolute values are
# hardware-bound and never asserted against; the recorded growth-in-M trend
# is what the acceptance suite checks.
REFERENCE_SOLVER_SECONDS: dict[float, dict[int, float]] = {
    0.0: {3: 4.59, 4: 43.85, 5: 337.42, 6: 664.51},
    0.4: {3: 13.06, 4: 75.12, 5: 375.25, 6: 1281.3},
}

# published solution vectors for the optimizer tables (as printed; two of the
# high-class vectors sum to 0.999/0.998 and need renormalizing before use)
REFERENCE_UNCONSTRAINED_PAIRS: dict[int, tuple[tuple[float, ...], tuple[float, ...]]] = {
    3: ((0.25, 0.25, 0.5), (0.0, 0.0, 1.0)),
    4: ((0.25, 0.25, 0.25, 0.25), (0.0, 0.0, 0.0, 1.0)),
    5: ((0.25, 0.25, 0.25, 0.25, 0.0), (0.0, 0.0, 0.0, 0.0, 1.0)),
    6: ((0.2, 0.2, 0.2, 0.2, 0.2, 0.0), (0.0, 0.0, 0.0, 0.0, 0.0, 1.0)),
}

REFERENCE_CONSTRAINED_PAIRS: dict[int, tuple[tuple[float, ...], tuple[float, ...]]] = {
    3: ((0.006, 0.25, 0.744), (0.195, 0.0, 0.805)),
    4: ((0.25, 0.006, 0.493, 0.25), (0.0, 0.196, 0.804, 0.0)),
    5: ((0.007, 0.24, 0.251, 0.251, 0.251), (0.198, 0.802, 0.0, 0.0, 0.0)),
    6: ((0.01, 0.247, 0.247, 0.247, 0.247, 0.0), (0.201, 0.0, 0.0, 0.0, 0.0, 0.799)),
}

REFERENCE_MAB_UNCONSTRAINED: dict[int, tuple[float, float]] = {
    3: (0.82, 0.0),
    4: (1.23, 0.0),
    5: (1.57, 0.0),
    6: (2.05, 0.0),
}

REFERENCE_MAB_CONSTRAINED: dict[int, tuple[float, float]] = {
    3: (0.41, 0.41),
    4: (0.82, 0.41),
    5: (1.23, 0.41),
    6: (1.64, 0.41),
}

def published_pair(gamma: float, m: int) -> AccessProbabilityPair:
    """Published optimizer solution for one table row, renormalized.

    Two of the printed high-class vectors sum to 0.999/0.998 (rounded
    entries); scaling each vector by its own sum restores valid
    distributions.
    """
    table = REFERENCE_CONSTRAINED_PAIRS if gamma > 0 else REFERENCE_UNCONSTRAINED_PAIRS
    p_h, p_l = table[m]
    return AccessProbabilityPair(
        tuple(x / sum(p_h) for x in p_h), tuple(x / sum(p_l) for x in p_l)
    )


DISCRETIZED_MAB_DEFAULTS = {
    "alpha": 0.2,
    "elite_fraction": 0.1,
    "batch_size": 500,
    "rho": 0.0,
    "t": 1000,
    "runs": 15000,
    "d": 0.2,
}

COMPACT_MAB_DEFAULTS = {
    "alpha": 0.1,
    "elite_fraction": 0.1,
    "batch_size": 200,
    "rho": 0.1,
    "t": 100,
    "runs": 2000,
}

TABLE_IDS = ("I", "II", "III", "IV", "V", "VI", "VII")

TABLE_II_NOTE = (
    "Table II (uniform access probabilities) is not reproduced: its printed "
    "throughput values are inconsistent with the access model used everywhere "
    "else, so the uniform baseline is validated directly against the exact "
    "engine instead (see the baselines module and its tests)."
)


@dataclass(frozen=True)
class ReportLine:
    label: str
    computed: str
    published: str
    passed: Optional[bool]  # None marks an informational line
    note: str = ""

    def render(self) -> str:
        status = {True: "PASS", False: "FAIL", None: "info"}[self.passed]
        text = f"{self.label}: computed {self.computed} | published {self.published} [{status}]"
        if self.note:
            text += f"  ({self.note})"
        return text


@dataclass
class TableReport:
    table_id: str
    title: str
    lines: list[ReportLine] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(line.passed is not False for line in self.lines)

    def render(self) -> str:
        out = [f"Table {self.table_id}: {self.title}"]
        out += ["  " + line.render() for line in self.lines]
        out += ["  note: " + n for n in self.notes]
        out.append(f"  => {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(out)

    def __str__(self) -> str:
        return self.render()


def _base_cfg(m: int) -> NetworkConfig:
    return NetworkConfig(n_h=4, n_l=5, m=m)


def _reproduce_space_sizes() -> TableReport:
    report = TableReport("I", "action space sizes before and after rotation dedup")
    for (m, d), (full_pub, reduced_pub) in REFERENCE_SPACE_SIZES.items():
        spec = GridSpec(m, d)
        full = full_space_size(spec)
        reduced = len(generate_discretized(spec, reduced=True))
        if (m, d) == SPACE_SIZE_DISCREPANCY:
            report.lines.append(
                ReportLine(
                    f"M={m} d={d} full",
                    str(full),
                    str(full_pub),
                    True,
                    "documented discrepancy: the combinatorial count is "
                    f"C(1/d+M-1, M-1)^2 = {full}, not {full_pub}",
                )
            )
        else:
            report.lines.append(
                ReportLine(f"M={m} d={d} full", str(full), str(full_pub), full == full_pub)
            )
        report.lines.append(
            ReportLine(
                f"M={m} d={d} reduced", str(reduced), str(reduced_pub), reduced == reduced_pub
            )
        )
    return report


def _reproduce_acb() -> TableReport:
    report = TableReport("III", "access class barring baseline, n_h=4 n_l=5")
    for m, (mu_h_pub, mu_l_pub) in REFERENCE_ACB.items():
        cfg = _base_cfg(m)
        mu = acb_throughput(cfg)
        adm = acb_admission(cfg)
        ok = abs(mu.mu_h - mu_h_pub) <= 0.01 and abs(mu.mu_l - mu_l_pub) <= 0.01
        report.lines.append(
            ReportLine(
                f"M={m}",
                f"mu_h={mu.mu_h:.4f} mu_l={mu.mu_l:.4f}",
                f"mu_h={mu_h_pub} mu_l={mu_l_pub}",
                ok,
                f"admitted {adm.admitted_h}H/{adm.admitted_l}L",
            )
        )
    return report


def _reproduce_optimizer(gamma: float, seed: int) -> TableReport:
    constrained = gamma > 0
    table_id = "V" if constrained else "IV"
    published = REFERENCE_CONSTRAINED if constrained else REFERENCE_UNCONSTRAINED
    report = TableReport(
        table_id,
        f"optimal access probability allocation, gamma={gamma}",
    )
    for m, (mu_h_pub, mu_l_pub) in published.items():
        cfg = _base_cfg(m)
        res = solve(cfg, gamma=gamma, options=SolverOptions(seed=seed))
        if constrained:
            ok = (
                res.feasible
                and res.mu.mu_h >= mu_h_pub - 0.01
                and 0.4 - 1e-6 <= res.mu.mu_l <= 0.41
            )
        else:
            ok = abs(res.mu.mu_h - mu_h_pub) <= 0.01 and abs(res.mu.mu_l) <= 1e-6
        report.lines.append(
            ReportLine(
                f"M={m}",
                f"mu_h={res.mu.mu_h:.4f} mu_l={res.mu.mu_l:.4f}",
                f"mu_h={mu_h_pub} mu_l={mu_l_pub}",
                ok,
                f"p_h={np.round(res.pair.p_h, 3).tolist()} p_l={np.round(res.pair.p_l, 3).tolist()}",
            )
        )
    return report


def _reproduce_mab(gamma: float, seed: int, runs: Optional[int], t: Optional[int]) -> TableReport:
    constrained = gamma > 0
    table_id = "VII" if constrained else "VI"
    published = REFERENCE_MAB_CONSTRAINED if constrained else REFERENCE_MAB_UNCONSTRAINED
    report = TableReport(
        table_id,
        f"bandit over the discretized space (d=0.2), gamma={gamma}",
    )
    mab_kwargs = dict(DISCRETIZED_MAB_DEFAULTS)
    d = mab_kwargs.pop("d")
    if runs is not None:
        mab_kwargs["runs"] = runs
    if t is not None:
        mab_kwargs["t"] = t
    for m, (mu_h_pub, mu_l_pub) in published.items():
        cfg = _base_cfg(m)
        space = generate_discretized(GridSpec(m, d), reduced=True)
        mus = exact_throughputs(space, cfg)
        feasible = mus[:, 1] >= gamma - 1e-9
        optimum = float(mus[feasible, 0].max())
        mcfg = MabConfig(gamma=gamma, seed=seed, **mab_kwargs)
        res = run(space, cfg, mcfg)
        mu_h, mu_l = (float(v) for v in mus[res.best_index])
        within = mu_h >= 0.95 * optimum and (not constrained or mu_l >= gamma - 1e-9)
        gated = m in (3, 4)
        report.lines.append(
            ReportLine(
                f"M={m}",
                f"exact mu_h={mu_h:.4f} mu_l={mu_l:.4f}",
                f"mu_h_T={mu_h_pub} mu_l_T={mu_l_pub}",
                within if gated else None,
                f"discrete optimum {optimum:.4f}"
                + ("" if gated else "; outside the documented tolerance scope"),
            )
        )
    report.notes.append(
        "pass/fail gate: best action's exact throughput within 5% of the "
        "reduced-space optimum (M=3 and M=4); larger M reported for reference"
    )
    return report


def reproduce(
    table_id: str,
    *,
    seed: int = 0,
    mab_runs: Optional[int] = None,
    mab_t: Optional[int] = None,
) -> TableReport:
    """Recompute one published reference table and report pass/fail.

    ``mab_runs`` and ``mab_t`` override the bandit defaults for quick smoke
    runs; the published tolerances assume the defaults.
    """
    tid = str(table_id).strip().upper()
    if tid not in TABLE_IDS:
        raise ValueError(f"unknown table id {table_id!r}, expected one of {TABLE_IDS}")
    if tid == "I":
        return _reproduce_space_sizes()
    if tid == "II":
        report = TableReport("II", "uniform access probabilities (not reproduced)")
        report.notes.append(TABLE_II_NOTE)
        return report
    if tid == "III":
        return _reproduce_acb()
    if tid == "IV":
        return _reproduce_optimizer(0.0, seed)
    if tid == "V":
        return _reproduce_optimizer(0.4, seed)
    if tid == "VI":
        return _reproduce_mab(0.0, seed, mab_runs, mab_t)
    return _reproduce_mab(0.4, seed, mab_runs, mab_t)


METHODS = ("uniform", "acb", "exact-opt", "mab-discretized", "mab-compact")


@dataclass
class ExperimentSpec:
    """One configured experiment: a network, a method, and output layout."""

    name: str
    cfg: NetworkConfig
    gamma: float
    method: str
    params: dict
    seeds: tuple[int, ...]
    out_dir: Path

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.method == "mab-compact" and not (
            "table" in self.params or "n_h_max" in self.params
        ):
            raise ValueError("mab-compact needs a 'table' path or 'n_h_max'/'n_l_max' bounds")


def load_experiment(path: Union[str, Path]) -> ExperimentSpec:
    """Parse an experiment description from a key-value config file."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)
    exp = parser["experiment"]
    net = parser["network"]
    cfg = NetworkConfig(
        n_h=net.getint("n_h"), n_l=net.getint("n_l"), m=net.getint("m")
    )
    gamma = net.getfloat("gamma", fallback=0.0)
    method = exp.get("method")
    seeds: tuple[int, ...] = (0,)
    if parser.has_section("seeds"):
        seeds = tuple(int(tok) for tok in parser["seeds"].get("list", "0").split())
    params: dict = {}
    if "workers" in exp:
        params["workers"] = exp.getint("workers")
    if parser.has_section("mab"):
        for key in ("alpha", "elite_fraction", "rho", "d"):
            if key in parser["mab"]:
                params[key] = parser["mab"].getfloat(key)
        for key in ("batch_size", "t", "runs"):
            if key in parser["mab"]:
                params[key] = parser["mab"].getint(key)
    if parser.has_section("schedule"):
        sched = parser["schedule"]
        params["schedule"] = (
            sched.getint("switch"),
            sched.getint("n_h"),
            sched.getint("n_l"),
        )
    if parser.has_section("compact"):
        comp = parser["compact"]
        if "table" in comp:
            params["table"] = comp.get("table")
        if "n_h_max" in comp:
            params["n_h_max"] = comp.getint("n_h_max")
            params["n_l_max"] = comp.getint("n_l_max")
    return ExperimentSpec(
        name=exp.get("name"),
        cfg=cfg,
        gamma=gamma,
        method=method,
        params=params,
        seeds=seeds,
        out_dir=Path(exp.get("out", ".")),
    )


def _seed_worker(job: tuple) -> tuple[MabResult, float]:
    """One seed's bandit run; module-level so seeds can run in worker
    processes."""
    space, cfg, final_cfg, schedule, mcfg = job
    start = time.perf_counter()
    if schedule is None:
        result = run(space, cfg, mcfg)
    else:
        result = run_nonstationary(space, [(0, cfg), (schedule[0], final_cfg)], mcfg)
    return result, time.perf_counter() - start


def _running_mean(values: np.ndarray) -> np.ndarray:
    return np.cumsum(values) / np.arange(1, len(values) + 1)


def _write_plot_csv(path: Path, result: MabResult, mae: Optional[np.ndarray]) -> None:
    mu_h = _running_mean(np.array([r.mu_h_t for r in result.trace]))
    mu_l = _running_mean(np.array([r.mu_l_t for r in result.trace]))
    header = "pull,mu_h_running,mu_l_running" + (",mae" if mae is not None else "")
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i in range(len(mu_h)):
            row = f"{i},{mu_h[i]:.9g},{mu_l[i]:.9g}"
            if mae is not None:
                row += f",{mae[i]:.9g}"
            fh.write(row + "\n")


def load_plot_data(path: Union[str, Path]) -> dict[str, np.ndarray]:
    """Read back a plot CSV as named columns."""
    with open(path) as fh:
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != len(names):
        raise ValueError(f"column count mismatch in {path}")
    return {name: data[:, i] for i, name in enumerate(names)}


def _mab_config(spec: ExperimentSpec, defaults: dict, seed: int) -> MabConfig:
    kwargs = {
        key: spec.params.get(key, default)
        for key, default in defaults.items()
        if key != "d"
    }
    return MabConfig(gamma=spec.gamma, seed=seed, **kwargs)


def _experiment_space(spec: ExperimentSpec) -> ActionSpace:
    if spec.method == "mab-discretized":
        d = spec.params.get("d", DISCRETIZED_MAB_DEFAULTS["d"])
        return generate_discretized(GridSpec(spec.cfg.m, d), reduced=True)
    if "table" in spec.params:
        space = load_compact(spec.params["table"])
        if not isinstance(space.kind, CompactKind) or space.kind.m != spec.cfg.m:
            raise ValueError("compact table does not match the experiment network")
        return space
    return build_compact(
        m=spec.cfg.m,
        n_h_max=spec.params["n_h_max"],
        n_l_max=spec.params.get("n_l_max", spec.params["n_h_max"]),
        gamma=spec.gamma,
    )


def run_experiment(spec: ExperimentSpec) -> list[Path]:
    """Run one experiment and write its artifacts; returns the paths."""
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    record: dict = {
        "name": spec.name,
        "method": spec.method,
        "m": spec.cfg.m,
        "n_h": spec.cfg.n_h,
        "n_l": spec.cfg.n_l,
        "gamma": spec.gamma,
    }

    if spec.method in ("uniform", "acb"):
        if spec.method == "uniform":
            mu = throughput_closed_form(spec.cfg, uniform_pair(spec.cfg.m))
        else:
            mu = acb_throughput(spec.cfg)
            adm = acb_admission(spec.cfg)
            record["admitted_h"] = adm.admitted_h
            record["admitted_l"] = adm.admitted_l
        record.update(mu_h=mu.mu_h, mu_l=mu.mu_l)
    elif spec.method == "exact-opt":
        res = solve(spec.cfg, gamma=spec.gamma, options=SolverOptions(seed=spec.seeds[0]))
        record.update(
            mu_h=res.mu.mu_h,
            mu_l=res.mu.mu_l,
            feasible=res.feasible,
            p_h=list(res.pair.p_h),
            p_l=list(res.pair.p_l),
        )
    else:
        defaults = (
            DISCRETIZED_MAB_DEFAULTS
            if spec.method == "mab-discretized"
            else COMPACT_MAB_DEFAULTS
        )
        space = _experiment_space(spec)
        compact = isinstance(space.kind, CompactKind)
        schedule = spec.params.get("schedule")
        final_cfg = spec.cfg
        if schedule is not None:
            final_cfg = NetworkConfig(schedule[1], schedule[2], spec.cfg.m)
        jobs = [
            (space, spec.cfg, final_cfg, schedule, _mab_config(spec, defaults, seed))
            for seed in spec.seeds
        ]
        workers = int(spec.params.get("workers", 1))
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(_seed_worker, jobs))
        else:
            outcomes = [_seed_worker(job) for job in jobs]
        per_seed = []
        for seed, (result, elapsed) in zip(spec.seeds, outcomes):
            best = space.actions[result.best_index]
            mu = throughput_closed_form(final_cfg, best.pair)
            seed_record = {
                "seed": seed,
                "best_index": result.best_index,
                "exact_mu_h": mu.mu_h,
                "exact_mu_l": mu.mu_l,
                "p_h": list(best.pair.p_h),
                "p_l": list(best.pair.p_l),
                "seconds": round(elapsed, 3),
            }
            mae = None
            if compact:
                seed_record["estimated_load"] = list(estimate_load(space, result))
                mae = mae_trace(space, result, final_cfg)
            trace_path = spec.out_dir / f"{spec.name}_seed{seed}_trace.csv"
            save_mab_trace(result, trace_path)
            written.append(trace_path)
            plot_path = spec.out_dir / f"{spec.name}_seed{seed}_plot.csv"
            _write_plot_csv(plot_path, result, mae)
            written.append(plot_path)
            per_seed.append(seed_record)
        record["seeds"] = per_seed
        record["space_size"] = len(space)

    result_path = spec.out_dir / f"{spec.name}_result.json"
    result_path.write_text(json.dumps(record, indent=2) + "\n")
    written.append(result_path)
    return written
