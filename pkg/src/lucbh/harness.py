"""Monte Carlo experiment runner: presets, sweeps, aggregation and output.

Trial ``i`` of every grid point and every series draws from
``TrialRng(seed, i)``.  Results are therefore independent of scheduling and
worker count, and series compared on one seed share their online noise.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from lucbh import __version__
from lucbh.algorithms import DEFAULT_BUDGET, run_lucb_h, run_pure_lucb
from lucbh.core import Instance, build_instance
from lucbh.errors import ConfigError, LucbhError, UnknownPreset
from lucbh.sampling import TrialRng, generate_offline
from lucbh.theory import bound_report

SCHEMA_VERSION = 1

PURE_LUCB = "pure_lucb"
LUCB_H = "lucb_h"
ALGORITHMS = (PURE_LUCB, LUCB_H)
CASES = ("pure", "misleading", "beneficial", "partial")
AXES = ("delta", "t_s", "v_suboptimal", "v_all")

#: Log base of the confidence radius in the figure presets.  Base 10 puts
#: the sample counts at the scale of the reference allocation tables.
PRESET_LOG_BASE = 10.0

DEFAULT_V = (0.4, 0.2, 0.2, 0.2, 0.2)
GROUPS: dict[int, dict[str, Any]] = {
    1: {
        "mu_on": (0.8, 0.4, 0.4, 0.4, 0.4),
        "t_s": 200,
        "offline": {
            "misleading": (0.4, 0.6, 0.6, 0.6, 0.6),
            "beneficial": (0.9, 0.2, 0.2, 0.2, 0.2),
            "partial": (0.4, 0.6, 0.6, 0.2, 0.2),
        },
    },
    2: {
        "mu_on": (0.8, 0.7, 0.6, 0.5, 0.4),
        "t_s": 1000,
        "offline": {
            "misleading": (0.4, 0.8, 0.7, 0.6, 0.5),
            "beneficial": (0.9, 0.5, 0.4, 0.3, 0.2),
            "partial": (0.4, 0.8, 0.7, 0.3, 0.2),
        },
    },
}


@dataclass(frozen=True)
class Series:
    """One curve: an algorithm run on one base instance."""

    case: str
    algorithm: str
    instance: Instance


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    series: tuple[Series, ...]
    axis: str
    grid: tuple[float, ...]
    trials: int = 1000
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    log_base: float = math.e
    chart: str = "line"

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; expected one of {AXES}")
        if not self.grid:
            raise ConfigError("grid must not be empty")
        if not self.series:
            raise ConfigError("at least one series is required")
        if self.trials < 2:
            raise ConfigError(f"need at least 2 trials per point, got {self.trials}")
        if self.budget < 1:
            raise ConfigError(f"budget must be positive, got {self.budget}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not self.log_base > 1:
            raise ConfigError(f"log base must exceed 1, got {self.log_base}")
        if self.chart not in ("line", "bars"):
            raise ConfigError(f"chart must be 'line' or 'bars', got {self.chart!r}")
        for s in self.series:
            if s.algorithm not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {s.algorithm!r}")
        # every grid value must produce a valid instance
        for value in self.grid:
            for s in self.series:
                try:
                    apply_axis(s.instance, self.axis, value)
                except (LucbhError, ValueError) as exc:
                    raise ConfigError(f"grid value {value!r} on axis {self.axis}: {exc}") from exc

    @property
    def k(self) -> int:
        return self.series[0].instance.k

    def with_overrides(self, **changes: Any) -> "ExperimentSpec":
        changes = {key: value for key, value in changes.items() if value is not None}
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "axis": self.axis,
            "grid": list(self.grid),
            "trials": self.trials,
            "seed": self.seed,
            "budget": self.budget,
            "log_base": self.log_base,
            "chart": self.chart,
            "series": [
                {"case": s.case, "algorithm": s.algorithm, "instance": s.instance.to_dict()}
                for s in self.series
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "ExperimentSpec":
        try:
            series = tuple(
                Series(s["case"], s["algorithm"], Instance.from_dict(s["instance"]))
                for s in doc["series"]
            )
            return cls(
                name=str(doc.get("name", "experiment")),
                series=series,
                axis=doc["axis"],
                grid=tuple(doc["grid"]),
                trials=int(doc.get("trials", 1000)),
                seed=int(doc.get("seed", 0)),
                budget=int(doc.get("budget", DEFAULT_BUDGET)),
                log_base=float(doc.get("log_base", math.e)),
                chart=doc.get("chart", "line"),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, LucbhError) as exc:
            raise ConfigError(f"malformed experiment spec: {exc}") from exc


@dataclass(frozen=True)
class PointStats:
    trials: int
    mean_tau: float
    stderr_tau: float
    error_rate: float
    mean_pulls: tuple[float, ...]
    truncated: int


@dataclass(frozen=True)
class PointResult:
    axis_value: float
    case: str
    algorithm: str
    instance: Instance
    stats: PointStats


@dataclass
class SweepResult:
    spec: ExperimentSpec
    points: list[PointResult] = field(default_factory=list)
    wall_time: float = 0.0

    def rows(self) -> list[list[str]]:
        out = []
        for p in self.points:
            s = p.stats
            out.append(
                [
                    format_axis(self.spec.axis, p.axis_value),
                    p.algorithm,
                    p.case,
                    repr(s.mean_tau),
                    repr(s.stderr_tau),
                    repr(s.error_rate),
                    str(s.truncated),
                    *(repr(x) for x in s.mean_pulls),
                ]
            )
        return out

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(csv_header(self.spec.k))
        writer.writerows(self.rows())
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "software_version": __version__,
            "seed": self.spec.seed,
            "spec": self.spec.to_dict(),
            "wall_time_s": self.wall_time,
            "points": [
                {
                    "axis": self.spec.axis,
                    "axis_value": p.axis_value,
                    "algorithm": p.algorithm,
                    "case": p.case,
                    "trials": p.stats.trials,
                    "mean_tau": p.stats.mean_tau,
                    "stderr_tau": p.stats.stderr_tau,
                    "error_rate": p.stats.error_rate,
                    "truncated": p.stats.truncated,
                    "mean_pulls": list(p.stats.mean_pulls),
                    "instance": p.instance.to_dict(),
                    "bounds": bound_report(p.instance).to_dict(),
                }
                for p in self.points
            ],
        }

    def find(self, case: str, axis_value: float | None = None) -> PointResult:
        for p in self.points:
            if p.case == case and (axis_value is None or p.axis_value == axis_value):
                return p
        raise KeyError((case, axis_value))


def csv_header(k: int) -> list[str]:
    base = ["axis", "algorithm", "case", "mean_tau", "stderr_tau", "error_rate", "truncated"]
    return base + [f"pulls_{i + 1}" for i in range(k)]


def format_axis(axis: str, value: float) -> str:
    if axis == "t_s":
        return str(int(value))
    return repr(float(value))


def apply_axis(inst: Instance, axis: str, value: float) -> Instance:
    if axis == "delta":
        return inst.replace(delta=float(value))
    if axis == "t_s":
        if int(value) != value:
            raise ConfigError(f"t_s grid values must be integers, got {value}")
        return inst.replace(t_s=(int(value),) * inst.k)
    if axis == "v_suboptimal":
        best = inst.best_arm
        return inst.replace(v=tuple(x if i == best else float(value) for i, x in enumerate(inst.v)))
    if axis == "v_all":
        return inst.replace(v=(float(value),) * inst.k)
    raise ConfigError(f"unknown sweep axis {axis!r}")


# --------------------------------------------------------------------------- #
# trial execution

def run_trials(
    inst: Instance,
    algorithm: str,
    seed: int,
    start: int,
    stop: int,
    budget: int = DEFAULT_BUDGET,
    log_base: float = math.e,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Trials ``start..stop-1`` as arrays (tau, pulls, correct, truncated)."""
    count = stop - start
    taus = np.empty(count, dtype=np.int64)
    pulls = np.empty((count, inst.k), dtype=np.int64)
    correct = np.empty(count, dtype=bool)
    truncated = np.empty(count, dtype=bool)
    for j, trial in enumerate(range(start, stop)):
        rng = TrialRng(seed, trial)
        if algorithm == LUCB_H:
            res = run_lucb_h(inst, generate_offline(inst, rng), rng, budget, log_base=log_base)
        elif algorithm == PURE_LUCB:
            res = run_pure_lucb(inst, rng, budget, log_base=log_base)
        else:
            raise ConfigError(f"unknown algorithm {algorithm!r}")
        taus[j] = res.tau
        pulls[j] = res.pulls
        correct[j] = res.correct
        truncated[j] = res.truncated
    return taus, pulls, correct, truncated


def _run_trials_task(args: tuple) -> tuple[np.ndarray, ...]:
    return run_trials(*args)


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    if workers <= 1:
        return [(0, trials)]
    size = max(1, math.ceil(trials / (4 * workers)))
    return [(a, min(a + size, trials)) for a in range(0, trials, size)]


def _execute(tasks: list[tuple], workers: int) -> list[tuple[np.ndarray, ...]]:
    if workers <= 1:
        return [_run_trials_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_trials_task, tasks))


def summarize(
    taus: np.ndarray, pulls: np.ndarray, correct: np.ndarray, truncated: np.ndarray
) -> PointStats:
    n = len(taus)
    if n < 2:
        raise ConfigError("need at least 2 trials to estimate a standard error")
    tau = taus.astype(np.float64)
    return PointStats(
        trials=n,
        mean_tau=float(tau.mean()),
        stderr_tau=float(tau.std(ddof=1) / math.sqrt(n)),
        error_rate=int(n - correct.sum()) / n,
        mean_pulls=tuple(float(x) for x in pulls.mean(axis=0)),
        truncated=int(truncated.sum()),
    )


def _point_tasks(inst, algorithm, trials, seed, budget, log_base, workers):
    return [
        (inst, algorithm, seed, a, b, budget, log_base) for a, b in _chunks(trials, workers)
    ]


def _merge(parts: Sequence[tuple[np.ndarray, ...]]) -> PointStats:
    return summarize(*(np.concatenate(arrays) for arrays in zip(*parts)))


def run_point(
    inst: Instance,
    algorithm: str,
    trials: int,
    seed: int,
    budget: int = DEFAULT_BUDGET,
    *,
    log_base: float = math.e,
    workers: int = 1,
) -> PointStats:
    """Aggregate ``trials`` independent runs; each trial resamples its offline data.

    Truncated trials stay in every mean with their truncated ``tau`` and are
    counted in ``PointStats.truncated``.
    """
    if trials < 2:
        raise ConfigError(f"need at least 2 trials, got {trials}")
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    tasks = _point_tasks(inst, algorithm, trials, seed, budget, log_base, workers)
    return _merge(_execute(tasks, workers))


def run_sweep(spec: ExperimentSpec, workers: int = 1) -> SweepResult:
    started = time.perf_counter()
    layout: list[tuple[float, Series, Instance, int]] = []
    tasks: list[tuple] = []
    for value in spec.grid:
        for s in spec.series:
            inst = apply_axis(s.instance, spec.axis, value)
            point_tasks = _point_tasks(
                inst, s.algorithm, spec.trials, spec.seed, spec.budget, spec.log_base, workers
            )
            layout.append((value, s, inst, len(point_tasks)))
            tasks.extend(point_tasks)
    parts = _execute(tasks, workers)
    result = SweepResult(spec=spec)
    cursor = 0
    for value, s, inst, count in layout:
        stats = _merge(parts[cursor : cursor + count])
        cursor += count
        result.points.append(PointResult(value, s.case, s.algorithm, inst, stats))
    result.wall_time = time.perf_counter() - started
    return result


# --------------------------------------------------------------------------- #
# presets

def group_series(group: int, cases: Iterable[str] = CASES, delta: float = 0.01,
                 t_s: int | None = None, v: Sequence[float] = DEFAULT_V) -> tuple[Series, ...]:
    """Pure LUCB plus LUCB-H under each offline case for one instance group."""
    g = GROUPS[group]
    count = g["t_s"] if t_s is None else t_s
    out = []
    for case in cases:
        if case == "pure":
            inst = build_instance(5, g["mu_on"], g["mu_on"], (0,) * 5, v, delta)
            out.append(Series("pure", PURE_LUCB, inst))
        else:
            inst = build_instance(5, g["mu_on"], g["offline"][case], (count,) * 5, v, delta)
            out.append(Series(case, LUCB_H, inst))
    return tuple(out)


def _delta_grid(full: bool) -> tuple[float, ...]:
    return tuple(float(f"1e-{j}") for j in range(1, 11 if full else 7))


PRESET_NAMES = tuple(f"fig{i}" for i in range(1, 11))

_DESCRIPTIONS = {
    "fig1": "Group 1: mean stopping time vs log(1/delta), T_S=200",
    "fig2": "Group 2: mean stopping time vs log(1/delta), T_S=1000",
    "fig3": "Group 1: mean stopping time vs T_S at delta=0.01",
    "fig4": "Group 2: mean stopping time vs T_S at delta=0.01",
    "fig5": "Group 1: mean stopping time vs suboptimal-arm V, T_S=200",
    "fig6": "Group 2: mean stopping time vs suboptimal-arm V, T_S=200",
    "fig7": "Group 1: per-arm samples at delta=0.01",
    "fig8": "Group 2: per-arm samples at delta=0.01",
    "fig9": "Group 2: suboptimal-arm V below the true 0.2 shift",
    "fig10": "Group 2: shared V for all arms, under- and over-estimated",
}


def describe_preset(name: str) -> str:
    if name not in _DESCRIPTIONS:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return _DESCRIPTIONS[name]


def preset(name: str, full_grid: bool = False) -> ExperimentSpec:
    """The experiment configuration behind each figure.

    Desk-scale defaults: the delta sweeps stop at 1e-6 and the Group 2 T_S
    sweep at 4000; ``full_grid`` restores 1e-10 and 5000.
    """
    describe_preset(name)
    common = {"trials": 1000, "seed": 0, "log_base": PRESET_LOG_BASE}
    if name in ("fig1", "fig2"):
        group = 1 if name == "fig1" else 2
        return ExperimentSpec(name, group_series(group), "delta", _delta_grid(full_grid), **common)
    if name == "fig3":
        grid = (200, 400, 600, 800, 1000)
        return ExperimentSpec(name, group_series(1), "t_s", grid, **common)
    if name == "fig4":
        grid = (1000, 2000, 3000, 4000, 5000) if full_grid else (1000, 2000, 3000, 4000)
        return ExperimentSpec(name, group_series(2), "t_s", grid, **common)
    if name in ("fig5", "fig6"):
        group = 1 if name == "fig5" else 2
        grid = (0.2, 0.25, 0.3, 0.35, 0.4)
        return ExperimentSpec(name, group_series(group, t_s=200), "v_suboptimal", grid, **common)
    if name in ("fig7", "fig8"):
        group = 1 if name == "fig7" else 2
        return ExperimentSpec(name, group_series(group), "delta", (0.01,), chart="bars", **common)
    if name == "fig9":
        return ExperimentSpec(name, group_series(2, t_s=200), "v_suboptimal", (0.1, 0.15), **common)
    grid = (0.1, 0.125, 0.15, 0.175, 0.2, 0.225)
    return ExperimentSpec(name, group_series(2, t_s=200), "v_all", grid, **common)


def load_spec(path: str | Path) -> ExperimentSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return ExperimentSpec.from_dict(doc)
