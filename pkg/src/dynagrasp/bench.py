"""Benchmark sweep harness and report aggregation.

A sweep runs one trial per (trajectory seed x speed x cube size x perception
system x repeat) and folds the results into per-cell outcome rates and grasp
time statistics. Aggregation is keyed, order-independent, and purely
deterministic, so two runs of the same spec produce byte-identical CSV.
"""

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from . import configio, traj
from .control import ControllerConfig
from .percept import perception_by_kind
from .plant import PlantConfig
from .traj import TrajectoryParams
from .trial import Outcome, TrialConfig, TrialResult, run_trial

PERCEPTION_ORDER = ("wrist", "single_hand", "dual_hand")

CSV_COLUMNS = (
    "speed_mm_s",
    "cube_mm",
    "perception",
    "n",
    "success_rate",
    "grasp_failure_rate",
    "perception_failure_rate",
    "timeout_rate",
    "mean_grasp_time_s",
    "sigma_grasp_time_s",
)


@dataclass(frozen=True)
class SweepSpec:
    """The benchmark grid plus the base configs shared by every cell."""

    trajectory_seeds: tuple[int, ...] = tuple(range(20))
    speeds: tuple[float, ...] = (100.0, 125.0, 150.0, 175.0, 200.0)
    cube_sides: tuple[float, ...] = (30.0, 40.0)
    perception_kinds: tuple[str, ...] = PERCEPTION_ORDER
    plant: PlantConfig = PlantConfig()
    controller: ControllerConfig = ControllerConfig()
    traj_params: TrajectoryParams = TrajectoryParams(n_segments=40, seed=0)
    loss_frames: int = 12
    max_duration: float = 30.0
    repeats: int = 1

    def __post_init__(self) -> None:
        for name in ("trajectory_seeds", "speeds", "cube_sides", "perception_kinds"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if any(s > traj.PLATFORM_SPEED_CAP or s <= 0 for s in self.speeds):
            raise ValueError(f"speeds must be in (0, {traj.PLATFORM_SPEED_CAP}]")
        if any(k not in PERCEPTION_ORDER for k in self.perception_kinds):
            raise ValueError(f"perception kinds must be among {PERCEPTION_ORDER}")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    @property
    def n_trials(self) -> int:
        return (
            len(self.trajectory_seeds)
            * len(self.speeds)
            * len(self.cube_sides)
            * len(self.perception_kinds)
            * self.repeats
        )


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    repeat: int
    speed: float
    cube: float
    perception: str
    outcome: Outcome
    grasp_time: float | None
    frames: int


@dataclass(frozen=True)
class CellStats:
    """Aggregate over all trials sharing (speed, cube, perception)."""

    speed: float
    cube: float
    perception: str
    n: int
    success_rate: float
    grasp_failure_rate: float
    perception_failure_rate: float
    timeout_rate: float
    mean_grasp_time: float | None
    sigma_grasp_time: float | None


@dataclass(frozen=True)
class Report:
    spec: SweepSpec
    cells: tuple[CellStats, ...]
    trials: tuple[TrialRecord, ...]


class SweepError(RuntimeError):
    """Trajectory generation failed for a sweep seed."""


def _trial_configs(spec: SweepSpec) -> list[tuple[tuple, TrialConfig]]:
    """One (key, config) pair per trial, in canonical cell-then-seed order."""
    trajectories = {}
    for seed in spec.trajectory_seeds:
        try:
            trajectories[seed] = traj.generate(replace(spec.traj_params, seed=seed))
        except traj.BoundsUnsatisfiable as exc:
            raise SweepError(f"trajectory seed {seed}: {exc}") from exc
    out = []
    for cube in spec.cube_sides:
        plant_cfg = replace(spec.plant, cube_side=cube)
        rigs = {k: perception_by_kind(k, plant_cfg) for k in spec.perception_kinds}
        for speed in spec.speeds:
            for kind in spec.perception_kinds:
                for seed in spec.trajectory_seeds:
                    for rep in range(spec.repeats):
                        key = (cube, speed, kind, seed, rep)
                        cfg = TrialConfig(
                            trajectory=trajectories[seed],
                            speed=speed,
                            plant=plant_cfg,
                            perception=rigs[kind],
                            controller=spec.controller,
                            loss_frames=spec.loss_frames,
                            max_duration=spec.max_duration,
                        )
                        out.append((key, cfg))
    return out


def _run_one(item) -> tuple[tuple, TrialResult]:
    key, cfg = item
    return key, run_trial(cfg)


def run_benchmark(spec: SweepSpec, jobs: int = 1) -> Report:
    """Run the full sweep; ``jobs`` > 1 fans trials out to worker processes.

    The report is identical for any job count: per-trial results are
    deterministic and aggregation is keyed by cell, not completion order.
    """
    items = _trial_configs(spec)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_run_one, items, chunksize=8))
    else:
        raw = [_run_one(item) for item in items]

    records = []
    for (cube, speed, kind, seed, rep), result in raw:
        records.append(
            TrialRecord(
                seed=seed,
                repeat=rep,
                speed=speed,
                cube=cube,
                perception=kind,
                outcome=result.outcome,
                grasp_time=result.grasp_time,
                frames=result.frames,
            )
        )
    records.sort(key=lambda r: (r.cube, r.speed, PERCEPTION_ORDER.index(r.perception), r.seed, r.repeat))
    return Report(spec=spec, cells=tuple(_aggregate(records)), trials=tuple(records))


def _aggregate(records: list[TrialRecord]) -> list[CellStats]:
    cells: dict[tuple, list[TrialRecord]] = {}
    for rec in records:
        cells.setdefault((rec.cube, rec.speed, rec.perception), []).append(rec)
    out = []
    for (cube, speed, kind) in sorted(
        cells, key=lambda k: (k[0], k[1], PERCEPTION_ORDER.index(k[2]))
    ):
        group = cells[(cube, speed, kind)]
        n = len(group)
        counts = {outcome: 0 for outcome in Outcome}
        for rec in group:
            counts[rec.outcome] += 1
        times = [rec.grasp_time for rec in group if rec.outcome is Outcome.SUCCESS]
        mean_t = statistics.fmean(times) if times else None
        sigma_t = statistics.stdev(times) if len(times) >= 2 else None
        out.append(
            CellStats(
                speed=speed,
                cube=cube,
                perception=kind,
                n=n,
                success_rate=counts[Outcome.SUCCESS] / n,
                grasp_failure_rate=counts[Outcome.GRASP_FAILURE] / n,
                perception_failure_rate=counts[Outcome.PERCEPTION_FAILURE] / n,
                timeout_rate=counts[Outcome.TIMEOUT] / n,
                mean_grasp_time=mean_t,
                sigma_grasp_time=sigma_t,
            )
        )
    return out


def _num(v) -> str:
    return "" if v is None else repr(v)


def report_csv(report: Report) -> str:
    """Cell table as CSV text; float fields use shortest round-trip form."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in report.cells:
        w.writerow(
            [
                _num(c.speed),
                _num(c.cube),
                c.perception,
                c.n,
                _num(c.success_rate),
                _num(c.grasp_failure_rate),
                _num(c.perception_failure_rate),
                _num(c.timeout_rate),
                _num(c.mean_grasp_time),
                _num(c.sigma_grasp_time),
            ]
        )
    return buf.getvalue()


def trials_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["seed", "repeat", "speed_mm_s", "cube_mm", "perception", "outcome", "grasp_time_s", "frames"])
    for r in report.trials:
        w.writerow(
            [r.seed, r.repeat, _num(r.speed), _num(r.cube), r.perception,
             r.outcome.value, _num(r.grasp_time), r.frames]
        )
    return buf.getvalue()


def parse_report_csv(text: str) -> list[dict]:
    """Read a cell table back into dicts with floats restored exactly."""
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        rows.append(
            {
                "speed_mm_s": float(raw["speed_mm_s"]),
                "cube_mm": float(raw["cube_mm"]),
                "perception": raw["perception"],
                "n": int(raw["n"]),
                "success_rate": float(raw["success_rate"]),
                "grasp_failure_rate": float(raw["grasp_failure_rate"]),
                "perception_failure_rate": float(raw["perception_failure_rate"]),
                "timeout_rate": float(raw["timeout_rate"]),
                "mean_grasp_time_s": float(raw["mean_grasp_time_s"]) if raw["mean_grasp_time_s"] else None,
                "sigma_grasp_time_s": float(raw["sigma_grasp_time_s"]) if raw["sigma_grasp_time_s"] else None,
            }
        )
    return rows


def report_metadata(report: Report) -> dict:
    """Full effective configuration echo for bit-exact reproducibility."""
    spec = report.spec
    rigs = {}
    for cube in spec.cube_sides:
        plant_cfg = replace(spec.plant, cube_side=cube)
        rigs[f"cube_{cube:g}"] = {
            kind: configio.perception_to_dict(perception_by_kind(kind, plant_cfg))
            for kind in spec.perception_kinds
        }
    return {
        "format": "dynagrasp-report-meta",
        "version": 1,
        "trajectory_seeds": list(spec.trajectory_seeds),
        "speeds_mm_s": list(spec.speeds),
        "cube_sides_mm": list(spec.cube_sides),
        "perception_kinds": list(spec.perception_kinds),
        "repeats": spec.repeats,
        "loss_frames": spec.loss_frames,
        "max_duration_s": spec.max_duration,
        "trajectory_params": configio.traj_params_to_dict(spec.traj_params),
        "plant": configio.plant_to_dict(spec.plant),
        "controller": configio.controller_to_dict(spec.controller),
        "perception_rigs": rigs,
        "n_trials": spec.n_trials,
    }


def write_report(report: Report, out_dir: str) -> dict[str, str]:
    """Write report.csv, trials.csv and metadata.json; returns the paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "report_csv": os.path.join(out_dir, "report.csv"),
        "trials_csv": os.path.join(out_dir, "trials.csv"),
        "metadata": os.path.join(out_dir, "metadata.json"),
    }
    with open(paths["report_csv"], "w", encoding="utf-8", newline="") as f:
        f.write(report_csv(report))
    with open(paths["trials_csv"], "w", encoding="utf-8", newline="") as f:
        f.write(trials_csv(report))
    with open(paths["metadata"], "w", encoding="utf-8") as f:
        json.dump(report_metadata(report), f, indent=2, sort_keys=True)
        f.write("\n")
    return paths
