import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

from app.cnf import read_dimacs_file
from app.search import PropagationMode, SolverConfig, SolveStatus, solve


logger = logging.getLogger(__name__)

BASE_LABEL = "base"
STATUS_ERROR = "ERROR"
SOLVED = (SolveStatus.SAT.value, SolveStatus.UNSAT.value)
PARTITIONS = ("SAT", "UNSAT", "ALL")
INSTANCE_SUFFIXES = (".cnf", ".dimacs")
RESULT_COLUMNS = ["instance", "config", "status", "seconds", "conflicts"]
SCATTER_COLUMNS = ["instance", "base_seconds", "config_seconds"]


class BenchConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    label: str
    mode: PropagationMode
    theta: Optional[int] = None

    @classmethod
    def parse(cls, label: str) -> "BenchConfig":
        label = label.strip()
        if label == BASE_LABEL:
            return cls(label, PropagationMode.BCP)
        if label.startswith("theta="):
            try:
                theta = int(float(label.removeprefix("theta=")))
            except ValueError as exc:
                raise BenchConfigError(f"Invalid theta in config {label!r}") from exc
            if theta < 0:
                raise BenchConfigError(f"theta must be non-negative in {label!r}")
            return cls(label, PropagationMode.HYBRID, theta)
        if label in {mode.value for mode in PropagationMode}:
            return cls(label, PropagationMode(label))
        raise BenchConfigError(
            f"Unknown config {label!r}; expected base, bcp, cfup, hybrid or theta=N"
        )

    def solver_config(self, timeout: Optional[float], seed: Optional[int]) -> SolverConfig:
        return SolverConfig.from_settings(
            mode=self.mode, theta=self.theta, time_limit=timeout, rng_seed=seed
        )


def parse_config_list(labels: Union[str, Iterable[str]]) -> List[BenchConfig]:
    if isinstance(labels, str):
        labels = labels.split(",")
    configs = [BenchConfig.parse(label) for label in labels if label.strip()]
    if not configs:
        raise BenchConfigError("No benchmark configurations given")
    names = [config.label for config in configs]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise BenchConfigError(f"Duplicate configs: {', '.join(duplicates)}")
    return configs


@dataclass(frozen=True)
class InstanceResult:
    instance: str
    config: str
    status: str
    seconds: float
    conflicts: int

    @property
    def solved(self) -> bool:
        return self.status in SOLVED


def discover_instances(directory: Union[str, Path]) -> List[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectoryError(f"{directory} is not a readable directory")
    return sorted(
        path for path in directory.iterdir() if path.suffix in INSTANCE_SUFFIXES
    )


def run_instance(path: str, label: str, config: SolverConfig) -> InstanceResult:
    """Solve one instance under one configuration; runs in worker processes."""
    name = Path(path).name
    started = time.perf_counter()
    try:
        formula = read_dimacs_file(path)
    except (OSError, ValueError) as exc:
        logger.warning("Skipping %s: %s", name, exc)
        return InstanceResult(name, label, STATUS_ERROR, 0.0, 0)

    result = solve(formula, config)
    seconds = time.perf_counter() - started
    status = result.status.value
    if config.time_limit is not None and seconds > config.time_limit:
        status = SolveStatus.UNKNOWN.value
    return InstanceResult(name, label, status, seconds, result.stats.conflicts)


def run_benchmark(
    paths: Sequence[Union[str, Path]],
    configs: Sequence[BenchConfig],
    timeout: Optional[float],
    jobs: int = 1,
    seed: Optional[int] = None,
) -> List[InstanceResult]:
    tasks = [
        (str(path), config.label, config.solver_config(timeout, seed))
        for path in paths
        for config in configs
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_instance, *zip(*tasks)))
    else:
        results = [run_instance(*task) for task in tasks]

    order = {config.label: index for index, config in enumerate(configs)}
    results.sort(key=lambda result: (result.instance, order[result.config]))
    for result in results:
        payload = {
            "event": "bench.instance",
            "instance": result.instance,
            "config": result.config,
            "status": result.status,
            "seconds": round(result.seconds, 4),
            "conflicts": result.conflicts,
        }
        logger.info(json.dumps(payload))

    payload = {
        "event": "bench.finished",
        "instances": len(paths),
        "configs": [config.label for config in configs],
        "runs": len(results),
        "solved": sum(1 for result in results if result.solved),
        "jobs": jobs,
    }
    logger.info(json.dumps(payload))
    return results


@dataclass
class BenchSummary:
    configs: List[str]
    solved: Dict[Tuple[str, str], int]
    time: Dict[Tuple[str, str], float]


def summarize(results: Iterable[InstanceResult], configs: Sequence[str]) -> BenchSummary:
    """Solved counts and total solved time per (partition, config).

    A run counts towards the partition of its own verdict and towards ALL;
    unsolved runs count nowhere.
    """
    solved = {(partition, label): 0 for partition in PARTITIONS for label in configs}
    total = {(partition, label): 0.0 for partition in PARTITIONS for label in configs}
    verdicts: Dict[str, str] = {}
    for result in results:
        if not result.solved or result.config not in configs:
            continue
        previous = verdicts.setdefault(result.instance, result.status)
        if previous != result.status:
            logger.error(
                "Configurations disagree on %s: %s vs %s",
                result.instance,
                previous,
                result.status,
            )
        for partition in (result.status, "ALL"):
            solved[(partition, result.config)] += 1
            total[(partition, result.config)] += result.seconds
    return BenchSummary(configs=list(configs), solved=solved, time=total)


def format_summary(summary: BenchSummary) -> str:
    width = max([10] + [len(label) for label in summary.configs])
    header = " " * 14 + "".join(f"{label:>{width + 2}}" for label in summary.configs)
    lines = [header.rstrip()]
    for partition in PARTITIONS:
        solved = "".join(
            f"{summary.solved[(partition, label)]:>{width + 2}d}"
            for label in summary.configs
        )
        times = "".join(
            f"{summary.time[(partition, label)]:>{width + 2}.2f}"
            for label in summary.configs
        )
        lines.append(f"{partition:<6}{'Solved':<8}{solved}")
        lines.append(f"{'':<6}{'Time':<8}{times}")
    return "\n".join(lines) + "\n"


def write_results_csv(results: Iterable[InstanceResult], handle: TextIO) -> None:
    writer = csv.writer(handle)
    writer.writerow(RESULT_COLUMNS)
    for result in results:
        writer.writerow(
            [
                result.instance,
                result.config,
                result.status,
                f"{result.seconds:.4f}",
                result.conflicts,
            ]
        )


def instance_verdicts(results: Iterable[InstanceResult]) -> Dict[str, str]:
    """SAT or UNSAT per instance, as proved by the first configuration that solved it."""
    verdicts: Dict[str, str] = {}
    for result in results:
        if result.solved:
            verdicts.setdefault(result.instance, result.status)
    return verdicts


def scatter_points(
    results: Iterable[InstanceResult],
    base_label: str,
    config_label: str,
    timeout: float,
    partition: str = "ALL",
) -> List[Tuple[str, float, float]]:
    """(instance, base_seconds, config_seconds) with unsolved runs at the timeout.

    With partition SAT or UNSAT only instances some configuration proved to
    have that verdict are kept; unsolved instances then drop out.
    """
    if partition not in PARTITIONS:
        raise BenchConfigError(f"Unknown partition {partition!r}")
    results = list(results)
    verdicts = instance_verdicts(results)
    by_instance: Dict[str, Dict[str, InstanceResult]] = {}
    for result in results:
        if partition != "ALL" and verdicts.get(result.instance) != partition:
            continue
        by_instance.setdefault(result.instance, {})[result.config] = result

    def clamp(result: InstanceResult) -> float:
        if not result.solved:
            return timeout
        return min(result.seconds, timeout)

    points = []
    for instance in sorted(by_instance):
        runs = by_instance[instance]
        if base_label in runs and config_label in runs:
            points.append((instance, clamp(runs[base_label]), clamp(runs[config_label])))
    return points


def write_scatter_csv(points: Iterable[Tuple[str, float, float]], handle: TextIO) -> None:
    writer = csv.writer(handle)
    writer.writerow(SCATTER_COLUMNS)
    for instance, base_seconds, config_seconds in points:
        writer.writerow([instance, f"{base_seconds:.4f}", f"{config_seconds:.4f}"])
