import json
import logging
from pathlib import Path
from time import monotonic
from typing import Dict, List, Optional, Sequence, TextIO

from django.conf import settings

from app.bench import (
    BASE_LABEL,
    BenchConfigError,
    discover_instances,
    format_summary,
    parse_config_list,
    run_benchmark,
    scatter_points,
    summarize,
    write_results_csv,
    write_scatter_csv,
)
from app.cnf import read_dimacs_file
from app.proof import ProofLog
from app.search import SolverConfig, SolveResult, SolveStatus, solve


logger = logging.getLogger(__name__)

EXIT_CODES = {
    SolveStatus.SAT: 10,
    SolveStatus.UNSAT: 20,
    SolveStatus.UNKNOWN: 0,
}
STATUS_LINES = {
    SolveStatus.SAT: "s SATISFIABLE",
    SolveStatus.UNSAT: "s UNSATISFIABLE",
    SolveStatus.UNKNOWN: "s UNKNOWN",
}
MODEL_LINE_WIDTH = 10


def format_model_lines(model: Sequence[int], width: int = MODEL_LINE_WIDTH) -> List[str]:
    """``v`` lines with at most ``width`` values each; the last ends with 0."""
    values = [str(value) for value in model] + ["0"]
    return [
        "v " + " ".join(values[start : start + width])
        for start in range(0, len(values), width)
    ]


def format_stats_lines(result: SolveResult, wall_seconds: float) -> List[str]:
    stats = result.stats
    return [
        f"c conflicts {stats.conflicts}",
        f"c decisions {stats.decisions}",
        f"c propagations {stats.propagations}",
        f"c restarts {stats.restarts}",
        f"c learnt {stats.learnt_total}",
        f"c core-learnt {stats.learnt_core}",
        f"c cpu-time {stats.cpu_time:.3f}",
        f"c wall-time {wall_seconds:.3f}",
    ]


def run_solve(
    path: str,
    stdout: TextIO,
    mode: Optional[str] = None,
    theta: Optional[int] = None,
    core_lbd: Optional[int] = None,
    proof_path: Optional[str] = None,
    max_conflicts: Optional[int] = None,
    seed: Optional[int] = None,
    show_stats: bool = False,
) -> int:
    """Solve one DIMACS file and print the result; returns the exit code.

    Input errors (unreadable file, malformed DIMACS, bad options, proof
    sink failures) propagate to the caller.
    """
    started = monotonic()
    config = SolverConfig.from_settings(
        mode=mode,
        theta=theta,
        core_lbd_threshold=core_lbd,
        max_conflicts=max_conflicts,
        rng_seed=seed,
    )
    formula = read_dimacs_file(path)

    if proof_path:
        with ProofLog.open(proof_path) as proof:
            result = solve(formula, config, proof)
    else:
        result = solve(formula, config)
    wall_seconds = monotonic() - started

    if show_stats:
        for line in format_stats_lines(result, wall_seconds):
            stdout.write(line + "\n")
    stdout.write(STATUS_LINES[result.status] + "\n")
    if result.status is SolveStatus.SAT:
        for line in format_model_lines(result.model):
            stdout.write(line + "\n")

    payload = {
        "event": "solve.run",
        "path": str(path),
        "status": result.status.value,
        "mode": config.mode.value,
        "theta": config.theta,
        "conflicts": result.stats.conflicts,
        "duration_ms": round(wall_seconds * 1000, 2),
    }
    logger.info(json.dumps(payload))
    return EXIT_CODES[result.status]


def scatter_paths(scatter: str) -> Dict[str, Path]:
    """The scatter file for ALL plus "_sat" and "_unsat" siblings."""
    path = Path(scatter)
    return {
        "ALL": path,
        "SAT": path.with_name(f"{path.stem}_sat{path.suffix}"),
        "UNSAT": path.with_name(f"{path.stem}_unsat{path.suffix}"),
    }


def run_bench(
    directory: str,
    out: str,
    stdout: TextIO,
    timeout: Optional[float] = None,
    configs: Optional[str] = None,
    scatter: Optional[str] = None,
    scatter_config: Optional[str] = None,
    summary: Optional[str] = None,
    jobs: Optional[int] = None,
    seed: Optional[int] = None,
) -> int:
    timeout = settings.BENCH_TIMEOUT_SECONDS if timeout is None else timeout
    if timeout <= 0:
        raise BenchConfigError("timeout must be positive")
    jobs = settings.BENCH_JOBS if jobs is None else jobs
    bench_configs = parse_config_list(
        configs if configs is not None else settings.BENCH_CONFIGS
    )
    labels = [config.label for config in bench_configs]

    scatter_label = scatter_config or settings.BENCH_SCATTER_CONFIG
    if scatter:
        if BASE_LABEL not in labels:
            raise BenchConfigError("--scatter needs the 'base' config")
        if scatter_label not in labels:
            raise BenchConfigError(f"Scatter config {scatter_label!r} is not benchmarked")

    paths = discover_instances(directory)
    results = run_benchmark(paths, bench_configs, timeout, jobs=jobs, seed=seed)

    with open(out, "w", encoding="utf-8", newline="") as handle:
        write_results_csv(results, handle)

    table = format_summary(summarize(results, labels))
    stdout.write(table)
    if summary:
        Path(summary).write_text(table, encoding="utf-8")

    if scatter:
        for partition, path in scatter_paths(scatter).items():
            points = scatter_points(results, BASE_LABEL, scatter_label, timeout, partition)
            with open(path, "w", encoding="utf-8", newline="") as handle:
                write_scatter_csv(points, handle)
    return 0
