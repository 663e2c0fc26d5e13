import logging
import random
from pathlib import Path
from typing import List, Optional, Union

from app.cnf import Formula, write_dimacs


logger = logging.getLogger(__name__)


def random_k_sat(
    num_vars: int, num_clauses: int, k: int = 3, rng: Optional[random.Random] = None
) -> Formula:
    """Uniform random k-SAT: k distinct variables per clause, random signs."""
    rng = rng or random.Random()
    width = min(k, num_vars)
    clauses = []
    for _ in range(num_clauses):
        variables = rng.sample(range(1, num_vars + 1), width)
        clauses.append([var if rng.random() < 0.5 else -var for var in variables])
    return Formula.from_lists(num_vars, clauses)


def random_formula(
    rng: random.Random,
    min_vars: int = 5,
    max_vars: int = 12,
    min_ratio: float = 3.0,
    max_ratio: float = 5.0,
) -> Formula:
    """Small mixed-width formula for oracle comparisons.

    Clause widths are mostly 3 with some binary and unit clauses so the
    binary watch lists and level-0 facts get exercised too.
    """
    num_vars = rng.randint(min_vars, max_vars)
    num_clauses = max(1, round(num_vars * rng.uniform(min_ratio, max_ratio)))
    clauses = []
    for _ in range(num_clauses):
        width = rng.choices((1, 2, 3), weights=(1, 6, 33))[0]
        variables = rng.sample(range(1, num_vars + 1), min(width, num_vars))
        clauses.append([var if rng.random() < 0.5 else -var for var in variables])
    return Formula.from_lists(num_vars, clauses)


def pigeonhole(holes: int) -> Formula:
    """PHP(holes + 1, holes); variable (i - 1) * holes + j puts pigeon i in hole j."""
    pigeons = holes + 1
    clauses: List[List[int]] = []
    for pigeon in range(1, pigeons + 1):
        clauses.append([(pigeon - 1) * holes + hole for hole in range(1, holes + 1)])
    for hole in range(1, holes + 1):
        for first in range(1, pigeons + 1):
            for second in range(first + 1, pigeons + 1):
                clauses.append(
                    [-((first - 1) * holes + hole), -((second - 1) * holes + hole)]
                )
    return Formula.from_lists(pigeons * holes, clauses)


def write_instance_directory(
    directory: Union[str, Path],
    count: int,
    rng: random.Random,
    num_vars: int = 50,
    ratio: float = 4.26,
    max_holes: int = 6,
) -> List[Path]:
    """Write a random/crafted mix: pigeonhole instances plus random 3-SAT."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    written = []
    crafted = min(count // 10, max(0, max_holes - 1))
    for holes in range(2, 2 + crafted):
        path = directory / f"php_{holes + 1:02d}_{holes:02d}.cnf"
        path.write_text(
            write_dimacs(
                pigeonhole(holes),
                comments=[f"pigeonhole {holes + 1} pigeons {holes} holes"],
            ),
            encoding="utf-8",
        )
        written.append(path)

    num_clauses = round(num_vars * ratio)
    for index in range(count - crafted):
        path = directory / f"uf{num_vars}_{index:04d}.cnf"
        formula = random_k_sat(num_vars, num_clauses, 3, rng)
        path.write_text(
            write_dimacs(
                formula, comments=[f"random 3-SAT n={num_vars} m={num_clauses}"]
            ),
            encoding="utf-8",
        )
        written.append(path)

    logger.info(
        "Instances written",
        extra={"event": "instances.generated", "directory": str(directory), "count": len(written)},
    )
    return written
