"""Ground-truth tools for tests: brute-force SAT, model checking and a
forward RUP proof checker.

Nothing here shares code with the propagation module; clauses are handled as
plain DIMACS integer lists with their own occurrence lists.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from app.cnf import Formula


logger = logging.getLogger(__name__)

DEFAULT_MAX_VARS = 25


class OracleLimitError(ValueError):
    pass


class ModelError(ValueError):
    pass


class DratParseError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    satisfiable: bool
    model: Optional[List[int]] = None


@dataclass(frozen=True)
class ProofStep:
    deletion: bool
    literals: Tuple[int, ...]


def _max_vars() -> int:
    from django.conf import settings

    if settings.configured:
        return getattr(settings, "ORACLE_MAX_VARS", DEFAULT_MAX_VARS)
    return DEFAULT_MAX_VARS


def brute_force_solve(formula: Formula, max_vars: Optional[int] = None) -> OracleResult:
    """Enumerate all assignments, all-false first, bit i holding variable i + 1."""
    limit = _max_vars() if max_vars is None else max_vars
    num_vars = formula.num_vars
    if num_vars > limit:
        raise OracleLimitError(
            f"Refusing to enumerate 2^{num_vars} assignments (limit is {limit} variables)"
        )
    if formula.contains_empty:
        return OracleResult(satisfiable=False)

    masks = []
    for clause in formula.clauses:
        positive = negative = 0
        for value in clause.to_dimacs():
            if value > 0:
                positive |= 1 << (value - 1)
            else:
                negative |= 1 << (-value - 1)
        masks.append((positive, negative))

    everything = (1 << num_vars) - 1
    for bits in range(1 << num_vars):
        flipped = everything ^ bits
        if all((bits & positive) or (flipped & negative) for positive, negative in masks):
            model = [
                (var + 1) if bits >> var & 1 else -(var + 1) for var in range(num_vars)
            ]
            return OracleResult(satisfiable=True, model=model)
    return OracleResult(satisfiable=False)


def check_model(formula: Formula, model: Iterable[int]) -> bool:
    values: Dict[int, bool] = {}
    for value in model:
        if value == 0 or abs(value) > formula.num_vars:
            raise ModelError(f"Model literal {value} is out of range")
        values[abs(value)] = value > 0
    missing = [var for var in range(1, formula.num_vars + 1) if var not in values]
    if missing:
        raise ModelError(f"Model leaves variables unassigned: {missing[:10]}")
    if formula.contains_empty:
        return False
    return all(
        any(values[abs(value)] == (value > 0) for value in clause.to_dimacs())
        for clause in formula.clauses
    )


def parse_drat(text: str) -> List[ProofStep]:
    steps = []
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        tokens = raw_line.split()
        if not tokens or tokens[0] == "c":
            continue
        deletion = tokens[0] == "d"
        if deletion:
            tokens = tokens[1:]
        try:
            values = [int(token) for token in tokens]
        except ValueError as exc:
            raise DratParseError(f"line {line_number}: non-integer token") from exc
        if not values or values[-1] != 0 or 0 in values[:-1]:
            raise DratParseError(
                f"line {line_number}: clause must end with a single terminating 0"
            )
        steps.append(ProofStep(deletion=deletion, literals=tuple(values[:-1])))
    return steps


class _ClauseSet:
    def __init__(self):
        self.clauses: Dict[int, Tuple[int, ...]] = {}
        self.occurrences: Dict[int, Set[int]] = defaultdict(set)
        self.by_key: Dict[Tuple[int, ...], List[int]] = defaultdict(list)
        self.units: Set[int] = set()
        self.empty = 0
        self._next_id = 0

    def add(self, literals: Sequence[int]) -> None:
        literals = tuple(dict.fromkeys(literals))
        if not literals:
            self.empty += 1
            return
        clause_id = self._next_id
        self._next_id += 1
        self.clauses[clause_id] = literals
        self.by_key[tuple(sorted(literals))].append(clause_id)
        for value in literals:
            self.occurrences[value].add(clause_id)
        if len(literals) == 1:
            self.units.add(clause_id)

    def delete(self, literals: Sequence[int]) -> bool:
        ids = self.by_key.get(tuple(sorted(set(literals))))
        if not ids:
            return False
        clause_id = ids.pop()
        for value in self.clauses.pop(clause_id):
            self.occurrences[value].discard(clause_id)
        self.units.discard(clause_id)
        return True

    def has_rup(self, literals: Sequence[int]) -> bool:
        """True iff asserting the negation of ``literals`` propagates to a conflict."""
        if self.empty:
            return True
        assignment: Dict[int, bool] = {}
        queue: List[int] = []

        def assign(value: int) -> bool:
            var = abs(value)
            current = assignment.get(var)
            if current is not None:
                return current == (value > 0)
            assignment[var] = value > 0
            queue.append(value)
            return True

        for value in literals:
            if not assign(-value):
                return True
        for clause_id in self.units:
            if not assign(self.clauses[clause_id][0]):
                return True

        while queue:
            falsified = -queue.pop()
            for clause_id in self.occurrences.get(falsified, ()):
                unassigned = None
                open_count = 0
                satisfied = False
                for value in self.clauses[clause_id]:
                    current = assignment.get(abs(value))
                    if current is None:
                        open_count += 1
                        unassigned = value
                        if open_count > 1:
                            break
                    elif current == (value > 0):
                        satisfied = True
                        break
                if satisfied or open_count > 1:
                    continue
                if open_count == 0:
                    return True
                assign(unassigned)
        return False


def check_rup_proof(formula: Formula, proof: Sequence[ProofStep]) -> bool:
    clause_set = _ClauseSet()
    for clause in formula.clauses:
        clause_set.add(clause.to_dimacs())
    if formula.contains_empty:
        clause_set.add(())

    for number, step in enumerate(proof, start=1):
        if step.deletion:
            if not clause_set.delete(step.literals):
                logger.warning("Proof step %d deletes an unknown clause; ignored", number)
            continue
        if not clause_set.has_rup(step.literals):
            logger.info(
                "Proof step %d is not RUP",
                number,
                extra={"event": "oracle.rup_failed", "clause": list(step.literals)},
            )
            return False
        if not step.literals:
            return True
        clause_set.add(step.literals)

    logger.info("Proof ends without the empty clause")
    return False
