import heapq
import logging
import random
import time
from dataclasses import asdict, dataclass, field
from enum import StrEnum
from typing import Iterable, List, Optional, Sequence

from app.cnf import Clause, Formula, Literal, decode_literal
from app.proof import ProofLog
from app.propagation import (
    FALSE,
    TRUE,
    UNASSIGNED,
    Assignment,
    ContractViolation,
    InvariantViolation,
    Propagator,
)


logger = logging.getLogger(__name__)

ACTIVITY_LIMIT = 1e100
CLAUSE_ACTIVITY_LIMIT = 1e20
TIME_CHECK_DECISIONS = 1000


class PropagationMode(StrEnum):
    BCP = "bcp"
    CFUP = "cfup"
    HYBRID = "hybrid"


class PropagatorKind(StrEnum):
    STANDARD = "standard"
    CORE_FIRST = "core_first"


class SolveStatus(StrEnum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SolverConfig:
    mode: PropagationMode = PropagationMode.HYBRID
    theta: int = 2_000_000
    core_lbd_threshold: int = 7
    restart_base: int = 64
    reduce_first: int = 2000
    reduce_increment: int = 300
    var_decay: float = 0.95
    clause_decay: float = 0.999
    random_var_freq: float = 0.0
    max_conflicts: Optional[int] = None
    time_limit: Optional[float] = None
    rng_seed: int = 0
    check_invariants: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", PropagationMode(self.mode))
        except ValueError as exc:
            raise ValueError(
                f"Unknown propagation mode {self.mode!r}; expected bcp, cfup or hybrid"
            ) from exc
        if self.theta < 0:
            raise ValueError("theta must be non-negative")
        if self.core_lbd_threshold < 1:
            raise ValueError("core_lbd_threshold must be at least 1")
        if self.restart_base < 1:
            raise ValueError("restart_base must be at least 1")
        if self.reduce_first < 1 or self.reduce_increment < 0:
            raise ValueError("reduction schedule must be positive")
        if not 0.0 < self.var_decay < 1.0 or not 0.0 < self.clause_decay < 1.0:
            raise ValueError("decay factors must lie strictly between 0 and 1")
        if not 0.0 <= self.random_var_freq <= 1.0:
            raise ValueError("random_var_freq must lie in [0, 1]")
        if self.max_conflicts is not None and self.max_conflicts < 0:
            raise ValueError("max_conflicts must be non-negative")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")

    @classmethod
    def from_settings(cls, **overrides) -> "SolverConfig":
        """Build a config from Django settings; ``None`` overrides are ignored."""
        from django.conf import settings

        values = {
            "mode": settings.SOLVER_MODE,
            "theta": settings.SOLVER_THETA,
            "core_lbd_threshold": settings.SOLVER_CORE_LBD_THRESHOLD,
            "restart_base": settings.SOLVER_RESTART_BASE,
            "reduce_first": settings.SOLVER_REDUCE_FIRST,
            "reduce_increment": settings.SOLVER_REDUCE_INCREMENT,
            "var_decay": settings.SOLVER_VAR_DECAY,
            "clause_decay": settings.SOLVER_CLAUSE_DECAY,
            "random_var_freq": settings.SOLVER_RANDOM_VAR_FREQ,
            "rng_seed": settings.SOLVER_SEED,
            "check_invariants": settings.SOLVER_CHECK_INVARIANTS,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass
class SearchStats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    restarts: int = 0
    reductions: int = 0
    learnt_total: int = 0
    learnt_core: int = 0
    deleted: int = 0
    cpu_time: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class LearntClause:
    literals: List[Literal]
    lbd: int
    assertion_level: int


@dataclass
class SolveResult:
    status: SolveStatus
    model: Optional[List[int]] = None
    stats: SearchStats = field(default_factory=SearchStats)


def luby(index: int, base: float = 2.0) -> int:
    """``index``-th (0-based) element of the Luby sequence 1,1,2,1,1,2,4,..."""
    size, sequence = 1, 0
    while size < index + 1:
        sequence += 1
        size = 2 * size + 1
    while size - 1 != index:
        size = (size - 1) >> 1
        sequence -= 1
        index %= size
    return int(base**sequence)


def select_propagator(stats: SearchStats, config: SolverConfig) -> PropagatorKind:
    if config.mode is PropagationMode.BCP:
        return PropagatorKind.STANDARD
    if config.mode is PropagationMode.CFUP:
        return PropagatorKind.CORE_FIRST
    if stats.conflicts > config.theta:
        return PropagatorKind.STANDARD
    return PropagatorKind.CORE_FIRST


def compute_lbd(literals: Sequence[Literal], assignment: Assignment) -> int:
    """Number of distinct decision levels among ``literals``."""
    levels = assignment.levels
    seen = set()
    for lit in literals:
        level = levels[lit >> 1]
        if level < 0:
            raise ContractViolation(f"literal {decode_literal(lit)} is unassigned")
        seen.add(level)
    return len(seen)


class Solver:
    def __init__(
        self,
        formula: Formula,
        config: Optional[SolverConfig] = None,
        proof: Optional[ProofLog] = None,
    ):
        self.formula = formula
        self.config = config or SolverConfig()
        self.proof = proof or ProofLog.disabled()
        self.stats = SearchStats()

        num_vars = formula.num_vars
        self.engine = Propagator(
            num_vars,
            core_lbd_threshold=self.config.core_lbd_threshold,
            check_invariants=self.config.check_invariants,
        )
        self.activity: List[float] = [0.0] * num_vars
        self.var_inc = 1.0
        self.clause_inc = 1.0
        self.phases: List[bool] = [False] * num_vars
        # (-activity, var) entries; ties go to the lowest variable index
        self.order_heap = [(0.0, var) for var in range(num_vars)]
        self.rng = random.Random(self.config.rng_seed)

        self.clauses: List[Clause] = []
        self.learnts: List[Clause] = []
        self.conflicts_since_restart = 0
        self.reduce_interval = self.config.reduce_first
        self.next_reduce = self.config.reduce_first
        self.learnt_checks = 0
        self._seen = bytearray(num_vars)
        self._deadline: Optional[float] = None
        self._ok = self._load()

    def _load(self) -> bool:
        if self.formula.contains_empty:
            return False
        units = []
        for source in self.formula.clauses:
            if len(source.literals) == 1:
                units.append(source.literals[0])
                continue
            clause = Clause(list(source.literals))
            self.engine.attach_clause(clause)
            self.clauses.append(clause)
        for lit in units:
            if not self.engine.enqueue_assignment(lit, 0):
                return False
        return True

    def solve(self) -> SolveResult:
        started = time.process_time()
        if self.config.time_limit is not None:
            self._deadline = time.monotonic() + self.config.time_limit
        try:
            status = self._search()
        finally:
            self.stats.propagations = self.engine.propagations
            self.stats.cpu_time = time.process_time() - started

        model = self._model() if status is SolveStatus.SAT else None
        logger.info(
            "Solve finished",
            extra={
                "event": "solve.finished",
                "status": status.value,
                "mode": self.config.mode.value,
                "theta": self.config.theta,
                **self.stats.as_dict(),
            },
        )
        return SolveResult(status=status, model=model, stats=self.stats)

    def _search(self) -> SolveStatus:
        if not self._ok:
            self.proof.log_empty()
            return SolveStatus.UNSAT

        engine = self.engine
        stats = self.stats
        config = self.config
        while True:
            if select_propagator(stats, config) is PropagatorKind.CORE_FIRST:
                conflict = engine.propagate_core_first()
            else:
                conflict = engine.propagate_standard()

            if conflict is not None:
                stats.conflicts += 1
                self.conflicts_since_restart += 1
                learnt = self.analyze_conflict(conflict)
                if not learnt.literals:
                    self.proof.log_empty()
                    return SolveStatus.UNSAT
                self.backtrack(learnt.assertion_level)
                self._learn(learnt)
                self.clause_inc /= config.clause_decay
                if self._out_of_budget():
                    return SolveStatus.UNKNOWN
                continue

            if engine.all_assigned():
                if config.check_invariants:
                    engine.check_trail_consistency()
                return SolveStatus.SAT
            if self.should_restart():
                self._restart()
            if stats.conflicts >= self.next_reduce:
                self.reduce_clause_db()
            if (
                self._deadline is not None
                and stats.decisions % TIME_CHECK_DECISIONS == 0
                and time.monotonic() > self._deadline
            ):
                return SolveStatus.UNKNOWN
            self.decide()

    def _out_of_budget(self) -> bool:
        max_conflicts = self.config.max_conflicts
        if max_conflicts is not None and self.stats.conflicts >= max_conflicts:
            return True
        return self._deadline is not None and time.monotonic() > self._deadline

    def _model(self) -> List[int]:
        values = self.engine.assignment.values
        return [
            (var + 1) if values[var << 1] == TRUE else -(var + 1)
            for var in range(self.formula.num_vars)
        ]

    def analyze_conflict(self, conflict: Clause) -> LearntClause:
        """First-UIP resolution starting from a falsified clause."""
        engine = self.engine
        level = engine.decision_level
        if level == 0:
            return LearntClause(literals=[], lbd=0, assertion_level=0)

        assignment = engine.assignment
        levels = assignment.levels
        reasons = assignment.reasons
        trail = engine.trail.entries
        seen = self._seen

        learnt: List[Literal] = [-1]
        bumped: List[int] = []
        pending = 0
        pivot: Optional[Literal] = None
        index = len(trail) - 1
        clause = conflict
        while True:
            if clause.learnt:
                self._bump_clause(clause)
                self._refresh_lbd(clause)
            for lit in clause.literals:
                if lit == pivot:
                    continue
                var = lit >> 1
                if seen[var] or levels[var] == 0:
                    continue
                seen[var] = 1
                bumped.append(var)
                if levels[var] >= level:
                    pending += 1
                else:
                    learnt.append(lit)

            while not seen[trail[index] >> 1]:
                index -= 1
            pivot = trail[index]
            index -= 1
            seen[pivot >> 1] = 0
            pending -= 1
            if pending == 0:
                break
            clause = reasons[pivot >> 1]

        learnt[0] = pivot ^ 1
        for lit in learnt[1:]:
            seen[lit >> 1] = 0

        assertion_level = 0
        if len(learnt) > 1:
            highest = 1
            for position in range(2, len(learnt)):
                if levels[learnt[position] >> 1] > levels[learnt[highest] >> 1]:
                    highest = position
            learnt[1], learnt[highest] = learnt[highest], learnt[1]
            assertion_level = levels[learnt[1] >> 1]

        result = LearntClause(
            literals=learnt,
            lbd=compute_lbd(learnt, assignment),
            assertion_level=assertion_level,
        )
        self.bump_and_decay(bumped)
        if self.config.check_invariants:
            self._check_learnt(result, level)
        return result

    def _check_learnt(self, learnt: LearntClause, conflict_level: int) -> None:
        self.learnt_checks += 1
        assignment = self.engine.assignment
        lits = learnt.literals
        at_conflict_level = [lit for lit in lits if assignment.level_of(lit) == conflict_level]
        if len(at_conflict_level) != 1 or at_conflict_level[0] != lits[0]:
            raise InvariantViolation(
                f"learnt clause {[decode_literal(l) for l in lits]} is not asserting"
            )
        if any(assignment.value(lit) != FALSE for lit in lits):
            raise InvariantViolation("learnt clause is not falsified at conflict time")
        expected = max((assignment.level_of(lit) for lit in lits[1:]), default=0)
        if learnt.assertion_level != expected:
            raise InvariantViolation(
                f"assertion level {learnt.assertion_level} != {expected}"
            )
        if not 1 <= learnt.lbd <= len(lits):
            raise InvariantViolation(f"lbd {learnt.lbd} out of bounds for size {len(lits)}")

    def _refresh_lbd(self, clause: Clause) -> None:
        if clause.lbd is not None and clause.lbd <= 2:
            return
        lbd = compute_lbd(clause.literals, self.engine.assignment)
        if clause.lbd is None or lbd < clause.lbd:
            clause.lbd = lbd

    def _learn(self, learnt: LearntClause) -> None:
        engine = self.engine
        literals = learnt.literals
        self.proof.log_add(literals)
        self.stats.learnt_total += 1
        if len(literals) == 1:
            engine.enqueue_assignment(literals[0], 0)
            return

        clause = Clause(list(literals), learnt=True, lbd=learnt.lbd)
        if learnt.lbd <= self.config.core_lbd_threshold:
            self.stats.learnt_core += 1
        engine.attach_clause(clause)
        self.learnts.append(clause)
        self._bump_clause(clause)
        engine.enqueue_assignment(literals[0], engine.decision_level, clause)

    def backtrack(self, target_level: int) -> None:
        engine = self.engine
        if target_level >= engine.decision_level:
            return
        popped = engine.cancel_until(target_level)
        activity = self.activity
        heap = self.order_heap
        for lit in popped:
            var = lit >> 1
            self.phases[var] = not (lit & 1)
            heapq.heappush(heap, (-activity[var], var))
        if len(heap) > 4 * self.formula.num_vars + 1024:
            self._rebuild_order_heap()
        if self.config.check_invariants:
            engine.check_trail_consistency()

    def decide(self) -> Literal:
        var = self._pick_branch_variable()
        if var is None:
            raise ContractViolation("decide() called with every variable assigned")
        lit = (var << 1) | (0 if self.phases[var] else 1)
        engine = self.engine
        engine.new_decision_level()
        engine.enqueue_assignment(lit, engine.decision_level)
        self.stats.decisions += 1
        return lit

    def _pick_branch_variable(self) -> Optional[int]:
        values = self.engine.assignment.values
        num_vars = self.formula.num_vars
        freq = self.config.random_var_freq
        if freq and num_vars and self.rng.random() < freq:
            var = self.rng.randrange(num_vars)
            if values[var << 1] == UNASSIGNED:
                return var

        heap = self.order_heap
        activity = self.activity
        while heap:
            negated, var = heapq.heappop(heap)
            if values[var << 1] != UNASSIGNED or negated != -activity[var]:
                continue
            return var
        return None

    def bump_and_decay(self, variables: Iterable[int]) -> None:
        """Bump 0-based variable indices, then grow the increment by 1/decay."""
        activity = self.activity
        values = self.engine.assignment.values
        heap = self.order_heap
        inc = self.var_inc
        overflow = False
        for var in variables:
            activity[var] += inc
            if activity[var] > ACTIVITY_LIMIT:
                overflow = True
            if values[var << 1] == UNASSIGNED:
                heapq.heappush(heap, (-activity[var], var))
        self.var_inc /= self.config.var_decay
        if overflow or self.var_inc > ACTIVITY_LIMIT:
            self._rescale_activity()

    def _rescale_activity(self) -> None:
        scale = 1.0 / ACTIVITY_LIMIT
        self.activity = [value * scale for value in self.activity]
        self.var_inc *= scale
        self._rebuild_order_heap()

    def _rebuild_order_heap(self) -> None:
        values = self.engine.assignment.values
        self.order_heap = [
            (-self.activity[var], var)
            for var in range(self.formula.num_vars)
            if values[var << 1] == UNASSIGNED
        ]
        heapq.heapify(self.order_heap)

    def _bump_clause(self, clause: Clause) -> None:
        clause.activity += self.clause_inc
        if clause.activity > CLAUSE_ACTIVITY_LIMIT:
            scale = 1.0 / CLAUSE_ACTIVITY_LIMIT
            for learnt in self.learnts:
                learnt.activity *= scale
            self.clause_inc *= scale

    def _locked(self, clause: Clause) -> bool:
        reasons = self.engine.assignment.reasons
        return any(reasons[lit >> 1] is clause for lit in clause.literals[:2])

    def reduce_clause_db(self) -> None:
        threshold = self.config.core_lbd_threshold
        candidates = [
            clause
            for clause in self.learnts
            if not clause.deleted and clause.lbd > threshold and not self._locked(clause)
        ]
        candidates.sort(key=lambda clause: clause.activity)
        doomed = candidates[: len(candidates) // 2]
        for clause in doomed:
            clause.deleted = True
            self.proof.log_delete(clause.literals)
        self.learnts = [clause for clause in self.learnts if not clause.deleted]

        self.stats.reductions += 1
        self.stats.deleted += len(doomed)
        self.reduce_interval += self.config.reduce_increment
        self.next_reduce = self.stats.conflicts + self.reduce_interval
        logger.debug(
            "Clause database reduced",
            extra={
                "event": "search.reduce",
                "deleted": len(doomed),
                "kept": len(self.learnts),
                "next_reduce": self.next_reduce,
            },
        )

    def should_restart(self) -> bool:
        limit = self.config.restart_base * luby(self.stats.restarts)
        return self.conflicts_since_restart >= limit

    def _restart(self) -> None:
        self.backtrack(0)
        self.stats.restarts += 1
        self.conflicts_since_restart = 0
        logger.debug(
            "Restart",
            extra={"event": "search.restart", "conflicts": self.stats.conflicts},
        )


def solve(
    formula: Formula,
    config: Optional[SolverConfig] = None,
    proof: Optional[ProofLog] = None,
) -> SolveResult:
    return Solver(formula, config, proof).solve()
