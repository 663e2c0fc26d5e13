"""Assignment trail, two-watched-literal lists and the two propagation engines.

Watch lists are keyed by the literal whose assignment falsifies the watch:
a clause watching literal ``a`` sits in ``nonbinary[negate(a)]`` and is
scanned when ``negate(a)`` is taken off the trail.
"""

import copy
from typing import List, Optional, Tuple

from app.cnf import Clause, Literal


TRUE = 1
FALSE = -1
UNASSIGNED = 0


class ContractViolation(AssertionError):
    pass


class InvariantViolation(AssertionError):
    pass


def is_core_clause(clause: Clause, threshold: int) -> bool:
    if not clause.learnt:
        return False
    if clause.lbd is None:
        raise ContractViolation(f"learnt clause {clause!r} has no LBD")
    return clause.lbd <= threshold


class Trail:
    __slots__ = ("entries", "level_starts", "propagate_head")

    def __init__(self):
        self.entries: List[Literal] = []
        # level_starts[i] is the index of the first entry of decision level i + 1
        self.level_starts: List[int] = []
        self.propagate_head = 0

    @property
    def decision_level(self) -> int:
        return len(self.level_starts)

    def __len__(self) -> int:
        return len(self.entries)


class Assignment:
    """Per-literal truth values plus per-variable level and antecedent.

    Variables are 0-based here (``lit >> 1``).
    """

    __slots__ = ("values", "levels", "reasons")

    def __init__(self, num_vars: int):
        self.values: List[int] = [UNASSIGNED] * (2 * num_vars)
        self.levels: List[int] = [-1] * num_vars
        self.reasons: List[Optional[Clause]] = [None] * num_vars

    def value(self, lit: Literal) -> int:
        return self.values[lit]

    def variable_value(self, var: int) -> Optional[bool]:
        value = self.values[var << 1]
        if value == UNASSIGNED:
            return None
        return value == TRUE

    def level_of(self, lit: Literal) -> int:
        return self.levels[lit >> 1]

    def reason_of(self, lit: Literal) -> Optional[Clause]:
        return self.reasons[lit >> 1]


class WatchLists:
    __slots__ = ("nonbinary", "binary")

    def __init__(self, num_vars: int):
        self.nonbinary: List[List[Clause]] = [[] for _ in range(2 * num_vars)]
        self.binary: List[List[Tuple[Literal, Clause]]] = [
            [] for _ in range(2 * num_vars)
        ]


class Propagator:
    def __init__(
        self,
        num_vars: int,
        core_lbd_threshold: int = 7,
        check_invariants: bool = False,
    ):
        self.num_vars = num_vars
        self.core_lbd_threshold = core_lbd_threshold
        self.check_invariants = check_invariants
        self.trail = Trail()
        self.assignment = Assignment(num_vars)
        self.watches = WatchLists(num_vars)
        self.propagations = 0
        self.partition_checks = 0

    @property
    def decision_level(self) -> int:
        return len(self.trail.level_starts)

    def value(self, lit: Literal) -> int:
        return self.assignment.values[lit]

    def all_assigned(self) -> bool:
        return len(self.trail.entries) == self.num_vars

    def attach_clause(self, clause: Clause) -> None:
        lits = clause.literals
        if len(lits) < 2:
            raise ContractViolation(f"cannot watch {clause!r}: fewer than 2 literals")
        if clause.learnt and clause.lbd is None:
            raise ContractViolation(f"learnt clause {clause!r} attached without LBD")
        first, second = lits[0], lits[1]
        if len(lits) == 2:
            self.watches.binary[first ^ 1].append((second, clause))
            self.watches.binary[second ^ 1].append((first, clause))
        else:
            self.watches.nonbinary[first ^ 1].append(clause)
            self.watches.nonbinary[second ^ 1].append(clause)

    def enqueue_assignment(
        self, lit: Literal, level: int, antecedent: Optional[Clause] = None
    ) -> bool:
        values = self.assignment.values
        current = values[lit]
        if current == TRUE:
            return True
        if current == FALSE:
            return False
        values[lit] = TRUE
        values[lit ^ 1] = FALSE
        var = lit >> 1
        self.assignment.levels[var] = level
        self.assignment.reasons[var] = antecedent
        self.trail.entries.append(lit)
        return True

    def new_decision_level(self) -> None:
        self.trail.level_starts.append(len(self.trail.entries))

    def cancel_until(self, level: int) -> List[Literal]:
        """Pop every trail entry above ``level``; returns the popped literals."""
        trail = self.trail
        if len(trail.level_starts) <= level:
            return []
        start = trail.level_starts[level]
        popped = trail.entries[start:]
        values = self.assignment.values
        levels = self.assignment.levels
        reasons = self.assignment.reasons
        for lit in popped:
            values[lit] = UNASSIGNED
            values[lit ^ 1] = UNASSIGNED
            levels[lit >> 1] = -1
            reasons[lit >> 1] = None
        del trail.entries[start:]
        del trail.level_starts[level:]
        trail.propagate_head = len(trail.entries)
        return popped

    def propagate_standard(self) -> Optional[Clause]:
        return self._propagate(core_first=False)

    def propagate_core_first(self) -> Optional[Clause]:
        return self._propagate(core_first=True)

    def _propagate(self, core_first: bool) -> Optional[Clause]:
        trail = self.trail.entries
        values = self.assignment.values
        levels = self.assignment.levels
        reasons = self.assignment.reasons
        binary = self.watches.binary
        nonbinary = self.watches.nonbinary
        threshold = self.core_lbd_threshold
        check_partition = core_first and self.check_invariants
        level = len(self.trail.level_starts)
        head = self.trail.propagate_head

        while head < len(trail):
            p = trail[head]
            self.propagations += 1

            # binary clauses first; their order is never touched
            bin_list = binary[p]
            stale = False
            for other, clause in bin_list:
                if clause.deleted:
                    stale = True
                    continue
                value = values[other]
                if value == TRUE:
                    continue
                if value == FALSE:
                    self.trail.propagate_head = head
                    return clause
                values[other] = TRUE
                values[other ^ 1] = FALSE
                levels[other >> 1] = level
                reasons[other >> 1] = clause
                trail.append(other)
            if stale:
                bin_list[:] = [entry for entry in bin_list if not entry[1].deleted]

            false_lit = p ^ 1
            ws = nonbinary[p]
            end = len(ws)
            i = j = 0
            core_end = -1
            conflict = None
            while i < end:
                clause = ws[i]
                i += 1
                if clause.deleted:
                    continue
                lits = clause.literals
                if lits[0] == false_lit:
                    lits[0] = lits[1]
                    lits[1] = false_lit
                first = lits[0]
                first_value = values[first]
                if first_value != TRUE:
                    relocated = False
                    for k in range(2, len(lits)):
                        candidate = lits[k]
                        if values[candidate] != FALSE:
                            lits[1] = candidate
                            lits[k] = false_lit
                            nonbinary[candidate ^ 1].append(clause)
                            relocated = True
                            break
                    if relocated:
                        continue
                    if first_value == FALSE:
                        conflict = clause
                    else:
                        values[first] = TRUE
                        values[first ^ 1] = FALSE
                        levels[first >> 1] = level
                        reasons[first >> 1] = clause
                        trail.append(first)

                ws[j] = clause
                if core_first and clause.learnt and clause.lbd <= threshold:
                    core_end += 1
                    ws[j] = ws[core_end]
                    ws[core_end] = clause
                j += 1

                if conflict is not None:
                    while i < end:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    self.trail.propagate_head = head
                    return conflict
            del ws[j:]

            if check_partition:
                self._check_core_prefix(ws, j)
            head += 1

        self.trail.propagate_head = head
        return None

    def _check_core_prefix(self, ws: List[Clause], retained: int) -> None:
        self.partition_checks += 1
        seen_non_core = False
        for clause in ws[:retained]:
            if is_core_clause(clause, self.core_lbd_threshold):
                if seen_non_core:
                    raise InvariantViolation(
                        f"core clause {clause!r} placed after a non-core clause"
                    )
            else:
                seen_non_core = True

    def trail_entries(self) -> List[Tuple[Literal, int, Optional[Clause]]]:
        levels = self.assignment.levels
        reasons = self.assignment.reasons
        return [(lit, levels[lit >> 1], reasons[lit >> 1]) for lit in self.trail.entries]

    def check_trail_consistency(self) -> None:
        values = self.assignment.values
        levels = self.assignment.levels
        trail = self.trail
        if trail.propagate_head > len(trail.entries):
            raise InvariantViolation("propagate head past the end of the trail")

        on_trail = set()
        previous_level = 0
        for index, lit in enumerate(trail.entries):
            var = lit >> 1
            if var in on_trail:
                raise InvariantViolation(f"variable {var + 1} appears twice on the trail")
            on_trail.add(var)
            if values[lit] != TRUE or values[lit ^ 1] != FALSE:
                raise InvariantViolation(f"trail literal {lit} is not assigned true")
            level = levels[var]
            expected = sum(1 for start in trail.level_starts if start <= index)
            if level != expected or level < previous_level:
                raise InvariantViolation(
                    f"trail literal {lit} has level {level}, expected {expected}"
                )
            previous_level = level

        for var in range(self.num_vars):
            assigned = values[var << 1] != UNASSIGNED
            if assigned != (var in on_trail):
                raise InvariantViolation(
                    f"variable {var + 1} assignment disagrees with the trail"
                )

    def watch_soundness_violations(self) -> List[Clause]:
        """Clauses whose watches hide a unit or falsified state at fixpoint."""
        violations = []
        seen = set()
        for ws in self.watches.nonbinary:
            for clause in ws:
                if clause.deleted or id(clause) in seen:
                    continue
                seen.add(id(clause))
                first, second = clause.literals[0], clause.literals[1]
                watched_ok = (
                    clause in self.watches.nonbinary[first ^ 1]
                    and clause in self.watches.nonbinary[second ^ 1]
                )
                if not watched_ok or not self._watch_pair_sound(first, second):
                    violations.append(clause)
        for ws in self.watches.binary:
            for other, clause in ws:
                if clause.deleted or id(clause) in seen:
                    continue
                seen.add(id(clause))
                if not self._watch_pair_sound(*clause.literals):
                    violations.append(clause)
        return violations

    def _watch_pair_sound(self, first: Literal, second: Literal) -> bool:
        values = self.assignment.values
        if values[first] == TRUE or values[second] == TRUE:
            return True
        return values[first] != FALSE and values[second] != FALSE

    def clone(self) -> "Propagator":
        return copy.deepcopy(self)
