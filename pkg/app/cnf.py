"""CNF formulas, literal encoding and DIMACS reading/writing.

Literals are dense non-negative integers: variable v (1-based, DIMACS) maps to
2(v-1) for the positive literal and 2(v-1)+1 for the negative one, so negation
flips the low bit.
"""

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Union


logger = logging.getLogger(__name__)

Literal = int


class DimacsParseError(ValueError):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class LiteralEncodingError(ValueError):
    pass


def encode_literal(dimacs_int: int) -> Literal:
    if dimacs_int == 0:
        raise LiteralEncodingError("0 is not a literal")
    if dimacs_int > 0:
        return (dimacs_int - 1) << 1
    return ((-dimacs_int - 1) << 1) | 1


def decode_literal(lit: Literal) -> int:
    variable = (lit >> 1) + 1
    return -variable if lit & 1 else variable


def negate(lit: Literal) -> Literal:
    return lit ^ 1


def variable_of(lit: Literal) -> int:
    """1-based DIMACS variable of a literal."""
    return (lit >> 1) + 1


def is_negative(lit: Literal) -> bool:
    return bool(lit & 1)


@dataclass(eq=False, slots=True)
class Clause:
    """A clause plus the metadata the solver keeps on it.

    Equality is identity: the solver uses Clause objects as clause
    references (antecedents, watch entries).
    """

    literals: List[Literal]
    learnt: bool = False
    lbd: Optional[int] = None
    activity: float = 0.0
    deleted: bool = False

    def __len__(self) -> int:
        return len(self.literals)

    def to_dimacs(self) -> List[int]:
        return [decode_literal(lit) for lit in self.literals]

    def __repr__(self) -> str:
        tag = f" learnt lbd={self.lbd}" if self.learnt else ""
        return f"<Clause {self.to_dimacs()}{tag}>"


def normalize_clause(dimacs_ints: Iterable[int]) -> Optional[List[Literal]]:
    """Deduplicate literals (first occurrence wins); None for a tautology."""
    seen = set()
    literals: List[Literal] = []
    for value in dimacs_ints:
        lit = encode_literal(value)
        if lit in seen:
            continue
        if lit ^ 1 in seen:
            return None
        seen.add(lit)
        literals.append(lit)
    return literals


@dataclass(slots=True)
class Formula:
    num_vars: int
    clauses: List[Clause] = field(default_factory=list)
    contains_empty: bool = False

    @classmethod
    def from_lists(
        cls, num_vars: int, clauses: Iterable[Sequence[int]]
    ) -> "Formula":
        """Build a normalized formula from DIMACS-style integer lists."""
        formula = cls(num_vars=num_vars)
        for raw in clauses:
            for value in raw:
                if abs(value) > num_vars:
                    raise ValueError(
                        f"Literal {value} exceeds the declared {num_vars} variables"
                    )
            literals = normalize_clause(raw)
            if literals is None:
                continue
            if not literals:
                formula.contains_empty = True
                continue
            formula.clauses.append(Clause(literals))
        return formula

    def to_lists(self) -> List[List[int]]:
        return [clause.to_dimacs() for clause in self.clauses]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Formula):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.contains_empty == other.contains_empty
            and [c.literals for c in self.clauses] == [c.literals for c in other.clauses]
        )


def _parse_header(tokens: List[str], line_number: int) -> tuple:
    if len(tokens) != 4 or tokens[1] != "cnf":
        raise DimacsParseError(line_number, f"malformed header {' '.join(tokens)!r}")
    try:
        num_vars, num_clauses = int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise DimacsParseError(
            line_number, f"malformed header {' '.join(tokens)!r}"
        ) from exc
    if num_vars < 0 or num_clauses < 0:
        raise DimacsParseError(line_number, "header counts must be non-negative")
    return num_vars, num_clauses


def parse_dimacs(text: Union[str, TextIO]) -> Formula:
    stream = io.StringIO(text) if isinstance(text, str) else text

    header = None
    formula: Optional[Formula] = None
    pending: List[int] = []
    pending_line = 0
    read_clauses = 0
    line_number = 0

    for line_number, raw_line in enumerate(stream, start=1):
        line = raw_line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        tokens = line.split()
        if tokens[0] == "p":
            if header is not None:
                raise DimacsParseError(line_number, "duplicate header")
            header = _parse_header(tokens, line_number)
            formula = Formula(num_vars=header[0])
            continue
        if formula is None:
            raise DimacsParseError(line_number, "clause data before 'p cnf' header")

        for token in tokens:
            try:
                value = int(token)
            except ValueError as exc:
                raise DimacsParseError(
                    line_number, f"non-integer token {token!r}"
                ) from exc
            if value == 0:
                read_clauses += 1
                literals = normalize_clause(pending)
                pending = []
                if literals is None:
                    continue
                if not literals:
                    formula.contains_empty = True
                else:
                    formula.clauses.append(Clause(literals))
                continue
            if abs(value) > formula.num_vars:
                raise DimacsParseError(
                    line_number,
                    f"literal {value} exceeds the declared {formula.num_vars} variables",
                )
            if not pending:
                pending_line = line_number
            pending.append(value)

    if formula is None:
        raise DimacsParseError(line_number, "missing 'p cnf' header")
    if pending:
        raise DimacsParseError(
            pending_line, "clause is missing its terminating 0 at end of file"
        )
    if read_clauses != header[1]:
        logger.warning(
            "DIMACS header declares %d clauses but %d were read",
            header[1],
            read_clauses,
        )
    return formula


def read_dimacs_file(path: Union[str, Path]) -> Formula:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_dimacs(handle)


def write_dimacs(formula: Formula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {comment}" for comment in comments]
    clause_count = len(formula.clauses) + (1 if formula.contains_empty else 0)
    lines.append(f"p cnf {formula.num_vars} {clause_count}")
    for clause in formula.clauses:
        lines.append(" ".join(str(value) for value in clause.to_dimacs()) + " 0")
    if formula.contains_empty:
        lines.append("0")
    return "\n".join(lines) + "\n"
