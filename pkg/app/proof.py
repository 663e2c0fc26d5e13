import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Sequence, TextIO, Union

from app.cnf import Literal, decode_literal


logger = logging.getLogger(__name__)


class ProofWriteError(OSError):
    pass


class ProofLog:
    """Plain-text DRAT writer for learnt-clause additions and deletions."""

    def __init__(self, sink: Optional[TextIO] = None, enabled: Optional[bool] = None):
        self.sink = sink
        self.enabled = (sink is not None) if enabled is None else enabled
        if self.enabled and sink is None:
            raise ValueError("An enabled proof log needs a sink")
        self.additions = 0
        self.deletions = 0

    @classmethod
    def disabled(cls) -> "ProofLog":
        return cls(sink=None, enabled=False)

    @classmethod
    @contextmanager
    def open(cls, path: Union[str, Path]) -> Iterator["ProofLog"]:
        try:
            handle = open(path, "w", encoding="utf-8")
        except OSError as exc:
            raise ProofWriteError(f"Cannot open proof file {path}: {exc}") from exc
        with handle:
            yield cls(handle)

    def log_add(self, literals: Sequence[Literal]) -> None:
        if not self.enabled:
            return
        self._write(_format_clause(literals))
        self.additions += 1

    def log_delete(self, literals: Sequence[Literal]) -> None:
        if not self.enabled:
            return
        self._write("d " + _format_clause(literals))
        self.deletions += 1

    def log_empty(self) -> None:
        self.log_add(())

    def _write(self, line: str) -> None:
        try:
            self.sink.write(line + "\n")
        except OSError as exc:
            logger.error("Proof sink write failed: %s", exc)
            raise ProofWriteError(f"Proof write failed: {exc}") from exc


def _format_clause(literals: Sequence[Literal]) -> str:
    if not literals:
        return "0"
    return " ".join(str(decode_literal(lit)) for lit in literals) + " 0"
