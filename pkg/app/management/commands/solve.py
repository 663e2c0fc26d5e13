import sys

from django.core.management.base import BaseCommand, CommandError

from app.cli import run_solve
from app.search import PropagationMode


class Command(BaseCommand):
    help = "Solve a DIMACS CNF file; exits 10 (SAT), 20 (UNSAT) or 0 (UNKNOWN)."

    def add_arguments(self, parser):
        parser.add_argument("file", help="DIMACS CNF file")
        parser.add_argument(
            "--mode", choices=[mode.value for mode in PropagationMode], default=None
        )
        parser.add_argument("--theta", type=int, default=None)
        parser.add_argument("--core-lbd", type=int, default=None)
        parser.add_argument("--proof", default=None, help="write a DRAT proof here")
        parser.add_argument("--max-conflicts", type=int, default=None)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--stats", action="store_true")

    def handle(self, *args, **options):
        try:
            exit_code = run_solve(
                options["file"],
                self.stdout,
                mode=options["mode"],
                theta=options["theta"],
                core_lbd=options["core_lbd"],
                proof_path=options["proof"],
                max_conflicts=options["max_conflicts"],
                seed=options["seed"],
                show_stats=options["stats"],
            )
        except (OSError, ValueError) as exc:
            raise CommandError(str(exc), returncode=1) from exc

        if exit_code:
            sys.exit(exit_code)
