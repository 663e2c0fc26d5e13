from django.core.management.base import BaseCommand, CommandError

from app.cli import run_bench


class Command(BaseCommand):
    help = "Run every instance of a directory under each configuration."

    def add_arguments(self, parser):
        parser.add_argument("--dir", required=True, help="directory of .cnf files")
        parser.add_argument("--out", required=True, help="per-run results CSV")
        parser.add_argument("--timeout", type=float, default=None)
        parser.add_argument(
            "--configs",
            default=None,
            help='comma separated, e.g. "base,theta=1e6,theta=2e6,theta=3e6"',
        )
        parser.add_argument("--scatter", default=None, help="scatter CSV output")
        parser.add_argument("--scatter-config", default=None)
        parser.add_argument("--summary", default=None, help="summary table output")
        parser.add_argument("--jobs", type=int, default=None)
        parser.add_argument("--seed", type=int, default=None)

    def handle(self, *args, **options):
        try:
            run_bench(
                options["dir"],
                options["out"],
                self.stdout,
                timeout=options["timeout"],
                configs=options["configs"],
                scatter=options["scatter"],
                scatter_config=options["scatter_config"],
                summary=options["summary"],
                jobs=options["jobs"],
                seed=options["seed"],
            )
        except (OSError, ValueError) as exc:
            raise CommandError(str(exc), returncode=1) from exc
