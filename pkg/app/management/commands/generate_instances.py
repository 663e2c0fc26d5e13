import random

from django.core.management.base import BaseCommand, CommandError

from app.generators import write_instance_directory


class Command(BaseCommand):
    help = "Write a mix of pigeonhole and random 3-SAT instances."

    def add_arguments(self, parser):
        parser.add_argument("directory")
        parser.add_argument("--count", type=int, default=100)
        parser.add_argument("--vars", type=int, default=50)
        parser.add_argument("--ratio", type=float, default=4.26)
        parser.add_argument("--max-holes", type=int, default=6)
        parser.add_argument("--seed", type=int, default=0)

    def handle(self, *args, **options):
        if options["count"] < 1 or options["vars"] < 3:
            raise CommandError("--count must be positive and --vars at least 3")
        try:
            written = write_instance_directory(
                options["directory"],
                options["count"],
                random.Random(options["seed"]),
                num_vars=options["vars"],
                ratio=options["ratio"],
                max_holes=options["max_holes"],
            )
        except OSError as exc:
            raise CommandError(str(exc), returncode=1) from exc
        self.stdout.write(f"Wrote {len(written)} instances to {options['directory']}")
