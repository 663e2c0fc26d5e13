import csv
import io
import json
import tempfile
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from app.cli import format_model_lines, run_bench, run_solve
from app.cnf import write_dimacs
from app.generators import pigeonhole
from app.oracle import check_rup_proof, parse_drat


FIXTURES = Path(__file__).resolve().parent / "fixtures"


class CliTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.directory = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = self.directory / name
        path.write_text(text, encoding="utf-8")
        return str(path)


class FormatModelLinesTests(SimpleTestCase):
    def test_short_model(self):
        self.assertEqual(format_model_lines([1]), ["v 1 0"])

    def test_empty_model(self):
        self.assertEqual(format_model_lines([]), ["v 0"])

    def test_long_models_wrap_every_ten_values(self):
        lines = format_model_lines(list(range(1, 13)))

        self.assertEqual(lines, ["v 1 2 3 4 5 6 7 8 9 10", "v 11 12 0"])


class RunSolveTests(CliTestCase):
    def test_unsat_exit_code(self):
        stdout = io.StringIO()

        code = run_solve(self.write("unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n"), stdout)

        self.assertEqual(code, 20)
        self.assertEqual(stdout.getvalue(), "s UNSATISFIABLE\n")

    def test_sat_exit_code_and_model(self):
        stdout = io.StringIO()

        code = run_solve(self.write("sat.cnf", "p cnf 1 1\n1 0\n"), stdout)

        self.assertEqual(code, 10)
        self.assertEqual(stdout.getvalue(), "s SATISFIABLE\nv 1 0\n")

    def test_unknown_exit_code(self):
        stdout = io.StringIO()
        path = self.write("php.cnf", write_dimacs(pigeonhole(4)))

        code = run_solve(path, stdout, max_conflicts=1)

        self.assertEqual(code, 0)
        self.assertEqual(stdout.getvalue(), "s UNKNOWN\n")

    def test_stats_lines(self):
        stdout = io.StringIO()
        path = self.write("php.cnf", write_dimacs(pigeonhole(3)))

        run_solve(path, stdout, mode="cfup", show_stats=True)

        lines = stdout.getvalue().splitlines()
        names = [line.split()[1] for line in lines if line.startswith("c ")]
        for name in ("conflicts", "decisions", "propagations", "restarts", "core-learnt", "wall-time"):
            self.assertIn(name, names)
        self.assertEqual(lines[-1], "s UNSATISFIABLE")

    def test_proof_file_checks(self):
        formula = pigeonhole(3)
        path = self.write("php.cnf", write_dimacs(formula))
        proof_path = self.directory / "php.drat"

        code = run_solve(path, io.StringIO(), proof_path=str(proof_path))

        self.assertEqual(code, 20)
        proof = parse_drat(proof_path.read_text(encoding="utf-8"))
        self.assertTrue(check_rup_proof(formula, proof))

    def test_run_is_logged_as_json(self):
        with self.assertLogs("app.cli", level="INFO") as captured:
            run_solve(self.write("sat.cnf", "p cnf 1 1\n1 0\n"), io.StringIO(), theta=10)

        payload = json.loads(captured.records[0].getMessage())
        self.assertEqual(payload["event"], "solve.run")
        self.assertEqual(payload["status"], "SAT")
        self.assertEqual(payload["theta"], 10)
        self.assertIn("duration_ms", payload)

    @override_settings(SOLVER_THETA=2_000_000)
    def test_default_theta(self):
        with self.assertLogs("app.cli", level="INFO") as captured:
            run_solve(self.write("sat.cnf", "p cnf 1 1\n1 0\n"), io.StringIO())

        self.assertEqual(json.loads(captured.records[0].getMessage())["theta"], 2_000_000)


class SolveCommandTests(CliTestCase):
    def test_exit_code_matches_status_line(self):
        stdout = io.StringIO()
        path = self.write("unsat.cnf", "p cnf 2 3\n1 2 0\n-1 0\n-2 0\n")

        with self.assertRaises(SystemExit) as ctx:
            call_command("solve", path, "--mode", "bcp", stdout=stdout)

        self.assertEqual(ctx.exception.code, 20)
        self.assertEqual(stdout.getvalue(), "s UNSATISFIABLE\n")

    def test_unknown_returns_normally(self):
        stdout = io.StringIO()
        path = self.write("php.cnf", write_dimacs(pigeonhole(4)))

        call_command("solve", path, "--max-conflicts", "1", stdout=stdout)

        self.assertEqual(stdout.getvalue(), "s UNKNOWN\n")

    def test_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("solve", str(self.directory / "missing.cnf"))

        self.assertEqual(ctx.exception.returncode, 1)

    def test_parse_error(self):
        path = self.write("bad.cnf", "p cnf 1 1\n2 0\n")

        with self.assertRaisesMessage(CommandError, "line 2"):
            call_command("solve", path)

    def test_invalid_option(self):
        path = self.write("sat.cnf", "p cnf 1 1\n1 0\n")

        with self.assertRaises(CommandError):
            call_command("solve", path, "--core-lbd", "0")


class RunBenchTests(CliTestCase):
    def setUp(self):
        super().setUp()
        self.instances = self.directory / "instances"
        self.instances.mkdir()
        (self.instances / "php3.cnf").write_text(write_dimacs(pigeonhole(3)), encoding="utf-8")
        (self.instances / "sat.cnf").write_text("p cnf 2 1\n1 2 0\n", encoding="utf-8")

    def test_writes_results_summary_and_scatter(self):
        out = self.directory / "results.csv"
        scatter = self.directory / "scatter.csv"
        summary = self.directory / "summary.txt"
        stdout = io.StringIO()

        code = run_bench(
            str(self.instances),
            str(out),
            stdout,
            timeout=30.0,
            configs="base,theta=1e6,theta=2e6,theta=3e6",
            scatter=str(scatter),
            summary=str(summary),
        )

        self.assertEqual(code, 0)
        with open(out, newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual(len(rows), 8)
        self.assertEqual({row["status"] for row in rows}, {"SAT", "UNSAT"})

        table = stdout.getvalue()
        self.assertEqual(summary.read_text(encoding="utf-8"), table)
        golden = (FIXTURES / "bench_summary.txt").read_text(encoding="utf-8")
        self.assertEqual(
            [line[:14] for line in table.splitlines()],
            [line[:14] for line in golden.splitlines()],
        )
        self.assertEqual(table.splitlines()[0], golden.splitlines()[0])
        self.assertIn("ALL   Solved             2           2           2           2", table)

        with open(scatter, newline="", encoding="utf-8") as handle:
            points = list(csv.DictReader(handle))
        self.assertEqual([point["instance"] for point in points], ["php3.cnf", "sat.cnf"])

        for suffix, expected in (("_sat", ["sat.cnf"]), ("_unsat", ["php3.cnf"])):
            with open(self.directory / f"scatter{suffix}.csv", newline="", encoding="utf-8") as handle:
                rows = list(csv.DictReader(handle))
            self.assertEqual([row["instance"] for row in rows], expected)
            self.assertEqual(list(rows[0]), ["instance", "base_seconds", "config_seconds"])

    def test_scatter_needs_base(self):
        with self.assertRaises(ValueError):
            run_bench(
                str(self.instances),
                str(self.directory / "out.csv"),
                io.StringIO(),
                configs="theta=1e6,theta=2e6",
                scatter=str(self.directory / "scatter.csv"),
            )

    @override_settings(BENCH_CONFIGS=["base", "cfup"], BENCH_TIMEOUT_SECONDS=30.0)
    def test_command_uses_settings_defaults(self):
        out = self.directory / "results.csv"
        stdout = io.StringIO()

        call_command("bench", "--dir", str(self.instances), "--out", str(out), stdout=stdout)

        with open(out, newline="", encoding="utf-8") as handle:
            configs = {row["config"] for row in csv.DictReader(handle)}
        self.assertEqual(configs, {"base", "cfup"})
        self.assertIn("UNSAT Solved", stdout.getvalue())

    def test_unreadable_directory_exits_with_one(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "bench",
                "--dir",
                str(self.directory / "missing"),
                "--out",
                str(self.directory / "out.csv"),
            )

        self.assertEqual(ctx.exception.returncode, 1)

    def test_bad_config_label(self):
        with self.assertRaises(CommandError):
            call_command(
                "bench",
                "--dir",
                str(self.instances),
                "--out",
                str(self.directory / "out.csv"),
                "--configs",
                "base,warp",
            )


class GenerateInstancesCommandTests(CliTestCase):
    def test_writes_the_requested_count(self):
        stdout = io.StringIO()
        target = self.directory / "generated"

        call_command("generate_instances", str(target), "--count", "20", "--vars", "20", stdout=stdout)

        files = sorted(path.name for path in target.iterdir())
        self.assertEqual(len(files), 20)
        self.assertIn("php_03_02.cnf", files)
        self.assertIn("php_04_03.cnf", files)
        self.assertIn("Wrote 20 instances", stdout.getvalue())

    def test_rejects_a_zero_count(self):
        with self.assertRaises(CommandError):
            call_command("generate_instances", str(self.directory), "--count", "0")
