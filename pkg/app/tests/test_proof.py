import io
import random
import tempfile
from pathlib import Path
from unittest.mock import Mock

from django.conf import settings
from django.test import SimpleTestCase

from app.cnf import Formula, encode_literal
from app.generators import pigeonhole, random_formula
from app.oracle import check_rup_proof, parse_drat
from app.proof import ProofLog, ProofWriteError
from app.search import SolverConfig, SolveStatus, solve


class ProofLogTests(SimpleTestCase):
    def test_writes_additions_deletions_and_the_empty_clause(self):
        sink = io.StringIO()
        proof = ProofLog(sink)

        proof.log_add([encode_literal(1), encode_literal(-3)])
        proof.log_delete([encode_literal(-2), encode_literal(4)])
        proof.log_empty()

        self.assertEqual(sink.getvalue(), "1 -3 0\nd -2 4 0\n0\n")
        self.assertEqual(proof.additions, 2)
        self.assertEqual(proof.deletions, 1)

    def test_disabled_log_writes_nothing(self):
        proof = ProofLog.disabled()

        proof.log_add([encode_literal(1)])
        proof.log_empty()

        self.assertFalse(proof.enabled)
        self.assertEqual(proof.additions, 0)

    def test_enabled_log_needs_a_sink(self):
        with self.assertRaises(ValueError):
            ProofLog(None, enabled=True)

    def test_sink_failure_aborts_with_an_io_error(self):
        sink = Mock()
        sink.write.side_effect = OSError("disk full")
        proof = ProofLog(sink)

        with self.assertLogs("app.proof", level="ERROR"):
            with self.assertRaises(ProofWriteError):
                proof.log_add([encode_literal(1)])

        self.assertEqual(proof.additions, 0)

    def test_sink_failure_propagates_out_of_solve(self):
        sink = Mock()
        sink.write.side_effect = OSError("disk full")

        with self.assertLogs("app.proof", level="ERROR"):
            with self.assertRaises(OSError):
                solve(pigeonhole(3), SolverConfig(), ProofLog(sink))

    def test_open_owns_a_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "proof.drat"
            with ProofLog.open(path) as proof:
                proof.log_empty()

            self.assertEqual(path.read_text(encoding="utf-8"), "0\n")

    def test_open_reports_unwritable_paths(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(ProofWriteError):
                with ProofLog.open(Path(directory) / "missing" / "proof.drat"):
                    pass


class ProofAcceptanceTests(SimpleTestCase):
    def prove(self, formula, config):
        sink = io.StringIO()
        result = solve(formula, config, ProofLog(sink))
        return result, sink.getvalue()

    def test_unsat_units_give_the_empty_clause(self):
        result, text = self.prove(Formula.from_lists(1, [[1], [-1]]), SolverConfig())

        self.assertEqual(result.status, SolveStatus.UNSAT)
        self.assertEqual(text, "0\n")

    def test_pigeonhole_proofs_check(self):
        for holes in range(2, 6):
            for mode in ("bcp", "cfup", "hybrid"):
                with self.subTest(holes=holes, mode=mode):
                    formula = pigeonhole(holes)
                    result, text = self.prove(formula, SolverConfig(mode=mode, theta=50))
                    self.assertEqual(result.status, SolveStatus.UNSAT)
                    self.assertTrue(text.endswith("0\n"))
                    self.assertTrue(check_rup_proof(formula, parse_drat(text)))

    def test_proofs_with_deletions_check(self):
        formula = pigeonhole(5)
        config = SolverConfig(
            mode="hybrid",
            theta=200,
            core_lbd_threshold=2,
            reduce_first=100,
            reduce_increment=50,
        )

        result, text = self.prove(formula, config)

        self.assertEqual(result.status, SolveStatus.UNSAT)
        self.assertGreater(result.stats.reductions, 0)
        steps = parse_drat(text)
        self.assertTrue(any(step.deletion for step in steps))
        self.assertTrue(check_rup_proof(formula, steps))

    def test_random_unsat_proofs_check(self):
        rng = random.Random(99)
        checked = 0
        for _ in range(settings.FUZZ_ITERATIONS):
            formula = random_formula(rng, min_ratio=4.5, max_ratio=6.0)
            result, text = self.prove(formula, SolverConfig(mode="cfup"))
            if result.status is SolveStatus.UNSAT:
                checked += 1
                self.assertTrue(check_rup_proof(formula, parse_drat(text)))

        self.assertGreater(checked, 0)

    def test_sat_runs_never_log_the_empty_clause(self):
        formula = Formula.from_lists(3, [[1, 2], [-1, 3]])

        result, text = self.prove(formula, SolverConfig())

        self.assertEqual(result.status, SolveStatus.SAT)
        self.assertNotIn("\n0\n", "\n" + text)
