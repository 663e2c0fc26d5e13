import random
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from app.cnf import read_dimacs_file
from app.generators import pigeonhole, random_formula, random_k_sat, write_instance_directory
from app.oracle import brute_force_solve


class PigeonholeTests(SimpleTestCase):
    def test_sizes(self):
        formula = pigeonhole(3)

        # 4 at-least-one clauses plus 3 holes * C(4, 2) conflicts
        self.assertEqual(formula.num_vars, 12)
        self.assertEqual(len(formula.clauses), 4 + 3 * 6)
        self.assertEqual(formula.to_lists()[0], [1, 2, 3])

    def test_unsatisfiable(self):
        for holes in (1, 2, 3):
            with self.subTest(holes=holes):
                self.assertFalse(brute_force_solve(pigeonhole(holes)).satisfiable)


class RandomFormulaTests(SimpleTestCase):
    def test_random_k_sat_shape(self):
        formula = random_k_sat(50, 213, 3, random.Random(0))

        self.assertEqual(formula.num_vars, 50)
        self.assertEqual(len(formula.clauses), 213)
        self.assertTrue(all(len(clause) == 3 for clause in formula.clauses))

    def test_same_seed_same_formula(self):
        self.assertEqual(
            random_k_sat(20, 80, 3, random.Random(4)), random_k_sat(20, 80, 3, random.Random(4))
        )

    def test_random_formula_bounds(self):
        rng = random.Random(8)
        for _ in range(50):
            formula = random_formula(rng)
            self.assertTrue(5 <= formula.num_vars <= 12)
            self.assertTrue(all(1 <= len(clause) <= 3 for clause in formula.clauses))


class InstanceDirectoryTests(SimpleTestCase):
    def test_writes_readable_instances(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertLogs("app.generators", level="INFO"):
                written = write_instance_directory(
                    Path(directory) / "mix", 12, random.Random(2), num_vars=10
                )

            self.assertEqual(len(written), 12)
            self.assertEqual(written[0].name, "php_03_02.cnf")
            formula = read_dimacs_file(written[-1])
            self.assertEqual(formula.num_vars, 10)
            self.assertEqual(len(formula.clauses), 43)
