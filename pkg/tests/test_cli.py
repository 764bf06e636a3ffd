"""
Tests for the command-line interface
"""

import sys
import os
import io
import json
import unittest
import tempfile
from contextlib import redirect_stderr, redirect_stdout

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.cli.commands import EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, run


class CliTestCase(unittest.TestCase):
    """Runs commands with captured output in a scratch directory"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def invoke(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = run(list(argv))
        return code, out.getvalue(), err.getvalue()


class TestEvaluate(CliTestCase):
    """Test the evaluate and builtin-export commands"""

    def test_evaluate_builtin(self):
        """sl2f5 reports its product and sum"""
        code, out, _ = self.invoke("evaluate", "--builtin", "sl2f5")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("0.3090169943", out)
        self.assertIn("argmin_product", out)

    def test_unknown_builtin(self):
        """Unknown builtin names are validation errors"""
        code, _, err = self.invoke("evaluate", "--builtin", "nope")
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("nope", err)

    def test_missing_input(self):
        """evaluate needs an input"""
        self.assertEqual(self.invoke("evaluate")[0], EXIT_VALIDATION)

    def test_export_then_evaluate(self):
        """An exported builtin evaluates to the same values"""
        target = self.path("three.json")
        self.assertEqual(self.invoke("builtin-export", "--builtin", "optimal3dim2", "--out", target)[0], EXIT_OK)
        code, out, _ = self.invoke("evaluate", "--in", target)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("0.866025403784", out)

    def test_export_to_stdout(self):
        """Without --out the document goes to stdout"""
        code, out, _ = self.invoke("builtin-export", "--builtin", "exact3dim2")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["L"], 3)

    def test_single_element_file(self):
        """A one-element constellation has no pairs to score"""
        target = self.path("one.json")
        with open(target, "w", encoding="utf-8") as f:
            json.dump({"format": "special", "T": 2, "M": 1, "L": 1, "elements": [[[[1.0, 0.0]]]]}, f)
        self.assertEqual(self.invoke("evaluate", "--in", target)[0], EXIT_VALIDATION)

    def test_malformed_file(self):
        """Malformed files exit with the validation status"""
        target = self.path("bad.json")
        with open(target, "w", encoding="utf-8") as f:
            f.write("{not json")
        self.assertEqual(self.invoke("evaluate", "--in", target)[0], EXIT_VALIDATION)


class TestUsage(CliTestCase):
    """Test argument handling"""

    def test_unknown_command(self):
        """Unknown subcommands are usage errors"""
        self.assertEqual(self.invoke("frobnicate")[0], EXIT_USAGE)

    def test_help(self):
        """--help exits cleanly"""
        code, out, _ = self.invoke("--help")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("optimize-sa", out)

    def test_bad_choice(self):
        """Invalid option values are usage errors"""
        self.assertEqual(self.invoke("optimize-sa", "--objective", "median")[0], EXIT_USAGE)


class TestOptimize(CliTestCase):
    """Test the optimizer commands and the run archive"""

    def test_sa_with_config_and_record(self):
        """A JSON configuration drives the run and the archive lists it"""
        config, db, out_file = self.path("sa.json"), self.path("runs.db"), self.path("best.json")
        with open(config, "w", encoding="utf-8") as f:
            json.dump({"max_iterations": 100}, f)
        code, out, err = self.invoke("optimize-sa", "--structure", "akbl", "--p", "1", "--q", "1",
                                     "--seed", "1", "--config", config, "--record", "--db", db,
                                     "--out", out_file)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("best_value", out)
        self.assertIn("recorded as run 1", err)
        self.assertTrue(os.path.exists(out_file))

        code, out, _ = self.invoke("runs", "--db", db)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("sa", out)
        self.assertIn("akbl", out)

    def test_chernoff_needs_snr(self):
        """Diversity-function objectives need --snr-db"""
        code, _, err = self.invoke("optimize-sa", "--structure", "akbl", "--p", "1", "--q", "1",
                                   "--objective", "chernoff", "--seed", "1")
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("snr-db", err)

    def test_refine_rejects_restarts(self):
        """Refinement runs one chain"""
        code = self.invoke("optimize-sa", "--builtin", "exact3dim2", "--restarts", "2", "--seed", "1")[0]
        self.assertEqual(code, EXIT_VALIDATION)

    def test_drawn_seed_is_printed(self):
        """Omitted seeds are drawn and reported"""
        code, _, err = self.invoke("simulate", "--builtin", "exact3dim2", "--snr-db", "0", "--trials", "50")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("🎲 seed", err)

    def test_empty_archive(self):
        """An empty archive prints no rows"""
        code, out, _ = self.invoke("runs", "--db", self.path("empty.db"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("(no rows)", out)


class TestAnalysisCommands(CliTestCase):
    """Test simulate, curve, bounds and reproduce"""

    def test_simulate_csv(self):
        """Simulation rows are written as CSV"""
        target = self.path("bler.csv")
        code = self.invoke("simulate", "--builtin", "exact3dim2", "--snr-db", "0:10:5", "--trials", "200",
                           "--seed", "2", "--out", target)[0]
        self.assertEqual(code, EXIT_OK)
        with open(target, encoding="utf-8") as f:
            lines = f.read().strip().splitlines()
        self.assertEqual(lines[0], "rho_db,trials,errors,bler,wilson_lo,wilson_hi")
        self.assertEqual(len(lines), 4)

    def test_curve(self):
        """Diversity function curve has one row per SNR"""
        code, out, _ = self.invoke("curve", "--builtin", "exact3dim2", "--snr-db", "0:10:5")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(out.strip().splitlines()), 4)

    def test_bounds_f(self):
        """F(2) is reported"""
        code, out, _ = self.invoke("bounds", "--part", "F", "--n", "2", "--steps", "10", "--seed", "3")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("F_estimate", out)

    def test_reproduce_unknown_table(self):
        """Unknown tables are validation errors"""
        self.assertEqual(self.invoke("reproduce", "99", "--seed", "1")[0], EXIT_VALIDATION)

    def test_reproduce_list(self):
        """Cells can be listed without running them"""
        code, out, _ = self.invoke("reproduce", "2", "--list")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("published", out)

    def test_reproduce_builtin_cell(self):
        """Builtin cells are evaluated directly"""
        code, out, _ = self.invoke("reproduce", "builtins", "--cells", "2", "--seed", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("sl2f5 product", out)
        self.assertIn("0.309016994375", out)

    def test_reproduce_numderived_product(self):
        """numderived121 is compared on the product scale"""
        code, out, _ = self.invoke("reproduce", "builtins", "--cells", "4", "--seed", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("numderived121 product", out)
        self.assertIn("0.0834", out)
        self.assertNotIn("0.0278", out)

    def test_reproduce_bad_cell(self):
        """Cell indices out of range are validation errors"""
        self.assertEqual(self.invoke("reproduce", "builtins", "--cells", "99", "--seed", "1")[0],
                         EXIT_VALIDATION)


if __name__ == '__main__':
    unittest.main()
