"""End-to-end checks of the relsim command-line tool.

Usage: test_cli.py <path to relsim binary>
"""

import filecmp
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

BINARY = None

SMALL = [
    "--n_patients", "1200",
    "--n_diag_clinicians", "40",
    "--n_followup_clinicians", "15",
    "--metric_ks", "10,50,100",
    "--epochs", "100",
]


def relsim(*args):
    return subprocess.run([BINARY, *map(str, args)], capture_output=True, text=True)


class CliTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory(prefix="relsim_cli_")
        self.work = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def run_ok(self, *args):
        res = relsim(*args)
        self.assertEqual(res.returncode, 0, res.stderr)
        return res

    def test_help_and_usage_errors(self):
        self.assertEqual(relsim("--help").returncode, 0)
        self.assertEqual(relsim().returncode, 1)
        self.assertEqual(relsim("bogus").returncode, 1)
        res = relsim("synth", "--workdir", self.work, "--k", "zero")
        self.assertEqual(res.returncode, 1)
        self.assertIn("k", res.stderr)
        self.assertEqual(relsim("synth", "--workdir", self.work, "--n_intervals", "1").returncode, 1)
        self.assertEqual(relsim("synth", "--config", self.work / "missing.cfg").returncode, 1)

    def test_missing_input_is_a_data_error(self):
        res = relsim("graphs", "--workdir", self.work)
        self.assertEqual(res.returncode, 2)
        self.assertIn("graphs:", res.stderr)

    def test_malformed_event_log_names_the_line(self):
        events = self.work / "events.csv"
        events.write_text(
            "patient_id,clinician_id,date,event_type,role,code\n"
            "p1,c1,2018-01-02,DIAGNOSIS,DIAG,C91\n"
            "p1,c1,2018-13-01,SERVICE,DIAG,X\n"
        )
        res = relsim("graphs", "--workdir", self.work)
        self.assertEqual(res.returncode, 2)
        self.assertIn("line 3", res.stderr)

    def test_solver_failure_is_a_numerical_error(self):
        self.run_ok("synth", "--workdir", self.work, *SMALL)
        self.run_ok("graphs", "--workdir", self.work, *SMALL)
        res = relsim("extract", "--workdir", self.work, "--solver_tol", "1e-300",
                     "--solver_max_restarts", "1", "--solver_krylov_dim", "12")
        self.assertEqual(res.returncode, 3, res.stderr)

    def test_print_config_and_config_file(self):
        cfg = self.work / "run.cfg"
        cfg.write_text("# small run\nk = 4\nseed=9\n")
        res = self.run_ok("synth", "--config", cfg, "--seed", "11", "--print-config",
                          "--workdir", self.work, *SMALL)
        self.assertIn("k=4\n", res.stdout)
        self.assertIn("seed=11\n", res.stdout)
        self.assertIn("signal_strength=0.3\n", res.stdout)

    def test_pipeline_stages_and_determinism(self):
        common = ["--workdir", self.work, "--k", "5", "--graphs", "diag,followup", *SMALL]
        for stage in ("synth", "graphs", "extract"):
            self.run_ok(stage, *common)
        features = self.work / "features.csv"
        header = features.read_text().splitlines()[0].split(",")
        self.assertEqual(header[0], "patient_id")
        self.assertEqual(len(header) - 1, 10)

        saved = self.work / "features_first.csv"
        features.rename(saved)
        self.run_ok("extract", *common)
        self.assertTrue(filecmp.cmp(saved, features, shallow=False))

        for stage in ("train", "evaluate", "compare"):
            res = self.run_ok(stage, *common)
        self.assertIn("LR-Proposed", res.stdout)
        self.assertIn("Improvement", res.stdout)
        for name in ("vocab.csv", "model_baseline.csv", "model_proposed.csv", "report_baseline.csv",
                     "report_proposed.csv", "comparison.csv", "comparison.txt"):
            self.assertTrue((self.work / name).exists(), name)

    def test_all_reruns_byte_identical(self):
        a = self.work / "a"
        b = self.work / "b"
        self.run_ok("all", "--workdir", a, *SMALL)
        self.run_ok("all", "--workdir", b, *SMALL)
        for path in sorted(a.iterdir()):
            self.assertTrue(filecmp.cmp(path, b / path.name, shallow=False), path.name)

    def test_single_graph_gives_k_columns(self):
        self.run_ok("synth", "--workdir", self.work, *SMALL)
        self.run_ok("graphs", "--workdir", self.work, "--graphs", "followup", *SMALL)
        self.run_ok("extract", "--workdir", self.work, "--graphs", "followup", "--k", "3", *SMALL)
        header = (self.work / "features.csv").read_text().splitlines()[0].split(",")
        self.assertEqual(len(header) - 1, 3)


if __name__ == "__main__":
    BINARY = sys.argv.pop(1)
    unittest.main()
