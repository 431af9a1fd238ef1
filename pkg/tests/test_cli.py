"""
Test Suite for CLI Module

Tests command parsing, report output, exit codes and the example corpus
runner.
"""

import io
import json
import os
import unittest
from pathlib import Path
from unittest.mock import patch

from cli.commands import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, CLIHandler
from cli.corpus import CITATION_MARKERS, CorpusCheck, CorpusEntry, CorpusRunner, build_corpus
from core.errors import InvariantViolation
from tests.support import ConfigTestCase


NETWORKS = Path(__file__).resolve().parent.parent / "networks"


class CLITestCase(ConfigTestCase):
    """Runs CLIHandler against an in-memory stdout."""

    def run_cli(self, *args):
        out = io.StringIO()
        with patch("sys.stderr", new_callable=io.StringIO) as err:
            code = CLIHandler(stdout=out).handle([str(a) for a in args])
        self.stderr = err.getvalue()
        return code, out.getvalue()

    def run_json(self, *args):
        code, text = self.run_cli(*args)
        return code, json.loads(text) if text else None


class TestCommands(CLITestCase):
    """Test cases for the individual commands."""

    def test_qmc(self):
        code, payload = self.run_json("qmc", NETWORKS / "fig3.net")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload, {"qmc": 8})

    def test_qmc_show_cut(self):
        code, payload = self.run_json("qmc", NETWORKS / "fig3.net", "--show-cut")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["cut_edges"], [0, 1, 2])

    def test_qmc_csv(self):
        code, text = self.run_cli("qmc", NETWORKS / "fig3.net", "--format", "csv")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(text, "qmc\n8\n")

    def test_qmf(self):
        code, payload = self.run_json("qmf", NETWORKS / "fig3.net", "--trials", 10, "--seed", 42)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["best"], 7)
        self.assertEqual(payload["qmc"], 8)
        self.assertFalse(payload["equals_qmc"])
        self.assertEqual(len(payload["seeds"]), payload["trials"])

    def test_qmf2(self):
        code, payload = self.run_json("qmf2", NETWORKS / "fig5_L1.net", "--trials", 50)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["best"], 3)

    def test_ee_path_tensors(self):
        code, payload = self.run_json("ee", NETWORKS / "fig7_L3.net", "--path-tensors", 2)
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(payload["entropy_bits"], 3.0)

    def test_qsat(self):
        code, payload = self.run_json("qsat", NETWORKS / "chain_323.qsat")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["gqsat"], 1)
        self.assertEqual(payload["total_dim"], 18)

    def test_bound_with_loopfree(self):
        code, payload = self.run_json("bound", NETWORKS / "fig7_L3.net", "--loopfree")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["lower_bound"], 8)
        self.assertTrue(payload["loopfree"]["holds"])

    def test_claim(self):
        code, payload = self.run_json("claim", "--dims", 3, 2, 3, "--ranks", 1, 5, "--trials", 20)
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(payload["holds"])
        self.assertEqual(payload["gqsat"], 1)

    def test_claim_arity(self):
        code, _ = self.run_cli("claim", "--dims", 3, 2, "--ranks", 1)
        self.assertEqual(code, EXIT_USAGE)

    def test_family_member(self):
        code, payload = self.run_json("family", "--n", 2, "--j", 1, "--k", 1, "--trials", 20)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["rows"][0]["sampled"], 7)

    def test_family_out_of_range(self):
        code, _ = self.run_cli("family", "--n", 2, "--j", 2)
        self.assertEqual(code, EXIT_USAGE)

    def test_ghz(self):
        code, payload = self.run_json("ghz", "--seed", 3)
        self.assertEqual(code, EXIT_OK)
        self.assertLessEqual(payload["relative_error"], 1e-9)
        self.assertEqual(len(payload["eigenvalues"]), 2)

    def test_ghz_degenerate_tensor(self):
        code, _ = self.run_cli("ghz", "--tensor", 1, 0, 0, 0, 0, 0, 0, 1)
        self.assertEqual(code, EXIT_FAILURE)
        self.assertIn("ghz-degenerate", self.stderr)

    def test_rk3(self):
        code, payload = self.run_json("rk3", "--seeds", 20)
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(payload["passed"])

    def test_scale_csv(self):
        code, text = self.run_cli("scale", NETWORKS / "fig3.net", "--n-max", 1, "--trials", 5, "--format", "csv")
        self.assertEqual(code, EXIT_OK)
        lines = text.splitlines()
        self.assertEqual(lines[0], "n,qmc,qmf_sampled,gap")
        self.assertEqual(lines[1], "1,8,7,1")


class TestErrors(CLITestCase):
    """Test cases for exit codes on bad input."""

    def setUp(self):
        super().setUp()
        self.bad_file = os.path.join(self.test_dir, "bad.net")
        with open(self.bad_file, "w", encoding="utf-8") as f:
            f.write("v a 2\ne 2 S.1 a.1\n")

    def test_missing_file(self):
        code, text = self.run_cli("qmc", os.path.join(self.test_dir, "missing.net"))
        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(text, "")

    def test_invalid_network(self):
        code, _ = self.run_cli("qmc", self.bad_file)
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("unused", self.stderr)

    def test_unknown_flag(self):
        code, _ = self.run_cli("qmc", NETWORKS / "fig3.net", "--bogus")
        self.assertEqual(code, EXIT_USAGE)

    def test_no_command(self):
        code, _ = self.run_cli()
        self.assertEqual(code, EXIT_USAGE)

    def test_resource_limit(self):
        code, _ = self.run_cli("qmf", NETWORKS / "fig3.net", "--max-dim", 10)
        self.assertEqual(code, EXIT_FAILURE)

    def test_composite_prime(self):
        code, text = self.run_cli("qmf", NETWORKS / "fig3.net", "--prime", 15)
        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(text, "")
        self.assertIn("15", self.stderr)

    def test_ee_rejects_field_domain(self):
        code, _ = self.run_cli("ee", NETWORKS / "fig3.net", "--domain", "field")
        self.assertEqual(code, EXIT_USAGE)


class TestCorpus(CLITestCase):
    """Test cases for the corpus command and runner."""

    def test_filter_by_prefix(self):
        code, payload = self.run_json("corpus", "--filter", "fig5", "--trials", 50)
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(payload["passed"])
        self.assertEqual([(r["name"], r["metric"]) for r in payload["rows"]], [("fig5_L1", "qmf_v2")])

    def test_empty_selection_passes(self):
        code, payload = self.run_json("corpus", "--filter", "nothing-matches")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["rows"], [])
        self.assertEqual(payload["failures"], 0)

    def test_three_vertex_entries(self):
        code, payload = self.run_json("corpus", "--filter", "fig4_*", "--trials", 20)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len({r["name"] for r in payload["rows"]}), 3)

    def test_csv_rows(self):
        code, text = self.run_cli("corpus", "--filter", "fig5", "--trials", 50, "--format", "csv")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(text.splitlines()), 2)

    def test_every_entry_cites_a_source(self):
        for entry in build_corpus(trials=1):
            for check in entry.checks:
                with self.subTest(entry=entry.name, metric=check.metric):
                    self.assertTrue(any(marker in check.citation for marker in CITATION_MARKERS))

    def test_entry_names_are_unique(self):
        names = [entry.name for entry in build_corpus(trials=1)]
        self.assertEqual(len(names), len(set(names)))

    def test_failures_and_errors_become_rows(self):
        def broken():
            raise InvariantViolation("rank-at-most-qmc", "forced")

        entries = [
            CorpusEntry("b_mismatch", (CorpusCheck("value", 2, lambda: 3, "Example: forced"),)),
            CorpusEntry("a_error", (CorpusCheck("value", 1, broken, "Example: forced"),)),
            CorpusEntry("c_le", (CorpusCheck("value", 5, lambda: 4, "Example: forced", compare="le"),)),
        ]
        rows = CorpusRunner(entries, workers=2).run()
        self.assertEqual([r.name for r in rows], ["a_error", "b_mismatch", "c_le"])
        self.assertEqual([r.passed for r in rows], [False, False, True])
        self.assertIn("rank-at-most-qmc", rows[0].error)
        self.assertIsNone(rows[0].observed)


if __name__ == '__main__':
    unittest.main()
