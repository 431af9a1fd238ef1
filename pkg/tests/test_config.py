"""
Test Suite for Configuration Module

Tests defaults, persistence and merging of user settings.
"""

import json
import shutil
import tempfile
import unittest
from pathlib import Path

from config import Config


class TestConfig(unittest.TestCase):
    """Test cases for Config."""

    def setUp(self):
        self.test_dir = Path(tempfile.mkdtemp())
        self.config = Config(config_dir=self.test_dir, data_dir=self.test_dir)

    def tearDown(self):
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_defaults_written_on_first_use(self):
        self.assertTrue(self.config.config_file.exists())
        self.assertEqual(self.config.get("sampling", "trials"), 20)
        self.assertEqual(self.config.get("sampling", "prime"), 2 ** 61 - 1)
        self.assertEqual(self.config.get("limits", "max_dim"), 2 ** 20)

    def test_missing_key_is_none(self):
        self.assertIsNone(self.config.get("sampling", "nope"))
        self.assertIsNone(self.config.get("nope", "trials"))

    def test_set_persists(self):
        self.config.set("sampling", "seed", value=7)
        reloaded = Config(config_dir=self.test_dir, data_dir=self.test_dir)
        self.assertEqual(reloaded.get("sampling", "seed"), 7)

    def test_user_file_merged_with_defaults(self):
        with open(self.config.config_file, "w", encoding="utf-8") as f:
            json.dump({"numeric": {"rtol": 1e-6}}, f)
        reloaded = Config(config_dir=self.test_dir, data_dir=self.test_dir)
        self.assertEqual(reloaded.get("numeric", "rtol"), 1e-6)
        self.assertEqual(reloaded.get("numeric", "eigen_cutoff"), 1e-14)
        self.assertEqual(reloaded.get("sampling", "trials_v2"), 50)

    def test_corrupt_file_falls_back_to_defaults(self):
        self.config.config_file.write_text("{not json", encoding="utf-8")
        reloaded = Config(config_dir=self.test_dir, data_dir=self.test_dir)
        self.assertEqual(reloaded.get("sampling", "trials"), 20)

    def test_reset_to_defaults(self):
        self.config.set("corpus", "workers", value=1)
        self.config.reset_to_defaults()
        self.assertEqual(self.config.get("corpus", "workers"), 4)

    def test_logs_path(self):
        path = self.config.get_logs_path()
        self.assertTrue(path.is_dir())
        self.assertEqual(path.parent, self.test_dir)


if __name__ == '__main__':
    unittest.main()
