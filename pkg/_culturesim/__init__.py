import shutil
import tempfile
from pathlib import Path

import numpy as np
from django.test import Client, TestCase

from culture.actions import Action
from culture.fitness import FitnessSpec
from simulation.engine import SimConfig
from simulation.world import WorldSpec

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"


class BaseTestCase(TestCase):
    def setUp(self) -> None:
        super().setUp()
        self.client = Client()

    def make_temp_dir(self):
        path = Path(tempfile.mkdtemp(prefix="culturesim-"))
        self.addCleanup(shutil.rmtree, path, ignore_errors=True)
        return path

    def fixture_path(self, name):
        return FIXTURES_DIR / name

    def read_fixture(self, name):
        return self.fixture_path(name).read_text(encoding="utf-8")

    def make_rng(self, seed=0):
        return np.random.default_rng(seed)

    def make_action(self, *postures):
        """Action from six postures given as 'L', 'S', 'R' or -1, 0, 1."""
        symbols = {"L": -1, "S": 0, "R": 1}
        return Action.of(*(symbols.get(p, p) for p in postures))

    def make_config(self, rows=4, cols=4, iterations=10, seed=1, **changes):
        return SimConfig(
            world=changes.pop("world", WorldSpec(rows=rows, cols=cols)),
            fitness=changes.pop("fitness", FitnessSpec()),
            iterations=iterations,
            seed=seed,
            **changes,
        )
