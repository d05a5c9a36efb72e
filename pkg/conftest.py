import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.catalog import load_catalog  # noqa: E402
from core.corollaries import Evaluator  # noqa: E402


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def evaluator(catalog):
    return Evaluator(catalog)
