"""
Shared fixtures: tool registry, scripted oracles and the shipped data files.
"""

from pathlib import Path

import pytest

from lambdagent.services.evaluator import EvalContext
from lambdagent.services.oracles import ScriptedOracle
from lambdagent.services.tools import default_registry

DATA_DIR = Path(__file__).resolve().parent.parent / "lambdagent" / "data"
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def entangled_dir() -> Path:
    return FIXTURES_DIR / "entangled"


@pytest.fixture
def registry():
    return default_registry()


@pytest.fixture
def oracle():
    return ScriptedOracle(default="scripted reply")


@pytest.fixture
def ctx(oracle, registry):
    return EvalContext(oracle=oracle, tools=registry)



@pytest.fixture(scope="session")
def golden():
    def read(name: str) -> str:
        return (FIXTURES_DIR / "golden" / name).read_text(encoding="utf-8")

    return read
