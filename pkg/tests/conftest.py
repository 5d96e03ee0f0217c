import pathlib

import pytest

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS_DIR = REPO_ROOT / "corpus"
FIXTURES_DIR = pathlib.Path(__file__).resolve().parent / "fixtures"
GOLDEN_DIR = pathlib.Path(__file__).resolve().parent / "golden"

CORPUS_FILES = sorted(CORPUS_DIR.glob("*.muit"))


@pytest.fixture(scope="session")
def corpus_sources() -> dict[str, str]:
    return {path.name: path.read_text() for path in CORPUS_FILES}


def corpus_path(name: str) -> pathlib.Path:
    return CORPUS_DIR / name


def fixture_path(name: str) -> pathlib.Path:
    return FIXTURES_DIR / name
