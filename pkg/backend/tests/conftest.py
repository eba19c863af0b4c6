"""
Pytest configuration and fixtures for weylab tests
"""

from pathlib import Path

import pytest

from app.config import get_settings
from app.logging_config import configure_logging
from app.services.rootcore import build_root_system, parse_type
from app.services.verify import load_fixtures

DATA_DIR = Path(__file__).resolve().parent / "data"

configure_logging("WARNING", "console")


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Fresh settings for every test, with no ambient WEYLAB_ overrides."""
    monkeypatch.delenv("WEYLAB_CAP", raising=False)
    monkeypatch.delenv("WEYLAB_FIXTURES_PATH", raising=False)
    monkeypatch.setenv("WEYLAB_ENVIRONMENT", "testing")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rs():
    """Root system factory by type string."""

    def _build(text: str):
        return build_root_system(parse_type(text))

    return _build


@pytest.fixture(scope="session")
def fixtures():
    """The bundled fixtures dataset."""
    return load_fixtures()


@pytest.fixture
def read_tsv():
    """Rows of a TSV file under tests/data as dicts."""

    def _read(name: str):
        lines = (DATA_DIR / name).read_text(encoding="utf-8").strip().splitlines()
        header = lines[0].split("\t")
        return [dict(zip(header, line.split("\t"))) for line in lines[1:]]

    return _read
