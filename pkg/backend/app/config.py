"""
Application configuration using Pydantic settings
"""

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings

DATA_DIR = Path(__file__).resolve().parent / "data"


class Settings(BaseSettings):
    """Application settings with environment variable support"""

    # Application
    app_name: str = "weylab"
    version: str = "1.0.0"
    environment: str = "development"
    debug: bool = False

    # Logging
    log_level: str = "INFO"
    log_format: str = "console"

    # Enumeration guardrail (character entries)
    cap: int = 5_000_000

    # Data
    fixtures_path: Optional[str] = None

    model_config = {
        "env_file": ".env",
        "env_prefix": "WEYLAB_",
        "case_sensitive": False,
    }

    @property
    def resolved_fixtures_path(self) -> Path:
        """Fixtures file, falling back to the bundled dataset"""
        if self.fixtures_path:
            return Path(self.fixtures_path)
        return DATA_DIR / "fixtures.json"

    @property
    def triples_path(self) -> Path:
        return DATA_DIR / "triples.json"

    @property
    def power_rows_path(self) -> Path:
        return DATA_DIR / "power_rows.json"

    @property
    def is_testing(self) -> bool:
        """Check if running tests"""
        return self.environment.lower() == "testing"


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


# Create a singleton instance
settings = get_settings()
