"""Process-level settings for endpoints, retries, and output locations."""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    api_key: str | None = None
    base_url: str = "https://openrouter.ai/api/v1"
    embedding_model: str = "text-embedding-3-small"
    request_timeout: float = 30.0
    max_retries: int = 3
    retry_backoff: float = 1.0
    audit_concurrency: int = 8
    runs_dir: str = "runs"
    log_level: str = "INFO"
    model_config = SettingsConfigDict(env_prefix="PIMMUR_", env_file=".env", extra="ignore")


def load_settings() -> Settings:
    return Settings()  # type: ignore[call-arg]
