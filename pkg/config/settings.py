#########################################################################################
# Runtime settings, read from STNC_* environment variables and an optional .env file.
#########################################################################################
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="STNC_", env_file=".env", extra="ignore")

    log_level: str = "INFO"
    workers: int = Field(default=1, ge=1)
    block_size: int = Field(default=65536, ge=1)
    default_seed: int = Field(default=20140701, ge=0)
    results_dir: str = "results/"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
