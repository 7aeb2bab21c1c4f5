from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Numerical defaults
DEFAULT_SEED = 42
DEFAULT_RESAMPLES = 2000
BCA_RESAMPLES = 50000
CLUSTER_RESAMPLES = 5000
MIN_RESAMPLES = 100
MAX_COMPONENTS = 20
TIE_TOLERANCE = 1e-12
DEFAULT_GAP_THRESHOLDS = (0.05, 0.10)
DEFAULT_CAUCHY_SCALE = 0.707
DEFAULT_CONFIDENCE = 0.95
WILCOXON_EXACT_MAX_N = 25

# Report formatting
REPORT_SCHEMA_VERSION = 1
VALUE_DECIMALS = 3
P_DECIMALS = 4


class Settings(BaseSettings):
    # Default worker count for bootstrap fan-out
    LATTICE_THREADS: int = 1

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")


settings = Settings()
