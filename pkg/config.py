"""
Configuration file for the semwave toolkit.
Provider settings and numeric defaults live here; every value can be
overridden through an environment variable (or a local .env file).
"""
import os

from dotenv import load_dotenv

load_dotenv()

# Embedding provider configuration
# The credential itself is never stored here, only the name of the variable holding it
PROVIDER_ENDPOINT = os.environ.get("SEMWAVE_PROVIDER_ENDPOINT", "http://127.0.0.1:8080/v1/embeddings")
PROVIDER_BACKEND = os.environ.get("SEMWAVE_PROVIDER_BACKEND", "http")  # http | gemini
MODEL_NAME = os.environ.get("SEMWAVE_MODEL_NAME", "text-embedding-3-small")
CREDENTIAL_ENV = os.environ.get("SEMWAVE_CREDENTIAL_ENV", "SEMWAVE_API_KEY")
CACHE_DIR = os.environ.get("SEMWAVE_CACHE_DIR", os.path.join(".", ".semwave_cache"))
MAX_IN_FLIGHT = int(os.environ.get("SEMWAVE_MAX_IN_FLIGHT", "4"))
BATCH_SIZE = int(os.environ.get("SEMWAVE_BATCH_SIZE", "16"))
REQUEST_TIMEOUT = float(os.environ.get("SEMWAVE_REQUEST_TIMEOUT", "30.0"))  # seconds
MAX_RETRIES = int(os.environ.get("SEMWAVE_MAX_RETRIES", "4"))
BACKOFF_BASE = float(os.environ.get("SEMWAVE_BACKOFF_BASE", "0.5"))  # seconds

# Complexification and interference defaults
ALPHA = 1.0  # wavevector scale, k = alpha * v
BETA = 1.0  # phase scale, phi = beta * theta
TAU = 1.0  # softmax temperature

# Wave dynamics defaults (hbar = m = 1)
GRID_POINTS = 512
TIME_STEP = 1e-3
MAX_2D_POINTS = 256  # per axis
RECORD_EVERY = 100

# Guards
COULOMB_MAX_CELLS = 16384
SCAN_MAX_CANDIDATES = 500_000

# Output settings
OUTPUT_DIR = os.environ.get("SEMWAVE_OUTPUT_DIR", "./runs")
LOG_LEVEL = os.environ.get("SEMWAVE_LOG_LEVEL", "INFO")
