"""
Django settings for the cfup-sat project.

The project uses Django for configuration, logging and its management
command runner only: there are no models, views or URLs.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env(
    # set casting, default value
    DEBUG=(bool, False)
)

# Take environment variables from .env file
environ.Env.read_env(os.path.join(BASE_DIR, ".env"))

# Nothing is signed; the key only satisfies Django's startup checks.
SECRET_KEY = env.str("SECRET_KEY", default="cfup-sat-local")

DEBUG = env("DEBUG")

ALLOWED_HOSTS = env.list("ALLOWED_HOSTS", default=[])


# Application definition

INSTALLED_APPS = [
    "app",
]

DATABASES = {}

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Solver configuration

SOLVER_MODE = env.str("SOLVER_MODE", default="hybrid")
SOLVER_THETA = env.int("SOLVER_THETA", default=2_000_000)
SOLVER_CORE_LBD_THRESHOLD = env.int("SOLVER_CORE_LBD_THRESHOLD", default=7)
SOLVER_RESTART_BASE = env.int("SOLVER_RESTART_BASE", default=64)
SOLVER_REDUCE_FIRST = env.int("SOLVER_REDUCE_FIRST", default=2000)
SOLVER_REDUCE_INCREMENT = env.int("SOLVER_REDUCE_INCREMENT", default=300)
SOLVER_VAR_DECAY = env.float("SOLVER_VAR_DECAY", default=0.95)
SOLVER_CLAUSE_DECAY = env.float("SOLVER_CLAUSE_DECAY", default=0.999)
SOLVER_RANDOM_VAR_FREQ = env.float("SOLVER_RANDOM_VAR_FREQ", default=0.0)
SOLVER_SEED = env.int("SOLVER_SEED", default=0)
SOLVER_CHECK_INVARIANTS = env.bool("SOLVER_CHECK_INVARIANTS", default=False)
SOLVER_LOG_LEVEL = env.str("SOLVER_LOG_LEVEL", default="WARNING")


# Benchmark harness

BENCH_TIMEOUT_SECONDS = env.float("BENCH_TIMEOUT_SECONDS", default=60.0)
BENCH_CONFIGS = env.list(
    "BENCH_CONFIGS", default=["base", "theta=1e6", "theta=2e6", "theta=3e6"]
)
BENCH_SCATTER_CONFIG = env.str("BENCH_SCATTER_CONFIG", default="theta=2e6")
BENCH_JOBS = env.int("BENCH_JOBS", default=1)


# Test oracle

ORACLE_MAX_VARS = env.int("ORACLE_MAX_VARS", default=25)
FUZZ_ITERATIONS = env.int("FUZZ_ITERATIONS", default=200)


LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "standard": {
            "format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
        },
        "json": {
            "format": "%(message)s"
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "standard",
        },
        "json_console": {
            "class": "logging.StreamHandler",
            "formatter": "json",
        },
    },
    "loggers": {
        "": {
            "handlers": ["console"],
            "level": "INFO",
        },
        "app.search": {
            "handlers": ["console"],
            "level": SOLVER_LOG_LEVEL,
            "propagate": False,
        },
        "app.cli": {
            "handlers": ["json_console"],
            "level": "INFO",
            "propagate": False,
        },
        "app.bench": {
            "handlers": ["json_console"],
            "level": "INFO",
            "propagate": False,
        },
    },
}
