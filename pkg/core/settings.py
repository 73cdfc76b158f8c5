from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# No web surface is served; the key only satisfies Django's startup checks.
SECRET_KEY = os.getenv('SECRET_KEY', 'errstat-local-only')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'datasets',
    'estimators',
    'correlation',
    'sip',
    'inference',
    'simulation',
    'reports',
]

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': ['rest_framework.renderers.JSONRenderer'],
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
}

# --- DATABASE CONFIGURATION ---
# Everything errstat computes lives in memory; reports go to files.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# --- LOGGING ---
# Warnings (small N, extreme uncertainties, ...) go to standard error.
ERRSTAT_LOG_LEVEL = os.getenv('ERRSTAT_LOG_LEVEL', 'WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': ERRSTAT_LOG_LEVEL,
            'propagate': False,
        }
        for app in ('datasets', 'estimators', 'correlation', 'sip',
                    'inference', 'simulation', 'reports')
    },
}

# --- Custom App Settings ---
ERRSTAT_BOOTSTRAP_REPLICATES = int(os.getenv('ERRSTAT_BOOT', '1000'))
ERRSTAT_DEFAULT_SEED = int(os.getenv('ERRSTAT_SEED', '20200101'))
ERRSTAT_WORKERS = int(os.getenv('ERRSTAT_WORKERS', '1'))
ERRSTAT_QUANTILE_LEVEL = float(os.getenv('ERRSTAT_QUANTILE_LEVEL', '0.95'))
ERRSTAT_QUANTILE_METHOD = os.getenv('ERRSTAT_QUANTILE_METHOD', 'hd')
ERRSTAT_KAPPA = float(os.getenv('ERRSTAT_KAPPA', '1.96'))
ERRSTAT_EXTREME_UNCERTAINTY_RATIO = float(os.getenv('ERRSTAT_EXTREME_UNCERTAINTY_RATIO', '10'))
ERRSTAT_MIN_N_MUE = int(os.getenv('ERRSTAT_MIN_N_MUE', '30'))
ERRSTAT_MIN_N_QUANTILE = int(os.getenv('ERRSTAT_MIN_N_QUANTILE', '60'))
ERRSTAT_REPORT_SCHEMA_VERSION = '1.0'
