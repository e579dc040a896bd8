from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = os.getenv("SECRET_KEY", "fairprep-insecure-local-key")

DEBUG = os.getenv("DEBUG", "false").lower() == "true"

VERSION = os.getenv("VERSION", "1.0.0")
ENVIRONMENT = os.getenv("DJANGO_ENV", "development").lower()

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'rest_framework',
    'apps.datasets',
    'apps.preprocess',
    'apps.sampling',
    'apps.learners',
    'apps.metrics',
    'apps.experiments',
]

LANGUAGE_CODE = 'en-us'
USE_I18N = False
USE_TZ = True
TIME_ZONE = "UTC"

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Experiments never touch the database; sqlite only satisfies Django's checks.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

# Dataset files (adult.data, adult.test, german.data) live here.
FAIRPREP_DATA_DIR = os.getenv("FAIRPREP_DATA_DIR", os.path.join(BASE_DIR, "data"))
FAIRPREP_OUTPUT_DIR = os.getenv("FAIRPREP_OUTPUT_DIR", os.path.join(BASE_DIR, "results"))
FAIRPREP_JOBS = int(os.getenv("FAIRPREP_JOBS", "1"))
FAIRPREP_DEFAULT_SEEDS = os.getenv("FAIRPREP_DEFAULT_SEEDS", "1-30")
FAIRPREP_GERMAN_SPLIT_SEED = int(os.getenv("FAIRPREP_GERMAN_SPLIT_SEED", "2019"))
FAIRPREP_POOL_THRESHOLD = int(os.getenv("FAIRPREP_POOL_THRESHOLD", "50"))
