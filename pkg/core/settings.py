import pathlib
from typing import Any

import decouple

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = pathlib.Path(__file__).resolve().parent.parent

SECRET_KEY: str = decouple.config('SECRET_KEY', default='reconfig-checker-local-key')

DEBUG: bool = decouple.config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS: list[str] = decouple.config('ALLOWED_HOSTS', default='', cast=decouple.Csv())

# Application definition
DJANGO_APPS: list[str] = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
]

PROJECT_APPS: list[str] = [
    'apps.workflows.apps.WorkflowsConfig',
    'apps.reconfiguration.apps.ReconfigurationConfig',
    'apps.verification.apps.VerificationConfig',
    'apps.casestudy.apps.CasestudyConfig',
    'apps.cli.apps.CliConfig',
]

THIRD_PARTY_APPS: list[str] = [
    'rest_framework',
]

INSTALLED_APPS: list[Any] = DJANGO_APPS + PROJECT_APPS + THIRD_PARTY_APPS

# Limite de estados explorados antes de abortar con un error de recursos
RECONFIG_MAX_STATES: int = decouple.config('RECONFIG_MAX_STATES', default=10_000_000, cast=int)

# Semilla usada por `reconfig simulate` cuando no se indica --seed
RECONFIG_DEFAULT_SEED: int = decouple.config('RECONFIG_DEFAULT_SEED', default=0, cast=int)

RECONFIG_LOG_LEVEL: str = decouple.config('RECONFIG_LOG_LEVEL', default='WARNING')

# Los logs van siempre a stderr: la salida de los comandos debe ser estable
LOGGING: dict[str, Any] = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': RECONFIG_LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Database
# No se persiste nada; la base existe solo porque Django la requiere.
DATABASES: dict[str, Any] = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': decouple.config('DB_NAME', default=str(BASE_DIR / 'db.sqlite3')),
    }
}

# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE: str = 'en-us'

TIME_ZONE: str = 'UTC'

USE_I18N: bool = True

USE_TZ: bool = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD: str = 'django.db.models.BigAutoField'
