from django.apps import AppConfig


class CasestudyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.casestudy'
