from django.apps import AppConfig


class ReconfigurationConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.reconfiguration'
