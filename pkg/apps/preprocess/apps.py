from django.apps import AppConfig


class PreprocessConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.preprocess'
