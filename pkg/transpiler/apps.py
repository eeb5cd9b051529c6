from django.apps import AppConfig


class TranspilerConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'transpiler'
