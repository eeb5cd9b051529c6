from django.apps import AppConfig


class QasmConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'qasm'
