from django.apps import AppConfig


class CultureConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "culture"
    verbose_name = "Actions, fitness and agents"
