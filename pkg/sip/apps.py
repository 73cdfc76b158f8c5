from django.apps import AppConfig


class SipConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'sip'
