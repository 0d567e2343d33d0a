"""App configuration for the PC bounds app"""
from django.apps import AppConfig


class PcBoundsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'pc_bounds'
    verbose_name = 'Probability of Causation Bounds'
