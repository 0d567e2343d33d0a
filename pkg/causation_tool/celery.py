"""Celery configuration for fanning experiment samples out to workers"""
import os

from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'causation_tool.settings')

app = Celery('causation_tool')

# Worker settings come from the CELERY_* names in Django settings.
app.config_from_object('django.conf:settings', namespace='CELERY')

app.autodiscover_tasks()
