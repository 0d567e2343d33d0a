"""WSGI config for causation_tool project."""
import os
from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'causation_tool.settings')

application = get_wsgi_application()
