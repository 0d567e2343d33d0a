"""Causation tool URL configuration: only the admin, for browsing stored experiment runs"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]

admin.site.site_header = "Causation Tool Admin"
admin.site.site_title = "Causation Tool Admin Portal"
admin.site.index_title = "Stored experiment runs and audit log"
