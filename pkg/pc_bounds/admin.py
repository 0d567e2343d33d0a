"""Admin configuration for stored experiment runs"""
from django.contrib import admin

from .models import AuditLog, ExperimentRun, ExperimentSample


class ExperimentSampleInline(admin.TabularInline):
    model = ExperimentSample
    extra = 0
    can_delete = False
    fields = ['sample_index', 'sample_id', 'true_pc', 'target', 'simple_lower', 'simple_upper',
              'mediator_lower', 'mediator_upper']
    readonly_fields = fields


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = [
        'id', 'max_level', 'threshold', 'seed', 'n_samples', 'target_pc',
        'mean_simple_gap', 'mean_mediator_gap', 'gap_reduction_display', 'created_at'
    ]
    list_filter = ['max_level', 'threshold', 'target_pc', 'created_at']
    readonly_fields = ['created_at']
    date_hierarchy = 'created_at'
    inlines = [ExperimentSampleInline]

    fieldsets = (
        ('Configuration', {
            'fields': ('max_level', 'threshold', 'seed', 'n_samples', 'target_pc')
        }),
        ('Summary', {
            'fields': (
                'mean_simple_gap', 'mean_mediator_gap',
                'mean_abs_midpoint_error_simple', 'mean_abs_midpoint_error_mediator',
            )
        }),
        ('Reference comparison', {
            'fields': ('reference_deviation_simple', 'reference_deviation_mediator'),
            'classes': ('collapse',)
        }),
        ('Timestamps', {
            'fields': ('created_at',),
            'classes': ('collapse',)
        }),
    )

    def gap_reduction_display(self, obj):
        return f"{obj.gap_reduction:.4f}"
    gap_reduction_display.short_description = 'Gap Reduction'


@admin.register(ExperimentSample)
class ExperimentSampleAdmin(admin.ModelAdmin):
    list_display = ['run', 'sample_index', 'sample_id', 'true_pc', 'mediator_lower', 'mediator_upper']
    list_filter = ['run']
    ordering = ['run', 'sample_index']


@admin.register(AuditLog)
class AuditLogAdmin(admin.ModelAdmin):
    list_display = ['timestamp', 'log_type', 'message_short']
    list_filter = ['log_type', 'timestamp']
    search_fields = ['message']
    readonly_fields = ['timestamp']
    date_hierarchy = 'timestamp'

    def message_short(self, obj):
        return obj.message[:80] + '...' if len(obj.message) > 80 else obj.message
    message_short.short_description = 'Message'
