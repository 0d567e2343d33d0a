"""Stored experiment runs and the audit trail"""
from django.db import models


class ExperimentRun(models.Model):
    """One simulation run: its configuration and summary statistics"""
    max_level = models.PositiveSmallIntegerField(help_text='T, the top outcome level')
    threshold = models.PositiveSmallIntegerField(help_text='t; the event of interest is Y > t')
    seed = models.BigIntegerField()
    n_samples = models.PositiveIntegerField()
    target_pc = models.BooleanField(default=False)

    mean_simple_gap = models.FloatField()
    mean_mediator_gap = models.FloatField()
    mean_abs_midpoint_error_simple = models.FloatField()
    mean_abs_midpoint_error_mediator = models.FloatField()
    reference_deviation_simple = models.FloatField(default=0.0)
    reference_deviation_mediator = models.FloatField(default=0.0)

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"T={self.max_level} t={self.threshold} seed={self.seed} ({self.n_samples} samples)"

    @property
    def gap_reduction(self):
        return self.mean_simple_gap - self.mean_mediator_gap

    @classmethod
    def from_result(cls, result, scale, seed, target_pc=False):
        """Persist a run with one ExperimentSample per record, in true-PC order"""
        summary = result.summary
        run = cls.objects.create(
            max_level=scale.max_level,
            threshold=scale.threshold,
            seed=seed,
            n_samples=summary.n_samples,
            target_pc=target_pc,
            mean_simple_gap=summary.mean_simple_gap,
            mean_mediator_gap=summary.mean_mediator_gap,
            mean_abs_midpoint_error_simple=summary.mean_abs_midpoint_error_simple,
            mean_abs_midpoint_error_mediator=summary.mean_abs_midpoint_error_mediator,
            reference_deviation_simple=summary.reference_deviation_simple,
            reference_deviation_mediator=summary.reference_deviation_mediator,
        )
        ExperimentSample.objects.bulk_create([
            ExperimentSample(
                run=run,
                sample_index=position,
                sample_id=record.sample_id,
                true_pc=record.true_pc,
                target=record.target,
                simple_lower=record.simple_bounds.lower,
                simple_upper=record.simple_bounds.upper,
                mediator_lower=record.mediator_bounds.lower,
                mediator_upper=record.mediator_bounds.upper,
            )
            for position, record in enumerate(result.records)
        ])
        AuditLog.objects.create(
            log_type='EXPERIMENT',
            message=f'Stored experiment run {run}',
            details={'run_id': run.pk, **summary.as_dict()},
        )
        return run


class ExperimentSample(models.Model):
    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='samples')
    sample_index = models.PositiveIntegerField(help_text='Position after sorting by true PC')
    sample_id = models.PositiveIntegerField(help_text='Generation index; fixes the per-sample seed')
    true_pc = models.FloatField()
    target = models.FloatField(null=True, blank=True)
    simple_lower = models.FloatField()
    simple_upper = models.FloatField()
    mediator_lower = models.FloatField()
    mediator_upper = models.FloatField()

    class Meta:
        ordering = ['run', 'sample_index']
        unique_together = ['run', 'sample_index']

    def __str__(self):
        return f"{self.run_id}#{self.sample_index}: PC={self.true_pc:.4f}"

    @property
    def simple_midpoint(self):
        return (self.simple_lower + self.simple_upper) / 2

    @property
    def mediator_midpoint(self):
        return (self.mediator_lower + self.mediator_upper) / 2

    @property
    def simple_gap(self):
        return self.simple_upper - self.simple_lower

    @property
    def mediator_gap(self):
        return self.mediator_upper - self.mediator_lower


class AuditLog(models.Model):
    """Events worth keeping: stored runs, finished tasks, failed checks"""
    LOG_TYPES = [
        ('INFO', 'Information'),
        ('WARNING', 'Warning'),
        ('ERROR', 'Error'),
        ('EXPERIMENT', 'Experiment Run'),
        ('CONTAINMENT', 'Oracle Containment'),
        ('EXAMPLE', 'Worked Example Check'),
        ('TASK', 'Background Task'),
    ]

    log_type = models.CharField(max_length=20, choices=LOG_TYPES)
    message = models.TextField()
    details = models.JSONField(default=dict)
    timestamp = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-timestamp']
        verbose_name = 'Audit Log'
        verbose_name_plural = 'Audit Logs'

    def __str__(self):
        return f"{self.log_type} - {self.message[:50]}..."
