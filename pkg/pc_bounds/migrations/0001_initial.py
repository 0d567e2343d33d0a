# Generated by Django 5.2.7 on 2026-10-17 10:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='AuditLog',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('log_type', models.CharField(choices=[('INFO', 'Information'), ('WARNING', 'Warning'), ('ERROR', 'Error'), ('EXPERIMENT', 'Experiment Run'), ('CONTAINMENT', 'Oracle Containment'), ('EXAMPLE', 'Worked Example Check'), ('TASK', 'Background Task')], max_length=20)),
                ('message', models.TextField()),
                ('details', models.JSONField(default=dict)),
                ('timestamp', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Audit Log',
                'verbose_name_plural': 'Audit Logs',
                'ordering': ['-timestamp'],
            },
        ),
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('max_level', models.PositiveSmallIntegerField(help_text='T, the top outcome level')),
                ('threshold', models.PositiveSmallIntegerField(help_text='t; the event of interest is Y > t')),
                ('seed', models.BigIntegerField()),
                ('n_samples', models.PositiveIntegerField()),
                ('target_pc', models.BooleanField(default=False)),
                ('mean_simple_gap', models.FloatField()),
                ('mean_mediator_gap', models.FloatField()),
                ('mean_abs_midpoint_error_simple', models.FloatField()),
                ('mean_abs_midpoint_error_mediator', models.FloatField()),
                ('reference_deviation_simple', models.FloatField(default=0.0)),
                ('reference_deviation_mediator', models.FloatField(default=0.0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='ExperimentSample',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('sample_index', models.PositiveIntegerField(help_text='Position after sorting by true PC')),
                ('sample_id', models.PositiveIntegerField(help_text='Generation index; fixes the per-sample seed')),
                ('true_pc', models.FloatField()),
                ('target', models.FloatField(blank=True, null=True)),
                ('simple_lower', models.FloatField()),
                ('simple_upper', models.FloatField()),
                ('mediator_lower', models.FloatField()),
                ('mediator_upper', models.FloatField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='samples', to='pc_bounds.experimentrun')),
            ],
            options={
                'ordering': ['run', 'sample_index'],
                'unique_together': {('run', 'sample_index')},
            },
        ),
    ]
