"""Celery tasks for running bound experiments in the background"""
import logging

from celery import chord, shared_task

from .core import OutcomeScale
from .exceptions import EmptyExperimentError
from .models import AuditLog, ExperimentRun
from .simulation import ExperimentRecord, ExperimentResult, generate_record, run_bounds_experiment, sort_records, summarize

logger = logging.getLogger(__name__)


@shared_task
def simulate_sample_task(index, seed, max_level, threshold, target_pc=False):
    """One experiment record as a JSON-safe dict"""
    scale = OutcomeScale(max_level=max_level, threshold=threshold)
    return generate_record(index, seed, scale, target_pc=target_pc).as_dict()


@shared_task
def persist_experiment_task(record_dicts, seed, max_level, threshold, target_pc=False):
    """Chord callback: aggregate the per-index records and store the run"""
    records = sort_records(ExperimentRecord.from_dict(data) for data in record_dicts)
    result = ExperimentResult(records=records, summary=summarize(records))
    scale = OutcomeScale(max_level=max_level, threshold=threshold)
    run = ExperimentRun.from_result(result, scale, seed, target_pc=target_pc)

    AuditLog.objects.create(
        log_type='TASK',
        message=f'Collected {len(records)} samples for run {run.pk}',
        details={'run_id': run.pk, 'seed': seed},
    )
    return run.pk


@shared_task
def run_experiment_task(n_samples, seed, max_level, threshold, target_pc=False):
    """Whole experiment in a single worker"""
    scale = OutcomeScale(max_level=max_level, threshold=threshold)
    result = run_bounds_experiment(n_samples, scale, seed, target_pc=target_pc)
    run = ExperimentRun.from_result(result, scale, seed, target_pc=target_pc)

    AuditLog.objects.create(
        log_type='TASK',
        message=f'Finished experiment run {run.pk}',
        details={'run_id': run.pk, 'seed': seed},
    )
    return run.pk


def dispatch_experiment(n_samples, seed, max_level, threshold, target_pc=False):
    """Fan one task per sample index out to the workers and store the run when all are back"""
    if n_samples < 1:
        raise EmptyExperimentError(f'n_samples must be at least 1, got {n_samples}')
    header = [
        simulate_sample_task.s(index, seed, max_level, threshold, target_pc)
        for index in range(n_samples)
    ]
    callback = persist_experiment_task.s(seed, max_level, threshold, target_pc)
    logger.info('dispatching %d sample tasks for seed %s', n_samples, seed)
    return chord(header)(callback)
