import json
from unittest import mock

from django.test import TestCase

from pc_bounds.core import OutcomeScale
from pc_bounds.exceptions import EmptyExperimentError
from pc_bounds.models import AuditLog, ExperimentRun, ExperimentSample
from pc_bounds.simulation import generate_record, run_bounds_experiment
from pc_bounds.tasks import (
    dispatch_experiment,
    persist_experiment_task,
    run_experiment_task,
    simulate_sample_task,
)


class SimulateSampleTaskTests(TestCase):
    def test_returns_a_json_safe_record(self):
        data = simulate_sample_task(3, 42, 2, 1)
        self.assertEqual(json.loads(json.dumps(data)), data)
        self.assertEqual(data, generate_record(3, 42, OutcomeScale(2, 1)).as_dict())


class PersistExperimentTaskTests(TestCase):
    def test_collected_records_match_an_in_process_run(self):
        # workers may finish in any order
        records = [simulate_sample_task(index, 7, 2, 1) for index in reversed(range(6))]
        run_id = persist_experiment_task(records, 7, 2, 1)

        stored = ExperimentRun.objects.get(pk=run_id)
        expected = run_bounds_experiment(6, OutcomeScale(2, 1), seed=7)
        self.assertAlmostEqual(stored.mean_mediator_gap, expected.summary.mean_mediator_gap, places=12)
        self.assertEqual(
            list(stored.samples.values_list('sample_id', flat=True)),
            [record.sample_id for record in expected.records],
        )
        self.assertTrue(AuditLog.objects.filter(log_type='TASK').exists())


class RunExperimentTaskTests(TestCase):
    def test_stores_every_sample(self):
        run_id = run_experiment_task(4, 11, 1, 0)
        self.assertEqual(ExperimentSample.objects.filter(run_id=run_id).count(), 4)
        sample = ExperimentSample.objects.filter(run_id=run_id).first()
        self.assertLessEqual(sample.mediator_gap, sample.simple_gap + 1e-12)
        self.assertLessEqual(sample.mediator_lower, sample.true_pc + 1e-9)


class DispatchExperimentTests(TestCase):
    def test_one_task_per_sample_index(self):
        with mock.patch('pc_bounds.tasks.chord') as chord:
            dispatch_experiment(5, 3, 2, 1)
        header = chord.call_args.args[0]
        self.assertEqual(len(header), 5)
        self.assertEqual([signature.args for signature in header][4], (4, 3, 2, 1, False))
        chord.return_value.assert_called_once()

    def test_no_samples(self):
        with self.assertRaises(EmptyExperimentError):
            dispatch_experiment(0, 3, 2, 1)
