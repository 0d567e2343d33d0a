from django.test import SimpleTestCase

from pc_bounds.exceptions import ArityMismatchError
from pc_bounds.worked_examples import EXAMPLES, PERTURBABLE_TABLES, check_example, perturb


def every_perturbation(example, delta=0.02):
    scenario = example.scenario()
    for table in PERTURBABLE_TABLES:
        rows, cols = getattr(scenario, table).entries.shape
        for row in range(rows):
            for col in range(cols):
                for step in (delta, -delta):
                    yield table, row, col, step


class CheckExampleTests(SimpleTestCase):
    def test_published_tables_pass(self):
        for example in EXAMPLES.values():
            _, _, checks = check_example(example)
            self.assertEqual(len(checks), 4)
            for check in checks:
                self.assertTrue(check.rounding_ok, (example.example_id, check))
                self.assertTrue(check.reference_ok, (example.example_id, check))

    def test_every_perturbed_entry_fails(self):
        for example in EXAMPLES.values():
            scenario = example.scenario()
            for table, row, col, delta in every_perturbation(example):
                _, _, checks = check_example(example, perturb(scenario, table, row, col, delta))
                self.assertFalse(all(check.ok for check in checks), (example.example_id, table, row, col, delta))

    def test_reference_catches_shifts_below_display_precision(self):
        example = EXAMPLES[2]
        shifted = perturb(example.scenario(), 'y_given_m', 1, 1, 0.02)
        _, _, checks = check_example(example, shifted)
        by_label = {check.label: check for check in checks}
        self.assertTrue(by_label['mediator lower'].rounding_ok)
        self.assertFalse(by_label['mediator lower'].reference_ok)
        self.assertAlmostEqual(by_label['mediator lower'].computed, 0.464 / 0.651, delta=1e-12)

    def test_tolerance_can_be_widened(self):
        example = EXAMPLES[2]
        shifted = perturb(example.scenario(), 'y_given_m', 1, 1, 0.02)
        _, _, checks = check_example(example, shifted, tol=0.01)
        self.assertTrue(all(check.ok for check in checks))


class PerturbTests(SimpleTestCase):
    def test_rows_stay_stochastic(self):
        scenario = EXAMPLES[2].scenario()
        shifted = perturb(scenario, 'y_given_m', 0, 2, -0.02)
        self.assertAlmostEqual(shifted.y_given_m.entries[0, 2], 0.08)
        self.assertAlmostEqual(shifted.y_given_m.entries[0, 0], 0.82)
        self.assertAlmostEqual(shifted.y_given_m.entries[0].sum(), 1.0)

    def test_unknown_table_or_entry(self):
        scenario = EXAMPLES[1].scenario()
        with self.assertRaises(ArityMismatchError):
            perturb(scenario, 'y_given_d', 0, 0, 0.02)
        with self.assertRaises(ArityMismatchError):
            perturb(scenario, 'm_given_d', 2, 0, 0.02)
