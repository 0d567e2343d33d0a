import numpy as np
from django.test import SimpleTestCase

from pc_bounds.core import (
    BoundInterval,
    ConditionalTable,
    CounterfactualJoint,
    FormulaId,
    JointKind,
    OutcomeScale,
    Scenario,
    ScenarioKind,
    comonotone_coupling,
    compatibility_check,
    derive_outcome_given_exposure,
    product_coupling,
    simple_view,
    validate_scenario,
)
from pc_bounds.exceptions import (
    ArityMismatchError,
    NegativeProbabilityError,
    RowSumViolationError,
    TheoremViolationError,
    ThresholdOutOfRangeError,
    TotalMassViolationError,
)

EXAMPLE1_M = [[0.85, 0.15], [0.3, 0.7]]
EXAMPLE1_Y = [[0.8, 0.2], [0.05, 0.95]]


class OutcomeScaleTests(SimpleTestCase):
    def test_binary_scale(self):
        scale = OutcomeScale.binary()
        self.assertTrue(scale.is_binary)
        self.assertEqual(scale.n_levels, 2)
        self.assertEqual(scale.event_mask.tolist(), [False, True])

    def test_event_mask_selects_levels_above_threshold(self):
        self.assertEqual(OutcomeScale(3, 1).event_mask.tolist(), [False, False, True, True])

    def test_threshold_must_be_below_top_level(self):
        with self.assertRaises(ThresholdOutOfRangeError):
            OutcomeScale(2, 2).validate()
        with self.assertRaises(ThresholdOutOfRangeError):
            OutcomeScale(2, -1).validate()

    def test_top_level_must_be_positive_integer(self):
        with self.assertRaises(ArityMismatchError):
            OutcomeScale(0, 0).validate()
        with self.assertRaises(ArityMismatchError):
            OutcomeScale(1.5, 0).validate()


class ConditionalTableTests(SimpleTestCase):
    def test_entries_are_read_only(self):
        table = ConditionalTable('D', 'Y', [[0.5, 0.5], [0.2, 0.8]])
        with self.assertRaises(ValueError):
            table.entries[0, 0] = 1.0

    def test_event_masses(self):
        table = ConditionalTable('D', 'Y', [[0.7, 0.1, 0.2], [0.2, 0.1, 0.7]])
        scale = OutcomeScale(2, 0)
        self.assertAlmostEqual(table.event_mass(1, scale), 0.8)
        self.assertAlmostEqual(table.non_event_mass(0, scale), 0.7)

    def test_ragged_rows_are_an_arity_mismatch(self):
        with self.assertRaises(ArityMismatchError):
            ConditionalTable('D', 'Y', [[0.5, 0.5], [1.0]])


class ValidateScenarioTests(SimpleTestCase):
    def test_valid_mediator_scenario(self):
        scenario = validate_scenario(Scenario.mediator(OutcomeScale.binary(), EXAMPLE1_M, EXAMPLE1_Y))
        self.assertEqual(scenario.kind, ScenarioKind.MEDIATOR)
        self.assertEqual(scenario.m_given_d.to_list(), EXAMPLE1_M)

    def test_row_sum_violation_reports_row_and_deviation(self):
        raw = Scenario.simple(OutcomeScale.binary(), [[0.5, 0.5], [0.5, 0.6]])
        with self.assertRaises(RowSumViolationError) as cm:
            validate_scenario(raw)
        self.assertEqual(cm.exception.row, 1)
        self.assertAlmostEqual(cm.exception.deviation, 0.1)

    def test_rows_within_tolerance_are_renormalised(self):
        raw = Scenario.simple(OutcomeScale.binary(), [[0.5, 0.5 + 5e-10], [0.25, 0.75]])
        scenario = validate_scenario(raw)
        self.assertAlmostEqual(scenario.y_given_d.entries[0].sum(), 1.0, places=15)

    def test_negative_entry(self):
        raw = Scenario.simple(OutcomeScale.binary(), [[1.1, -0.1], [0.5, 0.5]])
        with self.assertRaises(NegativeProbabilityError):
            validate_scenario(raw)

    def test_table_width_must_match_scale(self):
        raw = Scenario.simple(OutcomeScale(2, 1), [[0.5, 0.5], [0.5, 0.5]])
        with self.assertRaises(ArityMismatchError):
            validate_scenario(raw)

    def test_mediator_must_be_binary(self):
        raw = Scenario.mediator(OutcomeScale.binary(), [[0.2, 0.3, 0.5], [0.1, 0.1, 0.8]], EXAMPLE1_Y)
        with self.assertRaises(ArityMismatchError):
            validate_scenario(raw)

    def test_threshold_out_of_range(self):
        raw = Scenario.simple(OutcomeScale(1, 1), [[0.5, 0.5], [0.5, 0.5]])
        with self.assertRaises(ThresholdOutOfRangeError):
            validate_scenario(raw)


class DeriveOutcomeTests(SimpleTestCase):
    def test_total_probability(self):
        derived = derive_outcome_given_exposure(
            ConditionalTable('D', 'M', EXAMPLE1_M), ConditionalTable('M', 'Y', EXAMPLE1_Y),
        )
        np.testing.assert_allclose(derived.entries, [[0.6875, 0.3125], [0.275, 0.725]], atol=1e-12)
        self.assertEqual((derived.row_variable, derived.col_variable), ('D', 'Y'))

    def test_simple_view_of_mediator_scenario(self):
        scenario = validate_scenario(Scenario.mediator(OutcomeScale.binary(), EXAMPLE1_M, EXAMPLE1_Y))
        view = simple_view(scenario)
        self.assertEqual(view.kind, ScenarioKind.SIMPLE)
        self.assertAlmostEqual(view.y_given_d.entries[1, 1], 0.725)


class CounterfactualJointTests(SimpleTestCase):
    margins = ConditionalTable('D', 'Y', [[0.7175, 0.0925, 0.19], [0.2775, 0.0525, 0.67]])

    def test_total_mass_must_be_one(self):
        with self.assertRaises(TotalMassViolationError):
            CounterfactualJoint(JointKind.OUTCOME_PAIRS, [[0.5, 0.2], [0.2, 0.2]])

    def test_must_be_square(self):
        with self.assertRaises(ArityMismatchError):
            CounterfactualJoint(JointKind.OUTCOME_PAIRS, [[0.5, 0.2, 0.1], [0.1, 0.05, 0.05]])

    def test_negative_cell(self):
        with self.assertRaises(NegativeProbabilityError):
            CounterfactualJoint(JointKind.OUTCOME_PAIRS, [[1.2, -0.2], [0.0, 0.0]])

    def test_couplings_reproduce_margins(self):
        for coupling in (product_coupling, comonotone_coupling):
            joint = coupling(self.margins, JointKind.OUTCOME_PAIRS)
            report = compatibility_check(joint, self.margins)
            self.assertTrue(report, report.violations)

    def test_compatibility_lists_each_violation(self):
        joint = CounterfactualJoint(JointKind.OUTCOME_PAIRS, np.eye(3) / 3)
        report = compatibility_check(joint, self.margins)
        self.assertFalse(report)
        self.assertEqual(len(report.violations), 6)

    def test_margins_table(self):
        joint = comonotone_coupling(self.margins, JointKind.OUTCOME_PAIRS)
        np.testing.assert_allclose(joint.margins_table('D', 'Y').entries, self.margins.entries, atol=1e-12)


class BoundIntervalTests(SimpleTestCase):
    def test_width_midpoint_contains(self):
        interval = BoundInterval(0.2, 0.6, FormulaId.BINARY_SIMPLE)
        self.assertAlmostEqual(interval.width, 0.4)
        self.assertAlmostEqual(interval.midpoint, 0.4)
        self.assertTrue(interval.contains(0.6 + 1e-10))
        self.assertFalse(interval.contains(0.61))

    def test_inverted_interval_is_a_theorem_violation(self):
        with self.assertRaises(TheoremViolationError):
            BoundInterval(0.7, 0.6, FormulaId.BINARY_SIMPLE)

    def test_upper_above_one_is_a_theorem_violation(self):
        with self.assertRaises(TheoremViolationError):
            BoundInterval(0.2, 1.01, FormulaId.ORDINAL_MEDIATOR)
