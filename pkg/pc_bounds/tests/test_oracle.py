import numpy as np
from django.test import SimpleTestCase

from pc_bounds.bounds import bounds_mediator, bounds_simple
from pc_bounds.core import (
    ConditionalTable,
    CounterfactualJoint,
    FormulaId,
    JointKind,
    OutcomeScale,
    comonotone_coupling,
    compatibility_check,
    outcome_given_exposure,
    product_coupling,
)
from pc_bounds.exceptions import ArityMismatchError, UndefinedPCError
from pc_bounds.oracle import (
    EnvelopeMethod,
    MediatorPolytope,
    containment_report,
    envelope_mediator,
    envelope_simple,
    induced_outcome_joint,
    sample_compatible_pcs,
    sample_couplings,
    true_pc_mediator,
    true_pc_simple,
)
from pc_bounds.tests.test_bounds import example1, example2, random_mediator_scenario


class TruePcTests(SimpleTestCase):
    def test_identity_coupling_has_zero_pc(self):
        joint = CounterfactualJoint(JointKind.OUTCOME_PAIRS, [[0.4, 0.0], [0.0, 0.6]])
        self.assertEqual(true_pc_simple(joint, OutcomeScale.binary()), 0.0)

    def test_pc_of_product_coupling(self):
        margins = ConditionalTable('D', 'Y', [[0.6, 0.4], [0.3, 0.7]])
        joint = product_coupling(margins, JointKind.OUTCOME_PAIRS)
        self.assertAlmostEqual(true_pc_simple(joint, OutcomeScale.binary()), 0.6)

    def test_undefined_when_no_exposed_event(self):
        joint = CounterfactualJoint(JointKind.OUTCOME_PAIRS, [[1.0, 0.0], [0.0, 0.0]])
        with self.assertRaises(UndefinedPCError):
            true_pc_simple(joint, OutcomeScale.binary())

    def test_joint_kind_is_checked(self):
        joint = CounterfactualJoint(JointKind.STAR_PAIRS, [[0.4, 0.0], [0.0, 0.6]])
        with self.assertRaises(ArityMismatchError):
            true_pc_simple(joint, OutcomeScale.binary())

    def test_mediated_pc_matches_the_three_level_expression(self):
        rng = np.random.default_rng(11)
        scale = OutcomeScale(2, 1)
        for _ in range(50):
            m = rng.dirichlet(np.ones(4)).reshape(2, 2)
            y = rng.dirichlet(np.ones(9)).reshape(3, 3)
            numerator = (y[0, 2] + y[1, 2]) * m[0, 1] + (y[2, 0] + y[2, 1]) * m[1, 0]
            denominator = y[:, 2].sum() * m[:, 1].sum() + y[2, :].sum() * m[:, 0].sum()
            pc = true_pc_mediator(
                CounterfactualJoint(JointKind.MEDIATOR_PAIRS, m), CounterfactualJoint(JointKind.STAR_PAIRS, y), scale,
            )
            self.assertAlmostEqual(pc, numerator / denominator, delta=1e-12)


class CrossConsistencyPropertyTests(SimpleTestCase):
    def test_mediated_pc_equals_pc_of_induced_outcome_joint(self):
        rng = np.random.default_rng(2024)
        checked = above_zero = 0
        while checked < 1000:
            max_level = 1 + checked % 3
            scale = OutcomeScale(max_level, int(rng.integers(0, max_level)))
            n = scale.n_levels
            m_joint = CounterfactualJoint(JointKind.MEDIATOR_PAIRS, rng.dirichlet(np.ones(4)).reshape(2, 2))
            star_joint = CounterfactualJoint(JointKind.STAR_PAIRS, rng.dirichlet(np.ones(n * n)).reshape(n, n))
            induced = induced_outcome_joint(m_joint, star_joint)
            if induced.col_margin[scale.event_mask].sum() < 0.05:
                continue
            self.assertAlmostEqual(
                true_pc_mediator(m_joint, star_joint, scale), true_pc_simple(induced, scale), delta=1e-9,
            )
            checked += 1
            above_zero += scale.threshold > 0
        self.assertGreater(above_zero, 200)


class SampleCouplingsTests(SimpleTestCase):
    def test_samples_reproduce_both_margins(self):
        rng = np.random.default_rng(5)
        row = np.array([0.7175, 0.0925, 0.19])
        col = np.array([0.2775, 0.0525, 0.67])
        cells = sample_couplings(row, col, 500, rng)
        self.assertEqual(cells.shape, (500, 3, 3))
        self.assertGreaterEqual(cells.min(), 0.0)
        np.testing.assert_allclose(cells.sum(axis=2), np.tile(row, (500, 1)), atol=1e-9)
        np.testing.assert_allclose(cells.sum(axis=1), np.tile(col, (500, 1)), atol=1e-9)

    def test_sampled_pcs_lie_inside_the_bounds(self):
        scenario = example2()
        interval = bounds_mediator(scenario)
        pcs = sample_compatible_pcs(scenario, n_samples=2000, seed=3)
        self.assertGreaterEqual(pcs.min(), interval.lower - 1e-9)
        self.assertLessEqual(pcs.max(), interval.upper + 1e-9)


class SimpleEnvelopeTests(SimpleTestCase):
    def test_envelope_equals_closed_form_bounds(self):
        scenario = example2()
        y_given_d = outcome_given_exposure(scenario)
        envelope = envelope_simple(y_given_d, scenario.scale, samples=1000)
        interval = bounds_simple(y_given_d, scenario.scale)
        self.assertEqual(envelope.method, EnvelopeMethod.FRECHET_EXACT)
        self.assertAlmostEqual(envelope.min_pc, interval.lower, delta=1e-9)
        self.assertAlmostEqual(envelope.max_pc, interval.upper, delta=1e-9)
        self.assertTrue(envelope.covers_samples())

    def test_witnesses_are_compatible_and_attain_the_ends(self):
        scenario = example1()
        y_given_d = outcome_given_exposure(scenario)
        envelope = envelope_simple(y_given_d, scenario.scale, samples=0)
        (at_min,), (at_max,) = envelope.attained_at
        self.assertTrue(compatibility_check(at_min, y_given_d))
        self.assertTrue(compatibility_check(at_max, y_given_d))
        self.assertAlmostEqual(true_pc_simple(at_min, scenario.scale), envelope.min_pc, delta=1e-12)
        self.assertAlmostEqual(true_pc_simple(at_max, scenario.scale), envelope.max_pc, delta=1e-12)

    def test_frechet_sharpness_on_random_tables(self):
        rng = np.random.default_rng(99)
        for i in range(200):
            scale = OutcomeScale(1 + i % 3, 0)
            rows = rng.dirichlet(np.ones(scale.n_levels), size=2)
            y_given_d = ConditionalTable('D', 'Y', rows)
            if y_given_d.event_mass(1, scale) < 0.05:
                continue
            envelope = envelope_simple(y_given_d, scale, samples=100, seed=i)
            interval = bounds_simple(y_given_d, scale)
            report = containment_report(envelope, interval)
            self.assertTrue(report.ok)
            self.assertAlmostEqual(report.lower_slack, 0.0, delta=1e-9)
            self.assertAlmostEqual(report.upper_slack, 0.0, delta=1e-9)


class MediatorEnvelopeTests(SimpleTestCase):
    def test_example2_containment(self):
        scenario = example2()
        envelope = envelope_mediator(scenario, resolution=0.01, samples=2000)
        interval = bounds_mediator(scenario)
        report = containment_report(envelope, interval)
        self.assertTrue(report.ok, report)
        self.assertEqual(envelope.method, EnvelopeMethod.GRID_SEARCH)
        self.assertGreater(envelope.grid_points, 0)
        self.assertTrue(envelope.covers_samples())
        attained = envelope.as_interval()
        self.assertEqual(attained.formula, FormulaId.ORACLE_ENVELOPE)
        self.assertEqual((attained.lower, attained.upper), (envelope.min_pc, envelope.max_pc))
        self.assertTrue(interval.contains(attained.lower) and interval.contains(attained.upper))

    def test_witnesses_reproduce_the_scenario_and_attain_the_ends(self):
        scenario = example1()
        envelope = envelope_mediator(scenario, resolution=0.02, samples=0)
        for joints, value in zip(envelope.attained_at, (envelope.min_pc, envelope.max_pc)):
            m_joint, star_joint = joints
            self.assertTrue(compatibility_check(m_joint, scenario.m_given_d))
            self.assertTrue(compatibility_check(star_joint, scenario.y_given_m))
            self.assertAlmostEqual(true_pc_mediator(m_joint, star_joint, scenario.scale), value, delta=1e-12)

    def test_grid_search_is_deterministic(self):
        first = envelope_mediator(example2(), resolution=0.05, samples=100, seed=1)
        second = envelope_mediator(example2(), resolution=0.05, samples=100, seed=1)
        self.assertEqual(first.as_dict(), second.as_dict())

    def test_resolution_must_be_in_range(self):
        with self.assertRaises(ValueError):
            envelope_mediator(example2(), resolution=0.5)
        with self.assertRaises(ValueError):
            envelope_mediator(example2(), resolution=0.0)

    def test_containment_on_random_scenarios(self):
        rng = np.random.default_rng(4242)
        for i in range(200):
            scale = OutcomeScale(1 + i % 3, int(rng.integers(0, 1 + i % 3)))
            scenario = random_mediator_scenario(rng, scale)
            envelope = envelope_mediator(scenario, resolution=0.02, samples=200, seed=i)
            report = containment_report(envelope, bounds_mediator(scenario))
            self.assertTrue(report.ok, (i, report))


class MediatorPolytopeTests(SimpleTestCase):
    def test_corner_values_bracket_the_sampled_pcs(self):
        scenario = example2()
        polytope = MediatorPolytope.from_scenario(scenario)
        corners = polytope.corner_values()
        pcs = sample_compatible_pcs(scenario, n_samples=1000, seed=8)
        self.assertGreaterEqual(pcs.min(), corners.min() - 1e-12)
        self.assertLessEqual(pcs.max(), corners.max() + 1e-12)

    def test_batch_polytope_matches_single_polytope(self):
        rng = np.random.default_rng(17)
        scale = OutcomeScale(2, 1)
        m_cells = rng.dirichlet(np.ones(4), size=5).reshape(-1, 2, 2)
        star_cells = rng.dirichlet(np.ones(9), size=5).reshape(-1, 3, 3)
        batch = MediatorPolytope.from_joints(m_cells, star_cells, scale.event_mask)
        for k in range(5):
            single = MediatorPolytope.from_joints(m_cells[k], star_cells[k], scale.event_mask)
            np.testing.assert_allclose(batch.corner_values()[:, k], single.corner_values(), atol=1e-12)
            self.assertAlmostEqual(batch.denominator[k], single.denominator)

    def test_comonotone_pair_lies_in_the_polytope(self):
        scenario = example2()
        polytope = MediatorPolytope.from_scenario(scenario)
        m_joint = comonotone_coupling(scenario.m_given_d, JointKind.MEDIATOR_PAIRS)
        star_joint = comonotone_coupling(scenario.y_given_m, JointKind.STAR_PAIRS)
        mask = scenario.scale.event_mask
        a00 = star_joint.entries[np.ix_(~mask, ~mask)].sum()
        self.assertTrue(polytope.feasible(m_joint.entries[0, 0], a00, 1e-9))
        self.assertAlmostEqual(
            polytope.objective(m_joint.entries[0, 0], a00),
            true_pc_mediator(m_joint, star_joint, scenario.scale),
            delta=1e-12,
        )
