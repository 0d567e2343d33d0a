"""Random mediated scenarios with known true PC, and the bound-gap experiments run on them.

Each sample index draws from its own generator seeded with ``[seed, index]``,
so a run gives the same records whether it is computed in one process or
fanned out over Celery workers.
"""
import io
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import pandas as pd
from django.conf import settings
from scipy.optimize import root_scalar

from .bounds import dominance_report
from .core import (
    BoundInterval,
    CounterfactualJoint,
    FormulaId,
    JointKind,
    Scenario,
    probability_tolerance,
    theorem_tolerance,
    validate_scenario,
)
from .exceptions import DegenerateGenerationError, EmptyExperimentError, TheoremViolationError
from .oracle import MediatorPolytope, true_pc_mediator

logger = logging.getLogger(__name__)

FIGURE_COLUMNS = ['sample_index', 'true_pc', 'med_lower', 'med_upper', 'simple_mid', 'med_mid']


@dataclass(frozen=True)
class GeneratedSample:
    """A full counterfactual specification with the scenario it induces"""
    scenario: Scenario
    m_joint: CounterfactualJoint
    ystar_joint: CounterfactualJoint
    true_pc: float
    target: Optional[float] = None


@dataclass(frozen=True)
class ExperimentRecord:
    sample_id: int
    true_pc: float
    simple_bounds: BoundInterval
    mediator_bounds: BoundInterval
    target: Optional[float] = None

    @property
    def simple_midpoint(self):
        return self.simple_bounds.midpoint

    @property
    def mediator_midpoint(self):
        return self.mediator_bounds.midpoint

    @property
    def simple_gap(self):
        return self.simple_bounds.width

    @property
    def mediator_gap(self):
        return self.mediator_bounds.width

    def as_dict(self):
        return {
            'sample_id': self.sample_id,
            'true_pc': self.true_pc,
            'target': self.target,
            'simple_bounds': self.simple_bounds.as_dict(),
            'mediator_bounds': self.mediator_bounds.as_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        def interval(raw):
            return BoundInterval(raw['lower'], raw['upper'], FormulaId(raw['formula']))

        return cls(
            sample_id=int(data['sample_id']),
            true_pc=float(data['true_pc']),
            simple_bounds=interval(data['simple_bounds']),
            mediator_bounds=interval(data['mediator_bounds']),
            target=data.get('target'),
        )


@dataclass(frozen=True)
class ExperimentSummary:
    n_samples: int
    mean_simple_gap: float
    mean_mediator_gap: float
    mean_abs_midpoint_error_simple: float
    mean_abs_midpoint_error_mediator: float
    # descriptive only: the published means come from an unspecified generator
    reference_deviation_simple: float = 0.0
    reference_deviation_mediator: float = 0.0

    def as_dict(self):
        return {
            'n_samples': self.n_samples,
            'mean_simple_gap': self.mean_simple_gap,
            'mean_mediator_gap': self.mean_mediator_gap,
            'mean_abs_midpoint_error_simple': self.mean_abs_midpoint_error_simple,
            'mean_abs_midpoint_error_mediator': self.mean_abs_midpoint_error_mediator,
            'reference_deviation_simple': self.reference_deviation_simple,
            'reference_deviation_mediator': self.reference_deviation_mediator,
        }


@dataclass(frozen=True)
class ExperimentResult:
    records: List[ExperimentRecord] = field(default_factory=list)
    summary: Optional[ExperimentSummary] = None


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _sample_from_joints(scale, m_cells, star_cells, target=None):
    m_joint = CounterfactualJoint(JointKind.MEDIATOR_PAIRS, m_cells)
    ystar_joint = CounterfactualJoint(JointKind.STAR_PAIRS, star_cells)
    scenario = validate_scenario(Scenario.mediator(
        scale, m_joint.margins_table('D', 'M'), ystar_joint.margins_table('M', 'Y'),
    ))
    if target is not None:
        m_joint, ystar_joint = _hit_target(scenario, target)
    true_pc = true_pc_mediator(m_joint, ystar_joint, scale)
    return GeneratedSample(scenario, m_joint, ystar_joint, true_pc, target)


def _hit_target(scenario, target):
    """Joints with the scenario's margins whose PC equals `target`.

    The objective is continuous on the feasible rectangle, so it takes every
    value between its extreme corners along the segment joining them.
    """
    polytope = MediatorPolytope.from_scenario(scenario)
    corners = polytope.corners()
    values = [polytope.objective(*corner) for corner in corners]
    start = np.array(corners[int(np.argmin(values))])
    end = np.array(corners[int(np.argmax(values))])

    def gap(s):
        return polytope.objective(*(start + s * (end - start))) - target

    if gap(0.0) >= 0:
        s = 0.0
    elif gap(1.0) <= 0:
        s = 1.0
    else:
        s = root_scalar(gap, bracket=(0.0, 1.0), method='brentq', xtol=1e-14).root
    m00, a00 = start + s * (end - start)
    return polytope.joints(float(m00), float(a00))


def sample_mediator_scenario(seed, scale, target=None, floor=None, max_rejections=None, batch_size=None):
    """Draw mediator-pair and star-pair joints uniformly from their simplices.

    Draws whose implied Pr(Y(1) > t) falls below `floor` are rejected. With a
    `target`, a draw is also rejected unless the PC range its margins allow
    covers the target, and the accepted joints are then moved to hit it.
    """
    scale = scale.validate()
    rng = _as_rng(seed)
    floor = settings.PC_SIMULATION_DENOMINATOR_FLOOR if floor is None else floor
    max_rejections = settings.PC_SIMULATION_MAX_REJECTIONS if max_rejections is None else max_rejections
    batch_size = settings.PC_SIMULATION_BATCH_SIZE if batch_size is None else batch_size
    n = scale.n_levels
    mask = scale.event_mask

    rejected = 0
    while rejected <= max_rejections:
        m_cells = rng.dirichlet(np.ones(4), size=batch_size).reshape(-1, 2, 2)
        star_cells = rng.dirichlet(np.ones(n * n), size=batch_size).reshape(-1, n, n)
        polytope = MediatorPolytope.from_joints(m_cells, star_cells, mask)
        accepted = polytope.denominator >= floor
        if target is not None:
            corner_values = polytope.corner_values()
            accepted &= (corner_values.min(axis=0) <= target) & (target <= corner_values.max(axis=0))
        hits = np.flatnonzero(accepted)
        if hits.size:
            index = int(hits[0])
            rejected += index
            logger.debug('accepted a draw after %d rejections', rejected)
            return _sample_from_joints(scale, m_cells[index], star_cells[index], target)
        rejected += batch_size
    raise DegenerateGenerationError(
        f'no acceptable draw after {rejected} rejections', rejections=rejected, floor=floor, target=target,
    )


def deterministic_chain_sample(scale):
    """Generator where M(d) = d and Y*(m) is the bottom level for m=0, the top level for m=1"""
    scale = scale.validate()
    m_cells = np.array([[0.0, 1.0], [0.0, 0.0]])
    star_cells = np.zeros((scale.n_levels, scale.n_levels))
    star_cells[0, scale.max_level] = 1.0

    def generate(index, rng):
        return _sample_from_joints(scale, m_cells, star_cells)

    return generate


def _target_for(index, rng, bins=None):
    bins = settings.PC_TARGET_BINS if bins is None else bins
    return (index % bins + rng.random()) / bins


def generate_record(index, seed, scale, target_pc=False, generator: Optional[Callable] = None, tol=None):
    """Record for one sample index; depends only on (seed, index)"""
    rng = np.random.default_rng([seed, index])
    if generator is not None:
        sample = generator(index, rng)
    else:
        target = _target_for(index, rng) if target_pc else None
        sample = sample_mediator_scenario(rng, scale, target=target)

    report = dominance_report(sample.scenario, scale)
    tol = probability_tolerance(tol)
    for label, interval in (('simple', report.simple_bounds), ('mediator', report.mediator_bounds)):
        if not interval.contains(sample.true_pc, tol):
            raise TheoremViolationError(
                f'sample {index}: true PC {sample.true_pc!r} outside the {label} bounds '
                f'[{interval.lower!r}, {interval.upper!r}]',
                sample_id=index, seed=seed,
            )
    return ExperimentRecord(
        sample_id=index,
        true_pc=sample.true_pc,
        simple_bounds=report.simple_bounds,
        mediator_bounds=report.mediator_bounds,
        target=sample.target,
    )


def sort_records(records):
    return sorted(records, key=lambda record: (record.true_pc, record.sample_id))


def summarize(records, reference=None):
    if not records:
        raise EmptyExperimentError('no records to summarize')
    reference = settings.PC_REFERENCE_MEAN_GAPS if reference is None else reference
    true_pc = np.array([r.true_pc for r in records])
    simple_gap = float(np.mean([r.simple_gap for r in records]))
    mediator_gap = float(np.mean([r.mediator_gap for r in records]))
    if mediator_gap > simple_gap + theorem_tolerance():
        raise TheoremViolationError(
            f'mean mediator gap {mediator_gap!r} exceeds mean simple gap {simple_gap!r}',
        )
    return ExperimentSummary(
        n_samples=len(records),
        mean_simple_gap=simple_gap,
        mean_mediator_gap=mediator_gap,
        mean_abs_midpoint_error_simple=float(np.mean(np.abs([r.simple_midpoint for r in records] - true_pc))),
        mean_abs_midpoint_error_mediator=float(np.mean(np.abs([r.mediator_midpoint for r in records] - true_pc))),
        reference_deviation_simple=simple_gap - reference['simple'],
        reference_deviation_mediator=mediator_gap - reference['mediator'],
    )


def run_bounds_experiment(n_samples, scale, seed, target_pc=False, generator=None):
    """Generate `n_samples` records, sorted by true PC, with their summary"""
    if n_samples < 1:
        raise EmptyExperimentError(f'n_samples must be at least 1, got {n_samples}')
    scale = scale.validate()
    records = sort_records(
        generate_record(index, seed, scale, target_pc=target_pc, generator=generator)
        for index in range(n_samples)
    )
    summary = summarize(records)
    logger.info(
        'experiment T=%d t=%d seed=%s n=%d: mean gaps simple=%.4f mediator=%.4f',
        scale.max_level, scale.threshold, seed, n_samples, summary.mean_simple_gap, summary.mean_mediator_gap,
    )
    return ExperimentResult(records=records, summary=summary)


def figure_frame(records):
    records = sort_records(records)
    return pd.DataFrame({
        'sample_index': range(len(records)),
        'true_pc': [r.true_pc for r in records],
        'med_lower': [r.mediator_bounds.lower for r in records],
        'med_upper': [r.mediator_bounds.upper for r in records],
        'simple_mid': [r.simple_midpoint for r in records],
        'med_mid': [r.mediator_midpoint for r in records],
    }, columns=FIGURE_COLUMNS)


def export_figure_data(records, path=None):
    """Write the plot data as CSV and return the text"""
    if not records:
        raise EmptyExperimentError('no records to export')
    text = figure_frame(records).to_csv(index=False, float_format='%.6f', lineterminator='\n')
    if path is not None:
        with open(path, 'w', newline='') as handle:
            handle.write(text)
    return text


def read_figure_data(source):
    """Parse exported plot data from a path or a CSV string"""
    if isinstance(source, str) and '\n' in source:
        source = io.StringIO(source)
    frame = pd.read_csv(source)
    if list(frame.columns) != FIGURE_COLUMNS:
        raise ValueError(f'unexpected columns {list(frame.columns)}')
    return frame
