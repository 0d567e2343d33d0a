"""Brute-force oracle for the probability of causation.

Evaluates the PC of fully specified counterfactual joints and searches the
joints compatible with observed margins for the attainable range of the PC.
Nothing here uses the closed-form bounds; the oracle exists to check them.
"""
import enum
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from django.conf import settings

from .core import (
    BoundInterval,
    CounterfactualJoint,
    FormulaId,
    JointKind,
    probability_tolerance,
)
from .exceptions import ArityMismatchError, InfeasibleResolutionError, TheoremViolationError, UndefinedPCError

logger = logging.getLogger(__name__)


class EnvelopeMethod(str, enum.Enum):
    FRECHET_EXACT = 'frechet-exact'
    GRID_SEARCH = 'grid-search'


@dataclass(frozen=True)
class Envelope:
    """Attainable [min, max] of the PC with the joints attaining each end.

    `attained_at` is a pair (joints at min, joints at max); each entry is a
    tuple of CounterfactualJoint: one outcome-pair joint for simple
    scenarios, a (mediator-pair, star-pair) couple for mediated ones.
    """
    min_pc: float
    max_pc: float
    attained_at: tuple
    method: EnvelopeMethod
    resolution: Optional[float] = None
    grid_points: int = 0
    sampled_range: Optional[tuple] = None

    def covers_samples(self, tol=None):
        if self.sampled_range is None:
            return True
        tol = probability_tolerance(tol)
        low, high = self.sampled_range
        return self.min_pc - tol <= low and high <= self.max_pc + tol

    def as_interval(self):
        return BoundInterval(self.min_pc, self.max_pc, FormulaId.ORACLE_ENVELOPE)

    def as_dict(self):
        return {
            'min_pc': self.min_pc,
            'max_pc': self.max_pc,
            'method': self.method.value,
            'resolution': self.resolution,
            'grid_points': self.grid_points,
            'sampled_range': list(self.sampled_range) if self.sampled_range else None,
            'attained_at': {
                'min': [_joint_dict(j) for j in self.attained_at[0]],
                'max': [_joint_dict(j) for j in self.attained_at[1]],
            },
        }


@dataclass(frozen=True)
class ContainmentReport:
    lower_slack: float
    upper_slack: float
    ok: bool

    def as_dict(self):
        return {'lower_slack': self.lower_slack, 'upper_slack': self.upper_slack, 'ok': self.ok}


def _joint_dict(joint):
    return {'kind': joint.kind.value, 'entries': joint.entries.tolist()}


def _require_kind(joint, kind, scale=None):
    if joint.kind != kind:
        raise ArityMismatchError(f'expected a {kind.value} joint, got {joint.kind.value}')
    if scale is not None and joint.size != scale.n_levels:
        raise ArityMismatchError(f'joint has {joint.size} levels, scale needs {scale.n_levels}')


def cross_masses(cells, mask):
    """Mass of {V(0)<=t, V(1)>t} and of {V(0)>t, V(1)<=t}; works on stacks of joints"""
    up = cells[..., ~mask, :][..., :, mask].sum(axis=(-2, -1))
    down = cells[..., mask, :][..., :, ~mask].sum(axis=(-2, -1))
    return up, down


def true_pc_simple(joint, scale):
    """Pr(Y(0) <= t | Y(1) > t) for a fully specified outcome-pair joint"""
    _require_kind(joint, JointKind.OUTCOME_PAIRS, scale)
    mask = scale.event_mask
    denominator = float(joint.col_margin[mask].sum())
    if denominator <= 0:
        raise UndefinedPCError(f'Pr(Y(1)>{scale.threshold}) is zero', denominator=denominator)
    numerator, _ = cross_masses(joint.entries, mask)
    return float(numerator) / denominator


def mediated_denominator(m_joint, ystar_joint, scale):
    """Pr(Y(1) > t) implied by the two joints under complete mediation"""
    mask = scale.event_mask
    m_do1 = m_joint.col_margin
    return float(m_do1[0] * ystar_joint.row_margin[mask].sum() + m_do1[1] * ystar_joint.col_margin[mask].sum())


def true_pc_mediator(m_joint, ystar_joint, scale):
    """PC of a fully specified mediator-pair and star-pair joint"""
    _require_kind(m_joint, JointKind.MEDIATOR_PAIRS)
    _require_kind(ystar_joint, JointKind.STAR_PAIRS, scale)
    if m_joint.size != 2:
        raise ArityMismatchError('the mediator must be binary')
    denominator = mediated_denominator(m_joint, ystar_joint, scale)
    if denominator <= 0:
        raise UndefinedPCError(f'derived Pr(Y(1)>{scale.threshold}) is zero', denominator=denominator)
    up, down = cross_masses(ystar_joint.entries, scale.event_mask)
    numerator = up * m_joint.entries[0, 1] + down * m_joint.entries[1, 0]
    return float(numerator) / denominator


def induced_outcome_joint(m_joint, ystar_joint):
    """Outcome-pair joint of Y(d) = Y*(M(d)) with the two joints independent"""
    _require_kind(m_joint, JointKind.MEDIATOR_PAIRS)
    _require_kind(ystar_joint, JointKind.STAR_PAIRS)
    m = m_joint.entries
    star = ystar_joint.entries
    cells = (
        m[0, 0] * np.diag(ystar_joint.row_margin)
        + m[1, 1] * np.diag(ystar_joint.col_margin)
        + m[0, 1] * star
        + m[1, 0] * star.T
    )
    return CounterfactualJoint(JointKind.OUTCOME_PAIRS, cells)


def _block_interval(row_low, col_low):
    """Feasible range of Pr(V(0)<=t, V(1)<=t) given both non-event masses"""
    return np.maximum(0.0, row_low + col_low - 1.0), np.minimum(row_low, col_low)


def _lift(kind, a00, row_dist, col_dist, mask):
    """Full joint whose aggregation at the threshold has corner mass a00.

    Within each aggregated block the mass is spread as the product of the
    conditional margins, so both margins are reproduced exactly.
    """
    row_low = float(row_dist[~mask].sum())
    col_low = float(col_dist[~mask].sum())
    block = np.array([
        [a00, row_low - a00],
        [col_low - a00, 1.0 - row_low - col_low + a00],
    ])
    block = np.clip(block, 0.0, None)
    size = len(row_dist)
    cells = np.zeros((size, size))
    for i, rows in enumerate((~mask, mask)):
        row_mass = row_dist[rows].sum()
        for j, cols in enumerate((~mask, mask)):
            col_mass = col_dist[cols].sum()
            if row_mass > 0 and col_mass > 0 and block[i, j] > 0:
                cells[np.ix_(rows, cols)] = block[i, j] * np.outer(row_dist[rows] / row_mass, col_dist[cols] / col_mass)
    return CounterfactualJoint(kind, cells)


def envelope_simple(y_given_d, scale, samples=None, seed=0):
    """Exact attainable range of the PC over outcome-pair joints with the given margins.

    The PC depends on the joint only through A = Pr(Y(0)<=t, Y(1)>t), whose
    range given its two margins is the Frechet interval; witnesses are
    explicit couplings at both ends. A randomized pass over `samples`
    compatible joints then checks that nothing escapes the envelope.
    """
    mask = scale.event_mask
    unexposed = y_given_d.entries[0]
    exposed = y_given_d.entries[1]
    if exposed[mask].sum() <= 0:
        raise UndefinedPCError(f'P(Y>{scale.threshold}|D=1) is zero', denominator=float(exposed[mask].sum()))

    low, high = _block_interval(float(unexposed[~mask].sum()), float(exposed[~mask].sum()))
    # the cross mass A falls as the corner mass rises
    at_min = _lift(JointKind.OUTCOME_PAIRS, high, unexposed, exposed, mask)
    at_max = _lift(JointKind.OUTCOME_PAIRS, low, unexposed, exposed, mask)
    envelope = Envelope(
        min_pc=true_pc_simple(at_min, scale),
        max_pc=true_pc_simple(at_max, scale),
        attained_at=((at_min,), (at_max,)),
        method=EnvelopeMethod.FRECHET_EXACT,
    )
    samples = settings.PC_ORACLE_SAMPLES if samples is None else samples
    if samples:
        pcs = sample_compatible_pcs_simple(y_given_d, scale, samples, seed)
        envelope = replace(envelope, sampled_range=(float(pcs.min()), float(pcs.max())))
        if not envelope.covers_samples():
            raise TheoremViolationError(
                f'sampled PC range {envelope.sampled_range} escapes the exact envelope '
                f'[{envelope.min_pc!r}, {envelope.max_pc!r}]',
                sampled_range=list(envelope.sampled_range),
            )
    return envelope


class MediatorPolytope:
    """Joints compatible with a mediated scenario, reduced to two free parameters.

    m00 = Pr(M(0)=0, M(1)=0) fixes the mediator-pair joint; a00 =
    Pr(Y*(0)<=t, Y*(1)<=t) fixes the star-pair joint's aggregation at the
    threshold, which is all the PC depends on. The masses may be arrays, in
    which case every method broadcasts over a batch of scenarios.
    """

    def __init__(self, m_low, m_do1_low, star_low, star_do1_low, star_dist=None, mask=None):
        self.m_low = m_low              # Pr(M(0)=0)
        self.m_do1_low = m_do1_low      # Pr(M(1)=0)
        self.star_low = star_low        # Pr(Y*(0)<=t)
        self.star_do1_low = star_do1_low  # Pr(Y*(1)<=t)
        self.star_dist = star_dist
        self.mask = mask
        self.m_range = _block_interval(m_low, m_do1_low)
        self.star_range = _block_interval(star_low, star_do1_low)
        self.denominator = m_do1_low * (1.0 - star_low) + (1.0 - m_do1_low) * (1.0 - star_do1_low)

    @classmethod
    def from_scenario(cls, scenario):
        mask = scenario.scale.event_mask
        m = scenario.m_given_d.entries
        star = scenario.y_given_m.entries
        return cls(
            float(m[0, 0]), float(m[1, 0]),
            float(star[0][~mask].sum()), float(star[1][~mask].sum()),
            star_dist=star, mask=mask,
        )

    @classmethod
    def from_joints(cls, m_cells, star_cells, mask):
        """Batch polytope for stacks of mediator-pair and star-pair cells"""
        return cls(
            m_cells[..., 0, :].sum(axis=-1),
            m_cells[..., :, 0].sum(axis=-1),
            star_cells[..., ~mask, :].sum(axis=(-2, -1)),
            star_cells[..., :, ~mask].sum(axis=(-2, -1)),
        )

    def cells(self, m00, a00):
        """Mediator cells (m01, m10, m11) and aggregated star cells (up, down, a11)"""
        m01 = self.m_low - m00
        m10 = self.m_do1_low - m00
        m11 = 1.0 - self.m_low - self.m_do1_low + m00
        up = self.star_low - a00
        down = self.star_do1_low - a00
        a11 = 1.0 - self.star_low - self.star_do1_low + a00
        return (m01, m10, m11), (up, down, a11)

    def feasible(self, m00, a00, tol):
        (m01, m10, m11), (up, down, a11) = self.cells(m00, a00)
        return np.all([np.asarray(v) >= -tol for v in (m00, m01, m10, m11, a00, up, down, a11)], axis=0)

    def objective(self, m00, a00):
        (m01, m10, _), (up, down, _) = self.cells(m00, a00)
        return (up * m01 + down * m10) / self.denominator

    def corners(self):
        return [(m00, a00) for m00 in self.m_range for a00 in self.star_range]

    def corner_values(self):
        """Objective at the four corners, stacked on the first axis"""
        return np.stack([self.objective(m00, a00) for m00, a00 in self.corners()])

    def joints(self, m00, a00):
        if self.star_dist is None:
            raise ValueError('a batch polytope cannot build joints')
        m_cells = np.clip(np.array([
            [m00, self.m_low - m00],
            [self.m_do1_low - m00, 1.0 - self.m_low - self.m_do1_low + m00],
        ]), 0.0, None)
        m_joint = CounterfactualJoint(JointKind.MEDIATOR_PAIRS, m_cells)
        star_joint = _lift(JointKind.STAR_PAIRS, a00, self.star_dist[0], self.star_dist[1], self.mask)
        return m_joint, star_joint


def _axis(bounds, resolution):
    low, high = bounds
    steps = max(0, int(np.floor((high - low) / resolution + 1e-9)))
    return low + resolution * np.arange(steps + 1)


def _refine(polytope, point, sign, max_rounds=20):
    """Coordinate search; the objective is affine in each coordinate so only endpoints matter"""
    point = list(point)
    ranges = (polytope.m_range, polytope.star_range)
    for _ in range(max_rounds):
        moved = False
        for axis, (low, high) in enumerate(ranges):
            best_value = sign * polytope.objective(*point)
            for candidate in (low, high):
                trial = list(point)
                trial[axis] = candidate
                value = sign * polytope.objective(*trial)
                if value > best_value:
                    best_value, point, moved = value, trial, True
        if not moved:
            break
    return tuple(point)


def _best_refined(polytope, m_grid, a_grid, values, sign, starts):
    # stable sort keeps lexicographic order among equal grid values
    order = np.argsort(-sign * values, kind='stable')[:starts]
    candidates = [(float(m_grid[index]), float(a_grid[index])) for index in order]
    # the objective is bilinear, so one of the corners is a global optimum
    candidates += [(float(m00), float(a00)) for m00, a00 in polytope.corners()]
    best_point, best_value = None, None
    for start in candidates:
        point = _refine(polytope, start, sign)
        value = sign * polytope.objective(*point)
        if best_value is None or value > best_value or (value == best_value and point < best_point):
            best_point, best_value = point, value
    return best_point


def envelope_mediator(scenario, scale=None, resolution=None, samples=None, seed=0, starts=8):
    """Attainable range of the mediated PC by grid search plus refinement.

    Every reported end is attained by exhibited joints, so the result is an
    inner approximation of the true range. Refinement restarts from the
    `starts` best grid points of each direction.
    """
    resolution = settings.PC_ORACLE_RESOLUTION if resolution is None else resolution
    if not 0 < resolution <= settings.PC_ORACLE_MAX_RESOLUTION:
        raise ValueError(f'resolution must lie in (0, {settings.PC_ORACLE_MAX_RESOLUTION}], got {resolution}')
    if scale is not None and scale != scenario.scale:
        raise ArityMismatchError(f'scale {scale} does not match the scenario scale {scenario.scale}')
    polytope = MediatorPolytope.from_scenario(scenario)
    if polytope.denominator <= 0:
        raise UndefinedPCError(
            f'derived P(Y>{scenario.scale.threshold}|D=1) is zero', denominator=polytope.denominator,
        )

    tol = probability_tolerance()
    # ij indexing keeps the flattened order lexicographic in (m00, a00)
    m_grid, a_grid = np.meshgrid(
        _axis(polytope.m_range, resolution), _axis(polytope.star_range, resolution), indexing='ij',
    )
    m_grid, a_grid = m_grid.ravel(), a_grid.ravel()
    feasible = polytope.feasible(m_grid, a_grid, tol)
    if not feasible.any():
        raise InfeasibleResolutionError(f'no feasible grid point at resolution {resolution}')
    m_grid, a_grid = m_grid[feasible], a_grid[feasible]
    values = polytope.objective(m_grid, a_grid)
    logger.debug('mediator grid: %d feasible points at resolution %s', len(values), resolution)

    ends = []
    for sign in (-1, 1):
        point = _best_refined(polytope, m_grid, a_grid, values, sign, starts)
        m_joint, star_joint = polytope.joints(*point)
        ends.append(((m_joint, star_joint), true_pc_mediator(m_joint, star_joint, scenario.scale)))

    (at_min, min_pc), (at_max, max_pc) = ends
    envelope = Envelope(
        min_pc=min_pc,
        max_pc=max_pc,
        attained_at=(at_min, at_max),
        method=EnvelopeMethod.GRID_SEARCH,
        resolution=resolution,
        grid_points=int(len(values)),
    )
    samples = settings.PC_ORACLE_SAMPLES if samples is None else samples
    if samples:
        pcs = sample_compatible_pcs_mediator(scenario, samples, seed)
        envelope = replace(envelope, sampled_range=(float(pcs.min()), float(pcs.max())))
        if not envelope.covers_samples(tol):
            logger.warning(
                'sampled PC range %s escapes the grid envelope [%r, %r]',
                envelope.sampled_range, envelope.min_pc, envelope.max_pc,
            )
    return envelope


def sample_couplings(row_margin, col_margin, n_samples, rng):
    """Random joints with the given margins, shape (n_samples, size, size).

    Cells are filled row by row; each free cell is drawn uniformly inside
    the interval that keeps the rest of the table completable.
    """
    size = len(row_margin)
    cells = np.zeros((n_samples, size, size))
    remaining_col = np.tile(np.asarray(col_margin, dtype=float), (n_samples, 1))
    for i in range(size - 1):
        remaining_row = np.full(n_samples, float(row_margin[i]))
        for j in range(size - 1):
            tail = remaining_col[:, j + 1:].sum(axis=1)
            low = np.maximum(0.0, remaining_row - tail)
            high = np.minimum(remaining_row, remaining_col[:, j])
            draw = low + rng.random(n_samples) * np.maximum(high - low, 0.0)
            cells[:, i, j] = draw
            remaining_row = remaining_row - draw
            remaining_col[:, j] -= draw
        last = np.maximum(remaining_row, 0.0)
        cells[:, i, -1] = last
        remaining_col[:, -1] -= last
    cells[:, -1, :] = np.maximum(remaining_col, 0.0)
    return cells


def sample_compatible_pcs_simple(y_given_d, scale, n_samples, seed=0):
    rng = np.random.default_rng(seed)
    mask = scale.event_mask
    joints = sample_couplings(y_given_d.entries[0], y_given_d.entries[1], n_samples, rng)
    up, _ = cross_masses(joints, mask)
    return up / y_given_d.entries[1][mask].sum()


def sample_compatible_pcs_mediator(scenario, n_samples, seed=0):
    rng = np.random.default_rng(seed)
    polytope = MediatorPolytope.from_scenario(scenario)
    low, high = polytope.m_range
    m00 = low + rng.random(n_samples) * (high - low)
    (m01, m10, _), _ = polytope.cells(m00, 0.0)
    stars = sample_couplings(polytope.star_dist[0], polytope.star_dist[1], n_samples, rng)
    up, down = cross_masses(stars, polytope.mask)
    return (up * m01 + down * m10) / polytope.denominator


def sample_compatible_pcs(scenario, n_samples=None, seed=0):
    """PC values of random full-size joints compatible with the scenario"""
    n_samples = settings.PC_ORACLE_SAMPLES if n_samples is None else n_samples
    if scenario.is_mediator:
        return sample_compatible_pcs_mediator(scenario, n_samples, seed)
    return sample_compatible_pcs_simple(scenario.y_given_d, scenario.scale, n_samples, seed)


def containment_report(envelope, interval, tol=None):
    """Slack between the oracle envelope and a closed-form interval"""
    tol = probability_tolerance(tol)
    attained = envelope.as_interval()
    lower_slack = attained.lower - interval.lower
    upper_slack = interval.upper - attained.upper
    return ContainmentReport(
        lower_slack=lower_slack,
        upper_slack=upper_slack,
        ok=lower_slack >= -tol and upper_slack >= -tol,
    )
