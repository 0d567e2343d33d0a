"""Domain types for probability-of-causation bounds.

Tables follow one convention throughout: rows are indexed by the
conditioning variable (0 then 1) and columns by the conditioned variable,
so ``entries[r][c] = P(col=c | row=r)``. Counterfactual joints are indexed
``entries[p][q] = Pr(V(0)=p, V(1)=q)``; their row sums are the do(0) margin
and their column sums the do(1) margin.

All results are population-level quantities. Reading them as statements
about a single exposed individual presumes no confounding between exposure,
mediator and outcome, and that the individual is exchangeable with the
population the tables were measured on.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.conf import settings

from .exceptions import (
    ArityMismatchError,
    NegativeProbabilityError,
    RowSumViolationError,
    TheoremViolationError,
    ThresholdOutOfRangeError,
    TotalMassViolationError,
)

logger = logging.getLogger(__name__)


def probability_tolerance(tol=None):
    return settings.PC_PROBABILITY_TOLERANCE if tol is None else tol


def theorem_tolerance(tol=None):
    return settings.PC_THEOREM_TOLERANCE if tol is None else tol


def _frozen_array(values, what):
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ArityMismatchError(f'{what}: entries do not form a rectangular numeric table ({exc})') from exc
    if arr.ndim != 2:
        raise ArityMismatchError(f'{what}: expected a 2-dimensional table, got {arr.ndim} dimension(s)')
    arr.setflags(write=False)
    return arr


class ScenarioKind(str, enum.Enum):
    SIMPLE = 'simple'
    MEDIATOR = 'mediator'


class JointKind(str, enum.Enum):
    OUTCOME_PAIRS = 'outcome_pairs'    # (Y(0), Y(1))
    MEDIATOR_PAIRS = 'mediator_pairs'  # (M(0), M(1))
    STAR_PAIRS = 'star_pairs'          # (Y*(0), Y*(1)), outcome indexed by the mediator


class FormulaId(str, enum.Enum):
    BINARY_SIMPLE = 'binary-simple'
    BINARY_MEDIATOR = 'binary-mediator'
    ORDINAL_SIMPLE = 'ordinal-simple'
    ORDINAL_MEDIATOR = 'ordinal-mediator'
    ORACLE_ENVELOPE = 'oracle-envelope'


@dataclass(frozen=True)
class OutcomeScale:
    """Ordinal outcome support 0..max_level; the event of interest is Y > threshold"""
    max_level: int
    threshold: int

    @classmethod
    def binary(cls):
        return cls(max_level=1, threshold=0)

    @property
    def n_levels(self):
        return self.max_level + 1

    @property
    def is_binary(self):
        return self.max_level == 1 and self.threshold == 0

    @property
    def event_mask(self):
        """Boolean mask over outcome levels selecting Y > threshold"""
        return np.arange(self.n_levels) > self.threshold

    def validate(self):
        if isinstance(self.max_level, bool) or not isinstance(self.max_level, (int, np.integer)):
            raise ArityMismatchError(f'T must be an integer, got {self.max_level!r}', T=self.max_level)
        if isinstance(self.threshold, bool) or not isinstance(self.threshold, (int, np.integer)):
            raise ThresholdOutOfRangeError(f't must be an integer, got {self.threshold!r}', t=self.threshold)
        if self.max_level < 1:
            raise ArityMismatchError(f'T must be at least 1, got {self.max_level}', T=self.max_level)
        if not 0 <= self.threshold < self.max_level:
            raise ThresholdOutOfRangeError(
                f'threshold t={self.threshold} must satisfy 0 <= t < T={self.max_level}',
                T=self.max_level, t=self.threshold,
            )
        return self


@dataclass(frozen=True)
class ConditionalTable:
    """Row-stochastic table P(col_variable | row_variable)"""
    row_variable: str
    col_variable: str
    entries: np.ndarray

    def __post_init__(self):
        what = f'P({self.col_variable}|{self.row_variable})'
        object.__setattr__(self, 'entries', _frozen_array(self.entries, what))

    @property
    def name(self):
        return f'P({self.col_variable}|{self.row_variable})'

    @property
    def row_arity(self):
        return self.entries.shape[0]

    @property
    def col_arity(self):
        return self.entries.shape[1]

    def event_mass(self, row, scale):
        """Probability of col > threshold given row"""
        return float(self.entries[row][scale.event_mask].sum())

    def non_event_mass(self, row, scale):
        return float(self.entries[row][~scale.event_mask].sum())

    def to_list(self):
        return self.entries.tolist()


@dataclass(frozen=True)
class Scenario:
    """Observable input: either P(Y|D) alone, or P(M|D) and P(Y|M) under complete mediation"""
    kind: ScenarioKind
    scale: OutcomeScale
    y_given_d: Optional[ConditionalTable] = None
    m_given_d: Optional[ConditionalTable] = None
    y_given_m: Optional[ConditionalTable] = None

    @classmethod
    def simple(cls, scale, y_given_d):
        if not isinstance(y_given_d, ConditionalTable):
            y_given_d = ConditionalTable('D', 'Y', y_given_d)
        return cls(ScenarioKind.SIMPLE, scale, y_given_d=y_given_d)

    @classmethod
    def mediator(cls, scale, m_given_d, y_given_m):
        if not isinstance(m_given_d, ConditionalTable):
            m_given_d = ConditionalTable('D', 'M', m_given_d)
        if not isinstance(y_given_m, ConditionalTable):
            y_given_m = ConditionalTable('M', 'Y', y_given_m)
        return cls(ScenarioKind.MEDIATOR, scale, m_given_d=m_given_d, y_given_m=y_given_m)

    @property
    def is_mediator(self):
        return self.kind == ScenarioKind.MEDIATOR

    def tables(self):
        if self.is_mediator:
            return {'m_given_d': self.m_given_d, 'y_given_m': self.y_given_m}
        return {'y_given_d': self.y_given_d}


@dataclass(frozen=True)
class CounterfactualJoint:
    """Joint distribution of a potential-outcome pair (V(0), V(1))"""
    kind: JointKind
    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.entries, f'{self.kind.value} joint')
        if arr.shape[0] != arr.shape[1]:
            raise ArityMismatchError(f'joint must be square, got shape {arr.shape}')
        tol = probability_tolerance()
        if not np.all(np.isfinite(arr)):
            raise NegativeProbabilityError('joint contains non-finite entries')
        if arr.min() < -tol:
            raise NegativeProbabilityError(f'joint has negative mass {arr.min():.3g}', minimum=float(arr.min()))
        total = float(arr.sum())
        if abs(total - 1.0) > tol:
            raise TotalMassViolationError(f'joint sums to {total!r}', deviation=total - 1.0)
        object.__setattr__(self, 'entries', arr)

    @property
    def size(self):
        return self.entries.shape[0]

    @property
    def row_margin(self):
        """Distribution of V(0)"""
        return self.entries.sum(axis=1)

    @property
    def col_margin(self):
        """Distribution of V(1)"""
        return self.entries.sum(axis=0)

    def margins_table(self, row_variable, col_variable):
        return ConditionalTable(row_variable, col_variable, np.vstack([self.row_margin, self.col_margin]))


@dataclass(frozen=True)
class MediatorBoundTerms:
    """Intermediate quantities of the mediator bound formulas, kept for audit"""
    b: float
    c: float
    B: float
    C: float
    denominator: float
    alpha1: Optional[float] = None
    alpha2: Optional[float] = None
    beta1: Optional[float] = None
    beta2: Optional[float] = None

    def as_dict(self):
        data = {'b': self.b, 'c': self.c, 'B': self.B, 'C': self.C, 'denominator': self.denominator}
        if self.alpha1 is not None:
            data.update(alpha1=self.alpha1, alpha2=self.alpha2, beta1=self.beta1, beta2=self.beta2)
        return data


@dataclass(frozen=True)
class BoundInterval:
    lower: float
    upper: float
    formula: FormulaId
    terms: Optional[MediatorBoundTerms] = field(default=None, compare=False)

    def __post_init__(self):
        tol = theorem_tolerance()
        if not (-tol <= self.lower <= self.upper + tol and self.upper <= 1 + tol):
            raise TheoremViolationError(
                f'invalid interval [{self.lower!r}, {self.upper!r}] from {self.formula.value}',
                lower=self.lower, upper=self.upper,
            )

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def midpoint(self):
        return (self.lower + self.upper) / 2

    def contains(self, value, tol=None):
        tol = probability_tolerance(tol)
        return self.lower - tol <= value <= self.upper + tol

    def as_dict(self):
        data = {'lower': self.lower, 'upper': self.upper, 'formula': self.formula.value}
        if self.terms is not None:
            data['terms'] = self.terms.as_dict()
        return data


@dataclass(frozen=True)
class CompatibilityReport:
    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok


def _validate_table(table, tol):
    """Return a copy of `table` with rows renormalised within tolerance, or raise"""
    entries = table.entries
    if not np.all(np.isfinite(entries)):
        raise NegativeProbabilityError(f'{table.name} contains non-finite entries', table=table.name)
    negative = np.argwhere(entries < 0)
    if negative.size:
        r, c = (int(i) for i in negative[0])
        raise NegativeProbabilityError(
            f'{table.name}[{r}][{c}] = {entries[r, c]!r} is negative',
            table=table.name, row=r, col=c,
        )
    sums = entries.sum(axis=1)
    for r, row_sum in enumerate(sums):
        deviation = float(row_sum - 1.0)
        if abs(deviation) > tol:
            raise RowSumViolationError(
                f'{table.name} row {r} sums to {row_sum!r} (deviation {deviation:+.3g})',
                row=r, deviation=deviation, table=table.name,
            )
    if np.any(sums != 1.0):
        logger.debug('normalising %s rows with sums %s', table.name, sums.tolist())
        entries = entries / sums[:, None]
    return ConditionalTable(table.row_variable, table.col_variable, entries)


def _check_shape(table, shape, role):
    if table is None:
        raise ArityMismatchError(f'{role} table is missing', table=role)
    if table.entries.shape != shape:
        raise ArityMismatchError(
            f'{role} must have shape {shape[0]}x{shape[1]}, got {table.entries.shape[0]}x{table.entries.shape[1]}',
            table=role, expected=list(shape), actual=list(table.entries.shape),
        )


def validate_scenario(raw, tol=None):
    """Validate an untrusted scenario and return it with rows normalised.

    Rows deviating from 1 by at most the probability tolerance are rescaled;
    anything larger raises RowSumViolationError.
    """
    tol = probability_tolerance(tol)
    scale = raw.scale.validate()
    n_levels = scale.n_levels
    if raw.kind == ScenarioKind.SIMPLE:
        _check_shape(raw.y_given_d, (2, n_levels), 'y_given_d')
        return Scenario(raw.kind, scale, y_given_d=_validate_table(raw.y_given_d, tol))
    if raw.kind == ScenarioKind.MEDIATOR:
        # the mediator is binary; wider P(M|D) tables are rejected here
        _check_shape(raw.m_given_d, (2, 2), 'm_given_d')
        _check_shape(raw.y_given_m, (2, n_levels), 'y_given_m')
        return Scenario(
            raw.kind, scale,
            m_given_d=_validate_table(raw.m_given_d, tol),
            y_given_m=_validate_table(raw.y_given_m, tol),
        )
    raise ArityMismatchError(f'unknown scenario kind {raw.kind!r}')


def derive_outcome_given_exposure(m_given_d, y_given_m, tol=None):
    """P(Y|D) implied by complete mediation, by the law of total probability"""
    tol = probability_tolerance(tol)
    _check_shape(m_given_d, (2, 2), 'm_given_d')
    if y_given_m.row_arity != 2:
        raise ArityMismatchError('y_given_m must have 2 rows', table='y_given_m')
    m_given_d = _validate_table(m_given_d, tol)
    y_given_m = _validate_table(y_given_m, tol)
    return ConditionalTable('D', 'Y', m_given_d.entries @ y_given_m.entries)


def outcome_given_exposure(scenario):
    """P(Y|D) of a validated scenario, derived when the scenario is mediated"""
    if scenario.is_mediator:
        return derive_outcome_given_exposure(scenario.m_given_d, scenario.y_given_m)
    return scenario.y_given_d


def simple_view(scenario):
    """The Simple scenario a mediated one reduces to when the mediator is ignored"""
    return Scenario.simple(scenario.scale, outcome_given_exposure(scenario))


def compatibility_check(joint, margins, tol=None):
    """Check that a joint reproduces the do(0)/do(1) rows of `margins`"""
    tol = probability_tolerance(tol)
    if margins.row_arity != 2 or margins.col_arity != joint.size:
        raise ArityMismatchError(
            f'joint of size {joint.size} cannot pair with {margins.name} of shape {margins.entries.shape}',
        )
    violations = []
    for label, observed, expected in (
        ('row', joint.row_margin, margins.entries[0]),
        ('column', joint.col_margin, margins.entries[1]),
    ):
        for level, (got, want) in enumerate(zip(observed, expected)):
            if abs(got - want) > tol:
                violations.append(f'{label} sum {level} is {got!r}, expected {want!r} (off by {got - want:+.3g})')
    return CompatibilityReport(ok=not violations, violations=tuple(violations))


def product_coupling(margins, kind):
    """Independent coupling of the two rows of `margins`"""
    return CounterfactualJoint(kind, np.outer(margins.entries[0], margins.entries[1]))


def comonotone_coupling(margins, kind):
    """North-west-corner coupling of the two rows of `margins`"""
    remaining_row = margins.entries[0].copy()
    remaining_col = margins.entries[1].copy()
    n = margins.col_arity
    cells = np.zeros((n, n))
    i = j = 0
    while i < n and j < n:
        mass = min(remaining_row[i], remaining_col[j])
        cells[i, j] = mass
        remaining_row[i] -= mass
        remaining_col[j] -= mass
        if remaining_row[i] <= remaining_col[j]:
            i += 1
        else:
            j += 1
    return CounterfactualJoint(kind, cells)
