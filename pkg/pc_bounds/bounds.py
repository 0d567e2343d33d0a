"""Closed-form bounds on the probability of causation"""
import enum
import logging
from dataclasses import dataclass

from .core import (
    BoundInterval,
    FormulaId,
    MediatorBoundTerms,
    derive_outcome_given_exposure,
    theorem_tolerance,
)
from .exceptions import ArityMismatchError, TheoremViolationError, UndefinedPCError, UndefinedRiskRatioError

logger = logging.getLogger(__name__)


class Verdict(str, enum.Enum):
    ESTABLISHED = 'established'
    EXCLUDED = 'excluded'
    UNDETERMINED = 'undetermined'


@dataclass(frozen=True)
class DominanceReport:
    simple_bounds: BoundInterval
    mediator_bounds: BoundInterval
    lower_equal: bool
    upper_improvement: float

    def as_dict(self):
        return {
            'simple_bounds': self.simple_bounds.as_dict(),
            'mediator_bounds': self.mediator_bounds.as_dict(),
            'lower_equal': self.lower_equal,
            'upper_improvement': self.upper_improvement,
        }


def _require_binary(table):
    if table.col_arity != 2:
        raise ArityMismatchError(f'{table.name} is not binary (has {table.col_arity} levels)')


def risk_ratio(y_given_d):
    """P(Y=1|D=1) / P(Y=1|D=0)"""
    _require_binary(y_given_d)
    unexposed = float(y_given_d.entries[0, 1])
    if unexposed == 0:
        raise UndefinedRiskRatioError('P(Y=1|D=0) is zero', exposed=float(y_given_d.entries[1, 1]))
    return float(y_given_d.entries[1, 1]) / unexposed


def _interval_from_masses(exposed_event, unexposed_event, unexposed_non_event, formula):
    # exposed_event > 0 is checked by the callers
    lower = max(0.0, (exposed_event - unexposed_event) / exposed_event)
    upper = min(1.0, unexposed_non_event / exposed_event)
    return BoundInterval(lower, upper, formula)


def bounds_simple_binary(y_given_d):
    """Bounds for a binary outcome from P(Y|D) alone.

    The lower bound is computed as (y11 - y01) / y11, which equals
    1 - 1/RR wherever the risk ratio is defined and stays finite when
    P(Y=1|D=0) is zero.
    """
    _require_binary(y_given_d)
    exposed_event = float(y_given_d.entries[1, 1])
    if exposed_event <= 0:
        raise UndefinedPCError('P(Y=1|D=1) is zero', denominator=exposed_event)
    return _interval_from_masses(
        exposed_event,
        float(y_given_d.entries[0, 1]),
        float(y_given_d.entries[0, 0]),
        FormulaId.BINARY_SIMPLE,
    )


def bounds_simple_ordinal(y_given_d, scale):
    if y_given_d.col_arity != scale.n_levels:
        raise ArityMismatchError(f'{y_given_d.name} has {y_given_d.col_arity} levels, scale needs {scale.n_levels}')
    exposed_event = y_given_d.event_mass(1, scale)
    if exposed_event <= 0:
        raise UndefinedPCError(
            f'P(Y>{scale.threshold}|D=1) is zero', denominator=exposed_event, t=scale.threshold,
        )
    return _interval_from_masses(
        exposed_event,
        y_given_d.event_mass(0, scale),
        y_given_d.non_event_mass(0, scale),
        FormulaId.ORDINAL_SIMPLE,
    )


def mediator_bound_terms(scenario):
    """Audit terms of the mediator formulas, recomputed from the scenario tables"""
    scale = scenario.scale
    m = scenario.m_given_d.entries
    ystar = scenario.y_given_m
    derived = derive_outcome_given_exposure(scenario.m_given_d, scenario.y_given_m)
    denominator = derived.event_mass(1, scale)

    # m[0] is M given D=0, m[1] is M given D=1
    b = min(float(m[0, 0]), float(m[1, 1]))
    c = float(m[1, 0]) - float(m[0, 0])
    star_event_m0 = ystar.event_mass(0, scale)
    star_event_m1 = ystar.event_mass(1, scale)
    B = star_event_m0 - star_event_m1
    C = min(star_event_m1, ystar.non_event_mass(0, scale))

    binary = {}
    if scale.is_binary:
        y = ystar.entries
        binary = {
            'alpha1': min(float(m[0, 0]), float(m[1, 1])),
            'alpha2': min(float(y[0, 0]), float(y[1, 1])),
            'beta1': float(m[1, 0]) - float(m[0, 0]),
            'beta2': float(y[1, 0]) - float(y[0, 0]),
        }
    return MediatorBoundTerms(b=b, c=c, B=B, C=C, denominator=denominator, **binary)


def _clamped_upper(raw_upper, lower, formula, tol, denominator):
    # rounding error of a ratio grows as its denominator shrinks
    tol = tol / min(1.0, denominator)
    if raw_upper > 1 + tol or raw_upper < lower - tol:
        raise TheoremViolationError(
            f'{formula.value} upper bound {raw_upper!r} falls outside [{lower!r}, 1]',
            upper=raw_upper, lower=lower,
        )
    return min(1.0, max(lower, raw_upper))


def _require_mediator(scenario):
    if not scenario.is_mediator:
        raise ArityMismatchError('mediator bounds need a mediator scenario')


def bounds_mediator_binary(scenario, tol=None):
    """Bounds for a binary outcome completely mediated by a binary M"""
    _require_mediator(scenario)
    if not scenario.scale.is_binary:
        raise ArityMismatchError('binary mediator bounds need T=1, t=0')
    tol = theorem_tolerance(tol)
    terms = mediator_bound_terms(scenario)
    if terms.denominator <= 0:
        raise UndefinedPCError('derived P(Y=1|D=1) is zero', denominator=terms.denominator)
    derived = derive_outcome_given_exposure(scenario.m_given_d, scenario.y_given_m)
    lower = bounds_simple_binary(derived).lower
    numerator = terms.alpha1 * terms.alpha2 + (terms.alpha1 + terms.beta1) * (terms.alpha2 + terms.beta2)
    upper = _clamped_upper(numerator / terms.denominator, lower, FormulaId.BINARY_MEDIATOR, tol, terms.denominator)
    return BoundInterval(lower, upper, FormulaId.BINARY_MEDIATOR, terms)


def bounds_mediator_ordinal(scenario, scale=None, tol=None):
    """Bounds for an ordinal outcome completely mediated by a binary M"""
    _require_mediator(scenario)
    if scale is not None and scale != scenario.scale:
        raise ArityMismatchError(f'scale {scale} does not match the scenario scale {scenario.scale}')
    tol = theorem_tolerance(tol)
    terms = mediator_bound_terms(scenario)
    if terms.denominator <= 0:
        raise UndefinedPCError(
            f'derived P(Y>{scenario.scale.threshold}|D=1) is zero', denominator=terms.denominator,
        )
    lower = max(0.0, terms.c * terms.B / terms.denominator)
    numerator = terms.b * terms.C + (terms.b + terms.c) * (terms.C + terms.B)
    upper = _clamped_upper(numerator / terms.denominator, lower, FormulaId.ORDINAL_MEDIATOR, tol, terms.denominator)
    return BoundInterval(lower, upper, FormulaId.ORDINAL_MEDIATOR, terms)


def bounds_simple(y_given_d, scale):
    """Dispatch to the binary or ordinal simple formula"""
    if scale.is_binary:
        return bounds_simple_binary(y_given_d)
    return bounds_simple_ordinal(y_given_d, scale)


def bounds_mediator(scenario):
    if scenario.scale.is_binary:
        return bounds_mediator_binary(scenario)
    return bounds_mediator_ordinal(scenario)


def dominance_report(scenario, scale=None, tol=None):
    """Compare simple and mediator bounds: equal lower bounds, mediator upper no larger"""
    _require_mediator(scenario)
    scale = scale or scenario.scale
    tol = theorem_tolerance(tol)
    derived = derive_outcome_given_exposure(scenario.m_given_d, scenario.y_given_m)
    simple = bounds_simple_ordinal(derived, scale)
    mediated = bounds_mediator_ordinal(scenario, scale, tol=tol)
    tol = tol / min(1.0, mediated.terms.denominator)
    lower_gap = abs(simple.lower - mediated.lower)
    if lower_gap > tol:
        raise TheoremViolationError(
            f'lower bounds differ by {lower_gap!r}', simple=simple.lower, mediator=mediated.lower,
        )
    improvement = simple.upper - mediated.upper
    logger.debug('t=%d: simple %s, mediator %s', scale.threshold, simple.as_dict(), mediated.as_dict())
    if improvement < -tol:
        raise TheoremViolationError(
            f'mediator upper bound exceeds the simple one by {-improvement!r}',
            simple=simple.upper, mediator=mediated.upper,
        )
    return DominanceReport(simple, mediated, lower_equal=True, upper_improvement=max(0.0, improvement))


def balance_of_probabilities(interval):
    """Whether causation is more likely than not, given only the bounds"""
    if interval.lower > 0.5:
        return Verdict.ESTABLISHED
    if interval.upper <= 0.5:
        return Verdict.EXCLUDED
    return Verdict.UNDETERMINED
