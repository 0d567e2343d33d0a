"""Published worked examples and the rounded bounds reported for them"""
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.conf import settings

from .bounds import bounds_mediator, bounds_simple
from .core import ConditionalTable, Scenario, outcome_given_exposure, validate_scenario
from .display import format_probability, matches_reported
from .exceptions import ArityMismatchError
from .forms import load_scenario_document

SCENARIO_DIR = Path(__file__).resolve().parent / 'scenarios'


@dataclass(frozen=True)
class WorkedExample:
    example_id: int
    fixture: str
    reported_mediator: tuple
    reported_simple: tuple
    # exact (lower, upper) values, checked to PC_EXAMPLE_TOLERANCE
    reference_mediator: tuple
    reference_simple: tuple

    def scenario(self):
        return load_scenario_document(SCENARIO_DIR / self.fixture)


@dataclass(frozen=True)
class ExampleCheck:
    label: str
    computed: float
    reported: float
    reference: float
    rounding_ok: bool
    reference_ok: bool

    @property
    def ok(self):
        return self.rounding_ok and self.reference_ok

    def as_dict(self):
        return {
            'label': self.label,
            'computed': self.computed,
            'display': format_probability(self.computed),
            'reported': self.reported,
            'reference': self.reference,
            'rounding_ok': self.rounding_ok,
            'reference_ok': self.reference_ok,
            'ok': self.ok,
        }


EXAMPLES = {
    1: WorkedExample(
        1, 'example1.json',
        reported_mediator=(0.57, 0.78), reported_simple=(0.57, 0.95),
        reference_mediator=(0.5690, 0.7828), reference_simple=(0.5690, 0.9483),
    ),
    2: WorkedExample(
        2, 'example2.json',
        reported_mediator=(0.71, 0.89), reported_simple=(0.71, 1.00),
        reference_mediator=(0.7164, 0.8955), reference_simple=(0.7164, 1.0),
    ),
}

PERTURBABLE_TABLES = ('m_given_d', 'y_given_m')


def perturb(scenario, table, row, col, delta):
    """Move `delta` of mass into entry (row, col), taken from the last column of that row.

    When the entry is itself in the last column the mass comes from column 0,
    so rows stay stochastic. The result is validated again.
    """
    if table not in PERTURBABLE_TABLES:
        raise ArityMismatchError(f'cannot perturb {table!r}; choose one of {", ".join(PERTURBABLE_TABLES)}')
    original = getattr(scenario, table)
    entries = np.array(original.entries)
    if not (0 <= row < entries.shape[0] and 0 <= col < entries.shape[1]):
        raise ArityMismatchError(f'entry ({row}, {col}) is outside {original.name}', table=table)
    donor = 0 if col == entries.shape[1] - 1 else entries.shape[1] - 1
    entries[row, col] += delta
    entries[row, donor] -= delta
    tables = scenario.tables()
    tables[table] = ConditionalTable(original.row_variable, original.col_variable, entries)
    return validate_scenario(Scenario.mediator(scenario.scale, tables['m_given_d'], tables['y_given_m']))


def check_example(example, scenario=None, tol=None):
    """Compare computed bounds with the reported figures and the exact reference values.

    Each end must match its reported figure and lie within `tol` of its
    reference value.
    """
    tol = settings.PC_EXAMPLE_TOLERANCE if tol is None else tol
    scenario = scenario or example.scenario()
    mediated = bounds_mediator(scenario)
    simple = bounds_simple(outcome_given_exposure(scenario), scenario.scale)
    checks = []
    for name, interval, reported, reference in (
        ('mediator', mediated, example.reported_mediator, example.reference_mediator),
        ('simple', simple, example.reported_simple, example.reference_simple),
    ):
        for i, (end, value) in enumerate((('lower', interval.lower), ('upper', interval.upper))):
            checks.append(ExampleCheck(
                f'{name} {end}', value, reported[i], reference[i],
                rounding_ok=matches_reported(value, reported[i]),
                reference_ok=abs(value - reference[i]) <= tol,
            ))
    return mediated, simple, checks
