from pc_bounds.bounds import (
    balance_of_probabilities,
    bounds_mediator,
    bounds_simple,
    dominance_report,
    risk_ratio,
)
from pc_bounds.core import outcome_given_exposure
from pc_bounds.display import format_interval
from pc_bounds.exceptions import UndefinedRiskRatioError
from pc_bounds.forms import load_scenario_document, scenario_to_document
from pc_bounds.management.base import CausationCommand, dump_json


class Command(CausationCommand):
    help = 'Compute closed-form bounds on the probability of causation for a scenario document.'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='Path to a JSON scenario document')
        parser.add_argument('--json', action='store_true', help='Print a JSON report instead of text')

    def run(self, **options):
        scenario = load_scenario_document(options['input'])
        scale = scenario.scale
        y_given_d = outcome_given_exposure(scenario)
        simple = bounds_simple(y_given_d, scale)
        mediated = report = None
        if scenario.is_mediator:
            mediated = bounds_mediator(scenario)
            report = dominance_report(scenario)

        rr = None
        if scale.is_binary:
            try:
                rr = risk_ratio(y_given_d)
            except UndefinedRiskRatioError:
                pass
        verdict = balance_of_probabilities(mediated or simple)

        if options['json']:
            payload = {
                'scenario': scenario_to_document(scenario),
                'simple_bounds': simple.as_dict(),
                'mediator_bounds': mediated.as_dict() if mediated else None,
                'display': {
                    'simple': format_interval(simple),
                    'mediator': format_interval(mediated) if mediated else None,
                    'simple_truncated': format_interval(simple, truncated=True),
                    'mediator_truncated': format_interval(mediated, truncated=True) if mediated else None,
                },
                'dominance': report.as_dict() if report else None,
                'risk_ratio': rr,
                'verdict': verdict.value,
            }
            self.stdout.write(dump_json(payload))
            return

        self.stdout.write(f'Scenario: {scenario.kind.value}, T={scale.max_level}, t={scale.threshold}')
        if rr is not None:
            self.stdout.write(f'Risk ratio: {rr:.6g}')
        self._write_interval('Simple bounds', simple)
        if mediated:
            self._write_interval('Mediator bounds', mediated)
            terms = ', '.join(f'{name}={value:.6g}' for name, value in mediated.terms.as_dict().items())
            self.stdout.write(f'  terms: {terms}')
            self.stdout.write(
                f'Dominance: lower bounds equal, upper bound tightened by {report.upper_improvement:.6g}'
            )
        self.stdout.write(self.style.SUCCESS(f'Balance of probabilities: {verdict.value}'))

    def _write_interval(self, label, interval):
        self.stdout.write(f'{label} ({interval.formula.value}): {format_interval(interval)}')
        self.stdout.write(f'  truncated: {format_interval(interval, truncated=True)}')
        self.stdout.write(f'  lower={interval.lower!r} upper={interval.upper!r}')
