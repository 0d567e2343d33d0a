import numpy as np
from django.conf import settings
from django.core.management.base import CommandError

from pc_bounds.bounds import bounds_mediator, bounds_simple
from pc_bounds.core import BoundInterval, outcome_given_exposure
from pc_bounds.display import format_interval
from pc_bounds.forms import load_scenario_document
from pc_bounds.management.base import EXIT_CONTAINMENT, CausationCommand, dump_json
from pc_bounds.models import AuditLog
from pc_bounds.oracle import EnvelopeMethod, containment_report, envelope_mediator, envelope_simple


def _shifted(interval, delta):
    if not delta:
        return interval
    return BoundInterval(interval.lower + delta, interval.upper - delta, interval.formula, interval.terms)


class Command(CausationCommand):
    help = 'Check closed-form bounds against the attainable range of the PC over compatible joints.'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='Path to a JSON scenario document')
        parser.add_argument('--resolution', type=float, default=None,
                            help='Grid step for mediated scenarios (default PC_ORACLE_RESOLUTION)')
        parser.add_argument('--samples', type=int, default=None,
                            help='Random compatible joints for the sampling check (default PC_ORACLE_SAMPLES)')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--shift-bounds', type=float, default=0.0,
                            help='Move both closed-form ends inward before checking (test hook)')
        parser.add_argument('--audit', action='store_true', help='Record containment failures in the audit log')
        parser.add_argument('--json', action='store_true', help='Print a JSON report instead of text')

    def run(self, **options):
        resolution = options['resolution']
        if resolution is not None and not 0 < resolution <= settings.PC_ORACLE_MAX_RESOLUTION:
            raise self.usage_error(
                f'--resolution must lie in (0, {settings.PC_ORACLE_MAX_RESOLUTION}]', resolution=resolution,
            )
        samples = options['samples']
        if samples is not None and samples < 0:
            raise self.usage_error('--samples must not be negative', samples=samples)
        seed = options['seed']
        if seed < 0:
            raise self.usage_error('--seed must not be negative', seed=seed)

        scenario = load_scenario_document(options['input'])
        scale = scenario.scale
        shift = options['shift_bounds']
        y_given_d = outcome_given_exposure(scenario)

        checks = [(
            'simple',
            envelope_simple(y_given_d, scale, samples=samples, seed=seed),
            _shifted(bounds_simple(y_given_d, scale), shift),
        )]
        if scenario.is_mediator:
            checks.append((
                'mediator',
                envelope_mediator(scenario, resolution=resolution, samples=samples, seed=seed),
                _shifted(bounds_mediator(scenario), shift),
            ))
        reports = [(name, envelope, interval, containment_report(envelope, interval))
                   for name, envelope, interval in checks]

        if options['json']:
            self.stdout.write(dump_json({
                name: {
                    'envelope': envelope.as_dict(),
                    'bounds': interval.as_dict(),
                    'containment': report.as_dict(),
                }
                for name, envelope, interval, report in reports
            }))
        else:
            for name, envelope, interval, report in reports:
                self._write_check(name, envelope, interval, report)

        failed = [name for name, _, _, report in reports if not report.ok]
        if failed:
            if options['audit']:
                AuditLog.objects.create(
                    log_type='CONTAINMENT',
                    message=f'Oracle containment violated for {", ".join(failed)} bounds of {options["input"]}',
                    details={name: report.as_dict() for name, _, _, report in reports},
                )
            raise CommandError(f'containment violated for {", ".join(failed)} bounds', returncode=EXIT_CONTAINMENT)

    def _write_check(self, name, envelope, interval, report):
        self.stdout.write(f'{name.capitalize()} scenario ({envelope.method.value})')
        self.stdout.write(f'  envelope:    [{envelope.min_pc!r}, {envelope.max_pc!r}]')
        if envelope.method == EnvelopeMethod.GRID_SEARCH:
            self.stdout.write(f'  grid:        {envelope.grid_points} points at resolution {envelope.resolution}')
        if envelope.sampled_range is not None:
            self.stdout.write(f'  sampled:     [{envelope.sampled_range[0]!r}, {envelope.sampled_range[1]!r}]')
        self.stdout.write(f'  closed form: {format_interval(interval)}  [{interval.lower!r}, {interval.upper!r}]')
        self.stdout.write(f'  slack:       lower {report.lower_slack:.3g}, upper {report.upper_slack:.3g}')
        for end, joints in zip(('min', 'max'), envelope.attained_at):
            for joint in joints:
                self.stdout.write(f'  witness at {end} ({joint.kind.value}): {np.round(joint.entries, 6).tolist()}')
        if report.ok:
            self.stdout.write(self.style.SUCCESS('  containment OK'))
        else:
            self.stdout.write(self.style.ERROR('  containment VIOLATED'))
