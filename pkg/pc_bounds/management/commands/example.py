from django.core.management.base import CommandError

from pc_bounds.display import format_interval, format_probability
from pc_bounds.management.base import EXIT_EXAMPLE_MISMATCH, CausationCommand, dump_json
from pc_bounds.models import AuditLog
from pc_bounds.worked_examples import EXAMPLES, check_example, perturb


class Command(CausationCommand):
    help = 'Reproduce a published worked example and compare the rounded bounds with the reported ones.'

    def add_arguments(self, parser):
        parser.add_argument('--id', type=int, required=True, help='Worked example number (1 or 2)')
        parser.add_argument('--perturb', nargs=4, metavar=('TABLE', 'ROW', 'COL', 'DELTA'),
                            help='Shift DELTA of mass into one table entry before computing (test hook)')
        parser.add_argument('--audit', action='store_true', help='Record mismatches in the audit log')
        parser.add_argument('--json', action='store_true', help='Print a JSON report instead of text')

    def run(self, **options):
        example = EXAMPLES.get(options['id'])
        if example is None:
            raise self.usage_error(f'unknown example {options["id"]!r}; choose one of {sorted(EXAMPLES)}',
                                   id=options['id'])
        scenario = example.scenario()
        if options['perturb']:
            table, row, col, delta = options['perturb']
            try:
                row, col, delta = int(row), int(col), float(delta)
            except ValueError:
                raise self.usage_error('--perturb expects TABLE ROW COL DELTA', perturb=list(options['perturb']))
            scenario = perturb(scenario, table, row, col, delta)

        mediated, simple, checks = check_example(example, scenario)
        passed = all(check.ok for check in checks)

        if options['json']:
            self.stdout.write(dump_json({
                'example': example.example_id,
                'mediator_bounds': mediated.as_dict(),
                'simple_bounds': simple.as_dict(),
                'checks': [check.as_dict() for check in checks],
                'passed': passed,
            }))
        else:
            self.stdout.write(f'Example {example.example_id}')
            self.stdout.write(f'  mediator: {format_interval(mediated)}  (reported {example.reported_mediator[0]:.2f}, '
                              f'{example.reported_mediator[1]:.2f})')
            self.stdout.write(f'  simple:   {format_interval(simple)}  (reported {example.reported_simple[0]:.2f}, '
                              f'{example.reported_simple[1]:.2f})')
            for check in checks:
                status = self.style.SUCCESS('ok') if check.ok else self.style.ERROR('MISMATCH')
                self.stdout.write(f'  {check.label:<15} {check.computed:.6f} -> {format_probability(check.computed)} '
                                  f'vs {check.reported:.2f} (exact {check.reference:.4f})  {status}')

        if not passed:
            failed = [check.label for check in checks if not check.ok]
            if options['audit']:
                AuditLog.objects.create(
                    log_type='EXAMPLE',
                    message=f'Example {example.example_id} mismatch: {", ".join(failed)}',
                    details={'checks': [check.as_dict() for check in checks], 'perturb': options['perturb']},
                )
            raise CommandError(f'Example {example.example_id} does not match: {", ".join(failed)}',
                               returncode=EXIT_EXAMPLE_MISMATCH)
        if not options['json']:
            self.stdout.write(self.style.SUCCESS('PASS'))
