from pc_bounds.core import OutcomeScale
from pc_bounds.management.base import CausationCommand, dump_json
from pc_bounds.models import ExperimentRun
from pc_bounds.simulation import export_figure_data, run_bounds_experiment
from pc_bounds.tasks import dispatch_experiment


class Command(CausationCommand):
    help = 'Run the bound-gap experiment on random mediated scenarios and export plot data as CSV.'

    def add_arguments(self, parser):
        parser.add_argument('--samples', type=int, default=100, help='Number of samples (default 100)')
        parser.add_argument('--T', type=int, default=2, help='Top outcome level (default 2)')
        parser.add_argument('--t', type=int, default=1, help='Threshold; the event is Y > t (default 1)')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', help='CSV destination; the CSV goes to standard output when omitted')
        parser.add_argument('--target-pc', action='store_true',
                            help='Aim each sample at a true PC drawn from its own percentile bin')
        parser.add_argument('--save', action='store_true', help='Store the run and its samples in the database')
        parser.add_argument('--background', action='store_true',
                            help='Fan the samples out to Celery workers; the stored run appears when they finish')
        parser.add_argument('--json', action='store_true', help='Print the summary as JSON')

    def run(self, **options):
        n_samples = options['samples']
        if n_samples < 1:
            raise self.usage_error('--samples must be at least 1', samples=n_samples)
        seed = options['seed']
        if seed < 0:
            raise self.usage_error('--seed must not be negative', seed=seed)
        scale = OutcomeScale(max_level=options['T'], threshold=options['t']).validate()

        if options['background']:
            result = dispatch_experiment(n_samples, seed, scale.max_level, scale.threshold, options['target_pc'])
            self.stdout.write(self.style.SUCCESS(f'Dispatched {n_samples} sample tasks (chord {result.id})'))
            return

        result = run_bounds_experiment(n_samples, scale, seed, target_pc=options['target_pc'])
        text = export_figure_data(result.records, options['out'])
        if options['out'] is None:
            self.stdout.write(text, ending='')

        summary = result.summary
        if options['json']:
            self.stdout.write(dump_json(summary.as_dict()))
        else:
            self.stdout.write(f'Samples: {summary.n_samples} (T={scale.max_level}, t={scale.threshold}, seed={seed})')
            self.stdout.write(f'Mean gap, simple bounds:   {summary.mean_simple_gap:.4f} '
                              f'({summary.reference_deviation_simple:+.4f} from reference)')
            self.stdout.write(f'Mean gap, mediator bounds: {summary.mean_mediator_gap:.4f} '
                              f'({summary.reference_deviation_mediator:+.4f} from reference)')
            self.stdout.write(f'Mean |midpoint - PC|, simple:   {summary.mean_abs_midpoint_error_simple:.4f}')
            self.stdout.write(f'Mean |midpoint - PC|, mediator: {summary.mean_abs_midpoint_error_mediator:.4f}')

        if options['save']:
            run = ExperimentRun.from_result(result, scale, seed, target_pc=options['target_pc'])
            self.stdout.write(self.style.SUCCESS(f'Saved experiment run {run.pk}'))
        if options['out']:
            self.stdout.write(self.style.SUCCESS(f'Wrote {summary.n_samples} rows to {options["out"]}'))
