"""Shared plumbing for the pc_bounds management commands"""
import json
import logging

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from ..exceptions import CausationError, ScenarioValidationError, UndefinedPCError

logger = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_UNDEFINED_PC = 3
EXIT_CONTAINMENT = 4
EXIT_EXAMPLE_MISMATCH = 5


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f'{type(value).__name__} is not JSON serializable')


def dump_json(payload):
    return json.dumps(payload, indent=2, default=_to_builtin)


class CausationCommand(BaseCommand):
    """Runs `run()` and turns domain errors into CommandError with the documented exit codes"""

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except ScenarioValidationError as exc:
            self.write_error_json(exc)
            raise CommandError(f'{exc.code}: {exc.message}', returncode=EXIT_INPUT)
        except UndefinedPCError as exc:
            self.write_error_json(exc)
            raise CommandError(f'{exc.code}: {exc.message}', returncode=EXIT_UNDEFINED_PC)
        except CausationError as exc:
            logger.error('%s failed: %s', self.__module__, exc.message)
            raise CommandError(f'{exc.code}: {exc.message}')

    def run(self, **options):
        raise NotImplementedError

    def write_error_json(self, exc):
        self.stderr.write(json.dumps(exc.as_dict(), default=_to_builtin))

    def usage_error(self, message, **details):
        """Bad flag values: same error object and exit code as invalid input"""
        self.stderr.write(json.dumps({'error': 'UsageError', 'message': message, 'details': details}))
        return CommandError(message, returncode=EXIT_INPUT)
