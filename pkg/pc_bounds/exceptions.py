"""Error hierarchy for the PC bounds app"""


class CausationError(Exception):
    """Base class for every error raised by pc_bounds"""
    code = 'CausationError'

    def __init__(self, message='', **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def as_dict(self):
        return {'error': self.code, 'message': self.message, 'details': self.details}


class ScenarioValidationError(CausationError):
    code = 'ScenarioValidation'


class NegativeProbabilityError(ScenarioValidationError):
    code = 'NegativeProbability'


class RowSumViolationError(ScenarioValidationError):
    code = 'RowSumViolation'

    def __init__(self, message='', row=None, deviation=None, **details):
        super().__init__(message, row=row, deviation=deviation, **details)
        self.row = row
        self.deviation = deviation


class ArityMismatchError(ScenarioValidationError):
    code = 'ArityMismatch'


class ThresholdOutOfRangeError(ScenarioValidationError):
    code = 'ThresholdOutOfRange'


class TotalMassViolationError(ScenarioValidationError):
    code = 'TotalMassViolation'


class ScenarioDocumentError(ScenarioValidationError):
    """A scenario document failed schema checks; `errors` is the form's JSON data"""
    code = 'SchemaViolation'

    def __init__(self, message='', errors=None, **details):
        super().__init__(message, errors=errors or {}, **details)
        self.errors = errors or {}


class UndefinedPCError(CausationError):
    """The conditioning event of the PC has probability zero"""
    code = 'UndefinedPC'


class UndefinedRiskRatioError(CausationError):
    code = 'UndefinedRiskRatio'


class TheoremViolationError(CausationError):
    """A proven bound relation failed; signals an implementation bug"""
    code = 'TheoremViolation'


class InfeasibleResolutionError(CausationError):
    code = 'InfeasibleResolution'


class DegenerateGenerationError(CausationError):
    code = 'DegenerateGeneration'


class EmptyExperimentError(CausationError):
    code = 'EmptyExperiment'
