"""Scenario documents: JSON files describing a Simple or Mediator scenario"""
import json

from django import forms

from .core import OutcomeScale, Scenario, ScenarioKind, validate_scenario
from .exceptions import ScenarioDocumentError, ScenarioValidationError

TABLE_FIELDS = {
    ScenarioKind.SIMPLE: ('p_y_given_d',),
    ScenarioKind.MEDIATOR: ('p_m_given_d', 'p_y_given_m'),
}


def _is_numeric_table(value):
    if not isinstance(value, list) or not value:
        return False
    return all(
        isinstance(row, list) and row
        and all(isinstance(entry, (int, float)) and not isinstance(entry, bool) for entry in row)
        for row in value
    )


class ScenarioDocumentForm(forms.Form):
    """Validates a decoded scenario document and builds the Scenario it describes"""
    kind = forms.ChoiceField(choices=[(k.value, k.value) for k in ScenarioKind])
    T = forms.IntegerField()
    t = forms.IntegerField()
    p_y_given_d = forms.JSONField(required=False)
    p_m_given_d = forms.JSONField(required=False)
    p_y_given_m = forms.JSONField(required=False)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.scenario = None
        self.domain_error = None

    def clean(self):
        cleaned_data = super().clean()
        unknown = sorted(set(self.data) - set(self.fields))
        if unknown:
            raise forms.ValidationError(
                'Unknown fields: %(fields)s', code='SchemaViolation', params={'fields': ', '.join(unknown)},
            )
        if self.errors:
            return cleaned_data

        kind = ScenarioKind(cleaned_data['kind'])
        for field_name in TABLE_FIELDS[kind]:
            if cleaned_data.get(field_name) is None:
                self.add_error(field_name, forms.ValidationError(
                    f'Required for a {kind.value} scenario.', code='SchemaViolation',
                ))
            elif not _is_numeric_table(self.data[field_name]):
                self.add_error(field_name, forms.ValidationError(
                    'Expected a list of rows of numbers.', code='SchemaViolation',
                ))
        for other, names in TABLE_FIELDS.items():
            if other == kind:
                continue
            for field_name in names:
                if field_name in self.data:
                    self.add_error(field_name, forms.ValidationError(
                        f'Not allowed in a {kind.value} scenario.', code='SchemaViolation',
                    ))
        if self.errors:
            return cleaned_data

        scale = OutcomeScale(max_level=cleaned_data['T'], threshold=cleaned_data['t'])
        try:
            if kind == ScenarioKind.SIMPLE:
                raw = Scenario.simple(scale, cleaned_data['p_y_given_d'])
            else:
                raw = Scenario.mediator(scale, cleaned_data['p_m_given_d'], cleaned_data['p_y_given_m'])
            self.scenario = validate_scenario(raw)
        except ScenarioValidationError as exc:
            self.domain_error = exc
            raise forms.ValidationError(exc.message, code=exc.code)
        return cleaned_data


def scenario_from_document(document):
    """Validated Scenario for a decoded document, or the validation error that rejected it"""
    if not isinstance(document, dict):
        raise ScenarioDocumentError(f'a scenario document must be a JSON object, got {type(document).__name__}')
    form = ScenarioDocumentForm(data=document)
    if form.is_valid():
        return form.scenario
    if form.domain_error is not None:
        raise form.domain_error
    errors = form.errors.get_json_data()
    first = next(iter(errors.values()))[0]
    raise ScenarioDocumentError(first['message'], errors=errors)


def load_scenario_document(path):
    """Read a JSON scenario document from `path` and return the validated Scenario"""
    try:
        with open(path) as handle:
            document = json.load(handle)
    except OSError as exc:
        raise ScenarioDocumentError(f'cannot read {path}: {exc.strerror}', path=str(path))
    except json.JSONDecodeError as exc:
        raise ScenarioDocumentError(f'{path} is not valid JSON: {exc.msg}', path=str(path), line=exc.lineno)
    return scenario_from_document(document)


def scenario_to_document(scenario):
    document = {
        'kind': scenario.kind.value,
        'T': int(scenario.scale.max_level),
        't': int(scenario.scale.threshold),
    }
    if scenario.is_mediator:
        document['p_m_given_d'] = scenario.m_given_d.to_list()
        document['p_y_given_m'] = scenario.y_given_m.to_list()
    else:
        document['p_y_given_d'] = scenario.y_given_d.to_list()
    return document
