"""Presentation helpers: reported values keep full precision, only display rounds"""
from decimal import ROUND_DOWN, ROUND_HALF_UP, Decimal

from django.conf import settings


def _quantum(decimals):
    decimals = settings.PC_DISPLAY_DECIMALS if decimals is None else decimals
    return Decimal(1).scaleb(-decimals)


def round_half_up(value, decimals=None):
    return Decimal(repr(float(value))).quantize(_quantum(decimals), rounding=ROUND_HALF_UP)


def truncate(value, decimals=None):
    return Decimal(repr(float(value))).quantize(_quantum(decimals), rounding=ROUND_DOWN)


def format_probability(value, decimals=None, truncated=False):
    return str((truncate if truncated else round_half_up)(value, decimals))


def format_interval(interval, decimals=None, truncated=False):
    lower = format_probability(interval.lower, decimals, truncated)
    upper = format_probability(interval.upper, decimals, truncated)
    return f'{lower} ≤ PC ≤ {upper}'


def matches_reported(value, reported, decimals=None):
    """Whether a published 2-decimal figure is consistent with a computed value.

    Published tables mix half-up rounding and truncation, so either reading
    of the computed value is accepted.
    """
    reported = Decimal(str(reported)).quantize(_quantum(decimals))
    return reported in (round_half_up(value, decimals), truncate(value, decimals))
