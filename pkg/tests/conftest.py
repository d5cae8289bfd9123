"""Shared pytest configuration.

Registers a hypothesis profile without per-example deadlines: several
properties drive samplers or calibration loops whose wall time varies far
more than their logic.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=50,
)
settings.load_profile("suite")
