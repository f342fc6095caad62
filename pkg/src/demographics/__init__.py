"""人口情境套件"""

from .base import DemographicSchedule
from .schedules import (
    SteadyStateSchedule,
    LinearRampSchedule,
    CustomTableSchedule,
    create_schedule,
)

__all__ = [
    'DemographicSchedule',
    'SteadyStateSchedule',
    'LinearRampSchedule',
    'CustomTableSchedule',
    'create_schedule',
]
