# Majorana phase-space package

# Main package exports for src module
from .core import ScenarioConfig, PhaseSpaceError
from .utils import logger, set_debug_mode

__all__ = [
    'ScenarioConfig',
    'PhaseSpaceError',
    'logger',
    'set_debug_mode'
]
