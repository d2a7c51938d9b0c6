# Core module containing configuration and the error hierarchy

from . import config
from .config import ScenarioConfig, load_config_file, merge_config
from .errors import *  # noqa: F401,F403
from .errors import PhaseSpaceError

__all__ = ['config', 'ScenarioConfig', 'load_config_file', 'merge_config', 'PhaseSpaceError']
