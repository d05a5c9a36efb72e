# Command-line interface for qflift
from .commands import COMMANDS, run
from .settings import RunConfig, load_settings, resolve_config, save_settings
