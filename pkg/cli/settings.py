"""Persistent defaults and the resolved per-run configuration."""

import json
import logging
import os
from dataclasses import dataclass
from typing import Optional

logger = logging.getLogger(__name__)

SETTINGS_PATH = os.path.join(os.path.expanduser("~"), ".qflift_settings.json")
CATALOG_ENV = "QFLIFT_CATALOG"

DEFAULT_SETTINGS = {
    'catalog': None,
    'format': 'human',
    'max_concurrent': 2,
    'p_max': 100,
    'lambda_max': 3,
    'm_max': 99,
    'progress': True,
}

FORMATS = ("text", "csv", "human")


@dataclass
class RunConfig:
    """Everything one command invocation needs."""
    command: str
    qf: Optional[str] = None
    form: Optional[str] = None
    twist: int = 1
    upto: int = 20
    n_max: Optional[int] = None
    p_max: int = 100
    lambda_max: int = 3
    m_max: int = 99
    scope: str = "all"
    out: Optional[str] = None
    fmt: str = "human"
    catalog: Optional[str] = None
    assume_conjecture: bool = False
    max_concurrent: int = 2
    progress: bool = True


def load_settings(path: str = None) -> dict:
    """Defaults overlaid with the saved settings file, if any."""
    settings = dict(DEFAULT_SETTINGS)
    path = path or SETTINGS_PATH
    try:
        if os.path.exists(path):
            with open(path, 'r') as f:
                settings.update(json.load(f))
    except (OSError, ValueError) as e:
        logger.warning("ignoring unreadable settings file %s: %s", path, e)
    return settings


def save_settings(settings: dict, path: str = None):
    path = path or SETTINGS_PATH
    try:
        with open(path, 'w') as f:
            json.dump(settings, f, indent=2, sort_keys=True)
    except OSError as e:
        logger.warning("could not save settings to %s: %s", path, e)


def resolve_config(args, settings: dict = None) -> RunConfig:
    """Command-line flags first, then the environment (catalog only), then saved settings."""
    settings = settings if settings is not None else load_settings()

    def pick(name: str, key: str = None):
        value = getattr(args, name, None)
        return value if value is not None else settings.get(key or name)

    def flag(name: str, default):
        value = getattr(args, name, None)
        return default if value is None else value

    fmt = pick("format")
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    catalog = getattr(args, "catalog", None) or os.environ.get(CATALOG_ENV) or settings.get('catalog')
    return RunConfig(
        command=args.command,
        qf=getattr(args, "qf", None),
        form=getattr(args, "form", None),
        twist=flag("twist", 1),
        upto=flag("upto", 20),
        n_max=getattr(args, "nmax", None),
        p_max=pick("pmax", "p_max"),
        lambda_max=pick("lambda_max"),
        m_max=pick("mmax", "m_max"),
        scope=getattr(args, "scope", None) or "all",
        out=getattr(args, "out", None),
        fmt=fmt,
        catalog=catalog,
        assume_conjecture=bool(getattr(args, "assume_conjecture", False)),
        max_concurrent=pick("jobs", "max_concurrent"),
        progress=settings.get('progress', True) and not getattr(args, "quiet", False),
    )
