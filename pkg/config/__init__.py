from .settings import RUN_CONFIG_FILE, RunConfig, Settings, settings

__all__ = ["RUN_CONFIG_FILE", "RunConfig", "Settings", "settings"]
