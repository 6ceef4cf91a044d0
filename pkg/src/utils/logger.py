import logging
import os

from dotenv import load_dotenv


load_dotenv()


class Logger:
    """Logger class"""

    _instance = None

    def __init__(self, name=None, filename: str = None, level=logging.INFO):
        if Logger._instance is None:
            Logger._instance = logging.getLogger(name)
            formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")

            # File handler, only when a log file is configured
            filename = filename or os.getenv("EGW_LOG_FILE")
            if filename:
                file_handler = logging.FileHandler(filename)
                file_handler.setFormatter(formatter)
                Logger._instance.addHandler(file_handler)

            # Stream handler
            stream_handler = logging.StreamHandler()
            stream_handler.setFormatter(formatter)
            Logger._instance.addHandler(stream_handler)

            Logger._instance.setLevel(level)

    def __getattr__(self, attr):
        return getattr(Logger._instance, attr)

    def set_quiet(self, quiet: bool = True):
        Logger._instance.setLevel(logging.WARNING if quiet else get_level())


def get_level(value: str = None) -> int:
    value = (value or os.getenv("EGW_LOG_LEVEL", "INFO")).upper()
    level = logging.getLevelName(value)
    if not isinstance(level, int):
        raise ValueError(f"Unknown log level '{value}'")

    return level


logger = Logger(name="egw_logger", level=get_level())
