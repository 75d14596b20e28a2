import logging


LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: str = "INFO") -> None:
    """
    Configure root logging once for a process (CLI run or API server).

    Args:
        level (str): Logging level name, e.g. ``"INFO"`` or ``"DEBUG"``.
    """
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT)
