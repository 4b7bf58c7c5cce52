import logging
import sys
import threading
from pathlib import Path
from typing import Optional

LOGGER_NAME = "RobustOco"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
RUN_FIELDS = ("run_id", "run_idx", "total_runs")
FILE_FORMAT = "[%(run_id)s] (%(run_idx)s/%(total_runs)s) [%(asctime)s] - %(levelname)s - %(name)s - %(message)s"


class LogColors:
    GREY = "\033[90m"
    CYAN = "\033[36m"
    YELLOW = "\033[33m"
    RED = "\033[31m"
    BOLD_RED = "\033[1;91m"
    MAGENTA = "\033[95m"
    WHITE = "\033[97m"
    RESET = "\033[0m"


class CustomColoredFormatter(logging.Formatter):
    """
    Console format: optional `[run_id] (i/n)` context from `extra`, a colored
    level, and a `sweep-k` tag for records emitted from sweep worker threads.
    """

    LEVEL_COLORS = {
        logging.DEBUG: LogColors.GREY,
        logging.INFO: LogColors.CYAN,
        logging.WARNING: LogColors.YELLOW,
        logging.ERROR: LogColors.RED,
        logging.CRITICAL: LogColors.BOLD_RED,
    }

    def __init__(self):
        super().__init__(datefmt=DATE_FORMAT)
        self._workers: dict = {}
        self._lock = threading.Lock()

    def _worker_tag(self, record) -> str:
        if record.threadName == "MainThread":
            return ""
        with self._lock:
            idx = self._workers.setdefault(record.threadName, len(self._workers))
        return f" {LogColors.MAGENTA}sweep-{idx}{LogColors.RESET}"

    @staticmethod
    def _context(record) -> str:
        parts = []
        run_id = getattr(record, "run_id", None)
        if run_id and run_id != "N/A":
            parts.append(f"[{run_id}]")
        run_idx, total = getattr(record, "run_idx", None), getattr(record, "total_runs", None)
        if isinstance(run_idx, int) and isinstance(total, int) and total > 0:
            parts.append(f"({run_idx + 1}/{total})")
        return " ".join(parts) + " " if parts else ""

    def format(self, record):
        color = self.LEVEL_COLORS.get(record.levelno, LogColors.RESET)
        stamp = self.formatTime(record, self.datefmt)
        text = (
            f"{color}{self._context(record)}[{stamp}] {record.levelname}{LogColors.RESET}"
            f"{self._worker_tag(record)} - {LogColors.WHITE}{record.getMessage()}{LogColors.RESET}"
        )
        if record.exc_info:
            text += "\n" + self.formatException(record.exc_info)
        return text


class DefaultExtraFilter(logging.Filter):
    """Back-fills the run context so FILE_FORMAT never misses a field."""

    def filter(self, record):
        for name in RUN_FIELDS:
            if not hasattr(record, name):
                setattr(record, name, "N/A")
        return True


def get_experiment_logger(log_level=logging.INFO, log_file_path: Optional[Path] = None) -> logging.Logger:
    """
    Configure the project logger in place. Library modules log through its
    children (``RobustOco.norms``, ``RobustOco.simulation``, ...), so they
    reach the same handlers.
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(log_level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler(sys.stdout)
    console.setFormatter(CustomColoredFormatter())
    logger.addHandler(console)

    if log_file_path is not None:
        log_file_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file_path, mode="w", encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))
        file_handler.addFilter(DefaultExtraFilter())
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger
