import logging

from src.benchmark import get_experiment_logger
from src.benchmark.logger import LOGGER_NAME, CustomColoredFormatter


def _record(**extra):
    record = logging.LogRecord(LOGGER_NAME, logging.INFO, __file__, 1, "beta=1.5: avg cost 42", None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_formatter_prefixes_run_context():
    text = CustomColoredFormatter().format(_record(run_id="beta_sweep", run_idx=2, total_runs=15))
    assert "[beta_sweep]" in text
    assert "(3/15)" in text
    assert "beta=1.5: avg cost 42" in text


def test_formatter_without_context():
    text = CustomColoredFormatter().format(_record())
    assert "[None]" not in text and "N/A" not in text
    assert "beta=1.5: avg cost 42" in text


def test_file_log_fills_missing_context(tmp_path):
    path = tmp_path / "logs" / "run.log"
    logger = get_experiment_logger(log_file_path=path)
    logging.getLogger(f"{LOGGER_NAME}.simulation").info("child message")
    logger.info("tagged", extra={"run_id": "u_oco_perfect"})
    for handler in logger.handlers:
        handler.close()
    get_experiment_logger()

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("[N/A] (N/A/N/A)")
    assert "RobustOco.simulation - child message" in lines[0]
    assert lines[1].startswith("[u_oco_perfect]")


def test_logger_is_reconfigured_not_duplicated():
    logger = get_experiment_logger()
    again = get_experiment_logger(log_level=logging.DEBUG)
    assert logger is again
    assert len(again.handlers) == 1
    assert again.level == logging.DEBUG
    assert not again.propagate


def test_worker_threads_get_stable_tags():
    formatter = CustomColoredFormatter()
    main = _record()
    assert "sweep-" not in formatter.format(main)

    first, second = _record(), _record()
    first.threadName, second.threadName = "ThreadPoolExecutor-0_0", "ThreadPoolExecutor-0_1"
    assert "sweep-0" in formatter.format(first)
    assert "sweep-1" in formatter.format(second)
    assert "sweep-0" in formatter.format(first)
