import logging
import logging.handlers
import pathlib
import queue


class _TaggedFileHandler(logging.FileHandler):
    def __init__(self, log_file_path, tag):
        super().__init__(log_file_path, mode="a", encoding="utf-8")
        self.setFormatter(
            logging.Formatter("{}[%(levelname)s] %(name)s : %(message)s".format(tag))
        )

    def emit(self, record):
        super().emit(record)
        self.flush()


class RunLogging:
    """
    Copies the records of the package logger to a tagged log file while a
    run is in progress. Records go through a queue drained by a listener
    thread, so worker processes can log into the same file by installing
    `worker_handler()` with a queue shared across processes.
    """

    def __init__(
        self,
        log_file_path: pathlib.Path,
        log_tag="",
        level=logging.INFO,
        record_queue=None,
        logger_name="otdro",
    ):
        self._log: pathlib.Path = pathlib.Path(log_file_path)
        self._tag = log_tag
        self._level = level
        self._queue = record_queue if record_queue is not None else queue.Queue()
        self._logger = logging.getLogger(logger_name)
        self._queue_handler = None
        self._listener = None
        self._previous_level = None

    @property
    def log_file(self):
        return self._log

    @property
    def record_queue(self):
        return self._queue

    def worker_handler(self):
        handler = logging.handlers.QueueHandler(self._queue)
        handler.setLevel(self._level)
        return handler

    def start(self):
        self._log.parent.mkdir(parents=True, exist_ok=True)
        file_handler = _TaggedFileHandler(self._log, self._tag)
        file_handler.setLevel(self._level)
        self._listener = logging.handlers.QueueListener(
            self._queue, file_handler, respect_handler_level=True
        )
        self._listener.start()
        self._queue_handler = self.worker_handler()
        self._logger.addHandler(self._queue_handler)
        self._previous_level = self._logger.level
        if self._logger.getEffectiveLevel() > self._level:
            self._logger.setLevel(self._level)
        return self

    def stop(self):
        if self._listener is None:
            return
        self._logger.removeHandler(self._queue_handler)
        self._logger.setLevel(self._previous_level)
        self._listener.stop()
        for handler in self._listener.handlers:
            handler.close()
        self._listener = None
        self._queue_handler = None

    def __enter__(self):
        return self.start()

    def __exit__(self, exc_type, exc_value, traceback):
        self.stop()
        return False


def install_worker_logging(record_queue, level=logging.INFO, logger_name="otdro"):
    """Process pool initializer routing worker records to the parent's RunLogging"""
    logger = logging.getLogger(logger_name)
    logger.handlers = [logging.handlers.QueueHandler(record_queue)]
    logger.setLevel(level)
