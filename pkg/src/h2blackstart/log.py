import logging
import sys

LOG_LEVEL = logging.DEBUG
LOG_FORMAT = (
    "[%(asctime)s] %(levelname)s :: %(filename)s :: %(funcName)s :: %(message)s"
)

# Newton iteration traces; DEBUG only with trace_solver
NOISY_LOGGERS = ("h2blackstart.grid.powerflow",)


def create_logger(level: int = LOG_LEVEL, trace_solver: bool = False):
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        stream=sys.stdout,
        force=True,
    )
    logging.getLogger().setLevel(level)

    for name in NOISY_LOGGERS:
        logging.getLogger(name).setLevel(level if trace_solver else logging.INFO)
