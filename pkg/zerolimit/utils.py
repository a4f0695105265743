#
#    This file is part of zerolimit.
#
#    zerolimit is free software: you can redistribute it and/or modify
#    it under the terms of the GNU Lesser General Public License as
#    published by the Free Software Foundation, either version 3 of
#    the License, or (at your option) any later version.
#
#    zerolimit is distributed in the hope that it will be useful,
#    but WITHOUT ANY WARRANTY; without even the implied warranty of
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
#    GNU Lesser General Public License for more details.
#
#    You should have received a copy of the GNU Lesser General Public
#    License along with zerolimit. If not, see <http://www.gnu.org/licenses/>.
#
from multiprocessing import cpu_count
from logging.config import dictConfig
import logging
import os
import time


WORKERS_ENVIRONMENT_VARIABLE = "ZEROLIMIT_WORKERS"

loggingConfig = {}


def initLogging(verbosity=0, name="zerolimit"):
    """Creates a logger."""
    global loggingConfig

    verbose_levels = {
        -2: "CRITICAL",
        -1: "ERROR",
        0: "WARNING",
        1: "INFO",
        2: "DEBUG",
    }
    verbosity = max(-2, min(2, verbosity))
    log_handlers = {
        "console":
        {
            "class": "logging.StreamHandler",
            "formatter": "{name}Formatter".format(name=name),
            "stream": "ext://sys.stdout",
        },
    }
    loggingConfig.update({
        "{name}Logger".format(name=name):
        {
            "handlers": ["console"],
            "level": verbose_levels[verbosity],
        },
    })
    dict_log_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "handlers": log_handlers,
        "loggers": loggingConfig,
        "formatters":
        {
            "{name}Formatter".format(name=name):
            {
                "format": "[%(asctime)-15s] %(module)-9s "
                          "%(levelname)-7s %(message)s",
            },
        },
    }
    dictConfig(dict_log_config)
    return logging.getLogger("{name}Logger".format(name=name))


def getCPUcount():
    """Try to get the number of cpu on the current host."""
    try:
        return cpu_count()
    except NotImplementedError:
        return 1


def getWorkerQte(configured=None):
    """Resolve the worker pool size.

    :param configured: Worker count from the run configuration or a command
        line flag, or None.

    :returns: The configured value when given, else the value of the
        ``ZEROLIMIT_WORKERS`` environment variable, else 1."""
    if configured is not None:
        return int(configured)
    value = os.environ.get(WORKERS_ENVIRONMENT_VARIABLE, "").strip()
    if not value:
        return 1
    if value.lower() == "auto":
        return getCPUcount()
    return int(value)


class StopWatch(object):
    """Elapsed wall time in seconds, with pause support."""
    def __init__(self):
        self.totalTime = 0.
        self.startTime = time.perf_counter()
        self.halted = False

    def get(self):
        if self.halted:
            return self.totalTime
        return self.totalTime + time.perf_counter() - self.startTime

    def halt(self):
        if not self.halted:
            self.halted = True
            self.totalTime += time.perf_counter() - self.startTime

    def resume(self):
        if self.halted:
            self.halted = False
            self.startTime = time.perf_counter()

    def reset(self):
        self.__init__()
