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
"""Ordered parallel map and tree-reduced mapReduce over a local worker pool.

The pool is a broker living in the calling process plus ``workers`` local
processes started with ``python -m zerolimit.bootstrap``. Without a started
pool every call runs serially in the calling process."""
import sys

import zerolimit
from . import utils
from .fallbacks import ensurePoolStartedMapFallback


_broker = None
_host = None


def start(workers=1, verbose=0, nice=None):
    """Starts the worker pool. A size of 1 or less keeps execution serial.

    :param workers: Number of worker processes.
    :param verbose: Verbosity passed to the workers.
    :param nice: Optional niceness of the workers (needs psutil)."""
    global _broker, _host
    if _broker is not None or workers <= 1:
        zerolimit.SIZE = 1
        return
    from .broker import Broker
    from .launch import Host
    _broker = Broker()
    _host = Host()
    _host.setWorker(
        pythonExecutable=sys.executable,
        brokerHostname=_broker.hostname,
        taskPort=_broker.t_sock_port,
        nice=nice,
        verbose=verbose,
    )
    _host.setWorkerAmount(workers)
    _host.launch()
    _broker.alive = _host.alivePids
    zerolimit.SIZE = workers
    zerolimit.IS_RUNNING = True
    zerolimit.logger.info("Started {0}.".format(_host))


def shutdown(wait=True):
    """Stops the worker pool, if any.

    :param wait: Give the workers time to exit before terminating them."""
    global _broker, _host
    if _broker is not None:
        _broker.shutdown()
    if _host is not None:
        _host.close(wait)
    _broker = _host = None
    zerolimit.SIZE = 1
    zerolimit.IS_RUNNING = False


def _startup(rootFunction, *args, **kwargs):
    """Runs ``rootFunction(*args)`` with a pool of ``workers`` processes.

    :param rootFunction: Any callable; parallel calls made inside it use
        the pool.
    :param workers: Pool size, resolved by :func:`utils.getWorkerQte`.
    :param verbose: Worker verbosity.
    :param nice: Worker niceness.

    :returns: The result of the root function."""
    start(utils.getWorkerQte(kwargs.pop("workers", None)),
          kwargs.pop("verbose", 0), kwargs.pop("nice", None))
    try:
        return rootFunction(*args, **kwargs)
    finally:
        shutdown()


@ensurePoolStartedMapFallback
def map(func, *iterables):
    """map(func, *iterables)
    Equivalent to the builtin map but calls run on the worker pool.

    :param func: Any picklable callable object; it must return a picklable
        value.
    :param iterables: Iterable objects zipped into argument tuples.

    :returns: A generator of results in argument order. An exception raised
        by a call is raised when its value is retrieved."""
    tasks = list(zip(*iterables))
    results = _broker.run(func, tasks)
    return _mapGenerator(results, len(tasks))


def _mapGenerator(results, count):
    """Iterates through the results in order."""
    for index in range(count):
        success, value = results[index]
        if not success:
            raise value
        yield value


def _recursiveReduce(reductionFunc, results):
    """Reduces a list of results as a balanced binary tree."""
    if len(results) == 1:
        return results[0]
    half = len(results) // 2
    return reductionFunc(_recursiveReduce(reductionFunc, results[:half]),
                         _recursiveReduce(reductionFunc, results[half:]))


def mapReduce(mapFunc, reductionFunc, *iterables):
    """Executes :func:`map` then merges its results pairwise in a binary
    tree. This is a blocking call.

    :param mapFunc: Any picklable callable object.
    :param reductionFunc: Callable merging two results into one.
    :param iterables: Iterable objects zipped into argument tuples.

    :returns: A single value."""
    results = list(map(mapFunc, *iterables))
    if not results:
        raise ValueError("mapReduce needs at least one task")
    return _recursiveReduce(reductionFunc, results)
