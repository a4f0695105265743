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
from collections import namedtuple
import subprocess

import zerolimit


class Host(object):
    """Worker processes started on the local host."""
    LAUNCHING_ARGUMENTS = namedtuple(
        'launchingArguments',
        ['pythonExecutable', 'brokerHostname', 'taskPort', 'nice', 'verbose']
    )

    def __init__(self, hostname="127.0.0.1"):
        self.workersArguments = None
        self.hostname = hostname
        self.subprocesses = []
        self.workerAmount = 0

    def __repr__(self):
        return "{0} ({1} workers)".format(
            self.hostname,
            self.workerAmount,
        )

    def setWorker(self, *args, **kwargs):
        """Sets the worker arguments.
            Arguments and order to pass are defined in LAUNCHING_ARGUMENTS
            Using named args is advised.
        """
        self.workersArguments = self.LAUNCHING_ARGUMENTS(*args, **kwargs)

    def setWorkerAmount(self, workerAmount):
        """Sets the worker amount to launch on this host."""
        self.workerAmount = workerAmount

    def _getWorkerCommandList(self):
        """Generate the worker command as a list"""
        worker = self.workersArguments
        c = [worker.pythonExecutable, '-m', 'zerolimit.bootstrap']
        c.extend(['--brokerHostname', worker.brokerHostname])
        c.extend(['--taskPort', str(worker.taskPort)])
        if worker.nice:
            c.extend(['--nice', str(worker.nice)])
        if worker.verbose >= 1:
            c.append('-' + 'v' * worker.verbose)
        return c

    def getCommand(self):
        """Retrieves the shell command launching one worker."""
        return " ".join(self._getWorkerCommandList())

    def launch(self):
        """Launch every worker assigned on this host."""
        c = self._getWorkerCommandList()
        for _ in range(self.workerAmount):
            self.subprocesses.append(subprocess.Popen(c))
        return self.subprocesses

    def alivePids(self):
        """Pids of the workers still running."""
        return set(p.pid for p in self.subprocesses if p.poll() is None)

    def close(self, wait=True):
        """Connection(s) cleanup."""
        zerolimit.logger.debug('Closing workers on {0}.'.format(self))
        for process in self.subprocesses:
            if wait:
                try:
                    process.wait(timeout=2)
                    continue
                except subprocess.TimeoutExpired:
                    pass
            try:
                process.terminate()
            except OSError:
                pass
        self.subprocesses = []
